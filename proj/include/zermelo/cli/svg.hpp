#pragma once
/**
 * @file   svg.hpp
 * @brief  Minimal SVG plot in data coordinates (y up).
 *
 * The viewBox is the data bounding box with a small margin and the drawing
 * group is flipped vertically, so coordinates are written as they are.
 * Strokes do not scale with the view.
 */

#include <string>
#include <vector>

#include "zermelo/problem.hpp"

namespace zermelo::cli
{
    class SvgPlot
    {
      public:
        explicit SvgPlot (std::string title) : title_ (std::move (title)) {}

        /// Stroke classes used: abnormal, hyperbolic, elliptic, front, value.
        void polyline (std::vector<Position> points, std::string css_class);
        /// Marker classes used: cusp, jump, origin, separating.
        void marker (Position at, std::string css_class);
        /// Full-width line c2 = value (historical strong/weak boundary).
        void horizontal (double c2, std::string css_class);
        /// Full-height line c1 = value (polar strong/weak boundary).
        void vertical (double c1, std::string css_class);

        [[nodiscard]] std::string render () const;

      private:
        struct Line
        {
            std::vector<Position> points;
            std::string css_class;
        };
        struct Marker
        {
            Position at;
            std::string css_class;
        };
        struct Rule
        {
            bool horizontal;
            double value;
            std::string css_class;
        };

        std::string title_;
        std::vector<Line> lines_;
        std::vector<Marker> markers_;
        std::vector<Rule> rules_;
    };

    /// Adds the strong/weak boundary as rules in the problem's chart.
    void add_boundary (SvgPlot& plot, const ProblemDefinition& p);

} // namespace zermelo::cli
