#include "zermelo/cli/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace zermelo::cli
{
    namespace
    {
        std::string num (double v)
        {
            char buf[32];
            std::snprintf (buf, sizeof buf, "%.9g", v == 0.0 ? 0.0 : v);
            return buf;
        }

        std::string escape (const std::string& s)
        {
            std::string out;
            for (char c : s)
            {
                switch (c)
                {
                case '<': out += "&lt;"; break;
                case '>': out += "&gt;"; break;
                case '&': out += "&amp;"; break;
                default: out += c;
                }
            }
            return out;
        }

        constexpr const char* kStyle = R"(  <style>
    polyline { fill: none; stroke-width: 1.2; vector-effect: non-scaling-stroke; }
    line { stroke-width: 1; vector-effect: non-scaling-stroke; }
    .abnormal { stroke: #1a9641; stroke-width: 2; }
    .hyperbolic { stroke: #d7191c; }
    .elliptic { stroke: #2c7bb6; }
    .front { stroke: #333333; }
    .value { stroke: #333333; }
    .boundary { stroke: #888888; stroke-dasharray: 6 4; }
    .cusp { fill: #1a9641; }
    .jump { fill: #d7191c; }
    .origin { fill: #000000; }
    .separating { fill: #fdae61; }
  </style>
)";
    } // namespace

    void SvgPlot::polyline (std::vector<Position> points, std::string css_class)
    {
        std::erase_if (points, [] (Position q) { return !std::isfinite (q.c1) || !std::isfinite (q.c2); });
        if (points.size () >= 2)
        {
            lines_.push_back ({std::move (points), std::move (css_class)});
        }
    }

    void SvgPlot::marker (Position at, std::string css_class)
    {
        if (std::isfinite (at.c1) && std::isfinite (at.c2))
        {
            markers_.push_back ({at, std::move (css_class)});
        }
    }

    void SvgPlot::horizontal (double c2, std::string css_class) { rules_.push_back ({true, c2, std::move (css_class)}); }

    void SvgPlot::vertical (double c1, std::string css_class) { rules_.push_back ({false, c1, std::move (css_class)}); }

    std::string SvgPlot::render () const
    {
        double x0 = std::numeric_limits<double>::infinity ();
        double x1 = -x0;
        double y0 = x0;
        double y1 = -x0;
        auto grow = [&] (Position q) {
            x0 = std::min (x0, q.c1);
            x1 = std::max (x1, q.c1);
            y0 = std::min (y0, q.c2);
            y1 = std::max (y1, q.c2);
        };
        for (const auto& l : lines_)
        {
            std::for_each (l.points.begin (), l.points.end (), grow);
        }
        for (const auto& m : markers_)
        {
            grow (m.at);
        }
        if (!(x0 <= x1))
        {
            x0 = y0 = -1.0;
            x1 = y1 = 1.0;
        }
        const double span = std::max ({x1 - x0, y1 - y0, 1e-9});
        const double pad = 0.05 * span;
        x0 -= pad;
        x1 += pad;
        y0 -= pad;
        y1 += pad;
        const double w = x1 - x0;
        const double h = y1 - y0;
        const double px_w = 800.0;
        const double px_h = std::clamp (px_w * h / w, 200.0, 1600.0);

        std::ostringstream os;
        os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num (px_w) << "\" height=\"" << num (px_h)
           << "\" viewBox=\"" << num (x0) << ' ' << num (-y1) << ' ' << num (w) << ' ' << num (h)
           << "\" preserveAspectRatio=\"none\">\n";
        os << "  <title>" << escape (title_) << "</title>\n" << kStyle;
        os << "  <g transform=\"scale(1,-1)\">\n";
        for (const auto& r : rules_)
        {
            if (r.horizontal && r.value >= y0 && r.value <= y1)
            {
                os << "    <line class=\"" << r.css_class << "\" x1=\"" << num (x0) << "\" y1=\"" << num (r.value) << "\" x2=\""
                   << num (x1) << "\" y2=\"" << num (r.value) << "\"/>\n";
            }
            else if (!r.horizontal && r.value >= x0 && r.value <= x1)
            {
                os << "    <line class=\"" << r.css_class << "\" x1=\"" << num (r.value) << "\" y1=\"" << num (y0) << "\" x2=\""
                   << num (r.value) << "\" y2=\"" << num (y1) << "\"/>\n";
            }
        }
        for (const auto& l : lines_)
        {
            os << "    <polyline class=\"" << l.css_class << "\" points=\"";
            for (std::size_t i = 0; i < l.points.size (); ++i)
            {
                os << (i ? " " : "") << num (l.points[i].c1) << ',' << num (l.points[i].c2);
            }
            os << "\"/>\n";
        }
        for (const auto& m : markers_)
        {
            os << "    <ellipse class=\"" << m.css_class << "\" cx=\"" << num (m.at.c1) << "\" cy=\"" << num (m.at.c2) << "\" rx=\""
               << num (4.0 * w / px_w) << "\" ry=\"" << num (4.0 * h / px_h) << "\"/>\n";
        }
        os << "  </g>\n</svg>\n";
        return os.str ();
    }

    void add_boundary (SvgPlot& plot, const ProblemDefinition& p)
    {
        for (double r : strong_current_boundary (p))
        {
            if (p.chart () == Chart::HistoricalCartesian)
            {
                plot.horizontal (r, "boundary");
            }
            else
            {
                plot.vertical (r, "boundary");
            }
        }
    }

} // namespace zermelo::cli
