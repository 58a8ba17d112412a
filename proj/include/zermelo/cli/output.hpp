#pragma once
/**
 * @file   output.hpp
 * @brief  CSV and JSON writers. Every number is printed with 17 significant
 *         digits so files round-trip exactly and are byte-stable.
 */

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "zermelo/cusp.hpp"
#include "zermelo/lie.hpp"
#include "zermelo/reach.hpp"

namespace zermelo::cli
{
    [[nodiscard]] std::string fmt (double v);
    [[nodiscard]] std::string fmt (const std::optional<double>& v);

    /// Column names of the two coordinates and the heading in the problem's chart.
    struct ChartLabels
    {
        const char* c1;
        const char* c2;
        const char* heading;
    };
    [[nodiscard]] ChartLabels labels (const ProblemDefinition& p) noexcept;

    void write_trajectory_csv (std::ostream& os, const ProblemDefinition& p, const GeodesicTrajectory& traj);

    void write_classify_json (std::ostream& os, const ExtremalClass& result);

    void write_cusp_json (std::ostream& os, const std::optional<CuspPoint>& cusp);

    /// One row per front point; is_sphere is NA when @p is_sphere is empty.
    void write_wavefront_csv (std::ostream& os, const ProblemDefinition& p, const Wavefront& front,
                              const std::vector<bool>& is_sphere);

    void write_value_csv (std::ostream& os, const ProblemDefinition& p, const DiscontinuityScan& scan);

    void write_jumps_json (std::ostream& os, const DiscontinuityScan& scan);

    /// Strong/weak boundary radii, one row each.
    void write_boundary_csv (std::ostream& os, const ProblemDefinition& p);

    struct GeodesicPolyline
    {
        double heading0;
        ExtremalKind kind;
        std::vector<TrajectorySample> samples;
    };

    /// Long format: one row per sample, grouped by geodesic.
    void write_geodesics_csv (std::ostream& os, const ProblemDefinition& p, const std::vector<GeodesicPolyline>& lines);

    void write_cusps_csv (std::ostream& os, const ProblemDefinition& p, const std::vector<AbnormalArc>& arcs);

    void write_separating_csv (std::ostream& os, const ProblemDefinition& p, const std::vector<SeparatingCandidate>& candidates);

} // namespace zermelo::cli
