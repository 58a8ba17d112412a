#include "zermelo/cli/output.hpp"

#include <cmath>
#include <cstdio>

namespace zermelo::cli
{
    std::string fmt (double v)
    {
        if (!std::isfinite (v))
        {
            return "NA";
        }
        char buf[40];
        std::snprintf (buf, sizeof buf, "%.17g", v == 0.0 ? 0.0 : v);
        return buf;
    }

    std::string fmt (const std::optional<double>& v) { return v ? fmt (*v) : std::string ("NA"); }

    namespace
    {
        std::string json_number (const std::optional<double>& v)
        {
            return v && std::isfinite (*v) ? fmt (*v) : std::string ("null");
        }

        const char* arrival (ArrivalKind k) { return k == ArrivalKind::ViaAbnormal ? "abnormal" : "interior"; }
    } // namespace

    ChartLabels labels (const ProblemDefinition& p) noexcept
    {
        if (p.chart () == Chart::HistoricalCartesian)
        {
            return {"x", "y", "gamma"};
        }
        return {"r", "theta", "alpha"};
    }

    void write_trajectory_csv (std::ostream& os, const ProblemDefinition& p, const GeodesicTrajectory& traj)
    {
        const ChartLabels l = labels (p);
        os << "t," << l.c1 << ',' << l.c2 << ',' << l.heading << ",res_H,res_eq10,res_C0\n";
        for (std::size_t i = 0; i < traj.samples.size (); ++i)
        {
            const auto& s = traj.samples[i];
            os << fmt (s.t) << ',' << fmt (s.state.c1) << ',' << fmt (s.state.c2) << ',' << fmt (s.state.heading);
            if (i < traj.residuals.size ())
            {
                const ResidualTriple& r = traj.residuals[i];
                os << ',' << fmt (r.hamiltonian) << ',' << fmt (r.clairaut) << ',' << fmt (r.first_integral);
            }
            else
            {
                os << ",NA,NA,NA";
            }
            os << '\n';
        }
    }

    void write_classify_json (std::ostream& os, const ExtremalClass& result)
    {
        const BracketData& d = result.data;
        os << "{\"state\": [" << fmt (d.at.c1) << ", " << fmt (d.at.c2) << ", " << fmt (d.at.heading) << "], "
           << "\"D\": " << fmt (d.d) << ", \"D_prime\": " << fmt (d.d_prime) << ", \"D_second\": " << fmt (d.d_second)
           << ", \"class\": \"" << to_string (result.kind) << "\"}\n";
    }

    void write_cusp_json (std::ostream& os, const std::optional<CuspPoint>& cusp)
    {
        if (!cusp)
        {
            os << "{\"t_cusp\": null, \"position\": null, \"heading\": null, \"source\": null}\n";
            return;
        }
        os << "{\"t_cusp\": " << fmt (cusp->t_cusp) << ", \"position\": [" << fmt (cusp->position.c1) << ", "
           << fmt (cusp->position.c2) << "], \"heading\": " << fmt (cusp->heading) << ", \"source\": \""
           << to_string (cusp->source) << "\"}\n";
    }

    void write_wavefront_csv (std::ostream& os, const ProblemDefinition& p, const Wavefront& front,
                              const std::vector<bool>& is_sphere)
    {
        const ChartLabels l = labels (p);
        os << l.heading << "0," << l.c1 << ',' << l.c2 << ",class,is_sphere\n";
        for (std::size_t i = 0; i < front.points.size (); ++i)
        {
            const WavefrontPoint& pt = front.points[i];
            os << fmt (pt.heading0) << ',' << fmt (pt.position.c1) << ',' << fmt (pt.position.c2) << ',' << to_string (pt.kind)
               << ',';
            if (i < is_sphere.size () && pt.valid)
            {
                os << (is_sphere[i] ? 1 : 0);
            }
            else
            {
                os << "NA";
            }
            os << '\n';
        }
    }

    void write_value_csv (std::ostream& os, const ProblemDefinition& p, const DiscontinuityScan& scan)
    {
        const ChartLabels l = labels (p);
        os << "s," << l.c1 << ',' << l.c2 << ",T," << l.heading << "0_star,flag\n";
        for (const ScanSample& s : scan.samples)
        {
            const ValueSample& v = s.value;
            os << fmt (s.s) << ',' << fmt (v.target.c1) << ',' << fmt (v.target.c2) << ',' << fmt (v.t_min) << ','
               << (v.reachable () ? fmt (v.heading0_star) : std::string ("NA")) << ','
               << (v.reachable () ? arrival (v.flag) : "unreachable") << '\n';
        }
    }

    void write_jumps_json (std::ostream& os, const DiscontinuityScan& scan)
    {
        os << "{\"threshold\": " << fmt (scan.threshold) << ", \"jumps\": [";
        for (std::size_t i = 0; i < scan.jumps.size (); ++i)
        {
            const Jump& j = scan.jumps[i];
            const Position q = scan.samples[j.index].value.target;
            os << (i ? ", " : "") << "{\"index\": " << j.index << ", \"s_left\": " << fmt (j.s_left)
               << ", \"s_right\": " << fmt (j.s_right) << ", \"position\": [" << fmt (q.c1) << ", " << fmt (q.c2)
               << "], \"left_limit\": " << json_number (j.left_limit) << ", \"right_value\": " << json_number (j.right_value)
               << '}';
        }
        os << "]}\n";
    }

    void write_boundary_csv (std::ostream& os, const ProblemDefinition& p)
    {
        os << "r\n";
        for (double r : strong_current_boundary (p))
        {
            os << fmt (r) << '\n';
        }
    }

    void write_geodesics_csv (std::ostream& os, const ProblemDefinition& p, const std::vector<GeodesicPolyline>& lines)
    {
        const ChartLabels l = labels (p);
        os << "id," << l.heading << "0,class,t," << l.c1 << ',' << l.c2 << ',' << l.heading << '\n';
        for (std::size_t k = 0; k < lines.size (); ++k)
        {
            for (const auto& s : lines[k].samples)
            {
                os << k << ',' << fmt (lines[k].heading0) << ',' << to_string (lines[k].kind) << ',' << fmt (s.t) << ','
                   << fmt (s.state.c1) << ',' << fmt (s.state.c2) << ',' << fmt (s.state.heading) << '\n';
            }
        }
    }

    void write_cusps_csv (std::ostream& os, const ProblemDefinition& p, const std::vector<AbnormalArc>& arcs)
    {
        const ChartLabels l = labels (p);
        os << l.heading << "0,t_cusp," << l.c1 << ',' << l.c2 << ',' << l.heading << ",source\n";
        for (const AbnormalArc& arc : arcs)
        {
            if (arc.cusp)
            {
                os << fmt (arc.heading0) << ',' << fmt (arc.cusp->t_cusp) << ',' << fmt (arc.cusp->position.c1) << ','
                   << fmt (arc.cusp->position.c2) << ',' << fmt (arc.cusp->heading) << ',' << to_string (arc.cusp->source) << '\n';
            }
        }
    }

    void write_separating_csv (std::ostream& os, const ProblemDefinition& p, const std::vector<SeparatingCandidate>& candidates)
    {
        const ChartLabels l = labels (p);
        os << l.c1 << ',' << l.c2 << ",t," << l.heading << "0_a," << l.heading << "0_b,T,confirmed\n";
        for (const SeparatingCandidate& c : candidates)
        {
            os << fmt (c.position.c1) << ',' << fmt (c.position.c2) << ',' << fmt (c.t) << ',' << fmt (c.heading_a) << ','
               << fmt (c.heading_b) << ',' << fmt (c.value) << ',' << (c.confirmed ? 1 : 0) << '\n';
        }
    }

} // namespace zermelo::cli
