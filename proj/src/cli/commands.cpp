#include "zermelo/cli/commands.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include <CLI11.hpp>

#include "zermelo/cli/output.hpp"
#include "zermelo/cli/svg.hpp"
#include "zermelo/cusp.hpp"
#include "zermelo/flow.hpp"
#include "zermelo/lie.hpp"
#include "zermelo/reach.hpp"

namespace zermelo::cli
{
    namespace
    {
        class IoError : public std::runtime_error
        {
          public:
            using std::runtime_error::runtime_error;
        };

        void write_file (const std::filesystem::path& dir, const std::string& name, const std::string& content)
        {
            std::error_code ec;
            std::filesystem::create_directories (dir, ec);
            if (ec)
            {
                throw IoError ("cannot create output directory " + dir.string () + ": " + ec.message ());
            }
            const auto path = dir / name;
            std::ofstream os (path, std::ios::binary | std::ios::trunc);
            os << content;
            os.close ();
            if (!os)
            {
                throw IoError ("cannot write " + path.string ());
            }
        }

        template <class F> std::string render (F&& writer)
        {
            std::ostringstream os;
            writer (os);
            return os.str ();
        }

        ExtendedState need_state (const RunConfig& c)
        {
            if (!c.state)
            {
                throw ConfigError ("command '" + c.command + "' needs --state c1,c2,heading");
            }
            return *c.state;
        }

        Position need_q0 (const RunConfig& c)
        {
            if (!c.q0)
            {
                throw ConfigError ("command '" + c.command + "' needs --q0 c1,c2");
            }
            return *c.q0;
        }

        double need_t (const RunConfig& c)
        {
            if (!c.t)
            {
                throw ConfigError ("command '" + c.command + "' needs --t");
            }
            return *c.t;
        }

        StepControl control_for (const RunConfig& c, double fallback)
        {
            const double tol = c.tol.value_or (fallback);
            StepControl control;
            control.abs_tol = tol;
            control.rel_tol = tol;
            return control;
        }

        std::vector<Position> positions (const std::vector<TrajectorySample>& samples)
        {
            std::vector<Position> out;
            out.reserve (samples.size ());
            for (const auto& s : samples)
            {
                out.push_back (s.state.position ());
            }
            return out;
        }

        const char* stroke (ExtremalKind k)
        {
            switch (k)
            {
            case ExtremalKind::Hyperbolic: return "hyperbolic";
            case ExtremalKind::Elliptic: return "elliptic";
            case ExtremalKind::Abnormal: break;
            }
            return "abnormal";
        }

        /// Draws the front as runs of consecutive points sharing a class.
        void plot_front (SvgPlot& plot, const Wavefront& front, const std::vector<bool>& keep)
        {
            std::vector<Position> run;
            std::string cls;
            auto flush = [&] {
                if (run.size () >= 2)
                {
                    plot.polyline (run, cls);
                }
                run.clear ();
            };
            for (std::size_t i = 0; i < front.points.size (); ++i)
            {
                const WavefrontPoint& pt = front.points[i];
                const bool shown = pt.valid && (keep.empty () || keep[i]);
                const std::string c = shown ? stroke (pt.kind) : "";
                if (c != cls)
                {
                    if (!run.empty () && shown)
                    {
                        // Share the joining point so runs connect.
                        run.push_back (pt.position);
                    }
                    flush ();
                    cls = c;
                }
                if (shown)
                {
                    run.push_back (pt.position);
                }
            }
            flush ();
        }

        ShootingConfig shooting_for (const RunConfig& c)
        {
            ShootingConfig cfg;
            cfg.t_max = c.t_max;
            if (c.tol)
            {
                cfg.position_tol = *c.tol;
            }
            return cfg;
        }

        /// Geodesics from q0 at every stride-th heading of the grid, sampled uniformly on [0, t_end].
        std::vector<GeodesicPolyline> fan_geodesics (const ProblemDefinition& p, Position q0, double t_end, std::size_t count,
                                                     std::size_t n_samples, const StepControl& control)
        {
            const std::vector<double> grid = heading_grid (p, q0, std::max<std::size_t> (count, 8));
            std::vector<double> times (n_samples + 1);
            for (std::size_t i = 0; i <= n_samples; ++i)
            {
                times[i] = t_end * static_cast<double> (i) / static_cast<double> (n_samples);
            }
            std::vector<GeodesicPolyline> out;
            for (double h : grid)
            {
                const ExtendedState s0 (q0, h);
                const FlowSamples fs = flow_at_times (p, s0, times, control);
                GeodesicPolyline line{h, classify (p, s0).kind, {}};
                for (std::size_t i = 0; i < fs.states.size (); ++i)
                {
                    line.samples.push_back ({times[i], fs.states[i]});
                }
                out.push_back (std::move (line));
            }
            return out;
        }

        std::vector<GeodesicPolyline> arcs_as_lines (const std::vector<AbnormalArc>& arcs)
        {
            std::vector<GeodesicPolyline> out;
            for (const AbnormalArc& a : arcs)
            {
                out.push_back ({a.heading0, ExtremalKind::Abnormal, a.samples});
            }
            return out;
        }

        void plot_lines (SvgPlot& plot, const std::vector<GeodesicPolyline>& lines)
        {
            for (const auto& l : lines)
            {
                plot.polyline (positions (l.samples), stroke (l.kind));
            }
        }

        void plot_cusps (SvgPlot& plot, const std::vector<AbnormalArc>& arcs)
        {
            for (const AbnormalArc& a : arcs)
            {
                if (a.cusp)
                {
                    plot.marker (a.cusp->position, "cusp");
                }
            }
        }

        int cmd_classify (const RunConfig& c, std::ostream& out, std::ostream&)
        {
            const ExtremalClass result = classify (c.problem, need_state (c), c.tol.value_or (kClassifyTolerance));
            write_classify_json (out, result);
            return kExitOk;
        }

        int cmd_integrate (const RunConfig& c, std::ostream& out, std::ostream& err)
        {
            const ExtendedState s0 = need_state (c);
            const GeodesicTrajectory traj = integrate_numeric (c.problem, s0, need_t (c), control_for (c, 1e-10));
            const ExtremalKind kind = classify (c.problem, s0).kind;
            write_file (c.out, "trajectory.csv", render ([&] (std::ostream& os) { write_trajectory_csv (os, c.problem, traj); }));
            write_file (c.out, "strong_boundary.csv", render ([&] (std::ostream& os) { write_boundary_csv (os, c.problem); }));
            SvgPlot plot ("geodesic");
            add_boundary (plot, c.problem);
            plot.polyline (positions (traj.samples), stroke (kind));
            plot.marker (s0.position (), "origin");
            write_file (c.out, "trajectory.svg", plot.render ());

            const char* status = traj.status == FlowStatus::Completed    ? "completed"
                                 : traj.status == FlowStatus::DomainExit ? "domain_exit"
                                                                         : "step_collapse";
            out << "{\"samples\": " << traj.samples.size () << ", \"t_end\": " << fmt (traj.back ().t) << ", \"class\": \""
                << to_string (kind) << "\", \"status\": \"" << status << "\"}\n";
            if (traj.status == FlowStatus::StepCollapse)
            {
                err << "error: step size underflow at t = " << fmt (traj.back ().t) << '\n';
                return kExitNumeric;
            }
            if (traj.status == FlowStatus::DomainExit)
            {
                err << "warning: geodesic left the domain at t = " << fmt (traj.back ().t) << '\n';
            }
            return kExitOk;
        }

        int cmd_cusp (const RunConfig& c, std::ostream& out, std::ostream& err)
        {
            ExtendedState s0 = need_state (c);
            const ProblemDefinition& p = c.problem;
            // Headings typed with a few digits are moved onto the nearby abnormal heading.
            const double snap = c.tol.value_or (1e-4);
            for (double h : abnormal_headings (p, p.radial (s0.position ())))
            {
                const double gap = std::abs (normalize_angle (h - s0.heading));
                if (gap > 0.0 && gap <= snap)
                {
                    err << "note: heading " << fmt (s0.heading) << " snapped to abnormal heading " << fmt (h) << '\n';
                    s0.heading = h;
                }
            }
            const std::optional<CuspPoint> cusp
                = p.family () == Family::Historical ? cusp_historical (s0) : cusp_numeric (p, s0, c.t_max);
            const std::string json = render ([&] (std::ostream& os) { write_cusp_json (os, cusp); });
            write_file (c.out, "cusp.json", json);
            out << json;

            const double t_end = cusp ? std::min (2.0 * cusp->t_cusp, std::max (c.t_max, cusp->t_cusp)) : c.t_max;
            GeodesicTrajectory traj;
            if (p.family () == Family::Historical)
            {
                traj = closed_form_trajectory_historical (s0, t_end, 400);
            }
            else
            {
                StepControl control = control_for (c, 1e-10);
                control.max_step = t_end / 400.0;
                traj = integrate_numeric (p, s0, t_end, control);
            }
            AbnormalArc arc{s0.heading, traj.samples, cusp, false};
            write_file (c.out, "cusp_trajectory.csv", render ([&] (std::ostream& os) { write_trajectory_csv (os, p, traj); }));
            write_file (c.out, "cusps.csv", render ([&] (std::ostream& os) { write_cusps_csv (os, p, {arc}); }));
            write_file (c.out, "strong_boundary.csv", render ([&] (std::ostream& os) { write_boundary_csv (os, p); }));
            SvgPlot plot ("abnormal geodesic and cusp");
            add_boundary (plot, p);
            plot.polyline (positions (traj.samples), "abnormal");
            plot.marker (s0.position (), "origin");
            plot_cusps (plot, {arc});
            write_file (c.out, "cusp.svg", plot.render ());
            return kExitOk;
        }

        int cmd_front (const RunConfig& c, std::ostream& out, bool ball)
        {
            const ProblemDefinition& p = c.problem;
            const Position q0 = need_q0 (c);
            const double t = need_t (c);
            ShootingConfig cfg = shooting_for (c);
            const SphereAndBall sb = sphere_and_ball (p, q0, t, c.n, cfg);
            write_file (c.out, "wavefront.csv",
                        render ([&] (std::ostream& os) { write_wavefront_csv (os, p, sb.front, sb.is_sphere); }));
            write_file (c.out, "strong_boundary.csv", render ([&] (std::ostream& os) { write_boundary_csv (os, p); }));
            SvgPlot plot (ball ? "time-minimal ball" : "wavefront");
            add_boundary (plot, p);
            plot.marker (q0, "origin");
            if (ball)
            {
                const auto lines = fan_geodesics (p, q0, t, 32, 60, cfg.control);
                const auto arcs = arcs_as_lines (sb.arcs);
                write_file (c.out, "geodesics.csv", render ([&] (std::ostream& os) { write_geodesics_csv (os, p, lines); }));
                write_file (c.out, "abnormal_arcs.csv", render ([&] (std::ostream& os) { write_geodesics_csv (os, p, arcs); }));
                write_file (c.out, "cusps.csv", render ([&] (std::ostream& os) { write_cusps_csv (os, p, sb.arcs); }));
                plot_lines (plot, lines);
                plot_lines (plot, arcs);
                plot_cusps (plot, sb.arcs);
                plot_front (plot, sb.front, sb.is_sphere);
            }
            else
            {
                plot_front (plot, sb.front, {});
            }
            write_file (c.out, ball ? "ball.svg" : "wavefront.svg", plot.render ());
            const auto sphere = std::count (sb.is_sphere.begin (), sb.is_sphere.end (), true);
            out << "{\"points\": " << sb.front.points.size () << ", \"sphere_points\": " << sphere
                << ", \"abnormal_arcs\": " << sb.arcs.size () << "}\n";
            return kExitOk;
        }

        int cmd_value (const RunConfig& c, std::ostream& out)
        {
            const ProblemDefinition& p = c.problem;
            const Position q0 = need_q0 (c);
            if (!c.segment)
            {
                throw ConfigError ("command 'value' needs --segment c1,c2:c1,c2");
            }
            const ShootingTable table (p, q0, shooting_for (c));
            const DiscontinuityScan scan = discontinuity_scan (table, c.segment->from, c.segment->to, c.n);
            const std::string jumps = render ([&] (std::ostream& os) { write_jumps_json (os, scan); });
            write_file (c.out, "value.csv", render ([&] (std::ostream& os) { write_value_csv (os, p, scan); }));
            write_file (c.out, "jumps.json", jumps);
            SvgPlot plot ("minimal time along the segment");
            std::vector<Position> run;
            auto flush = [&] {
                plot.polyline (run, "value");
                run.clear ();
            };
            std::size_t next_jump = 0;
            for (std::size_t i = 0; i < scan.samples.size (); ++i)
            {
                const ScanSample& s = scan.samples[i];
                if (s.value.t_min)
                {
                    run.push_back ({s.s, *s.value.t_min});
                }
                if (next_jump < scan.jumps.size () && scan.jumps[next_jump].index == i)
                {
                    if (s.value.t_min)
                    {
                        plot.marker ({s.s, *s.value.t_min}, "jump");
                    }
                    flush ();
                    ++next_jump;
                }
            }
            flush ();
            write_file (c.out, "value.svg", plot.render ());
            out << jumps;
            return kExitOk;
        }

        int cmd_synthesis (const RunConfig& c, std::ostream& out)
        {
            const ProblemDefinition& p = c.problem;
            const Position q0 = need_q0 (c);
            const ShootingConfig cfg = shooting_for (c);
            const CutLocusEstimate est = cut_locus_estimate (p, q0, c.t_max, c.n, cfg);

            // Hyperbolic geodesics, each cut at its first sample that is reached sooner by another geodesic.
            ShootingConfig local = cfg;
            local.t_max = est.horizon + 2.0 * cfg.time_step;
            const ShootingTable table (p, q0, local);
            std::vector<GeodesicPolyline> lines;
            for (auto& line : fan_geodesics (p, q0, est.horizon, 32, 40, cfg.control))
            {
                if (line.kind != ExtremalKind::Hyperbolic)
                {
                    continue;
                }
                std::size_t keep = 1;
                while (keep < line.samples.size ())
                {
                    const TrajectorySample& s = line.samples[keep];
                    const ValueSample v = table.value (s.state.position ());
                    if (!v.reachable () || *v.t_min < s.t - cfg.sphere_time_tol)
                    {
                        break;
                    }
                    ++keep;
                }
                line.samples.resize (keep);
                lines.push_back (std::move (line));
            }
            const auto arcs = arcs_as_lines (est.arcs);
            write_file (c.out, "geodesics.csv", render ([&] (std::ostream& os) { write_geodesics_csv (os, p, lines); }));
            write_file (c.out, "abnormal_arcs.csv", render ([&] (std::ostream& os) { write_geodesics_csv (os, p, arcs); }));
            write_file (c.out, "cusps.csv", render ([&] (std::ostream& os) { write_cusps_csv (os, p, est.arcs); }));
            write_file (c.out, "separating.csv",
                        render ([&] (std::ostream& os) { write_separating_csv (os, p, est.separating); }));
            write_file (c.out, "strong_boundary.csv", render ([&] (std::ostream& os) { write_boundary_csv (os, p); }));
            SvgPlot plot ("time-minimal synthesis");
            add_boundary (plot, p);
            plot_lines (plot, lines);
            plot_lines (plot, arcs);
            plot_cusps (plot, est.arcs);
            for (const auto& s : est.separating)
            {
                if (s.confirmed)
                {
                    plot.marker (s.position, "separating");
                }
            }
            plot.marker (q0, "origin");
            write_file (c.out, "synthesis.svg", plot.render ());
            const auto confirmed = std::count_if (est.separating.begin (), est.separating.end (),
                                                  [] (const SeparatingCandidate& s) { return s.confirmed; });
            out << "{\"horizon\": " << fmt (est.horizon) << ", \"geodesics\": " << lines.size ()
                << ", \"separating_candidates\": " << est.separating.size () << ", \"confirmed\": " << confirmed << "}\n";
            return kExitOk;
        }
    } // namespace

    int run_command (const RunConfig& config, std::ostream& out, std::ostream& err)
    {
        try
        {
            validate (config);
            const std::string& cmd = config.command;
            if (cmd == "classify")
            {
                return cmd_classify (config, out, err);
            }
            if (cmd == "integrate")
            {
                return cmd_integrate (config, out, err);
            }
            if (cmd == "cusp")
            {
                return cmd_cusp (config, out, err);
            }
            if (cmd == "wavefront" || cmd == "ball")
            {
                return cmd_front (config, out, cmd == "ball");
            }
            if (cmd == "value")
            {
                return cmd_value (config, out);
            }
            if (cmd == "synthesis")
            {
                return cmd_synthesis (config, out);
            }
            throw ConfigError ("unknown command '" + cmd + "'");
        }
        catch (const ConfigError& e)
        {
            err << "error: " << e.what () << '\n';
            return kExitConfig;
        }
        catch (const Error& e)
        {
            err << "error: " << e.what () << '\n';
            const bool numeric = e.code () == ErrorCode::StepCollapse || e.code () == ErrorCode::DomainExit;
            return numeric ? kExitNumeric : kExitConfig;
        }
        catch (const IoError& e)
        {
            err << "error: " << e.what () << '\n';
            return kExitIo;
        }
        catch (const std::filesystem::filesystem_error& e)
        {
            err << "error: " << e.what () << '\n';
            return kExitIo;
        }
    }

    int run (int argc, const char* const* argv, std::ostream& out, std::ostream& err)
    {
        CLI::App app ("Geodesics of rotationally symmetric Zermelo navigation problems", "zermelo-nav");
        app.require_subcommand (1);

        std::string problem = "historical";
        std::string state;
        std::string q0;
        std::string segment;
        std::string out_dir = ".";
        double t = 0.0;
        double tol = 0.0;
        double t_max = 5.0;
        std::size_t n = 0;

        enum : unsigned
        {
            kState = 1,
            kQ0 = 2,
            kT = 4,
            kN = 8,
            kTMax = 16,
            kSegment = 32,
            kOut = 64,
        };
        const std::map<std::string, std::pair<unsigned, std::string>> commands{
            {"classify", {kState, "Bracket determinants and extremal class of a state"}},
            {"integrate", {kState | kT | kOut, "Integrate one geodesic and write its trajectory"}},
            {"cusp", {kState | kTMax | kOut, "Cusp of the abnormal geodesic through a state"}},
            {"wavefront", {kQ0 | kT | kN | kOut, "Wavefront at time t with the sphere filter"}},
            {"ball", {kQ0 | kT | kN | kOut, "Time-minimal ball: sphere, abnormal arcs and geodesics"}},
            {"value", {kQ0 | kSegment | kN | kTMax | kOut, "Minimal time along a segment and its jumps"}},
            {"synthesis", {kQ0 | kN | kTMax | kOut, "Abnormal arcs, cusps and separating points near q0"}},
        };
        for (const auto& [name, entry] : commands)
        {
            CLI::App* sub = app.add_subcommand (name, entry.second);
            const unsigned f = entry.first;
            sub->add_option ("--problem", problem, "historical, vortex, a JSON descriptor or a JSON file");
            sub->add_option ("--tol", tol, "Tolerance (classification, integration, heading snap or shooting)");
            if (f & kState)
            {
                sub->add_option ("--state", state, "c1,c2,heading in the problem's chart")->required ();
            }
            if (f & kQ0)
            {
                sub->add_option ("--q0", q0, "Initial point c1,c2")->required ();
            }
            if (f & kT)
            {
                sub->add_option ("--t", t, "Time")->required ();
            }
            if (f & kN)
            {
                sub->add_option ("--n", n, "Grid size (headings, or samples for value)");
            }
            if (f & kTMax)
            {
                sub->add_option ("--t-max", t_max, "Time horizon");
            }
            if (f & kSegment)
            {
                sub->add_option ("--segment", segment, "c1,c2:c1,c2")->required ();
            }
            if (f & kOut)
            {
                sub->add_option ("--out", out_dir, "Output directory");
            }
        }

        try
        {
            app.parse (argc, argv);
        }
        catch (const CLI::ParseError& e)
        {
            const int code = app.exit (e, out, err);
            return code == 0 ? kExitOk : kExitConfig;
        }

        RunConfig config;
        config.command = app.get_subcommands ().front ()->get_name ();
        const CLI::App* sub = app.get_subcommands ().front ();
        auto given = [&] (const char* name) {
            const CLI::Option* o = sub->get_option_no_throw (name);
            return o != nullptr && o->count () > 0;
        };
        try
        {
            config.problem = parse_problem (problem);
            if (!state.empty ())
            {
                config.state = parse_state (state);
            }
            if (!q0.empty ())
            {
                config.q0 = parse_position (q0);
            }
            if (!segment.empty ())
            {
                config.segment = parse_segment (segment);
            }
        }
        catch (const ConfigError& e)
        {
            err << "error: " << e.what () << '\n';
            return kExitConfig;
        }
        if (given ("--t"))
        {
            config.t = t;
        }
        if (given ("--tol"))
        {
            config.tol = tol;
        }
        config.t_max = t_max;
        config.n = given ("--n") ? n : (config.command == "value" ? 200 : config.command == "synthesis" ? 128 : 256);
        config.out = out_dir;
        return run_command (config, out, err);
    }

} // namespace zermelo::cli
