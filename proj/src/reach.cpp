#include "zermelo/reach.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <limits>
#include <numbers>
#include <thread>

namespace zermelo
{
    namespace
    {
        constexpr double kTwoPi = 2.0 * std::numbers::pi;
        constexpr double kNaN = std::numeric_limits<double>::quiet_NaN ();

        template <class F> void parallel_for (std::size_t n, F&& body)
        {
            const std::size_t workers = std::min<std::size_t> (std::max (1u, std::thread::hardware_concurrency ()), n);
            if (workers <= 1)
            {
                for (std::size_t i = 0; i < n; ++i)
                {
                    body (i);
                }
                return;
            }
            std::atomic<std::size_t> next{0};
            std::vector<std::jthread> pool;
            pool.reserve (workers);
            for (std::size_t w = 0; w < workers; ++w)
            {
                pool.emplace_back ([&] {
                    for (std::size_t i = next++; i < n; i = next++)
                    {
                        body (i);
                    }
                });
            }
        }

        double circular_gap (double a, double b) { return std::abs (normalize_angle (a - b)); }

        bool strong_at (const ProblemDefinition& p, Position q0)
        {
            return current_norm (p, p.radial (q0)) > 1.0 + kClassifyTolerance;
        }

        void require_in_domain (const ProblemDefinition& p, Position q)
        {
            if (!p.in_domain (p.radial (q)))
            {
                throw Error (ErrorCode::DomainError, "point outside the problem domain");
            }
        }

        /// Planar embedding used to detect geometric crossings.
        Position embed (const ProblemDefinition& p, Position q)
        {
            if (p.chart () == Chart::PolarLike)
            {
                return {q.c1 * std::cos (q.c2), q.c1 * std::sin (q.c2)};
            }
            return q;
        }

        double cross (Position a, Position b) { return a.c1 * b.c2 - a.c2 * b.c1; }

        /// Intersection parameters (u, v) of segments [a0, a1] and [b0, b1]; nullopt if parallel.
        std::optional<std::array<double, 2>> segment_params (Position a0, Position a1, Position b0, Position b1)
        {
            const Position da{a1.c1 - a0.c1, a1.c2 - a0.c2};
            const Position db{b1.c1 - b0.c1, b1.c2 - b0.c2};
            const double den = cross (da, db);
            const double scale = std::hypot (da.c1, da.c2) * std::hypot (db.c1, db.c2);
            if (scale == 0.0 || std::abs (den) <= 1e-14 * scale)
            {
                return std::nullopt;
            }
            const Position w{b0.c1 - a0.c1, b0.c2 - a0.c2};
            return std::array<double, 2>{cross (w, db) / den, cross (w, da) / den};
        }

        /// Solves the 2x2 system (A + lambda diag A) x = b.
        std::optional<std::array<double, 2>> damped_solve (const std::array<double, 4>& a, const std::array<double, 2>& b,
                                                           double lambda)
        {
            const double a00 = a[0] + lambda * (a[0] + 1e-300);
            const double a11 = a[3] + lambda * (a[3] + 1e-300);
            const double det = a00 * a11 - a[1] * a[2];
            if (!(std::abs (det) > 0.0) || !std::isfinite (det))
            {
                return std::nullopt;
            }
            return std::array<double, 2>{(b[0] * a11 - a[1] * b[1]) / det, (a00 * b[1] - a[2] * b[0]) / det};
        }

        /**
         * Levenberg-Marquardt on a map R^2 -> R^2 given the residual and its
         * Jacobian columns. Keeps iterating after the tolerance is met until the
         * step stalls, which matters at folds where convergence is linear.
         */
        template <class Residual, class Jacobian>
        std::optional<std::array<double, 3>> levenberg_marquardt (std::array<double, 2> x, Residual&& residual,
                                                                  Jacobian&& jacobian, std::size_t max_iter,
                                                                  double step_floor)
        {
            auto f = residual (x);
            if (!f)
            {
                return std::nullopt;
            }
            double norm = std::hypot ((*f)[0], (*f)[1]);
            double lambda = 1e-6;
            for (std::size_t it = 0; it < max_iter && norm > 0.0; ++it)
            {
                const auto jac = jacobian (x);
                if (!jac)
                {
                    break;
                }
                const auto& j = *jac; // columns (j0, j1), (j2, j3)
                const std::array<double, 4> jtj{j[0] * j[0] + j[1] * j[1], j[0] * j[2] + j[1] * j[3],
                                                j[0] * j[2] + j[1] * j[3], j[2] * j[2] + j[3] * j[3]};
                const std::array<double, 2> g{-(j[0] * (*f)[0] + j[1] * (*f)[1]), -(j[2] * (*f)[0] + j[3] * (*f)[1])};
                bool accepted = false;
                std::array<double, 2> step{0.0, 0.0};
                while (lambda < 1e12)
                {
                    const auto d = damped_solve (jtj, g, lambda);
                    if (d)
                    {
                        step = *d;
                        const std::array<double, 2> trial{x[0] + step[0], x[1] + step[1]};
                        const auto ft = residual (trial);
                        if (ft)
                        {
                            const double nt = std::hypot ((*ft)[0], (*ft)[1]);
                            if (nt < norm)
                            {
                                x = trial;
                                f = ft;
                                norm = nt;
                                lambda = std::max (lambda * 0.1, 1e-15);
                                accepted = true;
                                break;
                            }
                        }
                    }
                    lambda *= 10.0;
                }
                if (!accepted || (std::abs (step[0]) <= step_floor && std::abs (step[1]) <= step_floor * std::max (1.0, std::abs (x[1]))))
                {
                    break;
                }
            }
            return std::array<double, 3>{x[0], x[1], norm};
        }

        std::optional<ExtendedState> try_flow (const ProblemDefinition& p, const ExtendedState& s0, double t,
                                               const StepControl& control)
        {
            if (!(t >= 0.0))
            {
                return std::nullopt;
            }
            try
            {
                return flow_state (p, s0, t, control);
            }
            catch (const Error&)
            {
                return std::nullopt;
            }
        }

        /// Crossing of two sampled curves, refined by bisecting both parameter intervals on the flow.
        struct Bracket
        {
            double t0;
            double t1;
            ExtendedState s0;
            ExtendedState s1;
        };

        std::optional<std::array<double, 2>> bracket_params (const ProblemDefinition& p, const Bracket& a, const Bracket& b,
                                                             double slack)
        {
            const auto uv = segment_params (embed (p, a.s0.position ()), embed (p, a.s1.position ()),
                                            embed (p, b.s0.position ()), embed (p, b.s1.position ()));
            if (!uv || (*uv)[0] < -slack || (*uv)[0] > 1.0 + slack || (*uv)[1] < -slack || (*uv)[1] > 1.0 + slack)
            {
                return std::nullopt;
            }
            return uv;
        }

        std::array<Bracket, 2> split (const ProblemDefinition& p, const Bracket& b, const StepControl& control)
        {
            const double tm = 0.5 * (b.t0 + b.t1);
            const auto sm = try_flow (p, b.s0, tm - b.t0, control);
            const ExtendedState mid = sm ? *sm : b.s0;
            return {Bracket{b.t0, tm, b.s0, mid}, Bracket{tm, b.t1, mid, b.s1}};
        }
    } // namespace

    std::vector<double> heading_grid (const ProblemDefinition& p, Position q0, std::size_t n)
    {
        if (n < 3)
        {
            throw Error (ErrorCode::InvalidParameter, "heading grid needs at least three headings");
        }
        require_in_domain (p, q0);
        const double step = kTwoPi / static_cast<double> (n);
        std::vector<double> grid (n);
        for (std::size_t i = 0; i < n; ++i)
        {
            grid[i] = -std::numbers::pi + step * static_cast<double> (i + 1);
        }
        std::vector<bool> taken (n, false);
        for (double h : abnormal_headings (p, p.radial (q0)))
        {
            std::size_t best = 0;
            double gap = std::numeric_limits<double>::infinity ();
            for (std::size_t i = 0; i < n; ++i)
            {
                const double g = circular_gap (grid[i], h);
                if (!taken[i] && g < gap)
                {
                    gap = g;
                    best = i;
                }
            }
            grid[best] = h;
            taken[best] = true;
        }
        std::sort (grid.begin (), grid.end ());
        return grid;
    }

    Wavefront wavefront (const ProblemDefinition& p, Position q0, double t, std::size_t n_alpha, const StepControl& control)
    {
        if (!(t >= 0.0))
        {
            throw Error (ErrorCode::InvalidParameter, "wavefront time must be nonnegative");
        }
        const std::vector<double> grid = heading_grid (p, q0, n_alpha);
        Wavefront front{t, q0, std::vector<WavefrontPoint> (grid.size ())};
        parallel_for (grid.size (), [&] (std::size_t i) {
            const ExtendedState s0 (q0, grid[i]);
            WavefrontPoint& pt = front.points[i];
            pt.heading0 = grid[i];
            pt.kind = classify (p, s0).kind;
            const auto end = try_flow (p, s0, t, control);
            pt.valid = end.has_value ();
            pt.position = end ? end->position () : Position{kNaN, kNaN};
        });
        return front;
    }

    int winding_number (const Wavefront& front, Position q)
    {
        std::vector<Position> poly;
        for (const auto& pt : front.points)
        {
            if (pt.valid)
            {
                poly.push_back (pt.position);
            }
        }
        int wn = 0;
        for (std::size_t i = 0; i < poly.size (); ++i)
        {
            const Position a = poly[i];
            const Position b = poly[(i + 1) % poly.size ()];
            const double side = (b.c1 - a.c1) * (q.c2 - a.c2) - (q.c1 - a.c1) * (b.c2 - a.c2);
            if (a.c2 <= q.c2)
            {
                if (b.c2 > q.c2 && side > 0.0)
                {
                    ++wn;
                }
            }
            else if (b.c2 <= q.c2 && side < 0.0)
            {
                --wn;
            }
        }
        return wn;
    }

    ShootingTable::ShootingTable (const ProblemDefinition& p, Position q0, const ShootingConfig& config)
        : p_ (p), q0_ (q0), config_ (config)
    {
        if (!(config.t_max > 0.0) || !(config.time_step > 0.0) || !(config.position_tol > 0.0))
        {
            throw Error (ErrorCode::InvalidParameter, "shooting needs positive t_max, time_step and position_tol");
        }
        headings_ = heading_grid (p, q0, config.n_headings);
        abnormal_ = abnormal_headings (p, p.radial (q0));
        const auto levels = static_cast<std::size_t> (std::ceil (config.t_max / config.time_step - 1e-9));
        times_.resize (levels + 1);
        for (std::size_t j = 0; j <= levels; ++j)
        {
            times_[j] = config.t_max * static_cast<double> (j) / static_cast<double> (levels);
        }
        nodes_.assign (headings_.size () * times_.size (), Node{{kNaN, kNaN}, false});
        parallel_for (headings_.size (), [&] (std::size_t i) {
            const FlowSamples fs = flow_at_times (p_, ExtendedState (q0_, headings_[i]), times_, config_.control);
            for (std::size_t j = 0; j < fs.states.size (); ++j)
            {
                nodes_[i * times_.size () + j] = Node{fs.states[j].position (), true};
            }
        });
    }

    std::optional<Position> ShootingTable::endpoint (double heading, double t) const
    {
        const auto s = try_flow (p_, ExtendedState (q0_, heading), t, config_.control);
        if (!s)
        {
            return std::nullopt;
        }
        return s->position ();
    }

    std::optional<ShootingTable::Solution> ShootingTable::refine (Position target, double heading, double t) const
    {
        using Vec = std::array<double, 2>;
        auto residual = [&] (const Vec& x) -> std::optional<Vec> {
            if (x[1] < 0.0)
            {
                return std::nullopt;
            }
            const auto e = endpoint (x[0], x[1]);
            if (!e)
            {
                return std::nullopt;
            }
            const Position d = chart_difference (p_, *e, target);
            return Vec{d.c1, d.c2};
        };
        constexpr double fd = 1e-7;
        auto jacobian = [&] (const Vec& x) -> std::optional<std::array<double, 4>> {
            const auto s = try_flow (p_, ExtendedState (q0_, x[0]), x[1], config_.control);
            const auto plus = endpoint (x[0] + fd, x[1]);
            const auto minus = endpoint (x[0] - fd, x[1]);
            if (!s || !plus || !minus)
            {
                return std::nullopt;
            }
            const Position dh = chart_difference (p_, *plus, *minus);
            const ExtendedRate v = extended_rhs (p_, *s);
            return std::array<double, 4>{dh.c1 / (2.0 * fd), dh.c2 / (2.0 * fd), v.dc1, v.dc2};
        };
        const auto x = levenberg_marquardt (Vec{heading, t}, residual, jacobian, config_.max_newton, 1e-13);
        if (!x || (*x)[2] > config_.position_tol || (*x)[1] < 0.0 || (*x)[1] > config_.t_max * (1.0 + 1e-9))
        {
            return std::nullopt;
        }
        return Solution{normalize_angle ((*x)[0]), (*x)[1], (*x)[2]};
    }

    ValueSample ShootingTable::value (Position target) const
    {
        ValueSample out;
        out.target = target;
        if (!p_.in_domain (p_.radial (target)))
        {
            return out;
        }
        if (chart_distance (p_, target, q0_) <= config_.position_tol)
        {
            out.t_min = 0.0;
            return out;
        }

        struct Candidate
        {
            std::size_t j;
            double heading;
            double t;
        };
        std::vector<Candidate> candidates;
        const std::size_t nh = headings_.size ();
        const std::size_t nt = times_.size ();
        const bool polar = p_.chart () == Chart::PolarLike;
        for (std::size_t i = 0; i < nh; ++i)
        {
            const std::size_t i2 = (i + 1) % nh;
            const double h0 = headings_[i];
            const double h1 = i2 == 0 ? headings_[0] + kTwoPi : headings_[i2];
            for (std::size_t j = 0; j + 1 < nt; ++j)
            {
                const Node& a = node (i, j);
                const Node& b = node (i2, j);
                const Node& c = node (i, j + 1);
                const Node& d = node (i2, j + 1);
                if (!a.valid || !b.valid || !c.valid || !d.valid)
                {
                    continue;
                }
                const double lo1 = std::min ({a.position.c1, b.position.c1, c.position.c1, d.position.c1});
                const double hi1 = std::max ({a.position.c1, b.position.c1, c.position.c1, d.position.c1});
                const double lo2 = std::min ({a.position.c2, b.position.c2, c.position.c2, d.position.c2});
                const double hi2 = std::max ({a.position.c2, b.position.c2, c.position.c2, d.position.c2});
                Position q = target;
                if (polar)
                {
                    const double mid = 0.5 * (lo2 + hi2);
                    q.c2 = mid + normalize_angle (target.c2 - mid);
                }
                const double pad = 0.05 * std::max (hi1 - lo1, hi2 - lo2) + config_.position_tol;
                if (q.c1 < lo1 - pad || q.c1 > hi1 + pad || q.c2 < lo2 - pad || q.c2 > hi2 + pad)
                {
                    continue;
                }
                // Barycentric guess over the two triangles of the cell.
                const double t0 = times_[j];
                const double t1 = times_[j + 1];
                Candidate best{j, 0.5 * (h0 + h1), 0.5 * (t0 + t1)};
                double best_score = -0.5;
                auto try_triangle = [&] (Position pa, Position pb, Position pc, std::array<double, 2> ua, std::array<double, 2> ub,
                                         std::array<double, 2> uc) {
                    const double det = cross ({pb.c1 - pa.c1, pb.c2 - pa.c2}, {pc.c1 - pa.c1, pc.c2 - pa.c2});
                    if (det == 0.0)
                    {
                        return;
                    }
                    const double wb = cross ({q.c1 - pa.c1, q.c2 - pa.c2}, {pc.c1 - pa.c1, pc.c2 - pa.c2}) / det;
                    const double wc = cross ({pb.c1 - pa.c1, pb.c2 - pa.c2}, {q.c1 - pa.c1, q.c2 - pa.c2}) / det;
                    const double wa = 1.0 - wb - wc;
                    const double score = std::min ({wa, wb, wc});
                    if (score > best_score)
                    {
                        best_score = score;
                        best.heading = wa * ua[0] + wb * ub[0] + wc * uc[0];
                        best.t = std::clamp (wa * ua[1] + wb * ub[1] + wc * uc[1], t0, t1);
                    }
                };
                try_triangle (a.position, b.position, c.position, {h0, t0}, {h1, t0}, {h0, t1});
                try_triangle (d.position, c.position, b.position, {h1, t1}, {h0, t1}, {h1, t0});
                candidates.push_back (best);
            }
        }
        std::stable_sort (candidates.begin (), candidates.end (),
                          [] (const Candidate& x, const Candidate& y) { return x.t < y.t; });

        std::optional<Solution> best;
        for (const Candidate& cand : candidates)
        {
            if (best && times_[cand.j] > best->t)
            {
                break;
            }
            const auto sol = refine (target, cand.heading, cand.t);
            if (sol && (!best || sol->t < best->t))
            {
                best = sol;
            }
        }
        if (!best)
        {
            return out;
        }
        out.t_min = best->t;
        out.heading0_star = best->heading;
        for (double h : abnormal_)
        {
            if (circular_gap (h, best->heading) <= 1e-6)
            {
                out.flag = ArrivalKind::ViaAbnormal;
            }
        }
        return out;
    }

    ValueSample value_function (const ProblemDefinition& p, Position q0, Position target, const ShootingConfig& config)
    {
        return ShootingTable (p, q0, config).value (target);
    }

    AbnormalArc abnormal_arc (const ProblemDefinition& p, Position q0, double heading0, double t_end, std::size_t n_samples,
                              const StepControl& control)
    {
        if (n_samples < 2 || !(t_end > 0.0))
        {
            throw Error (ErrorCode::InvalidParameter, "abnormal arc needs a positive duration and two samples");
        }
        const ExtendedState s0 (q0, heading0);
        if (classify (p, s0).kind != ExtremalKind::Abnormal)
        {
            throw Error (ErrorCode::NotAbnormal, "initial heading is not abnormal");
        }
        std::vector<double> times (n_samples);
        for (std::size_t i = 0; i < n_samples; ++i)
        {
            times[i] = t_end * static_cast<double> (i) / static_cast<double> (n_samples - 1);
        }
        const FlowSamples fs = flow_at_times (p, s0, times, control);
        AbnormalArc arc{heading0, {}, forward_cusp (p, q0, heading0, t_end), false};
        arc.samples.reserve (fs.states.size ());
        for (std::size_t i = 0; i < fs.states.size (); ++i)
        {
            arc.samples.push_back ({times[i], i == 0 ? s0 : fs.states[i]});
        }
        return arc;
    }

    std::optional<CuspPoint> forward_cusp (const ProblemDefinition& p, Position q0, double heading0, double t_max)
    {
        const ExtendedState s0 (q0, heading0);
        std::optional<CuspPoint> c;
        if (p.family () == Family::Historical)
        {
            c = cusp_historical (s0);
        }
        else
        {
            try
            {
                c = cusp_numeric (p, s0, t_max);
            }
            catch (const Error& e)
            {
                if (e.code () != ErrorCode::DomainExit && e.code () != ErrorCode::StepCollapse)
                {
                    throw;
                }
            }
        }
        if (c && c->t_cusp > t_max)
        {
            return std::nullopt;
        }
        return c;
    }

    SphereAndBall sphere_and_ball (const ProblemDefinition& p, Position q0, double t, std::size_t n_alpha,
                                   const ShootingConfig& config)
    {
        if (!(t > 0.0))
        {
            throw Error (ErrorCode::InvalidParameter, "sphere radius must be positive");
        }
        SphereAndBall out;
        out.front = wavefront (p, q0, t, n_alpha, config.control);
        ShootingConfig local = config;
        local.t_max = t + 2.0 * config.time_step;
        const ShootingTable table (p, q0, local);
        out.values.resize (out.front.points.size ());
        out.is_sphere.assign (out.front.points.size (), false);
        std::vector<char> sphere (out.front.points.size (), 0);
        parallel_for (out.front.points.size (), [&] (std::size_t i) {
            const WavefrontPoint& pt = out.front.points[i];
            if (!pt.valid)
            {
                return;
            }
            out.values[i] = table.value (pt.position);
            // Abnormal endpoints are carried by the arcs.
            sphere[i] = pt.kind == ExtremalKind::Hyperbolic && out.values[i].reachable () &&
                        *out.values[i].t_min >= t - config.sphere_time_tol;
        });
        for (std::size_t i = 0; i < sphere.size (); ++i)
        {
            out.is_sphere[i] = sphere[i] != 0;
        }
        if (strong_at (p, q0))
        {
            for (double h : abnormal_headings (p, p.radial (q0)))
            {
                out.arcs.push_back (abnormal_arc (p, q0, h, t, 200, config.control));
            }
        }
        return out;
    }

    std::vector<SelfIntersection> self_intersections (const GeodesicTrajectory& trajectory)
    {
        const auto& s = trajectory.samples;
        std::vector<SelfIntersection> out;
        if (s.size () < 4)
        {
            return out;
        }
        const std::size_t n = s.size () - 1;
        std::vector<std::size_t> order (n);
        for (std::size_t k = 0; k < n; ++k)
        {
            order[k] = k;
        }
        auto lo = [&] (std::size_t k) { return std::min (s[k].state.c1, s[k + 1].state.c1); };
        auto hi = [&] (std::size_t k) { return std::max (s[k].state.c1, s[k + 1].state.c1); };
        std::sort (order.begin (), order.end (), [&] (std::size_t a, std::size_t b) { return lo (a) < lo (b); });
        for (std::size_t x = 0; x < n; ++x)
        {
            const std::size_t a = order[x];
            for (std::size_t y = x + 1; y < n && lo (order[y]) <= hi (a); ++y)
            {
                std::size_t k = a;
                std::size_t l = order[y];
                if (k > l)
                {
                    std::swap (k, l);
                }
                if (l <= k + 1)
                {
                    continue;
                }
                const Position a0 = s[k].state.position ();
                const Position a1 = s[k + 1].state.position ();
                const Position b0 = s[l].state.position ();
                const Position b1 = s[l + 1].state.position ();
                if (std::max (a0.c2, a1.c2) < std::min (b0.c2, b1.c2) || std::max (b0.c2, b1.c2) < std::min (a0.c2, a1.c2))
                {
                    continue;
                }
                const auto uv = segment_params (a0, a1, b0, b1);
                if (!uv || (*uv)[0] < 0.0 || (*uv)[0] >= 1.0 || (*uv)[1] < 0.0 || (*uv)[1] >= 1.0)
                {
                    continue;
                }
                const double u = (*uv)[0];
                out.push_back ({s[k].t + u * (s[k + 1].t - s[k].t), s[l].t + (*uv)[1] * (s[l + 1].t - s[l].t),
                                {a0.c1 + u * (a1.c1 - a0.c1), a0.c2 + u * (a1.c2 - a0.c2)}});
            }
        }
        std::sort (out.begin (), out.end (), [] (const SelfIntersection& a, const SelfIntersection& b) { return a.t1 < b.t1; });
        return out;
    }

    std::vector<SelfIntersection> self_intersections (const ProblemDefinition& p, const GeodesicTrajectory& trajectory,
                                                      const StepControl& control)
    {
        const auto& s = trajectory.samples;
        std::vector<SelfIntersection> out;
        if (s.size () < 4)
        {
            return out;
        }
        // Crossings are searched in the planar embedding, so polar charts wrap correctly.
        GeodesicTrajectory embedded;
        embedded.samples.reserve (s.size ());
        for (const auto& sample : s)
        {
            const Position e = embed (p, sample.state.position ());
            embedded.samples.push_back ({sample.t, ExtendedState (e.c1, e.c2, 0.0)});
        }
        auto index_of = [&] (double t) {
            const auto it = std::upper_bound (s.begin (), s.end (), t, [] (double v, const TrajectorySample& x) { return v < x.t; });
            return static_cast<std::size_t> (std::max<std::ptrdiff_t> (0, (it - s.begin ()) - 1));
        };
        for (const SelfIntersection& raw : self_intersections (embedded))
        {
            const std::size_t k = std::min (index_of (raw.t1), s.size () - 2);
            const std::size_t l = std::min (index_of (raw.t2), s.size () - 2);
            Bracket a{s[k].t, s[k + 1].t, s[k].state, s[k + 1].state};
            Bracket b{s[l].t, s[l + 1].t, s[l].state, s[l + 1].state};
            for (int it = 0; it < 80 && (a.t1 - a.t0 > 1e-13 || b.t1 - b.t0 > 1e-13); ++it)
            {
                const auto as = split (p, a, control);
                const auto bs = split (p, b, control);
                bool found = false;
                for (const Bracket& x : as)
                {
                    for (const Bracket& y : bs)
                    {
                        if (!found && bracket_params (p, x, y, 1e-9))
                        {
                            a = x;
                            b = y;
                            found = true;
                        }
                    }
                }
                if (!found)
                {
                    break;
                }
            }
            const auto uv = segment_params (embed (p, a.s0.position ()), embed (p, a.s1.position ()),
                                            embed (p, b.s0.position ()), embed (p, b.s1.position ()));
            const double u = uv ? std::clamp ((*uv)[0], 0.0, 1.0) : 0.5;
            const double v = uv ? std::clamp ((*uv)[1], 0.0, 1.0) : 0.5;
            const double t1 = a.t0 + u * (a.t1 - a.t0);
            const double t2 = b.t0 + v * (b.t1 - b.t0);
            const auto st = try_flow (p, a.s0, t1 - a.t0, control);
            out.push_back ({t1, t2, st ? st->position () : a.s0.position ()});
        }
        return out;
    }

    DiscontinuityScan discontinuity_scan (const ShootingTable& table, Position a, Position b, std::size_t n_samples)
    {
        if (n_samples == 0)
        {
            throw Error (ErrorCode::InvalidParameter, "scan needs at least one sample");
        }
        const bool degenerate = a.c1 == b.c1 && a.c2 == b.c2;
        const std::size_t n = degenerate ? 1 : n_samples;
        DiscontinuityScan scan;
        scan.samples.resize (n);
        parallel_for (n, [&] (std::size_t i) {
            const double s = n == 1 ? 0.0 : static_cast<double> (i) / static_cast<double> (n - 1);
            const Position q{a.c1 + s * (b.c1 - a.c1), a.c2 + s * (b.c2 - a.c2)};
            scan.samples[i] = {s, table.value (q)};
        });
        std::vector<double> diffs;
        for (std::size_t i = 0; i + 1 < n; ++i)
        {
            const auto& l = scan.samples[i].value.t_min;
            const auto& r = scan.samples[i + 1].value.t_min;
            if (l && r)
            {
                diffs.push_back (std::abs (*r - *l));
            }
        }
        if (!diffs.empty ())
        {
            std::vector<double> sorted = diffs;
            std::sort (sorted.begin (), sorted.end ());
            const std::size_t m = sorted.size ();
            const double median = m % 2 == 1 ? sorted[m / 2] : 0.5 * (sorted[m / 2 - 1] + sorted[m / 2]);
            scan.threshold = 10.0 * median;
        }
        for (std::size_t i = 0; i + 1 < n; ++i)
        {
            const auto& l = scan.samples[i].value.t_min;
            const auto& r = scan.samples[i + 1].value.t_min;
            const bool jump = (l.has_value () != r.has_value ())
                              || (l && r && std::abs (*r - *l) > scan.threshold && std::abs (*r - *l) > 1e-12);
            if (jump)
            {
                scan.jumps.push_back ({i, scan.samples[i].s, scan.samples[i + 1].s, l, r});
            }
        }
        return scan;
    }

    DiscontinuityScan discontinuity_scan (const ProblemDefinition& p, Position q0, Position a, Position b, std::size_t n_samples,
                                          const ShootingConfig& config)
    {
        return discontinuity_scan (ShootingTable (p, q0, config), a, b, n_samples);
    }

    CutLocusEstimate cut_locus_estimate (const ProblemDefinition& p, Position q0, double t_max, std::size_t n_alpha,
                                         const ShootingConfig& config, std::size_t n_fronts)
    {
        require_in_domain (p, q0);
        if (!strong_at (p, q0))
        {
            throw Error (ErrorCode::Unsupported, "cut locus estimate needs a strong-current initial point");
        }
        if (!(t_max > 0.0) || n_fronts == 0)
        {
            throw Error (ErrorCode::InvalidParameter, "cut locus estimate needs a positive horizon and at least one front");
        }
        const std::vector<double> abnormal = abnormal_headings (p, p.radial (q0));
        CutLocusEstimate out;
        out.horizon = t_max;
        std::vector<std::optional<CuspPoint>> cusps;
        for (double h : abnormal)
        {
            cusps.push_back (forward_cusp (p, q0, h, t_max));
            if (cusps.back ())
            {
                out.horizon = std::min (out.horizon, 1.5 * cusps.back ()->t_cusp);
            }
        }
        for (std::size_t i = 0; i < abnormal.size (); ++i)
        {
            const double end = cusps[i] ? std::min (cusps[i]->t_cusp, out.horizon) : out.horizon;
            AbnormalArc arc = abnormal_arc (p, q0, abnormal[i], end, 200, config.control);
            arc.truncated_at_cusp = cusps[i].has_value () && cusps[i]->t_cusp <= out.horizon;
            out.arcs.push_back (std::move (arc));
        }

        ShootingConfig local = config;
        local.t_max = out.horizon + 2.0 * config.time_step;
        const ShootingTable table (p, q0, local);
        using Vec = std::array<double, 2>;
        for (std::size_t f = 1; f <= n_fronts; ++f)
        {
            const double t = out.horizon * static_cast<double> (f) / static_cast<double> (n_fronts);
            const Wavefront front = wavefront (p, q0, t, n_alpha, config.control);
            GeodesicTrajectory poly;
            std::vector<double> hs;
            for (const auto& pt : front.points)
            {
                if (pt.valid)
                {
                    const Position e = embed (p, pt.position);
                    poly.samples.push_back ({static_cast<double> (hs.size ()), ExtendedState (e.c1, e.c2, 0.0)});
                    hs.push_back (pt.heading0);
                }
            }
            if (hs.size () < 4)
            {
                continue;
            }
            auto heading_at = [&] (double idx) {
                const auto k = std::min (static_cast<std::size_t> (idx), hs.size () - 2);
                return hs[k] + (idx - static_cast<double> (k)) * (hs[k + 1] - hs[k]);
            };
            for (const SelfIntersection& x : self_intersections (poly))
            {
                auto residual = [&] (const Vec& h) -> std::optional<Vec> {
                    const auto ea = try_flow (p, ExtendedState (q0, h[0]), t, config.control);
                    const auto eb = try_flow (p, ExtendedState (q0, h[1]), t, config.control);
                    if (!ea || !eb)
                    {
                        return std::nullopt;
                    }
                    const Position d = chart_difference (p, ea->position (), eb->position ());
                    return Vec{d.c1, d.c2};
                };
                auto jacobian = [&] (const Vec& h) -> std::optional<std::array<double, 4>> {
                    constexpr double fd = 1e-7;
                    std::array<double, 4> j{};
                    for (int c = 0; c < 2; ++c)
                    {
                        const auto plus = try_flow (p, ExtendedState (q0, h[c] + fd), t, config.control);
                        const auto minus = try_flow (p, ExtendedState (q0, h[c] - fd), t, config.control);
                        if (!plus || !minus)
                        {
                            return std::nullopt;
                        }
                        const Position d = chart_difference (p, plus->position (), minus->position ());
                        const double sgn = c == 0 ? 1.0 : -1.0;
                        j[2 * c] = sgn * d.c1 / (2.0 * fd);
                        j[2 * c + 1] = sgn * d.c2 / (2.0 * fd);
                    }
                    return j;
                };
                const auto sol = levenberg_marquardt (Vec{heading_at (x.t1), heading_at (x.t2)}, residual, jacobian,
                                                      config.max_newton, 1e-13);
                if (!sol || (*sol)[2] > config.position_tol || circular_gap ((*sol)[0], (*sol)[1]) < 1e-6)
                {
                    continue;
                }
                const auto end = try_flow (p, ExtendedState (q0, (*sol)[0]), t, config.control);
                if (!end)
                {
                    continue;
                }
                SeparatingCandidate cand{end->position (), t, normalize_angle ((*sol)[0]), normalize_angle ((*sol)[1]), std::nullopt, false};
                const ValueSample v = table.value (cand.position);
                cand.value = v.t_min;
                cand.confirmed = v.reachable () && *v.t_min >= t - config.sphere_time_tol;
                out.separating.push_back (cand);
            }
        }
        return out;
    }

    std::optional<double> loop_time_estimate (const ProblemDefinition& p, Position q0, double t_max, std::size_t n_alpha, double dt)
    {
        if (!(dt > 0.0) || !(t_max > 0.0))
        {
            throw Error (ErrorCode::InvalidParameter, "loop time scan needs positive t_max and dt");
        }
        const auto steps = static_cast<std::size_t> (std::floor (t_max / dt + 1e-9));
        for (std::size_t i = 1; i <= steps; ++i)
        {
            const double t = dt * static_cast<double> (i);
            if (winding_number (wavefront (p, q0, t, n_alpha), q0) != 0)
            {
                return t;
            }
        }
        return std::nullopt;
    }

} // namespace zermelo
