#include "zermelo/flow.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <initializer_list>

#include <boost/numeric/odeint.hpp>

namespace zermelo
{
    namespace
    {
        namespace odeint = boost::numeric::odeint;

        using OdeState = std::array<double, 3>;

        constexpr double kMaskFloor = 1e-6;
        constexpr double kVerticalHeading = 1e-12;

        CanonicalState canonical_rate (const Profile& f, double alpha)
        {
            const double ca = std::cos (alpha);
            const double sa = std::sin (alpha);
            return {ca, f.mu + sa / f.m, f.dmu * f.m * sa * sa - f.dm * sa / f.m};
        }

        /// Dormand-Prince integration of the canonical system, resumable across calls.
        class NumericFlow
        {
          public:
            NumericFlow (const ProblemDefinition& p, const ExtendedState& s0, const StepControl& control)
                : p_ (p), control_ (control), stepper_ (odeint::make_controlled<odeint::runge_kutta_dopri5<OdeState>> (
                                                       control.abs_tol, control.rel_tol)),
                  dt_ (control.initial_step)
            {
                const CanonicalState c = p.to_canonical (s0);
                x_ = {c.r, c.theta, c.alpha};
                (void) p.profile (c.r);
            }

            [[nodiscard]] double time () const noexcept { return t_; }
            [[nodiscard]] ExtendedState state () const noexcept { return p_.from_canonical ({x_[0], x_[1], x_[2]}); }

            template <class OnStep> FlowStatus advance_to (double t_target, OnStep&& on_step)
            {
                const auto rhs = [this] (const OdeState& x, OdeState& dxdt, double) {
                    const CanonicalState d = canonical_rate (p_.profile (x[0]), x[2]);
                    dxdt = {d.r, d.theta, d.alpha};
                };
                const double snap = 1e-14 * std::max (1.0, std::abs (t_target));
                while (t_target - t_ > snap)
                {
                    if (++steps_ > control_.max_steps)
                    {
                        return FlowStatus::StepCollapse;
                    }
                    const double natural = std::min (dt_, control_.max_step);
                    const double remaining = t_target - t_;
                    const bool clipped = natural >= remaining;
                    double dt = clipped ? remaining : natural;
                    odeint::controlled_step_result result = odeint::fail;
                    try
                    {
                        result = stepper_.try_step (rhs, x_, t_, dt);
                    }
                    catch (const Error& e)
                    {
                        if (e.code () != ErrorCode::DomainError)
                        {
                            throw;
                        }
                        stepper_.reset ();
                        dt_ = 0.25 * dt;
                        if (dt_ < control_.min_step)
                        {
                            return FlowStatus::DomainExit;
                        }
                        continue;
                    }
                    if (result == odeint::success)
                    {
                        if (clipped && std::abs (t_target - t_) <= snap)
                        {
                            t_ = t_target;
                        }
                        dt_ = clipped ? std::max (dt, natural) : dt;
                        if (!std::isfinite (x_[0]) || !std::isfinite (x_[1]) || !std::isfinite (x_[2]))
                        {
                            return FlowStatus::StepCollapse;
                        }
                        on_step (t_, state ());
                        if (near_boundary (x_[0]))
                        {
                            return FlowStatus::DomainExit;
                        }
                    }
                    else
                    {
                        dt_ = dt;
                        if (dt_ < control_.min_step)
                        {
                            return FlowStatus::StepCollapse;
                        }
                    }
                }
                t_ = std::max (t_, t_target);
                return FlowStatus::Completed;
            }

          private:
            [[nodiscard]] bool near_boundary (double r) const noexcept
            {
                const Interval dom = p_.domain ();
                return !dom.contains (r) || (std::isfinite (dom.lo) && r - dom.lo < control_.boundary_margin) ||
                       (std::isfinite (dom.hi) && dom.hi - r < control_.boundary_margin);
            }

            const ProblemDefinition& p_;
            StepControl control_;
            odeint::controlled_runge_kutta<odeint::runge_kutta_dopri5<OdeState>> stepper_;
            OdeState x_{};
            double t_ = 0.0;
            double dt_;
            std::size_t steps_ = 0;
        };

        /// (a - b)(a + b) / (sqrt(1+a^2) + sqrt(1+b^2)) = sqrt(1+a^2) - sqrt(1+b^2), without cancellation.
        double secant_difference (double a, double b)
        {
            return (a - b) * (a + b) / (std::sqrt (1.0 + a * a) + std::sqrt (1.0 + b * b));
        }

        /// a sqrt(1+a^2) - b sqrt(1+b^2).
        double tan_secant_difference (double a, double b)
        {
            const double fa = a * std::sqrt (1.0 + a * a);
            const double fb = b * std::sqrt (1.0 + b * b);
            if (a * b <= 0.0)
            {
                return fa - fb;
            }
            return (a - b) * (a + b) * (1.0 + a * a + b * b) / (fa + fb);
        }

        /// asinh(a) - asinh(b).
        double asinh_difference (double a, double b)
        {
            if (a * b <= 0.0)
            {
                return std::asinh (a) - std::asinh (b);
            }
            return std::asinh ((a - b) * (a + b) / (a * std::sqrt (1.0 + b * b) + b * std::sqrt (1.0 + a * a)));
        }

        void require_positive_time (double t)
        {
            if (!(t >= 0.0) || !std::isfinite (t))
            {
                throw Error (ErrorCode::InvalidParameter, "integration time must be finite and nonnegative");
            }
        }
    } // namespace

    AdjointInit make_adjoint (const ProblemDefinition& p, const ExtendedState& s0)
    {
        const CanonicalState c = p.to_canonical (s0);
        const Profile f = p.profile (c.r);
        const double p_theta = f.m * std::sin (c.alpha);
        return {p_theta, -1.0 - p_theta * f.mu, 1.0};
    }

    ExtendedRate extended_rhs (const ProblemDefinition& p, const ExtendedState& s)
    {
        const CanonicalState c = p.to_canonical (s);
        const CanonicalState d = canonical_rate (p.profile (c.r), c.alpha);
        if (p.chart () == Chart::HistoricalCartesian)
        {
            return {d.theta, d.r, -d.alpha};
        }
        return {d.r, d.theta, d.alpha};
    }

    double position_speed (const ProblemDefinition& p, const ExtendedState& s)
    {
        const CanonicalState c = p.to_canonical (s);
        const Profile f = p.profile (c.r);
        const double radial = std::cos (c.alpha);
        const double angular = f.m * f.mu + std::sin (c.alpha);
        return std::hypot (radial, angular);
    }

    GeodesicTrajectory integrate_numeric (const ProblemDefinition& p, const ExtendedState& s0, double t_final,
                                          const StepControl& control)
    {
        if (!(t_final > 0.0) || !std::isfinite (t_final))
        {
            throw Error (ErrorCode::InvalidParameter, "t_final must be positive");
        }
        GeodesicTrajectory traj;
        traj.adjoint = make_adjoint (p, s0);
        traj.method = FlowMethod::NumericRK;
        traj.samples.push_back ({0.0, s0});
        NumericFlow flow (p, s0, control);
        traj.status = flow.advance_to (t_final, [&] (double t, const ExtendedState& s) { traj.samples.push_back ({t, s}); });
        traj.residuals = first_integral_residuals (p, traj);
        return traj;
    }

    ExtendedState integrate_closed_form_historical (const ExtendedState& s0, double t)
    {
        require_positive_time (t);
        const double x0 = s0.c1;
        const double y0 = s0.c2;
        const double g0 = s0.heading;
        const double c0 = std::cos (g0);
        if (std::abs (c0) < kVerticalHeading)
        {
            const double sign = std::sin (g0) > 0.0 ? 1.0 : -1.0;
            return {x0 + sign * t * t / 2.0 + y0 * t, y0 + sign * t, g0};
        }
        // Branch fixed by gamma0: cos gamma keeps the sign sigma along the flow
        // and u = tan gamma = tan gamma0 - t.
        const double sigma = c0 > 0.0 ? 1.0 : -1.0;
        const double u0 = std::tan (g0);
        const double u = u0 - t;
        const double gamma = std::atan (u) + (sigma > 0.0 ? 0.0 : std::numbers::pi);

        // 1/cos gamma = sigma sqrt(1 + u^2).
        const double y = y0 - sigma * secant_difference (u, u0);
        const double drift = y0 + 1.0 / c0;
        // ln|cos g / (1 + sin g)| = -sigma asinh(tan g) and tan g / cos g = sigma u sqrt(1 + u^2).
        const double x = -0.5 * sigma * asinh_difference (u, u0) + 0.5 * sigma * tan_secant_difference (u, u0) + drift * t + x0;
        return {x, y, gamma};
    }

    GeodesicTrajectory closed_form_trajectory_historical (const ExtendedState& s0, double t_final, std::size_t n_intervals)
    {
        require_positive_time (t_final);
        if (n_intervals == 0)
        {
            throw Error (ErrorCode::InvalidParameter, "closed-form trajectory needs at least one interval");
        }
        const ProblemDefinition p = make_historical ();
        GeodesicTrajectory traj;
        traj.adjoint = make_adjoint (p, s0);
        traj.method = FlowMethod::ClosedForm;
        traj.samples.reserve (n_intervals + 1);
        for (std::size_t i = 0; i <= n_intervals; ++i)
        {
            const double t = t_final * static_cast<double> (i) / static_cast<double> (n_intervals);
            traj.samples.push_back ({t, i == 0 ? s0 : integrate_closed_form_historical (s0, t)});
        }
        traj.residuals = first_integral_residuals (p, traj);
        return traj;
    }

    namespace
    {
        // |sum of terms|, relative once the terms exceed unit size.
        double defect (std::initializer_list<double> terms)
        {
            double sum = 0.0;
            double scale = 1.0;
            for (double v : terms)
            {
                sum += v;
                scale = std::max (scale, std::abs (v));
            }
            return std::abs (sum) / scale;
        }
    } // namespace

    std::vector<ResidualTriple> first_integral_residuals (const ProblemDefinition& p, const GeodesicTrajectory& trajectory)
    {
        std::vector<ResidualTriple> out;
        if (trajectory.samples.empty ())
        {
            return out;
        }
        out.reserve (trajectory.samples.size ());
        const AdjointInit& adj = trajectory.adjoint;
        const ExtendedState& s0 = trajectory.samples.front ().state;
        const bool historical = p.chart () == Chart::HistoricalCartesian;
        std::optional<double> c_zero;
        if (historical && std::abs (std::cos (s0.heading)) > kMaskFloor)
        {
            c_zero = s0.c2 + 1.0 / std::cos (s0.heading);
        }
        for (const TrajectorySample& sample : trajectory.samples)
        {
            const CanonicalState c = p.to_canonical (sample.state);
            const Profile f = p.profile (c.r);
            const double ca = std::cos (c.alpha);
            const double sa = std::sin (c.alpha);
            const double lambda = -adj.p_zero - adj.p_theta * f.mu;
            const double p_r = lambda * ca;

            ResidualTriple res;
            res.hamiltonian = defect ({p_r * ca, adj.p_theta * f.mu, adj.p_theta * sa / f.m, adj.p_zero});
            if (std::abs (sa) > kMaskFloor)
            {
                res.clairaut = defect ({adj.p_theta * f.mu, adj.p_theta / (f.m * sa), adj.p_zero});
            }
            if (c_zero)
            {
                const double cg = std::cos (sample.state.heading);
                if (std::abs (cg) > kMaskFloor)
                {
                    res.first_integral = defect ({sample.state.c2, 1.0 / cg, -*c_zero});
                }
            }
            out.push_back (res);
        }
        return out;
    }

    namespace
    {
        FlowSamples numeric_at_times (const ProblemDefinition& p, const ExtendedState& s0, std::span<const double> times,
                                      const StepControl& control)
        {
            FlowSamples out;
            out.states.reserve (times.size ());
            NumericFlow flow (p, s0, control);
            for (double t : times)
            {
                require_positive_time (t);
                out.status = flow.advance_to (t, [] (double, const ExtendedState&) {});
                if (out.status != FlowStatus::Completed)
                {
                    return out;
                }
                out.states.push_back (flow.state ());
            }
            return out;
        }

        ExtendedState endpoint_or_throw (const FlowSamples& r)
        {
            switch (r.status)
            {
            case FlowStatus::Completed:
                return r.states.front ();
            case FlowStatus::DomainExit:
                throw Error (ErrorCode::DomainExit, "geodesic left the domain before the requested time");
            case FlowStatus::StepCollapse:
                break;
            }
            throw Error (ErrorCode::StepCollapse, "step size underflow while integrating the geodesic");
        }
    } // namespace

    FlowSamples flow_at_times (const ProblemDefinition& p, const ExtendedState& s0, std::span<const double> times,
                               const StepControl& control)
    {
        if (p.family () == Family::Historical)
        {
            FlowSamples out;
            out.states.reserve (times.size ());
            for (double t : times)
            {
                require_positive_time (t);
                out.states.push_back (integrate_closed_form_historical (s0, t));
            }
            return out;
        }
        return numeric_at_times (p, s0, times, control);
    }

    ExtendedState flow_state (const ProblemDefinition& p, const ExtendedState& s0, double t, const StepControl& control)
    {
        const double times[] = {t};
        return endpoint_or_throw (flow_at_times (p, s0, times, control));
    }

    ExtendedState flow_state_numeric (const ProblemDefinition& p, const ExtendedState& s0, double t, const StepControl& control)
    {
        const double times[] = {t};
        return endpoint_or_throw (numeric_at_times (p, s0, times, control));
    }

    Position exponential_map (const ProblemDefinition& p, Position q0, double heading0, double t, const StepControl& control)
    {
        return flow_state (p, ExtendedState (q0, heading0), t, control).position ();
    }

} // namespace zermelo
