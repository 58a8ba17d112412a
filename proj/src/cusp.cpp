#include "zermelo/cusp.hpp"

#include <cmath>
#include <vector>

#include "zermelo/lie.hpp"

namespace zermelo
{
    namespace
    {
        void require_abnormal (const ProblemDefinition& p, const ExtendedState& s0)
        {
            if (classify (p, s0).kind != ExtremalKind::Abnormal)
            {
                throw Error (ErrorCode::NotAbnormal, "initial state is not on an abnormal geodesic");
            }
        }
    } // namespace

    std::string_view to_string (CuspSource source) noexcept
    {
        return source == CuspSource::Analytic ? "analytic" : "numeric";
    }

    std::optional<CuspPoint> cusp_historical (const ExtendedState& s0)
    {
        const ProblemDefinition p = make_historical ();
        require_abnormal (p, s0);
        const double t_cusp = std::tan (s0.heading);
        if (!(t_cusp > 0.0))
        {
            return std::nullopt;
        }
        const ExtendedState at = integrate_closed_form_historical (s0, t_cusp);
        // gamma_cusp = 0 mod pi exactly; keep the branch representative.
        const double heading = std::cos (s0.heading) > 0.0 ? 0.0 : std::numbers::pi;
        return CuspPoint{t_cusp, {at.c1, s0.c2 > 0.0 ? 1.0 : -1.0}, heading, CuspSource::Analytic};
    }

    double speed_squared_rate (const ProblemDefinition& p, const ExtendedState& s)
    {
        const CanonicalState c = p.to_canonical (s);
        const Profile f = p.profile (c.r);
        const double ca = std::cos (c.alpha);
        const double sa = std::sin (c.alpha);
        const double r_dot = ca;
        const double alpha_dot = f.dmu * f.m * sa * sa - f.dm * sa / f.m;
        // speed^2 = cos^2 a + (m mu + sin a)^2
        const double angular = f.m * f.mu + sa;
        return -2.0 * ca * sa * alpha_dot + 2.0 * angular * ((f.dm * f.mu + f.m * f.dmu) * r_dot + ca * alpha_dot);
    }

    std::optional<CuspPoint> cusp_numeric (const ProblemDefinition& p, const ExtendedState& s0, double t_max,
                                           const CuspSearch& search)
    {
        require_abnormal (p, s0);
        if (!(t_max > 0.0))
        {
            throw Error (ErrorCode::InvalidParameter, "t_max must be positive");
        }
        StepControl control = search.control;
        control.max_step = std::min (control.max_step, search.scan_step);
        const GeodesicTrajectory traj = integrate_numeric (p, s0, t_max, control);

        const auto rate = [&] (const ExtendedState& s) { return speed_squared_rate (p, s); };
        for (std::size_t i = 0; i + 1 < traj.samples.size (); ++i)
        {
            const TrajectorySample& left = traj.samples[i];
            const TrajectorySample& right = traj.samples[i + 1];
            if (!(rate (left.state) < 0.0 && rate (right.state) >= 0.0))
            {
                continue;
            }
            // Bisection on the sign of d(speed^2)/dt, re-integrating from the left sample.
            double lo = 0.0;
            double hi = right.t - left.t;
            ExtendedState at = right.state;
            while (hi - lo > search.time_resolution)
            {
                const double mid = 0.5 * (lo + hi);
                const ExtendedState s = mid > 0.0 ? flow_state_numeric (p, left.state, mid, search.control) : left.state;
                if (rate (s) < 0.0)
                {
                    lo = mid;
                }
                else
                {
                    hi = mid;
                    at = s;
                }
            }
            if (position_speed (p, at) <= search.speed_threshold)
            {
                return CuspPoint{left.t + hi, at.position (), at.heading, CuspSource::NumericRootFind};
            }
        }
        if (traj.status == FlowStatus::DomainExit)
        {
            throw Error (ErrorCode::DomainExit, "abnormal geodesic left the domain before a cusp was found");
        }
        if (traj.status == FlowStatus::StepCollapse)
        {
            throw Error (ErrorCode::StepCollapse, "step size underflow along the abnormal geodesic");
        }
        return std::nullopt;
    }

} // namespace zermelo
