#include "zermelo/problem.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace zermelo
{
    namespace
    {
        constexpr double kInf = std::numeric_limits<double>::infinity ();

        void require_finite (double v, const char* name)
        {
            if (!std::isfinite (v))
            {
                throw Error (ErrorCode::InvalidParameter, std::string ("parameter ") + name + " must be finite");
            }
        }
    } // namespace

    double normalize_angle (double angle) noexcept
    {
        double a = std::remainder (angle, 2.0 * std::numbers::pi);
        if (a <= -std::numbers::pi)
        {
            a += 2.0 * std::numbers::pi;
        }
        return a;
    }

    std::string_view to_string (Family family) noexcept
    {
        switch (family)
        {
        case Family::Historical:
            return "historical";
        case Family::Vortex:
            return "vortex";
        case Family::PowerLaw:
            return "powerlaw";
        }
        return "unknown";
    }

    ProblemDefinition ProblemDefinition::historical ()
    {
        return {Family::Historical, Chart::HistoricalCartesian, {-kInf, kInf}, 1.0, 1.0, 0.0};
    }

    ProblemDefinition ProblemDefinition::vortex (double k)
    {
        if (!(k > 0.0) || !std::isfinite (k))
        {
            throw Error (ErrorCode::InvalidParameter, "vortex circulation k must be positive");
        }
        return {Family::Vortex, Chart::PolarLike, {0.0, kInf}, k, -2.0, 1.0};
    }

    ProblemDefinition ProblemDefinition::power_law (double k, double a, double b)
    {
        require_finite (k, "k");
        require_finite (a, "a");
        require_finite (b, "b");
        return {Family::PowerLaw, Chart::PolarLike, {0.0, kInf}, k, a, b};
    }

    Profile ProblemDefinition::profile (double r) const
    {
        if (!in_domain (r))
        {
            std::ostringstream msg;
            msg << "r = " << r << " outside the domain of the " << to_string (family_) << " problem";
            throw Error (ErrorCode::DomainError, msg.str ());
        }
        switch (family_)
        {
        case Family::Historical:
            return {1.0, 0.0, r, 1.0};
        case Family::Vortex:
            return {r, 1.0, k_ / (r * r), -2.0 * k_ / (r * r * r)};
        case Family::PowerLaw:
            break;
        }
        const double m = std::pow (r, b_);
        const double mu = k_ * std::pow (r, a_);
        return {m, b_ * m / r, mu, a_ * mu / r};
    }

    CanonicalState ProblemDefinition::to_canonical (const ExtendedState& s) const noexcept
    {
        if (chart_ == Chart::HistoricalCartesian)
        {
            return {s.c2, s.c1, heading_to_alpha (s.heading)};
        }
        return {s.c1, s.c2, s.heading};
    }

    ExtendedState ProblemDefinition::from_canonical (const CanonicalState& c) const noexcept
    {
        if (chart_ == Chart::HistoricalCartesian)
        {
            return {c.theta, c.r, alpha_to_heading (c.alpha)};
        }
        return {c.r, c.theta, c.alpha};
    }

    double ProblemDefinition::heading_to_alpha (double heading) const noexcept
    {
        return chart_ == Chart::HistoricalCartesian ? std::numbers::pi / 2.0 - heading : heading;
    }

    double ProblemDefinition::alpha_to_heading (double alpha) const noexcept
    {
        return normalize_angle (chart_ == Chart::HistoricalCartesian ? std::numbers::pi / 2.0 - alpha : alpha);
    }

    double current_norm (const ProblemDefinition& p, double r)
    {
        const Profile f = p.profile (r);
        return std::abs (f.mu) * f.m;
    }

    std::vector<double> strong_current_boundary (const ProblemDefinition& p)
    {
        switch (p.family ())
        {
        case Family::Historical:
            return {-1.0, 1.0};
        case Family::Vortex:
            return {p.k ()};
        case Family::PowerLaw:
            break;
        }
        const double e = p.a () + p.b ();
        if (e == 0.0 || p.k () == 0.0)
        {
            return {};
        }
        return {std::pow (std::abs (p.k ()), -1.0 / e)};
    }

    Position chart_difference (const ProblemDefinition& p, Position a, Position b) noexcept
    {
        Position d{a.c1 - b.c1, a.c2 - b.c2};
        if (p.chart () == Chart::PolarLike)
        {
            d.c2 = normalize_angle (d.c2);
        }
        return d;
    }

    double chart_distance (const ProblemDefinition& p, Position a, Position b) noexcept
    {
        const Position d = chart_difference (p, a, b);
        return std::hypot (d.c1, d.c2);
    }

} // namespace zermelo
