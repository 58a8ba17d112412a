#include "zermelo/lie.hpp"

#include <algorithm>
#include <cmath>

namespace zermelo
{
    std::string_view to_string (ExtremalKind kind) noexcept
    {
        switch (kind)
        {
        case ExtremalKind::Hyperbolic:
            return "hyperbolic";
        case ExtremalKind::Elliptic:
            return "elliptic";
        case ExtremalKind::Abnormal:
            return "abnormal";
        }
        return "unknown";
    }

    BracketData bracket_data (const ProblemDefinition& p, const ExtendedState& s)
    {
        const CanonicalState c = p.to_canonical (s);
        const Profile f = p.profile (c.r);
        const double sa = std::sin (c.alpha);
        const double d = 1.0 / f.m;
        const double d_prime = -f.dmu * sa * sa + f.dm * sa / (f.m * f.m);
        const double d_second = f.mu * sa + 1.0 / f.m;
        return {d, p.heading_sign () * d_prime, d_second, s};
    }

    ExtremalClass classify (const ProblemDefinition& p, const ExtendedState& s, double tol)
    {
        if (!(tol > 0.0))
        {
            throw Error (ErrorCode::InvalidParameter, "classification tolerance must be positive");
        }
        const BracketData data = bracket_data (p, s);
        const double scale = 1.0 + current_norm (p, p.radial (s.position ()));
        if (std::abs (data.d_second) <= tol * scale)
        {
            return {ExtremalKind::Abnormal, data};
        }
        return {data.d * data.d_second > 0.0 ? ExtremalKind::Hyperbolic : ExtremalKind::Elliptic, data};
    }

    std::vector<double> abnormal_headings (const ProblemDefinition& p, double r, double tol)
    {
        const Profile f = p.profile (r);
        const double norm = std::abs (f.mu) * f.m;
        if (norm < 1.0 - tol)
        {
            return {};
        }
        if (norm <= 1.0 + tol)
        {
            // Tangent case: sin alpha = -sign(mu).
            const double alpha = f.mu > 0.0 ? -std::numbers::pi / 2.0 : std::numbers::pi / 2.0;
            return {p.alpha_to_heading (alpha)};
        }
        const double alpha = std::asin (-1.0 / (f.mu * f.m));
        std::vector<double> out{p.alpha_to_heading (alpha), p.alpha_to_heading (std::numbers::pi - alpha)};
        std::sort (out.begin (), out.end ());
        return out;
    }

    double singular_feedback (const ProblemDefinition& p, const ExtendedState& s)
    {
        const BracketData data = bracket_data (p, s);
        return -data.d_prime / data.d;
    }

} // namespace zermelo
