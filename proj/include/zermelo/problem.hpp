#pragma once
/**
 * @file   problem.hpp
 * @brief  Rotationally symmetric Zermelo navigation problems.
 *
 * A problem is fixed by two radial profiles: the metric factor m(r) of
 * g = dr^2 + m(r)^2 dtheta^2 and the current intensity mu(r) of the drift
 * F0 = mu(r) d/dtheta, which flows along the parallels r = const.
 *
 * States are stored in the problem's own chart. For the polar-like chart a
 * state reads (r, theta, alpha) with alpha the heading measured from d/dr.
 * The historical chart relabels the same quantities as
 * (x, y, gamma) = (theta, r, pi/2 - alpha).
 */

#include <numbers>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace zermelo
{
    enum class ErrorCode
    {
        InvalidParameter,
        DomainError,
        DomainExit,
        StepCollapse,
        NotAbnormal,
        Unsupported,
    };

    /// Exception type for every failure raised by the library.
    class Error : public std::runtime_error
    {
      public:
        Error (ErrorCode code, const std::string& what) : std::runtime_error (what), code_ (code) {}
        [[nodiscard]] ErrorCode code () const noexcept { return code_; }

      private:
        ErrorCode code_;
    };

    /// Representative of @p angle in (-pi, pi].
    [[nodiscard]] double normalize_angle (double angle) noexcept;

    enum class Chart
    {
        PolarLike,
        HistoricalCartesian,
    };

    enum class Family
    {
        Historical,
        Vortex,
        PowerLaw,
    };

    [[nodiscard]] std::string_view to_string (Family family) noexcept;

    /// Open interval (lo, hi); infinite bounds allowed.
    struct Interval
    {
        double lo;
        double hi;
        [[nodiscard]] bool contains (double r) const noexcept { return r > lo && r < hi; }
    };

    /// A point of the plane in chart coordinates.
    struct Position
    {
        double c1 = 0.0;
        double c2 = 0.0;
    };

    /// Point (c1, c2, heading) of the extended state space. The heading is
    /// kept in (-pi, pi].
    struct ExtendedState
    {
        double c1 = 0.0;
        double c2 = 0.0;
        double heading = 0.0;

        ExtendedState () = default;
        ExtendedState (double c1_, double c2_, double heading_) : c1 (c1_), c2 (c2_), heading (normalize_angle (heading_)) {}
        ExtendedState (Position q, double heading_) : ExtendedState (q.c1, q.c2, heading_) {}

        [[nodiscard]] Position position () const noexcept { return {c1, c2}; }
    };

    /// (r, theta, alpha) coordinates shared by every chart. Angles are not
    /// normalized here; integration runs on unwrapped values.
    struct CanonicalState
    {
        double r;
        double theta;
        double alpha;
    };

    /// Profile values at a radius.
    struct Profile
    {
        double m;
        double dm;
        double mu;
        double dmu;
    };

    /**
     * @brief Immutable description of a surface-of-revolution Zermelo problem.
     *
     * Three families are available: the historical problem (m = 1, mu = r),
     * the point vortex (m = r, mu = k / r^2) and the power law
     * (m = r^b, mu = k r^a) which contains the other two up to domain and chart.
     * Derivatives are analytic.
     */
    class ProblemDefinition
    {
      public:
        [[nodiscard]] static ProblemDefinition historical ();
        [[nodiscard]] static ProblemDefinition vortex (double k);
        [[nodiscard]] static ProblemDefinition power_law (double k, double a, double b);

        /// Throws ErrorCode::DomainError when @p r is outside the domain.
        [[nodiscard]] Profile profile (double r) const;
        [[nodiscard]] double m (double r) const { return profile (r).m; }
        [[nodiscard]] double dm (double r) const { return profile (r).dm; }
        [[nodiscard]] double mu (double r) const { return profile (r).mu; }
        [[nodiscard]] double dmu (double r) const { return profile (r).dmu; }

        [[nodiscard]] Family family () const noexcept { return family_; }
        [[nodiscard]] Chart chart () const noexcept { return chart_; }
        [[nodiscard]] Interval domain () const noexcept { return domain_; }
        [[nodiscard]] bool in_domain (double r) const noexcept { return domain_.contains (r); }

        [[nodiscard]] double k () const noexcept { return k_; }
        [[nodiscard]] double a () const noexcept { return a_; }
        [[nodiscard]] double b () const noexcept { return b_; }

        /// Sign relating the chart heading to alpha: d(heading) = sign * d(alpha).
        [[nodiscard]] double heading_sign () const noexcept { return chart_ == Chart::HistoricalCartesian ? -1.0 : 1.0; }

        [[nodiscard]] CanonicalState to_canonical (const ExtendedState& s) const noexcept;
        [[nodiscard]] ExtendedState from_canonical (const CanonicalState& c) const noexcept;
        [[nodiscard]] double heading_to_alpha (double heading) const noexcept;
        [[nodiscard]] double alpha_to_heading (double alpha) const noexcept;

        /// Radial coordinate r of a chart position.
        [[nodiscard]] double radial (Position q) const noexcept { return chart_ == Chart::HistoricalCartesian ? q.c2 : q.c1; }

      private:
        ProblemDefinition (Family family, Chart chart, Interval domain, double k, double a, double b)
            : family_ (family), chart_ (chart), domain_ (domain), k_ (k), a_ (a), b_ (b)
        {
        }

        Family family_;
        Chart chart_;
        Interval domain_;
        double k_;
        double a_;
        double b_;
    };

    [[nodiscard]] inline ProblemDefinition make_historical () { return ProblemDefinition::historical (); }
    [[nodiscard]] inline ProblemDefinition make_vortex (double k) { return ProblemDefinition::vortex (k); }
    [[nodiscard]] inline ProblemDefinition make_power_law (double k, double a, double b) { return ProblemDefinition::power_law (k, a, b); }

    /// g-norm of the current at radius r, |mu(r)| m(r). Strong current when > 1.
    [[nodiscard]] double current_norm (const ProblemDefinition& p, double r);

    /**
     * Radii where the current norm equals one, for drawing the strong/weak
     * boundary. Historical: {-1, 1}; vortex: {k}; power law: {k^(-1/(a+b))}
     * when a + b != 0 and k > 0.
     */
    [[nodiscard]] std::vector<double> strong_current_boundary (const ProblemDefinition& p);

    /// Chart difference a - b with the angular coordinate wrapped for polar charts.
    [[nodiscard]] Position chart_difference (const ProblemDefinition& p, Position a, Position b) noexcept;
    [[nodiscard]] double chart_distance (const ProblemDefinition& p, Position a, Position b) noexcept;

} // namespace zermelo
