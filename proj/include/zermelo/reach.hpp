#pragma once
/**
 * @file   reach.hpp
 * @brief  Wavefronts, time-minimal spheres and balls, and the value function.
 *
 * Fixing q0, the exponential map sends an initial heading to the endpoint at
 * time t of its geodesic; its image is the wavefront. The minimal time T(q1)
 * is sampled by shooting: every geodesic is tabulated on a (heading, time)
 * grid, grid cells whose image covers the target seed a damped Newton
 * solve on the endpoint map, and the smallest converged time wins.
 *
 * In strong current the small-time ball is a fan bounded by the two abnormal
 * geodesics and the hyperbolic part of the wavefront; the elliptic part lies
 * inside the ball. Crossing the abnormal arc before its cusp makes T jump.
 */

#include <cstddef>
#include <optional>
#include <vector>

#include "zermelo/cusp.hpp"
#include "zermelo/flow.hpp"
#include "zermelo/lie.hpp"

namespace zermelo
{
    /**
     * @p n headings evenly spaced over (-pi, pi], ascending. Each abnormal
     * heading at q0 replaces the closest grid heading, so the abnormal
     * geodesics are always part of the sample.
     */
    [[nodiscard]] std::vector<double> heading_grid (const ProblemDefinition& p, Position q0, std::size_t n);

    struct WavefrontPoint
    {
        double heading0;
        Position position;
        ExtremalKind kind;
        /// False when the geodesic left the domain before time t.
        bool valid = true;
    };

    struct Wavefront
    {
        double t;
        Position q0;
        std::vector<WavefrontPoint> points;
    };

    [[nodiscard]] Wavefront wavefront (const ProblemDefinition& p, Position q0, double t, std::size_t n_alpha,
                                       const StepControl& control = {});

    /// Winding number of the closed polygon through the valid front points around @p q.
    [[nodiscard]] int winding_number (const Wavefront& front, Position q);

    struct ShootingConfig
    {
        std::size_t n_headings = 720;
        double t_max = 5.0;
        double time_step = 0.01;
        double position_tol = 1e-8;
        /// Wavefront points with T >= t - sphere_time_tol belong to the sphere.
        double sphere_time_tol = 1e-6;
        std::size_t max_newton = 100;
        StepControl control{1e-12, 1e-12};
    };

    enum class ArrivalKind
    {
        Interior,
        ViaAbnormal,
    };

    struct ValueSample
    {
        Position target;
        /// Minimal time; nullopt when no geodesic reaches the target before t_max.
        std::optional<double> t_min;
        double heading0_star = 0.0;
        ArrivalKind flag = ArrivalKind::Interior;

        [[nodiscard]] bool reachable () const noexcept { return t_min.has_value (); }
    };

    /// Endpoints of the geodesics from q0 on a (heading, time) grid, reusable across targets.
    class ShootingTable
    {
      public:
        ShootingTable (const ProblemDefinition& p, Position q0, const ShootingConfig& config = {});

        [[nodiscard]] ValueSample value (Position target) const;

        [[nodiscard]] const ProblemDefinition& problem () const noexcept { return p_; }
        [[nodiscard]] Position origin () const noexcept { return q0_; }
        [[nodiscard]] const ShootingConfig& config () const noexcept { return config_; }
        [[nodiscard]] const std::vector<double>& headings () const noexcept { return headings_; }
        [[nodiscard]] const std::vector<double>& times () const noexcept { return times_; }

        struct Solution
        {
            double heading;
            double t;
            double residual;
        };

        /// Damped Newton solve of exp(heading, t) = target from an initial guess.
        [[nodiscard]] std::optional<Solution> refine (Position target, double heading, double t) const;

      private:
        struct Node
        {
            Position position;
            bool valid;
        };

        [[nodiscard]] const Node& node (std::size_t i, std::size_t j) const { return nodes_[i * times_.size () + j]; }
        [[nodiscard]] std::optional<Position> endpoint (double heading, double t) const;

        ProblemDefinition p_;
        Position q0_;
        ShootingConfig config_;
        std::vector<double> headings_;
        std::vector<double> abnormal_;
        std::vector<double> times_;
        std::vector<Node> nodes_;
    };

    [[nodiscard]] ValueSample value_function (const ProblemDefinition& p, Position q0, Position target,
                                              const ShootingConfig& config = {});

    struct AbnormalArc
    {
        double heading0;
        std::vector<TrajectorySample> samples;
        std::optional<CuspPoint> cusp;
        bool truncated_at_cusp = false;
    };

    /// Abnormal geodesic from q0 sampled over [0, t_end] (or up to its domain exit).
    [[nodiscard]] AbnormalArc abnormal_arc (const ProblemDefinition& p, Position q0, double heading0, double t_end,
                                            std::size_t n_samples = 200, const StepControl& control = {});

    /// Forward cusp of the abnormal geodesic from (q0, heading0) within t_max, if any.
    [[nodiscard]] std::optional<CuspPoint> forward_cusp (const ProblemDefinition& p, Position q0, double heading0, double t_max);

    struct SphereAndBall
    {
        Wavefront front;
        std::vector<ValueSample> values;
        /// Hyperbolic points with T >= t - sphere_time_tol.
        std::vector<bool> is_sphere;
        /// Remaining ball boundary in strong current.
        std::vector<AbnormalArc> arcs;
    };

    [[nodiscard]] SphereAndBall sphere_and_ball (const ProblemDefinition& p, Position q0, double t, std::size_t n_alpha,
                                                 const ShootingConfig& config = {});

    struct SelfIntersection
    {
        double t1;
        double t2;
        Position position;
    };

    /// Transversal self-crossings of the sampled polyline, t1 < t2.
    [[nodiscard]] std::vector<SelfIntersection> self_intersections (const GeodesicTrajectory& trajectory);

    /// Same, with each crossing refined by bisection of the segment pair on the flow.
    [[nodiscard]] std::vector<SelfIntersection> self_intersections (const ProblemDefinition& p, const GeodesicTrajectory& trajectory,
                                                                    const StepControl& control = {1e-12, 1e-12});

    struct ScanSample
    {
        double s;
        ValueSample value;
    };

    struct Jump
    {
        std::size_t index;
        double s_left;
        double s_right;
        /// Value at the last sample before the jump.
        std::optional<double> left_limit;
        std::optional<double> right_value;
    };

    struct DiscontinuityScan
    {
        std::vector<ScanSample> samples;
        std::vector<Jump> jumps;
        double threshold = 0.0;
    };

    /**
     * Samples T at @p n_samples evenly spaced points of the segment [a, b]
     * (s in [0, 1]). Adjacent differences above ten times their median, and
     * reachable/unreachable transitions, are reported as jumps.
     */
    [[nodiscard]] DiscontinuityScan discontinuity_scan (const ShootingTable& table, Position a, Position b,
                                                        std::size_t n_samples);
    [[nodiscard]] DiscontinuityScan discontinuity_scan (const ProblemDefinition& p, Position q0, Position a, Position b,
                                                        std::size_t n_samples, const ShootingConfig& config = {});

    struct SeparatingCandidate
    {
        Position position;
        double t;
        double heading_a;
        double heading_b;
        std::optional<double> value;
        bool confirmed = false;
    };

    struct CutLocusEstimate
    {
        /// Time radius of the adapted neighborhood.
        double horizon;
        std::vector<AbnormalArc> arcs;
        std::vector<SeparatingCandidate> separating;
    };

    /**
     * The two abnormal arcs from a strong-current q0, the one with a forward
     * cusp truncated there, over an adapted neighborhood of time radius
     * min(t_max, 1.5 t_cusp). Equal-time crossings of the fronts are reported
     * as separating-line candidates, confirmed when T matches the front time.
     * Throws ErrorCode::Unsupported for weak-current q0.
     */
    [[nodiscard]] CutLocusEstimate cut_locus_estimate (const ProblemDefinition& p, Position q0, double t_max, std::size_t n_alpha,
                                                       const ShootingConfig& config = {}, std::size_t n_fronts = 12);

    /// First time in (0, t_max] on a @p dt grid where the wavefront winds around q0.
    [[nodiscard]] std::optional<double> loop_time_estimate (const ProblemDefinition& p, Position q0, double t_max,
                                                            std::size_t n_alpha, double dt);

} // namespace zermelo
