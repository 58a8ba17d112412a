#pragma once
/**
 * @file   flow.hpp
 * @brief  Extended geodesic flow, its first integrals and the exponential map.
 *
 * Every geodesic is a solution of the three-dimensional system
 *
 *   r'     = cos alpha
 *   theta' = mu(r) + sin alpha / m(r)
 *   alpha' = mu'(r) m(r) sin^2 alpha - m'(r) sin alpha / m(r)
 *
 * so the initial heading alone parameterizes the geodesics issued from a
 * point. The adjoint is not integrated: with the normalization lambda(0) = 1
 * one has p_theta = m(r0) sin alpha0 (conserved), p0 = -1 - p_theta mu(r0),
 * and (p_r, p_theta / m) = lambda (cos alpha, sin alpha) along the flow.
 *
 * The historical problem (m = 1, mu = y) also has an exact solution, used
 * both as a fast path and as an oracle for the integrator.
 */

#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "zermelo/problem.hpp"

namespace zermelo
{
    /// Adaptive integration settings (Dormand-Prince 5(4)).
    struct StepControl
    {
        double abs_tol = 1e-10;
        double rel_tol = 1e-10;
        double initial_step = 1e-3;
        double max_step = std::numeric_limits<double>::infinity ();
        double min_step = 1e-13;
        std::size_t max_steps = 5'000'000;
        /// Integration stops with DomainExit once r is this close to a finite domain bound.
        double boundary_margin = 1e-6;
    };

    enum class FlowMethod
    {
        ClosedForm,
        NumericRK,
    };

    enum class FlowStatus
    {
        Completed,
        DomainExit,
        StepCollapse,
    };

    struct AdjointInit
    {
        double p_theta;
        double p_zero;
        double lambda0 = 1.0;
    };

    [[nodiscard]] AdjointInit make_adjoint (const ProblemDefinition& p, const ExtendedState& s0);

    struct TrajectorySample
    {
        double t;
        ExtendedState state;
    };

    /**
     * Defects of the conserved quantities at one sample. Each is the absolute
     * value of a sum of terms, divided by the largest term magnitude when that
     * exceeds 1 (near the vortex centre mu grows like 1/r^2).
     *  - hamiltonian: |p_r cos a + p_theta (mu + sin a / m) + p0| with
     *    lambda = -p0 - p_theta mu(r) and p_r = lambda cos a;
     *  - clairaut: |p_theta (mu + 1/(m sin a)) + p0|, masked where |sin a| <= 1e-6;
     *  - first_integral: historical only, |y + 1/cos g - (y0 + 1/cos g0)|,
     *    masked where |cos g| or |cos g0| <= 1e-6.
     */
    struct ResidualTriple
    {
        double hamiltonian = 0.0;
        std::optional<double> clairaut;
        std::optional<double> first_integral;
    };

    struct GeodesicTrajectory
    {
        std::vector<TrajectorySample> samples;
        AdjointInit adjoint{};
        FlowMethod method = FlowMethod::NumericRK;
        FlowStatus status = FlowStatus::Completed;
        std::vector<ResidualTriple> residuals;

        [[nodiscard]] const TrajectorySample& front () const { return samples.front (); }
        [[nodiscard]] const TrajectorySample& back () const { return samples.back (); }
    };

    /// Time derivative of a chart state.
    struct ExtendedRate
    {
        double dc1;
        double dc2;
        double dheading;
    };

    [[nodiscard]] ExtendedRate extended_rhs (const ProblemDefinition& p, const ExtendedState& s);

    /// Riemannian speed of the position, sqrt(r'^2 + (m theta')^2).
    [[nodiscard]] double position_speed (const ProblemDefinition& p, const ExtendedState& s);

    /**
     * Adaptive integration up to @p t_final. One sample per accepted step,
     * residuals filled. A trajectory leaving the domain or whose step size
     * underflows is returned truncated with the matching status.
     */
    [[nodiscard]] GeodesicTrajectory integrate_numeric (const ProblemDefinition& p, const ExtendedState& s0, double t_final,
                                                        const StepControl& control = {});

    /// Exact historical flow; @p s0 and the result use (x, y, gamma).
    [[nodiscard]] ExtendedState integrate_closed_form_historical (const ExtendedState& s0, double t);

    /// Exact historical trajectory sampled at @p n_intervals + 1 uniform times.
    [[nodiscard]] GeodesicTrajectory closed_form_trajectory_historical (const ExtendedState& s0, double t_final,
                                                                        std::size_t n_intervals);

    [[nodiscard]] std::vector<ResidualTriple> first_integral_residuals (const ProblemDefinition& p,
                                                                        const GeodesicTrajectory& trajectory);

    struct FlowSamples
    {
        std::vector<ExtendedState> states;
        FlowStatus status = FlowStatus::Completed;
    };

    /**
     * States at increasing nonnegative @p times. Closed form for the historical
     * problem, numeric otherwise. On failure the states reached so far are
     * returned with the failing status.
     */
    [[nodiscard]] FlowSamples flow_at_times (const ProblemDefinition& p, const ExtendedState& s0, std::span<const double> times,
                                             const StepControl& control = {});

    /// Flow endpoint; throws ErrorCode::DomainExit or ErrorCode::StepCollapse.
    [[nodiscard]] ExtendedState flow_state (const ProblemDefinition& p, const ExtendedState& s0, double t,
                                            const StepControl& control = {});

    /// Numeric flow endpoint regardless of the problem family.
    [[nodiscard]] ExtendedState flow_state_numeric (const ProblemDefinition& p, const ExtendedState& s0, double t,
                                                    const StepControl& control = {});

    /// Position reached at time @p t by the geodesic leaving @p q0 with chart heading @p heading0.
    [[nodiscard]] Position exponential_map (const ProblemDefinition& p, Position q0, double heading0, double t,
                                            const StepControl& control = {});

} // namespace zermelo
