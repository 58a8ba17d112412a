#pragma once
/**
 * @file   cusp.hpp
 * @brief  Cusp points of abnormal geodesics.
 *
 * Along an abnormal geodesic the position velocity can vanish while the
 * heading keeps turning, producing a semicubical cusp in the image. The cusp
 * sits on the strong/weak boundary (current norm one). In the historical
 * problem it occurs at t = tan(gamma0) with y = sign(y0) and gamma = 0 mod pi.
 */

#include <optional>
#include <string_view>

#include "zermelo/flow.hpp"

namespace zermelo
{
    enum class CuspSource
    {
        Analytic,
        NumericRootFind,
    };

    [[nodiscard]] std::string_view to_string (CuspSource source) noexcept;

    struct CuspPoint
    {
        double t_cusp;
        Position position;
        double heading;
        CuspSource source;
    };

    /// Forward cusp of a historical abnormal geodesic, or nullopt when tan(gamma0) <= 0.
    /// Throws ErrorCode::NotAbnormal if @p s0 is not on an abnormal geodesic.
    [[nodiscard]] std::optional<CuspPoint> cusp_historical (const ExtendedState& s0);

    struct CuspSearch
    {
        StepControl control{1e-12, 1e-12};
        /// Sampling step of the scan for speed minima.
        double scan_step = 0.01;
        double speed_threshold = 1e-8;
        /// Bisection stops once the bracket is this narrow.
        double time_resolution = 1e-12;
    };

    /**
     * First forward cusp with t <= @p t_max of the abnormal geodesic through
     * @p s0, found as a zero of the position speed. Minima of the speed are
     * bracketed by sign changes of d(speed^2)/dt and refined by bisection.
     * Throws ErrorCode::NotAbnormal, or ErrorCode::DomainExit when the
     * geodesic leaves the domain before t_max without a cusp.
     */
    [[nodiscard]] std::optional<CuspPoint> cusp_numeric (const ProblemDefinition& p, const ExtendedState& s0, double t_max,
                                                         const CuspSearch& search = {});

    /// d(speed^2)/dt along the flow, evaluated analytically.
    [[nodiscard]] double speed_squared_rate (const ProblemDefinition& p, const ExtendedState& s);

} // namespace zermelo
