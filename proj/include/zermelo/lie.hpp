#pragma once
/**
 * @file   lie.hpp
 * @brief  Goh-extension brackets and extremal classification.
 *
 * The heading alpha is promoted to a state, giving the single-input system
 * q' = X(q, alpha) + v Y with Y = d/dalpha. Along the extension the three
 * determinants
 *
 *   D   = det(Y, [Y,X], [[Y,X],Y])  = 1/m(r)
 *   D'  = det(Y, [Y,X], [[Y,X],X])  = -mu'(r) sin^2 alpha + m'(r) sin alpha / m(r)^2
 *   D'' = det(Y, [Y,X], X)          = mu(r) sin alpha + 1/m(r)
 *
 * decide the type of the geodesic through a state: hyperbolic (time
 * minimizing) when D D'' > 0, elliptic (time maximizing) when D D'' < 0 and
 * abnormal on D'' = 0. The singular feedback v = -D'/D is the heading rate.
 *
 * Values are reported in the problem's chart. The historical heading
 * gamma = pi/2 - alpha reverses Y, which flips the sign of D' and of v but
 * leaves D and D'' unchanged.
 */

#include <string_view>
#include <vector>

#include "zermelo/problem.hpp"

namespace zermelo
{
    struct BracketData
    {
        double d;
        double d_prime;
        double d_second;
        ExtendedState at;
    };

    enum class ExtremalKind
    {
        Hyperbolic,
        Elliptic,
        Abnormal,
    };

    [[nodiscard]] std::string_view to_string (ExtremalKind kind) noexcept;

    struct ExtremalClass
    {
        ExtremalKind kind;
        BracketData data;
    };

    inline constexpr double kClassifyTolerance = 1e-9;

    [[nodiscard]] BracketData bracket_data (const ProblemDefinition& p, const ExtendedState& s);

    /// Abnormal when |D''| <= tol (1 + |mu| m), otherwise by the sign of D D''.
    [[nodiscard]] ExtremalClass classify (const ProblemDefinition& p, const ExtendedState& s, double tol = kClassifyTolerance);

    /**
     * Headings (chart convention, ascending) of the abnormal geodesics through
     * any point at radius @p r: solutions of sin alpha = -1 / (mu m). Empty in
     * weak current, a single tangent heading when the current norm is one
     * within @p tol (relative), two headings in strong current.
     */
    [[nodiscard]] std::vector<double> abnormal_headings (const ProblemDefinition& p, double r, double tol = kClassifyTolerance);

    /// v = -D'/D in the chart convention; equals the heading rate of the flow.
    [[nodiscard]] double singular_feedback (const ProblemDefinition& p, const ExtendedState& s);

} // namespace zermelo
