#pragma once

#include <array>
#include <cstddef>
#include <optional>

#include "peakgate/systems.hpp"

namespace peakgate::running_example {

using Vec2 = std::array<double, 2>;

/// Squared-norm contraction boundary: sqrt(63) + 1.
double rho_bar();
/// e^{-1}-contraction boundary: sqrt(64/e - 1) + 1.
double rho_under();

/// H(x) = (1/8) [[s-1, -1], [1, s-1]] x with s = ||x||^2 computed once.
Vec2 map_H(const Vec2& x);

/// f(s) = s (1 + (s-1)^2) / 64; satisfies ||H(x)||^2 = f(||x||^2).
double f_of(double s);
/// g(s) = f(s)/s for s > 0 and 1/32 at s = 0.
double g_of(double s);

/// V(x) = max{ ||x||^2, e ||H(x)||^2 }.
double lyapunov_V(const Vec2& x);

/// Closed-form ratio N_H^r(V) on the ball of squared radius r, valid for
/// r in (0, rho_bar). Branch knots are decided with a 1e-12 tolerance,
/// left-inclusive as in the interval notation (0,2], (2, rho_under].
double ratio_closed_form(double r);

/// min k <= cap with the given coordinate (1 or 2) of H^k(x) strictly
/// positive, or nullopt if not found within cap.
std::optional<std::size_t> first_positive_rank(const Vec2& x, int coordinate,
                                               std::size_t cap);

/// The map H as a DiscreteSystem (dimension 2, builtin kind).
DiscreteSystem builtin_system();

/// V as a callable on state spans, for certificate plumbing.
double lyapunov_V_span(std::span<const double> x);

struct Scenario {
    char name = '?';
    InitialSet points;
    double radius_sq = 0.0;    // smallest r with points inside ball(sqrt(r))
    double sup_norm_sq = 0.0;  // max ||x||^2 over the points
    double sup_V = 0.0;        // max V over the points
};

/// The four named initial sets; derived fields are computed, not stored.
const Scenario& scenario(char name);

}  // namespace peakgate::running_example
