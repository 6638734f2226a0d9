#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "peakgate/common.hpp"
#include "peakgate/seq_core.hpp"

namespace peakgate {

/// Class-K function: strictly increasing continuous on [0, domain_sup),
/// zero at zero. The inverse is caller-supplied for closed forms; a
/// bisection fallback exists for monotone forwards without one.
struct ClassKFunction {
    std::function<double(double)> forward;
    std::function<double(double)> inverse;
    double domain_sup = kInfinity;

    static ClassKFunction identity();
    static ClassKFunction scale(double c);           // s -> c*s, c > 0
    static ClassKFunction power(double p);           // s -> s^p, p > 0
    static ClassKFunction sqrt_form();               // s -> sqrt(s)
    /// outer(inner(s)); inverses compose in the reverse order.
    static ClassKFunction compose(const ClassKFunction& outer,
                                  const ClassKFunction& inner);
    /// Derives the inverse by bisection over [0, bracket_sup].
    static ClassKFunction with_bisection_inverse(
        std::function<double(double)> forward, double bracket_sup,
        double tol = 1e-12);

    /// Checks forward(0)=0, strict increase and inverse round-trip on a
    /// sampled grid of [0, grid_sup]. Throws CertificateError on failure.
    void validate(double grid_sup) const;
};

/// Explicit Sontag decomposition gamma(s,t) <= theta1(theta2(s) e^{-t}),
/// specialized to the initial set through psi_sup = sup of psi on X^in.
struct SontagFormKL {
    ClassKFunction theta1;
    ClassKFunction theta2;
    double psi_sup = 0.0;
    double decay = 0.36787944117144233;  // e^{-1} unless a sharper rate is known
};

/// Closed Euclidean ball {x : ||x||^2 <= radius_sq} around the origin.
struct StableDomain {
    double radius_sq = 0.0;
    bool contains(std::span<const double> x, double tol = kDefaultTol) const;
};

/// Lyapunov data (V, domain, class-K lower bound, contraction ratio)
/// sufficient for both the direct and the continuous pair constructions.
struct LyapunovCertificate {
    std::function<double(std::span<const double>)> V;
    StableDomain domain;
    ClassKFunction alpha_lower;   // alpha_V with alpha_V(||x||) <= V(x)
    double ratio = 0.0;           // N_T^D(V), in (0,1)
    double sup_on_init = 0.0;     // sup of V over X^in
};

/// h(y) = theta1(theta2(psi_sup * y)), beta = decay. h(0) = 0.
CertificatePair build_pair_from_kl(const SontagFormKL& kl);

/// h(s) = s * sup_on_init, beta = ratio. Requires phi <= V on the domain.
CertificatePair build_pair_direct_lyap(const LyapunovCertificate& cert);

/// h(s) = alpha(alpha_lower^{-1}(s * sup_on_init)), beta = ratio.
/// Requires phi(x) <= alpha(||x||) and alpha_lower below V on the domain.
CertificatePair build_pair_continuous_lyap(const LyapunovCertificate& cert,
                                           const ClassKFunction& alpha);

/// Quasi-uniform sampling of a centered ball, deterministic per seed.
struct BallSampler {
    std::size_t dimension = 2;
    double radius_sq = 1.0;
    std::uint64_t seed = 0;
    std::size_t count = 100000;

    std::vector<State> draw() const;
    std::vector<State> draw(std::size_t n, std::uint64_t stream) const;
};

struct RatioEstimate {
    double value = 0.0;
    std::size_t samples = 0;
    std::vector<double> refinement_trail;  // incumbent after each round
    /// Always true: sampling yields a lower estimate of the true sup,
    /// not a sound certificate.
    bool is_estimate = true;
};

/// Sampled sup of W(F(x))/W(x) over nonzero domain points, with local
/// refinement (shrinking boxes plus radial probes) around the incumbent.
/// Throws CertificateError if W vanishes at a sampled nonzero point.
RatioEstimate ratio_operator_estimate(
    const std::function<double(std::span<const double>)>& W,
    const std::function<State(std::span<const double>)>& F,
    const BallSampler& sampler, int refinement_rounds = 3);

struct EnvelopeCheck {
    bool holds = true;
    std::optional<State> witness;  // a point with f(x) > g(x) + tol
};

/// Sample check of f <= g + tol over the sampler's ball.
EnvelopeCheck verify_envelope(
    const std::function<double(std::span<const double>)>& f,
    const std::function<double(std::span<const double>)>& g,
    const BallSampler& sampler, double tol = kDefaultTol);

}  // namespace peakgate
