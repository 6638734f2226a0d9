#include "peakgate/certificates.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace peakgate {

namespace {

double norm_sq(std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += v * v;
    return s;
}

bool is_zero(std::span<const double> x) {
    return std::all_of(x.begin(), x.end(), [](double v) { return v == 0.0; });
}

}  // namespace

ClassKFunction ClassKFunction::identity() {
    return {[](double s) { return s; }, [](double s) { return s; }, kInfinity};
}

ClassKFunction ClassKFunction::scale(double c) {
    if (!(c > 0.0)) {
        throw CertificateError("scale factor must be positive");
    }
    return {[c](double s) { return c * s; }, [c](double s) { return s / c; },
            kInfinity};
}

ClassKFunction ClassKFunction::power(double p) {
    if (!(p > 0.0)) {
        throw CertificateError("power exponent must be positive");
    }
    return {[p](double s) { return std::pow(s, p); },
            [p](double s) { return std::pow(s, 1.0 / p); }, kInfinity};
}

ClassKFunction ClassKFunction::sqrt_form() { return power(0.5); }

ClassKFunction ClassKFunction::compose(const ClassKFunction& outer,
                                       const ClassKFunction& inner) {
    ClassKFunction out;
    out.forward = [o = outer.forward, i = inner.forward](double s) {
        return o(i(s));
    };
    out.inverse = [o = outer.inverse, i = inner.inverse](double s) {
        return i(o(s));
    };
    out.domain_sup = inner.domain_sup;
    return out;
}

ClassKFunction ClassKFunction::with_bisection_inverse(
    std::function<double(double)> forward, double bracket_sup, double tol) {
    ClassKFunction out;
    out.forward = forward;
    out.domain_sup = bracket_sup;
    out.inverse = [forward, bracket_sup, tol](double y) {
        double lo = 0.0, hi = bracket_sup;
        if (y < forward(lo) || y > forward(hi)) {
            throw CertificateError("bisection inverse queried outside range");
        }
        while (hi - lo > tol) {
            const double mid = 0.5 * (lo + hi);
            (forward(mid) < y ? lo : hi) = mid;
        }
        return 0.5 * (lo + hi);
    };
    return out;
}

void ClassKFunction::validate(double grid_sup) const {
    if (std::abs(forward(0.0)) > kDefaultTol) {
        throw CertificateError("class-K function must vanish at zero");
    }
    constexpr int kGridPoints = 33;
    double previous = forward(0.0);
    for (int i = 1; i <= kGridPoints; ++i) {
        const double s = grid_sup * static_cast<double>(i) / kGridPoints;
        const double value = forward(s);
        if (!(value > previous)) {
            throw CertificateError("class-K function is not strictly increasing");
        }
        if (std::abs(inverse(value) - s) > 1e-9 * std::max(1.0, s)) {
            throw CertificateError("class-K inverse fails round-trip");
        }
        previous = value;
    }
}

bool StableDomain::contains(std::span<const double> x, double tol) const {
    return norm_sq(x) <= radius_sq + tol;
}

CertificatePair build_pair_from_kl(const SontagFormKL& kl) {
    if (!(kl.psi_sup > 0.0)) {
        throw CertificateError("KL construction requires sup of psi over X^in > 0");
    }
    if (!(kl.decay > 0.0 && kl.decay < 1.0)) {
        throw CertificateError("KL decay rate must lie in (0,1)");
    }
    const auto t1 = kl.theta1;
    const auto t2 = kl.theta2;
    const double psi_sup = kl.psi_sup;
    auto forward = [t1 = t1.forward, t2 = t2.forward, psi_sup](double y) {
        return t1(t2(psi_sup * y));
    };
    auto inverse = [t1 = t1.inverse, t2 = t2.inverse, psi_sup](double s) {
        return t2(t1(s)) / psi_sup;
    };
    BridgeFunction h;
    try {
        h = BridgeFunction::create(forward, inverse);
    } catch (const CertificateError& e) {
        throw CertificateError(std::string("composed KL bridge invalid: ") +
                               e.what());
    }
    return CertificatePair(std::move(h), kl.decay);
}

CertificatePair build_pair_direct_lyap(const LyapunovCertificate& cert) {
    if (!(cert.sup_on_init > 0.0)) {
        throw CertificateError(
            "direct Lyapunov construction requires sup of V over X^in > 0 "
            "(X^in must not be reduced to {0})");
    }
    const double sup_v = cert.sup_on_init;
    BridgeFunction h = BridgeFunction::create(
        [sup_v](double s) { return s * sup_v; },
        [sup_v](double s) { return s / sup_v; });
    return CertificatePair(std::move(h), cert.ratio);
}

CertificatePair build_pair_continuous_lyap(const LyapunovCertificate& cert,
                                           const ClassKFunction& alpha) {
    if (!(cert.sup_on_init > 0.0)) {
        throw CertificateError(
            "continuous Lyapunov construction requires sup of V over X^in > 0");
    }
    const double sup_v = cert.sup_on_init;
    const auto a = alpha;
    const auto av = cert.alpha_lower;
    // Construction hypothesis: alpha_lower exceeds sup V somewhere, so its
    // inverse is defined on all of [0, sup V]. Checked on a sampled grid.
    constexpr int kGridPoints = 17;
    for (int i = 0; i <= kGridPoints; ++i) {
        const double y = sup_v * static_cast<double>(i) / kGridPoints;
        const double s = av.inverse(y);
        if (!(s >= 0.0) || s > av.domain_sup ||
            std::abs(av.forward(std::min(s, av.domain_sup)) - y) >
                1e-9 * std::max(1.0, sup_v)) {
            throw CertificateError(
                "alpha_V^{-1} is not defined on [0, sup V]: alpha_V never "
                "reaches " +
                std::to_string(y) + " within its domain");
        }
    }
    // alpha_lower^{-1} is validated on [0, sup_on_init] at construction;
    // requests beyond that range fail loudly.
    auto inv_lower = [av, sup_v](double y) {
        if (y < -kDefaultTol || y > sup_v * (1.0 + 1e-9)) {
            throw CertificateError(
                "alpha_V^{-1} requested outside its validated range [0, sup V]");
        }
        return av.inverse(std::clamp(y, 0.0, sup_v));
    };
    auto forward = [a = a.forward, inv_lower, sup_v](double s) {
        return a(inv_lower(s * sup_v));
    };
    auto inverse = [a = a.inverse, av = av.forward, sup_v](double s) {
        return av(a(s)) / sup_v;
    };
    BridgeFunction h = BridgeFunction::create(forward, inverse);
    return CertificatePair(std::move(h), cert.ratio);
}

std::vector<State> BallSampler::draw() const { return draw(count, 0); }

std::vector<State> BallSampler::draw(std::size_t n, std::uint64_t stream) const {
    std::mt19937_64 rng(seed * 0x9e3779b97f4a7c15ULL + stream + 1);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const double radius = std::sqrt(radius_sq);

    std::vector<State> points;
    points.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        State x(dimension);
        double nrm = 0.0;
        do {
            for (auto& c : x) c = gauss(rng);
            nrm = std::sqrt(norm_sq(x));
        } while (nrm == 0.0);
        // uniform in the ball: direction from the Gaussian, radius from
        // the d-th root of a uniform variate
        const double scale =
            radius * std::pow(unif(rng), 1.0 / static_cast<double>(dimension)) /
            nrm;
        for (auto& c : x) c *= scale;
        points.push_back(std::move(x));
    }
    return points;
}

namespace {

double ratio_at(const std::function<double(std::span<const double>)>& W,
                const std::function<State(std::span<const double>)>& F,
                std::span<const double> x) {
    const double denom = W(x);
    if (denom == 0.0) {
        throw CertificateError(
            "W vanishes at a nonzero sample point: W is not positive definite "
            "on the domain");
    }
    const State fx = F(x);
    return W(fx) / denom;
}

}  // namespace

RatioEstimate ratio_operator_estimate(
    const std::function<double(std::span<const double>)>& W,
    const std::function<State(std::span<const double>)>& F,
    const BallSampler& sampler, int refinement_rounds) {
    RatioEstimate out;
    const double radius = std::sqrt(sampler.radius_sq);

    State incumbent;
    double best = -kInfinity;
    auto consider = [&](const State& x) {
        if (is_zero(x) || norm_sq(x) > sampler.radius_sq * (1.0 + 1e-15)) {
            return;
        }
        const double r = ratio_at(W, F, x);
        ++out.samples;
        if (r > best) {
            best = r;
            incumbent = x;
        }
    };

    for (const State& x : sampler.draw()) {
        consider(x);
    }
    out.refinement_trail.push_back(best);

    // Local refinement: shrinking boxes around the incumbent, plus radial
    // probes (boundary projection and scalings toward the origin) since
    // the sup of a radially monotone ratio sits at a radial extreme.
    double half_width = radius / 4.0;
    constexpr std::size_t kRoundSamples = 1000;
    std::mt19937_64 rng(sampler.seed * 0x9e3779b97f4a7c15ULL + 0xabcdef);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    for (int round = 0; round < refinement_rounds; ++round) {
        const State center = incumbent;
        const double center_norm = std::sqrt(norm_sq(center));
        if (center_norm > 0.0) {
            State probe = center;
            for (auto& c : probe) c *= radius / center_norm;
            consider(probe);
            for (double shrink : {0.5, 0.1, 0.01}) {
                State inner = center;
                for (auto& c : inner) c *= shrink;
                consider(inner);
            }
        }
        for (std::size_t i = 0; i < kRoundSamples; ++i) {
            State x = incumbent;
            for (auto& c : x) c += half_width * unif(rng);
            consider(x);
        }
        half_width /= 5.0;
        out.refinement_trail.push_back(best);
    }

    out.value = best;
    return out;
}

EnvelopeCheck verify_envelope(
    const std::function<double(std::span<const double>)>& f,
    const std::function<double(std::span<const double>)>& g,
    const BallSampler& sampler, double tol) {
    for (const State& x : sampler.draw()) {
        if (f(x) > g(x) + tol) {
            return {false, x};
        }
    }
    return {true, std::nullopt};
}

}  // namespace peakgate
