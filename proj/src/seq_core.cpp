#include "peakgate/seq_core.hpp"

#include <cmath>
#include <string>

namespace peakgate {

namespace {

std::string fmt_index(std::size_t k) { return "k=" + std::to_string(k); }

/// floor with a safe-side nudge: a value within tol of the next integer
/// is rounded up, so the resulting K never loses the maximizer.
double floor_with_tol(double value, double tol) {
    const double nearest = std::nearbyint(value);
    if (std::abs(value - nearest) <= tol) {
        return nearest;
    }
    return std::floor(value);
}

}  // namespace

BoundedSequence::BoundedSequence(std::function<double(std::size_t)> evaluator)
    : evaluator_(std::move(evaluator)) {}

double BoundedSequence::term(std::size_t k) const {
    if (k < cache_.size() && cache_[k].has_value()) {
        return *cache_[k];
    }
    const double value = evaluator_(k);
    if (!std::isfinite(value)) {
        throw NonFiniteError("sequence term is not finite at " + fmt_index(k));
    }
    if (k >= cache_.size()) {
        cache_.resize(k + 1);
    }
    cache_[k] = value;
    return value;
}

BridgeFunction BridgeFunction::create(std::function<double(double)> forward,
                                      std::function<double(double)> inverse,
                                      double roundtrip_tol) {
    BridgeFunction h;
    h.forward = std::move(forward);
    h.inverse = std::move(inverse);
    h.value_at_zero = h.forward(0.0);
    h.value_at_one = h.forward(1.0);

    constexpr int kGridPoints = 33;
    double previous = h.value_at_zero;
    for (int i = 1; i <= kGridPoints; ++i) {
        const double s = static_cast<double>(i) / kGridPoints;
        const double value = h.forward(s);
        if (!(value > previous)) {
            throw CertificateError(
                "bridge function is not strictly increasing on [0,1] near s=" +
                std::to_string(s));
        }
        const double back = h.inverse(value);
        if (std::abs(back - s) > roundtrip_tol) {
            throw CertificateError(
                "bridge inverse fails round-trip at s=" + std::to_string(s) +
                " (got " + std::to_string(back) + ")");
        }
        previous = value;
    }
    return h;
}

CertificatePair::CertificatePair(BridgeFunction h, double beta)
    : h_(std::move(h)), beta_(beta) {
    if (!(beta > 0.0 && beta < 1.0)) {
        throw CertificateError("beta must lie strictly in (0,1), got " +
                               std::to_string(beta));
    }
}

double stopping_index_formula(const BoundedSequence& u, std::size_t k,
                              const CertificatePair& pair, double tol) {
    const BridgeFunction& h = pair.h();
    const double u_k = u[k];
    if (u_k <= h.value_at_zero + tol) {
        return kInfinity;  // k is not in S(u,h)
    }
    if (u_k > h.value_at_one + tol) {
        throw DominationViolation(
            "certificate invalid for this sequence: u_" + std::to_string(k) +
            "=" + std::to_string(u_k) + " exceeds h(1)=" +
            std::to_string(h.value_at_one));
    }
    double s;
    if (u_k > h.value_at_one) {
        s = 1.0;  // boundary case u_k in (h(1), h(1)+tol]
    } else {
        s = h.inverse(u_k);
        if (s > 1.0 && s <= 1.0 + tol) {
            s = 1.0;
        }
    }
    if (!(s > 0.0 && s <= 1.0)) {
        throw CertificateError("bridge inverse left (0,1] at " + fmt_index(k) +
                               ": h^{-1}(u_k)=" + std::to_string(s));
    }
    return std::log(s) / std::log(pair.beta());
}

PeakSolution solve_peak(const BoundedSequence& u, const CertificatePair& pair,
                        std::size_t guard, double tol) {
    PeakSolution out;
    const double h0 = pair.h().value_at_zero;

    double stop = kInfinity;  // the running stopping integer K
    double u_max = -kInfinity;
    std::size_t k_max = 0;

    for (std::size_t k = 0; static_cast<double>(k) <= stop; ++k) {
        if (std::isinf(stop) && k >= guard) {
            throw GuardExceeded(
                "pair never proved useful within guard of " +
                    std::to_string(guard) +
                " iterations (S(u,h) may be empty, which no finite scan can "
                "decide)",
                guard);
        }
        TraceRow row;
        row.k = k;
        row.u_k = u[k];
        row.in_S = row.u_k > h0 + tol;
        if (row.in_S && row.u_k > u_max) {
            const double f = stopping_index_formula(u, k, pair, tol);
            row.F_value = f;
            stop = floor_with_tol(f, tol);
            u_max = row.u_k;
            k_max = k;
        }
        row.K_after = stop;
        out.trace.push_back(row);
    }

    out.optimum = u_max;
    out.argmax_rank = k_max;
    out.stopping_integer = static_cast<std::size_t>(stop);
    return out;
}

DominationCheck verify_domination(const BoundedSequence& u,
                                  const CertificatePair& pair,
                                  std::size_t horizon, double tol) {
    double power = 1.0;
    for (std::size_t k = 0; k <= horizon; ++k) {
        if (u[k] > pair.h().forward(power) + tol) {
            return {false, k};
        }
        power *= pair.beta();
    }
    return {true, 0};
}

std::size_t first_escape_rank(const CertificatePair& pair, double value,
                              double tol) {
    const BridgeFunction& h = pair.h();
    if (!(value > h.value_at_zero + tol) || value > h.value_at_one + tol) {
        throw CertificateError(
            "first_escape_rank requires h(0) < value <= h(1), got " +
            std::to_string(value));
    }
    constexpr std::size_t kScanLimit = 100000000;
    double power = 1.0;
    for (std::size_t j = 0; j < kScanLimit; ++j) {
        if (h.forward(power) < value) {
            return j;
        }
        power *= pair.beta();
    }
    throw CertificateError("first_escape_rank scan did not terminate");
}

std::pair<double, std::size_t> brute_force_sup(const BoundedSequence& u,
                                               std::size_t horizon) {
    double best = u[0];
    std::size_t best_rank = 0;
    for (std::size_t k = 1; k <= horizon; ++k) {
        const double value = u[k];
        if (value > best) {
            best = value;
            best_rank = k;
        }
    }
    return {best, best_rank};
}

}  // namespace peakgate
