#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include "peakgate/common.hpp"

namespace peakgate {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Lazy, memoized view of a real sequence u_0, u_1, ...
/// Evaluation must be pure: the cached value is returned verbatim on
/// re-query, and a non-finite term is a hard error.
class BoundedSequence {
public:
    explicit BoundedSequence(std::function<double(std::size_t)> evaluator);

    /// Term u_k. Throws NonFiniteError if the evaluator produces NaN/inf.
    double term(std::size_t k) const;
    double operator[](std::size_t k) const { return term(k); }

private:
    std::function<double(std::size_t)> evaluator_;
    mutable std::vector<std::optional<double>> cache_;
};

/// Strictly increasing continuous function on [0,1] together with its
/// inverse on [h(0), h(1)].
struct BridgeFunction {
    std::function<double(double)> forward;
    std::function<double(double)> inverse;
    double value_at_zero = 0.0;
    double value_at_one = 0.0;

    /// Builds the pair and validates strict monotonicity and the
    /// inverse round-trip on a sampled grid of [0,1].
    static BridgeFunction create(std::function<double(double)> forward,
                                 std::function<double(double)> inverse,
                                 double roundtrip_tol = 1e-9);
};

/// The (h, beta) element of Gamma(u) driving the stopping-integer formula.
class CertificatePair {
public:
    CertificatePair(BridgeFunction h, double beta);

    const BridgeFunction& h() const { return h_; }
    double beta() const { return beta_; }

private:
    BridgeFunction h_;
    double beta_;
};

struct TraceRow {
    std::size_t k = 0;
    double u_k = 0.0;
    bool in_S = false;
    double F_value = kInfinity;          // +inf when k is not in S(u,h)
    double K_after = kInfinity;          // running stopping integer, +inf until first update
};

struct PeakSolution {
    double optimum = -kInfinity;
    std::size_t argmax_rank = 0;
    std::size_t stopping_integer = 0;
    std::vector<TraceRow> trace;
};

/// ln(h^{-1}(u_k)) / ln(beta) when u_k > h(0); +infinity otherwise.
/// Throws DominationViolation if u_k exceeds h(1) beyond tolerance.
double stopping_index_formula(const BoundedSequence& u, std::size_t k,
                              const CertificatePair& pair,
                              double tol = kDefaultTol);

/// Iterates k = 0, 1, ... updating K = floor(F_u(k, h, beta)) on every
/// strict improvement of the running maximum, and stops once k > K.
/// Throws GuardExceeded if k reaches `guard` with K still infinite.
PeakSolution solve_peak(const BoundedSequence& u, const CertificatePair& pair,
                        std::size_t guard = 10000, double tol = kDefaultTol);

struct DominationCheck {
    bool holds = true;
    std::size_t first_violation = 0;     // meaningful only when !holds
};

/// Finite-horizon check of u_k <= h(beta^k) + tol for all k <= horizon.
DominationCheck verify_domination(const BoundedSequence& u,
                                  const CertificatePair& pair,
                                  std::size_t horizon,
                                  double tol = kDefaultTol);

/// min{ j : h(beta^j) < value } by direct scan; requires h(0) < value <= h(1).
std::size_t first_escape_rank(const CertificatePair& pair, double value,
                              double tol = kDefaultTol);

/// max_{0<=k<=horizon} u_k and the smallest attaining rank.
std::pair<double, std::size_t> brute_force_sup(const BoundedSequence& u,
                                               std::size_t horizon);

}  // namespace peakgate
