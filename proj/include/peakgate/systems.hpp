#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "peakgate/common.hpp"
#include "peakgate/seq_core.hpp"

namespace peakgate {

enum class SystemKind { BuiltinRunningExample, Affine, Polynomial };

/// Discrete-time self-map T on R^d.
struct DiscreteSystem {
    std::size_t dimension = 0;
    std::function<State(std::span<const double>)> map;
    SystemKind kind = SystemKind::Affine;
};

/// T(x) = A x + b.
DiscreteSystem make_affine(std::vector<std::vector<double>> matrix,
                           std::vector<double> offset);

/// One monomial of a componentwise polynomial map.
struct PolynomialTerm {
    double coefficient = 0.0;
    std::vector<unsigned> exponents;  // one exponent per coordinate
};

/// T_i(x) = sum of its terms, per output coordinate.
DiscreteSystem make_polynomial(std::size_t dimension,
                               std::vector<std::vector<PolynomialTerm>> coords);

/// Finite, nonempty set of initial conditions.
struct InitialSet {
    std::vector<State> points;
};

struct Objective {
    std::function<double(std::span<const double>)> eval;
    bool offset_removed = false;
};

Objective make_projection(std::size_t coordinate);           // pi_i, 0-based
Objective make_linear(std::vector<double> coefficients);     // c . x
Objective make_quadratic(std::vector<std::vector<double>> Q,
                         std::vector<double> b);             // x'Qx + b'x
Objective make_norm();                                       // ||x||

/// T^k(x); k = 0 returns x unchanged. Throws NonFiniteError on blow-up.
State iterate(const DiscreteSystem& sys, std::span<const double> x,
              std::size_t k);

/// Shifts the objective so that eval(0) = 0 and returns the removed offset;
/// the solver adds the offset back to reported optima.
std::pair<Objective, double> normalize_objective(const Objective& obj,
                                                 std::size_t dimension);

/// nu_k = max over initial points of obj(T^k(point)), with per-point
/// orbits memoized incrementally across terms.
BoundedSequence nu_sequence(const DiscreteSystem& sys, const InitialSet& init,
                            const Objective& obj);

struct OrbitRow {
    std::size_t point_index = 0;
    std::size_t k = 0;
    State state;
    double norm_sq = 0.0;
    bool finite = true;   // a non-finite state flags the row and truncates the point
};

struct OrbitTable {
    std::size_t dimension = 0;
    std::vector<OrbitRow> rows;  // point-major, then k
};

OrbitTable orbit_table(const DiscreteSystem& sys, const InitialSet& init,
                       std::size_t horizon);

/// CSV with a header row; values use shortest round-trip decimals.
void write_orbit_csv(const OrbitTable& table, std::ostream& out);
OrbitTable read_orbit_csv(std::istream& in);

/// Initial points of a table (the k = 0 rows).
InitialSet initial_set_from_table(const OrbitTable& table);

/// Shortest decimal representation that round-trips through binary64.
std::string format_double(double value);

}  // namespace peakgate
