#include "peakgate/systems.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <memory>
#include <ostream>
#include <sstream>

namespace peakgate {

namespace {

double norm_sq(std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += v * v;
    return s;
}

bool all_finite(std::span<const double> x) {
    return std::all_of(x.begin(), x.end(),
                       [](double v) { return std::isfinite(v); });
}

}  // namespace

DiscreteSystem make_affine(std::vector<std::vector<double>> matrix,
                           std::vector<double> offset) {
    const std::size_t d = offset.size();
    if (matrix.size() != d ||
        std::any_of(matrix.begin(), matrix.end(),
                    [d](const auto& row) { return row.size() != d; })) {
        throw ConfigError("affine map matrix must be d x d with a d-offset");
    }
    DiscreteSystem sys;
    sys.dimension = d;
    sys.kind = SystemKind::Affine;
    sys.map = [matrix = std::move(matrix),
               offset = std::move(offset)](std::span<const double> x) {
        State y(offset);
        for (std::size_t i = 0; i < y.size(); ++i) {
            for (std::size_t j = 0; j < y.size(); ++j) {
                y[i] += matrix[i][j] * x[j];
            }
        }
        return y;
    };
    return sys;
}

DiscreteSystem make_polynomial(
    std::size_t dimension, std::vector<std::vector<PolynomialTerm>> coords) {
    if (coords.size() != dimension) {
        throw ConfigError("polynomial map needs one term list per coordinate");
    }
    for (const auto& terms : coords) {
        for (const auto& t : terms) {
            if (t.exponents.size() != dimension) {
                throw ConfigError(
                    "polynomial term needs one exponent per coordinate");
            }
        }
    }
    DiscreteSystem sys;
    sys.dimension = dimension;
    sys.kind = SystemKind::Polynomial;
    sys.map = [coords = std::move(coords)](std::span<const double> x) {
        State y(coords.size(), 0.0);
        for (std::size_t i = 0; i < coords.size(); ++i) {
            for (const auto& term : coords[i]) {
                double m = term.coefficient;
                for (std::size_t j = 0; j < term.exponents.size(); ++j) {
                    for (unsigned e = 0; e < term.exponents[j]; ++e) {
                        m *= x[j];
                    }
                }
                y[i] += m;
            }
        }
        return y;
    };
    return sys;
}

Objective make_projection(std::size_t coordinate) {
    return {[coordinate](std::span<const double> x) {
                if (coordinate >= x.size()) {
                    throw ConfigError("projection coordinate out of range");
                }
                return x[coordinate];
            },
            true};
}

Objective make_linear(std::vector<double> coefficients) {
    return {[c = std::move(coefficients)](std::span<const double> x) {
                double s = 0.0;
                for (std::size_t i = 0; i < c.size(); ++i) s += c[i] * x[i];
                return s;
            },
            true};
}

Objective make_quadratic(std::vector<std::vector<double>> Q,
                         std::vector<double> b) {
    return {[Q = std::move(Q), b = std::move(b)](std::span<const double> x) {
                double s = 0.0;
                for (std::size_t i = 0; i < b.size(); ++i) {
                    s += b[i] * x[i];
                    for (std::size_t j = 0; j < b.size(); ++j) {
                        s += x[i] * Q[i][j] * x[j];
                    }
                }
                return s;
            },
            true};
}

Objective make_norm() {
    return {[](std::span<const double> x) { return std::sqrt(norm_sq(x)); },
            true};
}

State iterate(const DiscreteSystem& sys, std::span<const double> x,
              std::size_t k) {
    State state(x.begin(), x.end());
    for (std::size_t i = 0; i < k; ++i) {
        state = sys.map(state);
        if (!all_finite(state)) {
            throw NonFiniteError("orbit blew up at step " + std::to_string(i + 1));
        }
    }
    return state;
}

std::pair<Objective, double> normalize_objective(const Objective& obj,
                                                 std::size_t dimension) {
    const State zero(dimension, 0.0);
    const double offset = obj.eval(zero);
    Objective shifted;
    shifted.offset_removed = true;
    if (offset == 0.0) {
        shifted.eval = obj.eval;
    } else {
        shifted.eval = [base = obj.eval, offset](std::span<const double> x) {
            return base(x) - offset;
        };
    }
    return {std::move(shifted), offset};
}

BoundedSequence nu_sequence(const DiscreteSystem& sys, const InitialSet& init,
                            const Objective& obj) {
    if (init.points.empty()) {
        throw ConfigError("initial set must be nonempty");
    }
    for (const auto& p : init.points) {
        if (p.size() != sys.dimension) {
            throw ConfigError("initial point dimension mismatch");
        }
    }
    // per-point orbit store, extended incrementally
    auto orbits = std::make_shared<std::vector<std::vector<State>>>();
    orbits->reserve(init.points.size());
    for (const auto& p : init.points) {
        orbits->push_back({p});
    }
    auto map = sys.map;
    auto eval = obj.eval;
    return BoundedSequence([orbits, map, eval](std::size_t k) {
        double best = -std::numeric_limits<double>::infinity();
        for (auto& orbit : *orbits) {
            while (orbit.size() <= k) {
                State next = map(orbit.back());
                if (!all_finite(next)) {
                    throw NonFiniteError(
                        "orbit blew up at step " + std::to_string(orbit.size()) +
                        "; the initial set cannot be silently shrunk");
                }
                orbit.push_back(std::move(next));
            }
            best = std::max(best, eval(orbit[k]));
        }
        return best;
    });
}

OrbitTable orbit_table(const DiscreteSystem& sys, const InitialSet& init,
                       std::size_t horizon) {
    OrbitTable table;
    table.dimension = sys.dimension;
    for (std::size_t p = 0; p < init.points.size(); ++p) {
        State state = init.points[p];
        for (std::size_t k = 0; k <= horizon; ++k) {
            OrbitRow row;
            row.point_index = p;
            row.k = k;
            row.state = state;
            row.finite = all_finite(state);
            row.norm_sq = row.finite ? norm_sq(state)
                                     : std::numeric_limits<double>::quiet_NaN();
            table.rows.push_back(row);
            if (!row.finite) {
                break;  // truncate this point at the first non-finite state
            }
            if (k < horizon) {
                state = sys.map(state);
            }
        }
    }
    return table;
}

std::string format_double(double value) {
    char buffer[64];
    auto result = std::to_chars(buffer, buffer + sizeof(buffer), value);
    return std::string(buffer, result.ptr);
}

void write_orbit_csv(const OrbitTable& table, std::ostream& out) {
    out << "point,k";
    for (std::size_t i = 0; i < table.dimension; ++i) {
        out << ",x" << i;
    }
    out << ",norm_sq\n";
    for (const auto& row : table.rows) {
        out << row.point_index << ',' << row.k;
        for (double v : row.state) {
            out << ',' << format_double(v);
        }
        out << ',' << format_double(row.norm_sq) << '\n';
    }
}

OrbitTable read_orbit_csv(std::istream& in) {
    OrbitTable table;
    std::string line;
    if (!std::getline(in, line)) {
        throw ConfigError("orbit CSV is empty");
    }
    const std::size_t columns =
        static_cast<std::size_t>(std::count(line.begin(), line.end(), ',')) + 1;
    if (columns < 4) {
        throw ConfigError("orbit CSV header needs point,k,x...,norm_sq");
    }
    table.dimension = columns - 3;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        OrbitRow row;
        std::getline(ss, cell, ',');
        row.point_index = std::stoul(cell);
        std::getline(ss, cell, ',');
        row.k = std::stoul(cell);
        for (std::size_t i = 0; i < table.dimension; ++i) {
            std::getline(ss, cell, ',');
            row.state.push_back(std::stod(cell));
        }
        std::getline(ss, cell, ',');
        row.norm_sq = std::stod(cell);
        row.finite = all_finite(row.state);
        table.rows.push_back(std::move(row));
    }
    return table;
}

InitialSet initial_set_from_table(const OrbitTable& table) {
    InitialSet init;
    for (const auto& row : table.rows) {
        if (row.k == 0) {
            init.points.push_back(row.state);
        }
    }
    if (init.points.empty()) {
        throw ConfigError("orbit table has no k=0 rows");
    }
    return init;
}

}  // namespace peakgate
