#include "peakgate/running_example.hpp"

#include <cmath>
#include <map>
#include <stdexcept>
#include <string>

namespace peakgate::running_example {

namespace {

constexpr double kKnotTol = 1e-12;

double norm_sq(const Vec2& x) { return x[0] * x[0] + x[1] * x[1]; }

}  // namespace

double rho_bar() {
    static const double value = std::sqrt(63.0) + 1.0;
    return value;
}

double rho_under() {
    static const double value = std::sqrt(64.0 / std::exp(1.0) - 1.0) + 1.0;
    return value;
}

Vec2 map_H(const Vec2& x) {
    const double s = norm_sq(x);
    return {((s - 1.0) * x[0] - x[1]) / 8.0, (x[0] + (s - 1.0) * x[1]) / 8.0};
}

double f_of(double s) {
    return s * (1.0 + (s - 1.0) * (s - 1.0)) / 64.0;
}

double g_of(double s) {
    if (s == 0.0) {
        return 1.0 / 32.0;
    }
    return (1.0 + (s - 1.0) * (s - 1.0)) / 64.0;
}

double lyapunov_V(const Vec2& x) {
    return std::max(norm_sq(x), std::exp(1.0) * norm_sq(map_H(x)));
}

double ratio_closed_form(double r) {
    if (!(r > 0.0 && r < rho_bar())) {
        throw std::domain_error("ratio_closed_form requires r in (0, " +
                                std::to_string(rho_bar()) + "), got " +
                                std::to_string(r));
    }
    if (r <= 2.0 + kKnotTol) {
        return 1.0 / 32.0;
    }
    if (r <= rho_under() + kKnotTol) {
        return (1.0 + (r - 1.0) * (r - 1.0)) / 64.0;
    }
    if (f_of(r) <= rho_under() + kKnotTol) {
        return std::exp(-1.0);
    }
    return g_of(f_of(r));
}

std::optional<std::size_t> first_positive_rank(const Vec2& x, int coordinate,
                                               std::size_t cap) {
    if (coordinate != 1 && coordinate != 2) {
        throw std::domain_error("coordinate must be 1 or 2");
    }
    Vec2 state = x;
    for (std::size_t k = 0; k <= cap; ++k) {
        const double value = state[coordinate - 1];
        if (!std::isfinite(value)) {
            throw NonFiniteError("orbit blew up during first_positive_rank scan");
        }
        if (value > 0.0) {
            return k;
        }
        state = map_H(state);
    }
    return std::nullopt;
}

DiscreteSystem builtin_system() {
    DiscreteSystem sys;
    sys.dimension = 2;
    sys.kind = SystemKind::BuiltinRunningExample;
    sys.map = [](std::span<const double> x) {
        const Vec2 y = map_H({x[0], x[1]});
        return State{y[0], y[1]};
    };
    return sys;
}

double lyapunov_V_span(std::span<const double> x) {
    return lyapunov_V({x[0], x[1]});
}

const Scenario& scenario(char name) {
    static const std::map<char, Scenario> scenarios = [] {
        std::map<char, Scenario> m;
        const std::map<char, std::vector<State>> raw = {
            {'a', {{-1.3, -0.3}, {-1.1, -0.8}}},
            {'b', {{-2.3, 0.013}, {0.7, -2.29}}},
            {'c', {{2.2, -2.0}}},
            {'d', {{-2.3, -1.9}, {-2.5, -1.5}}},
        };
        for (const auto& [tag, pts] : raw) {
            Scenario s;
            s.name = tag;
            s.points.points = pts;
            for (const auto& p : pts) {
                const Vec2 v{p[0], p[1]};
                s.sup_norm_sq = std::max(s.sup_norm_sq, norm_sq(v));
                s.sup_V = std::max(s.sup_V, lyapunov_V(v));
            }
            s.radius_sq = s.sup_norm_sq;
            m[tag] = s;
        }
        return m;
    }();
    auto it = scenarios.find(name);
    if (it == scenarios.end()) {
        throw ConfigError(std::string("unknown scenario '") + name +
                          "', expected one of a, b, c, d");
    }
    return it->second;
}

}  // namespace peakgate::running_example
