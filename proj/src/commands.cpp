#include "peakgate/commands.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "peakgate/running_example.hpp"

namespace peakgate::cli {

using nlohmann::json;
namespace rex = peakgate::running_example;

LogLevel log_level() {
    static const LogLevel level = [] {
        const char* env = std::getenv("PEAKGATE_LOG");
        if (env == nullptr) return LogLevel::Warn;
        const std::string v(env);
        if (v == "error") return LogLevel::Error;
        if (v == "warn") return LogLevel::Warn;
        if (v == "info") return LogLevel::Info;
        if (v == "debug") return LogLevel::Debug;
        return LogLevel::Warn;
    }();
    return level;
}

void log(LogLevel level, const std::string& message) {
    static const char* names[] = {"error", "warn", "info", "debug"};
    if (level <= log_level()) {
        std::cerr << "[peakgate:" << names[static_cast<int>(level)] << "] "
                  << message << "\n";
    }
}

SolveReport run_solve(const SolveConfig& cfg) {
    auto [objective, offset] =
        normalize_objective(cfg.objective, cfg.system.dimension);
    if (offset != 0.0) {
        log(LogLevel::Info, "objective shifted by " + format_double(offset) +
                                " so that phi(0) = 0");
    }
    const BoundedSequence u =
        nu_sequence(cfg.system, cfg.initial_points, objective);
    auto [pair, summary] = build_certificate(cfg);
    log(LogLevel::Info, "certificate: h = " + summary.h_description +
                            ", beta = " + format_double(summary.beta));

    const PeakSolution solution = solve_peak(u, pair, cfg.guard, cfg.tol);

    SolveReport report;
    report.optimum = solution.optimum + offset;
    report.argmax_rank = solution.argmax_rank;
    for (const auto& row : solution.trace) {
        if (std::isfinite(row.K_after)) {
            const auto k = static_cast<std::size_t>(row.K_after);
            if (report.stopping_integer_history.empty() ||
                report.stopping_integer_history.back() != k) {
                report.stopping_integer_history.push_back(k);
            }
        }
    }
    report.usefulness = !report.stopping_integer_history.empty();
    report.certificate = summary;
    report.trace = solution.trace;
    report.warnings = summary.warnings;
    report.objective_offset = offset;
    return report;
}

namespace {

void apply_overrides(SolveConfig& cfg, const GlobalOptions& opts) {
    if (opts.guard) cfg.guard = *opts.guard;
    if (opts.tol) cfg.tol = *opts.tol;
    if (opts.seed) cfg.seed = *opts.seed;
}

void emit_report(const SolveReport& report, const GlobalOptions& opts,
                 std::ostream& out) {
    if (opts.format == "json") {
        out << report_to_json(report, opts.trace).dump(2) << "\n";
    } else if (opts.format == "csv") {
        report_to_csv(report, out);
    } else {
        report_to_table(report, opts.trace, out);
    }
}

}  // namespace

int cmd_solve(const std::string& config_path, const GlobalOptions& opts,
              std::ostream& out, std::ostream& err) {
    try {
        SolveConfig cfg = load_config(config_path);
        apply_overrides(cfg, opts);
        const SolveReport report = run_solve(cfg);
        emit_report(report, opts, out);
        return kExitOk;
    } catch (const GuardExceeded& e) {
        err << "guard exceeded: " << e.what() << "\n";
        return kExitGuardExceeded;
    } catch (const DominationViolation& e) {
        err << "domination violation: " << e.what() << "\n";
        return kExitDominationViolation;
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const CertificateError& e) {
        err << "certificate error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitConfig;
    }
}

namespace {

struct GoldenValue {
    std::string label;
    double published;
    bool integer = false;
};

json scenario_config(char scenario, const std::string& certificate) {
    const rex::Scenario& sc = rex::scenario(scenario);
    json cfg;
    cfg["version"] = 1;
    cfg["system"] = {{"kind", "builtin-running-example"}};
    cfg["initial_points"] = {{"scenario", std::string(1, scenario)}};
    if (certificate == "kl") {
        cfg["certificate"] = {{"type", "kl"},
                              {"theta1", "identity"},
                              {"theta2", "sqrt"},
                              {"psi_sup", sc.sup_norm_sq},
                              {"decay", std::exp(-1.0)}};
    } else {
        cfg["certificate"] = {{"type", "lyapunov"},
                              {"V", "builtin"},
                              {"radius_sq", sc.radius_sq},
                              {"ratio", "closed"},
                              {"construction", "continuous"},
                              {"alpha", "identity"},
                              {"alpha_lower", {{"name", "power"}, {"p", 2}}}};
    }
    return cfg;
}

/// F value recorded in the trace at rank k, if any.
double trace_F(const SolveReport& report, std::size_t k) {
    for (const auto& row : report.trace) {
        if (row.k == k && std::isfinite(row.F_value)) {
            return row.F_value;
        }
    }
    return std::numeric_limits<double>::quiet_NaN();
}

/// Every published figure for one (scenario, certificate,
/// objective) cell, paired with how to read it off the solve report.
std::vector<std::pair<GoldenValue, double>> golden_rows(
    char scenario, const std::string& certificate, int objective,
    const SolveReport& r) {
    const bool kl = certificate == "kl";
    auto F = [&](std::size_t k) { return trace_F(r, k); };
    const double K_final =
        r.stopping_integer_history.empty()
            ? std::numeric_limits<double>::quiet_NaN()
            : static_cast<double>(r.stopping_integer_history.back());
    const auto rank = static_cast<double>(r.argmax_rank);

    std::vector<std::pair<GoldenValue, double>> rows;
    auto real = [&](std::string label, double published, double computed) {
        rows.push_back({{std::move(label), published, false}, computed});
    };
    auto integer = [&](std::string label, double published, double computed) {
        rows.push_back({{std::move(label), published, true}, computed});
    };

    if (scenario == 'a' && kl && objective == 1) {
        real("F(2)", 7.3415, F(2));
        integer("K", 7, K_final);
        integer("argmax", 2, rank);
        real("optimum", 0.03463, r.optimum);
    } else if (scenario == 'a' && kl && objective == 2) {
        real("F(2)", 8.0482, F(2));
        integer("K", 8, K_final);
        integer("argmax", 2, rank);
        real("optimum", 0.02432, r.optimum);
    } else if (scenario == 'a' && !kl && objective == 1) {
        real("ratio", 1.0 / 32.0, r.certificate.beta);
        real("F(2)", 2.1183, F(2));
        integer("K", 2, K_final);
        integer("argmax", 2, rank);
        real("optimum", 0.03463, r.optimum);
    } else if (scenario == 'a' && !kl && objective == 2) {
        real("ratio", 1.0 / 32.0, r.certificate.beta);
        real("F(2)", 2.3222, F(2));
        integer("K", 2, K_final);
        integer("argmax", 2, rank);
        real("optimum", 0.02432, r.optimum);
    } else if (scenario == 'b' && kl && objective == 1) {
        real("F(0)", 2.4598, F(0));
        real("F(1)", 2.4584, F(1));
        integer("K", 2, K_final);
        integer("argmax", 1, rank);
        real("optimum", 0.70048, r.optimum);
    } else if (scenario == 'b' && kl && objective == 2) {
        real("F(0)", 10.432, F(0));
        real("F(3)", 8.0945, F(3));
        integer("K", 8, K_final);
        integer("argmax", 3, rank);
        real("optimum", 0.04183, r.optimum);
    } else if (scenario == 'b' && !kl && objective == 1) {
        real("ratio", 0.36581, r.certificate.beta);
        real("F(1)", 2.44459, F(1));
        integer("K", 2, K_final);
        integer("argmax", 1, rank);
        real("optimum", 0.70048, r.optimum);
    } else if (scenario == 'b' && !kl && objective == 2) {
        real("ratio", 0.36581, r.certificate.beta);
        real("F(3)", 8.04905, F(3));
        integer("K", 8, K_final);
        integer("argmax", 3, rank);
        real("optimum", 0.04183, r.optimum);
    } else if (scenario == 'c' && objective == 1) {
        real("ratio", 0.9248, r.certificate.beta);
        real("F(0)", 20.187, F(0));
        real("F(1)", 17.897, F(1));
        real("F(2)", 16.867, F(2));
        integer("K", 16, K_final);
        integer("argmax", 2, rank);
        real("optimum", 2.50476, r.optimum);
    } else if (scenario == 'c' && objective == 2) {
        real("ratio", 0.9248, r.certificate.beta);
        real("F(5)", 88.6294, F(5));
        integer("K", 88, K_final);
        integer("argmax", 5, rank);
        real("optimum", 0.15155, r.optimum);
    } else if (scenario == 'd' && objective == 1) {
        real("ratio", 0.9706, r.certificate.beta);
        real("F(4)", 268.47, F(4));
        real("F(6)", 233.34, F(6));
        integer("K", 233, K_final);
        integer("argmax", 6, rank);
        real("optimum", 0.1512, r.optimum);
    } else if (scenario == 'd' && objective == 2) {
        real("ratio", 0.9706, r.certificate.beta);
        real("F(5)", 339.85, F(5));
        real("F(7)", 316.78, F(7));
        integer("K", 316, K_final);
        integer("argmax", 7, rank);
        real("optimum", 0.0435835, r.optimum);
    }
    return rows;
}

}  // namespace

int cmd_reproduce(char scenario, const std::string& certificate, int objective,
                  std::ostream& out, std::ostream& err) {
    constexpr double kRelTol = 1e-3;
    try {
        if (certificate != "kl" && certificate != "lyapunov") {
            throw ConfigError("certificate must be kl or lyapunov");
        }
        if (objective != 1 && objective != 2) {
            throw ConfigError("objective must be 1 or 2");
        }
        if (certificate == "kl" && scenario != 'a' && scenario != 'b') {
            throw ConfigError(
                "the KL certificate applies only to scenarios a and b (the "
                "initial set must lie inside the ball of squared radius below "
                "the e^{-1}-contraction boundary)");
        }
        json cfg_doc = scenario_config(scenario, certificate);
        cfg_doc["objective"] = {{"kind", "projection"}, {"index", objective}};
        const SolveConfig cfg = parse_config(cfg_doc);
        const SolveReport report = run_solve(cfg);

        const auto rows = golden_rows(scenario, certificate, objective, report);
        if (rows.empty()) {
            throw ConfigError("no published values recorded for this cell");
        }

        out << "scenario " << scenario << ", certificate " << certificate
            << ", objective pi_" << objective << "\n";
        out << std::left << std::setw(10) << "quantity" << std::setw(14)
            << "published" << std::setw(18) << "computed" << std::setw(14)
            << "|delta|" << "status\n";
        std::string first_mismatch;
        for (const auto& [expected, computed] : rows) {
            const double delta = std::abs(computed - expected.published);
            bool ok;
            if (expected.integer) {
                ok = std::isfinite(computed) && computed == expected.published;
            } else {
                ok = std::isfinite(computed) &&
                     delta <= kRelTol * std::abs(expected.published);
            }
            out << std::left << std::setw(10) << expected.label
                << std::setw(14) << std::setprecision(7) << expected.published
                << std::setw(18) << std::setprecision(9) << computed
                << std::setw(14) << std::setprecision(3) << delta
                << (ok ? "ok" : "MISMATCH") << "\n";
            if (!ok && first_mismatch.empty()) {
                first_mismatch = expected.label;
            }
        }
        if (!first_mismatch.empty()) {
            err << "reproduce mismatch at quantity " << first_mismatch << "\n";
            return kExitReproduceMismatch;
        }
        return kExitOk;
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitConfig;
    }
}

int cmd_orbit(const std::string& config_path, std::optional<char> scenario,
              std::size_t horizon, const std::string& out_path,
              std::ostream& out, std::ostream& err) {
    try {
        DiscreteSystem system;
        InitialSet init;
        if (scenario) {
            system = rex::builtin_system();
            init = rex::scenario(*scenario).points;
        } else if (!config_path.empty()) {
            const SolveConfig cfg = load_config(config_path);
            system = cfg.system;
            init = cfg.initial_points;
        } else {
            throw ConfigError("orbit needs a config path or --scenario");
        }
        const OrbitTable table = orbit_table(system, init, horizon);
        if (out_path.empty()) {
            write_orbit_csv(table, out);
        } else {
            std::ofstream file(out_path);
            if (!file) throw ConfigError("cannot open output file: " + out_path);
            write_orbit_csv(table, file);
            out << "wrote " << table.rows.size() << " rows to " << out_path
                << "\n";
        }
        return kExitOk;
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitConfig;
    }
}

int cmd_ratio(bool builtin_v, double radius_sq, const std::string& config_path,
              const std::string& mode, std::uint64_t seed, std::ostream& out,
              std::ostream& err) {
    try {
        if (mode != "closed" && mode != "estimate") {
            throw ConfigError("ratio mode must be closed or estimate");
        }
        if (builtin_v) {
            if (!(radius_sq > 0.0 && radius_sq < rex::rho_bar())) {
                err << "config error: radius_sq must lie in (0, "
                    << format_double(rex::rho_bar()) << ")\n";
                return kExitConfig;
            }
            if (mode == "closed") {
                out << "ratio (closed form) = "
                    << format_double(rex::ratio_closed_form(radius_sq)) << "\n";
                return kExitOk;
            }
            BallSampler sampler;
            sampler.dimension = 2;
            sampler.radius_sq = radius_sq;
            sampler.seed = seed;
            const auto system = rex::builtin_system();
            const RatioEstimate est = ratio_operator_estimate(
                rex::lyapunov_V_span,
                [map = system.map](std::span<const double> x) { return map(x); },
                sampler);
            out << "ratio (estimate, not a certificate) = "
                << format_double(est.value) << "\n";
            out << "samples = " << est.samples << "\n";
            out << "refinement trail =";
            for (double v : est.refinement_trail) {
                out << ' ' << format_double(v);
            }
            out << "\n";
            return kExitOk;
        }
        if (config_path.empty()) {
            throw ConfigError("ratio needs --builtin-V or a config path");
        }
        SolveConfig cfg = load_config(config_path);
        if (cfg.certificate.is_null() ||
            cfg.certificate.value("type", "") != "lyapunov") {
            throw ConfigError("config must carry a lyapunov certificate");
        }
        cfg.certificate["ratio"] = mode == "closed" ? "closed" : "estimate";
        auto [pair, summary] = build_certificate(cfg);
        out << "ratio (" << mode << ") = " << format_double(pair.beta()) << "\n";
        for (const auto& w : summary.warnings) {
            out << "warning: " << w << "\n";
        }
        return kExitOk;
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitConfig;
    }
}

}  // namespace peakgate::cli
