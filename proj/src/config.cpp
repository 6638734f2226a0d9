#include "peakgate/config.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "peakgate/running_example.hpp"

namespace peakgate::cli {

using nlohmann::json;
namespace rex = peakgate::running_example;

namespace {

std::string spec_name(const json& spec) {
    if (spec.is_string()) return spec.get<std::string>();
    if (spec.is_object() && spec.contains("name")) {
        return spec.at("name").get<std::string>();
    }
    throw ConfigError("function spec must be a name or {\"name\": ...}");
}

double require_number(const json& obj, const char* key) {
    if (!obj.contains(key) || !obj.at(key).is_number()) {
        throw ConfigError(std::string("expected numeric field \"") + key + "\"");
    }
    return obj.at(key).get<double>();
}

State parse_point(const json& arr) {
    if (!arr.is_array() || arr.empty()) {
        throw ConfigError("a point must be a nonempty array of numbers");
    }
    State p;
    for (const auto& v : arr) {
        if (!v.is_number()) throw ConfigError("point coordinates must be numbers");
        p.push_back(v.get<double>());
    }
    return p;
}

DiscreteSystem parse_system(const json& spec) {
    const std::string kind = spec.at("kind").get<std::string>();
    if (kind == "builtin-running-example") {
        return rex::builtin_system();
    }
    if (kind == "affine") {
        std::vector<std::vector<double>> A;
        for (const auto& row : spec.at("matrix")) {
            A.push_back(row.get<std::vector<double>>());
        }
        std::vector<double> b;
        if (spec.contains("offset")) {
            b = spec.at("offset").get<std::vector<double>>();
        } else {
            b.assign(A.size(), 0.0);
        }
        return make_affine(std::move(A), std::move(b));
    }
    if (kind == "polynomial") {
        const auto& coords_spec = spec.at("coordinates");
        std::vector<std::vector<PolynomialTerm>> coords;
        for (const auto& terms_spec : coords_spec) {
            std::vector<PolynomialTerm> terms;
            for (const auto& t : terms_spec) {
                PolynomialTerm term;
                term.coefficient = require_number(t, "coefficient");
                term.exponents = t.at("exponents").get<std::vector<unsigned>>();
                terms.push_back(std::move(term));
            }
            coords.push_back(std::move(terms));
        }
        return make_polynomial(coords.size(), std::move(coords));
    }
    throw ConfigError("unknown system kind \"" + kind +
                      "\" (expected builtin-running-example | affine | "
                      "polynomial)");
}

Objective parse_objective(const json& spec, std::string& description) {
    const std::string kind = spec.at("kind").get<std::string>();
    if (kind == "projection") {
        const auto index = spec.at("index").get<std::size_t>();
        if (index < 1) {
            throw ConfigError("projection index is 1-based");
        }
        description = "pi_" + std::to_string(index);
        return make_projection(index - 1);
    }
    if (kind == "linear") {
        description = "linear";
        return make_linear(spec.at("coefficients").get<std::vector<double>>());
    }
    if (kind == "quadratic") {
        std::vector<std::vector<double>> Q;
        for (const auto& row : spec.at("Q")) {
            Q.push_back(row.get<std::vector<double>>());
        }
        std::vector<double> b(Q.size(), 0.0);
        if (spec.contains("b")) b = spec.at("b").get<std::vector<double>>();
        description = "quadratic";
        return make_quadratic(std::move(Q), std::move(b));
    }
    if (kind == "norm") {
        description = "norm";
        return make_norm();
    }
    throw ConfigError("unknown objective kind \"" + kind +
                      "\" (expected projection | linear | quadratic | norm)");
}

}  // namespace

ClassKFunction build_classk(const json& spec) {
    if (spec.is_array()) {
        if (spec.empty()) throw ConfigError("empty function composition");
        ClassKFunction out = build_classk(spec.back());
        for (auto it = spec.rbegin() + 1; it != spec.rend(); ++it) {
            out = ClassKFunction::compose(build_classk(*it), out);
        }
        return out;
    }
    const std::string name = spec_name(spec);
    if (name == "identity") return ClassKFunction::identity();
    if (name == "sqrt") return ClassKFunction::sqrt_form();
    if (name == "power") return ClassKFunction::power(require_number(spec, "p"));
    if (name == "scale") return ClassKFunction::scale(require_number(spec, "c"));
    throw ConfigError("unknown class-K form \"" + name +
                      "\" (expected identity | sqrt | power | scale)");
}

SolveConfig parse_config(const json& doc) {
    SolveConfig cfg;
    if (!doc.is_object()) throw ConfigError("config must be a JSON object");
    cfg.version = doc.value("version", 1);
    if (cfg.version != 1) {
        throw ConfigError("unsupported config version " +
                          std::to_string(cfg.version));
    }
    if (!doc.contains("system")) throw ConfigError("config needs a \"system\"");
    cfg.system = parse_system(doc.at("system"));

    if (!doc.contains("initial_points")) {
        throw ConfigError("config needs \"initial_points\"");
    }
    const auto& init_spec = doc.at("initial_points");
    if (init_spec.is_object() && init_spec.contains("scenario")) {
        const auto tag = init_spec.at("scenario").get<std::string>();
        if (tag.size() != 1) throw ConfigError("scenario tag must be a|b|c|d");
        cfg.initial_points = rex::scenario(tag[0]).points;
    } else if (init_spec.is_array()) {
        for (const auto& p : init_spec) {
            cfg.initial_points.points.push_back(parse_point(p));
        }
    } else {
        throw ConfigError("initial_points must be an array or {\"scenario\":...}");
    }
    if (cfg.initial_points.points.empty()) {
        throw ConfigError("initial_points must be nonempty");
    }
    for (const auto& p : cfg.initial_points.points) {
        if (p.size() != cfg.system.dimension) {
            throw ConfigError("initial point dimension " +
                              std::to_string(p.size()) +
                              " does not match system dimension " +
                              std::to_string(cfg.system.dimension));
        }
    }

    if (!doc.contains("objective")) throw ConfigError("config needs an \"objective\"");
    cfg.objective = parse_objective(doc.at("objective"), cfg.objective_description);

    if (doc.contains("certificate")) {
        cfg.certificate = doc.at("certificate");
    }
    cfg.guard = doc.value("guard", std::size_t{10000});
    cfg.tol = doc.value("tol", kDefaultTol);
    cfg.seed = doc.value("seed", std::uint64_t{0});
    if (!(cfg.tol > 0.0)) throw ConfigError("tol must be positive");

    cfg.normalized = doc;
    cfg.normalized["version"] = cfg.version;
    cfg.normalized["guard"] = cfg.guard;
    cfg.normalized["tol"] = cfg.tol;
    cfg.normalized["seed"] = cfg.seed;
    return cfg;
}

SolveConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    json doc;
    try {
        in >> doc;
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    return parse_config(doc);
}

namespace {

double resolve_ratio(const SolveConfig& cfg, const json& spec, double radius_sq,
                     bool builtin_v,
                     const std::function<double(std::span<const double>)>& V,
                     CertificateSummary& summary) {
    const json& ratio_spec = spec.at("ratio");
    if (ratio_spec.is_number()) {
        return ratio_spec.get<double>();
    }
    const std::string mode = ratio_spec.get<std::string>();
    if (mode == "closed") {
        if (!builtin_v || cfg.system.kind != SystemKind::BuiltinRunningExample) {
            throw ConfigError(
                "ratio mode \"closed\" is only available for the builtin "
                "system with the builtin V");
        }
        return rex::ratio_closed_form(radius_sq);
    }
    if (mode == "estimate") {
        BallSampler sampler;
        sampler.dimension = cfg.system.dimension;
        sampler.radius_sq = radius_sq;
        sampler.seed = cfg.seed;
        auto map = cfg.system.map;
        const RatioEstimate est = ratio_operator_estimate(
            V, [map](std::span<const double> x) { return map(x); }, sampler);
        summary.warnings.push_back(
            "ratio is a sampling estimate (a lower bound of the true sup), "
            "not a sound certificate");
        return est.value;
    }
    throw ConfigError("certificate ratio must be a number, \"closed\" or "
                      "\"estimate\"");
}

}  // namespace

std::pair<CertificatePair, CertificateSummary> build_certificate(
    const SolveConfig& cfg) {
    if (cfg.certificate.is_null()) {
        throw ConfigError("config has no \"certificate\" section");
    }
    const json& spec = cfg.certificate;
    const std::string type = spec.at("type").get<std::string>();
    CertificateSummary summary;

    if (type == "kl") {
        SontagFormKL kl;
        kl.theta1 = build_classk(spec.at("theta1"));
        kl.theta2 = build_classk(spec.at("theta2"));
        kl.psi_sup = require_number(spec, "psi_sup");
        kl.decay = spec.value("decay", std::exp(-1.0));
        if (!(kl.decay > 0.0 && kl.decay < 1.0)) {
            throw ConfigError("KL decay must lie strictly in (0,1), got " +
                              std::to_string(kl.decay));
        }
        CertificatePair pair = build_pair_from_kl(kl);
        summary.h_description = "theta1(theta2(psi_sup*y)), psi_sup=" +
                                format_double(kl.psi_sup);
        summary.beta = pair.beta();
        summary.h_at_zero = pair.h().value_at_zero;
        summary.h_at_one = pair.h().value_at_one;
        return {std::move(pair), std::move(summary)};
    }

    if (type == "lyapunov") {
        LyapunovCertificate cert;
        const json& v_spec = spec.at("V");
        bool builtin_v = false;
        if (v_spec.is_string() && v_spec.get<std::string>() == "builtin") {
            if (cfg.system.dimension != 2) {
                throw ConfigError("builtin V is two-dimensional");
            }
            builtin_v = true;
            cert.V = rex::lyapunov_V_span;
        } else if (v_spec.is_array()) {
            // user polynomial V: one list of terms
            std::vector<PolynomialTerm> terms;
            for (const auto& t : v_spec) {
                PolynomialTerm term;
                term.coefficient = require_number(t, "coefficient");
                term.exponents = t.at("exponents").get<std::vector<unsigned>>();
                if (term.exponents.size() != cfg.system.dimension) {
                    throw ConfigError("V term exponent arity mismatch");
                }
                terms.push_back(std::move(term));
            }
            cert.V = [terms](std::span<const double> x) {
                double s = 0.0;
                for (const auto& term : terms) {
                    double m = term.coefficient;
                    for (std::size_t j = 0; j < term.exponents.size(); ++j) {
                        for (unsigned e = 0; e < term.exponents[j]; ++e) m *= x[j];
                    }
                    s += m;
                }
                return s;
            };
        } else {
            throw ConfigError("certificate V must be \"builtin\" or a term list");
        }

        double radius_sq = 0.0;
        if (spec.contains("radius_sq")) {
            radius_sq = require_number(spec, "radius_sq");
        } else {
            for (const auto& p : cfg.initial_points.points) {
                double nsq = 0.0;
                for (double v : p) nsq += v * v;
                radius_sq = std::max(radius_sq, nsq);
            }
        }
        cert.domain.radius_sq = radius_sq;
        for (const auto& p : cfg.initial_points.points) {
            if (!cert.domain.contains(p)) {
                throw ConfigError(
                    "an initial point lies outside the stable domain ball");
            }
        }
        if (builtin_v && !(radius_sq < rex::rho_bar())) {
            throw ConfigError(
                "builtin V is a Lyapunov function only on balls with squared "
                "radius below " +
                format_double(rex::rho_bar()));
        }

        cert.ratio = resolve_ratio(cfg, spec, radius_sq, builtin_v, cert.V,
                                   summary);
        if (!(cert.ratio > 0.0 && cert.ratio < 1.0)) {
            throw ConfigError(
                "Lyapunov ratio must lie strictly in (0,1), got " +
                format_double(cert.ratio) +
                " (the decrease hypothesis of the Lyapunov definition fails)");
        }

        double sup_v = 0.0;
        for (const auto& p : cfg.initial_points.points) {
            sup_v = std::max(sup_v, cert.V(p));
        }
        cert.sup_on_init = sup_v;

        const std::string construction = spec.value("construction", "continuous");
        CertificatePair pair = [&] {
            if (construction == "direct") {
                summary.h_description =
                    "s * supV, supV=" + format_double(sup_v);
                return build_pair_direct_lyap(cert);
            }
            if (construction == "continuous") {
                cert.alpha_lower = spec.contains("alpha_lower")
                                       ? build_classk(spec.at("alpha_lower"))
                                       : ClassKFunction::power(2.0);
                const ClassKFunction alpha =
                    spec.contains("alpha") ? build_classk(spec.at("alpha"))
                                           : ClassKFunction::identity();
                summary.h_description =
                    "alpha(alpha_V^{-1}(s*supV)), supV=" + format_double(sup_v);
                return build_pair_continuous_lyap(cert, alpha);
            }
            throw ConfigError("Lyapunov construction must be direct | continuous");
        }();
        summary.beta = pair.beta();
        summary.h_at_zero = pair.h().value_at_zero;
        summary.h_at_one = pair.h().value_at_one;
        return {std::move(pair), std::move(summary)};
    }

    throw ConfigError("certificate type must be \"kl\" or \"lyapunov\"");
}

json report_to_json(const SolveReport& report, bool include_trace) {
    json doc;
    doc["schema"] = "peakgate-report/1";
    doc["optimum"] = report.optimum;
    doc["argmax_rank"] = report.argmax_rank;
    doc["stopping_integer_history"] = report.stopping_integer_history;
    doc["stopping_integer"] = report.stopping_integer_history.empty()
                                  ? json(nullptr)
                                  : json(report.stopping_integer_history.back());
    doc["usefulness"] = report.usefulness;
    doc["objective_offset"] = report.objective_offset;
    doc["certificate"] = {
        {"h", report.certificate.h_description},
        {"beta", report.certificate.beta},
        {"h_at_zero", report.certificate.h_at_zero},
        {"h_at_one", report.certificate.h_at_one},
    };
    doc["warnings"] = report.warnings;
    if (include_trace) {
        json rows = json::array();
        for (const auto& r : report.trace) {
            json row;
            row["k"] = r.k;
            row["u_k"] = r.u_k;
            row["in_S"] = r.in_S;
            row["F"] = std::isfinite(r.F_value) ? json(r.F_value) : json(nullptr);
            row["K"] = std::isfinite(r.K_after)
                           ? json(static_cast<std::size_t>(r.K_after))
                           : json(nullptr);
            rows.push_back(std::move(row));
        }
        doc["trace"] = std::move(rows);
    }
    return doc;
}

void report_to_table(const SolveReport& report, bool include_trace,
                     std::ostream& out) {
    out << std::setprecision(6);
    out << "optimum            " << report.optimum << "\n";
    out << "argmax rank        " << report.argmax_rank << "\n";
    out << "stopping integer   ";
    if (report.stopping_integer_history.empty()) {
        out << "(never set)";
    } else {
        for (std::size_t i = 0; i < report.stopping_integer_history.size(); ++i) {
            if (i) out << " -> ";
            out << report.stopping_integer_history[i];
        }
    }
    out << "\n";
    out << "certificate        h = " << report.certificate.h_description
        << ", beta = " << report.certificate.beta << "\n";
    out << "h(0), h(1)         " << report.certificate.h_at_zero << ", "
        << report.certificate.h_at_one << "\n";
    out << "useful             " << (report.usefulness ? "yes" : "no") << "\n";
    for (const auto& w : report.warnings) {
        out << "warning            " << w << "\n";
    }
    if (include_trace) {
        out << "k,u_k,in_S,F,K\n";
        for (const auto& r : report.trace) {
            out << r.k << ',' << r.u_k << ',' << (r.in_S ? 1 : 0) << ',';
            if (std::isfinite(r.F_value)) {
                out << r.F_value;
            } else {
                out << "inf";
            }
            out << ',';
            if (std::isfinite(r.K_after)) {
                out << static_cast<std::size_t>(r.K_after);
            } else {
                out << "inf";
            }
            out << "\n";
        }
    }
}

void report_to_csv(const SolveReport& report, std::ostream& out) {
    out << "k,u_k,in_S,F,K\n";
    for (const auto& r : report.trace) {
        out << r.k << ',' << format_double(r.u_k) << ',' << (r.in_S ? 1 : 0)
            << ',';
        out << (std::isfinite(r.F_value) ? format_double(r.F_value) : "inf");
        out << ',';
        if (std::isfinite(r.K_after)) {
            out << static_cast<std::size_t>(r.K_after);
        } else {
            out << "inf";
        }
        out << "\n";
    }
}

}  // namespace peakgate::cli
