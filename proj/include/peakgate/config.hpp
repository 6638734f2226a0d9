#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "peakgate/certificates.hpp"
#include "peakgate/systems.hpp"

namespace peakgate::cli {

/// Builds a class-K function from a named closed-form spec:
///   "identity" | "sqrt" | {"name":"power","p":2} | {"name":"scale","c":1.5}
/// or an array [outer, ..., inner] composed outermost first.
ClassKFunction build_classk(const nlohmann::json& spec);

/// Parsed and validated solve configuration. `normalized` is the config
/// with defaults filled in; serializing and re-parsing it is idempotent.
struct SolveConfig {
    int version = 1;
    DiscreteSystem system;
    InitialSet initial_points;
    Objective objective;
    std::string objective_description;
    nlohmann::json certificate;  // resolved lazily by build_certificate
    std::size_t guard = 10000;
    double tol = kDefaultTol;
    std::uint64_t seed = 0;
    nlohmann::json normalized;
};

SolveConfig parse_config(const nlohmann::json& doc);
SolveConfig load_config(const std::string& path);

struct CertificateSummary {
    std::string h_description;
    double beta = 0.0;
    double h_at_zero = 0.0;
    double h_at_one = 0.0;
    std::vector<std::string> warnings;  // e.g. "ratio is a sampling estimate"
};

/// Resolves the certificate spec against the configured system/points.
std::pair<CertificatePair, CertificateSummary> build_certificate(
    const SolveConfig& config);

struct SolveReport {
    double optimum = 0.0;
    std::size_t argmax_rank = 0;
    std::vector<std::size_t> stopping_integer_history;
    CertificateSummary certificate;
    bool usefulness = false;
    std::vector<TraceRow> trace;
    std::vector<std::string> warnings;
    double objective_offset = 0.0;
};

/// Versioned JSON schema ("peakgate-report/1"); field names are stable.
nlohmann::json report_to_json(const SolveReport& report, bool include_trace);
void report_to_table(const SolveReport& report, bool include_trace,
                     std::ostream& out);
void report_to_csv(const SolveReport& report, std::ostream& out);

}  // namespace peakgate::cli
