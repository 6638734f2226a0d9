#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include "peakgate/config.hpp"

namespace peakgate::cli {

// Exit codes shared by all subcommands.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitGuardExceeded = 2;
inline constexpr int kExitDominationViolation = 3;
inline constexpr int kExitReproduceMismatch = 4;

struct GlobalOptions {
    std::string format = "table";  // table | csv | json
    bool trace = false;
    std::optional<std::size_t> guard;
    std::optional<double> tol;
    std::optional<std::uint64_t> seed;
};

/// Runs the full solve pipeline for an already-parsed config.
SolveReport run_solve(const SolveConfig& config);

int cmd_solve(const std::string& config_path, const GlobalOptions& opts,
              std::ostream& out, std::ostream& err);

/// Golden harness: published value vs computed value vs |delta| for one
/// (scenario, certificate, objective) cell.
int cmd_reproduce(char scenario, const std::string& certificate, int objective,
                  std::ostream& out, std::ostream& err);

int cmd_orbit(const std::string& config_path, std::optional<char> scenario,
              std::size_t horizon, const std::string& out_path,
              std::ostream& out, std::ostream& err);

int cmd_ratio(bool builtin_v, double radius_sq, const std::string& config_path,
              const std::string& mode, std::uint64_t seed, std::ostream& out,
              std::ostream& err);

/// Diagnostic verbosity, from the PEAKGATE_LOG environment variable
/// (error | warn | info | debug, default warn).
enum class LogLevel { Error = 0, Warn = 1, Info = 2, Debug = 3 };
LogLevel log_level();
void log(LogLevel level, const std::string& message);

}  // namespace peakgate::cli
