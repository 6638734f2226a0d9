#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "peakgate/commands.hpp"

int main(int argc, char** argv) {
    using namespace peakgate::cli;

    CLI::App app{"peakgate: exact peak computation for discrete-time systems"};
    app.require_subcommand(1);

    GlobalOptions opts;
    app.add_option("--format", opts.format, "Output format: table, csv, json")
        ->check(CLI::IsMember({"table", "csv", "json"}))
        ->capture_default_str();
    app.add_flag("--trace", opts.trace, "Include the per-rank solver trace");
    std::size_t guard = 0;
    auto* guard_opt =
        app.add_option("--guard", guard,
                       "Abort after this many ranks with no finite stopping "
                       "integer (default 10000)");
    double tol = 0.0;
    auto* tol_opt = app.add_option(
        "--tol", tol, "Absolute comparison tolerance (default 1e-12)");
    std::uint64_t seed = 0;
    auto* seed_opt =
        app.add_option("--seed", seed, "Sampling seed (default 0)");

    std::string solve_config;
    auto* solve = app.add_subcommand("solve", "Solve a peak problem from a "
                                              "JSON config");
    solve->add_option("config", solve_config, "Path to the JSON config")
        ->required();

    std::string rep_scenario = "a";
    std::string rep_certificate = "lyapunov";
    int rep_objective = 1;
    auto* reproduce = app.add_subcommand(
        "reproduce", "Re-derive the published numbers for one scenario cell");
    reproduce
        ->add_option("--scenario", rep_scenario, "Scenario name: a, b, c or d")
        ->check(CLI::IsMember({"a", "b", "c", "d"}))
        ->required();
    reproduce
        ->add_option("--certificate", rep_certificate,
                     "Certificate family: kl or lyapunov")
        ->check(CLI::IsMember({"kl", "lyapunov"}))
        ->required();
    reproduce
        ->add_option("--objective", rep_objective,
                     "Coordinate projection: 1 or 2")
        ->check(CLI::IsMember({1, 2}))
        ->required();

    std::string orbit_config;
    std::string orbit_scenario;
    std::size_t orbit_horizon = 20;
    std::string orbit_out;
    auto* orbit =
        app.add_subcommand("orbit", "Tabulate orbits of the initial points");
    orbit->add_option("config", orbit_config, "Path to the JSON config");
    orbit
        ->add_option("--scenario", orbit_scenario,
                     "Built-in scenario instead of a config")
        ->check(CLI::IsMember({"a", "b", "c", "d"}));
    orbit->add_option("--horizon", orbit_horizon, "Last rank to tabulate")
        ->capture_default_str();
    orbit->add_option("--out", orbit_out, "CSV output path (default stdout)");

    bool ratio_builtin = false;
    double ratio_radius_sq = 0.0;
    std::string ratio_config;
    std::string ratio_mode = "closed";
    auto* ratio = app.add_subcommand(
        "ratio", "Evaluate or estimate the Lyapunov contraction ratio");
    ratio->add_flag("--builtin-V", ratio_builtin,
                    "Use the built-in example's Lyapunov function");
    ratio->add_option("--radius-sq", ratio_radius_sq,
                      "Squared radius of the stable ball (with --builtin-V)");
    ratio->add_option("config", ratio_config,
                      "JSON config carrying a lyapunov certificate");
    ratio->add_option("--mode", ratio_mode, "closed or estimate")
        ->check(CLI::IsMember({"closed", "estimate"}))
        ->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    if (*guard_opt) opts.guard = guard;
    if (*tol_opt) opts.tol = tol;
    if (*seed_opt) opts.seed = seed;

    if (app.got_subcommand(solve)) {
        return cmd_solve(solve_config, opts, std::cout, std::cerr);
    }
    if (app.got_subcommand(reproduce)) {
        return cmd_reproduce(rep_scenario[0], rep_certificate, rep_objective,
                             std::cout, std::cerr);
    }
    if (app.got_subcommand(orbit)) {
        std::optional<char> scenario;
        if (!orbit_scenario.empty()) scenario = orbit_scenario[0];
        return cmd_orbit(orbit_config, scenario, orbit_horizon, orbit_out,
                         std::cout, std::cerr);
    }
    if (app.got_subcommand(ratio)) {
        return cmd_ratio(ratio_builtin, ratio_radius_sq, ratio_config,
                         ratio_mode, opts.seed.value_or(0), std::cout,
                         std::cerr);
    }
    return kExitConfig;
}
