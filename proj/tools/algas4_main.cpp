// Batch front end: validate configs, run scenarios to CSV traces, check
// fixed-point accuracy against the reference, and measure throughput.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <thread>

#include "CLI11.hpp"

#include "algas/config.hpp"
#include "algas/runner.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitConfig = 2;
constexpr int kExitAccuracy = 3;

algas::RunConfig load_config(const std::optional<std::string>& path) {
    algas::RunConfig cfg = path ? algas::parse_config(*path) : algas::RunConfig{};
    for (const auto& w : cfg.warnings) std::cerr << "warning: " << w << "\n";
    return cfg;
}

int default_workers() {
    const unsigned hw = std::thread::hardware_concurrency();
    return hw >= 4 ? 4 : int(hw > 0 ? hw : 1);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Four-corner landing-guidance fabric simulator"};
    app.require_subcommand(1);

    std::optional<std::string> config_path;
    std::optional<std::string> out_path;
    std::optional<std::uint64_t> seed_override;
    int workers = 1;
    int grid = 512;
    std::uint64_t bench_ticks = 1000000;

    auto* validate = app.add_subcommand("validate", "Check a config file and exit");
    validate->add_option("--config", config_path, "JSON config path")->required();

    auto* run = app.add_subcommand("run", "Run a scenario and write the CSV trace");
    run->add_option("--config", config_path, "JSON config path");
    run->add_option("--out", out_path, "Trace output path (overrides output.path)");
    run->add_option("--seed", seed_override, "Scenario seed override");
    run->add_option("--workers", workers, "Phase-1 worker threads")->check(CLI::Range(1, 4));

    auto* verify = app.add_subcommand("verify-accuracy",
                                      "Compare the fixed-point controller with the reference");
    verify->add_option("--config", config_path, "JSON config path");
    verify->add_option("--grid", grid, "Sweep grid size per axis")->check(CLI::Range(2, 8192));

    auto* bench_cmd = app.add_subcommand("bench", "Measure simulator throughput");
    bench_cmd->add_option("--config", config_path, "JSON config path");
    bench_cmd->add_option("--ticks", bench_ticks, "Fabric ticks per pass");
    bench_cmd->add_option("--workers", workers, "Worker threads for the parallel pass")
        ->check(CLI::Range(1, 4));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return e.get_exit_code() == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (validate->parsed()) {
            algas::RunConfig cfg = load_config(config_path);
            nlohmann::json j{{"valid", true}, {"warnings", cfg.warnings}};
            std::cout << j.dump(2) << "\n";
            return kExitOk;
        }

        if (run->parsed()) {
            algas::RunConfig cfg = load_config(config_path);
            if (seed_override) cfg.scenario.seed = *seed_override;
            const std::string trace_path = out_path.value_or(cfg.output_path);
            const algas::RunSummary summary = algas::run_simulation(cfg, trace_path, workers);
            std::cout << summary.to_json().dump(2) << "\n";
            return kExitOk;
        }

        if (verify->parsed()) {
            algas::RunConfig cfg = load_config(config_path);
            const algas::AccuracyReport rep = algas::verify_accuracy(cfg, grid);
            std::cout << rep.to_json().dump(2) << "\n";
            return rep.pass ? kExitOk : kExitAccuracy;
        }

        if (bench_cmd->parsed()) {
            algas::RunConfig cfg = load_config(config_path);
            if (!bench_cmd->count("--workers")) workers = default_workers();
            const algas::BenchReport rep = algas::bench(cfg, bench_ticks, workers);
            std::cout << rep.to_json().dump(2) << "\n";
            return rep.identical ? kExitOk : kExitRuntime;
        }
    } catch (const algas::ConfigError& e) {
        for (const auto& issue : e.issues()) std::cerr << "config error: " << issue << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitOk;
}
