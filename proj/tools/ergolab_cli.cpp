#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <thread>

#include <CLI11.hpp>

#include "ergolab/report/compare.hpp"
#include "ergolab/report/config.hpp"
#include "ergolab/report/runner.hpp"

namespace rpt = ergolab::report;
using rpt::json;

namespace {

// ERGOLAB_WORKERS sets the default worker count; it never changes output bytes.
std::size_t default_workers() {
    if (const char* env = std::getenv("ERGOLAB_WORKERS")) {
        try {
            const long n = std::stol(env);
            if (n > 0) return static_cast<std::size_t>(n);
        } catch (const std::exception&) {
        }
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

int report_config_error(const ergolab::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return rpt::kExitConfig;
}

rpt::ExperimentConfig load(const std::string& path, std::optional<std::uint64_t> master_seed) {
    if (!master_seed) return rpt::load_config(path);
    auto text = rpt::read_file(path);
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error&) {
        return rpt::parse_config_text(text);  // rethrows with line and column
    }
    if (doc.is_object()) {
        if (!doc.contains("ensemble")) doc["ensemble"] = json::object();
        if (doc["ensemble"].is_object()) doc["ensemble"]["master_seed"] = *master_seed;
    }
    return rpt::parse_config(doc);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"ergolab: long-time simulation of ergodic diffusions"};
    app.require_subcommand(1);

    std::string config_path, out_dir, run_dir, oracle_path;
    std::size_t workers = default_workers();
    std::optional<std::uint64_t> master_seed;

    auto* run = app.add_subcommand("run", "simulate an ensemble and write CSV reports");
    run->add_option("--config", config_path, "experiment config (JSON)")->required();
    run->add_option("--out", out_dir, "output directory (default: config output.dir)");
    run->add_option("--workers", workers, "worker threads")->check(CLI::PositiveNumber);
    run->add_option("--master-seed", master_seed, "master seed (overrides config)");

    auto* cmp = app.add_subcommand("compare", "compare a finished run against invariant-measure oracles");
    cmp->add_option("--out", run_dir, "run directory")->required();
    cmp->add_option("--oracle", oracle_path, "oracle values (JSON); computed from the model when omitted");

    auto* val = app.add_subcommand("validate", "validate a config and print its resolved form");
    val->add_option("--config", config_path, "experiment config (JSON)")->required();
    val->add_option("--master-seed", master_seed, "master seed (overrides config)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : rpt::kExitConfig;
    }

    try {
        if (*val) {
            const auto cfg = load(config_path, master_seed);
            std::cout << cfg.resolved.dump(2) << "\n";
            return rpt::kExitOk;
        }
        if (*run) {
            const auto cfg = load(config_path, master_seed);
            const std::string dir = out_dir.empty() ? cfg.output_dir : out_dir;
            const auto result = rpt::run_experiment(cfg, dir, workers);
            std::cout << result.summary << "\n";
            for (const auto& f : result.files) std::cout << "  " << (rpt::fs::path(dir) / f).string() << "\n";
            if (result.exit_code == rpt::kExitBlowup)
                std::cerr << "blowup in more than half of the paths (" << result.blowups << ")\n";
            return result.exit_code;
        }
        if (*cmp) {
            std::optional<rpt::fs::path> oracle;
            if (!oracle_path.empty()) oracle = oracle_path;
            const auto result = rpt::compare_run(run_dir, oracle);
            (result.exit_code == rpt::kExitOk ? std::cout : std::cerr) << result.message;
            return result.exit_code;
        }
    } catch (const ergolab::ConfigError& e) {
        return report_config_error(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return rpt::kExitOk;
}
