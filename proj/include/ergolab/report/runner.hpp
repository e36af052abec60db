#pragma once

#include <chrono>
#include <cmath>
#include <filesystem>
#include <memory>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <openssl/opensslv.h>

#include "ergolab/estimators.hpp"
#include "ergolab/integrate.hpp"
#include "ergolab/parallel.hpp"
#include "ergolab/report/config.hpp"
#include "ergolab/report/csv.hpp"
#include "ergolab/slln.hpp"
#include "ergolab/stats.hpp"
#include "ergolab/version.hpp"

namespace ergolab::report {

namespace fs = std::filesystem;

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitBlowup = 3;

struct PathOutput {
    bool blowup = false;
    std::uint64_t steps = 0;
    std::vector<EnvelopeSample> envelope;
    std::vector<MartingaleSample> martingale;
    std::vector<std::vector<BirkhoffSample>> birkhoff;  // one series per birkhoff estimator
    std::vector<ScaledSumPoint> slln;
    bool slln_decay = false;
};

/// Everything needed to simulate one path; immutable and shared by workers.
class Experiment {
public:
    explicit Experiment(ExperimentConfig cfg) : cfg_(std::move(cfg)), built_(build_model(cfg_.model)) {
        if (cfg_.initial_kind == "stationary") oracle_ = build_oracle(cfg_, built_);
        if (cfg_.initial_kind == "stationary" && !oracle_)
            throw ConfigError("/initial/kind", "stationary start needs a model with an invariant-density oracle");
        if (cfg_.scheme == Scheme::exact_ou && cfg_.initial_kind != "stationary")
            throw ConfigError("/initial/kind", "exact-ou paths start from the stationary law; set kind to stationary");
        if (cfg_.scheme == Scheme::milstein && !built_.model.is_scalar())
            throw ConfigError("/scheme", "milstein requires a one-dimensional model");
    }

    const ExperimentConfig& config() const noexcept { return cfg_; }
    const BuiltModel& built() const noexcept { return built_; }
    const std::optional<InvariantOracle1D>& oracle() const noexcept { return oracle_; }

    double initial_state(const BrownianDriver& driver) const {
        return cfg_.initial_kind == "stationary" ? oracle_->sample_stationary(driver) : cfg_.x0;
    }

    PathOutput simulate_path(std::uint64_t path_id) const {
        return cfg_.kind == "slln" ? simulate_slln(path_id) : simulate_sde(path_id);
    }

private:
    PathOutput simulate_sde(std::uint64_t path_id) const {
        const BrownianDriver driver{cfg_.master_seed, path_id, built_.model.noise_dim()};
        std::vector<std::unique_ptr<PathObserver>> owned;
        std::vector<PathObserver*> obs;
        EnvelopeTracker* envelope = nullptr;
        MartingaleTracker* martingale = nullptr;
        std::vector<BirkhoffAverage*> birkhoff;

        for (const auto& e : cfg_.estimators) {
            if (e.kind == "envelope") {
                const LyapunovSpec v = build_lyapunov(cfg_, built_, 0.5);
                auto t = std::make_unique<EnvelopeTracker>(v.value, build_gauge(e.gauge), e.t_min);
                envelope = t.get();
                owned.push_back(std::move(t));
            } else if (e.kind == "martingale") {
                auto t = std::make_unique<MartingaleTracker>(
                    ExpTransform::derive(built_.model, build_lyapunov(cfg_, built_, e.delta)));
                martingale = t.get();
                owned.push_back(std::move(t));
            } else {
                const LyapunovSpec v = build_lyapunov(cfg_, built_, e.phi == "exp-delta-v" ? e.delta : 0.5);
                auto t = std::make_unique<BirkhoffAverage>(build_observable(e.phi, e.power, &v));
                birkhoff.push_back(t.get());
                owned.push_back(std::move(t));
            }
            obs.push_back(owned.back().get());
        }

        Trajectory traj;
        if (cfg_.scheme == Scheme::exact_ou) {
            traj = exact_ou_path(cfg_.model.lambda, cfg_.model.mu, cfg_.model.sigma, cfg_.schedule, driver, obs);
        } else {
            traj = integrate(built_.model, initial_state(driver), cfg_.schedule, driver, cfg_.scheme, obs);
        }

        PathOutput out;
        out.blowup = traj.blowup;
        out.steps = traj.steps;
        if (envelope) out.envelope = envelope->samples();
        if (martingale) out.martingale = martingale->samples();
        for (auto* b : birkhoff) out.birkhoff.push_back(b->samples());
        return out;
    }

    PathOutput simulate_slln(std::uint64_t seed) const {
        const auto& s = cfg_.slln;
        PathOutput out;
        if (s.family == "pareto" || s.family == "ou-functional") {
            StationarySequenceGen gen;
            gen.master_seed = cfg_.master_seed;
            gen.seed = seed;
            if (s.family == "pareto") {
                gen.kind = SequenceFamily::pareto;
                gen.alpha = s.alpha;
            } else {
                gen.kind = SequenceFamily::ou_functional;
                if (cfg_.model.kind == "ou") {
                    gen.ou_lambda = cfg_.model.lambda;
                    gen.ou_mu = cfg_.model.mu;
                    gen.ou_sigma = cfg_.model.sigma;
                }
                const Observable phi = build_observable(s.phi, s.power);
                gen.f = [phi](double x) { return phi(x); };
            }
            const auto series = mz_scaled_sums(gen, s.p, static_cast<std::size_t>(s.n_max));
            out.slln = series.points;
            out.steps = s.n_max;
            return out;
        }
        const BrownianDriver driver{cfg_.master_seed, seed, 1};
        const auto count = static_cast<std::size_t>(std::ceil(std::log2(s.t_max) - 1e-12)) + 1;
        const auto schedule = CheckpointSchedule::spanning(1.0, s.t_max, count, std::min(cfg_.schedule.dt, 1.0));
        const auto series = mz_conjecture_continuous(built_.model, build_observable(s.phi, s.power), s.p, s.eps_exp,
                                                     initial_state(driver), schedule, driver, cfg_.scheme);
        out.slln = series.points;
        out.slln_decay = series.decay;
        return out;
    }

    ExperimentConfig cfg_;
    BuiltModel built_;
    std::optional<InvariantOracle1D> oracle_;
};

struct RunResult {
    int exit_code = kExitOk;
    std::string summary;
    std::vector<std::string> files;
    std::uint64_t blowups = 0;
};

/// CSV documents of a finished ensemble, keyed by file name.
inline std::vector<std::pair<std::string, std::string>> render_outputs(const ExperimentConfig& cfg,
                                                                       const std::vector<PathOutput>& paths) {
    std::vector<std::pair<std::string, std::string>> files;
    if (cfg.kind == "slln") {
        CsvBuffer csv({"seed", "n_or_T", "scaled_sum"});
        for (std::size_t i = 0; i < paths.size(); ++i)
            for (const auto& pt : paths[i].slln) {
                csv.cell(static_cast<std::uint64_t>(i)).cell(pt.n_or_t).cell(pt.scaled);
                csv.end_row();
            }
        files.emplace_back("slln.csv", csv.str());
        return files;
    }
    bool has_env = false, has_mart = false, has_birk = false;
    for (const auto& e : cfg.estimators) {
        has_env |= e.kind == "envelope";
        has_mart |= e.kind == "martingale";
        has_birk |= e.kind == "birkhoff";
    }
    if (has_env) {
        CsvBuffer csv({"path_id", "t", "x", "V", "env_V_over_logt", "env_gauge_ratio"});
        for (std::size_t i = 0; i < paths.size(); ++i)
            for (const auto& s : paths[i].envelope) {
                csv.cell(static_cast<std::uint64_t>(i)).cell(s.t).cell(s.x).cell(s.v).cell(s.env_v).cell(s.env_gauge);
                csv.end_row();
            }
        files.emplace_back("envelope.csv", csv.str());
    }
    if (has_mart) {
        CsvBuffer csv({"path_id", "t", "M", "QV", "M_over_t", "QV_over_t", "lil_ratio"});
        for (std::size_t i = 0; i < paths.size(); ++i)
            for (const auto& s : paths[i].martingale) {
                csv.cell(static_cast<std::uint64_t>(i)).cell(s.t).cell(s.m).cell(s.bracket).cell(s.m_over_t())
                    .cell(s.bracket_over_t()).cell(s.lil);
                csv.end_row();
            }
        files.emplace_back("martingale.csv", csv.str());
    }
    if (has_birk) {
        CsvBuffer csv({"path_id", "t", "phi_name", "running_avg"});
        for (std::size_t i = 0; i < paths.size(); ++i) {
            std::size_t b = 0;
            for (const auto& e : cfg.estimators) {
                if (e.kind != "birkhoff") continue;
                const std::string name = e.phi == "abs-pow" ? "abs-pow:" + format_double(e.power) : e.phi;
                for (const auto& s : paths[i].birkhoff[b]) {
                    csv.cell(static_cast<std::uint64_t>(i)).cell(s.t).cell(name).cell(s.average);
                    csv.end_row();
                }
                ++b;
            }
        }
        files.emplace_back("birkhoff.csv", csv.str());
    }
    return files;
}

inline std::string summarize(const ExperimentConfig& cfg, const std::vector<PathOutput>& paths, std::uint64_t blowups) {
    std::ostringstream s;
    s << "paths=" << paths.size() << " blowups=" << blowups;
    if (cfg.kind == "slln") {
        std::vector<double> last;
        std::size_t decays = 0;
        for (const auto& p : paths) {
            if (!p.slln.empty()) last.push_back(std::abs(p.slln.back().scaled));
            decays += p.slln_decay ? 1 : 0;
        }
        if (!last.empty()) s << " median_abs_scaled_sum=" << format_double(stats::median(last));
        if (cfg.slln.family == "continuous") s << " decaying=" << decays << "/" << paths.size();
        return s.str();
    }
    std::vector<double> env;
    for (const auto& p : paths)
        if (!p.envelope.empty() && !std::isnan(p.envelope.back().env_gauge)) env.push_back(p.envelope.back().env_gauge);
    if (!env.empty()) s << " median_env_gauge_ratio=" << format_double(stats::median(env));
    return s.str();
}

/// Runs the ensemble, writes the CSV files and manifest.json into out_dir.
/// Output bytes of the CSV files depend only on the configuration.
inline RunResult run_experiment(const ExperimentConfig& cfg, const fs::path& out_dir, std::size_t workers) {
    const auto start = std::chrono::steady_clock::now();
    const Experiment experiment(cfg);
    const auto paths = parallel_map(static_cast<std::size_t>(cfg.seeds), workers,
                                    [&](std::size_t i) { return experiment.simulate_path(i); });

    RunResult result;
    std::uint64_t steps = 0;
    for (const auto& p : paths) {
        result.blowups += p.blowup ? 1 : 0;
        steps += p.steps;
    }

    fs::create_directories(out_dir);
    json manifest;
    manifest["config"] = cfg.resolved;
    manifest["versions"] = {{"ergolab", kVersion},
                            {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                                  std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                                  std::to_string(NLOHMANN_JSON_VERSION_PATCH)},
                            {"openssl", OPENSSL_VERSION_TEXT}};
    manifest["files"] = json::array();
    for (const auto& [name, bytes] : render_outputs(cfg, paths)) {
        write_file(out_dir / name, bytes);
        manifest["files"].push_back({{"name", name}, {"sha256", sha256_hex(bytes)}, {"bytes", bytes.size()}});
        result.files.push_back(name);
    }
    result.summary = summarize(cfg, paths, result.blowups);
    manifest["summary"] = result.summary;
    manifest["paths"] = paths.size();
    manifest["blowups"] = result.blowups;
    manifest["steps"] = steps;
    manifest["workers"] = workers;
    manifest["wall_clock_seconds"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    write_file(out_dir / "manifest.json", manifest.dump(2) + "\n");
    result.files.push_back("manifest.json");

    if (2 * result.blowups > paths.size()) result.exit_code = kExitBlowup;
    return result;
}

}  // namespace ergolab::report
