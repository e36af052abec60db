#pragma once

#include <cmath>
#include <filesystem>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "ergolab/report/config.hpp"
#include "ergolab/report/csv.hpp"
#include "ergolab/report/runner.hpp"
#include "ergolab/stats.hpp"
#include "ergolab/transform.hpp"

namespace ergolab::report {

struct DeviationRow {
    std::string estimator;
    double oracle = kNaN;
    double mc_value = kNaN;
    double std_error = kNaN;
    double z = kNaN;
    std::size_t paths = 0;
};

struct CompareResult {
    int exit_code = kExitOk;
    std::vector<DeviationRow> rows;
    std::string message;
};

namespace detail {

// Final value of `value_col` for each path (rows with the largest t), optionally
// filtered on a label column.
inline std::vector<double> final_values(const CsvTable& t, const std::string& value_col,
                                        const std::string& filter_col = "", const std::string& filter = "") {
    const std::size_t pid = t.column("path_id"), tc = t.column("t"), vc = t.column(value_col);
    const std::size_t fc = filter_col.empty() ? 0 : t.column(filter_col);
    std::map<std::string, std::pair<double, double>> last;  // path -> (t, value)
    std::vector<std::string> order;
    for (const auto& row : t.rows) {
        if (!filter_col.empty() && row.at(fc) != filter) continue;
        const double time = std::stod(row.at(tc));
        const double value = std::stod(row.at(vc));
        auto it = last.find(row.at(pid));
        if (it == last.end()) {
            order.push_back(row.at(pid));
            last.emplace(row.at(pid), std::make_pair(time, value));
        } else if (time >= it->second.first) {
            it->second = {time, value};
        }
    }
    std::vector<double> out;
    for (const auto& p : order) out.push_back(last[p].second);
    return out;
}

inline DeviationRow deviation(std::string name, std::vector<double> values, double oracle) {
    DeviationRow r;
    r.estimator = std::move(name);
    r.paths = values.size();
    r.oracle = oracle;
    if (values.empty()) return r;
    r.mc_value = stats::mean(values);
    r.std_error = stats::standard_error(values);
    if (!std::isnan(oracle) && r.std_error > 0.0) r.z = (r.mc_value - oracle) / r.std_error;
    return r;
}

}  // namespace detail

/// Oracle value of each comparable estimator of the config, from quadrature
/// against the invariant density. NaN where the model has no oracle.
inline std::map<std::string, double> oracle_values(const ExperimentConfig& cfg) {
    std::map<std::string, double> out;
    const BuiltModel bm = build_model(cfg.model);
    const auto oracle = build_oracle(cfg, bm);
    for (const auto& e : cfg.estimators) {
        if (e.kind == "birkhoff") {
            const std::string name = e.phi == "abs-pow" ? "abs-pow:" + format_double(e.power) : e.phi;
            double v = kNaN;
            if (oracle) {
                const LyapunovSpec lyap = build_lyapunov(cfg, bm, e.phi == "exp-delta-v" ? e.delta : 0.5);
                const Observable phi = build_observable(e.phi, e.power, &lyap);
                v = oracle->expectation_widening([&](double x) { return phi(x); });
            }
            out["birkhoff:" + name] = v;
        } else if (e.kind == "martingale") {
            double v = kNaN;
            if (oracle) {
                const auto tr = ExpTransform::derive(bm.model, build_lyapunov(cfg, bm, e.delta));
                v = oracle->expectation_widening([&](double x) {
                    const double g = tr.y(x) * tr.noise_rate(x);
                    return g * g;
                });
            }
            out["martingale:QV_over_t"] = v;
            out["martingale:M_over_t"] = 0.0;
        }
    }
    return out;
}

/// Deviation table of a finished run against oracle values. An optional oracle
/// document {"model": {...}, "values": {name: value}} overrides computed values
/// and must describe the same model as the run.
inline CompareResult compare_run(const fs::path& run_dir, const std::optional<fs::path>& oracle_file = std::nullopt) {
    CompareResult res;
    auto fail = [&](const std::string& msg) {
        res.exit_code = kExitConfig;
        res.message = msg;
        return res;
    };

    const fs::path manifest_path = run_dir / "manifest.json";
    if (!fs::exists(manifest_path)) return fail("missing " + manifest_path.string());
    ExperimentConfig cfg;
    try {
        const json manifest = json::parse(read_file(manifest_path));
        cfg = parse_config(manifest.at("config"));
    } catch (const std::exception& e) {
        return fail(std::string("unreadable manifest: ") + e.what());
    }

    std::map<std::string, double> values;
    try {
        values = oracle_values(cfg);
    } catch (const std::exception& e) {
        return fail(std::string("cannot build oracle: ") + e.what());
    }

    if (oracle_file) {
        json doc;
        try {
            doc = json::parse(read_file(*oracle_file));
        } catch (const std::exception& e) {
            return fail(std::string("unreadable oracle file: ") + e.what());
        }
        if (doc.contains("model")) {
            ModelSpec other;
            try {
                other = detail::parse_model(doc.at("model"), "/model");
            } catch (const std::exception& e) {
                return fail(std::string("oracle file model: ") + e.what());
            }
            if (detail::model_json(other) != detail::model_json(cfg.model))
                return fail("oracle file describes a different model than the run");
        }
        if (doc.contains("values")) {
            for (auto it = doc["values"].begin(); it != doc["values"].end(); ++it) {
                if (!it.value().is_number()) return fail("oracle value " + it.key() + " is not a number");
                values[it.key()] = it.value().get<double>();
            }
        }
    }

    bool want_birkhoff = false, want_martingale = false;
    for (const auto& e : cfg.estimators) {
        want_birkhoff |= e.kind == "birkhoff";
        want_martingale |= e.kind == "martingale";
    }

    try {
        if (want_birkhoff) {
            if (!fs::exists(run_dir / "birkhoff.csv")) return fail("missing birkhoff.csv");
            const CsvTable t = parse_csv(read_file(run_dir / "birkhoff.csv"));
            for (const auto& e : cfg.estimators) {
                if (e.kind != "birkhoff") continue;
                const std::string name = e.phi == "abs-pow" ? "abs-pow:" + format_double(e.power) : e.phi;
                res.rows.push_back(detail::deviation("birkhoff:" + name,
                                                     detail::final_values(t, "running_avg", "phi_name", name),
                                                     values["birkhoff:" + name]));
            }
        }
        if (want_martingale) {
            if (!fs::exists(run_dir / "martingale.csv")) return fail("missing martingale.csv");
            const CsvTable t = parse_csv(read_file(run_dir / "martingale.csv"));
            for (const char* col : {"QV_over_t", "M_over_t"}) {
                const std::string name = std::string("martingale:") + col;
                res.rows.push_back(detail::deviation(name, detail::final_values(t, col), values[name]));
            }
        }
    } catch (const std::exception& e) {
        return fail(std::string("malformed run output: ") + e.what());
    }

    CsvBuffer csv({"estimator", "oracle", "mc_value", "std_error", "z", "paths"});
    std::ostringstream summary;
    for (const auto& r : res.rows) {
        csv.cell(r.estimator).cell(r.oracle).cell(r.mc_value).cell(r.std_error).cell(r.z)
            .cell(static_cast<std::uint64_t>(r.paths));
        csv.end_row();
        summary << r.estimator << ": oracle=" << format_double(r.oracle) << " mc=" << format_double(r.mc_value)
                << " se=" << format_double(r.std_error) << " z=" << format_double(r.z) << "\n";
    }
    write_file(run_dir / "compare.csv", csv.str());
    res.message = res.rows.empty() ? "no comparable estimators\n" : summary.str();
    return res;
}

}  // namespace ergolab::report
