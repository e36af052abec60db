#include <cstdlib>
#include <filesystem>
#include <string>

#include <gtest/gtest.h>

#include "ergolab/report/compare.hpp"
#include "ergolab/report/config.hpp"
#include "ergolab/report/runner.hpp"

using namespace ergolab;
using namespace ergolab::report;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("ergolab_test_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string field_of(const json& doc) {
    try {
        parse_config(doc);
    } catch (const ConfigError& e) {
        return e.field();
    }
    return "<accepted>";
}

json ou_run(std::uint64_t seeds, double t_end) {
    json doc = json::parse(R"({
        "model": {"kind": "ou", "lambda": 2},
        "scheme": "em",
        "initial": {"kind": "stationary"},
        "estimators": [
            {"kind": "envelope"},
            {"kind": "martingale", "delta": 0.2},
            {"kind": "birkhoff", "phi": "x2"},
            {"kind": "birkhoff", "phi": "abs-pow", "power": 1.5}
        ]
    })");
    doc["ensemble"] = {{"seeds", seeds}, {"master_seed", 7}};
    doc["schedule"] = {{"t0", t_end / 64.0}, {"ratio", 2.0}, {"count", 7}, {"dt", 1e-2}};
    return doc;
}

}  // namespace

TEST(Config, DefaultsAreMaterialized) {
    const auto c = parse_config(json::object());
    EXPECT_EQ(c.kind, "sde");
    EXPECT_EQ(c.scheme, Scheme::em);
    EXPECT_EQ(c.schedule.count, 14u);
    EXPECT_EQ(c.schedule.dt, 1e-2);
    ASSERT_EQ(c.estimators.size(), 1u);
    EXPECT_EQ(c.estimators[0].kind, "envelope");
    EXPECT_EQ(c.resolved["model"]["lambda"], 2.0);
    EXPECT_EQ(c.resolved["invariant"]["grid_radius"], "auto");
    EXPECT_EQ(c.resolved["ensemble"]["master_seed"], 1);

    const auto q = parse_config(json::parse(R"({"model": {"kind": "langevin", "potential": [0,0,0,0,0.25]}})"));
    EXPECT_EQ(q.scheme, Scheme::tamed);
    EXPECT_EQ(q.schedule.dt, 1e-3);
    EXPECT_EQ(q.estimators[0].gauge.kind, "log-power");
    EXPECT_DOUBLE_EQ(q.estimators[0].gauge.power, 0.25);
}

TEST(Config, ResolvedEchoRevalidatesToItself) {
    for (const json& doc : {json::object(), ou_run(3, 64.0),
                            json::parse(R"({"kind": "slln", "slln": {"family": "continuous", "phi": "signed-pow",
                                            "power": 3}, "ensemble": {"seeds": 2}})")}) {
        const auto c = parse_config(doc);
        const auto again = parse_config(c.resolved);
        EXPECT_EQ(again.resolved, c.resolved);
    }
}

TEST(Config, ErrorsNameTheField) {
    EXPECT_EQ(field_of(json::parse(R"({"estimators": [{"kind": "martingale", "delta": 1.2}]})")),
              "/estimators/0/delta");
    EXPECT_EQ(field_of(json::parse(R"({"model": {"kind": "ou", "lambda": 2, "gamma": 1}})")), "/model/gamma");
    EXPECT_EQ(field_of(json::parse(R"({"colour": "blue"})")), "/colour");
    EXPECT_EQ(field_of(json::parse(R"({"scheme": "rk4"})")), "/scheme");
    EXPECT_EQ(field_of(json::parse(R"({"schedule": {"t0": 0.001, "dt": 0.01}})")), "/schedule/dt");
    EXPECT_EQ(field_of(json::parse(R"({"model": {"kind": "langevin", "potential": [0, 0, 0, 1]}})")),
              "/model/potential");
    EXPECT_EQ(field_of(json::parse(R"({"invariant": {"points": 1000}})")), "/invariant/points");
    EXPECT_EQ(field_of(json::parse(R"({"scheme": "exact-ou", "estimators": [{"kind": "martingale"}]})")),
              "/estimators/0");
    EXPECT_EQ(field_of(json::parse(R"({"slln": {}})")), "/slln");
    EXPECT_EQ(field_of(json::parse(R"({"kind": "slln", "slln": {"p": 1.5}})")), "/slln/p");
}

TEST(Config, SyntaxErrorsReportLineAndColumn) {
    try {
        parse_config_text("{\n  \"model\": {\n    \"kind\": \"ou\",,\n  }\n}");
        FAIL() << "expected a syntax error";
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
    }
}

TEST(Config, CustomGradientDriftGetsAnOracle) {
    const auto c = parse_config(json::parse(R"({"model": {"kind": "custom-polynomial-drift",
                                                "drift": [0, -1, 0, -1], "diffusion": 1.4142135623730951}})"));
    const auto bm = build_model(c.model);
    ASSERT_TRUE(bm.langevin);
    EXPECT_EQ(bm.model.growth_exponent(), 3);
    EXPECT_NEAR(bm.langevin->temperature, 1.0, 1e-12);
    const auto nongradient = parse_config(json::parse(R"({"model": {"kind": "custom-polynomial-drift",
                                                          "drift": [0, -1], "diffusion": [1, 0.5]}})"));
    EXPECT_FALSE(build_model(nongradient.model).langevin);
}

TEST(Csv, RoundTripsSeventeenDigits) {
    const double v = 0.1 + 0.2;
    EXPECT_EQ(std::stod(format_double(v)), v);
    CsvBuffer csv({"a", "b"});
    csv.cell(v).cell(std::uint64_t{3});
    csv.end_row();
    const auto t = parse_csv(csv.str());
    EXPECT_EQ(t.header, (std::vector<std::string>{"a", "b"}));
    EXPECT_EQ(std::stod(t.rows.at(0).at(t.column("a"))), v);
    EXPECT_THROW(t.column("c"), Error);
}

TEST(Csv, Sha256KnownAnswer) {
    EXPECT_EQ(sha256_hex(""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(Run, WritesDocumentedSchemasAndManifest) {
    const auto dir = scratch("schemas");
    const auto cfg = parse_config(ou_run(4, 64.0));
    const auto res = run_experiment(cfg, dir, 2);
    EXPECT_EQ(res.exit_code, kExitOk);
    const auto env = parse_csv(read_file(dir / "envelope.csv"));
    EXPECT_EQ(env.header,
              (std::vector<std::string>{"path_id", "t", "x", "V", "env_V_over_logt", "env_gauge_ratio"}));
    EXPECT_EQ(env.rows.size(), 4u * 7u);
    EXPECT_EQ(parse_csv(read_file(dir / "martingale.csv")).header,
              (std::vector<std::string>{"path_id", "t", "M", "QV", "M_over_t", "QV_over_t", "lil_ratio"}));
    const auto birk = parse_csv(read_file(dir / "birkhoff.csv"));
    EXPECT_EQ(birk.header, (std::vector<std::string>{"path_id", "t", "phi_name", "running_avg"}));
    EXPECT_EQ(birk.rows.size(), 4u * 7u * 2u);
    EXPECT_EQ(birk.rows.back()[2], "abs-pow:1.5");

    const json manifest = json::parse(read_file(dir / "manifest.json"));
    EXPECT_EQ(manifest["config"], cfg.resolved);
    EXPECT_EQ(manifest["files"].size(), 3u);
    for (const auto& f : manifest["files"])
        EXPECT_EQ(f["sha256"], sha256_hex(read_file(dir / f["name"].get<std::string>())));
    EXPECT_EQ(parse_config(manifest["config"]).resolved, cfg.resolved);
}

TEST(Run, OutputIsIndependentOfWorkerCount) {
    const auto cfg = parse_config(ou_run(9, 32.0));
    const auto a = scratch("w1"), b = scratch("w8");
    run_experiment(cfg, a, 1);
    run_experiment(cfg, b, 8);
    for (const char* f : {"envelope.csv", "martingale.csv", "birkhoff.csv"})
        EXPECT_EQ(read_file(a / f), read_file(b / f)) << f;
}

TEST(Run, MasterSeedChangesOutput) {
    auto doc = ou_run(2, 16.0);
    const auto a = scratch("seed_a"), b = scratch("seed_b");
    run_experiment(parse_config(doc), a, 1);
    doc["ensemble"]["master_seed"] = 8;
    run_experiment(parse_config(doc), b, 1);
    EXPECT_NE(read_file(a / "envelope.csv"), read_file(b / "envelope.csv"));
}

TEST(Run, SllnFamilies) {
    const auto dir = scratch("slln");
    const auto cfg = parse_config(json::parse(R"({"kind": "slln", "slln": {"family": "pareto", "n_max": 1000},
                                                  "ensemble": {"seeds": 3}})"));
    run_experiment(cfg, dir, 2);
    const auto t = parse_csv(read_file(dir / "slln.csv"));
    EXPECT_EQ(t.header, (std::vector<std::string>{"seed", "n_or_T", "scaled_sum"}));
    EXPECT_EQ(t.rows.size(), 3u * geometric_counts(1000).size());

    const auto cont = parse_config(json::parse(R"({"kind": "slln", "slln": {"family": "continuous", "t_max": 64},
                                                   "ensemble": {"seeds": 2}})"));
    const auto res = run_experiment(cont, scratch("slln_cont"), 2);
    EXPECT_NE(res.summary.find("decaying="), std::string::npos);
}

TEST(Run, BlowupMajorityExitsThree) {
    const auto cfg = parse_config(json::parse(R"({"model": {"kind": "langevin", "potential": [0,0,0,0,0.25]},
        "scheme": "em", "initial": {"x0": 5}, "schedule": {"t0": 1, "count": 4, "dt": 0.1},
        "ensemble": {"seeds": 4}})"));
    const auto res = run_experiment(cfg, scratch("blowup"), 2);
    EXPECT_EQ(res.blowups, 4u);
    EXPECT_EQ(res.exit_code, kExitBlowup);
}

TEST(Run, ExactOuNeedsStationaryStart) {
    const auto cfg = parse_config(json::parse(R"({"scheme": "exact-ou"})"));
    EXPECT_THROW((Experiment(cfg)), ConfigError);
}

TEST(Compare, OuBirkhoffAgainstOracle) {
    const auto dir = scratch("compare");
    run_experiment(parse_config(ou_run(20, 1024.0)), dir, 4);
    const auto res = compare_run(dir);
    ASSERT_EQ(res.exit_code, kExitOk) << res.message;
    ASSERT_EQ(res.rows.size(), 4u);
    EXPECT_EQ(res.rows[0].estimator, "birkhoff:x2");
    EXPECT_NEAR(res.rows[0].oracle, 1.0, 1e-9);
    EXPECT_LE(std::abs(res.rows[0].z), 4.0);
    EXPECT_EQ(res.rows[0].paths, 20u);
    EXPECT_EQ(res.rows[3].estimator, "martingale:M_over_t");
    EXPECT_EQ(res.rows[3].oracle, 0.0);
    EXPECT_TRUE(fs::exists(dir / "compare.csv"));
}

TEST(Compare, EmptyEstimatorListGivesEmptyTable) {
    const auto dir = scratch("compare_empty");
    auto doc = ou_run(2, 16.0);
    doc["estimators"] = json::array();
    run_experiment(parse_config(doc), dir, 1);
    const auto res = compare_run(dir);
    EXPECT_EQ(res.exit_code, kExitOk);
    EXPECT_TRUE(res.rows.empty());
    EXPECT_EQ(parse_csv(read_file(dir / "compare.csv")).rows.size(), 0u);
}

TEST(Compare, MismatchedModelAndMissingInputsExitTwo) {
    const auto dir = scratch("compare_mismatch");
    run_experiment(parse_config(ou_run(2, 16.0)), dir, 1);
    const fs::path oracle = dir / "oracle.json";
    write_file(oracle, R"({"model": {"kind": "ou", "lambda": 3}, "values": {"birkhoff:x2": 1.0}})");
    EXPECT_EQ(compare_run(dir, oracle).exit_code, kExitConfig);
    write_file(oracle, R"({"model": {"kind": "ou", "lambda": 2}, "values": {"birkhoff:x2": 2.0}})");
    const auto ok = compare_run(dir, oracle);
    ASSERT_EQ(ok.exit_code, kExitOk);
    EXPECT_EQ(ok.rows[0].oracle, 2.0);
    EXPECT_EQ(compare_run(scratch("compare_nothing")).exit_code, kExitConfig);
    fs::remove(dir / "birkhoff.csv");
    EXPECT_EQ(compare_run(dir).exit_code, kExitConfig);
}

#ifdef ERGOLAB_CLI_PATH
namespace {
int cli(const std::string& args) {
    const int status = std::system((std::string(ERGOLAB_CLI_PATH) + " " + args + " >/dev/null 2>&1").c_str());
    return WEXITSTATUS(status);
}
}  // namespace

TEST(Cli, VerbsAndExitCodes) {
    const auto dir = scratch("cli");
    write_file(dir / "bad.json", R"({"estimators": [{"kind": "martingale", "delta": 1.2}]})");
    write_file(dir / "good.json", ou_run(2, 16.0).dump());
    write_file(dir / "broken.json", "{ \"model\": ");
    EXPECT_EQ(cli("validate --config " + (dir / "bad.json").string()), 2);
    EXPECT_EQ(cli("validate --config " + (dir / "broken.json").string()), 2);
    EXPECT_EQ(cli("run --config " + (dir / "missing.json").string() + " --out " + (dir / "x").string()), 2);
    EXPECT_EQ(cli("validate --config " + (dir / "good.json").string()), 0);
    EXPECT_EQ(cli("run --config " + (dir / "good.json").string() + " --out " + (dir / "run").string() +
                  " --workers 3 --master-seed 11"),
              0);
    EXPECT_EQ(json::parse(read_file(dir / "run" / "manifest.json"))["config"]["ensemble"]["master_seed"], 11);
    EXPECT_EQ(cli("compare --out " + (dir / "run").string()), 0);
    EXPECT_EQ(cli("compare --out " + (dir / "nowhere").string()), 2);
    EXPECT_EQ(cli("frobnicate"), 2);
}
#endif
