#pragma once

// Experiment configuration: one JSON document per experiment. Unknown keys
// are rejected, every default is materialized into the resolved echo, and
// errors carry the JSON pointer of the offending field.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ergolab/errors.hpp"
#include "ergolab/estimators.hpp"
#include "ergolab/models.hpp"
#include "ergolab/oracle.hpp"
#include "ergolab/schedule.hpp"
#include "ergolab/schemes.hpp"
#include "ergolab/slln.hpp"

namespace ergolab::report {

using json = nlohmann::json;

struct ModelSpec {
    std::string kind = "ou";  // ou | langevin | custom-polynomial-drift
    double lambda = 2.0;
    double mu = 0.0;
    double sigma = 1.0;
    std::vector<double> potential;  // langevin U, ascending
    double epsilon = 1.0;
    std::vector<double> drift;      // custom
    std::vector<double> diffusion;  // custom
    int growth_exponent = 1;
};

struct GaugeSpec {
    std::string kind = "sqrt-2log";  // sqrt-2log | log-power
    double power = 0.5;
    double scale = 1.0;
};

struct EstimatorSpec {
    std::string kind;  // envelope | martingale | birkhoff
    double t_min = std::numbers::e;
    GaugeSpec gauge;
    double delta = 0.2;
    std::string phi = "x2";  // x | x2 | abs-pow | exp-delta-v
    double power = 1.0;
};

struct SllnSpec {
    std::string family = "pareto";  // pareto | ou-functional | continuous
    double alpha = 0.8;
    double p = 0.5;
    double eps_exp = 0.05;
    std::uint64_t n_max = 1'000'000;
    double t_max = 1e4;
    std::string phi = "x";
    double power = 1.0;
};

struct ExperimentConfig {
    std::string kind = "sde";  // sde | slln
    ModelSpec model;
    Scheme scheme = Scheme::em;
    CheckpointSchedule schedule;
    std::string initial_kind = "point";  // point | stationary
    double x0 = 0.0;
    std::string lyapunov_kind = "potential";  // potential | quadratic | constant
    double lyapunov_value = 1.0;
    double mono_radius = 1.0;
    std::vector<EstimatorSpec> estimators;
    std::uint64_t seeds = 10;
    std::uint64_t master_seed = 1;
    std::optional<double> grid_radius;  // nullopt = auto
    std::size_t grid_points = 48001;
    SllnSpec slln;
    std::string output_dir = "out";

    json resolved;  // fully materialized echo
};

namespace detail {

class Reader {
public:
    Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) throw ConfigError(path_.empty() ? "/" : path_, "expected an object");
    }

    std::string at(const std::string& key) const { return path_ + "/" + key; }
    bool has(const std::string& key) {
        allowed_.insert(key);
        return j_.contains(key);
    }
    const json& raw(const std::string& key) {
        allowed_.insert(key);
        return j_.at(key);
    }

    double number(const std::string& key, double def) {
        if (!has(key)) return def;
        const json& v = j_.at(key);
        if (!v.is_number()) throw ConfigError(at(key), "expected a number");
        const double d = v.get<double>();
        if (!std::isfinite(d)) throw ConfigError(at(key), "must be finite");
        return d;
    }

    std::uint64_t count(const std::string& key, std::uint64_t def) {
        if (!has(key)) return def;
        const json& v = j_.at(key);
        if (v.is_number_unsigned()) return v.get<std::uint64_t>();
        if (v.is_number_integer() && v.get<std::int64_t>() >= 0) return static_cast<std::uint64_t>(v.get<std::int64_t>());
        if (v.is_number_float()) {
            const double d = v.get<double>();
            if (d >= 0 && d == std::floor(d) && d < 1.8e19) return static_cast<std::uint64_t>(d);
        }
        throw ConfigError(at(key), "expected a non-negative integer");
    }

    std::string text(const std::string& key, const std::string& def) {
        if (!has(key)) return def;
        const json& v = j_.at(key);
        if (!v.is_string()) throw ConfigError(at(key), "expected a string");
        return v.get<std::string>();
    }

    std::vector<double> numbers(const std::string& key) {
        if (!has(key)) throw ConfigError(at(key), "required field missing");
        const json& v = j_.at(key);
        if (!v.is_array()) throw ConfigError(at(key), "expected an array of numbers");
        std::vector<double> out;
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (!v[i].is_number()) throw ConfigError(at(key) + "/" + std::to_string(i), "expected a number");
            out.push_back(v[i].get<double>());
        }
        return out;
    }

    void finish() const {
        for (auto it = j_.begin(); it != j_.end(); ++it)
            if (!allowed_.count(it.key())) throw ConfigError(at(it.key()), "unknown key");
    }

private:
    const json& j_;
    std::string path_;
    std::set<std::string> allowed_;
};

inline void require(bool ok, const std::string& field, const std::string& what) {
    if (!ok) throw ConfigError(field, what);
}

inline void one_of(const std::string& value, std::initializer_list<const char*> options, const std::string& field) {
    for (const char* o : options)
        if (value == o) return;
    std::string msg = "unknown value '" + value + "' (expected one of:";
    for (const char* o : options) msg += std::string(" ") + o;
    throw ConfigError(field, msg + ")");
}

inline json model_json(const ModelSpec& m) {
    if (m.kind == "ou") return {{"kind", "ou"}, {"lambda", m.lambda}, {"mu", m.mu}, {"sigma", m.sigma}};
    if (m.kind == "langevin") return {{"kind", "langevin"}, {"potential", m.potential}, {"epsilon", m.epsilon}};
    return {{"kind", m.kind}, {"drift", m.drift}, {"diffusion", m.diffusion}, {"growth_exponent", m.growth_exponent}};
}

inline ModelSpec parse_model(const json& j, const std::string& path) {
    Reader r(j, path);
    ModelSpec m;
    m.kind = r.text("kind", "ou");
    one_of(m.kind, {"ou", "langevin", "custom-polynomial-drift"}, r.at("kind"));
    if (m.kind == "ou") {
        m.lambda = r.number("lambda", 2.0);
        m.mu = r.number("mu", 0.0);
        m.sigma = r.number("sigma", 1.0);
        require(m.lambda > 0.0, r.at("lambda"), "must be positive");
        require(m.sigma > 0.0, r.at("sigma"), "must be positive");
    } else if (m.kind == "langevin") {
        m.potential = r.numbers("potential");
        m.epsilon = r.number("epsilon", 1.0);
        require(m.epsilon > 0.0, r.at("epsilon"), "must be positive");
        const Polynomial u(m.potential);
        require(u.degree() >= 2 && u.degree() % 2 == 0, r.at("potential"), "degree must be even and >= 2");
        require(u.leading() > 0.0, r.at("potential"), "leading coefficient must be positive");
    } else {
        m.drift = r.numbers("drift");
        if (r.has("diffusion")) {
            const json& d = r.raw("diffusion");
            if (d.is_number()) m.diffusion = {d.get<double>()};
            else m.diffusion = r.numbers("diffusion");
        } else {
            m.diffusion = {1.0};
        }
        const Polynomial b(m.drift), s(m.diffusion);
        const int natural = static_cast<int>(std::max(b.degree(), s.degree()));
        m.growth_exponent = static_cast<int>(r.count("growth_exponent", static_cast<std::uint64_t>(natural)));
    }
    r.finish();
    return m;
}

inline json gauge_json(const GaugeSpec& g) {
    if (g.kind == "sqrt-2log") return {{"kind", g.kind}, {"scale", g.scale}};
    return {{"kind", g.kind}, {"power", g.power}, {"scale", g.scale}};
}

}  // namespace detail

/// Parses and validates a configuration document, materializing defaults.
inline ExperimentConfig parse_config(const json& doc) {
    using detail::require;
    detail::Reader root(doc, "");
    ExperimentConfig c;
    c.kind = root.text("kind", "sde");
    detail::one_of(c.kind, {"sde", "slln"}, "/kind");

    c.model = root.has("model") ? detail::parse_model(root.raw("model"), "/model") : ModelSpec{};
    const bool ou = c.model.kind == "ou";
    const bool langevin = c.model.kind == "langevin";

    // Scheme
    const std::string scheme_name = root.text("scheme", ou ? "em" : "tamed");
    try {
        c.scheme = parse_scheme(scheme_name);
    } catch (const ConfigError& e) {
        throw ConfigError("/scheme", e.what());
    }
    require(c.scheme != Scheme::exact_ou || ou, "/scheme", "exact-ou requires an ou model");

    // Schedule
    {
        const double default_dt = ou ? 1e-2 : 1e-3;
        json empty = json::object();
        detail::Reader r(root.has("schedule") ? root.raw("schedule") : empty, "/schedule");
        c.schedule.t0 = r.number("t0", 1.0);
        c.schedule.ratio = r.number("ratio", 2.0);
        c.schedule.count = static_cast<std::size_t>(r.count("count", 14));
        c.schedule.dt = r.number("dt", std::min(default_dt, c.schedule.t0));
        c.schedule.oversample = r.number("oversample", 1.0);
        r.finish();
        require(c.schedule.t0 > 0.0, "/schedule/t0", "must be positive");
        require(c.schedule.count >= 1, "/schedule/count", "must be at least 1");
        require(c.schedule.count == 1 || c.schedule.ratio > 1.0, "/schedule/ratio", "must exceed 1");
        require(c.schedule.dt > 0.0, "/schedule/dt", "must be positive");
        require(c.schedule.dt <= c.schedule.t0, "/schedule/dt", "must not exceed t0");
        require(c.schedule.oversample >= 1.0, "/schedule/oversample", "must be >= 1");
        try {
            c.schedule.validate();
        } catch (const ScheduleError& e) {
            throw ConfigError("/schedule", e.what());
        }
    }

    // Initial state
    {
        json empty = json::object();
        detail::Reader r(root.has("initial") ? root.raw("initial") : empty, "/initial");
        c.initial_kind = r.text("kind", "point");
        detail::one_of(c.initial_kind, {"point", "stationary"}, "/initial/kind");
        if (c.initial_kind == "point") c.x0 = r.number("x0", 0.0);
        r.finish();
        require(c.initial_kind == "point" || c.model.kind != "custom-polynomial-drift" ||
                    (Polynomial(c.model.diffusion).is_constant() && !Polynomial(c.model.diffusion).is_zero()),
                "/initial/kind", "stationary start needs a model with an invariant-density oracle");
    }

    // Lyapunov function
    {
        json empty = json::object();
        detail::Reader r(root.has("lyapunov") ? root.raw("lyapunov") : empty, "/lyapunov");
        c.lyapunov_kind = r.text("kind", (ou || langevin) ? "potential" : "quadratic");
        detail::one_of(c.lyapunov_kind, {"potential", "quadratic", "constant"}, "/lyapunov/kind");
        require(c.lyapunov_kind != "potential" || ou || langevin, "/lyapunov/kind",
                "potential Lyapunov function needs an ou or langevin model");
        if (c.lyapunov_kind == "constant") c.lyapunov_value = r.number("value", 1.0);
        c.mono_radius = r.number("mono_radius", 1.0);
        r.finish();
    }

    // Estimators
    if (root.has("estimators")) {
        const json& list = root.raw("estimators");
        require(list.is_array(), "/estimators", "expected an array");
        int envelopes = 0, martingales = 0;
        for (std::size_t i = 0; i < list.size(); ++i) {
            const std::string path = "/estimators/" + std::to_string(i);
            detail::Reader r(list[i], path);
            EstimatorSpec e;
            e.kind = r.text("kind", "");
            detail::one_of(e.kind, {"envelope", "martingale", "birkhoff"}, path + "/kind");
            if (e.kind == "envelope") {
                ++envelopes;
                e.t_min = r.number("t_min", std::numbers::e);
                require(e.t_min > 1.0, path + "/t_min", "must exceed 1");
                json dflt = langevin ? json{{"kind", "log-power"}} : json{{"kind", "sqrt-2log"}};
                detail::Reader g(r.has("gauge") ? r.raw("gauge") : dflt, path + "/gauge");
                e.gauge.kind = g.text("kind", "sqrt-2log");
                detail::one_of(e.gauge.kind, {"sqrt-2log", "log-power"}, path + "/gauge/kind");
                const double natural_power = langevin ? 1.0 / static_cast<double>(Polynomial(c.model.potential).degree()) : 0.5;
                if (e.gauge.kind == "log-power") e.gauge.power = g.number("power", natural_power);
                e.gauge.scale = g.number("scale", 1.0);
                g.finish();
                require(e.gauge.scale > 0.0, path + "/gauge/scale", "must be positive");
                require(e.gauge.kind != "log-power" || e.gauge.power > 0.0, path + "/gauge/power", "must be positive");
            } else if (e.kind == "martingale") {
                ++martingales;
                e.delta = r.number("delta", 0.2);
                require(e.delta > 0.0 && e.delta < 1.0, path + "/delta", "must lie strictly inside (0, 1)");
                require(c.scheme != Scheme::exact_ou, path, "martingale tracking needs a discretization scheme");
            } else {
                e.phi = r.text("phi", "x2");
                detail::one_of(e.phi, {"x", "x2", "abs-pow", "exp-delta-v"}, path + "/phi");
                if (e.phi == "abs-pow") e.power = r.number("power", 1.0);
                if (e.phi == "exp-delta-v") {
                    e.delta = r.number("delta", 0.2);
                    require(e.delta > 0.0 && e.delta < 1.0, path + "/delta", "must lie strictly inside (0, 1)");
                }
            }
            r.finish();
            c.estimators.push_back(e);
        }
        require(envelopes <= 1, "/estimators", "at most one envelope estimator");
        require(martingales <= 1, "/estimators", "at most one martingale estimator");
    } else if (c.kind == "sde") {
        EstimatorSpec e;
        e.kind = "envelope";
        e.gauge.kind = langevin ? "log-power" : "sqrt-2log";
        if (langevin) e.gauge.power = 1.0 / static_cast<double>(Polynomial(c.model.potential).degree());
        c.estimators.push_back(e);
    }

    // Ensemble
    {
        json empty = json::object();
        detail::Reader r(root.has("ensemble") ? root.raw("ensemble") : empty, "/ensemble");
        c.seeds = r.count("seeds", 10);
        c.master_seed = r.count("master_seed", 1);
        r.finish();
        require(c.seeds >= 1, "/ensemble/seeds", "must be at least 1");
    }

    // Invariant-density oracle
    {
        json empty = json::object();
        detail::Reader r(root.has("invariant") ? root.raw("invariant") : empty, "/invariant");
        if (r.has("grid_radius")) {
            const json& g = r.raw("grid_radius");
            if (g.is_string()) {
                require(g.get<std::string>() == "auto", "/invariant/grid_radius", "expected \"auto\" or a number");
            } else {
                require(g.is_number() && g.get<double>() > 0.0, "/invariant/grid_radius", "must be positive");
                c.grid_radius = g.get<double>();
            }
        }
        c.grid_points = static_cast<std::size_t>(r.count("points", 48001));
        r.finish();
        require(c.grid_points >= 3 && c.grid_points % 2 == 1, "/invariant/points", "must be odd and >= 3");
    }

    // SLLN laboratory
    if (c.kind == "slln") {
        json empty = json::object();
        detail::Reader r(root.has("slln") ? root.raw("slln") : empty, "/slln");
        auto& s = c.slln;
        s.family = r.text("family", "pareto");
        detail::one_of(s.family, {"pareto", "ou-functional", "continuous"}, "/slln/family");
        s.p = r.number("p", 0.5);
        require(s.p > 0.0 && s.p < 1.0, "/slln/p", "must lie strictly inside (0, 1)");
        if (s.family == "pareto") {
            s.alpha = r.number("alpha", 0.8);
            require(s.alpha > 0.0 && s.alpha < 1.0, "/slln/alpha", "must lie strictly inside (0, 1)");
        }
        if (s.family != "pareto") {
            s.phi = r.text("phi", "x");
            detail::one_of(s.phi, {"x", "x2", "abs-pow", "signed-pow"}, "/slln/phi");
            if (s.phi == "abs-pow" || s.phi == "signed-pow") s.power = r.number("power", 1.0);
        }
        if (s.family == "continuous") {
            s.eps_exp = r.number("eps_exp", 0.05);
            s.t_max = r.number("t_max", 1e4);
            require(s.eps_exp > 0.0, "/slln/eps_exp", "must be positive");
            require(s.t_max >= 2.0, "/slln/t_max", "must be at least 2");
            require(c.scheme != Scheme::exact_ou, "/scheme", "continuous family needs a discretization scheme");
        } else {
            s.n_max = r.count("n_max", 1'000'000);
            require(s.n_max >= 1, "/slln/n_max", "must be at least 1");
        }
        r.finish();
    } else {
        require(!root.has("slln"), "/slln", "only allowed when kind is slln");
    }

    {
        json empty = json::object();
        detail::Reader r(root.has("output") ? root.raw("output") : empty, "/output");
        c.output_dir = r.text("dir", "out");
        r.finish();
    }
    root.finish();

    // Resolved echo
    json& e = c.resolved;
    e["kind"] = c.kind;
    e["model"] = detail::model_json(c.model);
    e["scheme"] = std::string(to_string(c.scheme));
    e["schedule"] = {{"t0", c.schedule.t0},
                     {"ratio", c.schedule.ratio},
                     {"count", c.schedule.count},
                     {"dt", c.schedule.dt},
                     {"oversample", c.schedule.oversample}};
    e["initial"] = c.initial_kind == "point" ? json{{"kind", "point"}, {"x0", c.x0}} : json{{"kind", "stationary"}};
    e["lyapunov"] = {{"kind", c.lyapunov_kind}, {"mono_radius", c.mono_radius}};
    if (c.lyapunov_kind == "constant") e["lyapunov"]["value"] = c.lyapunov_value;
    e["estimators"] = json::array();
    for (const auto& est : c.estimators) {
        json j{{"kind", est.kind}};
        if (est.kind == "envelope") {
            j["t_min"] = est.t_min;
            j["gauge"] = detail::gauge_json(est.gauge);
        } else if (est.kind == "martingale") {
            j["delta"] = est.delta;
        } else {
            j["phi"] = est.phi;
            if (est.phi == "abs-pow") j["power"] = est.power;
            if (est.phi == "exp-delta-v") j["delta"] = est.delta;
        }
        e["estimators"].push_back(j);
    }
    e["ensemble"] = {{"seeds", c.seeds}, {"master_seed", c.master_seed}};
    e["invariant"] = {{"points", c.grid_points}};
    e["invariant"]["grid_radius"] = c.grid_radius ? json(*c.grid_radius) : json("auto");
    if (c.kind == "slln") {
        const auto& s = c.slln;
        json j{{"family", s.family}, {"p", s.p}};
        if (s.family == "pareto") j["alpha"] = s.alpha;
        if (s.family != "pareto") {
            j["phi"] = s.phi;
            if (s.phi == "abs-pow" || s.phi == "signed-pow") j["power"] = s.power;
        }
        if (s.family == "continuous") {
            j["eps_exp"] = s.eps_exp;
            j["t_max"] = s.t_max;
        } else {
            j["n_max"] = s.n_max;
        }
        e["slln"] = j;
    }
    e["output"] = {{"dir", c.output_dir}};
    return c;
}

/// Line and column (1-based) of a byte offset in text.
inline std::pair<std::size_t, std::size_t> line_column(const std::string& text, std::size_t byte) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return {line, col};
}

inline ExperimentConfig parse_config_text(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        const auto [line, col] = line_column(text, e.byte);
        throw ConfigError("", "JSON syntax error at line " + std::to_string(line) + ", column " +
                                  std::to_string(col) + ": " + e.what());
    }
    return parse_config(doc);
}

inline ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("", "cannot open config file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

// Builders ----------------------------------------------------------------------

struct BuiltModel {
    SdeModel model;
    std::optional<LangevinModel> langevin;  // set when the invariant law is Gibbs
};

inline BuiltModel build_model(const ModelSpec& m) {
    if (m.kind == "ou") {
        auto [u, eps] = ou_as_langevin(m.lambda, m.mu, m.sigma);
        LangevinModel lm{u, u.leading(), 1, eps};
        return {make_ou(m.lambda, m.mu, m.sigma), lm};
    }
    if (m.kind == "langevin") {
        auto [model, lm] = make_langevin(Polynomial(m.potential), m.epsilon);
        return {std::move(model), lm};
    }
    const Polynomial drift(m.drift), diffusion(m.diffusion);
    BuiltModel out{make_polynomial_model(drift, diffusion, m.growth_exponent), std::nullopt};
    // b = -U' with U = -int b; eps = s^2/2 for constant s.
    if (diffusion.is_constant() && !diffusion.is_zero()) {
        const Polynomial u = drift.antiderivative().scaled(-1.0);
        if (u.degree() >= 2 && u.degree() % 2 == 0 && u.leading() > 0.0) {
            const double eps = 0.5 * diffusion.leading() * diffusion.leading();
            out.langevin = LangevinModel{u, u.leading(), static_cast<int>(u.degree() / 2), eps};
        }
    }
    return out;
}

inline LyapunovSpec build_lyapunov(const ExperimentConfig& c, const BuiltModel& bm, double delta) {
    LyapunovSpec v;
    if (c.lyapunov_kind == "potential" && bm.langevin) v = potential_lyapunov(*bm.langevin, delta);
    else if (c.lyapunov_kind == "constant") v = constant_lyapunov(c.lyapunov_value, delta);
    else v = quadratic_lyapunov(delta);
    v.mono_radius = c.mono_radius;
    return v;
}

inline Gauge build_gauge(const GaugeSpec& g) {
    return g.kind == "log-power" ? Gauge::log_power(g.power, g.scale) : Gauge::sqrt_two_log(g.scale);
}

inline Observable build_observable(const std::string& name, double power, const LyapunovSpec* v = nullptr) {
    if (name == "x") return Observable::scalar("x", [](double x) { return x; });
    if (name == "x2") return Observable::scalar("x2", [](double x) { return x * x; });
    if (name == "abs-pow")
        return Observable::scalar("abs-pow", [power](double x) { return std::pow(std::abs(x), power); });
    if (name == "signed-pow")
        return Observable::scalar("signed-pow", [power](double x) {
            return std::copysign(std::pow(std::abs(x), power), x);
        });
    if (name == "exp-delta-v" && v)
        return {"exp-delta-v", [lyap = *v](std::span<const double> x) { return std::exp(lyap.delta * lyap(x)); }};
    throw ConfigError("phi", "unknown observable '" + name + "'");
}

inline std::optional<InvariantOracle1D> build_oracle(const ExperimentConfig& c, const BuiltModel& bm) {
    if (!bm.langevin) return std::nullopt;
    const auto& lm = *bm.langevin;
    QuadratureGrid grid = auto_grid(lm.potential, lm.temperature, c.grid_points);
    if (c.grid_radius) grid = {-*c.grid_radius, *c.grid_radius, c.grid_points};
    return InvariantOracle1D::build(lm.potential, lm.temperature, grid);
}

}  // namespace ergolab::report
