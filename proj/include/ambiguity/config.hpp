// config.hpp -- experiment configuration schema (JSON), report assembly, and
// the command dispatcher behind the ambiguity-kit CLI.
#pragma once

#include <chrono>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "ambiguity/attitudes.hpp"
#include "ambiguity/core.hpp"
#include "ambiguity/duality.hpp"
#include "ambiguity/models.hpp"
#include "ambiguity/risksharing.hpp"

namespace ambiguity {

inline constexpr const char* kLibraryVersion = "0.1.0";

using json = nlohmann::json;

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& pointer, const std::string& message)
        : std::runtime_error(pointer + ": " + message) {}
};

namespace cfgdetail {

inline const json& require(const json& j, const std::string& key, const std::string& path) {
    if (!j.contains(key)) throw ConfigError(path + "/" + key, "required field is missing");
    return j.at(key);
}

inline double number_at(const json& j, const std::string& key, const std::string& path) {
    const json& v = require(j, key, path);
    if (!v.is_number()) throw ConfigError(path + "/" + key, "expected a number");
    return v.get<double>();
}

inline double number_or(const json& j, const std::string& key, double fallback) {
    return j.contains(key) ? j.at(key).get<double>() : fallback;
}

inline Belief belief_at(const json& v, const std::string& path) {
    if (!v.is_array()) throw ConfigError(path, "expected an array of probabilities");
    std::vector<double> w = v.get<std::vector<double>>();
    try {
        return Belief(std::move(w));
    } catch (const std::exception& ex) {
        throw ConfigError(path, ex.what());
    }
}

inline std::vector<Belief> beliefs_at(const json& v, const std::string& path) {
    if (!v.is_array()) throw ConfigError(path, "expected an array of belief vectors");
    std::vector<Belief> out;
    for (std::size_t i = 0; i < v.size(); ++i)
        out.push_back(belief_at(v.at(i), path + "/" + std::to_string(i)));
    return out;
}

inline AmbiguityFunction phi_at(const json& v, const std::string& path) {
    if (v.is_string()) {
        std::string name = v.get<std::string>();
        if (name == "sqrt") return AmbiguityFunction::Sqrt();
        if (name == "sqrt_plus_linear") return AmbiguityFunction::SqrtPlusLinear();
        if (name == "log") return AmbiguityFunction::Log();
        if (name == "exp_capped") return AmbiguityFunction::ExpCapped();
        if (name == "identity") return AmbiguityFunction::Identity();
        throw ConfigError(path, "unknown ambiguity function '" + name + "'");
    }
    if (v.is_object() && v.value("type", "") == "power")
        return AmbiguityFunction::Power(number_at(v, "rho", path));
    throw ConfigError(path, "expected an ambiguity function name or {type:'power', rho}");
}

}  // namespace cfgdetail

inline Interval interval_from_json(const json& v, const std::string& path) {
    Interval K;
    K.lo = cfgdetail::number_or(v, "lo", 0.0);
    K.hi = v.contains("hi") ? v.at("hi").get<double>() : kInf;
    K.lo_closed = v.value("lo_closed", is_finite(K.lo));
    K.hi_closed = v.value("hi_closed", is_finite(K.hi));
    try {
        K.validate();
    } catch (const std::exception& ex) {
        throw ConfigError(path, ex.what());
    }
    return K;
}

inline Aggregator aggregator_from_json(const json& v, const std::string& path) {
    const std::string type = cfgdetail::require(v, "type", path).get<std::string>();
    if (type == "affine") {
        AffineAggregator a;
        a.belief = cfgdetail::belief_at(cfgdetail::require(v, "belief", path), path + "/belief");
        a.offset = cfgdetail::number_or(v, "offset", 0.0);
        return a;
    }
    if (type == "log_sum_exp") {
        LogSumExpAggregator l;
        l.lambda = cfgdetail::number_at(v, "lambda", path);
        l.weights = cfgdetail::require(v, "weights", path).get<std::vector<double>>();
        l.beliefs = cfgdetail::beliefs_at(cfgdetail::require(v, "beliefs", path), path + "/beliefs");
        try {
            l.validate();
        } catch (const std::exception& ex) {
            throw ConfigError(path, ex.what());
        }
        return l;
    }
    throw ConfigError(path + "/type", "unknown aggregator tag '" + type + "'");
}

inline PreferenceModel model_from_json(const json& v, const std::string& path) {
    const std::string type = cfgdetail::require(v, "type", path).get<std::string>();
    if (type == "dual_self_max") {
        DualSelfMax m;
        const json& hs = cfgdetail::require(v, "aggregators", path);
        for (std::size_t i = 0; i < hs.size(); ++i)
            m.aggregators.push_back(
                aggregator_from_json(hs.at(i), path + "/aggregators/" + std::to_string(i)));
        if (m.aggregators.empty()) throw ConfigError(path + "/aggregators", "need at least one aggregator");
        return m;
    }
    if (type == "multiplier_oo") {
        MultiplierOO m;
        m.Q = cfgdetail::beliefs_at(v.value("Q", json::array()), path + "/Q");
        m.theta = cfgdetail::number_or(v, "theta", 0.0);
        m.lambda = cfgdetail::number_at(v, "lambda", path);
        m.n = v.value("n", m.Q.empty() ? 0 : m.Q.front().size());
        if (m.n == 0) throw ConfigError(path + "/n", "state count required when Q is empty");
        if (m.theta < 0.0) throw ConfigError(path + "/theta", "theta must be nonnegative");
        if (!(m.lambda > 0.0)) throw ConfigError(path + "/lambda", "lambda must be positive");
        return m;
    }
    if (type == "confidence_oo") {
        ConfidenceOO m;
        m.Q = cfgdetail::beliefs_at(v.value("Q", json::array()), path + "/Q");
        m.theta = cfgdetail::number_or(v, "theta", 0.0);
        m.n = v.value("n", m.Q.empty() ? 0 : m.Q.front().size());
        if (m.n == 0) throw ConfigError(path + "/n", "state count required when Q is empty");
        if (m.theta < 0.0) throw ConfigError(path + "/theta", "theta must be nonnegative");
        return m;
    }
    if (type == "second_order_rm") {
        SecondOrderRM m{cfgdetail::beliefs_at(cfgdetail::require(v, "Q", path), path + "/Q"),
                        cfgdetail::phi_at(cfgdetail::require(v, "phi", path), path + "/phi")};
        if (m.Q.empty()) throw ConfigError(path + "/Q", "need at least one model");
        return m;
    }
    if (type == "smooth") {
        Smooth m{cfgdetail::beliefs_at(cfgdetail::require(v, "priors", path), path + "/priors"),
                 cfgdetail::require(v, "mu", path).get<std::vector<double>>(),
                 cfgdetail::phi_at(cfgdetail::require(v, "phi", path), path + "/phi")};
        if (m.priors.size() != m.mu.size() || m.priors.empty())
            throw ConfigError(path + "/mu", "mu must match priors and be nonempty");
        double sum = 0.0;
        for (double w : m.mu) sum += w;
        if (std::abs(sum - 1.0) > 1e-12) throw ConfigError(path + "/mu", "mixing weights must sum to 1");
        return m;
    }
    if (type == "variational_menu") {
        VariationalMenu m;
        const json& entries = cfgdetail::require(v, "entries", path);
        for (std::size_t i = 0; i < entries.size(); ++i) {
            const json& e = entries.at(i);
            const std::string epath = path + "/entries/" + std::to_string(i);
            MenuEntry entry;
            entry.belief = cfgdetail::belief_at(cfgdetail::require(e, "belief", epath), epath + "/belief");
            entry.cost = e.value("cost", 0.0);
            if (entry.cost < 0.0) throw ConfigError(epath + "/cost", "cost must be nonnegative");
            m.entries.push_back(std::move(entry));
        }
        if (m.entries.empty()) throw ConfigError(path + "/entries", "menu must be nonempty");
        return m;
    }
    throw ConfigError(path + "/type", "unknown model tag '" + type + "'");
}

struct ExperimentConfig {
    int version = 1;
    std::string command;
    std::uint64_t seed = 0;
    double tol = 1e-9;
    std::string out_dir;
    json raw;

    PropertyCheckConfig check_config(const Interval& K, std::size_t dim) const {
        PropertyCheckConfig cfg = PropertyCheckConfig::for_box(K, dim);
        cfg.seed = seed;
        cfg.tolerance = tol;
        if (raw.contains("check")) {
            const json& c = raw.at("check");
            cfg.sample_count = c.value("samples", cfg.sample_count);
            cfg.tolerance = c.value("tolerance", cfg.tolerance);
            cfg.dimension = c.value("dimension", cfg.dimension);
            cfg.act_lo = c.value("act_lo", cfg.act_lo);
            cfg.act_hi = c.value("act_hi", cfg.act_hi);
        }
        return cfg;
    }
};

/// Parses and validates a configuration file. Schema errors carry a
/// JSON-pointer-style location of the offending field.
inline ExperimentConfig parse_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("config file not found: " + path);
    json raw;
    try {
        in >> raw;
    } catch (const json::parse_error& ex) {
        throw std::runtime_error("config is not valid JSON: " + std::string(ex.what()));
    }

    ExperimentConfig cfg;
    cfg.raw = raw;
    const json& v = cfgdetail::require(raw, "version", "");
    if (!v.is_number_integer() || v.get<int>() != 1)
        throw ConfigError("/version", "unsupported config version (expected 1)");
    cfg.version = 1;
    cfg.command = cfgdetail::require(raw, "command", "").get<std::string>();
    static const std::vector<std::string> kCommands = {"eval", "audit", "dualize", "share", "repro"};
    if (std::find(kCommands.begin(), kCommands.end(), cfg.command) == kCommands.end())
        throw ConfigError("/command", "unknown command '" + cfg.command + "'");

    const bool sampling = cfg.command == "audit" || cfg.command == "share";
    if (raw.contains("seed")) {
        if (!raw.at("seed").is_number_unsigned() && !raw.at("seed").is_number_integer())
            throw ConfigError("/seed", "expected an unsigned integer");
        cfg.seed = raw.at("seed").get<std::uint64_t>();
    } else if (sampling) {
        throw ConfigError("/seed", "required for sampling command '" + cfg.command + "'");
    }
    cfg.tol = raw.value("tol", 1e-9);
    if (!(cfg.tol > 0.0)) throw ConfigError("/tol", "tolerance must be positive");
    cfg.out_dir = raw.value("out", "");

    // per-command structural validation up front, so errors surface at parse time
    if (cfg.command == "eval" || cfg.command == "audit" || cfg.command == "dualize") {
        model_from_json(cfgdetail::require(raw, "model", ""), "/model");
    }
    if (cfg.command == "eval") {
        const json& acts = cfgdetail::require(raw, "acts", "");
        if (!acts.is_array() || acts.empty()) throw ConfigError("/acts", "expected a nonempty array of acts");
    }
    if (cfg.command == "dualize") {
        const json& d = cfgdetail::require(raw, "dual", "");
        cfgdetail::number_at(d, "t_min", "/dual");
        cfgdetail::number_at(d, "t_max", "/dual");
        if (cfgdetail::require(d, "t_count", "/dual").get<int>() < 2)
            throw ConfigError("/dual/t_count", "need at least two grid points");
        cfgdetail::beliefs_at(cfgdetail::require(d, "beliefs", "/dual"), "/dual/beliefs");
    }
    if (cfg.command == "share") {
        const json& eco = cfgdetail::require(raw, "economy", "");
        const json& agents = cfgdetail::require(eco, "agents", "/economy");
        if (!agents.is_array() || agents.size() < 1)
            throw ConfigError("/economy/agents", "expected at least one agent");
        for (std::size_t i = 0; i < agents.size(); ++i) {
            const std::string apath = "/economy/agents/" + std::to_string(i);
            cfgdetail::require(agents.at(i), "name", apath);
            model_from_json(cfgdetail::require(agents.at(i), "model", apath), apath + "/model");
        }
        cfgdetail::require(eco, "endowments", "/economy");
        cfgdetail::number_at(eco, "aggregate", "/economy");
    }
    return cfg;
}

// ---------------------------------------------------------------------------
// Report serialization
// ---------------------------------------------------------------------------

inline json to_json(const PropertyWitness& w) {
    json j;
    j["act"] = w.act;
    if (!w.act2.empty()) j["act2"] = w.act2;
    j["shift"] = w.shift;
    j["scale"] = w.scale;
    j["lhs"] = w.lhs;
    j["rhs"] = w.rhs;
    j["gap"] = w.gap;
    return j;
}

inline json to_json(const AttitudeReport& r) {
    json j;
    j["property"] = to_string(r.property);
    j["strict"] = r.strict;
    j["verdict"] = r.consistent() ? "consistent" : "violated";
    j["samples_run"] = r.samples_run;
    json ws = json::array();
    for (const auto& w : r.witnesses) ws.push_back(to_json(w));
    j["witnesses"] = ws;
    return j;
}

struct RunResult {
    int exit_code = 0;
    json report;
    std::string summary;
};

namespace cfgdetail {

inline bool any_violation(const json& node) {
    if (node.is_object()) {
        if (node.contains("verdict") && node.at("verdict") == "violated") return true;
        for (const auto& [k, v] : node.items()) {
            (void)k;
            if (any_violation(v)) return true;
        }
    } else if (node.is_array()) {
        for (const auto& v : node)
            if (any_violation(v)) return true;
    }
    return false;
}

inline Economy economy_from_config(const ExperimentConfig& cfg, Interval K) {
    const json& eco = cfg.raw.at("economy");
    Economy e;
    e.aggregate = eco.at("aggregate").get<double>();
    const json& agents = eco.at("agents");
    const json& endowments = eco.at("endowments");
    if (endowments.size() != agents.size())
        throw ConfigError("/economy/endowments", "one endowment per agent required");
    for (std::size_t i = 0; i < agents.size(); ++i) {
        PreferenceModel m =
            model_from_json(agents.at(i).at("model"), "/economy/agents/" + std::to_string(i) + "/model");
        e.agents.push_back({agents.at(i).at("name").get<std::string>(), as_functional(m, K, cfg.tol)});
        e.endowments.push_back(endowments.at(i).get<std::vector<double>>());
    }
    try {
        e.validate();
    } catch (const std::exception& ex) {
        throw ConfigError("/economy", ex.what());
    }
    return e;
}

}  // namespace cfgdetail

inline json run_eval(const ExperimentConfig& cfg) {
    Interval K = cfg.raw.contains("utility")
                     ? interval_from_json(cfg.raw.at("utility"), "/utility")
                     : Interval::nonnegative();
    PreferenceModel model = model_from_json(cfg.raw.at("model"), "/model");
    json values = json::array();
    for (const auto& a : cfg.raw.at("acts")) {
        Act act = a.get<std::vector<double>>();
        values.push_back({{"act", act}, {"value", evaluate(model, act, K, cfg.tol)}});
    }
    return {{"values", values}};
}

inline json run_audit(const ExperimentConfig& cfg) {
    Interval K = cfg.raw.contains("utility")
                     ? interval_from_json(cfg.raw.at("utility"), "/utility")
                     : Interval::nonnegative();
    PreferenceModel model = model_from_json(cfg.raw.at("model"), "/model");
    std::size_t dim = model_dimension(model);
    if (dim == 0) dim = cfg.raw.value("check", json::object()).value("dimension", 2);
    PropertyCheckConfig check = cfg.check_config(K, dim);
    AttitudeClassification cls = classify_attitude(model, K, check);
    json j;
    j["absolute"] = to_string(cls.absolute);
    j["relative"] = to_string(cls.relative);
    j["checks"] = {to_json(cls.shift_super), to_json(cls.shift_sub), to_json(cls.scale_super),
                   to_json(cls.scale_sub)};
    return j;
}

inline json run_dualize(const ExperimentConfig& cfg, const std::string& out_dir) {
    Interval K = cfg.raw.contains("utility")
                     ? interval_from_json(cfg.raw.at("utility"), "/utility")
                     : Interval::closed(0.0, 1.0);
    PreferenceModel model = model_from_json(cfg.raw.at("model"), "/model");
    Functional T = as_functional(model, K, cfg.tol);
    const json& d = cfg.raw.at("dual");
    const int count = d.at("t_count").get<int>();
    const double t_min = d.at("t_min").get<double>(), t_max = d.at("t_max").get<double>();
    std::vector<double> t_grid(count);
    for (int i = 0; i < count; ++i)
        t_grid[i] = t_min + (t_max - t_min) * static_cast<double>(i) / (count - 1);
    std::vector<Belief> beliefs = cfgdetail::beliefs_at(d.at("beliefs"), "/dual/beliefs");
    DualGrid grid = build_dual_grid(T, K, t_grid, beliefs, cfg.tol);

    json j;
    if (!out_dir.empty()) {
        std::ofstream csv(out_dir + "/dual_grid.csv", std::ios::binary);
        write_dual_grid_csv(grid, csv);
        j["csv"] = out_dir + "/dual_grid.csv";
    }
    json checks = json::array();
    for (const auto& name : d.value("properties", std::vector<std::string>{})) {
        DualProperty prop;
        if (name == "shift_super") prop = DualProperty::shift_super;
        else if (name == "scale_super") prop = DualProperty::scale_super;
        else throw ConfigError("/dual/properties", "unknown property '" + name + "'");
        DualPropertyReport r = check_dual_properties(grid, prop, K, d.value("property_tol", 1e-6));
        checks.push_back({{"property", name},
                          {"verdict", r.passed ? "consistent" : "violated"},
                          {"min_gap", r.min_gap},
                          {"pairs_checked", r.pairs_checked},
                          {"pairs_excluded", r.pairs_excluded}});
    }
    j["checks"] = checks;
    return j;
}

inline json run_share(const ExperimentConfig& cfg) {
    Interval K = cfg.raw.contains("utility")
                     ? interval_from_json(cfg.raw.at("utility"), "/utility")
                     : Interval::closed(0.0, 1.0);
    Economy e = cfgdetail::economy_from_config(cfg, K);
    Allocation start{e.endowments};
    if (cfg.raw.contains("allocation"))
        start.bundles = cfg.raw.at("allocation").get<std::vector<std::vector<double>>>();

    ParetoSearchConfig search;
    search.seed = cfg.seed;
    if (cfg.raw.contains("search")) {
        const json& s = cfg.raw.at("search");
        search.grid_step = s.value("grid_step", search.grid_step);
        search.restarts = s.value("restarts", search.restarts);
        search.strict_margin = s.value("strict_margin", search.strict_margin);
    }

    json j;
    j["feasible"] = is_feasible(e, start);
    j["full_insurance"] = is_full_insurance(start, 1e-9);
    auto improvement = pareto_improve_search(e, start, search);
    if (improvement) {
        json bundles = json::array();
        for (const auto& b : improvement->allocation.bundles) bundles.push_back(b);
        json utilities = json::array();
        for (std::size_t i = 0; i < e.agents.size(); ++i)
            utilities.push_back(e.agents[i].utility(improvement->allocation.bundles[i]));
        j["improvement"] = {{"verdict", "violated"},  // efficiency refuted
                            {"bundles", bundles},
                            {"gains", improvement->gains},
                            {"utilities", utilities}};
    } else {
        j["improvement"] = {{"verdict", "consistent"}, {"note", "none found in budget"}};
    }
    if (j["full_insurance"].get<bool>()) {
        bool interior = true;
        for (const auto& b : start.bundles)
            for (double v : b)
                if (v <= 0.0) interior = false;
        if (interior) {
            SharedBeliefsReport sb = shared_beliefs_test(e, start, 1e-6, search);
            json beliefs = json::array();
            for (const auto& b : sb.beliefs) beliefs.push_back(b.weights());
            j["shared_beliefs"] = {{"beliefs", beliefs},
                                   {"intersection_nonempty", sb.intersection_nonempty},
                                   {"corollary_consistent", sb.corollary_consistent}};
        }
    }
    return j;
}

/// Reference values reproduced by the `repro` command: the betting example's
/// aggregator table and the two coefficient identities.
inline json run_repro(const ExperimentConfig& cfg, const std::string& out_dir) {
    DualSelfMax betting = make_betting_model();
    const Act half{0.5, 0.5}, bet{0.4, 0.6};
    auto H = [&](std::size_t i, const Act& a) { return aggregate(betting.aggregators[i], a); };
    Interval K = Interval::closed(0.0, 1.0);

    struct Row {
        std::string name;
        double computed, reference, tolerance;
    };
    std::vector<Row> rows = {
        {"H1((0.5,0.5))", H(0, half), 0.4, 1e-3},
        {"H2((0.5,0.5))", H(1, half), 0.5, 1e-3},
        {"H3((0.5,0.5))", H(2, half), 0.4, 1e-3},
        {"H1((0.4,0.6))", H(0, bet), 43.0 / 90.0, 1e-3},
        {"H2((0.4,0.6))", H(1, bet), 0.512, 1e-3},
        {"H3((0.4,0.6))", H(2, bet), 29.0 / 90.0, 1e-3},
        {"V((0.4,0.6))", evaluate(betting, bet, K, cfg.tol), 0.512, 1e-3},
        {"ara(sqrt, 2)", ara_coefficient(AmbiguityFunction::Sqrt(), 2.0), 0.25, 1e-10},
        {"rra(sqrt_plus_linear, 1)", rra_coefficient(AmbiguityFunction::SqrtPlusLinear(), 1.0),
         1.0 / 6.0, 1e-10},
    };

    json table = json::array();
    bool all_ok = true;
    double max_err = 0.0;
    for (const Row& r : rows) {
        double err = std::abs(r.computed - r.reference);
        bool ok = err <= r.tolerance;
        all_ok = all_ok && ok;
        max_err = std::max(max_err, err);
        table.push_back({{"name", r.name},
                         {"computed", r.computed},
                         {"reference", r.reference},
                         {"abs_error", err},
                         {"tolerance", r.tolerance},
                         {"verdict", ok ? "consistent" : "violated"}});
    }

    if (!out_dir.empty()) {
        std::ofstream csv(out_dir + "/repro_table.csv", std::ios::binary);
        csv.precision(17);
        csv << "name,computed,reference,abs_error,tolerance\r\n";
        for (const Row& r : rows)
            csv << "\"" << r.name << "\"," << r.computed << "," << r.reference << ","
                << std::abs(r.computed - r.reference) << "," << r.tolerance << "\r\n";

        std::vector<double> grid;
        for (int i = 0; i < 20; ++i) grid.push_back(0.5 + 0.25 * i);
        CoefficientCurve ara = ara_curve(AmbiguityFunction::Sqrt(), grid);
        CoefficientCurve rra = rra_curve(AmbiguityFunction::SqrtPlusLinear(), grid);
        std::ofstream curves(out_dir + "/coefficient_curves.csv", std::ios::binary);
        curves.precision(17);
        curves << "t,ara_sqrt,rra_sqrt_plus_linear\r\n";
        for (std::size_t i = 0; i < grid.size(); ++i)
            curves << grid[i] << "," << ara.values[i] << "," << rra.values[i] << "\r\n";
    }

    json j;
    j["table"] = table;
    j["matched_values"] = rows.size();
    j["max_abs_error"] = max_err;
    j["verdict"] = all_ok ? "consistent" : "violated";
    return j;
}

/// Executes a parsed configuration. Exit code 0 when every verdict is
/// consistent, 2 when any check reports a violation, 1 on errors (thrown).
inline RunResult run(const ExperimentConfig& cfg) {
    RunResult out;
    const std::string out_dir = cfg.out_dir;
    json body;
    if (cfg.command == "eval") body = run_eval(cfg);
    else if (cfg.command == "audit") body = run_audit(cfg);
    else if (cfg.command == "dualize") body = run_dualize(cfg, out_dir);
    else if (cfg.command == "share") body = run_share(cfg);
    else body = run_repro(cfg, out_dir);

    out.report["command"] = cfg.command;
    out.report["library_version"] = kLibraryVersion;
    out.report["seed"] = cfg.seed;
    out.report["config"] = cfg.raw;
    out.report["results"] = body;
    out.exit_code = cfgdetail::any_violation(body) ? 2 : 0;

    std::ostringstream summary;
    summary << "command " << cfg.command << ": "
            << (out.exit_code == 0 ? "all checks consistent" : "violations reported");
    out.summary = summary.str();
    return out;
}

}  // namespace ambiguity
