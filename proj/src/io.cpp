#include "patrol/io.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace patrol {

using nlohmann::json;

namespace {

const json& require_object(const json& doc, const std::string& where) {
    if (!doc.is_object()) throw ConfigError(where + " must be a JSON object");
    return doc;
}

template <typename T>
T get_number(const json& v, const std::string& key) {
    if (!v.is_number()) throw ConfigError("'" + key + "' must be a number");
    if constexpr (std::is_integral_v<T>) {
        if (!v.is_number_integer()) throw ConfigError("'" + key + "' must be an integer");
        if constexpr (std::is_unsigned_v<T>) {
            if (v.is_number_unsigned()) return v.get<T>();
            if (v.get<std::int64_t>() < 0) throw ConfigError("'" + key + "' must be nonnegative");
        }
    }
    return v.get<T>();
}

std::vector<int> int_list(const json& v, const std::string& key) {
    std::vector<int> out;
    if (v.is_number_integer()) {
        out.push_back(v.get<int>());
        return out;
    }
    if (!v.is_array()) throw ConfigError("'" + key + "' must be an integer or an array of integers");
    for (const auto& x : v) out.push_back(get_number<int>(x, key));
    return out;
}

void check_keys(const json& doc, std::initializer_list<const char*> allowed, const std::string& where) {
    for (const auto& item : doc.items()) {
        bool known = false;
        for (const char* k : allowed) known = known || item.key() == k;
        if (!known) throw ConfigError("unknown key '" + item.key() + "' in " + where);
    }
}

}  // namespace

ExperimentConfig parse_config(const json& doc) {
    require_object(doc, "config");
    check_keys(doc,
               {"case_id", "seed", "h_list", "runs", "draws", "policies", "solver", "out_dir", "topology_dir",
                "initial_indicators", "delta1_alpha", "delta2_alpha", "delta_beta", "oracle"},
               "config");
    ExperimentConfig cfg;
    if (doc.contains("case_id")) cfg.case_id = get_number<int>(doc["case_id"], "case_id");
    if (doc.contains("seed")) cfg.seed = get_number<std::uint64_t>(doc["seed"], "seed");
    if (doc.contains("h_list")) cfg.h_list = int_list(doc["h_list"], "h_list");
    if (doc.contains("runs")) cfg.runs = get_number<int>(doc["runs"], "runs");
    if (doc.contains("draws")) cfg.draws = get_number<int>(doc["draws"], "draws");
    if (doc.contains("policies")) {
        if (!doc["policies"].is_array()) throw ConfigError("'policies' must be an array of names");
        cfg.policies.clear();
        for (const auto& p : doc["policies"]) {
            if (!p.is_string()) throw ConfigError("'policies' entries must be strings");
            try {
                cfg.policies.push_back(parse_policy(p.get<std::string>()));
            } catch (const std::invalid_argument& e) {
                throw ConfigError(e.what());
            }
        }
    }
    if (doc.contains("solver")) {
        const json& s = require_object(doc["solver"], "'solver'");
        check_keys(s, {"max_iters", "tol", "window", "step_scale", "jitter", "parallel"}, "'solver'");
        if (s.contains("max_iters")) cfg.solver.max_iters = get_number<int>(s["max_iters"], "max_iters");
        if (s.contains("tol")) cfg.solver.tol = get_number<double>(s["tol"], "tol");
        if (s.contains("window")) cfg.solver.window = get_number<int>(s["window"], "window");
        if (s.contains("step_scale")) cfg.solver.step_scale = get_number<double>(s["step_scale"], "step_scale");
        if (s.contains("jitter")) cfg.solver.jitter = get_number<double>(s["jitter"], "jitter");
        if (s.contains("parallel")) {
            if (!s["parallel"].is_boolean()) throw ConfigError("'parallel' must be a boolean");
            cfg.solver.parallel = s["parallel"].get<bool>();
        }
    }
    if (doc.contains("out_dir")) {
        if (!doc["out_dir"].is_string()) throw ConfigError("'out_dir' must be a string");
        cfg.out_dir = doc["out_dir"].get<std::string>();
    }
    if (doc.contains("topology_dir")) {
        if (!doc["topology_dir"].is_string()) throw ConfigError("'topology_dir' must be a string");
        cfg.topology_dir = doc["topology_dir"].get<std::string>();
    }
    if (doc.contains("initial_indicators")) {
        const json& v = doc["initial_indicators"];
        if (v == "sampled")
            cfg.fixed_indicators = false;
        else if (v == "fixed")
            cfg.fixed_indicators = true;
        else
            throw ConfigError("'initial_indicators' must be \"sampled\" or \"fixed\"");
    }
    if (doc.contains("delta1_alpha")) cfg.delta1_alpha = int_list(doc["delta1_alpha"], "delta1_alpha");
    if (doc.contains("delta2_alpha")) cfg.delta2_alpha = int_list(doc["delta2_alpha"], "delta2_alpha");
    if (doc.contains("delta_beta")) cfg.delta_beta = int_list(doc["delta_beta"], "delta_beta");
    if (doc.contains("oracle")) {
        const json& o = require_object(doc["oracle"], "'oracle'");
        check_keys(o, {"instances", "runs", "horizon"}, "'oracle'");
        if (o.contains("instances")) cfg.oracle.instances = get_number<int>(o["instances"], "instances");
        if (o.contains("runs")) cfg.oracle.runs = get_number<int>(o["runs"], "oracle.runs");
        if (o.contains("horizon")) cfg.oracle.horizon = get_number<int>(o["horizon"], "oracle.horizon");
    }

    if (cfg.case_id != 6 && cfg.case_id != 10 && cfg.case_id != 14)
        throw ConfigError("'case_id' must be 6, 10 or 14");
    if (cfg.h_list.empty()) throw ConfigError("'h_list' must be nonempty");
    for (int h : cfg.h_list)
        if (h < 1) throw ConfigError("'h_list' entries must be positive");
    if (cfg.runs < 2) throw ConfigError("'runs' must be at least 2");
    if (cfg.draws < 1) throw ConfigError("'draws' must be positive");
    if (cfg.policies.empty()) throw ConfigError("'policies' must be nonempty");
    if (cfg.solver.max_iters < 1) throw ConfigError("'max_iters' must be positive");
    if (cfg.solver.window < 1) throw ConfigError("'window' must be positive");
    if (!(cfg.solver.tol >= 0.0) || !(cfg.solver.jitter >= 0.0)) throw ConfigError("'tol' and 'jitter' must be nonnegative");
    if (cfg.oracle.instances < 1 || cfg.oracle.runs < 2 || cfg.oracle.horizon < 1)
        throw ConfigError("'oracle' needs instances >= 1, runs >= 2 and horizon >= 1");
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("config file '" + path + "' is not valid JSON: " + e.what());
    }
    return parse_config(doc);
}

json config_to_json(const ExperimentConfig& cfg) {
    json doc;
    doc["case_id"] = cfg.case_id;
    doc["seed"] = cfg.seed;
    doc["h_list"] = cfg.h_list;
    doc["runs"] = cfg.runs;
    doc["draws"] = cfg.draws;
    json policies = json::array();
    for (auto p : cfg.policies) policies.push_back(to_string(p));
    doc["policies"] = policies;
    doc["solver"] = {{"max_iters", cfg.solver.max_iters}, {"tol", cfg.solver.tol},
                     {"window", cfg.solver.window},       {"step_scale", cfg.solver.step_scale},
                     {"jitter", cfg.solver.jitter},       {"parallel", cfg.solver.parallel}};
    doc["out_dir"] = cfg.out_dir;
    if (!cfg.topology_dir.empty()) doc["topology_dir"] = cfg.topology_dir;
    doc["initial_indicators"] = cfg.fixed_indicators ? "fixed" : "sampled";
    if (!cfg.delta1_alpha.empty()) doc["delta1_alpha"] = cfg.delta1_alpha;
    if (!cfg.delta2_alpha.empty()) doc["delta2_alpha"] = cfg.delta2_alpha;
    if (!cfg.delta_beta.empty()) doc["delta_beta"] = cfg.delta_beta;
    doc["oracle"] = {{"instances", cfg.oracle.instances}, {"runs", cfg.oracle.runs}, {"horizon", cfg.oracle.horizon}};
    return doc;
}

CrimeCase build_configured_case(const ExperimentConfig& cfg, std::uint64_t seed) {
    const std::string dir = cfg.topology_dir.empty() ? default_topology_dir() : cfg.topology_dir;
    CrimeCase c = build_case(cfg.case_id, seed, dir);
    const std::size_t pairs = static_cast<std::size_t>(c.params.areas * c.params.types);
    bool changed = false;
    auto apply = [&](const std::vector<int>& source, std::vector<int>& target, int lo, int hi, const char* name) {
        if (source.empty()) return;
        if (source.size() == 1)
            target.assign(pairs, source.front());
        else if (source.size() == pairs)
            target = source;
        else
            throw ConfigError(std::string("'") + name + "' must hold 1 or " + std::to_string(pairs) + " values");
        for (int v : target)
            if (v < lo || v > hi)
                throw ConfigError(std::string("'") + name + "' values must lie in " + std::to_string(lo) + ".." +
                                  std::to_string(hi));
        changed = true;
    };
    apply(cfg.delta1_alpha, c.params.delta1_alpha, 0, kCrimeTotal, "delta1_alpha");
    apply(cfg.delta2_alpha, c.params.delta2_alpha, 0, kCrimeTotal, "delta2_alpha");
    apply(cfg.delta_beta, c.params.delta_beta, 0, kCrimeTotal, "delta_beta");
    if (cfg.fixed_indicators) {
        c.params.indicator_init = fixed_indicator_probabilities(cfg.case_id);
        changed = true;
    }
    if (changed) c.instance = build_crime_instance(c.instance.topology, c.params);
    return c;
}

std::string fingerprint_hex(std::uint64_t fingerprint) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fingerprint));
    return buf;
}

json dual_to_json(const DualSolution& dual) {
    const auto& g = dual.gamma;
    json gamma = json::array();
    json values = json::array();
    for (int i = 0; i < g.areas; ++i) {
        json gi = json::array();
        json vi = json::array();
        for (int j = 0; j < g.types; ++j) {
            json gij = json::array();
            for (int t = 0; t < g.horizon; ++t) gij.push_back(g.at(i, j, t));
            gi.push_back(std::move(gij));
            const auto& sol = dual.values[static_cast<std::size_t>(i * g.types + j)];
            json vij = json::array();
            for (int s = 0; s < sol.states; ++s) {
                json row = json::array();
                for (int t = 0; t <= sol.horizon; ++t) row.push_back(sol.V(s, t));
                vij.push_back(std::move(row));
            }
            vi.push_back(std::move(vij));
        }
        gamma.push_back(std::move(gi));
        values.push_back(std::move(vi));
    }
    json doc;
    doc["areas"] = g.areas;
    doc["types"] = g.types;
    doc["horizon"] = g.horizon;
    doc["fingerprint"] = fingerprint_hex(dual.fingerprint);
    doc["lower_bound"] = dual.lower_bound;
    doc["jittered_value"] = dual.jittered_value;
    doc["jitter_scale"] = dual.jitter_scale;
    doc["iterations"] = dual.iterations;
    doc["residual"] = dual.residual;
    doc["gamma"] = std::move(gamma);
    doc["V"] = std::move(values);
    return doc;
}

DualSolution dual_from_json(const json& doc) {
    try {
        DualSolution d;
        const int I = doc.at("areas").get<int>();
        const int J = doc.at("types").get<int>();
        const int T = doc.at("horizon").get<int>();
        d.gamma = Multipliers(I, J, T);
        d.fingerprint = std::stoull(doc.at("fingerprint").get<std::string>(), nullptr, 16);
        d.lower_bound = doc.at("lower_bound").get<double>();
        d.jittered_value = doc.at("jittered_value").get<double>();
        d.jitter_scale = doc.at("jitter_scale").get<double>();
        d.iterations = doc.at("iterations").get<int>();
        d.residual = doc.at("residual").get<double>();
        const json& gamma = doc.at("gamma");
        const json& values = doc.at("V");
        for (int i = 0; i < I; ++i)
            for (int j = 0; j < J; ++j) {
                for (int t = 0; t < T; ++t) d.gamma.at(i, j, t) = gamma.at(i).at(j).at(t).get<double>();
                const json& vij = values.at(i).at(j);
                PairSolution sol;
                sol.states = static_cast<int>(vij.size());
                sol.horizon = T;
                sol.value.assign(static_cast<std::size_t>((T + 1) * sol.states), 0.0);
                for (int s = 0; s < sol.states; ++s)
                    for (int t = 0; t <= T; ++t)
                        sol.value[static_cast<std::size_t>(t * sol.states + s)] = vij.at(s).at(t).get<double>();
                d.values.push_back(std::move(sol));
            }
        return d;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed dual solution: ") + e.what());
    } catch (const std::logic_error& e) {
        throw ConfigError(std::string("malformed dual solution: ") + e.what());
    }
}

json indices_to_json(const IndexTable& table) {
    json eta = json::array();
    for (int i = 0; i < table.areas; ++i) {
        json ei = json::array();
        for (int o = 0; o < table.areas; ++o) {
            json eo = json::array();
            for (int j = 0; j < table.types; ++j) {
                const int S = table.states[static_cast<std::size_t>(i * table.types + j)];
                json ej = json::array();
                for (int s = 0; s < S; ++s) {
                    json row = json::array();
                    for (int t = 0; t < table.horizon; ++t) {
                        const double v = table.eta(i, o, j, s, t);
                        if (std::isinf(v))
                            row.push_back(nullptr);
                        else
                            row.push_back(v);
                    }
                    ej.push_back(std::move(row));
                }
                eo.push_back(std::move(ej));
            }
            ei.push_back(std::move(eo));
        }
        eta.push_back(std::move(ei));
    }
    json doc;
    doc["areas"] = table.areas;
    doc["types"] = table.types;
    doc["horizon"] = table.horizon;
    doc["fingerprint"] = fingerprint_hex(table.fingerprint);
    doc["eta"] = std::move(eta);  // eta[i][origin][j][s][t]; null outside the neighborhood
    return doc;
}

void write_text(const std::string& path, const std::string& text) {
    const std::filesystem::path p(path);
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary);
    if (!out) throw ConfigError("cannot write '" + path + "'");
    out << text;
    if (!out) throw ConfigError("failed writing '" + path + "'");
}

std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string format_number(double value) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::general, 12);
    return std::string(buf, res.ptr);
}

std::string runs_csv(int h, PolicyKind policy, const std::vector<EpisodeResult>& episodes) {
    std::string out = "h,policy,run_index,normalized_cost,feasible,adapted_fraction\n";
    for (std::size_t r = 0; r < episodes.size(); ++r) {
        const auto& e = episodes[r];
        out += std::to_string(h) + "," + to_string(policy) + "," + std::to_string(r) + "," +
               format_number(e.normalized_total_cost) + "," + (e.all_feasible() ? "1" : "0") + "," +
               format_number(e.adapted_fraction) + "\n";
    }
    return out;
}

std::string summary_csv_header() { return "h,policy,runs,mean,ci_halfwidth,lower_bound,deviation\n"; }

std::string summary_csv_row(int h, PolicyKind policy, const MonteCarloSummary& s) {
    return std::to_string(h) + "," + to_string(policy) + "," + std::to_string(s.runs) + "," + format_number(s.mean) +
           "," + format_number(s.ci_halfwidth) + "," + format_number(s.lower_bound) + "," +
           format_number(s.deviation) + "\n";
}

}  // namespace patrol
