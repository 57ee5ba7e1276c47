#include <doctest.h>

#include <stdexcept>

#include <sys/wait.h>

#include <clocale>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "patrol/commands.hpp"
#include "patrol/io.hpp"

using namespace patrol;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("patrol_test_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string(PATROL_CLI) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::vector<std::string> lines_of(const fs::path& p) {
    std::ifstream in(p);
    std::vector<std::string> out;
    for (std::string line; std::getline(in, line);) out.push_back(line);
    return out;
}

std::vector<std::string> split(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    for (std::string cell; std::getline(ss, cell, ',');) out.push_back(cell);
    return out;
}

fs::path write_config(const fs::path& dir, const json& doc) {
    const fs::path p = dir / "config.json";
    std::ofstream(p) << doc.dump();
    return p;
}

}  // namespace

TEST_SUITE("io") {

TEST_CASE("config defaults and overrides") {
    const ExperimentConfig d = parse_config(json::object());
    CHECK(d.case_id == 6);
    CHECK(d.seed == 1);
    CHECK(d.h_list == std::vector<int>{1, 5, 10, 20, 40});
    CHECK(d.runs == 200);
    CHECK(d.solver.max_iters == 20000);
    CHECK(!d.fixed_indicators);

    const ExperimentConfig c = parse_config(json::parse(R"({
        "case_id": 14, "seed": 9, "h_list": [2, 3], "policies": ["random", "index"],
        "solver": {"max_iters": 40, "parallel": false}, "initial_indicators": "fixed",
        "delta_beta": 2, "oracle": {"instances": 2}})"));
    CHECK(c.case_id == 14);
    CHECK(c.seed == 9);
    CHECK(c.h_list == std::vector<int>{2, 3});
    CHECK(c.policies == std::vector<PolicyKind>{PolicyKind::random, PolicyKind::index});
    CHECK(c.solver.max_iters == 40);
    CHECK(!c.solver.parallel);
    CHECK(c.fixed_indicators);
    CHECK(c.delta_beta == std::vector<int>{2});
    CHECK(c.oracle.instances == 2);
    CHECK(c.oracle.runs == 10000);

    const ExperimentConfig back = parse_config(config_to_json(c));
    CHECK(config_to_json(back) == config_to_json(c));
}

TEST_CASE("schema lists exactly the config keys") {
    const json schema = json::parse(read_text(PATROL_SCHEMA));
    ExperimentConfig cfg = parse_config(json::object());
    cfg.topology_dir = "x";
    cfg.delta1_alpha = cfg.delta2_alpha = cfg.delta_beta = {3};
    const json doc = config_to_json(cfg);
    std::vector<std::string> keys;
    for (const auto& item : doc.items()) {
        keys.push_back(item.key());
        CHECK(schema["properties"].contains(item.key()));
    }
    CHECK(keys.size() == schema["properties"].size());
    for (const auto& item : doc["solver"].items()) {
        CHECK(schema["properties"]["solver"]["properties"].contains(item.key()));
        CHECK(schema["properties"]["solver"]["properties"][item.key()]["default"] == item.value());
    }
    for (const auto& item : doc["oracle"].items())
        CHECK(schema["properties"]["oracle"]["properties"][item.key()]["default"] == item.value());
    CHECK(schema["properties"]["h_list"]["default"] == doc["h_list"]);
    CHECK(schema["properties"]["runs"]["default"] == doc["runs"]);
    CHECK(schema["properties"]["draws"]["default"] == doc["draws"]);
}

TEST_CASE("config errors") {
    const char* bad[] = {
        R"([1, 2])",
        R"({"case_id": 7})",
        R"({"unknown": 1})",
        R"({"runs": 1})",
        R"({"h_list": []})",
        R"({"h_list": [0]})",
        R"({"seed": -1})",
        R"({"seed": 1.5})",
        R"({"policies": ["optimal"]})",
        R"({"policies": "mai"})",
        R"({"solver": {"max_iters": 0}})",
        R"({"solver": {"speed": 1}})",
        R"({"solver": {"parallel": 1}})",
        R"({"initial_indicators": "uniform"})",
        R"({"oracle": {"runs": 1}})",
    };
    for (const char* text : bad) {
        CAPTURE(text);
        CHECK_THROWS_AS(parse_config(json::parse(text)), ConfigError);
    }
    ExperimentConfig cfg = parse_config(json::object());
    cfg.delta1_alpha = {1, 2};
    CHECK_THROWS_AS(build_configured_case(cfg, 1), ConfigError);
    cfg.delta1_alpha = {51};
    CHECK_THROWS_AS(build_configured_case(cfg, 1), ConfigError);
    CHECK_THROWS_AS(load_config("/nonexistent/config.json"), ConfigError);
    const fs::path dir = scratch("badjson");
    std::ofstream(dir / "c.json") << "{ not json";
    CHECK_THROWS_AS(load_config((dir / "c.json").string()), ConfigError);
}

TEST_CASE("overrides change the built instance") {
    ExperimentConfig cfg = parse_config(json::object());
    cfg.delta_beta = {5};
    const CrimeCase c = build_configured_case(cfg, 3);
    for (int v : c.params.delta_beta) CHECK(v == 5);
    CHECK(c.instance.fingerprint() != build_case(6, 3).instance.fingerprint());
    cfg.delta_beta.clear();
    CHECK(build_configured_case(cfg, 3).instance.fingerprint() == build_case(6, 3).instance.fingerprint());
}

TEST_CASE("dual solution JSON round trip") {
    ExperimentConfig cfg = parse_config(json::object());
    cfg.solver.max_iters = 30;
    const SolvedCase sc = solve_configured_case(cfg, 2);
    const json doc = dual_to_json(sc.dual);
    const DualSolution back = dual_from_json(json::parse(doc.dump()));
    CHECK(back.fingerprint == sc.dual.fingerprint);
    CHECK(back.lower_bound == sc.dual.lower_bound);
    CHECK(back.gamma.values == sc.dual.gamma.values);
    REQUIRE(back.values.size() == sc.dual.values.size());
    for (std::size_t p = 0; p < back.values.size(); ++p) CHECK(back.values[p].value == sc.dual.values[p].value);
    CHECK(dual_to_json(back) == doc);

    const IndexTable a = compute_indices(sc.crime.instance, back);
    CHECK(indices_to_json(a) == indices_to_json(sc.indices));

    json broken = doc;
    broken["gamma"].erase(0);
    CHECK_THROWS_AS(dual_from_json(broken), ConfigError);
    CHECK_THROWS_AS(dual_from_json(json::object()), ConfigError);
}

TEST_CASE("number formatting ignores the locale") {
    CHECK(format_number(0.5) == "0.5");
    CHECK(format_number(3836.19) == "3836.19");
    CHECK(format_number(1.0 / 3.0) == "0.333333333333");
    CHECK(format_number(-2.0) == "-2");
    const char* old = std::setlocale(LC_NUMERIC, nullptr);
    const std::string saved = old ? old : "C";
    if (std::setlocale(LC_NUMERIC, "de_DE.UTF-8")) CHECK(format_number(0.25) == "0.25");
    std::setlocale(LC_NUMERIC, saved.c_str());
    CHECK(fingerprint_hex(255) == "00000000000000ff");
}

TEST_CASE("CSV layout") {
    std::vector<EpisodeResult> eps(2);
    eps[0].normalized_total_cost = 10.5;
    eps[0].feasible = {1, 1};
    eps[1].normalized_total_cost = 11.0;
    eps[1].feasible = {1, 0};
    eps[1].adapted_fraction = 0.25;
    CHECK(runs_csv(5, PolicyKind::mai, eps) ==
          "h,policy,run_index,normalized_cost,feasible,adapted_fraction\n5,mai,0,10.5,1,0\n5,mai,1,11,0,0.25\n");
    MonteCarloSummary s;
    s.runs = 2;
    s.mean = 10.75;
    s.ci_halfwidth = 3.0;
    s.lower_bound = 10.0;
    s.deviation = 0.075;
    CHECK(summary_csv_header() == "h,policy,runs,mean,ci_halfwidth,lower_bound,deviation\n");
    CHECK(summary_csv_row(5, PolicyKind::greedy, s) == "5,greedy,2,10.75,3,10,0.075\n");
}

TEST_CASE("simulation seeds differ per instance and per h") {
    CHECK(simulation_seed(1, 5) == simulation_seed(1, 5));
    CHECK(simulation_seed(1, 5) != simulation_seed(1, 10));
    CHECK(simulation_seed(1, 5) != simulation_seed(2, 5));
}

TEST_CASE("sweep rows cover draws, h values and policies") {
    ExperimentConfig cfg = parse_config(json::parse(
        R"({"draws": 2, "h_list": [1, 3], "policies": ["mai", "greedy", "random"], "runs": 5, "solver": {"max_iters": 20}})"));
    const std::vector<SweepRow> rows = run_sweep(cfg);
    REQUIRE(rows.size() == 12);
    CHECK(rows[0].draw == 0);
    CHECK(rows[11].draw == 1);
    CHECK(rows[11].h == 3);
    CHECK(rows[11].policy == PolicyKind::random);
    for (const auto& r : rows) {
        CHECK(r.summary.runs == 5);
        CHECK(r.summary.infeasible_slots == 0);
    }
    // draws have their own bounds; policies of one draw share it
    CHECK(rows[0].summary.lower_bound == rows[5].summary.lower_bound);
    CHECK(rows[0].summary.lower_bound != rows[6].summary.lower_bound);
    const std::string csv = sweep_csv(rows);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 13);
}

}  // TEST_SUITE

TEST_SUITE("cli") {

TEST_CASE("solve then simulate") {
    const fs::path dir = scratch("cli");
    const fs::path out = dir / "out";
    const fs::path cfg = write_config(dir, {{"case_id", 6}, {"seed", 3}, {"solver", {{"max_iters", 50}}}, {"out_dir", out.string()}});
    const std::string base = "--config " + cfg.string();

    CHECK(run_cli("simulate " + base + " --h 2 --policy mai --runs 10") == 1);  // nothing solved yet

    REQUIRE(run_cli("solve " + base) == 0);
    const json dual = json::parse(std::ifstream(out / "dual.json"));
    CHECK(dual["gamma"].size() == 6);
    CHECK(dual["gamma"][0].size() == 2);
    CHECK(dual["gamma"][0][0].size() == 10);
    CHECK(dual["V"][0][0].size() == static_cast<std::size_t>(kCrimeStates));
    const json indices = json::parse(std::ifstream(out / "indices.json"));
    CHECK(indices["eta"].size() == 6);

    const std::string first = read_text((out / "dual.json").string());
    const std::string first_idx = read_text((out / "indices.json").string());
    REQUIRE(run_cli("solve " + base) == 0);
    CHECK(read_text((out / "dual.json").string()) == first);
    CHECK(read_text((out / "indices.json").string()) == first_idx);

    REQUIRE(run_cli("simulate " + base + " --h 2 --policy mai --runs 200") == 0);
    const auto runs = lines_of(out / "runs_mai_h2.csv");
    REQUIRE(runs.size() == 201);
    double sum = 0.0;
    for (std::size_t r = 1; r < runs.size(); ++r) {
        const auto cells = split(runs[r]);
        REQUIRE(cells.size() == 6);
        CHECK(cells[0] == "2");
        CHECK(cells[1] == "mai");
        CHECK(cells[2] == std::to_string(r - 1));
        CHECK(cells[4] == "1");
        sum += std::stod(cells[3]);
    }
    const auto summary = lines_of(out / "summary_mai_h2.csv");
    REQUIRE(summary.size() == 2);
    const auto s = split(summary[1]);
    REQUIRE(s.size() == 7);
    CHECK(s[2] == "200");
    const double mean = std::stod(s[3]);
    const double bound = std::stod(s[5]);
    CHECK(mean == doctest::Approx(sum / 200.0).epsilon(1e-9));
    CHECK(bound == doctest::Approx(dual["lower_bound"].get<double>()).epsilon(1e-11));
    CHECK(std::stod(s[6]) == doctest::Approx((mean - bound) / bound).epsilon(1e-9));

    const std::string sim = read_text((out / "runs_mai_h2.csv").string());
    REQUIRE(run_cli("simulate " + base + " --h 2 --policy mai --runs 200") == 0);
    CHECK(read_text((out / "runs_mai_h2.csv").string()) == sim);

    // artifacts of another seed are refused
    CHECK(run_cli("simulate " + base + " --seed 4 --h 2 --policy mai --runs 10") == 1);
}

TEST_CASE("errors map to exit status 1") {
    const fs::path dir = scratch("cli_errors");
    CHECK(run_cli("") == 1);
    CHECK(run_cli("fly") == 1);
    CHECK(run_cli("solve --config " + (dir / "missing.json").string()) == 1);
    const fs::path bad_topo = write_config(dir, {{"topology_dir", (dir / "nowhere").string()}, {"out_dir", dir.string()}});
    CHECK(run_cli("solve --config " + bad_topo.string()) == 1);
    CHECK(run_cli("simulate --out " + dir.string() + " --h 0") == 1);
    CHECK(run_cli("simulate --out " + dir.string() + " --policy optimal") == 1);
    CHECK(run_cli("solve --help") == 0);
}

TEST_CASE("sweep and oracle commands") {
    const fs::path dir = scratch("cli_sweep");
    const fs::path cfg = write_config(dir, {{"draws", 2},
                                            {"h_list", {1, 2}},
                                            {"runs", 4},
                                            {"policies", {"mai", "greedy"}},
                                            {"solver", {{"max_iters", 20}}},
                                            {"oracle", {{"instances", 2}, {"runs", 400}, {"horizon", 2}}},
                                            {"out_dir", dir.string()}});
    REQUIRE(run_cli("sweep --config " + cfg.string()) == 0);
    CHECK(lines_of(dir / "sweep.csv").size() == 1 + 2 * 2 * 2);

    REQUIRE(run_cli("oracle --config " + cfg.string()) == 0);
    const json report = json::parse(std::ifstream(dir / "oracle.json"));
    CHECK(report["instances"].size() == 2);
    CHECK(report["all_ok"] == true);
}

}  // TEST_SUITE
