#pragma once

// Experiment configuration, JSON artifacts and CSV output.

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "patrol/crime.hpp"
#include "patrol/index.hpp"
#include "patrol/relaxed.hpp"
#include "patrol/simulator.hpp"

namespace patrol {

/// Invalid or unreadable configuration and artifact files.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct OracleConfig {
    int instances = 5;
    int runs = 10000;
    int horizon = 3;
};

struct ExperimentConfig {
    int case_id = 6;
    std::uint64_t seed = 1;
    std::vector<int> h_list{1, 5, 10, 20, 40};
    int runs = 200;
    int draws = 30;
    std::vector<PolicyKind> policies{PolicyKind::mai, PolicyKind::greedy};
    SolverOptions solver;
    std::string out_dir = "out";
    std::string topology_dir;          ///< empty selects the bundled data
    bool fixed_indicators = false;     ///< use the tabulated initial probabilities instead of sampling
    /// Optional overrides: empty, one global value, or one value per (i, j).
    std::vector<int> delta1_alpha;
    std::vector<int> delta2_alpha;
    std::vector<int> delta_beta;
    OracleConfig oracle;
};

ExperimentConfig parse_config(const nlohmann::json& doc);
/// Reads and validates a JSON config file; throws ConfigError.
ExperimentConfig load_config(const std::string& path);
nlohmann::json config_to_json(const ExperimentConfig& cfg);

/// Crime case of the config with `seed` in place of cfg.seed, overrides applied.
CrimeCase build_configured_case(const ExperimentConfig& cfg, std::uint64_t seed);

nlohmann::json dual_to_json(const DualSolution& dual);
/// Restores gamma, V and bookkeeping (sub-policy origins are not stored).
DualSolution dual_from_json(const nlohmann::json& doc);
nlohmann::json indices_to_json(const IndexTable& table);

std::string fingerprint_hex(std::uint64_t fingerprint);

/// Writes `text` to `path`, creating parent directories.
void write_text(const std::string& path, const std::string& text);
std::string read_text(const std::string& path);

/// Fixed "%.12g" formatting; '.' decimal separator regardless of locale.
std::string format_number(double value);

std::string runs_csv(int h, PolicyKind policy, const std::vector<EpisodeResult>& episodes);
std::string summary_csv_header();
std::string summary_csv_row(int h, PolicyKind policy, const MonteCarloSummary& summary);

}  // namespace patrol
