#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "revmax/allocators.hpp"
#include "revmax/economics.hpp"

namespace revmax {

struct CampaignSpec {
    std::vector<double> gamma;
    double cpe = 0.0;
    double budget = 0.0;
};

/// One experiment: a graph, a campaign list, an incentive model swept over
/// alpha, and a set of algorithms. Cells are the cartesian product of
/// algorithms and alphas (window values add cells for ti-csrm only).
struct ExperimentConfig {
    int schema_version = 1;
    std::string profile = "quality"; // quality: epsilon 0.1, scalability: 0.3
    std::filesystem::path graph_path;
    std::vector<CampaignSpec> campaigns;
    IncentiveKind incentive_kind = IncentiveKind::linear;
    std::vector<double> alphas;
    SpreadSource spread_source = SpreadSource::monte_carlo;
    std::uint64_t spread_mc_runs = 5000;
    std::vector<Algorithm> algorithms;
    double epsilon = 0.0; // 0 = profile default
    double ell = 1.0;
    std::vector<std::uint64_t> windows = {0}; // 0 = full window
    std::uint64_t seed = 1;
    std::uint64_t reevaluate_runs = 10000;
    std::filesystem::path output_dir = "out";
    bool parallel_cells = false;

    double effective_epsilon() const;
};

/// Aggregated validation failure; one message per problem found.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(std::vector<std::string> messages);
    const std::vector<std::string>& messages() const noexcept { return messages_; }

private:
    std::vector<std::string> messages_;
};

/// Parses and validates a config file; throws ConfigError with every
/// problem found. Defaults are filled in the returned config.
ExperimentConfig validate_config(const std::filesystem::path& path);
ExperimentConfig validate_config_text(const std::string& json_text);

/// Normalized JSON echo of a config (defaults applied, stable key order).
std::string config_to_json(const ExperimentConfig& config);

struct ResultRecord {
    std::string algorithm;
    double alpha = 0.0;
    std::uint64_t window = 0;
    bool failed = false;
    std::string error;
    double revenue_estimate = 0.0;    // selection-time estimator
    double revenue_reevaluated = 0.0; // independent exact/MC re-evaluation
    double total_seed_cost = 0.0;
    std::vector<std::size_t> seeds_per_ad;
    std::vector<std::uint64_t> theta_per_ad;
    double wall_seconds = 0.0;
    long memory_peak_kb = -1; // -1: facility unavailable
    std::string trace_file;
};

struct ExperimentOutcome {
    std::vector<ResultRecord> records;
    int failed_cells = 0;
    std::filesystem::path results_path;
};

/// Runs every cell, writes results.json, per-cell trace CSVs and
/// plot-ready tables under config.output_dir. Cell failures are recorded
/// and the run continues.
ExperimentOutcome run_experiment(const ExperimentConfig& config);

} // namespace revmax
