#include "revmax/experiment.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "revmax/graph_io.hpp"
#include "revmax/parallel.hpp"
#include "revmax/version.hpp"

#if defined(__unix__) || defined(__APPLE__)
#include <sys/resource.h>
#endif

namespace revmax {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

long memory_peak_kb() {
#if defined(__unix__) || defined(__APPLE__)
    rusage usage{};
    if (getrusage(RUSAGE_SELF, &usage) == 0) {
        return static_cast<long>(usage.ru_maxrss);
    }
#endif
    return -1;
}

const char* incentive_kind_name(IncentiveKind kind) {
    switch (kind) {
    case IncentiveKind::linear:
        return "linear";
    case IncentiveKind::constant:
        return "constant";
    case IncentiveKind::sublinear:
        return "sublinear";
    case IncentiveKind::superlinear:
        return "superlinear";
    }
    return "unknown";
}

const char* spread_source_name(SpreadSource source) {
    switch (source) {
    case SpreadSource::exact:
        return "exact";
    case SpreadSource::monte_carlo:
        return "monte-carlo";
    case SpreadSource::out_degree_proxy:
        return "out-degree";
    }
    return "unknown";
}

ExperimentConfig config_from_json(const json& j, std::vector<std::string>& errors) {
    ExperimentConfig config;
    auto fail = [&](const std::string& msg) { errors.push_back(msg); };

    config.schema_version = j.value("schema_version", 1);
    config.profile = j.value("profile", std::string("quality"));
    if (config.profile != "quality" && config.profile != "scalability") {
        fail("profile must be 'quality' or 'scalability', got '" + config.profile + "'");
    }

    if (!j.contains("graph")) {
        fail("missing 'graph' path");
    } else {
        config.graph_path = j.at("graph").get<std::string>();
    }

    if (!j.contains("campaigns") || !j.at("campaigns").is_array() || j.at("campaigns").empty()) {
        fail("'campaigns' must be a non-empty array");
    } else {
        std::size_t index = 0;
        for (const auto& c : j.at("campaigns")) {
            CampaignSpec spec;
            const std::string name = "campaign " + std::to_string(index);
            if (!c.contains("gamma") || !c.at("gamma").is_array() || c.at("gamma").empty()) {
                fail(name + ": missing topic distribution 'gamma'");
            } else {
                spec.gamma = c.at("gamma").get<std::vector<double>>();
                double sum = 0.0;
                for (double g : spec.gamma) {
                    sum += g;
                    if (g < 0.0) {
                        fail(name + ": negative gamma entry");
                    }
                }
                if (std::abs(sum - 1.0) > 1e-9) {
                    fail(name + ": gamma sums to " + std::to_string(sum) + ", expected 1");
                }
            }
            if (!c.contains("cpe")) {
                fail(name + ": missing 'cpe'");
            } else {
                spec.cpe = c.at("cpe").get<double>();
                if (!(spec.cpe > 0.0)) {
                    fail(name + ": cpe must be positive");
                }
            }
            if (!c.contains("budget")) {
                fail(name + ": missing 'budget'");
            } else {
                spec.budget = c.at("budget").get<double>();
                if (!(spec.budget > 0.0)) {
                    fail(name + ": budget must be positive");
                }
            }
            config.campaigns.push_back(std::move(spec));
            ++index;
        }
    }

    if (!j.contains("incentives")) {
        fail("missing 'incentives' section");
    } else {
        const auto& inc = j.at("incentives");
        const std::string model = inc.value("model", std::string("linear"));
        bool known = false;
        for (IncentiveKind k : {IncentiveKind::linear, IncentiveKind::constant,
                                IncentiveKind::sublinear, IncentiveKind::superlinear}) {
            if (model == incentive_kind_name(k)) {
                config.incentive_kind = k;
                known = true;
            }
        }
        if (!known) {
            fail("incentives: unknown model '" + model + "'");
        }
        if (inc.contains("alphas")) {
            config.alphas = inc.at("alphas").get<std::vector<double>>();
        } else if (inc.contains("alpha")) {
            config.alphas = {inc.at("alpha").get<double>()};
        } else {
            fail("incentives: provide 'alpha' or 'alphas'");
        }
        for (double a : config.alphas) {
            if (!(a > 0.0)) {
                fail("incentives: alpha values must be positive");
            }
        }
        const std::string source = inc.value("spread_source", std::string("monte-carlo"));
        known = false;
        for (SpreadSource s : {SpreadSource::exact, SpreadSource::monte_carlo,
                               SpreadSource::out_degree_proxy}) {
            if (source == spread_source_name(s)) {
                config.spread_source = s;
                known = true;
            }
        }
        if (!known) {
            fail("incentives: unknown spread_source '" + source + "'");
        }
        config.spread_mc_runs = inc.value("mc_runs", std::uint64_t{5000});
    }

    if (!j.contains("algorithms") || !j.at("algorithms").is_array() ||
        j.at("algorithms").empty()) {
        fail("'algorithms' must be a non-empty array");
    } else {
        for (const auto& a : j.at("algorithms")) {
            const std::string name = a.get<std::string>();
            if (auto alg = algorithm_from_name(name)) {
                config.algorithms.push_back(*alg);
            } else {
                fail("unknown algorithm '" + name + "'");
            }
        }
    }

    config.epsilon = j.value("epsilon", 0.0);
    if (config.epsilon != 0.0 && !(config.epsilon > 0.0 && config.epsilon < 1.0)) {
        fail("epsilon must lie in (0,1)");
    }
    config.ell = j.value("ell", 1.0);
    if (!(config.ell > 0.0)) {
        fail("ell must be positive");
    }
    if (j.contains("windows")) {
        config.windows = j.at("windows").get<std::vector<std::uint64_t>>();
    } else if (j.contains("window")) {
        config.windows = {j.at("window").get<std::uint64_t>()};
    }
    if (config.windows.empty()) {
        config.windows = {0};
    }
    config.seed = j.value("seed", std::uint64_t{1});
    config.reevaluate_runs = j.value("reevaluate_runs", std::uint64_t{10000});
    config.output_dir = j.value("output_dir", std::string("out"));
    config.parallel_cells = j.value("parallel_cells", false);
    return config;
}

} // namespace

double ExperimentConfig::effective_epsilon() const {
    if (epsilon != 0.0) {
        return epsilon;
    }
    return profile == "scalability" ? 0.3 : 0.1;
}

ConfigError::ConfigError(std::vector<std::string> messages)
    : std::runtime_error([&] {
          std::string joined = "config validation failed:";
          for (const auto& m : messages) {
              joined += "\n  - " + m;
          }
          return joined;
      }()),
      messages_(std::move(messages)) {}

ExperimentConfig validate_config_text(const std::string& json_text) {
    std::vector<std::string> errors;
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError({std::string("JSON parse error: ") + e.what()});
    }
    ExperimentConfig config = config_from_json(j, errors);
    if (!errors.empty()) {
        throw ConfigError(std::move(errors));
    }
    return config;
}

ExperimentConfig validate_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError({"cannot open config file " + path.string()});
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    ExperimentConfig config = validate_config_text(buffer.str());
    if (!std::filesystem::exists(config.graph_path)) {
        // graph paths may be relative to the config file
        const auto relative = path.parent_path() / config.graph_path;
        if (std::filesystem::exists(relative)) {
            config.graph_path = relative;
        } else {
            throw ConfigError({"graph file not found: " + config.graph_path.string()});
        }
    }
    return config;
}

std::string config_to_json(const ExperimentConfig& config) {
    ordered_json j;
    j["schema_version"] = config.schema_version;
    j["profile"] = config.profile;
    j["graph"] = config.graph_path.string();
    ordered_json campaigns = ordered_json::array();
    for (const auto& c : config.campaigns) {
        campaigns.push_back({{"gamma", c.gamma}, {"cpe", c.cpe}, {"budget", c.budget}});
    }
    j["campaigns"] = campaigns;
    j["incentives"] = {{"model", incentive_kind_name(config.incentive_kind)},
                       {"alphas", config.alphas},
                       {"spread_source", spread_source_name(config.spread_source)},
                       {"mc_runs", config.spread_mc_runs}};
    ordered_json algorithms = ordered_json::array();
    for (Algorithm a : config.algorithms) {
        algorithms.push_back(std::string(algorithm_name(a)));
    }
    j["algorithms"] = algorithms;
    j["epsilon"] = config.effective_epsilon();
    j["ell"] = config.ell;
    j["windows"] = config.windows;
    j["seed"] = config.seed;
    j["reevaluate_runs"] = config.reevaluate_runs;
    j["output_dir"] = config.output_dir.string();
    j["parallel_cells"] = config.parallel_cells;
    return j.dump(2);
}

namespace {

struct Cell {
    Algorithm algorithm;
    std::size_t alpha_index;
    std::uint64_t window;
};

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

} // namespace

ExperimentOutcome run_experiment(const ExperimentConfig& config) {
    const Graph graph = load_graph(config.graph_path);
    std::vector<AdCampaign> campaigns;
    for (std::size_t i = 0; i < config.campaigns.size(); ++i) {
        campaigns.emplace_back(static_cast<AdId>(i), config.campaigns[i].gamma,
                               config.campaigns[i].cpe, config.campaigns[i].budget);
    }

    std::filesystem::create_directories(config.output_dir / "cells");
    std::filesystem::create_directories(config.output_dir / "tables");

    // incentives depend on alpha only; build each table once
    std::vector<IncentiveTable> incentives_by_alpha;
    std::vector<std::string> incentive_errors(config.alphas.size());
    for (std::size_t ai = 0; ai < config.alphas.size(); ++ai) {
        try {
            IncentiveModel model{config.incentive_kind, config.alphas[ai]};
            SingletonSpreadOptions options{config.spread_mc_runs, config.seed};
            incentives_by_alpha.push_back(
                build_incentives(graph, campaigns, model, config.spread_source, options));
        } catch (const std::exception& e) {
            incentives_by_alpha.emplace_back();
            incentive_errors[ai] = e.what();
        }
    }

    std::vector<Cell> cells;
    for (Algorithm a : config.algorithms) {
        for (std::size_t ai = 0; ai < config.alphas.size(); ++ai) {
            if (a == Algorithm::ti_csrm) {
                for (std::uint64_t w : config.windows) {
                    cells.push_back({a, ai, w});
                }
            } else {
                cells.push_back({a, ai, config.windows.front()});
            }
        }
    }

    std::vector<ResultRecord> records(cells.size());
    auto run_cell = [&](std::size_t index) {
        const Cell& cell = cells[index];
        ResultRecord& record = records[index];
        record.algorithm = std::string(algorithm_name(cell.algorithm));
        record.alpha = config.alphas[cell.alpha_index];
        record.window = cell.window;
        char cellname[128];
        std::snprintf(cellname, sizeof(cellname), "%s_a%s%s%s", record.algorithm.c_str(),
                      format_double(record.alpha).c_str(),
                      cell.algorithm == Algorithm::ti_csrm ? "_w" : "",
                      cell.algorithm == Algorithm::ti_csrm ? std::to_string(cell.window).c_str()
                                                           : "");
        try {
            if (!incentive_errors[cell.alpha_index].empty()) {
                throw std::runtime_error(incentive_errors[cell.alpha_index]);
            }
            AllocatorConfig ac;
            ac.algorithm = cell.algorithm;
            ac.epsilon = config.effective_epsilon();
            ac.ell = config.ell;
            ac.window = cell.window;
            // cells of the same alpha share a stream so paired algorithms
            // see identical samples
            ac.seed = derive_seed(config.seed, {cell.alpha_index, cell.window});
            ac.oracle = graph.arc_count() <= kExactSpreadArcLimit
                            ? SpreadOracle::exact()
                            : SpreadOracle::monte_carlo(config.reevaluate_runs, ac.seed);
            Instance instance{graph, campaigns, incentives_by_alpha[cell.alpha_index]};
            const AllocatorResult result = run_allocator(instance, ac);

            record.revenue_estimate = result.allocation.total_revenue();
            const auto reevaluated = reevaluate_revenue(graph, campaigns, result.allocation,
                                                        config.reevaluate_runs, config.seed);
            for (double r : reevaluated) {
                record.revenue_reevaluated += r;
            }
            record.total_seed_cost = result.allocation.total_seed_cost();
            for (const auto& seeds : result.allocation.seed_sets) {
                record.seeds_per_ad.push_back(seeds.size());
            }
            record.theta_per_ad = result.trace.final_theta;
            record.wall_seconds = result.trace.wall_seconds;
            record.memory_peak_kb = memory_peak_kb();
            record.trace_file = std::string("cells/") + cellname + ".csv";
            std::ofstream trace(config.output_dir / record.trace_file);
            result.trace.write_csv(trace);
        } catch (const std::exception& e) {
            record.failed = true;
            record.error = e.what();
        }
    };

    if (config.parallel_cells) {
        parallel_for_chunks(cells.size(), 1, [&](std::uint64_t c, std::uint64_t, std::uint64_t) {
            run_cell(static_cast<std::size_t>(c));
        });
    } else {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            run_cell(i);
        }
    }

    ExperimentOutcome outcome;
    outcome.records = std::move(records);
    for (const auto& r : outcome.records) {
        if (r.failed) {
            ++outcome.failed_cells;
        }
    }

    // results document
    ordered_json doc;
    doc["schema_version"] = 1;
    doc["library_version"] = kLibraryVersion;
    doc["rng_algorithm"] = kRngAlgorithm;
    doc["config"] = json::parse(config_to_json(config));
    ordered_json cells_json = ordered_json::array();
    for (const auto& r : outcome.records) {
        ordered_json c;
        c["algorithm"] = r.algorithm;
        c["alpha"] = r.alpha;
        c["window"] = r.window;
        c["failed"] = r.failed;
        if (r.failed) {
            c["error"] = r.error;
        } else {
            c["revenue_estimate"] = r.revenue_estimate;
            c["revenue_reevaluated"] = r.revenue_reevaluated;
            c["total_seed_cost"] = r.total_seed_cost;
            c["seeds_per_ad"] = r.seeds_per_ad;
            c["theta_per_ad"] = r.theta_per_ad;
            c["wall_seconds"] = r.wall_seconds;
            c["memory_peak_kb"] = r.memory_peak_kb;
            c["memory_peak_is_process_wide"] = true;
            c["trace_file"] = r.trace_file;
        }
        cells_json.push_back(c);
    }
    doc["cells"] = cells_json;
    outcome.results_path = config.output_dir / "results.json";
    {
        std::ofstream out(outcome.results_path);
        out << doc.dump(2) << "\n";
    }

    // plot-ready tables
    {
        std::ofstream rev(config.output_dir / "tables/alpha_vs_revenue.tsv");
        std::ofstream cost(config.output_dir / "tables/alpha_vs_cost.tsv");
        std::map<std::string, std::map<double, const ResultRecord*>> by_algorithm;
        for (const auto& r : outcome.records) {
            if (!r.failed) {
                std::string key = r.algorithm;
                if (r.algorithm == "ti-csrm" && config.windows.size() > 1) {
                    key += "(w=" + std::to_string(r.window) + ")";
                }
                by_algorithm[key][r.alpha] = &r;
            }
        }
        rev << "alpha";
        cost << "alpha";
        for (const auto& [name, _] : by_algorithm) {
            rev << '\t' << name;
            cost << '\t' << name;
        }
        rev << '\n';
        cost << '\n';
        std::vector<double> alphas = config.alphas;
        std::sort(alphas.begin(), alphas.end());
        for (double a : alphas) {
            rev << format_double(a);
            cost << format_double(a);
            for (const auto& [name, per_alpha] : by_algorithm) {
                const auto it = per_alpha.find(a);
                rev << '\t' << (it != per_alpha.end() ? format_double(it->second->revenue_reevaluated) : "nan");
                cost << '\t' << (it != per_alpha.end() ? format_double(it->second->total_seed_cost) : "nan");
            }
            rev << '\n';
            cost << '\n';
        }
    }
    {
        std::ofstream tw(config.output_dir / "tables/time_vs_revenue.tsv");
        tw << "algorithm\twindow\talpha\twall_seconds\trevenue\n";
        for (const auto& r : outcome.records) {
            if (!r.failed) {
                tw << r.algorithm << '\t' << r.window << '\t' << format_double(r.alpha) << '\t'
                   << format_double(r.wall_seconds) << '\t'
                   << format_double(r.revenue_reevaluated) << '\n';
            }
        }
    }
    return outcome;
}

} // namespace revmax
