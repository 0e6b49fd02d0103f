#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "revmax/analysis.hpp"
#include "revmax/experiment.hpp"
#include "revmax/graph_io.hpp"
#include "revmax/synth.hpp"
#include "revmax/version.hpp"

namespace {

using nlohmann::json;
using namespace revmax;

/// Instance file: { "graph": path, "campaigns": [...], "incentives":
/// {model-based or explicit "costs" matrix} }.
Instance load_instance(const std::filesystem::path& path, std::uint64_t seed) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open instance file " + path.string());
    }
    json j = json::parse(in);
    Instance instance;
    std::filesystem::path graph_path = j.at("graph").get<std::string>();
    if (!std::filesystem::exists(graph_path)) {
        graph_path = path.parent_path() / graph_path;
    }
    instance.graph = load_graph(graph_path);
    AdId id = 0;
    for (const auto& c : j.at("campaigns")) {
        instance.campaigns.emplace_back(id++, c.at("gamma").get<std::vector<double>>(),
                                        c.at("cpe").get<double>(), c.at("budget").get<double>());
    }
    const auto& inc = j.at("incentives");
    if (inc.contains("costs")) {
        std::vector<double> flat;
        for (const auto& row : inc.at("costs")) {
            const auto values = row.get<std::vector<double>>();
            if (values.size() != instance.graph.node_count()) {
                throw std::runtime_error("incentive cost row length does not match node count");
            }
            flat.insert(flat.end(), values.begin(), values.end());
        }
        instance.incentives = IncentiveTable::from_matrix(instance.campaigns.size(),
                                                          instance.graph.node_count(),
                                                          std::move(flat), SpreadSource::exact);
    } else {
        IncentiveModel model;
        const std::string kind = inc.value("model", std::string("linear"));
        if (kind == "linear") {
            model.kind = IncentiveKind::linear;
        } else if (kind == "constant") {
            model.kind = IncentiveKind::constant;
        } else if (kind == "sublinear") {
            model.kind = IncentiveKind::sublinear;
        } else if (kind == "superlinear") {
            model.kind = IncentiveKind::superlinear;
        } else {
            throw std::runtime_error("unknown incentive model '" + kind + "'");
        }
        model.alpha = inc.value("alpha", 0.1);
        SpreadSource source = SpreadSource::monte_carlo;
        const std::string source_name = inc.value("spread_source", std::string("monte-carlo"));
        if (source_name == "exact") {
            source = SpreadSource::exact;
        } else if (source_name == "out-degree") {
            source = SpreadSource::out_degree_proxy;
        } else if (source_name != "monte-carlo") {
            throw std::runtime_error("unknown spread_source '" + source_name + "'");
        }
        SingletonSpreadOptions options{inc.value("mc_runs", std::uint64_t{5000}), seed};
        instance.incentives =
            build_incentives(instance.graph, instance.campaigns, model, source, options);
    }
    return instance;
}

std::vector<NodeId> parse_seed_list(const Graph& graph, const std::string& list) {
    std::vector<NodeId> seeds;
    std::stringstream ss(list);
    std::string token;
    while (std::getline(ss, token, ',')) {
        if (token.empty()) {
            continue;
        }
        NodeId id = graph.id_of(token);
        if (id == kInvalidNode) {
            try {
                id = static_cast<NodeId>(std::stoul(token));
            } catch (...) {
                throw std::runtime_error("unknown node '" + token + "'");
            }
            if (id >= graph.node_count()) {
                throw std::runtime_error("node index " + token + " out of range");
            }
        }
        seeds.push_back(id);
    }
    return seeds;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"revmax: revenue-maximizing ads-to-seeds allocation on social graphs"};
    app.set_version_flag("--version", std::string(kLibraryVersion));
    app.require_subcommand(1);

    std::uint64_t seed_override = 0;
    bool seed_given = false;

    // run
    auto* run = app.add_subcommand("run", "Run an experiment config");
    std::string run_config;
    std::string run_output;
    run->add_option("config", run_config, "experiment config JSON")->required();
    run->add_option("--seed", seed_override, "override the config rng seed")
        ->each([&](const std::string&) { seed_given = true; });
    run->add_option("--output", run_output, "override the output directory");

    // validate
    auto* validate = app.add_subcommand("validate", "Validate a config and echo it normalized");
    std::string validate_config_path;
    validate->add_option("config", validate_config_path, "experiment config JSON")->required();

    // synth
    auto* synth = app.add_subcommand("synth", "Write a synthetic edge-list graph");
    std::string synth_kind_name_arg;
    std::string synth_out;
    SynthParams params;
    std::uint64_t synth_seed = 1;
    synth->add_option("kind", synth_kind_name_arg,
                      "star | chain | random-directed | two-community")
        ->required();
    synth->add_option("--out", synth_out, "output file")->required();
    synth->add_option("--nodes", params.nodes, "node count (leaves for star)");
    synth->add_option("--arcs", params.arcs, "arc count (random-directed)");
    synth->add_option("--nodes-b", params.nodes_b, "second community size");
    synth->add_option("--p-in", params.p_in, "intra-community arc probability");
    synth->add_option("--p-out", params.p_out, "cross-community arc probability");
    synth->add_option("--probability", params.probability, "influence probability per arc");
    synth->add_flag("--weighted-cascade", params.weighted_cascade,
                    "replace probabilities with 1/in-degree");
    synth->add_option("--seed", synth_seed, "rng seed");

    // analyze
    auto* analyze = app.add_subcommand("analyze", "Emit the theory report for an instance");
    std::string analyze_path;
    std::string analyze_out;
    bool analyze_tightness = false;
    double analyze_epsilon = 0.1;
    std::uint64_t analyze_seed = 1;
    analyze->add_option("instance", analyze_path, "instance JSON");
    analyze->add_flag("--tightness", analyze_tightness, "use the built-in tightness instance");
    analyze->add_option("--out", analyze_out, "write <out>.txt and <out>.json");
    analyze->add_option("--epsilon", analyze_epsilon, "epsilon for the sampled algorithms");
    analyze->add_option("--seed", analyze_seed, "rng seed");

    // oracle
    auto* oracle_cmd = app.add_subcommand("oracle", "Spread of a seed set (exact or Monte-Carlo)");
    std::string oracle_instance;
    std::string oracle_seeds;
    bool oracle_tightness = false;
    bool oracle_exact = false;
    std::uint64_t oracle_runs = 0;
    std::uint64_t oracle_ad = 0;
    std::uint64_t oracle_seed = 1;
    oracle_cmd->add_option("instance", oracle_instance, "instance JSON");
    oracle_cmd->add_flag("--tightness", oracle_tightness, "use the built-in tightness instance");
    oracle_cmd->add_option("--ad", oracle_ad, "ad index");
    oracle_cmd->add_option("--seeds", oracle_seeds, "comma-separated node labels or indices")
        ->required();
    oracle_cmd->add_flag("--exact", oracle_exact, "force exact enumeration");
    oracle_cmd->add_option("--mc", oracle_runs, "Monte-Carlo run count");
    oracle_cmd->add_option("--seed", oracle_seed, "rng seed");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) {
            ExperimentConfig config = validate_config(run_config);
            if (seed_given) {
                config.seed = seed_override;
            }
            if (!run_output.empty()) {
                config.output_dir = run_output;
            }
            const ExperimentOutcome outcome = run_experiment(config);
            std::cout << "wrote " << outcome.results_path.string() << " ("
                      << outcome.records.size() << " cells, " << outcome.failed_cells
                      << " failed)\n";
            return outcome.failed_cells == 0 ? 0 : 1;
        }
        if (*validate) {
            const ExperimentConfig config = ::revmax::validate_config(validate_config_path);
            std::cout << config_to_json(config) << "\n";
            return 0;
        }
        if (*synth) {
            const auto kind = synth_kind_from_name(synth_kind_name_arg);
            if (!kind) {
                std::cerr << "unknown graph kind '" << synth_kind_name_arg << "'\n";
                return 2;
            }
            Rng rng(synth_seed);
            synth_graph_file(synth_out, *kind, params, rng);
            std::cout << "wrote " << synth_out << "\n";
            return 0;
        }
        if (*analyze) {
            Instance instance = analyze_tightness ? make_tightness_instance()
                                                  : load_instance(analyze_path, analyze_seed);
            AllocatorConfig config;
            config.epsilon = analyze_epsilon;
            config.seed = analyze_seed;
            const BoundReport report = analyze_instance(instance, config);
            write_bound_report(report, std::cout);
            if (!analyze_out.empty()) {
                std::ofstream txt(analyze_out + ".txt");
                write_bound_report(report, txt);
                std::ofstream js(analyze_out + ".json");
                js << bound_report_json(report) << "\n";
                std::cout << "wrote " << analyze_out << ".txt and " << analyze_out << ".json\n";
            }
            return 0;
        }
        if (*oracle_cmd) {
            Instance instance = oracle_tightness ? make_tightness_instance()
                                                 : load_instance(oracle_instance, oracle_seed);
            if (oracle_ad >= instance.campaigns.size()) {
                std::cerr << "ad index out of range\n";
                return 2;
            }
            const auto seeds = parse_seed_list(instance.graph, oracle_seeds);
            const AdCampaign& campaign = instance.campaigns[oracle_ad];
            SpreadEstimate estimate;
            if (oracle_exact ||
                (oracle_runs == 0 && instance.graph.arc_count() <= kExactSpreadArcLimit)) {
                estimate = exact_spread(instance.graph, campaign, seeds);
            } else {
                const std::uint64_t runs = oracle_runs == 0 ? 10000 : oracle_runs;
                Rng rng(oracle_seed);
                estimate = mc_spread(instance.graph, campaign, seeds, runs, rng);
            }
            std::cout << "spread: " << estimate.value << "\nmethod: "
                      << (estimate.method == SpreadMethod::exact ? "exact" : "monte-carlo");
            if (estimate.method == SpreadMethod::monte_carlo) {
                std::cout << "\nruns: " << estimate.runs;
            }
            std::cout << "\n";
            return 0;
        }
    } catch (const ConfigError& e) {
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
