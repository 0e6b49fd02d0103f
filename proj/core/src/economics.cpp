#include "revmax/economics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace revmax {

void IncentiveModel::validate() const {
    if (!(alpha > 0.0)) {
        throw std::invalid_argument("incentive model: alpha must be positive");
    }
}

IncentiveTable IncentiveTable::from_matrix(std::size_t ads, NodeId nodes,
                                           std::vector<double> costs, SpreadSource provenance) {
    if (costs.size() != ads * static_cast<std::size_t>(nodes)) {
        throw std::invalid_argument("incentive table: matrix size mismatch");
    }
    for (double c : costs) {
        if (!(c >= 0.0)) {
            throw std::invalid_argument("incentive table: negative cost " + std::to_string(c));
        }
    }
    IncentiveTable t;
    t.ads_ = ads;
    t.nodes_ = nodes;
    t.costs_ = std::move(costs);
    t.provenance_ = provenance;
    return t;
}

double IncentiveTable::max_cost(AdId ad) const {
    double best = 0.0;
    for (NodeId u = 0; u < nodes_; ++u) {
        best = std::max(best, cost(ad, u));
    }
    return best;
}

double IncentiveTable::total_cost(AdId ad, std::span<const NodeId> seeds) const {
    double total = 0.0;
    for (NodeId u : seeds) {
        total += cost(ad, u);
    }
    return total;
}

void IncentiveTable::check_affordability(std::span<const AdCampaign> campaigns) const {
    double min_budget = std::numeric_limits<double>::infinity();
    for (const AdCampaign& c : campaigns) {
        min_budget = std::min(min_budget, c.budget);
    }
    for (AdId i = 0; i < ads_; ++i) {
        double cheapest = std::numeric_limits<double>::infinity();
        for (NodeId u = 0; u < nodes_; ++u) {
            cheapest = std::min(cheapest, cost(i, u));
        }
        if (nodes_ > 0 && cheapest > min_budget) {
            throw std::runtime_error("incentive table: ad " + std::to_string(i) +
                                     " cannot afford any seed (cheapest incentive " +
                                     std::to_string(cheapest) + ")");
        }
    }
}

std::vector<double> singleton_spreads(const Graph& graph, const AdCampaign& campaign,
                                      SpreadSource source, const SingletonSpreadOptions& options) {
    const NodeId n = graph.node_count();
    std::vector<double> spreads(n, 0.0);
    switch (source) {
    case SpreadSource::out_degree_proxy:
        for (NodeId u = 0; u < n; ++u) {
            spreads[u] = static_cast<double>(graph.out_degree(u));
        }
        break;
    case SpreadSource::exact: {
        const auto probs = resolve_probabilities(graph, campaign);
        for (NodeId u = 0; u < n; ++u) {
            const NodeId seed[1] = {u};
            spreads[u] = exact_spread_resolved(graph, probs, seed);
        }
        break;
    }
    case SpreadSource::monte_carlo: {
        const auto probs = resolve_probabilities(graph, campaign);
        for (NodeId u = 0; u < n; ++u) {
            const NodeId seed[1] = {u};
            Rng rng = Rng::stream(options.seed, {campaign.id, u});
            spreads[u] = mc_spread_resolved(graph, probs, seed, options.mc_runs, rng).value;
        }
        break;
    }
    }
    return spreads;
}

IncentiveTable build_incentives(const Graph& graph, std::span<const AdCampaign> campaigns,
                                const IncentiveModel& model, SpreadSource source,
                                const SingletonSpreadOptions& options) {
    model.validate();
    const NodeId n = graph.node_count();
    std::vector<double> costs(campaigns.size() * static_cast<std::size_t>(n), 0.0);
    for (std::size_t i = 0; i < campaigns.size(); ++i) {
        const auto spreads = singleton_spreads(graph, campaigns[i], source, options);
        double* row = costs.data() + i * n;
        switch (model.kind) {
        case IncentiveKind::linear:
            for (NodeId u = 0; u < n; ++u) {
                row[u] = model.alpha * spreads[u];
            }
            break;
        case IncentiveKind::constant: {
            double mean = 0.0;
            for (double s : spreads) {
                mean += s;
            }
            mean = n > 0 ? mean / static_cast<double>(n) : 0.0;
            for (NodeId u = 0; u < n; ++u) {
                row[u] = model.alpha * mean;
            }
            break;
        }
        case IncentiveKind::sublinear:
            for (NodeId u = 0; u < n; ++u) {
                if (spreads[u] < 1.0) {
                    throw std::invalid_argument(
                        "sublinear incentives: singleton spread " + std::to_string(spreads[u]) +
                        " below 1 for node " + std::to_string(u) + " would give a negative cost");
                }
                row[u] = model.alpha * std::log(spreads[u]);
            }
            break;
        case IncentiveKind::superlinear:
            for (NodeId u = 0; u < n; ++u) {
                row[u] = model.alpha * spreads[u] * spreads[u];
            }
            break;
        }
    }
    auto table = IncentiveTable::from_matrix(campaigns.size(), n, std::move(costs), source);
    table.check_affordability(campaigns);
    return table;
}

double Allocation::total_revenue() const {
    double total = 0.0;
    for (double r : revenue) {
        total += r;
    }
    return total;
}

double Allocation::total_seed_cost() const {
    double total = 0.0;
    for (double c : seed_cost) {
        total += c;
    }
    return total;
}

std::size_t Allocation::total_seeds() const {
    std::size_t total = 0;
    for (const auto& s : seed_sets) {
        total += s.size();
    }
    return total;
}

bool Allocation::pairwise_disjoint() const {
    std::vector<NodeId> all;
    for (const auto& s : seed_sets) {
        all.insert(all.end(), s.begin(), s.end());
    }
    std::sort(all.begin(), all.end());
    return std::adjacent_find(all.begin(), all.end()) == all.end();
}

bool Allocation::contains(NodeId u) const {
    for (const auto& s : seed_sets) {
        if (std::find(s.begin(), s.end(), u) != s.end()) {
            return true;
        }
    }
    return false;
}

double payment(const Graph& graph, const AdCampaign& campaign, const IncentiveTable& incentives,
               std::span<const NodeId> seeds, const SpreadOracle& oracle) {
    if (seeds.empty()) {
        return 0.0;
    }
    const double spread = oracle.spread(graph, campaign, seeds, 0, seeds.size());
    return campaign.cpe * spread + incentives.total_cost(campaign.id, seeds);
}

bool is_feasible(const Instance& instance, const Allocation& allocation, NodeId u, AdId ad,
                 const SpreadOracle& oracle) {
    if (allocation.contains(u)) {
        return false;
    }
    std::vector<NodeId> extended = allocation.seed_sets[ad];
    extended.push_back(u);
    const double rho =
        payment(instance.graph, instance.campaigns[ad], instance.incentives, extended, oracle);
    return rho <= instance.campaigns[ad].budget + kBudgetTolerance;
}

bool downward_closure_check(const Instance& instance, const Allocation& allocation,
                            const SpreadOracle& oracle) {
    for (AdId i = 0; i < allocation.ad_count(); ++i) {
        const auto& seeds = allocation.seed_sets[i];
        for (std::size_t drop = 0; drop < seeds.size(); ++drop) {
            std::vector<NodeId> reduced;
            reduced.reserve(seeds.size() - 1);
            for (std::size_t k = 0; k < seeds.size(); ++k) {
                if (k != drop) {
                    reduced.push_back(seeds[k]);
                }
            }
            const double rho =
                payment(instance.graph, instance.campaigns[i], instance.incentives, reduced, oracle);
            if (rho > instance.campaigns[i].budget + kBudgetTolerance) {
                return false;
            }
        }
    }
    return true;
}

} // namespace revmax
