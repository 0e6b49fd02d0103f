#pragma once

#include <span>
#include <vector>

#include "revmax/graph.hpp"
#include "revmax/tic.hpp"

namespace revmax {

enum class IncentiveKind { linear, constant, sublinear, superlinear };

/// Seed-incentive generation rule: a monotone function of the node's
/// ad-specific singleton spread, scaled by alpha.
struct IncentiveModel {
    IncentiveKind kind = IncentiveKind::linear;
    double alpha = 0.1;

    void validate() const;
};

enum class SpreadSource { exact, monte_carlo, out_degree_proxy };

struct SingletonSpreadOptions {
    std::uint64_t mc_runs = 5000;
    std::uint64_t seed = 1;
};

/// Per-(ad, node) seed incentive costs.
class IncentiveTable {
public:
    IncentiveTable() = default;

    /// Costs laid out ad-major: costs[i * n + u]. All entries must be >= 0.
    static IncentiveTable from_matrix(std::size_t ads, NodeId nodes, std::vector<double> costs,
                                      SpreadSource provenance);

    std::size_t ad_count() const noexcept { return ads_; }
    NodeId node_count() const noexcept { return nodes_; }
    SpreadSource provenance() const noexcept { return provenance_; }

    double cost(AdId ad, NodeId u) const { return costs_[ad * nodes_ + u]; }
    std::span<const double> costs_for(AdId ad) const {
        return {costs_.data() + static_cast<std::size_t>(ad) * nodes_, nodes_};
    }

    double max_cost(AdId ad) const;
    double total_cost(AdId ad, std::span<const NodeId> seeds) const;

    /// Every advertiser can afford at least one seed:
    /// min_u c_i(u) <= min_j B_j for each ad i. Throws otherwise.
    void check_affordability(std::span<const AdCampaign> campaigns) const;

private:
    std::size_t ads_ = 0;
    NodeId nodes_ = 0;
    std::vector<double> costs_;
    SpreadSource provenance_ = SpreadSource::exact;
};

/// Builds the incentive table from singleton spreads:
///   linear      alpha * spread
///   constant    alpha * mean singleton spread of the ad
///   sublinear   alpha * ln(spread), requires spread >= 1
///   superlinear alpha * spread^2
IncentiveTable build_incentives(const Graph& graph, std::span<const AdCampaign> campaigns,
                                const IncentiveModel& model, SpreadSource source,
                                const SingletonSpreadOptions& options = {});

/// Ad-specific singleton spreads for every node under the given source.
std::vector<double> singleton_spreads(const Graph& graph, const AdCampaign& campaign,
                                      SpreadSource source, const SingletonSpreadOptions& options);

/// Ads-to-seeds allocation with per-ad accounting. Seed sets are pairwise
/// disjoint; payments respect budgets under the estimator used at
/// selection time.
struct Allocation {
    std::vector<std::vector<NodeId>> seed_sets; // selection order per ad
    std::vector<double> spread;                 // estimated spread per ad
    std::vector<double> revenue;                // cpe_i * spread_i
    std::vector<double> seed_cost;              // sum of incentives per ad
    std::vector<double> pay;                    // revenue_i + seed_cost_i

    explicit Allocation(std::size_t ads = 0)
        : seed_sets(ads), spread(ads, 0.0), revenue(ads, 0.0), seed_cost(ads, 0.0),
          pay(ads, 0.0) {}

    std::size_t ad_count() const noexcept { return seed_sets.size(); }
    double total_revenue() const;
    double total_seed_cost() const;
    std::size_t total_seeds() const;
    bool pairwise_disjoint() const;
    bool contains(NodeId u) const;
};

/// A full problem instance.
struct Instance {
    Graph graph;
    std::vector<AdCampaign> campaigns;
    IncentiveTable incentives;
};

/// Advertiser payment cpe_i * spread(S) + sum of seed incentives, with the
/// spread taken from the designated estimator.
double payment(const Graph& graph, const AdCampaign& campaign, const IncentiveTable& incentives,
               std::span<const NodeId> seeds, const SpreadOracle& oracle);

/// True iff u is unassigned everywhere and adding (u, ad) keeps ad's
/// payment within budget (non-strict, tolerance kBudgetTolerance).
bool is_feasible(const Instance& instance, const Allocation& allocation, NodeId u, AdId ad,
                 const SpreadOracle& oracle);

/// Checks that deleting any single (node, ad) pair keeps the allocation
/// feasible; property-test hook for the independence system.
bool downward_closure_check(const Instance& instance, const Allocation& allocation,
                            const SpreadOracle& oracle);

} // namespace revmax
