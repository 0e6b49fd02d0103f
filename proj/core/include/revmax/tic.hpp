#pragma once

#include <span>
#include <vector>

#include "revmax/graph.hpp"
#include "revmax/rng.hpp"

namespace revmax {

/// Enumeration budget for exact_spread: 2^25 live/blocked combinations.
inline constexpr ArcId kExactSpreadArcLimit = 25;

/// One sampled deterministic graph: every arc is either live or blocked.
struct PossibleWorld {
    const Graph* graph = nullptr;
    std::vector<std::uint8_t> live; // per arc id

    bool is_live(ArcId a) const { return live[a] != 0; }
    std::size_t live_count() const;

    /// Nodes reachable from the seed set via live arcs (includes seeds).
    std::vector<NodeId> reachable_from(std::span<const NodeId> seeds) const;
};

enum class SpreadMethod { exact, monte_carlo };

struct SpreadEstimate {
    double value = 0.0;
    SpreadMethod method = SpreadMethod::exact;
    std::uint64_t runs = 0; // monte-carlo only
    std::size_t seed_count = 0;
};

/// Samples a possible world: each arc live independently with its
/// ad-specific probability.
PossibleWorld sample_possible_world(const Graph& graph, const AdCampaign& campaign, Rng& rng);

/// Monte-Carlo spread: average reachable-node count over `runs` sampled
/// worlds. Runs are split into fixed chunks with derived RNG streams and
/// combined by exact integer summation in chunk order, so the result is
/// reproducible for a given rng state regardless of thread count.
SpreadEstimate mc_spread(const Graph& graph, const AdCampaign& campaign,
                         std::span<const NodeId> seeds, std::uint64_t runs, Rng& rng);

SpreadEstimate mc_spread_resolved(const Graph& graph, std::span<const double> arc_probabilities,
                                  std::span<const NodeId> seeds, std::uint64_t runs, Rng& rng);

/// Exact expected spread by enumerating live/blocked arc combinations,
/// branching only on arcs whose source has been reached (arcs that cannot
/// affect the outcome integrate out). Refuses graphs with more than
/// kExactSpreadArcLimit arcs; use mc_spread there instead.
SpreadEstimate exact_spread(const Graph& graph, const AdCampaign& campaign,
                            std::span<const NodeId> seeds);

double exact_spread_resolved(const Graph& graph, std::span<const double> arc_probabilities,
                             std::span<const NodeId> seeds);

/// Spread-oracle configuration for the exact allocators and incentive
/// construction. Monte-Carlo queries derive their stream from
/// (seed, campaign id, key1, key2), which makes results independent of
/// query order.
struct SpreadOracle {
    enum class Kind { exact, monte_carlo };

    Kind kind = Kind::exact;
    std::uint64_t runs = 10000;
    std::uint64_t seed = 1;

    static SpreadOracle exact() { return {Kind::exact, 0, 0}; }
    static SpreadOracle monte_carlo(std::uint64_t runs, std::uint64_t seed) {
        return {Kind::monte_carlo, runs, seed};
    }

    double spread(const Graph& graph, const AdCampaign& campaign, std::span<const NodeId> seeds,
                  std::uint64_t key1 = 0, std::uint64_t key2 = 0) const;

    double spread_resolved(const Graph& graph, std::span<const double> arc_probabilities,
                           const AdCampaign& campaign, std::span<const NodeId> seeds,
                           std::uint64_t key1 = 0, std::uint64_t key2 = 0) const;
};

} // namespace revmax
