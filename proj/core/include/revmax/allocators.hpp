#pragma once

#include <iosfwd>
#include <optional>
#include <string_view>

#include "revmax/economics.hpp"
#include "revmax/rr.hpp"

namespace revmax {

enum class Algorithm { ca_greedy, cs_greedy, ti_carm, ti_csrm, pagerank_gr, pagerank_rr };

std::string_view algorithm_name(Algorithm a);
std::optional<Algorithm> algorithm_from_name(std::string_view name);

struct AllocatorConfig {
    Algorithm algorithm = Algorithm::ti_csrm;
    double epsilon = 0.1;
    double ell = 1.0;
    std::uint64_t window = 0; // 0 = full window (ti-csrm only)
    std::uint64_t seed = 1;
    SpreadOracle oracle = SpreadOracle::exact(); // exact algorithms
    bool lazy_evaluation = false;                // exact algorithms: CELF-style queue
    std::uint64_t pilot_size = 10000;            // RR sample sizing pilot

    void validate() const;
};

struct TraceRow {
    std::uint64_t iteration = 0;
    AdId ad = 0;
    NodeId node = kInvalidNode;
    bool accepted = false;
    double marginal_revenue = 0.0;
    double marginal_payment = 0.0;
    double payment_after = 0.0; // ad's payment estimate after the action
    std::uint64_t theta = 0;
    std::uint64_t latent_size = 0;
};

struct RunTrace {
    std::vector<TraceRow> rows;
    std::vector<std::uint64_t> final_theta;  // per ad
    std::vector<std::uint64_t> final_latent; // per ad
    std::vector<std::uint64_t> extension_rounds;
    double wall_seconds = 0.0;

    /// Sum of accepted marginal revenues; non-decreasing over iterations.
    double cumulative_revenue() const;

    /// Deterministic CSV of the rows; wall time is not part of it.
    void write_csv(std::ostream& out) const;
};

struct AllocatorResult {
    Allocation allocation;
    RunTrace trace;
};

/// Exact greedy, cost-agnostic: repeatedly adds the feasible (node, ad)
/// pair of maximum marginal revenue; infeasible argmax pairs leave the
/// ground set.
AllocatorResult ca_greedy(const Graph& graph, std::span<const AdCampaign> campaigns,
                          const IncentiveTable& incentives, const AllocatorConfig& config);

/// Exact greedy, cost-sensitive: selection key is marginal revenue per
/// marginal payment.
AllocatorResult cs_greedy(const Graph& graph, std::span<const AdCampaign> campaigns,
                          const IncentiveTable& incentives, const AllocatorConfig& config);

/// RR-backed cost-agnostic allocator with TIM-style sample sizing and
/// latent seed-set size growth.
AllocatorResult ti_carm(const Graph& graph, std::span<const AdCampaign> campaigns,
                        const IncentiveTable& incentives, const AllocatorConfig& config);

/// RR-backed cost-sensitive allocator; per-ad candidates come from the
/// windowed coverage-to-cost argmax.
AllocatorResult ti_csrm(const Graph& graph, std::span<const AdCampaign> campaigns,
                        const IncentiveTable& incentives, const AllocatorConfig& config);

enum class PageRankMode { gr, rr };

/// Baselines: per-ad candidate is the highest-ranked feasible unassigned
/// node in the ad-specific PageRank order; mode gr picks the cross-ad
/// winner by marginal revenue on the ad's RR sample, mode rr assigns in
/// round-robin ad order (ads without a feasible candidate are skipped).
AllocatorResult pagerank_baseline(const Graph& graph, std::span<const AdCampaign> campaigns,
                                  const IncentiveTable& incentives, const AllocatorConfig& config,
                                  PageRankMode mode);

AllocatorResult run_allocator(const Instance& instance, const AllocatorConfig& config);

/// Independent re-evaluation of an allocation's revenue (exact when the
/// graph is small enough, Monte-Carlo otherwise); reports record it next
/// to the selection-time estimate.
std::vector<double> reevaluate_revenue(const Graph& graph, std::span<const AdCampaign> campaigns,
                                       const Allocation& allocation, std::uint64_t mc_runs,
                                       std::uint64_t seed);

} // namespace revmax
