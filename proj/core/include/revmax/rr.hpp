#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "revmax/graph.hpp"
#include "revmax/rng.hpp"

namespace revmax {

/// Nodes that can reach `target` in one sampled world. The target is
/// always a member.
struct RRSet {
    NodeId target = kInvalidNode;
    std::vector<NodeId> members; // sorted ascending
};

/// Reverse-reachable sampler with reusable scratch space; one instance per
/// (graph, ad) pair, not thread-safe.
class RRSampler {
public:
    RRSampler(const Graph& graph, const AdCampaign& campaign);
    RRSampler(const Graph& graph, std::span<const double> arc_probabilities);

    RRSet sample(Rng& rng);

private:
    const Graph& graph_;
    std::vector<double> owned_probs_;
    std::span<const double> probs_;
    std::vector<std::uint32_t> mark_;
    std::uint32_t epoch_ = 0;
    std::vector<NodeId> queue_;
};

RRSet sample_rr_set(const Graph& graph, const AdCampaign& campaign, Rng& rng);

/// Per-ad collection of RR sets with a coverage index. Removed sets stay
/// in place (flag-marked): spread estimation needs coverage over all theta
/// sets while seed selection needs alive coverage only.
class RRSample {
public:
    RRSample() = default;
    RRSample(AdId ad, NodeId node_count);

    AdId ad() const noexcept { return ad_; }
    NodeId node_count() const noexcept { return n_; }

    /// Total RR sets ever sampled (alive + removed).
    std::uint64_t theta() const noexcept { return targets_.size(); }
    std::uint64_t alive_count() const noexcept { return alive_count_; }

    NodeId target_of(std::uint64_t i) const { return targets_[i]; }
    std::span<const NodeId> members_of(std::uint64_t i) const {
        return {members_.data() + offsets_[i], members_.data() + offsets_[i + 1]};
    }
    bool alive_at(std::uint64_t i) const { return alive_[i] != 0; }

    std::uint64_t alive_coverage(NodeId u) const { return alive_cov_[u]; }
    std::span<const std::uint64_t> alive_coverages() const { return alive_cov_; }
    std::span<const std::uint32_t> sets_containing(NodeId u) const { return cover_[u]; }

    void insert(const RRSet& set);

    /// Marks all alive sets containing `node` as removed and updates the
    /// alive-coverage counts of their members. Returns the number removed.
    std::uint64_t remove_covered(NodeId node);

    /// Recounts alive coverage from scratch and compares with the
    /// incremental counters; test hook.
    bool coverage_consistent() const;

private:
    AdId ad_ = 0;
    NodeId n_ = 0;
    std::vector<NodeId> targets_;
    std::vector<std::uint64_t> offsets_{0};
    std::vector<NodeId> members_;
    std::vector<std::uint8_t> alive_;
    std::vector<std::vector<std::uint32_t>> cover_;
    std::vector<std::uint64_t> alive_cov_;
    std::uint64_t alive_count_ = 0;
};

/// TIM-style sufficient sample size: ceil of
/// (8 + 2e) * n * (ell*ln n + ln C(n,s) + ln 2) / (opt_lower_bound * e^2),
/// natural logarithms, ln C(n,s) via log-gamma.
std::uint64_t sample_size_L(NodeId n, NodeId s, double epsilon, double ell,
                            double opt_lower_bound);

/// n * (sets intersecting the seed set, alive or removed) / theta.
double estimate_spread(const RRSample& sample, std::span<const NodeId> seeds);

struct Candidate {
    NodeId node = kInvalidNode;
    std::uint64_t coverage = 0;
};

/// Unassigned node with maximum alive coverage; ties to the lowest id;
/// empty when every unassigned node has zero alive coverage.
std::optional<Candidate> select_best_ca_node(const RRSample& sample,
                                             std::span<const std::uint8_t> assigned);

/// Unassigned node with the best coverage-to-cost ratio. Zero cost with
/// coverage >= 1 ranks as +infinity; zero coverage is never selected.
/// Ties to higher coverage, then lowest id.
std::optional<Candidate> select_best_cs_node(const RRSample& sample,
                                             std::span<const double> costs,
                                             std::span<const std::uint8_t> assigned);

/// Cost-sensitive argmax restricted to the w unassigned nodes of highest
/// alive coverage (ties by lowest id). w = 1 collapses to the
/// cost-agnostic choice.
std::optional<Candidate> windowed_select_best_cs_node(const RRSample& sample,
                                                      std::span<const double> costs,
                                                      std::span<const std::uint8_t> assigned,
                                                      std::uint64_t w);

/// Samples `additional` RR sets into the collection. Each new set draws
/// from a stream keyed by its global index, so the result is independent
/// of chunking and thread count.
void extend_sample(RRSample& sample, const Graph& graph, const AdCampaign& campaign,
                   std::uint64_t additional, Rng& rng);
void extend_sample(RRSample& sample, const Graph& graph,
                   std::span<const double> arc_probabilities, std::uint64_t additional, Rng& rng);

/// Selection ledger for one ad: seeds with their recorded coverage, in
/// selection order. Recorded coverages count disjoint sets (each RR set is
/// credited to the first seed that covered it).
struct SeedLedger {
    struct Entry {
        NodeId node;
        std::uint64_t coverage;
    };
    std::vector<Entry> entries;

    std::uint64_t total_coverage() const;
    bool contains(NodeId u) const;
};

/// After a sample extension: credits each seed, in ledger order, with its
/// coverage among the newly added sets, removes those sets, and returns
/// the revised revenue cpe * n * total_coverage / theta.
double update_estimates(RRSample& sample, SeedLedger& ledger, const AdCampaign& campaign);

/// Latent seed-set size revision:
/// s + floor((budget - payment) / (c_max + cpe * n * f_max)); the increment
/// is 0 when the denominator is 0 or the budget is exhausted.
std::uint64_t latent_seed_size_update(std::uint64_t s_current, double budget,
                                      double payment_current, double c_max, double cpe, NodeId n,
                                      double f_max);

/// Greedy max-coverage fraction of an s-seed set over the first
/// `pilot_size` sets of the sample (alive flags ignored).
double pilot_greedy_fraction(const RRSample& sample, std::uint64_t pilot_size, std::uint64_t s);

/// Lower bound on OPT_s used for sample sizing:
/// max(s, (1 - epsilon) * n * pilot greedy coverage). s alone is always
/// valid (each seed activates itself) but overly conservative.
double pilot_opt_lower_bound(const RRSample& sample, std::uint64_t s, double epsilon,
                             std::uint64_t pilot_size = 10000);

/// Binary snapshot, magic `RRS1`, little-endian: theta as u64, then per
/// set a varint member count followed by varint member ids (ascending).
/// Alive flags are not part of the snapshot; loaded sets start alive.
void save_rr_sample(const RRSample& sample, const std::filesystem::path& path);
RRSample load_rr_sample(const std::filesystem::path& path, AdId ad, NodeId node_count);

} // namespace revmax
