#include "revmax/allocators.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <queue>

#include "revmax/pagerank.hpp"

namespace revmax {

std::string_view algorithm_name(Algorithm a) {
    switch (a) {
    case Algorithm::ca_greedy:
        return "ca-greedy";
    case Algorithm::cs_greedy:
        return "cs-greedy";
    case Algorithm::ti_carm:
        return "ti-carm";
    case Algorithm::ti_csrm:
        return "ti-csrm";
    case Algorithm::pagerank_gr:
        return "pagerank-gr";
    case Algorithm::pagerank_rr:
        return "pagerank-rr";
    }
    return "unknown";
}

std::optional<Algorithm> algorithm_from_name(std::string_view name) {
    for (Algorithm a : {Algorithm::ca_greedy, Algorithm::cs_greedy, Algorithm::ti_carm,
                        Algorithm::ti_csrm, Algorithm::pagerank_gr, Algorithm::pagerank_rr}) {
        if (algorithm_name(a) == name) {
            return a;
        }
    }
    return std::nullopt;
}

void AllocatorConfig::validate() const {
    if (!(epsilon > 0.0 && epsilon < 1.0)) {
        throw std::invalid_argument("allocator config: epsilon must be in (0,1)");
    }
    if (!(ell > 0.0)) {
        throw std::invalid_argument("allocator config: ell must be positive");
    }
    if (oracle.kind == SpreadOracle::Kind::monte_carlo && oracle.runs == 0) {
        throw std::invalid_argument("allocator config: monte-carlo oracle needs runs >= 1");
    }
    if (lazy_evaluation && oracle.kind != SpreadOracle::Kind::exact) {
        // stale queue entries are upper bounds only when marginals are
        // exactly submodular; sampled marginals are not
        throw std::invalid_argument("allocator config: lazy evaluation requires the exact oracle");
    }
}

double RunTrace::cumulative_revenue() const {
    double total = 0.0;
    for (const TraceRow& r : rows) {
        if (r.accepted) {
            total += r.marginal_revenue;
        }
    }
    return total;
}

void RunTrace::write_csv(std::ostream& out) const {
    out << "iteration,ad,node,accepted,marginal_revenue,marginal_payment,payment_after,theta,"
           "latent_size\n";
    char buf[128];
    for (const TraceRow& r : rows) {
        std::snprintf(buf, sizeof(buf), "%llu,%u,%u,%d,%.17g,%.17g,%.17g,%llu,%llu\n",
                      static_cast<unsigned long long>(r.iteration), r.ad, r.node,
                      r.accepted ? 1 : 0, r.marginal_revenue, r.marginal_payment, r.payment_after,
                      static_cast<unsigned long long>(r.theta),
                      static_cast<unsigned long long>(r.latent_size));
        out << buf;
    }
}

namespace {

struct PairKey {
    double key = 0.0;
    double marginal_revenue = 0.0;
    NodeId node = kInvalidNode;
    AdId ad = 0;
};

/// Shared total order: higher key, then higher marginal revenue, then
/// lowest node id, then lowest ad id.
bool better(const PairKey& a, const PairKey& b) {
    if (a.key != b.key) {
        return a.key > b.key;
    }
    if (a.marginal_revenue != b.marginal_revenue) {
        return a.marginal_revenue > b.marginal_revenue;
    }
    if (a.node != b.node) {
        return a.node < b.node;
    }
    return a.ad < b.ad;
}

/// Revenue-per-payment selection key. Cost 0 gives exactly 1 (the
/// maximum); zero marginal revenue gives 0 and is never selected.
double cs_key(double marginal_revenue, double cost) {
    if (!(marginal_revenue > 0.0)) {
        return 0.0;
    }
    return marginal_revenue / (marginal_revenue + cost);
}

class ExactGreedy {
public:
    ExactGreedy(const Graph& graph, std::span<const AdCampaign> campaigns,
                const IncentiveTable& incentives, const AllocatorConfig& config,
                bool cost_sensitive)
        : graph_(graph), campaigns_(campaigns), incentives_(incentives), config_(config),
          cost_sensitive_(cost_sensitive), h_(campaigns.size()), n_(graph.node_count()) {
        for (const AdCampaign& c : campaigns_) {
            resolved_.push_back(resolve_probabilities(graph_, c));
        }
        seeds_.resize(h_);
        base_spread_.assign(h_, 0.0);
        seed_cost_.assign(h_, 0.0);
        assigned_.assign(n_, 0);
        pair_alive_.assign(h_, std::vector<std::uint8_t>(n_, 1));
        marg_cache_.assign(h_, std::vector<double>(n_, 0.0));
        marg_valid_.assign(h_, std::vector<std::uint8_t>(n_, 0));
    }

    AllocatorResult run() {
        const auto start = std::chrono::steady_clock::now();
        if (config_.lazy_evaluation) {
            run_lazy();
        } else {
            run_naive();
        }
        AllocatorResult result;
        result.allocation = Allocation(h_);
        for (AdId i = 0; i < h_; ++i) {
            result.allocation.seed_sets[i] = seeds_[i];
            result.allocation.spread[i] = base_spread_[i];
            result.allocation.revenue[i] = campaigns_[i].cpe * base_spread_[i];
            result.allocation.seed_cost[i] = seed_cost_[i];
            result.allocation.pay[i] = result.allocation.revenue[i] + seed_cost_[i];
        }
        result.trace = std::move(trace_);
        result.trace.final_theta.assign(h_, 0);
        result.trace.final_latent.assign(h_, 0);
        result.trace.extension_rounds.assign(h_, 0);
        result.trace.wall_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        return result;
    }

private:
    double marginal_spread(AdId i, NodeId u) {
        if (!marg_valid_[i][u]) {
            std::vector<NodeId> extended = seeds_[i];
            extended.push_back(u);
            const double with = config_.oracle.spread_resolved(
                graph_, resolved_[i], campaigns_[i], extended, u, seeds_[i].size());
            marg_cache_[i][u] = with - base_spread_[i];
            marg_valid_[i][u] = 1;
        }
        return marg_cache_[i][u];
    }

    PairKey key_of(AdId i, NodeId u) {
        const double marg_rev = campaigns_[i].cpe * marginal_spread(i, u);
        const double key =
            cost_sensitive_ ? cs_key(marg_rev, incentives_.cost(i, u)) : std::max(marg_rev, 0.0);
        return {key, marg_rev, u, i};
    }

    /// Feasibility test and bookkeeping for the selected argmax pair;
    /// mirrors the ground-set removal of the naive loop.
    void resolve_pair(const PairKey& best) {
        const AdId i = best.ad;
        const NodeId u = best.node;
        const double marg_spread = marg_cache_[i][u];
        const double new_spread = base_spread_[i] + marg_spread;
        const double marg_pay = best.marginal_revenue + incentives_.cost(i, u);
        const double rho_after = campaigns_[i].cpe * new_spread + seed_cost_[i] +
                                 incentives_.cost(i, u);
        TraceRow row;
        row.iteration = iteration_++;
        row.ad = i;
        row.node = u;
        row.marginal_revenue = best.marginal_revenue;
        row.marginal_payment = marg_pay;
        row.theta = 0;
        row.latent_size = 0;
        pair_alive_[i][u] = 0;
        if (!assigned_[u] && rho_after <= campaigns_[i].budget + kBudgetTolerance) {
            seeds_[i].push_back(u);
            assigned_[u] = 1;
            base_spread_[i] = new_spread;
            seed_cost_[i] += incentives_.cost(i, u);
            std::fill(marg_valid_[i].begin(), marg_valid_[i].end(), 0);
            row.accepted = true;
            row.payment_after = rho_after;
        } else {
            row.accepted = false;
            row.payment_after = campaigns_[i].cpe * base_spread_[i] + seed_cost_[i];
        }
        trace_.rows.push_back(row);
    }

    void run_naive() {
        for (;;) {
            std::optional<PairKey> best;
            for (AdId i = 0; i < h_; ++i) {
                for (NodeId u = 0; u < n_; ++u) {
                    if (!pair_alive_[i][u]) {
                        continue;
                    }
                    const PairKey k = key_of(i, u);
                    if (!best || better(k, *best)) {
                        best = k;
                    }
                }
            }
            if (!best || !(best->key > 0.0)) {
                return; // nothing productive left
            }
            resolve_pair(*best);
        }
    }

    void run_lazy() {
        struct Entry {
            PairKey key;
            std::size_t computed_at;
        };
        const auto worse = [](const Entry& a, const Entry& b) { return better(b.key, a.key); };
        std::priority_queue<Entry, std::vector<Entry>, decltype(worse)> heap(worse);
        for (AdId i = 0; i < h_; ++i) {
            for (NodeId u = 0; u < n_; ++u) {
                heap.push({key_of(i, u), 0});
            }
        }
        while (!heap.empty()) {
            const Entry top = heap.top();
            heap.pop();
            const AdId i = top.key.ad;
            const NodeId u = top.key.node;
            if (!pair_alive_[i][u]) {
                continue;
            }
            if (!(top.key.key > 0.0)) {
                return; // stored keys bound current ones from above
            }
            if (top.computed_at != seeds_[i].size()) {
                heap.push({key_of(i, u), seeds_[i].size()});
                continue;
            }
            resolve_pair(top.key);
        }
    }

    const Graph& graph_;
    std::span<const AdCampaign> campaigns_;
    const IncentiveTable& incentives_;
    const AllocatorConfig& config_;
    bool cost_sensitive_;
    AdId h_;
    NodeId n_;
    std::vector<std::vector<double>> resolved_;
    std::vector<std::vector<NodeId>> seeds_;
    std::vector<double> base_spread_;
    std::vector<double> seed_cost_;
    std::vector<std::uint8_t> assigned_;
    std::vector<std::vector<std::uint8_t>> pair_alive_;
    std::vector<std::vector<double>> marg_cache_;
    std::vector<std::vector<std::uint8_t>> marg_valid_;
    RunTrace trace_;
    std::uint64_t iteration_ = 0;
};

enum class SampleMode { carm, csrm, pr_gr, pr_rr };

class SampleGreedy {
public:
    SampleGreedy(const Graph& graph, std::span<const AdCampaign> campaigns,
                 const IncentiveTable& incentives, const AllocatorConfig& config, SampleMode mode)
        : graph_(graph), campaigns_(campaigns), incentives_(incentives), config_(config),
          mode_(mode), h_(campaigns.size()), n_(graph.node_count()) {
        ads_.resize(h_);
        assigned_.assign(n_, 0);
        for (AdId j = 0; j < h_; ++j) {
            AdState& ad = ads_[j];
            ad.rng = Rng::stream(config_.seed, {0x5252u, j});
            ad.resolved = resolve_probabilities(graph_, campaigns_[j]);
            ad.sample = RRSample(j, n_);
            ad.max_cost = incentives_.max_cost(j);
            ad.in_seeds.assign(n_, 0);
            extend_sample(ad.sample, graph_, ad.resolved, config_.pilot_size, ad.rng);
            grow_sample_for(j, 1);
            if (mode_ == SampleMode::pr_gr || mode_ == SampleMode::pr_rr) {
                ad.rank_order = ranking_from_scores(pagerank(graph_, ad.resolved));
            }
        }
    }

    AllocatorResult run() {
        const auto start = std::chrono::steady_clock::now();
        for (;;) {
            const std::optional<AdId> winner = pick_winner();
            if (!winner) {
                break;
            }
            accept(*winner);
        }
        AllocatorResult result;
        result.allocation = Allocation(h_);
        result.trace = std::move(trace_);
        result.trace.final_theta.assign(h_, 0);
        result.trace.final_latent.assign(h_, 0);
        result.trace.extension_rounds.assign(h_, 0);
        for (AdId j = 0; j < h_; ++j) {
            AdState& ad = ads_[j];
            for (const auto& e : ad.ledger.entries) {
                result.allocation.seed_sets[j].push_back(e.node);
            }
            const double theta = static_cast<double>(ad.sample.theta());
            result.allocation.spread[j] =
                theta > 0.0
                    ? static_cast<double>(n_) * static_cast<double>(ad.ledger.total_coverage()) / theta
                    : 0.0;
            result.allocation.revenue[j] = campaigns_[j].cpe * result.allocation.spread[j];
            result.allocation.seed_cost[j] = ad.seed_cost;
            result.allocation.pay[j] = result.allocation.revenue[j] + ad.seed_cost;
            result.trace.final_theta[j] = ad.sample.theta();
            result.trace.final_latent[j] = ad.latent;
            result.trace.extension_rounds[j] = ad.extensions;
        }
        result.trace.wall_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        return result;
    }

private:
    struct AdState {
        Rng rng;
        std::vector<double> resolved;
        RRSample sample;
        SeedLedger ledger;
        std::vector<std::uint8_t> in_seeds;
        std::uint64_t latent = 1;
        double pi = 0.0;        // revenue estimate for the current seeds
        double seed_cost = 0.0;
        double rho = 0.0;       // pi + seed_cost
        double max_cost = 0.0;
        std::uint64_t extensions = 0;
        std::vector<NodeId> rank_order;
        // cached candidate
        bool cache_valid = false;
        std::optional<Candidate> candidate;
        double cand_marg_rev = 0.0;
        double cand_marg_pay = 0.0;
        bool cand_feasible = false;
    };

    /// Sizes the sample for latent size s: pilot-based lower bound on
    /// OPT_s, then grow to L(s, epsilon) if needed.
    void grow_sample_for(AdId j, std::uint64_t s) {
        AdState& ad = ads_[j];
        const std::uint64_t capped = std::max<std::uint64_t>(1, std::min<std::uint64_t>(s, n_));
        const double lb =
            pilot_opt_lower_bound(ad.sample, capped, config_.epsilon, config_.pilot_size);
        const std::uint64_t target = sample_size_L(n_, static_cast<NodeId>(capped),
                                                   config_.epsilon, config_.ell, lb);
        if (target > ad.sample.theta()) {
            extend_sample(ad.sample, graph_, ad.resolved, target - ad.sample.theta(), ad.rng);
            ++ad.extensions;
        }
    }

    void refresh_candidate(AdId j) {
        AdState& ad = ads_[j];
        ad.cache_valid = true;
        ad.candidate.reset();
        ad.cand_feasible = false;
        const double theta = static_cast<double>(ad.sample.theta());
        const auto costs = incentives_.costs_for(j);
        auto marginal_revenue = [&](std::uint64_t coverage) {
            return campaigns_[j].cpe * static_cast<double>(n_) * static_cast<double>(coverage) /
                   theta;
        };
        if (mode_ == SampleMode::carm || mode_ == SampleMode::csrm) {
            std::optional<Candidate> cand;
            if (mode_ == SampleMode::carm) {
                cand = select_best_ca_node(ad.sample, assigned_);
            } else {
                const std::uint64_t w = config_.window == 0 ? n_ : config_.window;
                cand = windowed_select_best_cs_node(ad.sample, costs, assigned_, w);
            }
            if (!cand) {
                return;
            }
            ad.candidate = cand;
            ad.cand_marg_rev = marginal_revenue(cand->coverage);
            ad.cand_marg_pay = ad.cand_marg_rev + costs[cand->node];
            ad.cand_feasible =
                ad.rho + ad.cand_marg_pay <= campaigns_[j].budget + kBudgetTolerance;
            return;
        }
        // PageRank modes: highest-ranked unassigned node whose addition fits
        // the budget.
        for (NodeId v : ad.rank_order) {
            if (assigned_[v]) {
                continue;
            }
            const std::uint64_t cov = ad.sample.alive_coverage(v);
            const double marg_rev = marginal_revenue(cov);
            const double marg_pay = marg_rev + costs[v];
            if (ad.rho + marg_pay <= campaigns_[j].budget + kBudgetTolerance) {
                ad.candidate = Candidate{v, cov};
                ad.cand_marg_rev = marg_rev;
                ad.cand_marg_pay = marg_pay;
                ad.cand_feasible = true;
                return;
            }
        }
    }

    std::optional<AdId> pick_winner() {
        for (AdId j = 0; j < h_; ++j) {
            if (!ads_[j].cache_valid) {
                refresh_candidate(j);
            }
        }
        if (mode_ == SampleMode::pr_rr) {
            for (AdId step = 0; step < h_; ++step) {
                const AdId j = static_cast<AdId>((rr_pointer_ + step) % h_);
                if (ads_[j].candidate && ads_[j].cand_feasible) {
                    rr_pointer_ = static_cast<AdId>((j + 1) % h_);
                    return j;
                }
            }
            return std::nullopt;
        }
        std::optional<AdId> best;
        PairKey best_key;
        for (AdId j = 0; j < h_; ++j) {
            const AdState& ad = ads_[j];
            if (!ad.candidate || !ad.cand_feasible) {
                continue;
            }
            PairKey k;
            k.marginal_revenue = ad.cand_marg_rev;
            k.node = 0; // cross-ad ties: higher marginal revenue, then lowest ad id
            k.ad = j;
            if (mode_ == SampleMode::csrm) {
                k.key = cs_key(ad.cand_marg_rev, incentives_.cost(j, ad.candidate->node));
            } else {
                k.key = std::max(ad.cand_marg_rev, 0.0);
            }
            if (!best || better(k, best_key)) {
                best = j;
                best_key = k;
            }
        }
        return best;
    }

    void accept(AdId i) {
        AdState& ad = ads_[i];
        const Candidate cand = *ad.candidate;
        TraceRow row;
        row.iteration = iteration_++;
        row.ad = i;
        row.node = cand.node;
        row.accepted = true;
        row.marginal_revenue = ad.cand_marg_rev;
        row.marginal_payment = ad.cand_marg_pay;
        row.theta = ad.sample.theta();
        row.latent_size = ad.latent;

        assigned_[cand.node] = 1;
        ad.in_seeds[cand.node] = 1;
        ad.ledger.entries.push_back({cand.node, cand.coverage});
        ad.sample.remove_covered(cand.node);
        ad.pi += ad.cand_marg_rev;
        ad.seed_cost += incentives_.cost(i, cand.node);
        ad.rho = ad.pi + ad.seed_cost;
        row.payment_after = ad.rho;
        trace_.rows.push_back(row);

        if (ad.ledger.entries.size() == ad.latent) {
            double f_max = 0.0;
            const double theta = static_cast<double>(ad.sample.theta());
            for (NodeId u = 0; u < n_; ++u) {
                if (!ad.in_seeds[u]) {
                    f_max = std::max(f_max, static_cast<double>(ad.sample.alive_coverage(u)) / theta);
                }
            }
            std::uint64_t next = latent_seed_size_update(ad.latent, campaigns_[i].budget, ad.rho,
                                                         ad.max_cost, campaigns_[i].cpe, n_, f_max);
            next = std::min<std::uint64_t>(next, n_);
            if (next > ad.latent) {
                grow_sample_for(i, next);
            }
            ad.latent = next;
            ad.pi = update_estimates(ad.sample, ad.ledger, campaigns_[i]);
            ad.rho = ad.pi + ad.seed_cost;
        }

        // invalidate caches that the assignment or mutation touched
        ad.cache_valid = false;
        for (AdId j = 0; j < h_; ++j) {
            if (j != i && ads_[j].cache_valid && ads_[j].candidate &&
                ads_[j].candidate->node == cand.node) {
                ads_[j].cache_valid = false;
            }
        }
    }

    const Graph& graph_;
    std::span<const AdCampaign> campaigns_;
    const IncentiveTable& incentives_;
    const AllocatorConfig& config_;
    SampleMode mode_;
    AdId h_;
    NodeId n_;
    std::vector<AdState> ads_;
    std::vector<std::uint8_t> assigned_;
    AdId rr_pointer_ = 0;
    RunTrace trace_;
    std::uint64_t iteration_ = 0;
};

} // namespace

AllocatorResult ca_greedy(const Graph& graph, std::span<const AdCampaign> campaigns,
                          const IncentiveTable& incentives, const AllocatorConfig& config) {
    config.validate();
    return ExactGreedy(graph, campaigns, incentives, config, false).run();
}

AllocatorResult cs_greedy(const Graph& graph, std::span<const AdCampaign> campaigns,
                          const IncentiveTable& incentives, const AllocatorConfig& config) {
    config.validate();
    return ExactGreedy(graph, campaigns, incentives, config, true).run();
}

AllocatorResult ti_carm(const Graph& graph, std::span<const AdCampaign> campaigns,
                        const IncentiveTable& incentives, const AllocatorConfig& config) {
    config.validate();
    return SampleGreedy(graph, campaigns, incentives, config, SampleMode::carm).run();
}

AllocatorResult ti_csrm(const Graph& graph, std::span<const AdCampaign> campaigns,
                        const IncentiveTable& incentives, const AllocatorConfig& config) {
    config.validate();
    return SampleGreedy(graph, campaigns, incentives, config, SampleMode::csrm).run();
}

AllocatorResult pagerank_baseline(const Graph& graph, std::span<const AdCampaign> campaigns,
                                  const IncentiveTable& incentives, const AllocatorConfig& config,
                                  PageRankMode mode) {
    config.validate();
    return SampleGreedy(graph, campaigns, incentives, config,
                        mode == PageRankMode::gr ? SampleMode::pr_gr : SampleMode::pr_rr)
        .run();
}

AllocatorResult run_allocator(const Instance& instance, const AllocatorConfig& config) {
    switch (config.algorithm) {
    case Algorithm::ca_greedy:
        return ca_greedy(instance.graph, instance.campaigns, instance.incentives, config);
    case Algorithm::cs_greedy:
        return cs_greedy(instance.graph, instance.campaigns, instance.incentives, config);
    case Algorithm::ti_carm:
        return ti_carm(instance.graph, instance.campaigns, instance.incentives, config);
    case Algorithm::ti_csrm:
        return ti_csrm(instance.graph, instance.campaigns, instance.incentives, config);
    case Algorithm::pagerank_gr:
        return pagerank_baseline(instance.graph, instance.campaigns, instance.incentives, config,
                                 PageRankMode::gr);
    case Algorithm::pagerank_rr:
        return pagerank_baseline(instance.graph, instance.campaigns, instance.incentives, config,
                                 PageRankMode::rr);
    }
    throw std::invalid_argument("run_allocator: unknown algorithm");
}

std::vector<double> reevaluate_revenue(const Graph& graph, std::span<const AdCampaign> campaigns,
                                       const Allocation& allocation, std::uint64_t mc_runs,
                                       std::uint64_t seed) {
    std::vector<double> revenue(campaigns.size(), 0.0);
    for (std::size_t i = 0; i < campaigns.size(); ++i) {
        const auto& seeds = allocation.seed_sets[i];
        if (seeds.empty()) {
            continue;
        }
        double spread = 0.0;
        if (graph.arc_count() <= kExactSpreadArcLimit) {
            spread = exact_spread(graph, campaigns[i], seeds).value;
        } else {
            Rng rng = Rng::stream(seed, {0x7265u, static_cast<std::uint64_t>(i)});
            spread = mc_spread(graph, campaigns[i], seeds, mc_runs, rng).value;
        }
        revenue[i] = campaigns[i].cpe * spread;
    }
    return revenue;
}

} // namespace revmax
