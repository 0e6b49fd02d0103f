#include "revmax/analysis.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <ostream>

#include <json.hpp>

namespace revmax {

namespace {

double clamp_unit(double v) {
    if (v < 0.0 && v > -1e-9) {
        return 0.0;
    }
    if (v > 1.0 && v < 1.0 + 1e-9) {
        return 1.0;
    }
    return v;
}

} // namespace

double total_curvature(const SetFn& f, unsigned ground_size) {
    if (ground_size == 0 || ground_size > kEnumerationBudget) {
        throw std::invalid_argument("total_curvature: ground size out of range");
    }
    const std::uint32_t full = ground_size == 32 ? ~0u : (1u << ground_size) - 1u;
    return curvature_wrt_set(f, full);
}

double curvature_wrt_set(const SetFn& f, std::uint32_t set_mask) {
    const double f_set = f(set_mask);
    double min_ratio = std::numeric_limits<double>::infinity();
    bool any = false;
    for (std::uint32_t bit = 1; bit != 0 && bit <= set_mask; bit <<= 1) {
        if (!(set_mask & bit)) {
            continue;
        }
        const double singleton = f(bit);
        if (singleton == 0.0) {
            continue; // 0/0 convention: excluded from the minimum
        }
        const double marginal = f_set - f(set_mask & ~bit);
        min_ratio = std::min(min_ratio, marginal / singleton);
        any = true;
    }
    if (!any) {
        throw std::runtime_error("curvature undefined: every singleton value is zero");
    }
    return clamp_unit(1.0 - min_ratio);
}

double average_curvature(const SetFn& f, std::uint32_t set_mask) {
    const double f_set = f(set_mask);
    double marginal_sum = 0.0;
    double singleton_sum = 0.0;
    for (std::uint32_t bit = 1; bit != 0 && bit <= set_mask; bit <<= 1) {
        if (!(set_mask & bit)) {
            continue;
        }
        marginal_sum += f_set - f(set_mask & ~bit);
        singleton_sum += f(bit);
    }
    if (singleton_sum == 0.0) {
        throw std::runtime_error("curvature undefined: every singleton value is zero");
    }
    return clamp_unit(1.0 - marginal_sum / singleton_sum);
}

namespace {

/// Lazy sigma(mask) evaluations per ad plus the pair-set feasibility
/// machinery shared by ranks() and brute_force_opt().
class PairEnumeration {
public:
    PairEnumeration(const Instance& instance, const SpreadOracle& oracle)
        : inst_(instance), oracle_(oracle), n_(instance.graph.node_count()),
          h_(static_cast<AdId>(instance.campaigns.size())) {
        pairs_ = static_cast<unsigned>(n_) * h_;
        if (pairs_ > kEnumerationBudget) {
            throw std::runtime_error("enumeration refused: " + std::to_string(pairs_) +
                                     " (node, ad) pairs exceed the budget of " +
                                     std::to_string(kEnumerationBudget));
        }
        sigma_.assign(h_, std::vector<double>(std::size_t(1) << n_,
                                              std::numeric_limits<double>::quiet_NaN()));
    }

    NodeId nodes() const { return n_; }
    AdId ads() const { return h_; }
    unsigned pair_count() const { return pairs_; }

    std::uint32_t ad_mask(std::uint32_t pair_set, AdId i) const {
        return (pair_set >> (i * n_)) & ((1u << n_) - 1u);
    }

    double sigma(AdId i, std::uint32_t node_mask) {
        double& slot = sigma_[i][node_mask];
        if (std::isnan(slot)) {
            std::vector<NodeId> seeds;
            for (NodeId u = 0; u < n_; ++u) {
                if (node_mask & (1u << u)) {
                    seeds.push_back(u);
                }
            }
            slot = seeds.empty()
                       ? 0.0
                       : oracle_.spread(inst_.graph, inst_.campaigns[i], seeds, node_mask, 0);
        }
        return slot;
    }

    double cost(AdId i, std::uint32_t node_mask) const {
        double total = 0.0;
        for (NodeId u = 0; u < n_; ++u) {
            if (node_mask & (1u << u)) {
                total += inst_.incentives.cost(i, u);
            }
        }
        return total;
    }

    double rho(AdId i, std::uint32_t node_mask) {
        return inst_.campaigns[i].cpe * sigma(i, node_mask) + cost(i, node_mask);
    }

    double revenue(std::uint32_t pair_set) {
        double total = 0.0;
        for (AdId i = 0; i < h_; ++i) {
            total += inst_.campaigns[i].cpe * sigma(i, ad_mask(pair_set, i));
        }
        return total;
    }

    bool feasible(std::uint32_t pair_set) {
        std::uint32_t used = 0;
        for (AdId i = 0; i < h_; ++i) {
            const std::uint32_t mask = ad_mask(pair_set, i);
            if (used & mask) {
                return false; // node seeded for two ads
            }
            used |= mask;
        }
        for (AdId i = 0; i < h_; ++i) {
            const std::uint32_t mask = ad_mask(pair_set, i);
            if (mask != 0 && rho(i, mask) > inst_.campaigns[i].budget + kBudgetTolerance) {
                return false;
            }
        }
        return true;
    }

    /// Feasibility of every pair set, indexed by mask.
    const std::vector<std::uint8_t>& feasibility_table() {
        if (table_.empty()) {
            const std::uint64_t limit = std::uint64_t(1) << pairs_;
            table_.resize(limit);
            for (std::uint64_t x = 0; x < limit; ++x) {
                table_[x] = feasible(static_cast<std::uint32_t>(x)) ? 1 : 0;
            }
        }
        return table_;
    }

    /// Every advertiser can afford every node as a first seed; under this
    /// condition no maximal solution can leave an ad empty-handed.
    bool strong_affordability() {
        if (n_ < h_) {
            return false;
        }
        for (AdId i = 0; i < h_; ++i) {
            for (NodeId u = 0; u < n_; ++u) {
                if (rho(i, 1u << u) > inst_.campaigns[i].budget + kBudgetTolerance) {
                    return false;
                }
            }
        }
        return true;
    }

private:
    const Instance& inst_;
    const SpreadOracle& oracle_;
    NodeId n_;
    AdId h_;
    unsigned pairs_;
    std::vector<std::vector<double>> sigma_;
    std::vector<std::uint8_t> table_;
};

} // namespace

Ranks ranks(const Instance& instance, const SpreadOracle& oracle) {
    PairEnumeration enumeration(instance, oracle);
    const auto& feasible = enumeration.feasibility_table();
    const std::uint64_t limit = std::uint64_t(1) << enumeration.pair_count();
    Ranks result{std::numeric_limits<std::uint32_t>::max(), 0};
    bool found = false;
    for (std::uint64_t x = 0; x < limit; ++x) {
        if (!feasible[x]) {
            continue;
        }
        bool maximal = true;
        for (unsigned p = 0; p < enumeration.pair_count(); ++p) {
            const std::uint64_t grown = x | (std::uint64_t(1) << p);
            if (grown != x && feasible[grown]) {
                maximal = false;
                break;
            }
        }
        if (!maximal) {
            continue;
        }
        found = true;
        const auto size = static_cast<std::uint32_t>(std::popcount(x));
        result.lower = std::min(result.lower, size);
        result.upper = std::max(result.upper, size);
    }
    if (!found) {
        return {0, 0}; // only the empty set is feasible and nothing extends it
    }
    if (enumeration.strong_affordability() && result.lower < enumeration.ads()) {
        throw std::logic_error("ranks: lower rank below the advertiser count despite every ad "
                               "affording every seed");
    }
    return result;
}

double bound_ca(double kappa_pi, std::uint32_t lower_rank, std::uint32_t upper_rank) {
    if (!(kappa_pi >= 0.0 && kappa_pi <= 1.0)) {
        throw std::invalid_argument("bound_ca: curvature outside [0,1]");
    }
    if (upper_rank < 1) {
        throw std::invalid_argument("bound_ca: upper rank must be at least 1");
    }
    const double kappa = std::max(kappa_pi, 1e-12); // continuity limit r/R at kappa = 0
    const double r = static_cast<double>(lower_rank);
    const double R = static_cast<double>(upper_rank);
    return -std::expm1(r * std::log1p(-kappa / R)) / kappa;
}

CsBound bound_cs(std::uint32_t upper_rank, double rho_max, double rho_min,
                 double max_kappa_rho) {
    if (upper_rank < 1) {
        throw std::invalid_argument("bound_cs: upper rank must be at least 1");
    }
    if (!(rho_max >= rho_min && rho_min >= 0.0)) {
        throw std::invalid_argument("bound_cs: inconsistent singleton payments");
    }
    if (!(max_kappa_rho >= 0.0 && max_kappa_rho <= 1.0)) {
        throw std::invalid_argument("bound_cs: curvature outside [0,1]");
    }
    if (max_kappa_rho >= 1.0) {
        return {0.0, true};
    }
    const double R = static_cast<double>(upper_rank);
    const double denom = R * rho_max + (1.0 - max_kappa_rho) * rho_min;
    return {1.0 - R * rho_max / denom, false};
}

DeterioratedBound bound_deteriorated(double beta, std::span<const double> cpes, double epsilon,
                                     std::span<const double> opt_s_estimates) {
    if (!(beta >= 0.0 && beta <= 1.0)) {
        throw std::invalid_argument("bound_deteriorated: beta outside [0,1]");
    }
    if (cpes.size() != opt_s_estimates.size()) {
        throw std::invalid_argument("bound_deteriorated: cpe and OPT_s lists differ in length");
    }
    double slack = 0.0;
    for (std::size_t i = 0; i < cpes.size(); ++i) {
        slack += cpes[i] * epsilon * opt_s_estimates[i];
    }
    return {beta, slack};
}

BruteForceResult brute_force_opt(const Instance& instance, const SpreadOracle& oracle) {
    PairEnumeration enumeration(instance, oracle);
    const auto& feasible = enumeration.feasibility_table();
    const std::uint64_t limit = std::uint64_t(1) << enumeration.pair_count();
    std::uint64_t best_mask = 0;
    double best_value = 0.0;
    for (std::uint64_t x = 0; x < limit; ++x) {
        if (!feasible[x]) {
            continue;
        }
        const double value = enumeration.revenue(static_cast<std::uint32_t>(x));
        if (value > best_value) { // ascending scan keeps the lexicographic minimum on ties
            best_value = value;
            best_mask = x;
        }
    }
    BruteForceResult result;
    result.opt = best_value;
    result.allocation = Allocation(enumeration.ads());
    for (AdId i = 0; i < enumeration.ads(); ++i) {
        const std::uint32_t mask = enumeration.ad_mask(static_cast<std::uint32_t>(best_mask), i);
        for (NodeId u = 0; u < enumeration.nodes(); ++u) {
            if (mask & (1u << u)) {
                result.allocation.seed_sets[i].push_back(u);
            }
        }
        result.allocation.spread[i] = enumeration.sigma(i, mask);
        result.allocation.revenue[i] = instance.campaigns[i].cpe * result.allocation.spread[i];
        result.allocation.seed_cost[i] = enumeration.cost(i, mask);
        result.allocation.pay[i] = result.allocation.revenue[i] + result.allocation.seed_cost[i];
    }
    return result;
}

Instance make_tightness_instance() {
    // ids: b=0, a=1, c=2, then the followers f1..f4 = 3..6.
    // a -> f1, f2; c -> f3, f4; b -> f1, f3. All probabilities 1.
    std::vector<Arc> arcs = {{1, 3}, {1, 4}, {2, 5}, {2, 6}, {0, 3}, {0, 5}};
    std::vector<double> probs(arcs.size(), 1.0);
    std::vector<std::string> labels = {"b", "a", "c", "f1", "f2", "f3", "f4"};
    Instance inst;
    inst.graph = Graph::from_arcs(7, std::move(arcs), std::move(probs), 1, std::move(labels));
    inst.campaigns = {AdCampaign(0, {1.0}, 1.0, 7.0)};
    // Seeding b costs 4 and exhausts the budget at payment 3 + 4 = 7; the
    // optimum {a, c} pays 6 + 0.8 and leaves margin for sampled estimates.
    std::vector<double> costs = {4.0, 0.4, 0.4, 4.0, 4.0, 4.0, 4.0};
    inst.incentives = IncentiveTable::from_matrix(1, 7, std::move(costs), SpreadSource::exact);
    return inst;
}

BoundReport analyze_instance(const Instance& instance, const AllocatorConfig& config) {
    BoundReport report;
    const SpreadOracle oracle = SpreadOracle::exact();
    PairEnumeration enumeration(instance, oracle);
    const NodeId n = enumeration.nodes();
    const AdId h = enumeration.ads();
    const std::uint32_t full = (1u << n) - 1u;

    // curvatures of the revenue and payment functions over singleton /
    // full-context marginals
    double min_pi_ratio = std::numeric_limits<double>::infinity();
    double pi_marg_sum = 0.0;
    double pi_single_sum = 0.0;
    report.rho_max = 0.0;
    report.rho_min = std::numeric_limits<double>::infinity();
    for (AdId i = 0; i < h; ++i) {
        double min_rho_ratio = std::numeric_limits<double>::infinity();
        double rho_marg_sum = 0.0;
        double rho_single_sum = 0.0;
        const double sigma_full = enumeration.sigma(i, full);
        for (NodeId u = 0; u < n; ++u) {
            const std::uint32_t bit = 1u << u;
            const double singleton = enumeration.sigma(i, bit);
            const double marginal = sigma_full - enumeration.sigma(i, full & ~bit);
            min_pi_ratio = std::min(min_pi_ratio, marginal / singleton);
            pi_marg_sum += instance.campaigns[i].cpe * marginal;
            pi_single_sum += instance.campaigns[i].cpe * singleton;

            const double c = instance.incentives.cost(i, u);
            const double rho_single = instance.campaigns[i].cpe * singleton + c;
            const double rho_marg = instance.campaigns[i].cpe * marginal + c;
            min_rho_ratio = std::min(min_rho_ratio, rho_marg / rho_single);
            rho_marg_sum += rho_marg;
            rho_single_sum += rho_single;
            report.rho_max = std::max(report.rho_max, rho_single);
            report.rho_min = std::min(report.rho_min, rho_single);
        }
        report.kappa_rho.push_back(clamp_unit(1.0 - min_rho_ratio));
        report.kappa_rho_avg.push_back(clamp_unit(1.0 - rho_marg_sum / rho_single_sum));
    }
    report.kappa_pi = clamp_unit(1.0 - min_pi_ratio);
    report.kappa_pi_avg = clamp_unit(1.0 - pi_marg_sum / pi_single_sum);

    report.rank = ranks(instance, oracle);
    if (report.rank.upper >= 1) {
        report.ca_bound = bound_ca(report.kappa_pi, report.rank.lower, report.rank.upper);
        report.ca_floor = 1.0 / static_cast<double>(report.rank.upper);
        report.cs_bound = bound_cs(report.rank.upper, report.rho_max, report.rho_min,
                                   *std::max_element(report.kappa_rho.begin(),
                                                     report.kappa_rho.end()));
    }
    report.brute_opt = brute_force_opt(instance, oracle).opt;

    AllocatorConfig base = config;
    base.oracle = SpreadOracle::exact();
    std::vector<double> cpes;
    for (const AdCampaign& c : instance.campaigns) {
        cpes.push_back(c.cpe);
    }
    report.epsilon = base.epsilon;
    for (Algorithm a : {Algorithm::ca_greedy, Algorithm::cs_greedy, Algorithm::ti_carm,
                        Algorithm::ti_csrm}) {
        AllocatorConfig run_config = base;
        run_config.algorithm = a;
        const AllocatorResult run = run_allocator(instance, run_config);
        const auto exact_revenue =
            reevaluate_revenue(instance.graph, instance.campaigns, run.allocation, 0, base.seed);
        double total = 0.0;
        for (double r : exact_revenue) {
            total += r;
        }
        report.achieved.emplace_back(std::string(algorithm_name(a)), total);
        if (a == Algorithm::ti_csrm) {
            for (AdId i = 0; i < h; ++i) {
                const std::uint64_t s =
                    std::min<std::uint64_t>(run.trace.final_latent[i], n);
                double opt_s = 0.0;
                for (std::uint32_t mask = 0; mask <= full; ++mask) {
                    if (static_cast<std::uint64_t>(std::popcount(mask)) <= s) {
                        opt_s = std::max(opt_s, enumeration.sigma(i, mask));
                    }
                }
                report.opt_s_estimates.push_back(opt_s);
            }
        }
    }
    report.deteriorated_slack =
        bound_deteriorated(report.cs_bound.value, cpes, report.epsilon, report.opt_s_estimates)
            .slack;
    return report;
}

void write_bound_report(const BoundReport& report, std::ostream& out) {
    char buf[128];
    auto line = [&](const char* key, double value) {
        std::snprintf(buf, sizeof(buf), "%s: %.12g\n", key, value);
        out << buf;
    };
    line("kappa_pi", report.kappa_pi);
    line("kappa_pi_avg", report.kappa_pi_avg);
    for (std::size_t i = 0; i < report.kappa_rho.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "kappa_rho[%zu]: %.12g\n", i, report.kappa_rho[i]);
        out << buf;
        std::snprintf(buf, sizeof(buf), "kappa_rho_avg[%zu]: %.12g\n", i, report.kappa_rho_avg[i]);
        out << buf;
    }
    out << "lower_rank: " << report.rank.lower << "\n";
    out << "upper_rank: " << report.rank.upper << "\n";
    line("rho_max", report.rho_max);
    line("rho_min", report.rho_min);
    line("ca_bound", report.ca_bound);
    line("ca_floor", report.ca_floor);
    line("cs_bound", report.cs_bound.value);
    out << "cs_degenerate: " << (report.cs_bound.degenerate ? "true" : "false") << "\n";
    line("epsilon", report.epsilon);
    for (std::size_t i = 0; i < report.opt_s_estimates.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "opt_s[%zu]: %.12g\n", i, report.opt_s_estimates[i]);
        out << buf;
    }
    line("deteriorated_slack", report.deteriorated_slack);
    line("brute_force_opt", report.brute_opt);
    for (const auto& [name, revenue] : report.achieved) {
        std::snprintf(buf, sizeof(buf), "revenue[%s]: %.12g\n", name.c_str(), revenue);
        out << buf;
    }
}

std::string bound_report_json(const BoundReport& report) {
    nlohmann::ordered_json j;
    j["kappa_pi"] = report.kappa_pi;
    j["kappa_pi_avg"] = report.kappa_pi_avg;
    j["kappa_rho"] = report.kappa_rho;
    j["kappa_rho_avg"] = report.kappa_rho_avg;
    j["lower_rank"] = report.rank.lower;
    j["upper_rank"] = report.rank.upper;
    j["rho_max"] = report.rho_max;
    j["rho_min"] = report.rho_min;
    j["ca_bound"] = report.ca_bound;
    j["ca_floor"] = report.ca_floor;
    j["cs_bound"] = report.cs_bound.value;
    j["cs_degenerate"] = report.cs_bound.degenerate;
    j["epsilon"] = report.epsilon;
    j["opt_s_estimates"] = report.opt_s_estimates;
    j["deteriorated_slack"] = report.deteriorated_slack;
    j["brute_force_opt"] = report.brute_opt;
    nlohmann::ordered_json achieved;
    for (const auto& [name, revenue] : report.achieved) {
        achieved[name] = revenue;
    }
    j["achieved_revenue"] = achieved;
    return j.dump(2);
}

} // namespace revmax
