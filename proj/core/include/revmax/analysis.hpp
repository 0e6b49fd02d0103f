#pragma once

#include <functional>
#include <string>

#include "revmax/allocators.hpp"
#include "revmax/economics.hpp"

namespace revmax {

/// Set function over a bitmask ground set (bit j = element j present).
using SetFn = std::function<double(std::uint32_t)>;

/// Largest ground set (node, ad pairs) the enumeration-based operations
/// accept.
inline constexpr unsigned kEnumerationBudget = 22;

/// 1 - min_j f(j | ground \ {j}) / f({j}). Singletons with f({j}) = 0 are
/// excluded from the minimum; if all are zero the curvature is undefined
/// and a std::runtime_error is thrown.
double total_curvature(const SetFn& f, unsigned ground_size);

/// Curvature restricted to contexts within S.
double curvature_wrt_set(const SetFn& f, std::uint32_t set_mask);

/// 1 - sum_j f(j | S \ {j}) / sum_j f({j}) over j in S.
double average_curvature(const SetFn& f, std::uint32_t set_mask);

struct Ranks {
    std::uint32_t lower = 0; // smallest maximal feasible solution
    std::uint32_t upper = 0; // largest maximal feasible solution
};

/// Enumerates all feasible (disjoint, within-budget) pair sets and returns
/// the lower and upper rank. Refuses ground sets beyond
/// kEnumerationBudget. When every advertiser can afford every node as a
/// first seed, additionally asserts lower >= number of ads.
Ranks ranks(const Instance& instance, const SpreadOracle& oracle);

/// Cost-agnostic guarantee (1/k)(1 - ((R-k)/R)^r); the k -> 0 limit r/R is
/// handled by evaluating at k = 1e-12 with expm1/log1p.
double bound_ca(double kappa_pi, std::uint32_t lower_rank, std::uint32_t upper_rank);

struct CsBound {
    double value = 0.0;
    bool degenerate = false; // max curvature 1: guarantee collapses
};

/// Cost-sensitive guarantee
/// 1 - R*rho_max / (R*rho_max + (1 - max kappa_rho) * rho_min).
CsBound bound_cs(std::uint32_t upper_rank, double rho_max, double rho_min,
                 double max_kappa_rho);

/// Additive-slack deterioration of a base guarantee under RR estimation:
/// value_for(opt) = beta * opt - sum_i cpe_i * epsilon * opt_s_i.
struct DeterioratedBound {
    double beta = 0.0;
    double slack = 0.0;
    double value_for(double opt) const { return beta * opt - slack; }
};

DeterioratedBound bound_deteriorated(double beta, std::span<const double> cpes, double epsilon,
                                     std::span<const double> opt_s_estimates);

struct BruteForceResult {
    Allocation allocation;
    double opt = 0.0;
};

/// Exhaustive search over all disjoint, budget-feasible allocations;
/// deterministic lexicographic tie-break. Same enumeration budget as
/// ranks().
BruteForceResult brute_force_opt(const Instance& instance, const SpreadOracle& oracle);

/// Single-ad instance realizing the cost-agnostic bound with equality:
/// all probabilities 1, cpe 1, budget 7; three head nodes of spread 3
/// (the reaches of a and c disjoint) where seeding b exhausts the budget
/// alone. Node ids are assigned so that the deterministic lowest-id
/// tie-break prefers b, the adversarial greedy choice.
Instance make_tightness_instance();

/// Everything the theory check emits for one instance.
struct BoundReport {
    double kappa_pi = 0.0;
    double kappa_pi_avg = 0.0;
    std::vector<double> kappa_rho;     // per ad
    std::vector<double> kappa_rho_avg; // per ad
    Ranks rank;
    double rho_max = 0.0;
    double rho_min = 0.0;
    double ca_bound = 0.0;
    double ca_floor = 0.0; // 1/R
    CsBound cs_bound;
    double epsilon = 0.0;
    std::vector<double> opt_s_estimates; // per ad, for the deteriorated bound
    double deteriorated_slack = 0.0;
    double brute_opt = 0.0;
    std::vector<std::pair<std::string, double>> achieved; // algorithm, revenue
};

/// Computes curvatures, ranks, bounds and brute-force OPT with the exact
/// oracle, then runs the four allocators and records their exact
/// re-evaluated revenues.
BoundReport analyze_instance(const Instance& instance, const AllocatorConfig& config);

void write_bound_report(const BoundReport& report, std::ostream& out);
std::string bound_report_json(const BoundReport& report);

} // namespace revmax
