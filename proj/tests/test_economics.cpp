#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "testutil.hpp"

using namespace revmax;
using namespace testutil;

namespace {

/// Star with `leaves` deterministic out-arcs: center spread = leaves + 1.
Graph star(NodeId leaves) {
    std::vector<WeightedArc> arcs;
    for (NodeId l = 1; l <= leaves; ++l) {
        arcs.push_back({0, l, 1.0});
    }
    return make_graph(leaves + 1, arcs);
}

} // namespace

TEST_CASE("incentive models follow their formulas") {
    SUBCASE("linear: alpha 0.2, spread 5 -> 1.0") {
        Graph g = star(4);
        const auto campaigns = std::vector<AdCampaign>{unit_campaign()};
        auto table = build_incentives(g, campaigns, {IncentiveKind::linear, 0.2},
                                      SpreadSource::exact);
        CHECK(table.cost(0, 0) == doctest::Approx(1.0));
        CHECK(table.cost(0, 1) == doctest::Approx(0.2)); // leaf spread 1
    }
    SUBCASE("superlinear: alpha 0.1, spread 4 -> 1.6") {
        Graph g = star(3);
        const auto campaigns = std::vector<AdCampaign>{unit_campaign()};
        auto table = build_incentives(g, campaigns, {IncentiveKind::superlinear, 0.1},
                                      SpreadSource::exact);
        CHECK(table.cost(0, 0) == doctest::Approx(1.6));
    }
    SUBCASE("sublinear: spread 1 -> free seed") {
        Graph g = make_graph(2, {{0, 1, 1.0}});
        const auto campaigns = std::vector<AdCampaign>{unit_campaign()};
        auto table = build_incentives(g, campaigns, {IncentiveKind::sublinear, 0.5},
                                      SpreadSource::exact);
        CHECK(table.cost(0, 1) == doctest::Approx(0.0)); // ln 1
        CHECK(table.cost(0, 0) == doctest::Approx(0.5 * std::log(2.0)));
    }
    SUBCASE("sublinear rejects spreads below one") {
        // the out-degree proxy gives sinks spread 0
        Graph g = make_graph(2, {{0, 1, 1.0}});
        const auto campaigns = std::vector<AdCampaign>{unit_campaign()};
        CHECK_THROWS_AS(build_incentives(g, campaigns, {IncentiveKind::sublinear, 0.5},
                                         SpreadSource::out_degree_proxy),
                        std::invalid_argument);
    }
    SUBCASE("constant: identical cost for every node of one ad") {
        Rng rng(5);
        Graph g = random_graph(rng, 8, 16);
        const auto campaigns = std::vector<AdCampaign>{unit_campaign()};
        auto table = build_incentives(g, campaigns, {IncentiveKind::constant, 0.3},
                                      SpreadSource::exact);
        for (NodeId u = 1; u < 8; ++u) {
            CHECK(table.cost(0, u) == table.cost(0, 0));
        }
    }
}

TEST_CASE("incentives scale linearly in alpha") {
    Rng rng(6);
    Graph g = random_graph(rng, 7, 14);
    const auto campaigns = std::vector<AdCampaign>{unit_campaign()};
    for (IncentiveKind kind :
         {IncentiveKind::linear, IncentiveKind::sublinear, IncentiveKind::superlinear}) {
        auto one = build_incentives(g, campaigns, {kind, 0.2}, SpreadSource::exact);
        auto two = build_incentives(g, campaigns, {kind, 0.4}, SpreadSource::exact);
        for (NodeId u = 0; u < 7; ++u) {
            CHECK(two.cost(0, u) == doctest::Approx(2.0 * one.cost(0, u)));
        }
    }
}

TEST_CASE("incentive table validation") {
    CHECK_THROWS_AS(IncentiveTable::from_matrix(1, 2, {0.5, -0.1}, SpreadSource::exact),
                    std::invalid_argument);
    CHECK_THROWS_AS(IncentiveTable::from_matrix(1, 2, {0.5}, SpreadSource::exact),
                    std::invalid_argument);
    // affordability: cheapest incentive above the smallest budget
    auto table = IncentiveTable::from_matrix(1, 2, {5.0, 6.0}, SpreadSource::exact);
    const std::vector<AdCampaign> campaigns{AdCampaign(0, {1.0}, 1.0, 4.0)};
    CHECK_THROWS_AS(table.check_affordability(campaigns), std::runtime_error);
    const std::vector<AdCampaign> richer{AdCampaign(0, {1.0}, 1.0, 5.0)};
    CHECK_NOTHROW(table.check_affordability(richer));
}

TEST_CASE("payment adds engagement revenue and incentives") {
    const SpreadOracle oracle = SpreadOracle::exact();
    SUBCASE("empty seed set pays nothing") {
        Graph g = star(2);
        AdCampaign c = unit_campaign();
        auto table = IncentiveTable::from_matrix(1, 3, {1.0, 1.0, 1.0}, SpreadSource::exact);
        CHECK(payment(g, c, table, {}, oracle) == 0.0);
    }
    SUBCASE("tightness instance: seeding b pays 3 + 4 = 7") {
        Instance inst = make_tightness_instance();
        const NodeId b[1] = {0};
        CHECK(payment(inst.graph, inst.campaigns[0], inst.incentives, b, oracle) ==
              doctest::Approx(7.0));
    }
    SUBCASE("cpe 2, spread 3, zero costs -> 6") {
        Graph g = make_graph(3, {{0, 1, 1.0}, {1, 2, 1.0}});
        AdCampaign c(0, {1.0}, 2.0, 100.0);
        auto table = IncentiveTable::from_matrix(1, 3, {0.0, 0.0, 0.0}, SpreadSource::exact);
        const NodeId a[1] = {0};
        CHECK(payment(g, c, table, a, oracle) == doctest::Approx(6.0));
    }
}

TEST_CASE("pair feasibility") {
    Instance inst = make_tightness_instance();
    const SpreadOracle oracle = SpreadOracle::exact();
    Allocation alloc(1);
    SUBCASE("empty allocation, affordable node") {
        CHECK(is_feasible(inst, alloc, 1, 0, oracle));
    }
    SUBCASE("budget exactly met is feasible (non-strict)") {
        CHECK(is_feasible(inst, alloc, 0, 0, oracle)); // rho({b}) = 7 = B
    }
    SUBCASE("node already seeded elsewhere violates the matroid") {
        Instance two = inst;
        two.campaigns.push_back(AdCampaign(1, {1.0}, 1.0, 7.0));
        std::vector<double> costs(14, 0.5);
        two.incentives = IncentiveTable::from_matrix(2, 7, std::move(costs), SpreadSource::exact);
        Allocation a2(2);
        a2.seed_sets[1].push_back(3);
        CHECK(!is_feasible(two, a2, 3, 0, oracle));
        CHECK(is_feasible(two, a2, 4, 0, oracle));
    }
    SUBCASE("over budget is infeasible") {
        alloc.seed_sets[0].push_back(0); // b, payment 7 = B
        CHECK(!is_feasible(inst, alloc, 1, 0, oracle));
    }
}

TEST_CASE("payment is monotone and submodular on small instances") {
    Rng rng(8);
    const SpreadOracle oracle = SpreadOracle::exact();
    for (int trial = 0; trial < 6; ++trial) {
        const NodeId n = 3 + rng.next_below(3);
        Graph g = random_graph(rng, n, 9);
        AdCampaign c = unit_campaign();
        std::vector<double> costs;
        for (NodeId u = 0; u < n; ++u) {
            costs.push_back(rng.next_double());
        }
        auto table = IncentiveTable::from_matrix(1, n, costs, SpreadSource::exact);
        auto rho = [&](std::uint32_t mask) {
            std::vector<NodeId> seeds;
            for (NodeId u = 0; u < n; ++u) {
                if (mask & (1u << u)) {
                    seeds.push_back(u);
                }
            }
            return payment(g, c, table, seeds, oracle);
        };
        std::vector<double> f(1u << n);
        for (std::uint32_t mask = 0; mask < f.size(); ++mask) {
            f[mask] = rho(mask);
        }
        const std::uint32_t full = (1u << n) - 1u;
        for (std::uint32_t small = 0; small <= full; ++small) {
            for (std::uint32_t large = small; large <= full; ++large) {
                if ((small & large) != small) {
                    continue;
                }
                CHECK(f[small] <= f[large] + 1e-12);
                for (NodeId x = 0; x < n; ++x) {
                    const std::uint32_t bit = 1u << x;
                    if (large & bit) {
                        continue;
                    }
                    CHECK(f[large | bit] - f[large] <= f[small | bit] - f[small] + 1e-9);
                }
            }
        }
    }
}

TEST_CASE("feasible allocations are downward closed") {
    const SpreadOracle oracle = SpreadOracle::exact();
    SUBCASE("tightness instance allocations") {
        Instance inst = make_tightness_instance();
        Allocation alloc(1);
        alloc.seed_sets[0] = {1, 2}; // {a, c}
        CHECK(downward_closure_check(inst, alloc, oracle));
        Allocation empty(1);
        CHECK(downward_closure_check(inst, empty, oracle));
    }
    SUBCASE("random feasible allocations, many trials") {
        Rng rng(21);
        for (int trial = 0; trial < 150; ++trial) {
            Instance inst = random_bound_instance(rng);
            // grow a random feasible allocation greedily
            Allocation alloc(inst.campaigns.size());
            for (int step = 0; step < 6; ++step) {
                const NodeId u = rng.next_below(inst.graph.node_count());
                const AdId i = rng.next_below(static_cast<std::uint32_t>(inst.campaigns.size()));
                if (is_feasible(inst, alloc, u, i, oracle)) {
                    alloc.seed_sets[i].push_back(u);
                }
            }
            CHECK(downward_closure_check(inst, alloc, oracle));
        }
    }
}
