#include <random>

#include "doctest.h"
#include "generators.hpp"
#include "stclear/builtins.hpp"
#include "stclear/settlement.hpp"
#include "stclear/verify.hpp"

using namespace stclear;

namespace {

std::vector<double> flat_pi(const ClearingSolution& cs) {
    std::vector<double> pi(static_cast<size_t>(cs.N()) * cs.T());
    for (int n = 0; n < cs.N(); ++n)
        for (int t = 1; t <= cs.T(); ++t) pi[cs.st(n, t)] = cs.pi(n, t);
    return pi;
}

void flat_omega(const ClearingSolution& cs, std::vector<double>& ol, std::vector<double>& ou) {
    ol.assign(static_cast<size_t>(cs.N()) * cs.T(), 0.0);
    ou.assign(ol.size(), 0.0);
    for (int n = 0; n < cs.N(); ++n) {
        for (int t = 1; t <= cs.T(); ++t) {
            ol[cs.st(n, t)] = cs.omega_l(n, t);
            ou[cs.st(n, t)] = cs.omega_u(n, t);
        }
    }
}

}  // namespace

TEST_CASE("competitive equilibrium holds on every builtin") {
    for (int id = 1; id <= 9; ++id) {
        auto cs = clear_scenario(builtin_temporal(id));
        auto st = settle(cs);
        auto rec = check_competitive_equilibrium(cs, st);
        INFO("temporal ", id, " residual ", rec.max_residual);
        CHECK(rec.status == CheckStatus::pass);
    }
    for (int id = 1; id <= 7; ++id) {
        auto cs = clear_scenario(builtin_seven_bus(id));
        auto st = settle(cs);
        auto rec = check_competitive_equilibrium(cs, st);
        INFO("sevenbus ", id, " residual ", rec.max_residual);
        CHECK(rec.status == CheckStatus::pass);
    }
}

TEST_CASE("competitive equilibrium fails on a hand-shifted allocation") {
    // divert one shifted MWh onto the negative-profit link (1,3) of temporal 5
    auto cs = clear_scenario(builtin_temporal(5));
    int v12 = 0, v13 = 1;
    REQUIRE(cs.scenario.virtual_links[v13].snd.time == 1);
    REQUIRE(cs.scenario.virtual_links[v13].rec.time == 3);
    cs.sol.primal[cs.layout.delta(v12)] -= 1.0;
    cs.sol.primal[cs.layout.delta(v13)] += 1.0;
    cs.sol.primal[cs.layout.p(0, 2)] -= 1.0;  // t2 receives one MWh less
    cs.sol.primal[cs.layout.d(0, 3)] -= 1.0;  // t3 absorbs the shifted MWh
    auto st = settle(cs);
    auto rec = check_competitive_equilibrium(cs, st);
    CHECK(rec.status == CheckStatus::fail);
}

TEST_CASE("trivial one-node market is an equilibrium") {
    Scenario sc;
    sc.horizon = 1;
    sc.nodes = {"n"};
    sc.network_model = NetworkModel::transport;
    sc.suppliers.push_back({"g", "n", {1.0}, {5.0}, std::nullopt});
    sc.demands.push_back({"l", "n", {1.0}, {5.0}});
    auto cs = clear_scenario(sc);
    auto st = settle(cs);
    CHECK(check_competitive_equilibrium(cs, st).status == CheckStatus::pass);
}

TEST_CASE("revenue adequacy on the cited rows") {
    {
        auto cs = clear_scenario(builtin_temporal(2));
        auto st = settle(cs);
        CHECK(check_revenue_adequacy(st).status == CheckStatus::pass);
        CHECK(st.total_load_payment == doctest::Approx(3450.0));
        CHECK(st.total_revenue() == doctest::Approx(2970.0 + 480.0));
    }
    {
        auto cs = clear_scenario(builtin_seven_bus(1));
        auto st = settle(cs);
        CHECK(check_revenue_adequacy(st).status == CheckStatus::pass);
        CHECK(st.total_load_payment == doctest::Approx(373.0));
        CHECK(st.total_vlink_revenue == doctest::Approx(0.0));
    }
    {
        Scenario sc = builtin_temporal(1);
        for (auto& d : sc.demands) d.price.assign(4, 0.0);  // nothing clears
        auto cs = clear_scenario(sc);
        auto st = settle(cs);
        CHECK(st.total_load_payment == doctest::Approx(0.0));
        CHECK(check_revenue_adequacy(st).status == CheckStatus::pass);
    }
}

TEST_CASE("cost recovery: horizon mode carries the ramping scenarios") {
    auto cs = clear_scenario(builtin_temporal(2));
    auto st = settle(cs);
    // the supplier runs hour 2 at a loss to stay inside the ramp corridor
    CHECK(st.supplier_profit[0][1] == doctest::Approx((-30.0 - 20.0) * 33.0));
    CHECK(st.supplier_profit_total(0) == doctest::Approx(750.0));
    auto rec = check_cost_recovery(cs, st, CostRecoveryMode::per_node_time);
    CHECK(rec.status == CheckStatus::pass);  // auto-downgraded
    CHECK(rec.details.find("horizon") != std::string::npos);
    auto rec2 = check_cost_recovery(cs, st, CostRecoveryMode::per_player_horizon);
    CHECK(rec2.status == CheckStatus::pass);
}

TEST_CASE("cost recovery per node and time on the 7-bus scenarios") {
    for (int id = 1; id <= 7; ++id) {
        auto cs = clear_scenario(builtin_seven_bus(id));
        auto st = settle(cs);
        auto rec = check_cost_recovery(cs, st, CostRecoveryMode::per_node_time);
        INFO("sevenbus ", id);
        CHECK(rec.status == CheckStatus::pass);
    }
}

TEST_CASE("price bounds: cleared bids bracket the nodal price") {
    {
        auto cs = clear_scenario(builtin_seven_bus(1));
        auto rec = check_price_bounds(cs);
        CHECK(rec.status == CheckStatus::pass);
        // node 6: cleared 3 $/MWh generator, cleared 15 $/MWh load
        CHECK(cs.pi(5, 1) == doctest::Approx(15.0));
        CHECK(cs.p(2, 1) > 1e-6);  // S6
    }
    {
        auto cs = clear_scenario(builtin_temporal(3));
        auto rec = check_price_bounds(cs);
        CHECK(rec.status == CheckStatus::pass);
        CHECK(cs.pi(0, 1) == doctest::Approx(30.0));
    }
    {
        // an isolated node with nothing cleared is skipped
        Scenario sc;
        sc.horizon = 1;
        sc.nodes = {"n"};
        sc.network_model = NetworkModel::transport;
        sc.suppliers.push_back({"g", "n", {10.0}, {5.0}, std::nullopt});
        sc.demands.push_back({"l", "n", {2.0}, {5.0}});  // bid below cost
        auto cs = clear_scenario(sc);
        CHECK(check_price_bounds(cs).status == CheckStatus::skipped);
    }
}

TEST_CASE("virtual-link congestion relations") {
    for (int id = 1; id <= 7; ++id) {
        auto cs = clear_scenario(builtin_seven_bus(id));
        auto rec = check_vlink_congestion(cs);
        INFO("sevenbus ", id);
        CHECK(rec.status != CheckStatus::fail);
    }
    // a link with zero flow asserts nothing
    auto cs = clear_scenario(builtin_temporal(5));
    CHECK(cs.delta(1) == doctest::Approx(0.0));
    CHECK(check_vlink_congestion(cs).status == CheckStatus::pass);
    // interior link pins the gap to the shift cost: capacity 11 leaves slack
    Scenario sc = builtin_seven_bus(3);
    for (auto& v : sc.virtual_links) v.capacity = 11.0;
    auto cs2 = clear_scenario(sc);
    auto rec = check_vlink_congestion(cs2);
    CHECK(rec.status == CheckStatus::pass);
    double gap = cs2.pi_hat(6, 1) - cs2.pi_hat(0, 1);
    CHECK(gap == doctest::Approx(0.3).epsilon(1e-6));
}

TEST_CASE("temporal scenario 7: saturated boundary link classified cleanly") {
    auto cs = clear_scenario(builtin_temporal(7));
    CHECK(cs.delta(3) == doctest::Approx(10.0));  // (3,4) at its 10 MWh cap
    CHECK(check_vlink_congestion(cs).status != CheckStatus::fail);
}

TEST_CASE("disaggregation equivalence") {
    {
        // hub-only consumer: identical market, equal objectives
        Scenario sc;
        sc.horizon = 1;
        sc.nodes = {"a", "b"};
        sc.network_model = NetworkModel::transport;
        sc.lines.push_back({"l", "a", "b", 1.0, 3.0, 1.0, 0.1});
        sc.suppliers.push_back({"g", "b", {2.0}, {10.0}, std::nullopt});
        sc.demands.push_back({"c", "a", {9.0}, {6.0}});
        auto rec = check_disaggregation_equivalence(sc);
        CHECK(rec.status == CheckStatus::pass);
    }
    {
        // 3-node star with a cheap remote generator
        Scenario sc;
        sc.horizon = 1;
        sc.nodes = {"hub", "b", "c"};
        sc.network_model = NetworkModel::transport;
        sc.lines.push_back({"l1", "hub", "b", 1.0, 4.0, 1.0, 0.1});
        sc.lines.push_back({"l2", "hub", "c", 1.0, 4.0, 1.0, 0.1});
        sc.suppliers.push_back({"g1", "hub", {20.0}, {30.0}, std::nullopt});
        sc.suppliers.push_back({"g2", "c", {2.0}, {30.0}, std::nullopt});
        sc.demands.push_back({"dace", "hub", {25.0}, {12.0}});
        sc.computing_cap[{"hub", 1}] = 12.0;
        for (std::string n : {"b", "c"}) {
            VirtualLink vl;
            vl.id = "to_" + n;
            vl.snd = {"hub", 1};
            vl.rec = {n, 1};
            vl.price = 0.0;
            vl.capacity = 12.0;
            vl.owner = "dace";
            sc.virtual_links.push_back(vl);
        }
        LPInstance dn = build_disaggregation(sc);
        int agg_rows = 0, node_loads = 0;
        for (const auto& r : dn.rows)
            if (r.ref.kind == RowKind::total_load) ++agg_rows;
        for (int j = 0; j < dn.num_vars(); ++j)
            if (dn.var_refs[j].kind == VarKind::node_load) ++node_loads;
        CHECK(agg_rows == 1);
        CHECK(node_loads == 3);
        auto rec = check_disaggregation_equivalence(sc);
        CHECK(rec.status == CheckStatus::pass);
        CHECK(rec.max_residual <= 1e-7);
    }
    {
        // zero requested load equals the no-consumer market
        Scenario sc;
        sc.horizon = 1;
        sc.nodes = {"a", "b"};
        sc.network_model = NetworkModel::transport;
        sc.lines.push_back({"l", "a", "b", 1.0, 3.0, 1.0, 0.0});
        sc.suppliers.push_back({"g", "a", {2.0}, {10.0}, std::nullopt});
        sc.demands.push_back({"c", "a", {9.0}, {0.0}});
        VirtualLink vl{"v", {"a", 1}, {"b", 1}, 0.0, 5.0, "c"};
        sc.virtual_links.push_back(vl);
        sc.computing_cap[{"a", 1}] = 0.0;
        auto rec = check_disaggregation_equivalence(sc);
        CHECK(rec.status == CheckStatus::pass);
        auto sol = solve(build(sc));
        CHECK(sol.objective == doctest::Approx(0.0));
    }
}

TEST_CASE("dual function: strong duality at the optimum, closed form at zero") {
    for (int id : {1, 4, 9}) {
        auto cs = clear_scenario(builtin_temporal(id));
        std::vector<double> ol, ou;
        flat_omega(cs, ol, ou);
        double dv = eval_dual_function(cs.scenario, flat_pi(cs), ol, ou);
        CHECK(dv == doctest::Approx(cs.sol.objective).epsilon(1e-9));
    }
    {
        auto cs = clear_scenario(builtin_seven_bus(5));
        std::vector<double> ol, ou;
        flat_omega(cs, ol, ou);
        double dv = eval_dual_function(cs.scenario, flat_pi(cs), ol, ou);
        CHECK(std::fabs(dv - cs.sol.objective) <= 1e-6);
    }
    {
        // pi = 0, omega = 0, no flows: D is minus the served value of all bids
        Scenario sc = builtin_temporal(3);
        std::vector<double> zero(4, 0.0);
        double expect = 0.0;
        for (int t = 0; t < 4; ++t)
            expect -= std::max(sc.demands[0].price[t], 0.0) * sc.demands[0].capacity[t];
        CHECK(eval_dual_function(sc, zero, zero, zero) == doctest::Approx(expect));
    }
}

TEST_CASE("dual function rejects omega at unbounded nodes") {
    Scenario sc = builtin_temporal(1);  // no computing caps anywhere
    std::vector<double> pi(4, 0.0), ol(4, 0.0), ou(4, 0.0);
    ou[2] = 1.0;
    CHECK_THROWS_AS(eval_dual_function(sc, pi, ol, ou), std::invalid_argument);
}

TEST_CASE("weak duality: random perturbations stay below the optimum") {
    std::mt19937 rng(333);
    std::normal_distribution<double> G(0.0, 1.0);
    auto cs = clear_scenario(builtin_temporal(6));
    std::vector<double> pi = flat_pi(cs), ol, ou;
    flat_omega(cs, ol, ou);
    double opt = cs.sol.objective;
    int strict = 0;
    for (int s = 0; s < 100; ++s) {
        std::vector<double> ppert = pi;
        for (auto& v : ppert) v += G(rng);
        double dv = eval_dual_function(cs.scenario, ppert, ol, ou);
        CHECK(dv <= opt + 1e-9);
        if (dv < opt - 1e-9) ++strict;
    }
    CHECK(strict == 100);
}

TEST_CASE("subgradient cases for single players") {
    // supplier strictly out of the money contributes {0}
    Scenario sc;
    sc.horizon = 1;
    sc.nodes = {"n"};
    sc.network_model = NetworkModel::transport;
    sc.suppliers.push_back({"g", "n", {10.0}, {7.0}, std::nullopt});
    sc.demands.push_back({"l", "n", {10.0}, {4.0}});
    std::vector<double> ol(1, 0.0), ou(1, 0.0);
    {
        Interval iv = subgradient_interval(sc, {5.0}, ol, ou, {"n", 1});
        // supplier term {0}; demand term {-4} since the bid is in the money
        CHECK(iv.lo == doctest::Approx(-4.0));
        CHECK(iv.hi == doctest::Approx(-4.0));
    }
    {
        // demand at the tie contributes [-cap, 0]
        Interval iv = subgradient_interval(sc, {10.0}, ol, ou, {"n", 1});
        CHECK(iv.lo == doctest::Approx(-4.0));  // [-4,0] plus supplier tie [0,7]
        CHECK(iv.hi == doctest::Approx(7.0));
    }
}

TEST_CASE("zero is a subgradient at the solved duals everywhere") {
    for (int id = 1; id <= 9; ++id) {
        auto cs = clear_scenario(builtin_temporal(id));
        std::vector<double> ol, ou;
        flat_omega(cs, ol, ou);
        auto pi = flat_pi(cs);
        for (int t = 1; t <= 4; ++t) {
            Interval iv = subgradient_interval(cs.scenario, pi, ol, ou, {"n1", t});
            INFO("temporal ", id, " t", t, " [", iv.lo, ",", iv.hi, "]");
            CHECK(iv.contains(0.0, 1e-6));
        }
    }
    for (int id : {1, 3, 5, 7}) {
        auto cs = clear_scenario(builtin_seven_bus(id));
        std::vector<double> ol, ou;
        flat_omega(cs, ol, ou);
        auto pi = flat_pi(cs);
        for (int n = 0; n < 7; ++n) {
            Interval iv = subgradient_interval(cs.scenario, pi, ol, ou,
                                               {cs.scenario.nodes[n], 1});
            INFO("sevenbus ", id, " node ", n + 1, " [", iv.lo, ",", iv.hi, "]");
            CHECK(iv.contains(0.0, 1e-4));
        }
    }
}

TEST_CASE("full verification passes on builtins and random scenarios") {
    for (int id = 1; id <= 9; ++id) {
        auto cs = clear_scenario(builtin_temporal(id));
        auto st = settle(cs);
        auto rep = run_verification(cs, st);
        INFO("temporal ", id, "\n");
        CHECK(rep.all_pass());
    }
    std::mt19937 rng(777);
    int done = 0;
    for (int trial = 0; trial < 25; ++trial) {
        Scenario sc = gen::random_small_scenario(rng);
        if (!validate(sc).empty()) continue;
        auto cs = clear_scenario(sc);
        auto st = settle(cs);
        auto rep = run_verification(cs, st);
        INFO("random trial ", trial);
        CHECK(rep.all_pass());
        ++done;
    }
    CHECK(done >= 18);
}

TEST_CASE("check subset selection") {
    auto cs = clear_scenario(builtin_temporal(1));
    auto st = settle(cs);
    auto rep = run_verification(cs, st, {"revenue_adequacy"});
    REQUIRE(rep.records.size() == 1);
    CHECK(rep.records[0].name == "revenue_adequacy");
}
