#include <random>

#include "doctest.h"
#include "generators.hpp"
#include "stclear/builtins.hpp"
#include "stclear/settlement.hpp"
#include "stclear/solve.hpp"

using namespace stclear;

TEST_CASE("temporal scenario 2: payments, revenues and profits") {
    auto cs = clear_scenario(builtin_temporal(2));
    auto st = settle(cs);
    CHECK(st.total_load_payment == doctest::Approx(3450.0));
    CHECK(st.total_supplier_revenue == doctest::Approx(2970.0));
    CHECK(st.total_vlink_revenue == doctest::Approx(480.0));
    CHECK(st.demand_profit_total(0) == doctest::Approx(3650.0));
    CHECK(st.vlink_profit_sum() == doctest::Approx(456.0));
    CHECK(st.supplier_profit_total(0) == doctest::Approx(750.0));
}

TEST_CASE("surplus on table allocations") {
    Scenario sc = builtin_temporal(4);
    Allocation a;
    a.d = {{70, 25, 50, 40}};
    a.p = {{50, 45, 50, 40}};
    a.delta = {20, 0, 0, 0};
    CHECK(surplus(sc, a) == doctest::Approx(5040.0));

    Allocation zero;
    zero.d = {{0, 0, 0, 0}};
    zero.p = {{0, 0, 0, 0}};
    zero.delta = {0, 0, 0, 0};
    CHECK(surplus(sc, zero) == doctest::Approx(0.0));

    Scenario sc2 = builtin_temporal(2);
    Allocation a2;
    a2.d = {{56, 25, 48, 40}};
    a2.p = {{48, 33, 48, 40}};
    a2.delta = {8, 0, 0, 0};
    // independently: 7100 value served - 2220 supply cost - 24 shift cost
    CHECK(surplus(sc2, a2) == doctest::Approx(7100.0 - 2220.0 - 24.0));
    CHECK(surplus(sc2, a2) == doctest::Approx(4856.0));
}

TEST_CASE("surplus rejects mismatched allocations") {
    Scenario sc = builtin_temporal(1);
    Allocation a;
    a.d = {{1, 2, 3}};  // wrong horizon
    a.p = {{0, 0, 0, 0}};
    a.delta = {0, 0, 0, 0};
    CHECK_THROWS_AS(surplus(sc, a), std::invalid_argument);
}

TEST_CASE("zero shifts and flat prices mean zero link and line revenue") {
    auto cs = clear_scenario(builtin_temporal(1));
    auto st = settle(cs);
    CHECK(st.total_vlink_revenue == doctest::Approx(0.0));
    CHECK(st.total_transmission_revenue == doctest::Approx(0.0));
}

TEST_CASE("settlement requires an optimal solution") {
    auto cs = clear_scenario(builtin_temporal(1));
    cs.sol.status = simplex::Status::infeasible;
    CHECK_THROWS_AS(settle(cs), std::invalid_argument);
}

TEST_CASE("pi_hat equals pi plus omega everywhere") {
    auto cs = clear_scenario(builtin_seven_bus(5));
    auto st = settle(cs);
    for (size_t a = 0; a < st.pi.size(); ++a)
        CHECK(st.pi_hat[a] == doctest::Approx(st.pi[a] + st.omega[a]).epsilon(1e-12));
    // omega sides never both active
    for (size_t a = 0; a < st.pi.size(); ++a)
        CHECK(st.omega_l[a] * st.omega_u[a] <= 1e-7);
}

TEST_CASE("revenue adequacy identity on random scenarios") {
    std::mt19937 rng(911);
    int checked = 0;
    for (int trial = 0; trial < 40; ++trial) {
        Scenario sc = gen::random_small_scenario(rng);
        if (!validate(sc).empty()) continue;
        auto cs = clear_scenario(sc);
        REQUIRE(cs.sol.optimal());
        auto st = settle(cs);
        CHECK(std::fabs(st.total_load_payment - st.total_revenue()) <= 1e-6);
        ++checked;
    }
    CHECK(checked >= 30);
}

TEST_CASE("prosumer identity: hub charge plus shift revenue regroups to per-node form") {
    std::mt19937 rng(5150);
    for (int trial = 0; trial < 10; ++trial) {
        Scenario sc = gen::random_disagg_scenario(rng);
        if (!validate(sc).empty()) continue;
        auto cs = clear_scenario(sc);
        auto st = settle(cs);
        int flex = 0;
        int hub = sc.node_index(sc.demands[flex].node);
        double alpha = sc.demands[flex].price[0];
        double d = cs.d(flex, 1);
        double lhs = (alpha - cs.pi_hat(hub, 1)) * d;
        double shifted = 0.0;
        for (size_t v = 0; v < sc.virtual_links.size(); ++v) {
            const auto& vl = sc.virtual_links[v];
            lhs += (cs.pi_hat_at(vl.snd) - cs.pi_hat_at(vl.rec) - vl.price) * cs.delta((int)v);
            shifted += cs.delta((int)v);
        }
        double rhs = (alpha - cs.pi_hat(hub, 1)) * (d - shifted);
        for (size_t v = 0; v < sc.virtual_links.size(); ++v) {
            const auto& vl = sc.virtual_links[v];
            rhs += (alpha - cs.pi_hat_at(vl.rec) - vl.price) * cs.delta((int)v);
        }
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-9));
        CHECK(st.demand_profit_total(flex) + st.vlink_profit_sum() == doctest::Approx(lhs).epsilon(1e-9));
    }
}
