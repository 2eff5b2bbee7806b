#include <thread>
#include "doctest.h"
#include "oracles.hpp"
#include "stclear/builtins.hpp"
#include "stclear/settlement.hpp"
#include "stclear/solve.hpp"

using namespace stclear;

TEST_CASE("uncongested single node: marginal supplier sets the price") {
    Scenario sc;
    sc.horizon = 1;
    sc.nodes = {"n"};
    sc.network_model = NetworkModel::transport;
    sc.suppliers.push_back({"g", "n", {1.0}, {10.0}, std::nullopt});
    sc.demands.push_back({"l", "n", {5.0}, {5.0}});
    auto cs = clear_scenario(sc);
    REQUIRE(cs.sol.optimal());
    CHECK(cs.d(0, 1) == doctest::Approx(5.0));
    CHECK(cs.p(0, 1) == doctest::Approx(5.0));
    CHECK(cs.pi(0, 1) == doctest::Approx(1.0));
}

TEST_CASE("temporal base case clears at surplus 4400") {
    auto cs = clear_scenario(builtin_temporal(1));
    REQUIRE(cs.sol.optimal());
    CHECK(cs.sol.objective == doctest::Approx(-4400.0));
}

TEST_CASE("solution invariants hold on every temporal scenario") {
    for (int id = 1; id <= 9; ++id) {
        auto cs = clear_scenario(builtin_temporal(id));
        REQUIRE(cs.sol.optimal());
        CHECK(cs.sol.max_primal_residual <= 1e-8);
        CHECK(cs.sol.max_dual_residual <= 1e-8);
        CHECK(cs.sol.max_compl_residual <= 1e-7);
        CHECK(cs.sol.duality_gap <= 1e-7);
    }
}

TEST_CASE("flow subproblem: no arbitrage at flat prices") {
    Scenario sc = builtin_seven_bus(1);
    std::vector<double> pi(7, 4.0);
    auto fs = solve_subproblem_flows(sc, 1, pi);
    CHECK(fs.value == doctest::Approx(0.0));
    for (double f : fs.flows) CHECK(f == doctest::Approx(0.0));
}

TEST_CASE("flow subproblem: saturate a transport edge when the gap pays") {
    Scenario sc;
    sc.horizon = 1;
    sc.nodes = {"a", "b"};
    sc.network_model = NetworkModel::transport;
    sc.lines.push_back({"l", "a", "b", 1.0, 7.0, 1.0, 0.4});
    auto fs = solve_subproblem_flows(sc, 1, {1.0, 3.0});
    CHECK(fs.value == doctest::Approx((3.0 - 1.0 - 0.4) * 7.0));
    CHECK(fs.flows[0] == doctest::Approx(7.0));
    CHECK(fs.flows[1] == doctest::Approx(0.0));
}

TEST_CASE("flow subproblem on a dc cycle matches vertex enumeration") {
    Scenario sc;
    sc.horizon = 1;
    sc.nodes = {"a", "b", "c"};
    sc.network_model = NetworkModel::dc;
    sc.lines.push_back({"lab", "a", "b", 1.0, 4.0, 10.0, 0.2});
    sc.lines.push_back({"lbc", "b", "c", 2.0, 6.0, 10.0, 0.2});
    sc.lines.push_back({"lca", "c", "a", 1.0, 5.0, 10.0, 0.2});
    std::vector<double> pi = {1.0, 4.0, 2.5};

    auto fs = solve_subproblem_flows(sc, 1, pi);

    // independent route: enumerate vertices of the same feasible set
    simplex::Problem p;
    int E = 6;
    for (int k = 0; k < E; ++k) {
        double gain = pi[sc.node_index(edge::rec(sc, k))] - pi[sc.node_index(edge::snd(sc, k))] -
                      edge::price(sc, k);
        p.cost.push_back(-gain);
        p.lo.push_back(0.0);
        p.up.push_back(simplex::kInf);
    }
    for (int n = 0; n < 3; ++n) {
        p.cost.push_back(0.0);
        p.lo.push_back(n == 0 ? 0.0 : -simplex::kInf);
        p.up.push_back(n == 0 ? 0.0 : simplex::kInf);
    }
    for (int l = 0; l < 3; ++l) {
        const auto& line = sc.lines[l];
        int ns = E + sc.node_index(line.snd), nr = E + sc.node_index(line.rec);
        simplex::Problem::Row dc{{{2 * l, 1.0}, {2 * l + 1, -1.0}, {ns, -line.susceptance}, {nr, line.susceptance}}, 0.0, 0.0};
        std::sort(dc.coef.begin(), dc.coef.end());
        p.rows.push_back(dc);
        simplex::Problem::Row ang{{{ns, 1.0}, {nr, -1.0}}, -line.effective_angle_cap(), line.effective_angle_cap()};
        std::sort(ang.coef.begin(), ang.coef.end());
        p.rows.push_back(ang);
    }
    auto ref = oracle::enumerate_vertices(p);
    REQUIRE(ref.feasible);
    CHECK(fs.value == doctest::Approx(-ref.objective).epsilon(1e-9));
}

TEST_CASE("reproducibility: identical scenario, identical solution bytes") {
    auto a = clear_scenario(builtin_temporal(7));
    auto b = clear_scenario(builtin_temporal(7));
    CHECK(a.sol.primal == b.sol.primal);
    CHECK(a.sol.dual == b.sol.dual);
}

TEST_CASE("clearing objective matches vertex enumeration at 12 variables") {
    LPInstance lp = build(builtin_temporal(3));
    REQUIRE(lp.num_vars() == 12);
    std::vector<detail::RowMap> rmap;
    simplex::Problem p = detail::to_simplex(lp, rmap);
    auto ref = oracle::enumerate_vertices(p);
    auto sol = solve(lp);
    REQUIRE(ref.feasible);
    CHECK(sol.objective == doctest::Approx(ref.objective).epsilon(1e-9));
}

TEST_CASE("iteration cap reports the pivot-rule state") {
    LPInstance lp = build(builtin_temporal(9));
    SolveOptions opts;
    opts.max_iterations = 2;
    try {
        solve(lp, opts);
        FAIL("expected an error");
    } catch (const std::runtime_error& e) {
        CHECK(std::string(e.what()).find("pivot rule") != std::string::npos);
    }
}

TEST_CASE("concurrent solves on shared scenarios match serial results") {
    Scenario a = builtin_seven_bus(3);
    Scenario b = builtin_temporal(7);
    auto ref_a = clear_scenario(a);
    auto ref_b = clear_scenario(b);
    std::vector<std::thread> pool;
    std::vector<double> got(8, 0.0);
    for (int w = 0; w < 8; ++w) {
        pool.emplace_back([&, w] {
            const Scenario& sc = w % 2 == 0 ? a : b;
            got[w] = clear_scenario(sc).sol.objective;
        });
    }
    for (auto& t : pool) t.join();
    for (int w = 0; w < 8; ++w)
        CHECK(got[w] == (w % 2 == 0 ? ref_a : ref_b).sol.objective);
}
