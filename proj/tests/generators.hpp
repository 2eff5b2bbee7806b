// Seeded random scenario generators for property tests.
#pragma once

#include <random>
#include <string>
#include <vector>

#include "stclear/types.hpp"

namespace gen {

using stclear::Demand;
using stclear::NetworkModel;
using stclear::Scenario;
using stclear::Supplier;
using stclear::TransmissionLine;
using stclear::VirtualLink;

/// Connected market with up to 6 nodes, 3 hours and 12 players; random
/// virtual links, computing caps and ramp limits.
inline Scenario random_small_scenario(std::mt19937& rng) {
    std::uniform_real_distribution<double> U(0.0, 1.0);
    auto uniform = [&](double lo, double hi) { return lo + (hi - lo) * U(rng); };
    auto pick = [&](int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng); };

    Scenario sc;
    sc.name = "random";
    int N = 1 + pick(6);
    sc.horizon = 1 + pick(3);
    for (int n = 0; n < N; ++n) sc.nodes.push_back("n" + std::to_string(n + 1));
    sc.network_model = U(rng) < 0.5 ? NetworkModel::dc : NetworkModel::transport;

    // spanning tree plus a few extra edges
    int lid = 0;
    for (int n = 1; n < N; ++n) {
        TransmissionLine l;
        l.id = "l" + std::to_string(++lid);
        l.snd = sc.nodes[pick(n)];
        l.rec = sc.nodes[n];
        l.susceptance = uniform(0.5, 2.0);
        l.flow_cap = uniform(1.0, 12.0);
        l.angle_cap = U(rng) < 0.3 ? uniform(0.5, 3.0) : 1.0e3;
        l.price = U(rng) < 0.5 ? 0.0 : uniform(0.0, 0.5);
        sc.lines.push_back(l);
    }
    for (int extra = pick(3); extra > 0 && N >= 2; --extra) {
        int a = pick(N), b = pick(N);
        if (a == b) continue;
        TransmissionLine l;
        l.id = "l" + std::to_string(++lid);
        l.snd = sc.nodes[a];
        l.rec = sc.nodes[b];
        l.susceptance = uniform(0.5, 2.0);
        l.flow_cap = uniform(1.0, 12.0);
        l.angle_cap = 1.0e3;
        l.price = uniform(0.0, 0.3);
        sc.lines.push_back(l);
    }

    int ns = 1 + pick(4), nd = 1 + pick(4);
    for (int i = 0; i < ns; ++i) {
        Supplier s;
        s.id = "g" + std::to_string(i + 1);
        s.node = sc.nodes[pick(N)];
        for (int t = 0; t < sc.horizon; ++t) {
            s.price.push_back(uniform(1.0, 30.0));
            s.capacity.push_back(uniform(0.0, 30.0));
        }
        if (sc.horizon > 1 && U(rng) < 0.3) s.ramp_limit = uniform(0.0, 15.0);
        sc.suppliers.push_back(s);
    }
    for (int j = 0; j < nd; ++j) {
        Demand d;
        d.id = "c" + std::to_string(j + 1);
        d.node = sc.nodes[pick(N)];
        for (int t = 0; t < sc.horizon; ++t) {
            d.price.push_back(uniform(5.0, 50.0));
            d.capacity.push_back(uniform(0.0, 30.0));
        }
        sc.demands.push_back(d);
    }

    int nv = pick(5);
    for (int v = 0; v < nv; ++v) {
        const Demand& owner = sc.demands[pick(nd)];
        int t1 = 1 + pick(sc.horizon);
        int t2 = t1 + pick(sc.horizon - t1 + 1);
        std::string rec_node = sc.nodes[pick(N)];
        if (rec_node == owner.node && t2 == t1) continue;
        VirtualLink vl;
        vl.id = "v" + std::to_string(v + 1);
        vl.snd = {owner.node, t1};
        vl.rec = {rec_node, t2};
        vl.price = U(rng) < 0.4 ? 0.0 : uniform(0.0, 4.0);
        vl.capacity = uniform(0.0, 10.0);
        vl.owner = owner.id;
        sc.virtual_links.push_back(vl);
    }

    for (const auto& d : sc.demands) {
        if (U(rng) < 0.4) {
            for (int t = 1; t <= sc.horizon; ++t)
                sc.computing_cap[{d.node, t}] = uniform(0.5, 1.8) * d.capacity[t - 1] + 1.0;
        }
    }
    return sc;
}

/// Single flexible consumer whose links fan out from the hub at one slice
/// with zero shift cost and non-binding capacity; the hub computing cap pins
/// the served-versus-shifted balance.
inline Scenario random_disagg_scenario(std::mt19937& rng) {
    std::uniform_real_distribution<double> U(0.0, 1.0);
    auto uniform = [&](double lo, double hi) { return lo + (hi - lo) * U(rng); };
    auto pick = [&](int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng); };

    Scenario sc;
    sc.name = "disagg";
    sc.horizon = 1;
    int N = 2 + pick(4);
    for (int n = 0; n < N; ++n) sc.nodes.push_back("n" + std::to_string(n + 1));
    sc.network_model = U(rng) < 0.5 ? NetworkModel::dc : NetworkModel::transport;
    int lid = 0;
    for (int n = 1; n < N; ++n) {
        TransmissionLine l;
        l.id = "l" + std::to_string(++lid);
        l.snd = sc.nodes[pick(n)];
        l.rec = sc.nodes[n];
        l.susceptance = uniform(0.5, 2.0);
        l.flow_cap = uniform(2.0, 15.0);
        l.angle_cap = 1.0e3;
        l.price = U(rng) < 0.5 ? 0.0 : uniform(0.0, 0.4);
        sc.lines.push_back(l);
    }
    int ns = 1 + pick(3);
    for (int i = 0; i < ns; ++i) {
        Supplier s;
        s.id = "g" + std::to_string(i + 1);
        s.node = sc.nodes[pick(N)];
        s.price = {uniform(1.0, 20.0)};
        s.capacity = {uniform(0.0, 25.0)};
        sc.suppliers.push_back(s);
    }
    Demand d;
    d.id = "dace";
    d.node = sc.nodes[pick(N)];
    d.price = {uniform(15.0, 60.0)};
    d.capacity = {uniform(1.0, 20.0)};
    sc.demands.push_back(d);
    sc.computing_cap[{d.node, 1}] = d.capacity[0];

    int v = 0;
    for (int n = 0; n < N; ++n) {
        if (sc.nodes[n] == d.node || U(rng) < 0.3) continue;
        VirtualLink vl;
        vl.id = "v" + std::to_string(++v);
        vl.snd = {d.node, 1};
        vl.rec = {sc.nodes[n], 1};
        vl.price = 0.0;
        vl.capacity = d.capacity[0] + uniform(0.0, 5.0);
        vl.owner = d.id;
        sc.virtual_links.push_back(vl);
    }
    return sc;
}

/// A chain of scenarios obtained by repeatedly enlarging the link set or
/// link capacities.
inline std::vector<Scenario> random_nested_chain(std::mt19937& rng) {
    std::uniform_real_distribution<double> U(0.0, 1.0);
    auto pick = [&](int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng); };
    std::vector<Scenario> chain;
    chain.push_back(random_small_scenario(rng));
    int steps = 1 + pick(3);
    for (int s = 0; s < steps; ++s) {
        Scenario next = chain.back();
        next.name += "+";
        if (!next.virtual_links.empty() && U(rng) < 0.6) {
            next.virtual_links[pick((int)next.virtual_links.size())].capacity += 5.0 * U(rng);
        } else {
            const Demand& owner = next.demands[pick((int)next.demands.size())];
            int t1 = 1 + pick(next.horizon);
            int t2 = t1 + pick(next.horizon - t1 + 1);
            std::string rec_node = next.nodes[pick((int)next.nodes.size())];
            if (rec_node == owner.node && t2 == t1) continue;
            VirtualLink vl;
            vl.id = "vx" + std::to_string(s) + "_" + std::to_string(chain.size());
            vl.snd = {owner.node, t1};
            vl.rec = {rec_node, t2};
            vl.price = 2.0 * U(rng);
            vl.capacity = 8.0 * U(rng);
            vl.owner = owner.id;
            next.virtual_links.push_back(vl);
        }
        chain.push_back(next);
    }
    return chain;
}

}  // namespace gen
