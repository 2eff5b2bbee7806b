// Payments, revenues, profits and adjusted prices from a cleared solution.
#pragma once

#include <stdexcept>
#include <vector>

#include "stclear/solve.hpp"

namespace stclear {

/// Primal allocation in market terms, indexed [player][t-1] (links: [v]).
struct Allocation {
    std::vector<std::vector<double>> d, p, f;
    std::vector<double> delta;
};

inline Allocation extract_allocation(const ClearingSolution& cs) {
    Allocation a;
    const int T = cs.T();
    a.d.resize(cs.scenario.demands.size());
    a.p.resize(cs.scenario.suppliers.size());
    a.f.resize(edge::count(cs.scenario));
    for (size_t j = 0; j < a.d.size(); ++j) {
        a.d[j].resize(T);
        for (int t = 1; t <= T; ++t) a.d[j][t - 1] = cs.d(static_cast<int>(j), t);
    }
    for (size_t i = 0; i < a.p.size(); ++i) {
        a.p[i].resize(T);
        for (int t = 1; t <= T; ++t) a.p[i][t - 1] = cs.p(static_cast<int>(i), t);
    }
    for (size_t k = 0; k < a.f.size(); ++k) {
        a.f[k].resize(T);
        for (int t = 1; t <= T; ++t) a.f[k][t - 1] = cs.f(static_cast<int>(k), t);
    }
    a.delta.resize(cs.scenario.virtual_links.size());
    for (size_t v = 0; v < a.delta.size(); ++v) a.delta[v] = cs.delta(static_cast<int>(v));
    return a;
}

/// Social surplus of an allocation: demand value served minus supply,
/// transmission and shifting costs. Equals the negated LP objective at the
/// optimum.
inline double surplus(const Scenario& sc, const Allocation& a) {
    const int T = sc.horizon;
    if (a.d.size() != sc.demands.size() || a.p.size() != sc.suppliers.size() ||
        a.f.size() != static_cast<size_t>(edge::count(sc)) ||
        a.delta.size() != sc.virtual_links.size())
        throw std::invalid_argument("allocation does not match the scenario");
    double v = 0.0;
    for (size_t j = 0; j < a.d.size(); ++j) {
        if ((int)a.d[j].size() != T) throw std::invalid_argument("allocation length mismatch");
        for (int t = 0; t < T; ++t) v += sc.demands[j].price[t] * a.d[j][t];
    }
    for (size_t i = 0; i < a.p.size(); ++i)
        for (int t = 0; t < T; ++t) v -= sc.suppliers[i].price[t] * a.p[i][t];
    for (size_t k = 0; k < a.f.size(); ++k)
        for (int t = 0; t < T; ++t) v -= edge::price(sc, static_cast<int>(k)) * a.f[k][t];
    for (size_t l = 0; l < a.delta.size(); ++l) v -= sc.virtual_links[l].price * a.delta[l];
    return v;
}

struct Settlement {
    int N = 0, T = 0;
    // per space-time node, flattened node*T + (t-1)
    std::vector<double> pi, omega_l, omega_u, omega, pi_hat;

    std::vector<double> load_payment;      // per demand, horizon total at pi
    std::vector<double> supplier_revenue;  // per supplier, at pi
    std::vector<double> line_revenue;      // per physical line, both directions
    std::vector<double> vlink_revenue;     // per link, at pi

    std::vector<std::vector<double>> demand_profit;    // [j][t-1], at pi_hat
    std::vector<std::vector<double>> supplier_profit;  // [i][t-1], at pi
    std::vector<double> vlink_profit;                  // [v], at pi_hat
    std::vector<std::vector<double>> edge_profit;      // [k][t-1]
    std::vector<double> transmission_profit_t;         // per t, summed over edges

    double total_load_payment = 0.0;
    double total_supplier_revenue = 0.0;
    double total_transmission_revenue = 0.0;
    double total_vlink_revenue = 0.0;

    double demand_profit_total(int j) const {
        double v = 0.0;
        for (double x : demand_profit[j]) v += x;
        return v;
    }
    double supplier_profit_total(int i) const {
        double v = 0.0;
        for (double x : supplier_profit[i]) v += x;
        return v;
    }
    double transmission_profit_total() const {
        double v = 0.0;
        for (double x : transmission_profit_t) v += x;
        return v;
    }
    double vlink_profit_sum() const {
        double v = 0.0;
        for (double x : vlink_profit) v += x;
        return v;
    }
    double total_revenue() const {
        return total_supplier_revenue + total_transmission_revenue + total_vlink_revenue;
    }
};

/// Cash settlement at the locational prices pi; profit expressions for
/// loads and shifts use the adjusted prices pi + omega.
inline Settlement settle(const ClearingSolution& cs) {
    if (!cs.sol.optimal()) throw std::invalid_argument("settlement requires an optimal solution");
    const Scenario& sc = cs.scenario;
    const int T = cs.T();
    const int N = cs.N();
    Settlement s;
    s.N = N;
    s.T = T;
    s.pi.resize(static_cast<size_t>(N) * T);
    s.omega_l.resize(s.pi.size());
    s.omega_u.resize(s.pi.size());
    s.omega.resize(s.pi.size());
    s.pi_hat.resize(s.pi.size());
    for (int n = 0; n < N; ++n) {
        for (int t = 1; t <= T; ++t) {
            size_t a = cs.st(n, t);
            s.pi[a] = cs.pi(n, t);
            s.omega_l[a] = cs.omega_l(n, t);
            s.omega_u[a] = cs.omega_u(n, t);
            s.omega[a] = s.omega_u[a] - s.omega_l[a];
            s.pi_hat[a] = s.pi[a] + s.omega[a];
        }
    }

    s.load_payment.assign(sc.demands.size(), 0.0);
    s.demand_profit.assign(sc.demands.size(), std::vector<double>(T, 0.0));
    for (size_t j = 0; j < sc.demands.size(); ++j) {
        int n = sc.node_index(sc.demands[j].node);
        for (int t = 1; t <= T; ++t) {
            double dj = cs.d(static_cast<int>(j), t);
            s.load_payment[j] += cs.pi(n, t) * dj;
            s.demand_profit[j][t - 1] = (sc.demands[j].price[t - 1] - cs.pi_hat(n, t)) * dj;
        }
        s.total_load_payment += s.load_payment[j];
    }

    s.supplier_revenue.assign(sc.suppliers.size(), 0.0);
    s.supplier_profit.assign(sc.suppliers.size(), std::vector<double>(T, 0.0));
    for (size_t i = 0; i < sc.suppliers.size(); ++i) {
        int n = sc.node_index(sc.suppliers[i].node);
        for (int t = 1; t <= T; ++t) {
            double pi_t = cs.pi(n, t);
            double pv = cs.p(static_cast<int>(i), t);
            s.supplier_revenue[i] += pi_t * pv;
            s.supplier_profit[i][t - 1] = (pi_t - sc.suppliers[i].price[t - 1]) * pv;
        }
        s.total_supplier_revenue += s.supplier_revenue[i];
    }

    int E = edge::count(sc);
    s.line_revenue.assign(sc.lines.size(), 0.0);
    s.edge_profit.assign(E, std::vector<double>(T, 0.0));
    s.transmission_profit_t.assign(T, 0.0);
    for (int k = 0; k < E; ++k) {
        int ns = sc.node_index(edge::snd(sc, k));
        int nr = sc.node_index(edge::rec(sc, k));
        for (int t = 1; t <= T; ++t) {
            double gap = cs.pi(nr, t) - cs.pi(ns, t);
            double fv = cs.f(k, t);
            s.line_revenue[k / 2] += gap * fv;
            s.total_transmission_revenue += gap * fv;
            s.edge_profit[k][t - 1] = (gap - edge::price(sc, k)) * fv;
            s.transmission_profit_t[t - 1] += s.edge_profit[k][t - 1];
        }
    }

    s.vlink_revenue.assign(sc.virtual_links.size(), 0.0);
    s.vlink_profit.assign(sc.virtual_links.size(), 0.0);
    for (size_t v = 0; v < sc.virtual_links.size(); ++v) {
        const auto& vl = sc.virtual_links[v];
        double dv = cs.delta(static_cast<int>(v));
        s.vlink_revenue[v] = (cs.pi_at(vl.snd) - cs.pi_at(vl.rec)) * dv;
        s.total_vlink_revenue += s.vlink_revenue[v];
        s.vlink_profit[v] = (cs.pi_hat_at(vl.snd) - cs.pi_hat_at(vl.rec) - vl.price) * dv;
    }

    return s;
}

}  // namespace stclear
