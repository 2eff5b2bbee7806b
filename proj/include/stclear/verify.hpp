// Mechanical checks of the market properties: competitive equilibrium,
// revenue adequacy, cost recovery, price bounds, shift congestion, the
// disaggregation equivalence, and the dual-function machinery.
#pragma once

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "stclear/settlement.hpp"
#include "stclear/solve.hpp"

namespace stclear {

enum class CheckStatus { pass, fail, skipped, inconclusive };

inline const char* to_string(CheckStatus s) {
    switch (s) {
        case CheckStatus::pass: return "pass";
        case CheckStatus::fail: return "fail";
        case CheckStatus::skipped: return "skipped";
        case CheckStatus::inconclusive: return "inconclusive";
    }
    return "?";
}

struct CheckRecord {
    std::string name;
    CheckStatus status = CheckStatus::skipped;
    double max_residual = 0.0;
    std::string details;
};

struct VerificationReport {
    std::string scenario;
    double tolerance = 1e-6;
    std::vector<CheckRecord> records;

    bool all_pass() const {
        for (const auto& r : records)
            if (r.status == CheckStatus::fail) return false;
        return true;
    }
    const CheckRecord* find(const std::string& name) const {
        for (const auto& r : records)
            if (r.name == name) return &r;
        return nullptr;
    }
};

struct VerifyOptions {
    double tol = 1e-6;
    double cleared_tol = 1e-6;  // threshold for membership in the cleared sets
    double tie_tol = 1e-9;
    double fd_step = 1e-5;      // one-sided difference step for flow terms
};

/// Optimal profit of one supplier at fixed prices. Separable per time unless
/// a ramp limit couples the horizon, in which case it is a small LP.
inline double supplier_profit_optimum(const Scenario& sc, int i, const std::vector<double>& pi_nt) {
    const Supplier& s = sc.suppliers[i];
    int n = sc.node_index(s.node);
    int T = sc.horizon;
    auto price_at = [&](int t1) { return pi_nt[static_cast<size_t>(n) * T + (t1 - 1)]; };
    if (!s.ramp_limit || T == 1) {
        double v = 0.0;
        for (int t = 1; t <= T; ++t)
            v += std::max((price_at(t) - s.price[t - 1]) * s.capacity[t - 1], 0.0);
        return v;
    }
    simplex::Problem p;
    for (int t = 1; t <= T; ++t) {
        p.cost.push_back(s.price[t - 1] - price_at(t));  // minimize negative profit
        p.lo.push_back(0.0);
        p.up.push_back(s.capacity[t - 1]);
    }
    for (int t = 0; t + 1 < T; ++t) {
        simplex::Problem::Row row;
        row.coef = {{t, -1.0}, {t + 1, 1.0}};
        row.lo = -*s.ramp_limit;
        row.hi = *s.ramp_limit;
        p.rows.push_back(row);
    }
    auto res = simplex::solve(p);
    if (res.status != simplex::Status::optimal)
        throw std::runtime_error("supplier subproblem did not solve");
    return -res.objective;
}

/// Allocations and prices form a competitive equilibrium when every player's
/// cleared profit equals its own optimum at the cleared prices.
inline CheckRecord check_competitive_equilibrium(const ClearingSolution& cs, const Settlement& st,
                                                 const VerifyOptions& o = {}) {
    CheckRecord rec{"competitive_equilibrium", CheckStatus::pass, 0.0, ""};
    const Scenario& sc = cs.scenario;
    const int T = cs.T();
    double worst = cs.sol.max_primal_residual;  // balances hold
    std::ostringstream details;

    std::vector<double> pi_nt(static_cast<size_t>(cs.N()) * T);
    for (int n = 0; n < cs.N(); ++n)
        for (int t = 1; t <= T; ++t) pi_nt[cs.st(n, t)] = cs.pi(n, t);

    for (size_t i = 0; i < sc.suppliers.size(); ++i) {
        const Supplier& s = sc.suppliers[i];
        if (s.ramp_limit && T > 1) {
            double got = st.supplier_profit_total(static_cast<int>(i));
            double best = supplier_profit_optimum(sc, static_cast<int>(i), pi_nt);
            worst = std::max(worst, std::fabs(got - best));
        } else {
            int n = sc.node_index(s.node);
            for (int t = 1; t <= T; ++t) {
                double best = std::max((cs.pi(n, t) - s.price[t - 1]) * s.capacity[t - 1], 0.0);
                worst = std::max(worst, std::fabs(st.supplier_profit[i][t - 1] - best));
            }
        }
    }
    for (size_t j = 0; j < sc.demands.size(); ++j) {
        int n = sc.node_index(sc.demands[j].node);
        for (int t = 1; t <= T; ++t) {
            double best =
                std::max((sc.demands[j].price[t - 1] - cs.pi_hat(n, t)) * sc.demands[j].capacity[t - 1], 0.0);
            worst = std::max(worst, std::fabs(st.demand_profit[j][t - 1] - best));
        }
    }
    for (size_t v = 0; v < sc.virtual_links.size(); ++v) {
        const VirtualLink& vl = sc.virtual_links[v];
        double gain = cs.pi_hat_at(vl.snd) - cs.pi_hat_at(vl.rec) - vl.price;
        double best = std::max(gain * vl.capacity, 0.0);
        worst = std::max(worst, std::fabs(st.vlink_profit[v] - best));
    }
    if (!sc.lines.empty()) {
        for (int t = 1; t <= T; ++t) {
            std::vector<double> pi_t(cs.N());
            for (int n = 0; n < cs.N(); ++n) pi_t[n] = cs.pi(n, t);
            double best = solve_subproblem_flows(sc, t, pi_t).value;
            worst = std::max(worst, std::fabs(st.transmission_profit_t[t - 1] - best));
        }
    }

    rec.max_residual = worst;
    if (worst > o.tol) {
        rec.status = CheckStatus::fail;
        details << "profit-maximality residual " << worst;
        rec.details = details.str();
    }
    return rec;
}

/// Total consumer payments equal total provider remunerations.
inline CheckRecord check_revenue_adequacy(const Settlement& st, const VerifyOptions& o = {}) {
    CheckRecord rec{"revenue_adequacy", CheckStatus::pass, 0.0, ""};
    rec.max_residual = std::fabs(st.total_load_payment - st.total_revenue());
    if (rec.max_residual > o.tol) rec.status = CheckStatus::fail;
    return rec;
}

enum class CostRecoveryMode { per_node_time, per_player_horizon };

/// No cleared player loses money. Ramping couples the supplier's hours, so
/// per-(i,t) guarantees weaken to horizon totals in that case.
inline CheckRecord check_cost_recovery(const ClearingSolution& cs, const Settlement& st,
                                       CostRecoveryMode mode, const VerifyOptions& o = {}) {
    CheckRecord rec{"cost_recovery", CheckStatus::pass, 0.0, ""};
    const Scenario& sc = cs.scenario;
    bool ramping = sc.has_ramping();
    if (mode == CostRecoveryMode::per_node_time && ramping) {
        mode = CostRecoveryMode::per_player_horizon;
        rec.details = "ramping couples hours; downgraded to per-player horizon totals";
    }
    double min_profit = 0.0;
    if (mode == CostRecoveryMode::per_node_time) {
        for (const auto& row : st.demand_profit)
            for (double v : row) min_profit = std::min(min_profit, v);
        for (const auto& row : st.supplier_profit)
            for (double v : row) min_profit = std::min(min_profit, v);
    } else {
        for (size_t j = 0; j < sc.demands.size(); ++j)
            min_profit = std::min(min_profit, st.demand_profit_total(static_cast<int>(j)));
        for (size_t i = 0; i < sc.suppliers.size(); ++i)
            min_profit = std::min(min_profit, st.supplier_profit_total(static_cast<int>(i)));
    }
    for (double v : st.vlink_profit) min_profit = std::min(min_profit, v);
    for (double v : st.transmission_profit_t) min_profit = std::min(min_profit, v);
    rec.max_residual = std::max(0.0, -min_profit);
    if (rec.max_residual > o.tol) rec.status = CheckStatus::fail;
    return rec;
}

/// Cleared bid prices bound the nodal prices: the highest cleared supply bid
/// from below, the lowest cleared demand bid (net of omega) from above.
inline CheckRecord check_price_bounds(const ClearingSolution& cs, const VerifyOptions& o = {}) {
    CheckRecord rec{"price_bounds", CheckStatus::pass, 0.0, ""};
    const Scenario& sc = cs.scenario;
    bool ramping = sc.has_ramping();
    if (ramping)
        rec.details = "ramping breaks the per-hour supplier bound; demand side only";
    int evaluated = 0;
    double worst = 0.0;
    for (int n = 0; n < cs.N(); ++n) {
        for (int t = 1; t <= cs.T(); ++t) {
            double lo = -kInf, up = kInf;
            for (size_t i = 0; i < sc.suppliers.size(); ++i) {
                if (sc.node_index(sc.suppliers[i].node) != n) continue;
                if (cs.p(static_cast<int>(i), t) > o.cleared_tol)
                    lo = std::max(lo, sc.suppliers[i].price[t - 1]);
            }
            for (size_t j = 0; j < sc.demands.size(); ++j) {
                if (sc.node_index(sc.demands[j].node) != n) continue;
                if (cs.d(static_cast<int>(j), t) > o.cleared_tol)
                    up = std::min(up, sc.demands[j].price[t - 1] - cs.omega(n, t));
            }
            if (lo == -kInf || up == kInf) continue;  // needs both cleared sets
            ++evaluated;
            double pi = cs.pi(n, t);
            if (!ramping) worst = std::max(worst, lo - pi);
            worst = std::max(worst, pi - up);
        }
    }
    rec.max_residual = std::max(0.0, worst);
    if (evaluated == 0) rec.status = CheckStatus::skipped;
    else if (worst > o.tol) rec.status = CheckStatus::fail;
    return rec;
}

/// Congestion relations for shifts: an active link needs a price gap that
/// covers its cost; an interior link pins the gap to the cost exactly.
inline CheckRecord check_vlink_congestion(const ClearingSolution& cs, const VerifyOptions& o = {}) {
    CheckRecord rec{"vlink_congestion", CheckStatus::pass, 0.0, ""};
    const Scenario& sc = cs.scenario;
    double worst = 0.0;
    for (size_t v = 0; v < sc.virtual_links.size(); ++v) {
        const VirtualLink& vl = sc.virtual_links[v];
        double dv = cs.delta(static_cast<int>(v));
        if (dv <= o.cleared_tol) continue;
        double gap = cs.pi_hat_at(vl.snd) - cs.pi_hat_at(vl.rec);
        worst = std::max(worst, vl.price - gap);                      // gap >= price
        if (dv < vl.capacity - o.cleared_tol)
            worst = std::max(worst, std::fabs(gap - vl.price));       // interior: equality
    }
    rec.max_residual = std::max(0.0, worst);
    if (worst > o.tol) {
        if (!cs.sol.dual_unique_hint()) {
            rec.status = CheckStatus::inconclusive;
            rec.details = "violation under dual multiplicity (" +
                          std::to_string(cs.sol.degenerate_basic) + " degenerate basics)";
        } else {
            rec.status = CheckStatus::fail;
        }
    }
    return rec;
}

/// The virtual-link clearing LP and the per-node disaggregation LP of the
/// same single-consumer instance attain the same optimum.
inline CheckRecord check_disaggregation_equivalence(const Scenario& sc, const VerifyOptions& o = {}) {
    CheckRecord rec{"disaggregation_equivalence", CheckStatus::pass, 0.0, ""};
    DisaggLayout lay = disaggregation_layout(sc);
    LPInstance lp_vl = build(sc);
    LPInstance lp_dn = build_disaggregation(sc);
    auto sol_vl = solve(lp_vl);
    auto sol_dn = solve(lp_dn);
    if (!sol_vl.optimal() || !sol_dn.optimal()) {
        rec.status = CheckStatus::fail;
        rec.details = "one of the two formulations did not solve";
        return rec;
    }
    double gap = std::fabs(sol_vl.objective - sol_dn.objective);
    rec.max_residual = gap;
    if (gap > 1e-7) {
        rec.status = CheckStatus::fail;
        rec.details = "objectives differ";
        return rec;
    }
    if (sol_vl.primal_unique_hint() && sol_dn.primal_unique_hint()) {
        // reconstruct the served per-node loads from (d, delta)
        VarLayout vlay = clearing_layout(sc);
        int t = lay.slice;
        double dflex = sol_vl.primal[vlay.d(lay.flex_demand, t)];
        double worst = 0.0;
        for (size_t pos = 0; pos < lay.nd_nodes.size(); ++pos) {
            double vl_served;
            if (lay.nd_link[pos] < 0) {
                double shifted = 0.0;
                for (int l : lay.nd_link)
                    if (l >= 0) shifted += sol_vl.primal[vlay.delta(l)];
                vl_served = dflex - shifted;
            } else {
                vl_served = sol_vl.primal[vlay.delta(lay.nd_link[pos])];
            }
            double dn = sol_dn.primal[lp_dn.num_vars() - (int)lay.nd_nodes.size() + (int)pos];
            worst = std::max(worst, std::fabs(vl_served - dn));
        }
        rec.max_residual = std::max(rec.max_residual, worst);
        if (worst > o.tol) rec.status = CheckStatus::fail;
    } else {
        rec.details = "alternate optima detected; objective comparison only";
    }
    return rec;
}

/// Lagrangian dual function at arbitrary prices (pi) and computing-capacity
/// duals (omega decomposition, nonzero only where the cap is finite).
inline double eval_dual_function(const Scenario& sc, const std::vector<double>& pi,
                                 const std::vector<double>& omega_l,
                                 const std::vector<double>& omega_u) {
    const int T = sc.horizon;
    const int N = static_cast<int>(sc.nodes.size());
    if ((int)pi.size() != N * T || (int)omega_l.size() != N * T || (int)omega_u.size() != N * T)
        throw std::invalid_argument("dual vectors must have one entry per space-time node");
    auto at = [&](const std::vector<double>& v, int n, int t1) {
        return v[static_cast<size_t>(n) * T + (t1 - 1)];
    };
    for (int n = 0; n < N; ++n)
        for (int t = 1; t <= T; ++t)
            if (sc.computing_cap_at(sc.nodes[n], t) == kInf &&
                (at(omega_l, n, t) != 0.0 || at(omega_u, n, t) != 0.0))
                throw std::invalid_argument("omega supplied where the computing cap is infinite");

    auto pi_hat = [&](int n, int t1) {
        return at(pi, n, t1) + at(omega_u, n, t1) - at(omega_l, n, t1);
    };

    double total = 0.0;
    for (size_t j = 0; j < sc.demands.size(); ++j) {
        int n = sc.node_index(sc.demands[j].node);
        for (int t = 1; t <= T; ++t)
            total += std::max((sc.demands[j].price[t - 1] - pi_hat(n, t)) * sc.demands[j].capacity[t - 1], 0.0);
    }
    for (size_t i = 0; i < sc.suppliers.size(); ++i)
        total += supplier_profit_optimum(sc, static_cast<int>(i), pi);
    for (size_t v = 0; v < sc.virtual_links.size(); ++v) {
        const VirtualLink& vl = sc.virtual_links[v];
        double gain = pi_hat(sc.node_index(vl.snd.node), vl.snd.time) -
                      pi_hat(sc.node_index(vl.rec.node), vl.rec.time) - vl.price;
        total += std::max(gain * vl.capacity, 0.0);
    }
    if (!sc.lines.empty()) {
        for (int t = 1; t <= T; ++t) {
            std::vector<double> pi_t(N);
            for (int n = 0; n < N; ++n) pi_t[n] = at(pi, n, t);
            total += solve_subproblem_flows(sc, t, pi_t).value;
        }
    }
    double cap_term = 0.0;
    for (int n = 0; n < N; ++n) {
        for (int t = 1; t <= T; ++t) {
            double cap = sc.computing_cap_at(sc.nodes[n], t);
            if (cap != kInf) cap_term += at(omega_u, n, t) * cap;
        }
    }
    return -total - cap_term;
}

struct Interval {
    double lo = 0.0, hi = 0.0;
    bool contains(double v, double tol = 0.0) const { return v >= lo - tol && v <= hi + tol; }
    Interval& operator+=(const Interval& o) {
        lo += o.lo;
        hi += o.hi;
        return *this;
    }
};

/// Subdifferential (as an interval) of the total optimal-profit function in
/// the price at one space-time node: exact piecewise cases for box players,
/// one-sided finite differences for the coupled flow and ramped-supplier
/// terms. Zero lies in the interval at any optimal dual.
inline Interval subgradient_interval(const Scenario& sc, const std::vector<double>& pi,
                                     const std::vector<double>& omega_l,
                                     const std::vector<double>& omega_u, const SpaceTimeIndex& node,
                                     const VerifyOptions& o = {}) {
    const int T = sc.horizon;
    const int N = static_cast<int>(sc.nodes.size());
    const int n0 = sc.node_index(node.node);
    const int t0 = node.time;
    if (n0 < 0 || t0 < 1 || t0 > T) throw std::invalid_argument("unknown space-time node");
    auto at = [&](const std::vector<double>& v, int n, int t1) {
        return v[static_cast<size_t>(n) * T + (t1 - 1)];
    };
    auto pi_hat = [&](int n, int t1) {
        return at(pi, n, t1) + at(omega_u, n, t1) - at(omega_l, n, t1);
    };

    Interval total;
    for (size_t i = 0; i < sc.suppliers.size(); ++i) {
        const Supplier& s = sc.suppliers[i];
        if (sc.node_index(s.node) != n0) continue;
        if (s.ramp_limit && T > 1) {
            // bracket numerically: the supplier optimum is convex in pi
            std::vector<double> up = pi, dn = pi;
            up[static_cast<size_t>(n0) * T + (t0 - 1)] += o.fd_step;
            dn[static_cast<size_t>(n0) * T + (t0 - 1)] -= o.fd_step;
            double v0 = supplier_profit_optimum(sc, static_cast<int>(i), pi);
            double fwd = (supplier_profit_optimum(sc, static_cast<int>(i), up) - v0) / o.fd_step;
            double bwd = (v0 - supplier_profit_optimum(sc, static_cast<int>(i), dn)) / o.fd_step;
            total += Interval{std::min(bwd, fwd), std::max(bwd, fwd)};
            continue;
        }
        double diff = at(pi, n0, t0) - s.price[t0 - 1];
        double cap = s.capacity[t0 - 1];
        if (diff > o.tie_tol) total += Interval{cap, cap};
        else if (diff >= -o.tie_tol) total += Interval{0.0, cap};
    }
    for (size_t j = 0; j < sc.demands.size(); ++j) {
        const Demand& d = sc.demands[j];
        if (sc.node_index(d.node) != n0) continue;
        double diff = d.price[t0 - 1] - pi_hat(n0, t0);
        double cap = d.capacity[t0 - 1];
        if (diff > o.tie_tol) total += Interval{-cap, -cap};
        else if (diff >= -o.tie_tol) total += Interval{-cap, 0.0};
    }
    for (size_t v = 0; v < sc.virtual_links.size(); ++v) {
        const VirtualLink& vl = sc.virtual_links[v];
        bool is_snd = vl.snd.node == node.node && vl.snd.time == t0;
        bool is_rec = vl.rec.node == node.node && vl.rec.time == t0;
        if (!is_snd && !is_rec) continue;
        double gain = pi_hat(sc.node_index(vl.snd.node), vl.snd.time) -
                      pi_hat(sc.node_index(vl.rec.node), vl.rec.time) - vl.price;
        double cap = vl.capacity;
        double sign = is_snd ? 1.0 : -1.0;  // a link cannot have both ends here
        if (gain > o.tie_tol) total += Interval{sign * cap, sign * cap};
        else if (gain >= -o.tie_tol) total += Interval{std::min(sign * cap, 0.0), std::max(sign * cap, 0.0)};
    }
    if (!sc.lines.empty()) {
        std::vector<double> pi_t(N);
        for (int n = 0; n < N; ++n) pi_t[n] = at(pi, n, t0);
        double v0 = solve_subproblem_flows(sc, t0, pi_t).value;
        std::vector<double> up = pi_t, dn = pi_t;
        up[n0] += o.fd_step;
        dn[n0] -= o.fd_step;
        double fwd = (solve_subproblem_flows(sc, t0, up).value - v0) / o.fd_step;
        double bwd = (v0 - solve_subproblem_flows(sc, t0, dn).value) / o.fd_step;
        total += Interval{std::min(bwd, fwd), std::max(bwd, fwd)};
    }
    return total;
}

/// Runs the named checks (all by default) and assembles the report.
inline VerificationReport run_verification(const ClearingSolution& cs, const Settlement& st,
                                           const std::vector<std::string>& checks = {},
                                           const VerifyOptions& o = {}) {
    VerificationReport rep;
    rep.scenario = cs.scenario.name;
    rep.tolerance = o.tol;
    auto enabled = [&](const std::string& name) {
        if (checks.empty()) return true;
        for (const auto& c : checks)
            if (c == name) return true;
        return false;
    };

    if (enabled("competitive_equilibrium"))
        rep.records.push_back(check_competitive_equilibrium(cs, st, o));
    if (enabled("revenue_adequacy")) rep.records.push_back(check_revenue_adequacy(st, o));
    if (enabled("cost_recovery"))
        rep.records.push_back(check_cost_recovery(cs, st, CostRecoveryMode::per_node_time, o));
    if (enabled("price_bounds")) rep.records.push_back(check_price_bounds(cs, o));
    if (enabled("vlink_congestion")) rep.records.push_back(check_vlink_congestion(cs, o));

    if (enabled("dual_function")) {
        CheckRecord rec{"dual_function", CheckStatus::pass, 0.0, ""};
        const int NT = cs.N() * cs.T();
        std::vector<double> pi(NT), ol(NT), ou(NT);
        for (int n = 0; n < cs.N(); ++n) {
            for (int t = 1; t <= cs.T(); ++t) {
                pi[cs.st(n, t)] = cs.pi(n, t);
                ol[cs.st(n, t)] = cs.omega_l(n, t);
                ou[cs.st(n, t)] = cs.omega_u(n, t);
            }
        }
        double dval = eval_dual_function(cs.scenario, pi, ol, ou);
        rec.max_residual = std::fabs(dval - cs.sol.objective);
        if (rec.max_residual > o.tol) rec.status = CheckStatus::fail;
        rep.records.push_back(rec);
    }
    if (enabled("subgradient")) {
        CheckRecord rec{"subgradient", CheckStatus::pass, 0.0, ""};
        const int NT = cs.N() * cs.T();
        std::vector<double> pi(NT), ol(NT), ou(NT);
        for (int n = 0; n < cs.N(); ++n) {
            for (int t = 1; t <= cs.T(); ++t) {
                pi[cs.st(n, t)] = cs.pi(n, t);
                ol[cs.st(n, t)] = cs.omega_l(n, t);
                ou[cs.st(n, t)] = cs.omega_u(n, t);
            }
        }
        double worst = 0.0;
        for (int n = 0; n < cs.N(); ++n) {
            for (int t = 1; t <= cs.T(); ++t) {
                Interval iv = subgradient_interval(cs.scenario, pi, ol, ou,
                                                   {cs.scenario.nodes[n], t}, o);
                double dist = 0.0;
                if (iv.lo > 0) dist = iv.lo;
                else if (iv.hi < 0) dist = -iv.hi;
                worst = std::max(worst, dist);
            }
        }
        rec.max_residual = worst;
        if (worst > 1e-4) rec.status = CheckStatus::fail;  // finite-difference bracket width
        rep.records.push_back(rec);
    }
    return rep;
}

}  // namespace stclear
