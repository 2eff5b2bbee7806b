// Solves an LPInstance to optimality and exposes exact primal and dual
// values per variable and row, plus scenario-aware accessors.
#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "stclear/build.hpp"
#include "stclear/lp.hpp"
#include "stclear/simplex.hpp"
#include "stclear/types.hpp"

namespace stclear {

struct SolveOptions {
    double eps_feas = 1e-8;
    double eps_comp = 1e-7;
    double eps_gap = 1e-7;
    int max_iterations = 200000;
};

struct PrimalDualSolution {
    simplex::Status status = simplex::Status::numerical_failure;
    double objective = 0.0;
    std::vector<double> primal;        // per variable
    std::vector<double> dual;          // per row, Lagrangian sign convention
    std::vector<double> reduced_cost;  // per variable

    double max_primal_residual = 0.0;
    double max_dual_residual = 0.0;
    double max_compl_residual = 0.0;
    double duality_gap = 0.0;
    int iterations = 0;
    bool bland_engaged = false;
    int zero_rc_nonbasic = 0;
    int degenerate_basic = 0;
    std::vector<int> basis;

    bool optimal() const { return status == simplex::Status::optimal; }
    // a zero reduced cost on a nonbasic column signals alternate optima
    bool primal_unique_hint() const { return zero_rc_nonbasic == 0; }
    bool dual_unique_hint() const { return degenerate_basic == 0; }
};

namespace detail {

struct RowMap {
    int prow = -1;       // simplex row
    int side = 0;        // 0: full dual, +1: upper(le) half, -1: lower(ge) half
};

inline simplex::Problem to_simplex(const LPInstance& lp, std::vector<RowMap>& rmap) {
    simplex::Problem p;
    p.cost = lp.cost;
    p.lo = lp.lower;
    p.up = lp.upper;
    rmap.assign(lp.num_rows(), {});

    std::vector<int> pair_of(lp.num_rows(), -1);
    for (auto [hi, lo] : lp.range_pairs) {
        pair_of[hi] = lo;
        pair_of[lo] = hi;
    }

    for (int r = 0; r < lp.num_rows(); ++r) {
        if (rmap[r].prow >= 0) continue;
        const LPRow& row = lp.rows[r];
        simplex::Problem::Row prow;
        prow.coef = row.coef;
        int partner = pair_of[r];
        if (partner >= 0) {
            const LPRow& other = lp.rows[partner];
            const LPRow& hi = row.sense == RowSense::le ? row : other;
            const LPRow& lo = row.sense == RowSense::le ? other : row;
            prow.coef = hi.coef;
            prow.lo = lo.rhs;
            prow.hi = hi.rhs;
            int idx = p.num_rows();
            p.rows.push_back(std::move(prow));
            rmap[r].prow = idx;
            rmap[r].side = row.sense == RowSense::le ? +1 : -1;
            rmap[partner].prow = idx;
            rmap[partner].side = other.sense == RowSense::le ? +1 : -1;
            continue;
        }
        switch (row.sense) {
            case RowSense::eq: prow.lo = prow.hi = row.rhs; break;
            case RowSense::le: prow.lo = -simplex::kInf; prow.hi = row.rhs; break;
            case RowSense::ge: prow.lo = row.rhs; prow.hi = simplex::kInf; break;
        }
        rmap[r].prow = p.num_rows();
        rmap[r].side = 0;
        p.rows.push_back(std::move(prow));
    }
    return p;
}

}  // namespace detail

/// Solve the LP. Infeasible and unbounded are reported as statuses; running
/// into the iteration cap is an error naming the pivot-rule state.
inline PrimalDualSolution solve(const LPInstance& lp, const SolveOptions& opts = {}) {
    std::vector<detail::RowMap> rmap;
    simplex::Problem p = detail::to_simplex(lp, rmap);
    simplex::Options so;
    so.max_iterations = opts.max_iterations;
    simplex::Result r = simplex::solve(p, so);

    if (r.status == simplex::Status::iteration_limit ||
        r.status == simplex::Status::numerical_failure) {
        throw std::runtime_error(std::string("simplex did not converge: ") +
                                 simplex::to_string(r.status) +
                                 (r.bland_engaged ? " (pivot rule: bland, after stall)"
                                                  : " (pivot rule: dantzig)"));
    }

    PrimalDualSolution out;
    out.status = r.status;
    out.objective = r.objective;
    out.primal = std::move(r.x);
    out.reduced_cost = std::move(r.rc);
    out.dual.assign(lp.num_rows(), 0.0);
    for (int row = 0; row < lp.num_rows(); ++row) {
        double y = r.y.empty() ? 0.0 : r.y[rmap[row].prow];
        if (rmap[row].side == 0) out.dual[row] = y;
        else if (rmap[row].side > 0) out.dual[row] = std::min(y, 0.0);  // upper side
        else out.dual[row] = std::max(y, 0.0);                          // lower side
    }
    out.max_primal_residual = r.max_primal_residual;
    out.max_dual_residual = r.max_dual_residual;
    out.max_compl_residual = r.max_compl_residual;
    out.duality_gap = r.duality_gap;
    out.iterations = r.iterations;
    out.bland_engaged = r.bland_engaged;
    out.zero_rc_nonbasic = r.zero_rc_nonbasic;
    out.degenerate_basic = r.degenerate_basic;
    out.basis = std::move(r.basis);

    if (out.optimal()) {
        // dual feasibility is gauged against the bid magnitudes in play
        double cost_scale = 1.0;
        for (double c : lp.cost) cost_scale = std::max(cost_scale, std::fabs(c));
        double obj_scale = 1.0 + std::fabs(out.objective);
        if (out.max_primal_residual > opts.eps_feas * (1.0 + cost_scale) ||
            out.max_dual_residual > opts.eps_feas * (1.0 + cost_scale) ||
            out.max_compl_residual > opts.eps_comp * obj_scale ||
            out.duality_gap > opts.eps_gap * obj_scale) {
            char msg[160];
            std::snprintf(msg, sizeof(msg),
                          "optimal basis failed tolerance check: feas=%.3e dual=%.3e comp=%.3e gap=%.3e",
                          out.max_primal_residual, out.max_dual_residual, out.max_compl_residual,
                          out.duality_gap);
            throw std::runtime_error(msg);
        }
    }
    return out;
}

/// A solved scenario with name-level accessors for allocations and prices.
struct ClearingSolution {
    Scenario scenario;
    LPInstance lp;
    VarLayout layout;
    PrimalDualSolution sol;
    std::vector<int> balance_row;  // node*T + (t-1)
    std::vector<int> comp_hi_row;  // -1 where the cap is infinite
    std::vector<int> comp_lo_row;

    int T() const { return scenario.horizon; }
    int N() const { return static_cast<int>(scenario.nodes.size()); }
    size_t st(int n, int t1) const { return static_cast<size_t>(n) * T() + (t1 - 1); }

    double d(int j, int t1) const { return sol.primal[layout.d(j, t1)]; }
    double p(int i, int t1) const { return sol.primal[layout.p(i, t1)]; }
    double f(int k, int t1) const { return sol.primal[layout.f(k, t1)]; }
    double delta(int v) const { return sol.primal[layout.delta(v)]; }

    double pi(int n, int t1) const { return sol.dual[balance_row[st(n, t1)]]; }
    double omega_u(int n, int t1) const {
        int r = comp_hi_row[st(n, t1)];
        return r < 0 ? 0.0 : -sol.dual[r];
    }
    double omega_l(int n, int t1) const {
        int r = comp_lo_row[st(n, t1)];
        return r < 0 ? 0.0 : sol.dual[r];
    }
    double omega(int n, int t1) const { return omega_u(n, t1) - omega_l(n, t1); }
    double pi_hat(int n, int t1) const { return pi(n, t1) + omega(n, t1); }

    double pi_at(const SpaceTimeIndex& at) const {
        return pi(scenario.node_index(at.node), at.time);
    }
    double pi_hat_at(const SpaceTimeIndex& at) const {
        return pi_hat(scenario.node_index(at.node), at.time);
    }

    std::vector<double> price_vector() const {
        std::vector<double> out(static_cast<size_t>(N()) * T());
        for (int n = 0; n < N(); ++n)
            for (int t = 1; t <= T(); ++t) out[st(n, t)] = pi(n, t);
        return out;
    }
};

inline ClearingSolution clear_scenario(const Scenario& sc, const SolveOptions& opts = {}) {
    ClearingSolution cs;
    cs.scenario = sc;
    cs.lp = build(sc);
    cs.layout = clearing_layout(sc);
    cs.sol = solve(cs.lp, opts);
    cs.balance_row.assign(static_cast<size_t>(cs.N()) * cs.T(), -1);
    cs.comp_hi_row.assign(static_cast<size_t>(cs.N()) * cs.T(), -1);
    cs.comp_lo_row.assign(static_cast<size_t>(cs.N()) * cs.T(), -1);
    for (int r = 0; r < cs.lp.num_rows(); ++r) {
        const RowRef& ref = cs.lp.rows[r].ref;
        if (ref.kind == RowKind::balance) cs.balance_row[cs.st(ref.entity, ref.time)] = r;
        else if (ref.kind == RowKind::computing_hi) cs.comp_hi_row[cs.st(ref.entity, ref.time)] = r;
        else if (ref.kind == RowKind::computing_lo) cs.comp_lo_row[cs.st(ref.entity, ref.time)] = r;
    }
    return cs;
}

struct FlowSubproblem {
    double value = 0.0;            // optimal transmission profit at time t
    std::vector<double> flows;     // per directed edge
};

/// Optimal profit of the network subproblem at fixed prices:
/// max sum_k (pi_rec - pi_snd - alpha_f) f_k over the feasible flow set.
inline FlowSubproblem solve_subproblem_flows(const Scenario& sc, int t1,
                                             const std::vector<double>& pi_nodes) {
    int E = edge::count(sc);
    int N = static_cast<int>(sc.nodes.size());
    FlowSubproblem out;
    out.flows.assign(E, 0.0);
    if (E == 0) return out;

    simplex::Problem p;
    for (int k = 0; k < E; ++k) {
        double gain = pi_nodes[sc.node_index(edge::rec(sc, k))] -
                      pi_nodes[sc.node_index(edge::snd(sc, k))] - edge::price(sc, k);
        p.cost.push_back(-gain);  // maximize profit
        p.lo.push_back(0.0);
        p.up.push_back(sc.network_model == NetworkModel::transport ? sc.lines[k / 2].flow_cap
                                                                   : simplex::kInf);
    }
    if (sc.network_model == NetworkModel::dc) {
        ScenarioIndex ix(sc);
        for (int n = 0; n < N; ++n) {
            bool pinned = ix.reference[n] == 1;
            p.cost.push_back(0.0);
            p.lo.push_back(pinned ? 0.0 : -simplex::kInf);
            p.up.push_back(pinned ? 0.0 : simplex::kInf);
        }
        for (size_t l = 0; l < sc.lines.size(); ++l) {
            const auto& line = sc.lines[l];
            int ns = E + sc.node_index(line.snd);
            int nr = E + sc.node_index(line.rec);
            simplex::Problem::Row dc;
            dc.coef = {{2 * static_cast<int>(l), 1.0},
                       {2 * static_cast<int>(l) + 1, -1.0},
                       {ns, -line.susceptance},
                       {nr, line.susceptance}};
            std::sort(dc.coef.begin(), dc.coef.end());
            dc.lo = dc.hi = 0.0;
            p.rows.push_back(dc);
            simplex::Problem::Row ang;
            ang.coef = {{ns, 1.0}, {nr, -1.0}};
            std::sort(ang.coef.begin(), ang.coef.end());
            ang.lo = -line.effective_angle_cap();
            ang.hi = line.effective_angle_cap();
            p.rows.push_back(ang);
        }
    }
    auto res = simplex::solve(p);
    if (res.status != simplex::Status::optimal)
        throw std::runtime_error("flow subproblem did not solve to optimality");
    out.value = -res.objective;
    for (int k = 0; k < E; ++k) out.flows[k] = res.x[k];
    (void)t1;
    return out;
}

}  // namespace stclear
