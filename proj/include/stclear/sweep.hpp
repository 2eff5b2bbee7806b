// Instance-family experiments: link-capacity sweeps, surplus monotonicity
// along nested enlargements, and price statistics.
#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "stclear/settlement.hpp"
#include "stclear/solve.hpp"
#include "stclear/verify.hpp"

namespace stclear {

struct SweepPoint {
    double eps = 0.0;                 // capacity added to each swept link
    double capacity = 0.0;            // resulting capacity of the primary link
    double surplus = 0.0;
    std::vector<double> delta;        // cleared shift per swept link
    std::vector<double> unit_profit;  // pi_hat gap minus cost, per swept link
    double gap = 0.0;                 // pi_hat(snd) - pi_hat(rec) of the primary link
    std::vector<double> prices;       // full space-time price vector
    bool dual_degenerate = false;
};

struct SweepReport {
    std::vector<std::string> link_ids;  // first entry is the primary link
    std::vector<double> grid;
    std::vector<SweepPoint> points;
    CheckRecord unchanged_when_slack;   // adding capacity to an idle link moves nothing
    CheckRecord unit_profit_monotone;   // unit profit non-increasing in capacity
    CheckRecord gap_bounded_by_cost;    // past congestion, the gap is at most the cost
};

namespace detail {

// a sweep target: a virtual link anywhere, or a transmission line in
// transport mode (the static no-network-constraint analysis)
struct SweepTarget {
    bool is_line = false;
    int index = 0;
};

inline SweepTarget resolve_target(const Scenario& sc, const std::string& id) {
    if (const VirtualLink* vl = sc.find_link(id))
        return {false, static_cast<int>(vl - sc.virtual_links.data())};
    for (size_t l = 0; l < sc.lines.size(); ++l) {
        if (sc.lines[l].id != id) continue;
        if (sc.network_model != NetworkModel::transport)
            throw std::invalid_argument("line capacity sweeps need transport mode");
        if (sc.horizon != 1)
            throw std::invalid_argument("line capacity sweeps are single-period");
        return {true, static_cast<int>(l)};
    }
    throw std::invalid_argument("unknown virtual link or line " + id);
}

inline double target_capacity(const Scenario& sc, const SweepTarget& t) {
    return t.is_line ? sc.lines[t.index].flow_cap : sc.virtual_links[t.index].capacity;
}

inline void add_capacity(Scenario& sc, const SweepTarget& t, double eps) {
    if (t.is_line) sc.lines[t.index].flow_cap += eps;
    else sc.virtual_links[t.index].capacity += eps;
}

inline double target_flow(const ClearingSolution& cs, const SweepTarget& t) {
    if (!t.is_line) return cs.delta(t.index);
    return cs.f(2 * t.index, 1);  // forward directed edge
}

inline double target_gap(const ClearingSolution& cs, const SweepTarget& t) {
    if (t.is_line) {
        const auto& l = cs.scenario.lines[t.index];
        return cs.pi(cs.scenario.node_index(l.rec), 1) - cs.pi(cs.scenario.node_index(l.snd), 1);
    }
    const auto& vl = cs.scenario.virtual_links[t.index];
    return cs.pi_hat_at(vl.snd) - cs.pi_hat_at(vl.rec);
}

inline double target_price(const Scenario& sc, const SweepTarget& t) {
    return t.is_line ? sc.lines[t.index].price : sc.virtual_links[t.index].price;
}

}  // namespace detail

/// Re-solves the scenario along the capacity grid, raising the capacity of
/// every listed target (virtual link, or line in transport mode) by eps. The
/// three congestion relations are evaluated on the primary (first) target;
/// violations under detected dual multiplicity are reported as inconclusive
/// rather than failed.
inline SweepReport capacity_sweep(const Scenario& base, const std::vector<std::string>& link_ids,
                                  const std::vector<double>& eps_grid, double tol = 1e-6) {
    if (link_ids.empty()) throw std::invalid_argument("no links to sweep");
    std::vector<detail::SweepTarget> targets;
    for (const auto& id : link_ids) targets.push_back(detail::resolve_target(base, id));
    for (size_t i = 1; i < eps_grid.size(); ++i)
        if (!(eps_grid[i] > eps_grid[i - 1]))
            throw std::invalid_argument("eps grid must be strictly increasing");
    if (!eps_grid.empty() && eps_grid.front() < 0.0)
        throw std::invalid_argument("eps grid must be nonnegative");

    SweepReport rep;
    rep.link_ids = link_ids;
    rep.grid = eps_grid;

    for (double eps : eps_grid) {
        Scenario sc = base;
        for (const auto& t : targets) detail::add_capacity(sc, t, eps);
        ClearingSolution cs = clear_scenario(sc);
        if (!cs.sol.optimal())
            throw std::runtime_error("sweep point did not solve to optimality");
        SweepPoint pt;
        pt.eps = eps;
        pt.capacity = detail::target_capacity(sc, targets[0]);
        pt.surplus = -cs.sol.objective;
        for (const auto& t : targets) {
            pt.delta.push_back(detail::target_flow(cs, t));
            pt.unit_profit.push_back(detail::target_gap(cs, t) - detail::target_price(sc, t));
        }
        pt.gap = detail::target_gap(cs, targets[0]);
        pt.prices = cs.price_vector();
        pt.dual_degenerate = !cs.sol.dual_unique_hint();
        rep.points.push_back(std::move(pt));
    }

    bool any_degenerate = false;
    for (const auto& pt : rep.points) any_degenerate |= pt.dual_degenerate;

    // idle base link: extra capacity must leave the unit profit unchanged
    rep.unchanged_when_slack = {"sweep_unchanged_when_slack", CheckStatus::skipped, 0.0, ""};
    if (!rep.points.empty()) {
        const SweepPoint& base_pt = rep.points.front();
        double base_cap = detail::target_capacity(base, targets[0]) + base_pt.eps;
        if (base_pt.delta[0] < base_cap - tol) {
            double worst = 0.0;
            for (const auto& pt : rep.points)
                worst = std::max(worst, std::fabs(pt.unit_profit[0] - base_pt.unit_profit[0]));
            rep.unchanged_when_slack.max_residual = worst;
            rep.unchanged_when_slack.status =
                worst <= tol ? CheckStatus::pass
                             : (any_degenerate ? CheckStatus::inconclusive : CheckStatus::fail);
        }
    }

    rep.unit_profit_monotone = {"sweep_unit_profit_monotone", CheckStatus::pass, 0.0, ""};
    double worst_up = 0.0;
    for (size_t i = 1; i < rep.points.size(); ++i)
        worst_up = std::max(worst_up, rep.points[i].unit_profit[0] - rep.points[i - 1].unit_profit[0]);
    rep.unit_profit_monotone.max_residual = std::max(0.0, worst_up);
    if (worst_up > tol)
        rep.unit_profit_monotone.status =
            any_degenerate ? CheckStatus::inconclusive : CheckStatus::fail;
    if (rep.unit_profit_monotone.status == CheckStatus::inconclusive)
        rep.unit_profit_monotone.details = "violation under dual multiplicity";

    // once the link stops being congested, the gap is bounded by the cost
    rep.gap_bounded_by_cost = {"sweep_gap_bounded_by_cost", CheckStatus::skipped, 0.0, ""};
    double base_cap0 = detail::target_capacity(base, targets[0]);
    double price0 = detail::target_price(base, targets[0]);
    double worst_gap = -kInf;
    bool seen_slack = false;
    for (const auto& pt : rep.points) {
        double cap = base_cap0 + pt.eps;
        if (!seen_slack && pt.delta[0] < cap - tol) seen_slack = true;
        if (seen_slack) worst_gap = std::max(worst_gap, pt.gap - price0);
    }
    if (seen_slack) {
        rep.gap_bounded_by_cost.max_residual = std::max(0.0, worst_gap);
        rep.gap_bounded_by_cost.status =
            worst_gap <= tol ? CheckStatus::pass
                             : (any_degenerate ? CheckStatus::inconclusive : CheckStatus::fail);
    }
    return rep;
}

/// Verifies that each scenario in the chain only enlarges the virtual-link
/// set or capacities of its predecessor.
inline void require_nested_chain(const std::vector<Scenario>& chain) {
    for (size_t i = 1; i < chain.size(); ++i) {
        for (const auto& prev : chain[i - 1].virtual_links) {
            const VirtualLink* cur = chain[i].find_link(prev.id);
            if (!cur || cur->capacity < prev.capacity - 1e-12 || cur->snd != prev.snd ||
                cur->rec != prev.rec || cur->price != prev.price)
                throw std::invalid_argument("chain is not nested at step " + std::to_string(i));
        }
    }
}

struct MonotonicityReport {
    std::vector<double> surplus;
    CheckRecord record;
};

/// More shifting flexibility can only raise the social surplus.
inline MonotonicityReport surplus_monotonicity(const std::vector<Scenario>& chain,
                                               double tol = 1e-7) {
    require_nested_chain(chain);
    MonotonicityReport rep;
    rep.record = {"surplus_monotonicity", CheckStatus::pass, 0.0, ""};
    for (const auto& sc : chain) {
        ClearingSolution cs = clear_scenario(sc);
        if (!cs.sol.optimal()) throw std::runtime_error("chain member did not solve");
        rep.surplus.push_back(-cs.sol.objective);
    }
    double worst = 0.0;
    for (size_t i = 1; i < rep.surplus.size(); ++i)
        worst = std::max(worst, rep.surplus[i - 1] - rep.surplus[i]);
    rep.record.max_residual = std::max(0.0, worst);
    if (worst > tol) rep.record.status = CheckStatus::fail;
    return rep;
}

struct LmpStats {
    double mean = 0.0, median = 0.0, max = 0.0, min = 0.0;
    double std_dev = 0.0;  // population
    double avg_dev = 0.0;  // mean absolute deviation about the mean
};

inline LmpStats lmp_stats(const std::vector<double>& prices) {
    if (prices.empty()) throw std::invalid_argument("empty price vector");
    LmpStats s;
    std::vector<double> sorted = prices;
    std::sort(sorted.begin(), sorted.end());
    size_t n = sorted.size();
    s.min = sorted.front();
    s.max = sorted.back();
    s.median = n % 2 == 1 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
    for (double v : sorted) s.mean += v;
    s.mean /= static_cast<double>(n);
    for (double v : sorted) {
        s.std_dev += (v - s.mean) * (v - s.mean);
        s.avg_dev += std::fabs(v - s.mean);
    }
    s.std_dev = std::sqrt(s.std_dev / static_cast<double>(n));
    s.avg_dev /= static_cast<double>(n);
    return s;
}

struct HistogramBin {
    double lo = 0.0, hi = 0.0;
    long count = 0;
};

inline std::vector<HistogramBin> lmp_histogram(const std::vector<double>& prices, int bins = 30) {
    if (prices.empty()) throw std::invalid_argument("empty price vector");
    double lo = *std::min_element(prices.begin(), prices.end());
    double hi = *std::max_element(prices.begin(), prices.end());
    if (hi <= lo) hi = lo + 1.0;
    std::vector<HistogramBin> out(bins);
    double w = (hi - lo) / bins;
    for (int b = 0; b < bins; ++b) out[b] = {lo + b * w, lo + (b + 1) * w, 0};
    for (double v : prices) {
        int b = std::min(bins - 1, static_cast<int>((v - lo) / w));
        ++out[b].count;
    }
    return out;
}

}  // namespace stclear
