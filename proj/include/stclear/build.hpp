// Assembles the clearing LP from a scenario: space-time balances, DC flow
// definitions on directed edges, computing-capacity and ramp ranges.
#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "stclear/lp.hpp"
#include "stclear/types.hpp"

namespace stclear {

/// Precomputed index tables shared by the builder and downstream modules.
struct ScenarioIndex {
    int T = 0;
    int N = 0;
    std::vector<std::vector<int>> demands_at;    // node -> demand indices
    std::vector<std::vector<int>> suppliers_at;  // node -> supplier indices
    std::vector<std::vector<int>> links_snd_at;  // node*T + (t-1) -> link indices
    std::vector<std::vector<int>> links_rec_at;
    std::vector<int> component;  // node -> connected component id
    std::vector<int> reference;  // node -> 1 if pinned

    explicit ScenarioIndex(const Scenario& sc) {
        T = sc.horizon;
        N = static_cast<int>(sc.nodes.size());
        demands_at.assign(N, {});
        suppliers_at.assign(N, {});
        links_snd_at.assign(static_cast<size_t>(N) * T, {});
        links_rec_at.assign(static_cast<size_t>(N) * T, {});
        for (size_t j = 0; j < sc.demands.size(); ++j)
            demands_at[sc.node_index(sc.demands[j].node)].push_back(static_cast<int>(j));
        for (size_t i = 0; i < sc.suppliers.size(); ++i)
            suppliers_at[sc.node_index(sc.suppliers[i].node)].push_back(static_cast<int>(i));
        for (size_t v = 0; v < sc.virtual_links.size(); ++v) {
            const auto& vl = sc.virtual_links[v];
            links_snd_at[st(sc.node_index(vl.snd.node), vl.snd.time)].push_back(static_cast<int>(v));
            links_rec_at[st(sc.node_index(vl.rec.node), vl.rec.time)].push_back(static_cast<int>(v));
        }

        // connected components over transmission lines (union-find)
        component.resize(N);
        for (int n = 0; n < N; ++n) component[n] = n;
        for (const auto& l : sc.lines) merge(sc.node_index(l.snd), sc.node_index(l.rec));
        for (int n = 0; n < N; ++n) component[n] = find(n);

        // reference per component: the smallest node id (length, then lex),
        // overridden by an explicit scenario reference node for its component
        reference.assign(N, 0);
        std::vector<int> best(N, -1);
        for (int n = 0; n < N; ++n) {
            int c = component[n];
            if (best[c] < 0 || id_less(sc.nodes[n], sc.nodes[best[c]])) best[c] = n;
        }
        if (sc.reference_node) {
            int rn = sc.node_index(*sc.reference_node);
            if (rn >= 0) best[component[rn]] = rn;
        }
        for (int n = 0; n < N; ++n)
            if (best[component[n]] == n) reference[n] = 1;
    }

    size_t st(int node, int time1) const { return static_cast<size_t>(node) * T + (time1 - 1); }

    static bool id_less(const std::string& a, const std::string& b) {
        if (a.size() != b.size()) return a.size() < b.size();
        return a < b;
    }

  private:
    int find(int n) {
        while (component[n] != n) n = component[n] = component[component[n]];
        return n;
    }
    void merge(int a, int b) { component[find(a)] = find(b); }
};

namespace edge {

// line l splits into directed edges 2l (snd->rec) and 2l+1 (rec->snd)
inline int count(const Scenario& sc) { return 2 * static_cast<int>(sc.lines.size()); }
inline const std::string& snd(const Scenario& sc, int k) {
    const auto& l = sc.lines[k / 2];
    return k % 2 == 0 ? l.snd : l.rec;
}
inline const std::string& rec(const Scenario& sc, int k) {
    const auto& l = sc.lines[k / 2];
    return k % 2 == 0 ? l.rec : l.snd;
}
inline double price(const Scenario& sc, int k) { return sc.lines[k / 2].price; }

}  // namespace edge

/// Column layout of the clearing LP, shared with every consumer of it.
struct VarLayout {
    int T = 0;
    int num_demands = 0, num_suppliers = 0, num_edges = 0, num_nodes = 0, num_links = 0;
    bool has_theta = false;

    int d(int j, int t1) const { return j * T + (t1 - 1); }
    int p(int i, int t1) const { return num_demands * T + i * T + (t1 - 1); }
    int f(int k, int t1) const { return (num_demands + num_suppliers) * T + k * T + (t1 - 1); }
    int theta(int n, int t1) const {
        return (num_demands + num_suppliers + num_edges) * T + n * T + (t1 - 1);
    }
    int delta(int v) const {
        return (num_demands + num_suppliers + num_edges + (has_theta ? num_nodes : 0)) * T + v;
    }
    int total() const {
        return (num_demands + num_suppliers + num_edges + (has_theta ? num_nodes : 0)) * T + num_links;
    }
};

inline VarLayout clearing_layout(const Scenario& sc) {
    VarLayout lay;
    lay.T = sc.horizon;
    lay.num_demands = static_cast<int>(sc.demands.size());
    lay.num_suppliers = static_cast<int>(sc.suppliers.size());
    lay.num_edges = edge::count(sc);
    lay.num_nodes = static_cast<int>(sc.nodes.size());
    lay.num_links = static_cast<int>(sc.virtual_links.size());
    lay.has_theta = sc.network_model == NetworkModel::dc;
    return lay;
}

/// Builds the full space-time clearing LP. Throws on validation failure.
inline LPInstance build(const Scenario& sc) {
    auto violations = validate(sc);
    if (!violations.empty()) {
        std::string msg = "scenario invalid:";
        for (size_t i = 0; i < violations.size() && i < 4; ++i)
            msg += " [" + violations[i].entity + ": " + violations[i].message + "]";
        throw std::invalid_argument(msg);
    }

    const int T = sc.horizon;
    ScenarioIndex ix(sc);
    VarLayout lay = clearing_layout(sc);
    LPInstance lp;
    lp.cost.reserve(lay.total());

    for (int j = 0; j < lay.num_demands; ++j)
        for (int t = 1; t <= T; ++t)
            lp.add_var({VarKind::demand, j, t}, 0.0, sc.demands[j].capacity[t - 1],
                       -sc.demands[j].price[t - 1]);
    for (int i = 0; i < lay.num_suppliers; ++i)
        for (int t = 1; t <= T; ++t)
            lp.add_var({VarKind::supply, i, t}, 0.0, sc.suppliers[i].capacity[t - 1],
                       sc.suppliers[i].price[t - 1]);
    for (int k = 0; k < lay.num_edges; ++k) {
        double up = sc.network_model == NetworkModel::transport ? sc.lines[k / 2].flow_cap : kInf;
        for (int t = 1; t <= T; ++t)
            lp.add_var({VarKind::edge_flow, k, t}, 0.0, up, edge::price(sc, k));
    }
    if (lay.has_theta) {
        for (int n = 0; n < lay.num_nodes; ++n) {
            for (int t = 1; t <= T; ++t) {
                bool pinned = ix.reference[n] == 1;
                lp.add_var({VarKind::angle, n, t}, pinned ? 0.0 : -kInf, pinned ? 0.0 : kInf, 0.0);
            }
        }
    }
    for (int v = 0; v < lay.num_links; ++v)
        lp.add_var({VarKind::shift, v, 0}, 0.0, sc.virtual_links[v].capacity,
                   sc.virtual_links[v].price);

    // balance per space-time node, written supply-minus-demand = 0 so the
    // row dual is the nodal price
    for (int n = 0; n < lay.num_nodes; ++n) {
        for (int t = 1; t <= T; ++t) {
            std::vector<std::pair<int, double>> coef;
            for (int i : ix.suppliers_at[n]) coef.push_back({lay.p(i, t), 1.0});
            for (int j : ix.demands_at[n]) coef.push_back({lay.d(j, t), -1.0});
            for (int k = 0; k < lay.num_edges; ++k) {
                if (sc.node_index(edge::rec(sc, k)) == n) coef.push_back({lay.f(k, t), 1.0});
                else if (sc.node_index(edge::snd(sc, k)) == n) coef.push_back({lay.f(k, t), -1.0});
            }
            for (int v : ix.links_snd_at[ix.st(n, t)]) coef.push_back({lay.delta(v), 1.0});
            for (int v : ix.links_rec_at[ix.st(n, t)]) coef.push_back({lay.delta(v), -1.0});
            std::sort(coef.begin(), coef.end());
            lp.add_row({RowKind::balance, n, t}, RowSense::eq, 0.0, std::move(coef));
        }
    }

    if (sc.network_model == NetworkModel::dc) {
        for (size_t l = 0; l < sc.lines.size(); ++l) {
            const auto& line = sc.lines[l];
            int ns = sc.node_index(line.snd);
            int nr = sc.node_index(line.rec);
            for (int t = 1; t <= T; ++t) {
                std::vector<std::pair<int, double>> coef = {
                    {lay.f(2 * static_cast<int>(l), t), 1.0},
                    {lay.f(2 * static_cast<int>(l) + 1, t), -1.0},
                    {lay.theta(ns, t), -line.susceptance},
                    {lay.theta(nr, t), line.susceptance}};
                std::sort(coef.begin(), coef.end());
                lp.add_row({RowKind::dc_def, static_cast<int>(l), t}, RowSense::eq, 0.0,
                           std::move(coef));
            }
        }
        for (size_t l = 0; l < sc.lines.size(); ++l) {
            const auto& line = sc.lines[l];
            int ns = sc.node_index(line.snd);
            int nr = sc.node_index(line.rec);
            double cap = line.effective_angle_cap();
            for (int t = 1; t <= T; ++t) {
                std::vector<std::pair<int, double>> coef = {{lay.theta(ns, t), 1.0},
                                                            {lay.theta(nr, t), -1.0}};
                std::sort(coef.begin(), coef.end());
                int hi = lp.add_row({RowKind::angle_hi, static_cast<int>(l), t}, RowSense::le, cap, coef);
                int lo = lp.add_row({RowKind::angle_lo, static_cast<int>(l), t}, RowSense::ge, -cap,
                                    std::move(coef));
                lp.range_pairs.push_back({hi, lo});
            }
        }
    }

    // computing capacity rows exist only where the cap is finite
    for (int n = 0; n < lay.num_nodes; ++n) {
        for (int t = 1; t <= T; ++t) {
            double cap = sc.computing_cap_at(sc.nodes[n], t);
            if (cap == kInf) continue;
            std::vector<std::pair<int, double>> coef;
            for (int j : ix.demands_at[n]) coef.push_back({lay.d(j, t), 1.0});
            for (int v : ix.links_rec_at[ix.st(n, t)]) coef.push_back({lay.delta(v), 1.0});
            for (int v : ix.links_snd_at[ix.st(n, t)]) coef.push_back({lay.delta(v), -1.0});
            std::sort(coef.begin(), coef.end());
            int hi = lp.add_row({RowKind::computing_hi, n, t}, RowSense::le, cap, coef);
            int lo = lp.add_row({RowKind::computing_lo, n, t}, RowSense::ge, 0.0, std::move(coef));
            lp.range_pairs.push_back({hi, lo});
        }
    }

    for (int i = 0; i < lay.num_suppliers; ++i) {
        const auto& s = sc.suppliers[i];
        if (!s.ramp_limit) continue;
        double r = *s.ramp_limit;
        for (int t = 1; t < T; ++t) {
            std::vector<std::pair<int, double>> coef = {{lay.p(i, t), -1.0}, {lay.p(i, t + 1), 1.0}};
            std::sort(coef.begin(), coef.end());
            int hi = lp.add_row({RowKind::ramp_hi, i, t}, RowSense::le, r, coef);
            int lo = lp.add_row({RowKind::ramp_lo, i, t}, RowSense::ge, -r, std::move(coef));
            lp.range_pairs.push_back({hi, lo});
        }
    }

    return lp;
}

/// Layout of the disaggregation LP: ordinary columns first, per-node served
/// loads of the flexible consumer last.
struct DisaggLayout {
    VarLayout base;      // d/p/f/theta of the embedded ordinary market
    int flex_demand = -1;
    int slice = 0;             // the time slice carrying the disaggregation
    std::vector<int> nd_nodes; // hub first, then link targets
    std::vector<int> nd_link;  // parallel: link index feeding that node, -1 for hub

    int node_load(int pos) const { return base.total() + pos; }
    int total() const { return base.total() + static_cast<int>(nd_nodes.size()); }
};

inline DisaggLayout disaggregation_layout(const Scenario& sc) {
    DisaggLayout lay;
    int flex = -1;
    for (size_t v = 0; v < sc.virtual_links.size(); ++v) {
        int owner = -1;
        for (size_t j = 0; j < sc.demands.size(); ++j)
            if (sc.demands[j].id == sc.virtual_links[v].owner) owner = static_cast<int>(j);
        if (flex >= 0 && owner != flex)
            throw std::invalid_argument("disaggregation form needs a single flexible consumer");
        flex = owner;
    }
    if (flex < 0) {
        if (sc.demands.size() != 1)
            throw std::invalid_argument("no flexible consumer and demand set is not a singleton");
        flex = 0;
    }
    lay.flex_demand = flex;
    lay.slice = sc.virtual_links.empty() ? 1 : sc.virtual_links.front().snd.time;

    const std::string& hub = sc.demands[flex].node;
    lay.nd_nodes.push_back(sc.node_index(hub));
    lay.nd_link.push_back(-1);
    for (size_t v = 0; v < sc.virtual_links.size(); ++v) {
        const auto& vl = sc.virtual_links[v];
        if (vl.snd.node != hub || vl.snd.time != lay.slice || vl.rec.time != lay.slice)
            throw std::invalid_argument("links must fan out from the hub within one time slice");
        if (vl.rec.node == hub)
            throw std::invalid_argument("link target equals the hub node");
        for (int seen : lay.nd_nodes)
            if (seen == sc.node_index(vl.rec.node))
                throw std::invalid_argument("duplicate link target node");
        lay.nd_nodes.push_back(sc.node_index(vl.rec.node));
        lay.nd_link.push_back(static_cast<int>(v));
    }
    return lay;
}

/// Single-flexible-consumer disaggregation LP: the consumer's load at the
/// slice becomes per-node served loads with one aggregate capacity row.
inline LPInstance build_disaggregation(const Scenario& sc) {
    auto violations = validate(sc);
    if (!violations.empty()) throw std::invalid_argument("scenario invalid");
    DisaggLayout lay = disaggregation_layout(sc);

    Scenario stripped = sc;           // same market without the virtual links
    stripped.virtual_links.clear();
    stripped.computing_cap.clear();
    LPInstance lp = build(stripped);
    lay.base = clearing_layout(stripped);

    const Demand& flex = sc.demands[lay.flex_demand];
    const int t = lay.slice;
    // the flexible consumer's ordinary column at the slice is retired
    int dvar = lay.base.d(lay.flex_demand, t);
    lp.upper[dvar] = 0.0;
    lp.cost[dvar] = 0.0;

    std::vector<std::pair<int, double>> agg;
    for (size_t pos = 0; pos < lay.nd_nodes.size(); ++pos) {
        int n = lay.nd_nodes[pos];
        int link = lay.nd_link[pos];
        double shift_price = link < 0 ? 0.0 : sc.virtual_links[link].price;
        double cap = flex.capacity[t - 1];
        if (link >= 0) cap = std::min(cap, sc.virtual_links[link].capacity);
        int col = lp.add_var({VarKind::node_load, n, t}, 0.0, cap,
                             -flex.price[t - 1] + shift_price);
        // enters the balance at its own node on the demand side
        for (auto& row : lp.rows) {
            if (row.ref.kind == RowKind::balance && row.ref.entity == n && row.ref.time == t) {
                row.coef.push_back({col, -1.0});
                std::sort(row.coef.begin(), row.coef.end());
            }
        }
        agg.push_back({col, 1.0});
    }
    lp.add_row({RowKind::total_load, lay.flex_demand, t}, RowSense::le, flex.capacity[t - 1],
               std::move(agg));
    return lp;
}

}  // namespace stclear
