// JSON and CSV serialization: scenario files, solution dumps and replays,
// settlement and sweep tables. Numeric CSV cells are fixed at six decimals
// so diffs are byte-stable.
#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "stclear/settlement.hpp"
#include "stclear/solve.hpp"
#include "stclear/sweep.hpp"
#include "stclear/verify.hpp"

namespace stclear {

using nlohmann::json;

inline std::string fmt6(double v) {
    if (v == 0.0) v = 0.0;  // normalize negative zero
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

// ---------------------------------------------------------------------------
// scenario files

inline json scenario_to_json(const Scenario& sc) {
    json j;
    j["name"] = sc.name;
    j["horizon"] = sc.horizon;
    j["nodes"] = sc.nodes;
    j["network_model"] = sc.network_model == NetworkModel::dc ? "dc" : "transport";
    if (sc.reference_node) j["reference_node"] = *sc.reference_node;
    j["lines"] = json::array();
    for (const auto& l : sc.lines)
        j["lines"].push_back({{"id", l.id},
                              {"snd", l.snd},
                              {"rec", l.rec},
                              {"susceptance", l.susceptance},
                              {"flow_cap", l.flow_cap},
                              {"angle_cap", l.angle_cap},
                              {"price", l.price}});
    j["suppliers"] = json::array();
    for (const auto& s : sc.suppliers) {
        json js = {{"id", s.id}, {"node", s.node}, {"price", s.price}, {"capacity", s.capacity}};
        if (s.ramp_limit) js["ramp_limit"] = *s.ramp_limit;
        j["suppliers"].push_back(js);
    }
    j["demands"] = json::array();
    for (const auto& d : sc.demands)
        j["demands"].push_back(
            {{"id", d.id}, {"node", d.node}, {"price", d.price}, {"capacity", d.capacity}});
    j["virtual_links"] = json::array();
    for (const auto& v : sc.virtual_links)
        j["virtual_links"].push_back({{"id", v.id},
                                      {"snd", {{"node", v.snd.node}, {"time", v.snd.time}}},
                                      {"rec", {{"node", v.rec.node}, {"time", v.rec.time}}},
                                      {"price", v.price},
                                      {"capacity", v.capacity},
                                      {"owner", v.owner}});
    // only finite computing caps are written; anything absent is unbounded
    json caps = json::object();
    for (const auto& [key, cap] : sc.computing_cap) {
        auto& node_obj = caps[key.first];
        if (node_obj.is_null()) node_obj = json::object();
        node_obj[std::to_string(key.second)] = cap;
    }
    if (!caps.empty()) j["computing_cap"] = caps;
    return j;
}

inline Scenario scenario_from_json(const json& j) {
    Scenario sc;
    sc.name = j.value("name", "scenario");
    sc.horizon = j.at("horizon").get<int>();
    sc.nodes = j.at("nodes").get<std::vector<std::string>>();
    std::string model = j.value("network_model", "dc");
    if (model != "dc" && model != "transport")
        throw std::invalid_argument("network_model must be 'dc' or 'transport'");
    sc.network_model = model == "dc" ? NetworkModel::dc : NetworkModel::transport;
    if (j.contains("reference_node")) sc.reference_node = j["reference_node"].get<std::string>();
    for (const auto& jl : j.value("lines", json::array())) {
        TransmissionLine l;
        l.id = jl.at("id");
        l.snd = jl.at("snd");
        l.rec = jl.at("rec");
        l.susceptance = jl.value("susceptance", 1.0);
        l.flow_cap = jl.at("flow_cap");
        l.angle_cap = jl.value("angle_cap", 1.0e3);
        l.price = jl.value("price", 0.0);
        sc.lines.push_back(l);
    }
    auto series = [&](const json& v) -> std::vector<double> {
        if (v.is_number()) return std::vector<double>(sc.horizon, v.get<double>());
        return v.get<std::vector<double>>();
    };
    for (const auto& js : j.value("suppliers", json::array())) {
        Supplier s;
        s.id = js.at("id");
        s.node = js.at("node");
        s.price = series(js.at("price"));
        s.capacity = series(js.at("capacity"));
        if (js.contains("ramp_limit")) s.ramp_limit = js["ramp_limit"].get<double>();
        sc.suppliers.push_back(s);
    }
    for (const auto& jd : j.value("demands", json::array())) {
        Demand d;
        d.id = jd.at("id");
        d.node = jd.at("node");
        d.price = series(jd.at("price"));
        d.capacity = series(jd.at("capacity"));
        sc.demands.push_back(d);
    }
    for (const auto& jv : j.value("virtual_links", json::array())) {
        VirtualLink v;
        v.id = jv.at("id");
        v.snd = {jv.at("snd").at("node").get<std::string>(), jv.at("snd").at("time").get<int>()};
        v.rec = {jv.at("rec").at("node").get<std::string>(), jv.at("rec").at("time").get<int>()};
        v.price = jv.value("price", 0.0);
        v.capacity = jv.at("capacity");
        v.owner = jv.at("owner");
        sc.virtual_links.push_back(v);
    }
    if (j.contains("computing_cap")) {
        for (const auto& [node, val] : j["computing_cap"].items()) {
            if (val.is_number()) {
                for (int t = 1; t <= sc.horizon; ++t)
                    sc.computing_cap[{node, t}] = val.get<double>();
            } else if (val.is_array()) {
                auto arr = val.get<std::vector<json>>();
                for (int t = 1; t <= sc.horizon && t <= (int)arr.size(); ++t)
                    if (!arr[t - 1].is_null()) sc.computing_cap[{node, t}] = arr[t - 1].get<double>();
            } else {
                for (const auto& [time, cap] : val.items())
                    sc.computing_cap[{node, std::stoi(time)}] = cap.get<double>();
            }
        }
    }
    return sc;
}

inline Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open scenario file " + path);
    json j;
    try {
        in >> j;
        return scenario_from_json(j);
    } catch (const json::exception& e) {
        throw std::runtime_error("scenario schema violation in " + path + ": " + e.what());
    }
}

// ---------------------------------------------------------------------------
// solution dump and replay

inline json solution_to_json(const ClearingSolution& cs) {
    IndexMap names(cs.scenario, cs.lp);
    json j;
    j["scenario"] = cs.scenario.name;
    j["status"] = simplex::to_string(cs.sol.status);
    j["objective"] = cs.sol.objective;
    j["surplus"] = -cs.sol.objective;
    j["iterations"] = cs.sol.iterations;
    j["max_primal_residual"] = cs.sol.max_primal_residual;
    j["max_dual_residual"] = cs.sol.max_dual_residual;
    j["max_compl_residual"] = cs.sol.max_compl_residual;
    j["duality_gap"] = cs.sol.duality_gap;
    j["zero_rc_nonbasic"] = cs.sol.zero_rc_nonbasic;
    j["degenerate_basic"] = cs.sol.degenerate_basic;
    json primal = json::object(), dual = json::object();
    for (int v = 0; v < cs.lp.num_vars(); ++v) primal[names.var(v)] = cs.sol.primal[v];
    for (int r = 0; r < cs.lp.num_rows(); ++r) dual[names.row(r)] = cs.sol.dual[r];
    j["primal"] = primal;
    j["dual"] = dual;
    return j;
}

/// Rebuilds a ClearingSolution from a dumped solution file; used to re-verify
/// an allocation without solving.
inline ClearingSolution replay_solution(const Scenario& sc, const json& j) {
    ClearingSolution cs;
    cs.scenario = sc;
    cs.lp = build(sc);
    cs.layout = clearing_layout(sc);
    IndexMap names(sc, cs.lp);
    cs.sol.status = simplex::Status::optimal;
    if (j.value("status", "optimal") != std::string("optimal"))
        throw std::runtime_error("replay file does not hold an optimal solution");
    cs.sol.objective = j.at("objective").get<double>();
    cs.sol.primal.assign(cs.lp.num_vars(), 0.0);
    cs.sol.dual.assign(cs.lp.num_rows(), 0.0);
    cs.sol.zero_rc_nonbasic = j.value("zero_rc_nonbasic", 0);
    cs.sol.degenerate_basic = j.value("degenerate_basic", 0);
    for (const auto& [name, val] : j.at("primal").items()) {
        int v = names.var(name);
        if (v < 0) throw std::runtime_error("replay primal entry does not match the scenario: " + name);
        cs.sol.primal[v] = val.get<double>();
    }
    for (const auto& [name, val] : j.at("dual").items()) {
        int r = names.row(name);
        if (r < 0) throw std::runtime_error("replay dual entry does not match the scenario: " + name);
        cs.sol.dual[r] = val.get<double>();
    }
    cs.balance_row.assign(static_cast<size_t>(cs.N()) * cs.T(), -1);
    cs.comp_hi_row.assign(static_cast<size_t>(cs.N()) * cs.T(), -1);
    cs.comp_lo_row.assign(static_cast<size_t>(cs.N()) * cs.T(), -1);
    for (int r = 0; r < cs.lp.num_rows(); ++r) {
        const RowRef& ref = cs.lp.rows[r].ref;
        if (ref.kind == RowKind::balance) cs.balance_row[cs.st(ref.entity, ref.time)] = r;
        else if (ref.kind == RowKind::computing_hi) cs.comp_hi_row[cs.st(ref.entity, ref.time)] = r;
        else if (ref.kind == RowKind::computing_lo) cs.comp_lo_row[cs.st(ref.entity, ref.time)] = r;
    }
    // recompute the primal residual so corrupted replays surface in checks
    double worst = 0.0;
    for (int r = 0; r < cs.lp.num_rows(); ++r) {
        double act = cs.lp.eval_row(r, cs.sol.primal);
        const LPRow& row = cs.lp.rows[r];
        if (row.sense == RowSense::eq) worst = std::max(worst, std::fabs(act - row.rhs));
        else if (row.sense == RowSense::le) worst = std::max(worst, act - row.rhs);
        else worst = std::max(worst, row.rhs - act);
    }
    cs.sol.max_primal_residual = worst;
    return cs;
}

// ---------------------------------------------------------------------------
// CSV tables

inline std::string prices_csv(const ClearingSolution& cs) {
    std::ostringstream os;
    os << "node,time,pi,omega_l,omega_u,pi_hat\n";
    for (int n = 0; n < cs.N(); ++n)
        for (int t = 1; t <= cs.T(); ++t)
            os << cs.scenario.nodes[n] << ',' << t << ',' << fmt6(cs.pi(n, t)) << ','
               << fmt6(cs.omega_l(n, t)) << ',' << fmt6(cs.omega_u(n, t)) << ','
               << fmt6(cs.pi_hat(n, t)) << '\n';
    return os.str();
}

inline std::string settlement_csv(const ClearingSolution& cs, const Settlement& st) {
    const Scenario& sc = cs.scenario;
    std::ostringstream os;
    os << "class,id,payment,revenue,profit\n";
    for (size_t j = 0; j < sc.demands.size(); ++j)
        os << "demand," << sc.demands[j].id << ',' << fmt6(st.load_payment[j]) << ',' << fmt6(0.0)
           << ',' << fmt6(st.demand_profit_total(static_cast<int>(j))) << '\n';
    for (size_t i = 0; i < sc.suppliers.size(); ++i)
        os << "supplier," << sc.suppliers[i].id << ',' << fmt6(0.0) << ','
           << fmt6(st.supplier_revenue[i]) << ',' << fmt6(st.supplier_profit_total(static_cast<int>(i)))
           << '\n';
    for (size_t l = 0; l < sc.lines.size(); ++l) {
        double profit = 0.0;
        for (int t = 0; t < st.T; ++t)
            profit += st.edge_profit[2 * l][t] + st.edge_profit[2 * l + 1][t];
        os << "line," << sc.lines[l].id << ',' << fmt6(0.0) << ',' << fmt6(st.line_revenue[l]) << ','
           << fmt6(profit) << '\n';
    }
    for (size_t v = 0; v < sc.virtual_links.size(); ++v)
        os << "virtual_link," << sc.virtual_links[v].id << ',' << fmt6(0.0) << ','
           << fmt6(st.vlink_revenue[v]) << ',' << fmt6(st.vlink_profit[v]) << '\n';
    os << "total,," << fmt6(st.total_load_payment) << ',' << fmt6(st.total_revenue()) << ','
       << fmt6(0.0) << '\n';
    return os.str();
}

inline json settlement_to_json(const Settlement& st) {
    json j;
    j["total_load_payment"] = st.total_load_payment;
    j["total_supplier_revenue"] = st.total_supplier_revenue;
    j["total_transmission_revenue"] = st.total_transmission_revenue;
    j["total_vlink_revenue"] = st.total_vlink_revenue;
    j["total_revenue"] = st.total_revenue();
    j["revenue_adequacy_residual"] = st.total_load_payment - st.total_revenue();
    return j;
}

inline json verification_to_json(const VerificationReport& rep) {
    json j;
    j["scenario"] = rep.scenario;
    j["tolerance"] = rep.tolerance;
    j["all_pass"] = rep.all_pass();
    j["checks"] = json::array();
    for (const auto& r : rep.records)
        j["checks"].push_back({{"name", r.name},
                               {"status", to_string(r.status)},
                               {"max_residual", r.max_residual},
                               {"details", r.details}});
    return j;
}

inline std::string verification_text(const VerificationReport& rep) {
    std::ostringstream os;
    os << "verification: " << rep.scenario << " (tol " << rep.tolerance << ")\n";
    for (const auto& r : rep.records) {
        os << "  " << r.name;
        for (size_t pad = r.name.size(); pad < 28; ++pad) os << ' ';
        os << to_string(r.status) << "  residual " << fmt6(r.max_residual);
        if (!r.details.empty()) os << "  (" << r.details << ")";
        os << '\n';
    }
    return os.str();
}

inline std::string sweep_csv(const SweepReport& rep) {
    std::ostringstream os;
    os << "eps,capacity,surplus,gap";
    for (const auto& id : rep.link_ids) os << ",delta_" << id << ",unit_profit_" << id;
    os << ",dual_degenerate\n";
    for (const auto& pt : rep.points) {
        os << fmt6(pt.eps) << ',' << fmt6(pt.capacity) << ',' << fmt6(pt.surplus) << ','
           << fmt6(pt.gap);
        for (size_t i = 0; i < rep.link_ids.size(); ++i)
            os << ',' << fmt6(pt.delta[i]) << ',' << fmt6(pt.unit_profit[i]);
        os << ',' << (pt.dual_degenerate ? 1 : 0) << '\n';
    }
    return os.str();
}

inline json sweep_to_json(const SweepReport& rep) {
    json j;
    j["links"] = rep.link_ids;
    j["points"] = json::array();
    for (const auto& pt : rep.points) {
        json p = {{"eps", pt.eps},       {"capacity", pt.capacity},
                  {"surplus", pt.surplus}, {"gap", pt.gap},
                  {"delta", pt.delta},   {"unit_profit", pt.unit_profit},
                  {"dual_degenerate", pt.dual_degenerate}};
        j["points"].push_back(p);
    }
    for (const CheckRecord* r :
         {&rep.unchanged_when_slack, &rep.unit_profit_monotone, &rep.gap_bounded_by_cost}) {
        j["checks"].push_back({{"name", r->name},
                               {"status", to_string(r->status)},
                               {"max_residual", r->max_residual}});
    }
    return j;
}

/// Per-directed-edge flows, revenue and profit; the line-level aggregation
/// lives in the settlement table.
inline std::string edges_csv(const ClearingSolution& cs, const Settlement& st) {
    const Scenario& sc = cs.scenario;
    std::ostringstream os;
    os << "edge,snd,rec,time,flow,revenue,profit\n";
    for (int k = 0; k < edge::count(sc); ++k) {
        const auto& line = sc.lines[k / 2];
        for (int t = 1; t <= cs.T(); ++t) {
            int ns = sc.node_index(edge::snd(sc, k));
            int nr = sc.node_index(edge::rec(sc, k));
            double flow = cs.f(k, t);
            os << line.id << (k % 2 == 0 ? "+" : "-") << ',' << edge::snd(sc, k) << ','
               << edge::rec(sc, k) << ',' << t << ',' << fmt6(flow) << ','
               << fmt6((cs.pi(nr, t) - cs.pi(ns, t)) * flow) << ','
               << fmt6(st.edge_profit[k][t - 1]) << '\n';
        }
    }
    return os.str();
}

inline std::string histogram_csv(const std::vector<HistogramBin>& bins) {
    std::ostringstream os;
    os << "bin_lo,bin_hi,count\n";
    for (const auto& b : bins) os << fmt6(b.lo) << ',' << fmt6(b.hi) << ',' << b.count << '\n';
    return os.str();
}

inline json lmp_stats_to_json(const LmpStats& s) {
    return json{{"mean", s.mean},   {"median", s.median},   {"max", s.max},
                {"min", s.min},     {"std_dev", s.std_dev}, {"avg_dev", s.avg_dev}};
}

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << content;
}

}  // namespace stclear
