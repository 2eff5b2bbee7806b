// Domain types for space-time market clearing: players, network, scenario.
#pragma once

#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace stclear {

constexpr double kInf = std::numeric_limits<double>::infinity();

enum class NetworkModel { dc, transport };

/// A (node, time) pair. Times are 1-based: 1..T.
struct SpaceTimeIndex {
    std::string node;
    int time = 1;

    friend bool operator==(const SpaceTimeIndex& a, const SpaceTimeIndex& b) {
        return a.node == b.node && a.time == b.time;
    }
    friend bool operator!=(const SpaceTimeIndex& a, const SpaceTimeIndex& b) { return !(a == b); }
};

/// Power supplier bidding price/capacity per time step, with an optional
/// bound on |p(t+1) - p(t)|.
struct Supplier {
    std::string id;
    std::string node;
    std::vector<double> price;     // $/MWh, length T
    std::vector<double> capacity;  // MWh, length T
    std::optional<double> ramp_limit;
};

/// Consumer bidding a requested load per time step at its hub node.
struct Demand {
    std::string id;
    std::string node;  // hub node
    std::vector<double> price;
    std::vector<double> capacity;
};

struct TransmissionLine {
    std::string id;
    std::string snd;
    std::string rec;
    double susceptance = 1.0;   // per unit, > 0
    double flow_cap = 0.0;      // MWh
    double angle_cap = 1.0e3;   // radians, > 0
    double price = 0.0;         // $/MWh

    // effective phase-angle cap: min(flow_cap / B, angle_cap)
    double effective_angle_cap() const {
        return std::min(flow_cap / susceptance, angle_cap);
    }
};

/// Non-physical pathway shifting load from one space-time node to another.
struct VirtualLink {
    std::string id;
    SpaceTimeIndex snd;
    SpaceTimeIndex rec;
    double price = 0.0;     // $/MWh, >= 0
    double capacity = 0.0;  // MWh, >= 0
    std::string owner;      // demand id
};

/// A complete market instance. Immutable after construction by convention;
/// safe to share read-only across threads.
struct Scenario {
    std::string name;
    int horizon = 1;  // T
    std::vector<std::string> nodes;
    std::vector<TransmissionLine> lines;
    std::vector<Supplier> suppliers;
    std::vector<Demand> demands;
    std::vector<VirtualLink> virtual_links;
    // Finite computing-capacity entries only; anything absent is unbounded.
    std::map<std::pair<std::string, int>, double> computing_cap;
    NetworkModel network_model = NetworkModel::dc;
    std::optional<std::string> reference_node;

    bool has_node(const std::string& n) const {
        for (const auto& m : nodes)
            if (m == n) return true;
        return false;
    }

    int node_index(const std::string& n) const {
        for (size_t i = 0; i < nodes.size(); ++i)
            if (nodes[i] == n) return static_cast<int>(i);
        return -1;
    }

    double computing_cap_at(const std::string& node, int time) const {
        auto it = computing_cap.find({node, time});
        return it == computing_cap.end() ? kInf : it->second;
    }

    bool has_ramping() const {
        for (const auto& s : suppliers)
            if (s.ramp_limit) return true;
        return false;
    }

    const Demand* find_demand(const std::string& id) const {
        for (const auto& d : demands)
            if (d.id == id) return &d;
        return nullptr;
    }

    const VirtualLink* find_link(const std::string& id) const {
        for (const auto& v : virtual_links)
            if (v.id == id) return &v;
        return nullptr;
    }
};

struct Violation {
    std::string entity;  // offending entity id
    std::string rule;    // short rule tag
    std::string message;
};

namespace detail {

inline bool finite_vector(const std::vector<double>& v) {
    for (double x : v)
        if (!std::isfinite(x)) return false;
    return true;
}

inline bool nonneg_vector(const std::vector<double>& v) {
    for (double x : v)
        if (!(x >= 0.0)) return false;
    return true;
}

}  // namespace detail

/// Checks every scenario invariant. Violations are data, not failures:
/// an empty result means the scenario is well formed.
inline std::vector<Violation> validate(const Scenario& sc) {
    std::vector<Violation> out;
    auto flag = [&](const std::string& entity, const std::string& rule, const std::string& msg) {
        out.push_back({entity, rule, msg});
    };

    if (sc.horizon < 1) flag("scenario", "horizon", "horizon must be >= 1");
    if (sc.nodes.empty()) flag("scenario", "nodes", "node set is empty");

    std::unordered_map<std::string, int> node_seen;
    for (const auto& n : sc.nodes)
        if (++node_seen[n] == 2) flag(n, "duplicate_node", "node listed twice");

    auto valid_st = [&](const SpaceTimeIndex& st) {
        return sc.has_node(st.node) && st.time >= 1 && st.time <= sc.horizon;
    };

    std::unordered_map<std::string, int> player_ids;
    for (const auto& s : sc.suppliers) ++player_ids[s.id];
    for (const auto& d : sc.demands) ++player_ids[d.id];
    for (const auto& [id, count] : player_ids)
        if (count > 1) flag(id, "duplicate_id", "player id used more than once");

    for (const auto& s : sc.suppliers) {
        if (!sc.has_node(s.node))
            flag(s.id, "dangling_node", "supplier references unknown node " + s.node);
        if ((int)s.price.size() != sc.horizon || (int)s.capacity.size() != sc.horizon)
            flag(s.id, "vector_length", "per-time vectors must have length T");
        if (!detail::nonneg_vector(s.capacity))
            flag(s.id, "capacity_sign", "capacity entries must be >= 0");
        if (!detail::finite_vector(s.price))
            flag(s.id, "price_finite", "price entries must be finite");
        if (s.ramp_limit && !(*s.ramp_limit >= 0.0))
            flag(s.id, "ramp_sign", "ramp limit must be >= 0");
    }

    for (const auto& d : sc.demands) {
        if (!sc.has_node(d.node))
            flag(d.id, "dangling_node", "demand references unknown node " + d.node);
        if ((int)d.price.size() != sc.horizon || (int)d.capacity.size() != sc.horizon)
            flag(d.id, "vector_length", "per-time vectors must have length T");
        if (!detail::nonneg_vector(d.capacity))
            flag(d.id, "capacity_sign", "capacity entries must be >= 0");
        if (!detail::finite_vector(d.price))
            flag(d.id, "price_finite", "price entries must be finite");
    }

    std::unordered_map<std::string, int> line_ids;
    for (const auto& l : sc.lines) {
        if (++line_ids[l.id] == 2) flag(l.id, "duplicate_id", "line id used more than once");
        if (!sc.has_node(l.snd) || !sc.has_node(l.rec))
            flag(l.id, "dangling_node", "line endpoint not in node set");
        if (l.snd == l.rec) flag(l.id, "self_loop", "line endpoints must differ");
        if (!(l.susceptance > 0.0)) flag(l.id, "susceptance", "susceptance must be > 0");
        if (!(l.flow_cap >= 0.0)) flag(l.id, "flow_cap", "flow capacity must be >= 0");
        if (!(l.angle_cap > 0.0)) flag(l.id, "angle_cap", "angle cap must be > 0");
        if (!(l.effective_angle_cap() > 0.0))
            flag(l.id, "effective_angle_cap", "min(flow_cap/B, angle_cap) must be > 0");
        if (!(l.price >= 0.0)) flag(l.id, "price_sign", "line price must be >= 0");
    }

    std::unordered_map<std::string, int> link_ids;
    for (const auto& v : sc.virtual_links) {
        if (++link_ids[v.id] == 2) flag(v.id, "duplicate_id", "virtual link id used more than once");
        if (!valid_st(v.snd) || !valid_st(v.rec))
            flag(v.id, "dangling_endpoint", "virtual link endpoint does not resolve");
        if (v.rec.time < v.snd.time)
            flag(v.id, "time_direction", "load cannot shift backward in time");
        if (v.snd == v.rec) flag(v.id, "self_loop", "space-time endpoints must differ");
        if (!(v.price >= 0.0)) flag(v.id, "price_sign", "shift price must be >= 0");
        if (!(v.capacity >= 0.0)) flag(v.id, "capacity_sign", "shift capacity must be >= 0");
        const Demand* owner = sc.find_demand(v.owner);
        if (owner == nullptr) {
            flag(v.id, "owner", "owner demand '" + v.owner + "' not found");
        } else if (owner->node != v.snd.node) {
            flag(v.id, "owner_hub", "sending node must equal the owner's hub node");
        }
    }

    for (const auto& [key, cap] : sc.computing_cap) {
        const auto& [node, time] = key;
        if (!sc.has_node(node) || time < 1 || time > sc.horizon)
            flag(node, "computing_cap_index", "computing cap entry at unknown (node,time)");
        if (!(cap >= 0.0)) flag(node, "computing_cap_sign", "computing cap must be >= 0");
    }

    if (sc.reference_node && !sc.has_node(*sc.reference_node))
        flag(*sc.reference_node, "reference_node", "reference node not in node set");

    return out;
}

}  // namespace stclear
