// LP instance container with a semantic index map for every column and row.
#pragma once

#include <cstdio>
#include <sstream>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "stclear/types.hpp"

namespace stclear {

enum class VarKind {
    demand,     // d(j,t)
    supply,     // p(i,t)
    edge_flow,  // f(k,t), directed edge k
    angle,      // theta(n,t)
    shift,      // delta(v)
    node_load,  // d_n of the disaggregation form
};

enum class RowKind {
    balance,       // space-time power balance, dual pi(n,t)
    dc_def,        // f+ - f- = B (theta_snd - theta_rec)
    angle_hi,      // theta_snd - theta_rec <= cap
    angle_lo,      // theta_snd - theta_rec >= -cap
    computing_hi,  // served load at (n,t) <= dmax, dual -omega_u
    computing_lo,  // served load at (n,t) >= 0, dual omega_l
    ramp_hi,       // p(t+1) - p(t) <= r
    ramp_lo,       // p(t+1) - p(t) >= -r
    total_load,    // sum of node loads <= requested capacity (disaggregation)
};

/// Semantic identity of a column: which symbol and which index it carries.
/// `entity` indexes into the scenario list for the kind (demands, suppliers,
/// directed edges, nodes, links); `time` is 1-based, 0 when not applicable.
struct VarRef {
    VarKind kind;
    int entity = 0;
    int time = 0;
};

struct RowRef {
    RowKind kind;
    int entity = 0;
    int time = 0;
};

enum class RowSense { eq, le, ge };

struct LPRow {
    RowSense sense = RowSense::eq;
    double rhs = 0.0;
    std::vector<std::pair<int, double>> coef;  // (column, value), columns ascending
    RowRef ref;
};

inline const char* to_string(VarKind k) {
    switch (k) {
        case VarKind::demand: return "d";
        case VarKind::supply: return "p";
        case VarKind::edge_flow: return "f";
        case VarKind::angle: return "theta";
        case VarKind::shift: return "delta";
        case VarKind::node_load: return "dn";
    }
    return "?";
}

inline const char* to_string(RowKind k) {
    switch (k) {
        case RowKind::balance: return "balance";
        case RowKind::dc_def: return "dc";
        case RowKind::angle_hi: return "angle_hi";
        case RowKind::angle_lo: return "angle_lo";
        case RowKind::computing_hi: return "comp_hi";
        case RowKind::computing_lo: return "comp_lo";
        case RowKind::ramp_hi: return "ramp_hi";
        case RowKind::ramp_lo: return "ramp_lo";
        case RowKind::total_load: return "total_load";
    }
    return "?";
}

/// Minimization LP: cost'x over lower <= x <= upper subject to rows.
/// Duals follow the Lagrangian convention L = cost'x - sum_r y_r (a_r'x - rhs_r),
/// so the dual of a balance row written supply-minus-demand is the nodal price.
struct LPInstance {
    std::vector<double> cost;
    std::vector<double> lower;
    std::vector<double> upper;
    std::vector<VarRef> var_refs;
    std::vector<LPRow> rows;
    // Two-sided inequalities stored as adjacent one-sided rows; each pair is
    // recorded here as (hi_row, lo_row) so solvers may treat them as a range.
    std::vector<std::pair<int, int>> range_pairs;

    int num_vars() const { return static_cast<int>(cost.size()); }
    int num_rows() const { return static_cast<int>(rows.size()); }

    int add_var(VarRef ref, double lo, double up, double c) {
        var_refs.push_back(ref);
        lower.push_back(lo);
        upper.push_back(up);
        cost.push_back(c);
        return num_vars() - 1;
    }

    int add_row(RowRef ref, RowSense sense, double rhs, std::vector<std::pair<int, double>> coef) {
        rows.push_back({sense, rhs, std::move(coef), ref});
        return num_rows() - 1;
    }

    double eval_row(int r, const std::vector<double>& x) const {
        double v = 0.0;
        for (auto [j, a] : rows[r].coef) v += a * x[j];
        return v;
    }

    double eval_cost(const std::vector<double>& x) const {
        double v = 0.0;
        for (int j = 0; j < num_vars(); ++j) v += cost[j] * x[j];
        return v;
    }
};

/// Name maps built on top of an LPInstance; names key JSON dumps and replays.
class IndexMap {
  public:
    IndexMap() = default;
    IndexMap(const Scenario& sc, const LPInstance& lp) { build(sc, lp); }

    void build(const Scenario& sc, const LPInstance& lp) {
        var_names_.clear();
        row_names_.clear();
        var_lookup_.clear();
        row_lookup_.clear();
        var_names_.reserve(lp.num_vars());
        row_names_.reserve(lp.num_rows());
        for (int j = 0; j < lp.num_vars(); ++j) {
            var_names_.push_back(var_name(sc, lp.var_refs[j]));
            var_lookup_[var_names_.back()] = j;
        }
        for (int r = 0; r < lp.num_rows(); ++r) {
            row_names_.push_back(row_name(sc, lp.rows[r].ref));
            row_lookup_[row_names_.back()] = r;
        }
    }

    static std::string var_name(const Scenario& sc, const VarRef& v) {
        std::ostringstream os;
        os << to_string(v.kind) << '(';
        switch (v.kind) {
            case VarKind::demand: os << sc.demands[v.entity].id; break;
            case VarKind::supply: os << sc.suppliers[v.entity].id; break;
            case VarKind::edge_flow:
                os << sc.lines[v.entity / 2].id << (v.entity % 2 == 0 ? "+" : "-");
                break;
            case VarKind::angle: os << sc.nodes[v.entity]; break;
            case VarKind::shift: os << sc.virtual_links[v.entity].id; break;
            case VarKind::node_load: os << sc.nodes[v.entity]; break;
        }
        if (v.time > 0) os << ",t" << v.time;
        os << ')';
        return os.str();
    }

    static std::string row_name(const Scenario& sc, const RowRef& r) {
        std::ostringstream os;
        os << to_string(r.kind) << '(';
        switch (r.kind) {
            case RowKind::balance:
            case RowKind::computing_hi:
            case RowKind::computing_lo: os << sc.nodes[r.entity]; break;
            case RowKind::dc_def:
            case RowKind::angle_hi:
            case RowKind::angle_lo: os << sc.lines[r.entity].id; break;
            case RowKind::ramp_hi:
            case RowKind::ramp_lo: os << sc.suppliers[r.entity].id; break;
            case RowKind::total_load: os << sc.demands[r.entity].id; break;
        }
        if (r.time > 0) os << ",t" << r.time;
        os << ')';
        return os.str();
    }

    const std::string& var(int j) const { return var_names_[j]; }
    const std::string& row(int r) const { return row_names_[r]; }
    int var(const std::string& name) const {
        auto it = var_lookup_.find(name);
        return it == var_lookup_.end() ? -1 : it->second;
    }
    int row(const std::string& name) const {
        auto it = row_lookup_.find(name);
        return it == row_lookup_.end() ? -1 : it->second;
    }

  private:
    std::vector<std::string> var_names_;
    std::vector<std::string> row_names_;
    std::unordered_map<std::string, int> var_lookup_;
    std::unordered_map<std::string, int> row_lookup_;
};

namespace detail {

inline std::string lp_token(std::string s) {
    for (char& c : s)
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') c = '_';
    return s;
}

inline std::string lp_num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

}  // namespace detail

/// Serializes the instance in CPLEX LP text format. Output is byte-stable
/// for identical input, so exports can be diffed across runs.
inline std::string export_lp_format(const Scenario& sc, const LPInstance& lp) {
    IndexMap names(sc, lp);
    std::ostringstream os;
    os << "\\ stclear LP export\nMinimize\n obj:";
    bool first = true;
    for (int j = 0; j < lp.num_vars(); ++j) {
        double c = lp.cost[j];
        if (c == 0.0) continue;
        os << (c < 0 ? " - " : (first ? " " : " + ")) << detail::lp_num(std::fabs(c)) << ' '
           << detail::lp_token(names.var(j));
        first = false;
    }
    if (first) os << " 0 " << (lp.num_vars() ? detail::lp_token(names.var(0)) : "x");
    os << "\nSubject To\n";
    for (int r = 0; r < lp.num_rows(); ++r) {
        const LPRow& row = lp.rows[r];
        os << ' ' << detail::lp_token(names.row(r)) << ':';
        bool f2 = true;
        for (auto [j, a] : row.coef) {
            os << (a < 0 ? " - " : (f2 ? " " : " + ")) << detail::lp_num(std::fabs(a)) << ' '
               << detail::lp_token(names.var(j));
            f2 = false;
        }
        const char* op = row.sense == RowSense::eq ? " = " : (row.sense == RowSense::le ? " <= " : " >= ");
        os << op << detail::lp_num(row.rhs) << '\n';
    }
    os << "Bounds\n";
    for (int j = 0; j < lp.num_vars(); ++j) {
        double lo = lp.lower[j];
        double up = lp.upper[j];
        const std::string tok = detail::lp_token(names.var(j));
        if (lo == -kInf && up == kInf) {
            os << ' ' << tok << " free\n";
        } else if (lo == -kInf) {
            os << " -inf <= " << tok << " <= " << detail::lp_num(up) << '\n';
        } else if (up == kInf) {
            os << ' ' << detail::lp_num(lo) << " <= " << tok << '\n';
        } else {
            os << ' ' << detail::lp_num(lo) << " <= " << tok << " <= " << detail::lp_num(up) << '\n';
        }
    }
    os << "End\n";
    return os.str();
}

}  // namespace stclear
