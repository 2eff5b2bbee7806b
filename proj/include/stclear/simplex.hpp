// Two-phase primal simplex on bounded variables with range rows.
// Maintains an explicit dense basis inverse (column-major); pivoting is
// deterministic: most-negative pricing with lowest-index ties, Bland's rule
// after a stall threshold.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

namespace stclear::simplex {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// min cost'x  s.t.  row.lo <= a'x <= row.hi per row,  lo <= x <= up.
/// Rows with lo == hi are equalities; one-sided rows use +-inf.
struct Problem {
    std::vector<double> cost;
    std::vector<double> lo;
    std::vector<double> up;
    struct Row {
        std::vector<std::pair<int, double>> coef;
        double lo = -kInf;
        double hi = kInf;
    };
    std::vector<Row> rows;

    int num_vars() const { return static_cast<int>(cost.size()); }
    int num_rows() const { return static_cast<int>(rows.size()); }
};

enum class Status { optimal, infeasible, unbounded, iteration_limit, numerical_failure };

inline const char* to_string(Status s) {
    switch (s) {
        case Status::optimal: return "optimal";
        case Status::infeasible: return "infeasible";
        case Status::unbounded: return "unbounded";
        case Status::iteration_limit: return "iteration_limit";
        case Status::numerical_failure: return "numerical_failure";
    }
    return "?";
}

enum class VarStatus : std::uint8_t { basic, at_lower, at_upper, nonbasic_free };

struct Options {
    double pivot_tol = 1e-8;   // minimum |pivot| admitted in the ratio test
    double dual_tol = 1e-9;    // reduced-cost optimality tolerance
    double feas_tol = 1e-9;    // ratio-test slack
    int max_iterations = 200000;
    int stall_threshold = 0;   // 0: derived from problem size
    int refresh_every = 1024;  // recompute duals from the inverse
};

struct Result {
    Status status = Status::numerical_failure;
    double objective = 0.0;
    std::vector<double> x;         // structural variables
    std::vector<double> y;         // dual per row; y >= 0 when the lower side binds
    std::vector<double> rc;        // reduced cost per structural variable
    std::vector<VarStatus> vstat;  // per structural variable
    std::vector<int> basis;        // extended column index per row

    double max_primal_residual = 0.0;
    double max_dual_residual = 0.0;
    double max_compl_residual = 0.0;
    double duality_gap = 0.0;
    double dual_objective = 0.0;

    int iterations = 0;
    int phase1_iterations = 0;
    bool bland_engaged = false;
    int refactor_count = 0;
    int degenerate_basic = 0;  // basic variables sitting on a bound
    int zero_rc_nonbasic = 0;  // nonbasic columns with ~zero reduced cost
    std::string note;

    bool primal_unique_hint() const { return zero_rc_nonbasic == 0; }
    bool dual_unique_hint() const { return degenerate_basic == 0; }
};

class Solver {
  public:
    explicit Solver(const Problem& p, const Options& opts = {}) : p_(p), o_(opts) { setup(); }

    Result run() {
        Result res;
        if (need_phase1_) {
            phase_ = 1;
            Status s1 = iterate();
            res.phase1_iterations = iters_;
            if (s1 != Status::optimal) {
                res.status = s1 == Status::unbounded ? Status::numerical_failure : s1;
                res.note = "phase 1 stopped early";
                finalize(res);
                return res;
            }
            if (phase1_objective() > 1e-7 * std::max(1.0, rhs_scale_)) {
                res.status = Status::infeasible;
                finalize(res);
                return res;
            }
            freeze_artificials();
        }
        phase_ = 2;
        Status s2 = iterate();
        res.status = s2;
        res.phase1_iterations = std::min(res.phase1_iterations, iters_);
        finalize(res);
        return res;
    }

  private:
    const Problem& p_;
    Options o_;

    int n_ = 0;      // structural
    int m_ = 0;      // rows
    int ncols_ = 0;  // structural + slacks + artificials

    std::vector<std::vector<std::pair<int, double>>> cols_;
    std::vector<double> clo_, cup_, ccost_;  // per extended column
    std::vector<double> rhs_;                // per row (active side)
    std::vector<VarStatus> stat_;
    std::vector<double> x_;

    std::vector<int> basic_;    // column per row
    std::vector<double> binv_;  // column-major m x m
    std::vector<double> y_;
    std::vector<double> w_;
    std::vector<double> work_;

    bool need_phase1_ = false;
    int first_artificial_ = 0;
    int phase_ = 2;
    int iters_ = 0;
    int stall_ = 0;
    bool bland_ = false;
    bool bland_was_used_ = false;
    int refactors_ = 0;
    double last_obj_ = kInf;
    double rhs_scale_ = 1.0;

    size_t idx(int r, int c) const { return static_cast<size_t>(c) * m_ + r; }

    int add_col(double lo, double hi, double c) {
        cols_.push_back({});
        clo_.push_back(lo);
        cup_.push_back(hi);
        ccost_.push_back(c);
        x_.push_back(0.0);
        stat_.push_back(VarStatus::at_lower);
        return ncols_++;
    }

    void setup() {
        n_ = p_.num_vars();
        m_ = p_.num_rows();
        ncols_ = 0;
        clo_.clear();
        cup_.clear();
        ccost_.clear();
        x_.clear();
        stat_.clear();
        cols_.clear();
        for (int j = 0; j < n_; ++j) add_col(p_.lo[j], p_.up[j], p_.cost[j]);
        for (int r = 0; r < m_; ++r)
            for (auto [j, a] : p_.rows[r].coef) cols_[j].push_back({r, a});

        for (int j = 0; j < n_; ++j) {
            if (clo_[j] > -kInf) {
                x_[j] = clo_[j];
                stat_[j] = VarStatus::at_lower;
            } else if (cup_[j] < kInf) {
                x_[j] = cup_[j];
                stat_[j] = VarStatus::at_upper;
            } else {
                x_[j] = 0.0;
                stat_[j] = VarStatus::nonbasic_free;
            }
        }

        // one slack per row: a'x + s = rhs
        rhs_.assign(m_, 0.0);
        for (int r = 0; r < m_; ++r) {
            const auto& row = p_.rows[r];
            double lo, hi, rhs;
            if (row.hi < kInf) {
                rhs = row.hi;
                lo = 0.0;
                hi = row.lo > -kInf ? row.hi - row.lo : kInf;
            } else {
                rhs = row.lo;
                lo = -kInf;
                hi = 0.0;
            }
            rhs_[r] = rhs;
            rhs_scale_ = std::max(rhs_scale_, std::fabs(rhs));
            int sj = add_col(lo, hi, 0.0);
            cols_[sj].push_back({r, 1.0});
        }

        std::vector<double> act(m_, 0.0);
        for (int j = 0; j < n_; ++j) {
            if (x_[j] == 0.0) continue;
            for (auto [r, a] : cols_[j]) act[r] += a * x_[j];
        }

        basic_.assign(m_, -1);
        first_artificial_ = ncols_;
        for (int r = 0; r < m_; ++r) {
            int sj = n_ + r;
            double sval = rhs_[r] - act[r];
            if (sval >= clo_[sj] - 1e-12 && sval <= cup_[sj] + 1e-12) {
                basic_[r] = sj;
                x_[sj] = sval;
                stat_[sj] = VarStatus::basic;
            } else {
                // clamp the slack to its nearest bound; an artificial carries the rest
                double sb = sval < clo_[sj] ? clo_[sj] : cup_[sj];
                x_[sj] = sb;
                stat_[sj] = sb == clo_[sj] ? VarStatus::at_lower : VarStatus::at_upper;
                double resid = sval - sb;
                int aj = add_col(0.0, kInf, 0.0);
                cols_[aj].push_back({r, resid >= 0 ? 1.0 : -1.0});
                basic_[r] = aj;
                x_[aj] = std::fabs(resid);
                stat_[aj] = VarStatus::basic;
                need_phase1_ = true;
            }
        }

        binv_.assign(static_cast<size_t>(m_) * m_, 0.0);
        for (int r = 0; r < m_; ++r) {
            double diag = 1.0;
            if (basic_[r] >= first_artificial_ && cols_[basic_[r]].front().second < 0) diag = -1.0;
            binv_[idx(r, r)] = diag;
        }
        y_.assign(m_, 0.0);
        w_.assign(m_, 0.0);
        work_.assign(m_, 0.0);
        if (o_.stall_threshold == 0) o_.stall_threshold = std::max(500, m_);
    }

    double phase_cost(int j) const {
        if (phase_ == 1) return j >= first_artificial_ ? 1.0 : 0.0;
        return ccost_[j];
    }

    double phase1_objective() const {
        double v = 0.0;
        for (int j = first_artificial_; j < ncols_; ++j) v += x_[j];
        return v;
    }

    double phase_objective() const {
        if (phase_ == 1) return phase1_objective();
        double v = 0.0;
        for (int j = 0; j < ncols_; ++j)
            if (ccost_[j] != 0.0) v += ccost_[j] * x_[j];
        return v;
    }

    void freeze_artificials() {
        for (int j = first_artificial_; j < ncols_; ++j) {
            clo_[j] = 0.0;
            cup_[j] = 0.0;
            ccost_[j] = 0.0;
            if (stat_[j] != VarStatus::basic) {
                stat_[j] = VarStatus::at_lower;
                x_[j] = 0.0;
            }
        }
    }

    void recompute_duals() {
        for (int c = 0; c < m_; ++c) {
            double acc = 0.0;
            const double* col = &binv_[idx(0, c)];
            for (int r = 0; r < m_; ++r) {
                double cb = phase_cost(basic_[r]);
                if (cb != 0.0) acc += cb * col[r];
            }
            y_[c] = acc;
        }
    }

    double reduced_cost(int j) const {
        double rc = phase_cost(j);
        for (auto [r, a] : cols_[j]) rc -= a * y_[r];
        return rc;
    }

    int price(double& dir_out) {
        int best = -1;
        double best_viol = o_.dual_tol;
        double best_dir = 1.0;
        for (int j = 0; j < ncols_; ++j) {
            VarStatus st = stat_[j];
            if (st == VarStatus::basic || clo_[j] == cup_[j]) continue;
            double rc = reduced_cost(j);
            double viol, dir;
            if (st == VarStatus::at_lower && rc < -o_.dual_tol) {
                viol = -rc;
                dir = 1.0;
            } else if (st == VarStatus::at_upper && rc > o_.dual_tol) {
                viol = rc;
                dir = -1.0;
            } else if (st == VarStatus::nonbasic_free && std::fabs(rc) > o_.dual_tol) {
                viol = std::fabs(rc);
                dir = rc < 0 ? 1.0 : -1.0;
            } else {
                continue;
            }
            if (bland_) {
                dir_out = dir;
                return j;
            }
            if (viol > best_viol) {
                best_viol = viol;
                best = j;
                best_dir = dir;
            }
        }
        dir_out = best_dir;
        return best;
    }

    void compute_w(int q) {
        std::fill(w_.begin(), w_.end(), 0.0);
        for (auto [r, a] : cols_[q]) {
            const double* col = &binv_[idx(0, r)];
            for (int i = 0; i < m_; ++i) w_[i] += a * col[i];
        }
    }

    Status iterate() {
        recompute_duals();
        last_obj_ = kInf;
        stall_ = 0;
        int refreshed = 0;
        for (;;) {
            if (iters_ >= o_.max_iterations) return Status::iteration_limit;
            double dir;
            int q = price(dir);
            if (q < 0) {
                if (refreshed < 2) {  // guard against stale duals
                    recompute_duals();
                    ++refreshed;
                    if ((q = price(dir)) < 0) return Status::optimal;
                } else {
                    return Status::optimal;
                }
            }
            refreshed = 0;
            double rcq = reduced_cost(q);
            compute_w(q);

            double limit = cup_[q] - clo_[q];  // bound-flip distance, inf if open
            int leave_row = -1;
            double leave_piv = 0.0;
            for (int r = 0; r < m_; ++r) {
                double wd = dir * w_[r];
                if (std::fabs(wd) <= o_.pivot_tol) continue;
                int b = basic_[r];
                double room;
                if (wd > 0) {
                    if (clo_[b] == -kInf) continue;
                    room = (x_[b] - clo_[b]) / wd;
                } else {
                    if (cup_[b] == kInf) continue;
                    room = (x_[b] - cup_[b]) / wd;
                }
                if (room < -o_.feas_tol) room = 0.0;
                double piv = std::fabs(wd);
                if (room < limit - 1e-9) {
                    limit = room;
                    leave_row = r;
                    leave_piv = piv;
                } else if (leave_row >= 0 && room <= limit + 1e-9) {
                    bool take;
                    if (bland_) {
                        take = basic_[r] < basic_[leave_row];
                    } else if (piv > leave_piv * (1.0 + 1e-9)) {
                        take = true;
                    } else if (piv >= leave_piv * (1.0 - 1e-9)) {
                        take = basic_[r] < basic_[leave_row];
                    } else {
                        take = false;
                    }
                    if (take) {
                        limit = std::min(limit, room);
                        leave_row = r;
                        leave_piv = piv;
                    }
                }
            }

            if (limit == kInf) return phase_ == 1 ? Status::numerical_failure : Status::unbounded;
            if (limit < 0) limit = 0;
            ++iters_;

            if (leave_row < 0) {
                double step = dir * limit;
                for (int i = 0; i < m_; ++i)
                    if (w_[i] != 0.0) x_[basic_[i]] -= step * w_[i];
                x_[q] += step;
                stat_[q] = dir > 0 ? VarStatus::at_upper : VarStatus::at_lower;
            } else {
                pivot(q, dir, limit, leave_row, rcq);
            }

            track_progress();
            if ((iters_ % o_.refresh_every) == 0) recompute_duals();
        }
    }

    void pivot(int q, double dir, double limit, int r, double rcq) {
        double step = dir * limit;
        for (int i = 0; i < m_; ++i)
            if (w_[i] != 0.0) x_[basic_[i]] -= step * w_[i];

        int out = basic_[r];
        double wr = w_[r];
        double out_target = dir * wr > 0 ? clo_[out] : cup_[out];
        x_[out] = out_target;
        stat_[out] = out_target == clo_[out] ? VarStatus::at_lower : VarStatus::at_upper;

        x_[q] += step;
        stat_[q] = VarStatus::basic;
        basic_[r] = q;

        // rank-one update of the inverse; duals ride along using the old row r
        double gamma = rcq / wr;
        double inv_wr = 1.0 / wr;
        for (int c = 0; c < m_; ++c) {
            double* col = &binv_[idx(0, c)];
            double t = col[r];
            y_[c] += gamma * t;
            if (t == 0.0) continue;
            double f = t * inv_wr;
            for (int i = 0; i < m_; ++i) col[i] -= f * w_[i];
            col[r] = f;
        }
    }

    void track_progress() {
        double obj = phase_objective();
        if (obj < last_obj_ - 1e-10) {
            last_obj_ = obj;
            stall_ = 0;
            bland_ = false;
        } else if (++stall_ > o_.stall_threshold && !bland_) {
            bland_ = true;
            bland_was_used_ = true;
            stall_ = 0;
        }
    }

    bool refactorize() {
        ++refactors_;
        // row-major copies: M = basis matrix, N = identity -> inverse
        std::vector<double> M(static_cast<size_t>(m_) * m_, 0.0);
        std::vector<double> N(static_cast<size_t>(m_) * m_, 0.0);
        for (int c = 0; c < m_; ++c)
            for (auto [i, a] : cols_[basic_[c]]) M[static_cast<size_t>(i) * m_ + c] = a;
        for (int i = 0; i < m_; ++i) N[static_cast<size_t>(i) * m_ + i] = 1.0;

        for (int k = 0; k < m_; ++k) {
            int piv = -1;
            double best = 1e-12;
            for (int i = k; i < m_; ++i) {
                double v = std::fabs(M[static_cast<size_t>(i) * m_ + k]);
                if (v > best) {
                    best = v;
                    piv = i;
                }
            }
            if (piv < 0) return false;
            if (piv != k) {
                for (int c = 0; c < m_; ++c) {
                    std::swap(M[static_cast<size_t>(k) * m_ + c], M[static_cast<size_t>(piv) * m_ + c]);
                    std::swap(N[static_cast<size_t>(k) * m_ + c], N[static_cast<size_t>(piv) * m_ + c]);
                }
            }
            double inv = 1.0 / M[static_cast<size_t>(k) * m_ + k];
            double* mk = &M[static_cast<size_t>(k) * m_];
            double* nk = &N[static_cast<size_t>(k) * m_];
            for (int c = 0; c < m_; ++c) {
                mk[c] *= inv;
                nk[c] *= inv;
            }
            for (int i = 0; i < m_; ++i) {
                if (i == k) continue;
                double f = M[static_cast<size_t>(i) * m_ + k];
                if (f == 0.0) continue;
                double* mi = &M[static_cast<size_t>(i) * m_];
                double* ni = &N[static_cast<size_t>(i) * m_];
                for (int c = 0; c < m_; ++c) {
                    mi[c] -= f * mk[c];
                    ni[c] -= f * nk[c];
                }
            }
        }
        // N is B^{-1} row-major; binv_ wants column-major
        for (int c = 0; c < m_; ++c)
            for (int r = 0; r < m_; ++r) binv_[idx(r, c)] = N[static_cast<size_t>(r) * m_ + c];
        recompute_basics();
        recompute_duals();
        return true;
    }

    void recompute_basics() {
        std::vector<double> v = rhs_;
        for (int j = 0; j < ncols_; ++j) {
            if (stat_[j] == VarStatus::basic || x_[j] == 0.0) continue;
            for (auto [r, a] : cols_[j]) v[r] -= a * x_[j];
        }
        std::fill(work_.begin(), work_.end(), 0.0);
        for (int r = 0; r < m_; ++r) {
            if (v[r] == 0.0) continue;
            const double* col = &binv_[idx(0, r)];
            for (int i = 0; i < m_; ++i) work_[i] += v[r] * col[i];
        }
        for (int r = 0; r < m_; ++r) x_[basic_[r]] = work_[r];
    }

    // one step of iterative refinement on B' y = c_B
    void refine_duals() {
        for (int pass = 0; pass < 2; ++pass) {
            std::vector<double> rho(m_);
            double worst = 0.0;
            for (int r = 0; r < m_; ++r) {
                int b = basic_[r];
                double res = phase_cost(b);
                for (auto [i, a] : cols_[b]) res -= a * y_[i];
                rho[r] = res;
                worst = std::max(worst, std::fabs(res));
            }
            if (worst < 1e-14) break;
            for (int c = 0; c < m_; ++c) {
                double acc = 0.0;
                const double* col = &binv_[idx(0, c)];
                for (int r = 0; r < m_; ++r) acc += rho[r] * col[r];
                y_[c] += acc;
            }
        }
    }

    void refine_basics() {
        for (int pass = 0; pass < 3; ++pass) {
            std::vector<double> resid = rhs_;
            for (int j = 0; j < ncols_; ++j) {
                if (x_[j] == 0.0) continue;
                for (auto [r, a] : cols_[j]) resid[r] -= a * x_[j];
            }
            double worst = 0.0;
            for (double v : resid) worst = std::max(worst, std::fabs(v));
            if (worst < 1e-12 * std::max(1.0, rhs_scale_)) break;
            for (int r = 0; r < m_; ++r) {
                if (resid[r] == 0.0) continue;
                const double* col = &binv_[idx(0, r)];
                for (int i = 0; i < m_; ++i) x_[basic_[i]] += resid[r] * col[i];
            }
        }
    }

    double primal_residual() const {
        double worst = 0.0;
        for (int r = 0; r < m_; ++r) {
            const auto& row = p_.rows[r];
            double act = 0.0;
            for (auto [j, a] : row.coef) act += a * x_[j];
            if (row.lo > -kInf) worst = std::max(worst, row.lo - act);
            if (row.hi < kInf) worst = std::max(worst, act - row.hi);
        }
        return worst;
    }

    void finalize(Result& res) {
        recompute_duals();
        refine_duals();
        refine_basics();
        if (res.status == Status::optimal) {
            double scale = std::max(1.0, rhs_scale_);
            bool small = m_ <= 600;
            if ((small && iters_ > 0) || primal_residual() > 1e-9 * scale) {
                if (refactorize()) {
                    refine_duals();
                    refine_basics();
                }
            }
        }

        res.iterations = iters_;
        res.bland_engaged = bland_was_used_;
        res.refactor_count = refactors_;
        res.basis = basic_;
        res.x.assign(x_.begin(), x_.begin() + n_);
        res.y = y_;
        res.rc.assign(n_, 0.0);
        res.vstat.assign(stat_.begin(), stat_.begin() + n_);

        double obj = 0.0;
        for (int j = 0; j < n_; ++j) obj += p_.cost[j] * x_[j];
        res.objective = obj;

        res.max_primal_residual = primal_residual();
        for (int j = 0; j < n_; ++j) {
            if (clo_[j] > -kInf)
                res.max_primal_residual = std::max(res.max_primal_residual, clo_[j] - x_[j]);
            if (cup_[j] < kInf)
                res.max_primal_residual = std::max(res.max_primal_residual, x_[j] - cup_[j]);
        }

        double dres = 0.0, comp = 0.0;
        int zero_rc = 0, degen = 0;
        for (int j = 0; j < first_artificial_; ++j) {
            double rc = (j < n_ ? p_.cost[j] : 0.0);
            for (auto [r, a] : cols_[j]) rc -= a * y_[r];
            if (j < n_) res.rc[j] = rc;
            if (stat_[j] == VarStatus::basic) {
                dres = std::max(dres, std::fabs(rc));
                double blo = clo_[j] > -kInf ? x_[j] - clo_[j] : kInf;
                double bup = cup_[j] < kInf ? cup_[j] - x_[j] : kInf;
                if (std::min(blo, bup) < 1e-9) ++degen;
                continue;
            }
            if (clo_[j] == cup_[j]) continue;
            if (stat_[j] == VarStatus::at_lower) {
                if (rc < 0) dres = std::max(dres, -rc);
                if (std::fabs(rc) <= 1e-9) ++zero_rc;
            } else if (stat_[j] == VarStatus::at_upper) {
                if (rc > 0) dres = std::max(dres, rc);
                if (std::fabs(rc) <= 1e-9) ++zero_rc;
            } else {
                dres = std::max(dres, std::fabs(rc));
            }
        }
        res.max_dual_residual = dres;
        res.zero_rc_nonbasic = zero_rc;
        res.degenerate_basic = degen;

        for (int r = 0; r < m_; ++r) {
            const auto& row = p_.rows[r];
            double act = 0.0;
            for (auto [j, a] : row.coef) act += a * x_[j];
            double yr = y_[r];
            if (row.lo == row.hi) continue;
            if (yr > 1e-12 && row.lo > -kInf) comp = std::max(comp, std::fabs(yr * (act - row.lo)));
            if (yr < -1e-12 && row.hi < kInf) comp = std::max(comp, std::fabs(yr * (row.hi - act)));
        }
        for (int j = 0; j < n_; ++j) {
            double rc = res.rc[j];
            if (rc > 1e-12 && clo_[j] > -kInf) comp = std::max(comp, std::fabs(rc * (x_[j] - clo_[j])));
            if (rc < -1e-12 && cup_[j] < kInf) comp = std::max(comp, std::fabs(rc * (cup_[j] - x_[j])));
        }
        res.max_compl_residual = comp;

        double dobj = 0.0;
        for (int r = 0; r < m_; ++r) {
            double yr = y_[r];
            const auto& row = p_.rows[r];
            if (yr > 0 && row.lo > -kInf) dobj += yr * row.lo;
            else if (yr < 0 && row.hi < kInf) dobj += yr * row.hi;
        }
        for (int j = 0; j < n_; ++j) {
            double rc = res.rc[j];
            if (rc > 1e-12 && clo_[j] > -kInf) dobj += rc * clo_[j];
            else if (rc < -1e-12 && cup_[j] < kInf) dobj += rc * cup_[j];
        }
        res.dual_objective = dobj;
        res.duality_gap = std::fabs(obj - dobj);
    }
};

inline Result solve(const Problem& p, const Options& opts = {}) {
    Solver s(p, opts);
    return s.run();
}

}  // namespace stclear::simplex
