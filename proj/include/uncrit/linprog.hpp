#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include "uncrit/common.hpp"

namespace uncrit {

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpSolution {
    LpStatus status = LpStatus::Infeasible;
    double objective = 0.0;
    std::vector<double> x;
};

namespace detail {

/// Dense two-phase primal simplex with Bland's rule.
/// maximize c.x  s.t.  A x (<=|=) b,  x >= 0.
/// Small problems only (tens of rows/columns); no sparsity, no presolve.
class SimplexTableau {
public:
    static constexpr double kPivotEps = 1e-11;
    static constexpr double kCostEps = 1e-9;

    SimplexTableau(std::vector<std::vector<double>> rows, std::vector<double> rhs,
                   std::vector<bool> is_eq, std::vector<double> objective)
        : n_struct_(objective.size()), m_(rows.size()) {
        // Normalize every row to rhs >= 0, add slacks for inequalities,
        // artificials where a slack cannot serve as the initial basis.
        n_total_ = n_struct_;
        std::vector<int> slack_col(m_, -1);
        for (std::size_t r = 0; r < m_; ++r) {
            if (rhs[r] < 0.0) {
                for (auto& v : rows[r]) v = -v;
                rhs[r] = -rhs[r];
                if (!is_eq[r]) slack_col[r] = -2; // surplus (coefficient -1)
            } else if (!is_eq[r]) {
                slack_col[r] = 0; // plain slack
            }
        }
        int n_slack = 0;
        for (std::size_t r = 0; r < m_; ++r)
            if (slack_col[r] != -1) ++n_slack;
        int n_art = 0;
        for (std::size_t r = 0; r < m_; ++r)
            if (slack_col[r] != 0) ++n_art;
        n_total_ = n_struct_ + n_slack + n_art;

        tab_.assign(m_ + 1, std::vector<double>(n_total_ + 1, 0.0));
        basis_.assign(m_, -1);
        art_start_ = n_struct_ + n_slack;

        int sc = static_cast<int>(n_struct_);
        int ac = art_start_;
        for (std::size_t r = 0; r < m_; ++r) {
            for (std::size_t j = 0; j < n_struct_; ++j) tab_[r][j] = rows[r][j];
            tab_[r][n_total_] = rhs[r];
            if (slack_col[r] == 0) {
                tab_[r][sc] = 1.0;
                basis_[r] = sc++;
            } else if (slack_col[r] == -2) {
                tab_[r][sc++] = -1.0;
                tab_[r][ac] = 1.0;
                basis_[r] = ac++;
            } else {
                tab_[r][ac] = 1.0;
                basis_[r] = ac++;
            }
        }
        objective_ = std::move(objective);
    }

    LpSolution solve() {
        LpSolution sol;
        // Phase 1: minimize sum of artificials (maximize the negated sum).
        if (art_start_ < static_cast<int>(n_total_)) {
            auto& obj = tab_[m_];
            std::fill(obj.begin(), obj.end(), 0.0);
            for (int j = art_start_; j < static_cast<int>(n_total_); ++j) obj[j] = -1.0;
            price_out_basis();
            if (!iterate(n_total_)) { sol.status = LpStatus::Unbounded; return sol; }
            // objective-row RHS carries the negated objective value, so the
            // artificial sum at optimum is +RHS
            if (tab_[m_][n_total_] > 10.0 * kCostEps) {
                sol.status = LpStatus::Infeasible;
                return sol;
            }
            expel_artificials();
        }
        // Phase 2.
        {
            auto& obj = tab_[m_];
            std::fill(obj.begin(), obj.end(), 0.0);
            for (std::size_t j = 0; j < n_struct_; ++j) obj[j] = objective_[j];
            price_out_basis();
            if (!iterate(art_start_)) { sol.status = LpStatus::Unbounded; return sol; }
        }
        sol.status = LpStatus::Optimal;
        sol.x.assign(n_struct_, 0.0);
        for (std::size_t r = 0; r < m_; ++r)
            if (basis_[r] >= 0 && basis_[r] < static_cast<int>(n_struct_))
                sol.x[basis_[r]] = tab_[r][n_total_];
        sol.objective = -tab_[m_][n_total_];
        return sol;
    }

private:
    void price_out_basis() {
        auto& obj = tab_[m_];
        obj[n_total_] = 0.0;
        for (std::size_t r = 0; r < m_; ++r) {
            const double cb = obj[basis_[r]];
            if (cb == 0.0) continue;
            for (std::size_t j = 0; j <= n_total_; ++j) obj[j] -= cb * tab_[r][j];
        }
    }

    // Bland's rule: lowest eligible column, lowest-index row on ratio ties.
    // Columns whose reduced cost is barely positive but admit no pivot are
    // numerical noise on degenerate instances and get blocked instead of
    // triggering an unboundedness verdict.
    bool iterate(std::size_t col_limit) {
        static constexpr double kNoiseCost = 1e-6;
        std::vector<bool> blocked(col_limit, false);
        for (int guard = 0; guard < 20000; ++guard) {
            int pc = -1;
            for (std::size_t j = 0; j < col_limit; ++j) {
                if (!blocked[j] && tab_[m_][j] > kCostEps) { pc = static_cast<int>(j); break; }
            }
            if (pc < 0) return true;
            int pr = -1;
            double best = std::numeric_limits<double>::infinity();
            for (std::size_t r = 0; r < m_; ++r) {
                const double a = tab_[r][pc];
                if (a > 1e-9) {
                    const double ratio = tab_[r][n_total_] / a;
                    if (ratio < best - 1e-15 ||
                        (ratio < best + 1e-15 && (pr < 0 || basis_[r] < basis_[pr]))) {
                        best = ratio;
                        pr = static_cast<int>(r);
                    }
                }
            }
            if (pr < 0) {
                if (tab_[m_][pc] > kNoiseCost) return false; // genuinely unbounded
                blocked[pc] = true;
                continue;
            }
            pivot(pr, pc);
            std::fill(blocked.begin(), blocked.end(), false);
        }
        throw numeric_error("simplex: iteration limit hit (cycling?)");
    }

    void pivot(int pr, int pc) {
        auto& prow = tab_[pr];
        const double p = prow[pc];
        for (auto& v : prow) v /= p;
        prow[pc] = 1.0;
        for (std::size_t r = 0; r <= m_; ++r) {
            if (static_cast<int>(r) == pr) continue;
            const double f = tab_[r][pc];
            if (f == 0.0) continue;
            for (std::size_t j = 0; j <= n_total_; ++j) tab_[r][j] -= f * prow[j];
            tab_[r][pc] = 0.0;
        }
        basis_[pr] = pc;
    }

    // After phase 1, try to pivot remaining (zero-level) artificials out of
    // the basis; rows with no eligible pivot are redundant and left alone.
    void expel_artificials() {
        for (std::size_t r = 0; r < m_; ++r) {
            if (basis_[r] < art_start_) continue;
            int pc = -1;
            for (int j = 0; j < art_start_; ++j) {
                if (std::abs(tab_[r][j]) > 1e-8) { pc = j; break; }
            }
            if (pc >= 0) pivot(static_cast<int>(r), pc);
        }
        // Forbid artificials from ever re-entering.
        for (std::size_t r = 0; r <= m_; ++r)
            for (int j = art_start_; j < static_cast<int>(n_total_); ++j) tab_[r][j] = 0.0;
    }

    std::size_t n_struct_;
    std::size_t m_;
    std::size_t n_total_ = 0;
    int art_start_ = 0;
    std::vector<std::vector<double>> tab_;
    std::vector<int> basis_;
    std::vector<double> objective_;
};

} // namespace detail

/// maximize c.x  s.t.  A x <= b (rows with is_eq true hold with equality),
/// x unrestricted in sign. Variables are split internally.
inline LpSolution solve_lp(const std::vector<std::vector<double>>& A, const std::vector<double>& b,
                           const std::vector<bool>& is_eq, const std::vector<double>& c) {
    const std::size_t n = c.size();
    std::vector<std::vector<double>> rows(A.size(), std::vector<double>(2 * n, 0.0));
    for (std::size_t r = 0; r < A.size(); ++r)
        for (std::size_t j = 0; j < n; ++j) {
            rows[r][j] = A[r][j];
            rows[r][n + j] = -A[r][j];
        }
    std::vector<double> obj(2 * n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        obj[j] = c[j];
        obj[n + j] = -c[j];
    }
    detail::SimplexTableau tab(std::move(rows), b, is_eq, std::move(obj));
    LpSolution split = tab.solve();
    if (split.status == LpStatus::Optimal) {
        std::vector<double> x(n);
        for (std::size_t j = 0; j < n; ++j) x[j] = split.x[j] - split.x[n + j];
        split.x = std::move(x);
    }
    return split;
}

/// Maximum-slack feasibility problem over parameter space R^m:
///   maximize t
///   s.t. sign_i * (c0_i + <c_i, a>) >= t * |c_i|   for every inequality,
///        e0_j + <e_j, a> = 0                       for every equality,
///        t <= cap.
/// The slack t is a geometric margin (rows are normalized by |c_i|) and may
/// come out negative: the weak system is feasible iff slack >= 0, the open
/// system iff slack > 0. feasible == false means no point satisfies the
/// equalities at any slack level.
class SlackLp {
public:
    explicit SlackLp(int dim, double cap = 1.0) : dim_(dim), cap_(cap) {}

    void add_inequality(double c0, std::span<const double> c, int sign) {
        double nrm = 0.0;
        for (double v : c) nrm += v * v;
        nrm = std::sqrt(nrm);
        if (nrm < 1e-300) {
            // Constant constraint: sign * c0 >= 0 or the system is empty.
            if (sign * c0 < 0.0) trivially_infeasible_ = true;
            return;
        }
        Row r;
        r.coeff.assign(c.begin(), c.end());
        for (auto& v : r.coeff) v = sign * v / nrm;
        r.c0 = sign * c0 / nrm;
        ineq_.push_back(std::move(r));
    }

    void add_equality(double e0, std::span<const double> e) {
        double nrm = 0.0;
        for (double v : e) nrm += v * v;
        nrm = std::sqrt(nrm);
        if (nrm < 1e-300) {
            if (std::abs(e0) > 1e-12) trivially_infeasible_ = true;
            return;
        }
        Row r;
        r.coeff.assign(e.begin(), e.end());
        for (auto& v : r.coeff) v /= nrm;
        r.c0 = e0 / nrm;
        eq_.push_back(std::move(r));
    }

    struct Result {
        bool feasible = false;
        double slack = -std::numeric_limits<double>::infinity();
        std::vector<double> point;
    };

    Result solve() const {
        Result res;
        if (trivially_infeasible_) return res;
        // Variables: (a_1..a_m, t). Rows in <= form.
        std::vector<std::vector<double>> A;
        std::vector<double> b;
        std::vector<bool> eqf;
        for (const Row& r : ineq_) { // -<c,a>/n + t <= c0/n
            std::vector<double> row(dim_ + 1, 0.0);
            for (int j = 0; j < dim_; ++j) row[j] = -r.coeff[j];
            row[dim_] = 1.0;
            A.push_back(std::move(row));
            b.push_back(r.c0);
            eqf.push_back(false);
        }
        for (const Row& r : eq_) {
            std::vector<double> row(dim_ + 1, 0.0);
            for (int j = 0; j < dim_; ++j) row[j] = r.coeff[j];
            A.push_back(std::move(row));
            b.push_back(-r.c0);
            eqf.push_back(true);
        }
        {
            std::vector<double> row(dim_ + 1, 0.0);
            row[dim_] = 1.0;
            A.push_back(std::move(row));
            b.push_back(cap_);
            eqf.push_back(false);
        }
        std::vector<double> obj(dim_ + 1, 0.0);
        obj[dim_] = 1.0;
        LpSolution sol = solve_lp(A, b, eqf, obj);
        if (sol.status == LpStatus::Unbounded)
            throw numeric_error("max-slack LP reported unbounded despite slack cap");
        if (sol.status != LpStatus::Optimal) return res;
        res.feasible = true;
        res.slack = sol.objective;
        res.point.assign(sol.x.begin(), sol.x.begin() + dim_);
        return res;
    }

private:
    struct Row {
        double c0 = 0.0;
        std::vector<double> coeff;
    };
    int dim_;
    double cap_;
    bool trivially_infeasible_ = false;
    std::vector<Row> ineq_;
    std::vector<Row> eq_;
};

} // namespace uncrit
