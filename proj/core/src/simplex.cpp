#include "bimart/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>

namespace bimart {

// Second rung of the presolve precision ladder: 50-digit GMP floats, used
// only inside this translation unit when a double-precision basis fails
// exact certification (degenerate ties that doubles cannot order).
using WideFloat = boost::multiprecision::mpf_float_50;
template <> struct scalar_traits<WideFloat> {
    static constexpr bool exact = false;
};
inline double to_double(const WideFloat& v) { return v.template convert_to<double>(); }

namespace {

// The rational-mode size guard: beyond this many nonzeros exact pivoting is
// no longer desk-scale, and the caller is told to switch modes.
constexpr std::size_t kRationalNonzeroLimit = 20000;

// Comparison slack per scalar: exact modes compare exactly.
template <class S> struct lp_tol;
template <> struct lp_tol<double> { static constexpr double eps = 1e-9; };
template <> struct lp_tol<WideFloat> { static constexpr double eps = 1e-35; };
template <> struct lp_tol<Rational> { static constexpr double eps = 0; };

template <class S> bool is_negative(const S& v) {
    if constexpr (scalar_traits<S>::exact) return v < 0;
    else return v < -lp_tol<S>::eps;
}
template <class S> bool is_positive(const S& v) {
    if constexpr (scalar_traits<S>::exact) return v > 0;
    else return v > lp_tol<S>::eps;
}

template <class S>
class Tableau {
public:
    Tableau(const LinearProgram<S>& lp, const SolveOptions& opts) : lp_(lp) {
        nvars_ = static_cast<int>(lp.objective.size());
        nrows_ = static_cast<int>(lp.rows.size());
        for (const auto& row : lp.rows)
            if (static_cast<int>(row.coeffs.size()) != nvars_)
                throw input_error("linear program row width differs from objective");

        // column layout: structural | slack/surplus | artificial
        int extra = 0;
        for (const auto& row : lp.rows)
            if (row.rel != Rel::eq) ++extra;
        int nart = 0;
        for (const auto& row : lp.rows)
            if (row.rel != Rel::le) ++nart;
        // rows with rhs < 0 get negated below, which can turn a <= into a >=
        // (and vice versa); allocate artificials pessimistically
        nart = nrows_;
        first_art_ = nvars_ + extra;
        ncols_ = first_art_ + nart;

        rows_.assign(nrows_, std::vector<S>(ncols_ + 1, S(0)));
        basis_.assign(nrows_, -1);
        active_.assign(nrows_, true);
        negated_.assign(nrows_, false);
        identity_col_.assign(nrows_, -1);
        col_row_.assign(ncols_, -1); // extra/artificial column -> its row

        int next_extra = nvars_;
        int next_art = first_art_;
        for (int i = 0; i < nrows_; ++i) {
            const auto& row = lp.rows[i];
            Rel rel = row.rel;
            S sign(1);
            if (is_negative(row.rhs)) {
                negated_[i] = true;
                sign = S(-1);
                if (rel == Rel::le) rel = Rel::ge;
                else if (rel == Rel::ge) rel = Rel::le;
            }
            for (int j = 0; j < nvars_; ++j) rows_[i][j] = sign * row.coeffs[j];
            rows_[i][ncols_] = sign * row.rhs;
            if (rel == Rel::le) {
                rows_[i][next_extra] = S(1); // slack enters the basis
                basis_[i] = next_extra;
                identity_col_[i] = next_extra;
                col_row_[next_extra] = i;
                ++next_extra;
            } else {
                if (rel == Rel::ge) {
                    rows_[i][next_extra] = S(-1); // surplus
                    col_row_[next_extra] = i;
                    ++next_extra;
                }
                rows_[i][next_art] = S(1);
                basis_[i] = next_art;
                identity_col_[i] = next_art;
                col_row_[next_art] = i;
                ++next_art;
            }
        }
        obj_.assign(ncols_ + 1, S(0));
        max_stall_ = opts.max_stall > 0 ? opts.max_stall : 2 * (nrows_ + ncols_) + 16;
        max_iter_ = opts.max_iterations;
    }

    // Final state accessors for the exact certification of a float solve.
    const std::vector<int>& basis() const { return basis_; }
    const std::vector<bool>& active() const { return active_; }
    int nvars() const { return nvars_; }
    int first_art() const { return first_art_; }
    int column_row(int col) const { return col_row_[col]; }

    LPOutcome<S> run() {
        LPOutcome<S> out;

        // ---- phase 1: minimize the sum of artificials ----
        // Artificial columns never (re-)enter the basis: a zero phase-1
        // optimum is achievable without them iff it is achievable at all.
        std::vector<S> phase1_cost(ncols_, S(0));
        for (int j = first_art_; j < ncols_; ++j) phase1_cost[j] = S(1);
        set_objective(phase1_cost);
        pivot_until_optimal(out);
        if (is_positive(current_objective())) {
            out.status = LPStatus::infeasible;
            return out;
        }
        expel_artificials();

        // ---- phase 2: the real objective ----
        std::vector<S> cost(ncols_, S(0));
        for (int j = 0; j < nvars_; ++j) cost[j] = lp_.objective[j];
        set_objective(cost);
        bool bounded = pivot_until_optimal(out);
        if (!bounded) {
            out.status = LPStatus::unbounded;
            return out;
        }

        out.status = LPStatus::optimal;
        out.solution.assign(nvars_, S(0));
        for (int i = 0; i < nrows_; ++i)
            if (active_[i] && basis_[i] < nvars_) out.solution[basis_[i]] = rows_[i][ncols_];
        out.objective = S(0);
        for (int j = 0; j < nvars_; ++j) out.objective += lp_.objective[j] * out.solution[j];

        // duals: y_i = -reduced_cost(initial identity column of row i),
        // sign-flipped where the row itself was negated
        out.duals.assign(nrows_, S(0));
        for (int i = 0; i < nrows_; ++i) {
            if (!active_[i]) continue; // redundant row: multiplier 0
            S y = S(0) - obj_[identity_col_[i]];
            out.duals[i] = negated_[i] ? S(0) - y : y;
        }
        return out;
    }

private:
    void set_objective(const std::vector<S>& cost) {
        for (int j = 0; j <= ncols_; ++j) obj_[j] = j < ncols_ ? cost[j] : S(0);
        for (int i = 0; i < nrows_; ++i) {
            if (!active_[i] || cost[basis_[i]] == S(0)) continue;
            const S f = cost[basis_[i]];
            for (int j = 0; j <= ncols_; ++j) obj_[j] -= f * rows_[i][j];
        }
    }

    S current_objective() const { return S(0) - obj_[ncols_]; }

    void pivot(int leave_row, int enter_col) {
        auto& prow = rows_[leave_row];
        const S inv = S(1) / prow[enter_col];
        for (int j = 0; j <= ncols_; ++j) prow[j] *= inv;
        for (int i = 0; i < nrows_; ++i) {
            if (i == leave_row || !active_[i]) continue;
            const S f = rows_[i][enter_col];
            if (f == S(0)) continue;
            for (int j = 0; j <= ncols_; ++j) rows_[i][j] -= f * prow[j];
        }
        const S f = obj_[enter_col];
        if (f != S(0))
            for (int j = 0; j <= ncols_; ++j) obj_[j] -= f * prow[j];
        basis_[leave_row] = enter_col;
    }

    // Dantzig pricing (default in both modes): most negative reduced cost.
    int pick_entering_dantzig() const {
        int best = -1;
        S best_val(0);
        for (int j = 0; j < first_art_; ++j) {
            if (!is_negative(obj_[j])) continue;
            if (best < 0 || obj_[j] < best_val) { best = j; best_val = obj_[j]; }
        }
        return best;
    }

    // Bland pricing (anti-cycling fallback): lowest-index negative reduced cost.
    int pick_entering_bland() const {
        for (int j = 0; j < first_art_; ++j)
            if (is_negative(obj_[j])) return j;
        return -1;
    }

    // Ratio test.  Exact mode — Bland: ties broken by smallest basis index;
    // Dantzig: lexicographic comparison of the scaled candidate rows.  Float
    // mode — among near-tied ratios the largest pivot element wins: pivoting
    // on a ~1e-9 entry multiplies the tableau by ~1e9 and destroys it, which
    // is how degenerate programs used to livelock this code.
    int pick_leaving(int enter_col, bool bland) const {
        if constexpr (!scalar_traits<S>::exact) {
            (void)bland;
            S best_ratio(0);
            int best = -1;
            for (int i = 0; i < nrows_; ++i) {
                if (!active_[i] || !is_positive(rows_[i][enter_col])) continue;
                const S r = rows_[i][ncols_] / rows_[i][enter_col];
                if (best < 0 || r < best_ratio) { best = i; best_ratio = r; }
            }
            if (best < 0) return -1;
            S best_piv(0);
            int pick = -1;
            for (int i = 0; i < nrows_; ++i) {
                if (!active_[i] || !is_positive(rows_[i][enter_col])) continue;
                const S r = rows_[i][ncols_] / rows_[i][enter_col];
                if (!(r == best_ratio)) continue;
                if (rows_[i][enter_col] > best_piv) { pick = i; best_piv = rows_[i][enter_col]; }
            }
            return pick;
        } else {
            int best = -1;
            for (int i = 0; i < nrows_; ++i) {
                if (!active_[i] || !is_positive(rows_[i][enter_col])) continue;
                if (best < 0) { best = i; continue; }
                const S lhs = rows_[i][ncols_] * rows_[best][enter_col];
                const S rhs = rows_[best][ncols_] * rows_[i][enter_col];
                if (lhs < rhs) { best = i; continue; }
                if (!(lhs == rhs)) continue;
                if (bland) {
                    if (basis_[i] < basis_[best]) best = i;
                } else if (lex_smaller(i, best, enter_col)) {
                    best = i;
                }
            }
            return best;
        }
    }

    bool lex_smaller(int a, int b, int enter_col) const {
        for (int j = 0; j <= ncols_; ++j) {
            const S lhs = rows_[a][j] * rows_[b][enter_col];
            const S rhs = rows_[b][j] * rows_[a][enter_col];
            if (lhs < rhs) return true;
            if (rhs < lhs) return false;
        }
        return false;
    }

    // Returns false when the phase detected an unbounded direction.
    bool pivot_until_optimal(LPOutcome<S>& out) {
        bool bland = false;
        int stall = 0;
        S last_obj = current_objective();
        for (int iter = 0; iter < max_iter_; ++iter) {
            const int enter = bland ? pick_entering_bland() : pick_entering_dantzig();
            if (enter < 0) return true; // optimal for this phase
            const int leave = pick_leaving(enter, bland);
            if (leave < 0) return false;
            pivot(leave, enter);
            ++out.iterations;
            if (!bland) {
                const S now = current_objective();
                bool improved;
                if constexpr (scalar_traits<S>::exact) improved = now < last_obj;
                else improved = to_double(now) < to_double(last_obj) - 1e-12;
                if (improved) { stall = 0; last_obj = now; }
                else if (++stall > max_stall_) { // cycling safeguard
                    bland = true;
                    out.anti_cycling_engaged = true;
                }
            }
        }
        throw std::runtime_error("simplex iteration limit exceeded");
    }

    // After phase 1 at objective 0, swap basic artificials for structural or
    // slack columns; rows that offer no pivot are redundant and deactivated.
    void expel_artificials() {
        for (int i = 0; i < nrows_; ++i) {
            if (!active_[i] || basis_[i] < first_art_) continue;
            int col = -1;
            if constexpr (scalar_traits<S>::exact) {
                for (int j = 0; j < first_art_; ++j)
                    if (rows_[i][j] != S(0)) { col = j; break; }
            } else {
                S best(lp_tol<S>::eps);
                for (int j = 0; j < first_art_; ++j) {
                    const S mag = abs_value(rows_[i][j]);
                    if (mag > best) {
                        best = mag;
                        col = j;
                    }
                }
            }
            if (col < 0) active_[i] = false;
            else pivot(i, col);
        }
    }

    const LinearProgram<S>& lp_;
    int nvars_ = 0, nrows_ = 0, ncols_ = 0, first_art_ = 0, max_stall_ = 0, max_iter_ = 0;
    std::vector<std::vector<S>> rows_;
    std::vector<S> obj_;
    std::vector<int> basis_, identity_col_, col_row_;
    std::vector<bool> active_, negated_;
};

// ---------------------------------------------------------------------------
// Exact certification of a float-suggested basis (rational mode fast path).
// ---------------------------------------------------------------------------

// Gauss-Jordan over exact scalars.  Rows are (coeffs, rhs); unknowns are
// pivoted in `pref` order, rescanning until no further pivot is possible, so
// at the fixed point every unpivoted row has all-zero coefficients.  Unknowns
// that never pivot are fixed to zero.  Returns nothing when inconsistent.
template <class S>
std::optional<std::vector<S>> exact_solve(std::vector<std::vector<S>> m,
                                          std::vector<S> rhs,
                                          int nunknowns,
                                          const std::vector<int>& pref) {
    const int neq = static_cast<int>(m.size());
    std::vector<int> pivot_row(nunknowns, -1);
    std::vector<bool> row_used(neq, false);
    bool progress = true;
    while (progress) {
        progress = false;
        for (int u : pref) {
            if (pivot_row[u] >= 0) continue;
            int e = -1;
            for (int i = 0; i < neq; ++i)
                if (!row_used[i] && m[i][u] != S(0)) { e = i; break; }
            if (e < 0) continue;
            const S inv = S(1) / m[e][u];
            for (auto& v : m[e]) v *= inv;
            rhs[e] *= inv;
            for (int i = 0; i < neq; ++i) {
                if (i == e) continue;
                const S f = m[i][u];
                if (f == S(0)) continue;
                for (int j = 0; j < nunknowns; ++j) m[i][j] -= f * m[e][j];
                rhs[i] -= f * rhs[e];
            }
            pivot_row[u] = e;
            row_used[e] = true;
            progress = true;
        }
    }
    for (int i = 0; i < neq; ++i)
        if (!row_used[i] && rhs[i] != S(0)) return std::nullopt;
    std::vector<S> x(nunknowns, S(0));
    for (int u = 0; u < nunknowns; ++u)
        if (pivot_row[u] >= 0) x[u] = rhs[pivot_row[u]];
    return x;
}

// What the float run suggests, translated out of tableau column space.
struct BasisHint {
    std::vector<int> structural;   // basic structural columns
    std::vector<bool> slack_basic; // per row: its slack/surplus column is basic
    std::vector<bool> art_basic;   // per row: its artificial column is basic
    std::vector<bool> active;      // float's row-redundancy decisions (hint only)
};

template <class D>
BasisHint extract_hint(const Tableau<D>& t, int nrows) {
    BasisHint h;
    h.slack_basic.assign(nrows, false);
    h.art_basic.assign(nrows, false);
    h.active = t.active();
    for (int i = 0; i < nrows; ++i) {
        const int c = t.basis()[i];
        if (c < t.nvars()) h.structural.push_back(c);
        else if (c < t.first_art()) h.slack_basic[t.column_row(c)] = true;
        else h.art_basic[t.column_row(c)] = true;
    }
    return h;
}

// Certify optimality: solve the tight-row system for the suggested basic
// columns and the pinned dual system exactly, then verify primal feasibility,
// dual feasibility, and the sign conditions over the rationals.  Objective
// equality c.x = y.b holds by construction, so success is a weak-duality
// certificate.  Any failed check returns nothing (caller falls back).
template <class S>
std::optional<LPOutcome<S>> certify_optimal(const LinearProgram<S>& lp, const BasisHint& h) {
    const int m = static_cast<int>(lp.rows.size());
    const int n = static_cast<int>(lp.objective.size());
    for (int i = 0; i < m; ++i)
        if (h.art_basic[i] && h.active[i]) return std::nullopt;

    // tight rows: equalities plus inequality rows whose slack is nonbasic
    std::vector<int> tight;
    for (int i = 0; i < m; ++i)
        if (lp.rows[i].rel == Rel::eq || !h.slack_basic[i]) tight.push_back(i);

    // primal: unknowns = basic structural columns, equations = tight rows
    const int p = static_cast<int>(h.structural.size());
    {
        std::vector<std::vector<S>> sys;
        std::vector<S> rhs;
        for (int i : tight) {
            std::vector<S> eq(p);
            for (int k = 0; k < p; ++k) eq[k] = lp.rows[i].coeffs[h.structural[k]];
            sys.push_back(std::move(eq));
            rhs.push_back(lp.rows[i].rhs);
        }
        std::vector<int> pref(p);
        for (int k = 0; k < p; ++k) pref[k] = k;
        auto xh = exact_solve<S>(std::move(sys), std::move(rhs), p, pref);
        if (!xh) return std::nullopt;

        std::vector<S> x(n, S(0));
        for (int k = 0; k < p; ++k) {
            if ((*xh)[k] < S(0)) return std::nullopt;
            x[h.structural[k]] = (*xh)[k];
        }
        for (int i = 0; i < m; ++i) {
            S lhs(0);
            for (int k = 0; k < p; ++k)
                lhs += lp.rows[i].coeffs[h.structural[k]] * x[h.structural[k]];
            const S& b = lp.rows[i].rhs;
            const Rel rel = lp.rows[i].rel;
            if (rel == Rel::eq && !(lhs == b)) return std::nullopt;
            if (rel == Rel::le && lhs > b) return std::nullopt;
            if (rel == Rel::ge && lhs < b) return std::nullopt;
        }

        // dual: unknowns = multipliers of tight rows (others are zero),
        // equations = zero reduced cost on each basic structural column;
        // float-active rows are pivoted first so float-redundant rows stay 0
        const int q = static_cast<int>(tight.size());
        std::vector<std::vector<S>> dsys;
        std::vector<S> drhs;
        for (int k = 0; k < p; ++k) {
            std::vector<S> eq(q);
            for (int t = 0; t < q; ++t) eq[t] = lp.rows[tight[t]].coeffs[h.structural[k]];
            dsys.push_back(std::move(eq));
            drhs.push_back(lp.objective[h.structural[k]]);
        }
        std::vector<int> dpref;
        for (int t = 0; t < q; ++t)
            if (h.active[tight[t]]) dpref.push_back(t);
        for (int t = 0; t < q; ++t)
            if (!h.active[tight[t]]) dpref.push_back(t);
        auto yt = exact_solve<S>(std::move(dsys), std::move(drhs), q, dpref);
        if (!yt) return std::nullopt;

        std::vector<S> y(m, S(0));
        for (int t = 0; t < q; ++t) y[tight[t]] = (*yt)[t];
        for (int i = 0; i < m; ++i) {
            if (lp.rows[i].rel == Rel::le && y[i] > S(0)) return std::nullopt;
            if (lp.rows[i].rel == Rel::ge && y[i] < S(0)) return std::nullopt;
        }
        std::vector<S> rc = lp.objective;
        for (int i = 0; i < m; ++i) {
            if (y[i] == S(0)) continue;
            for (int j = 0; j < n; ++j) rc[j] -= y[i] * lp.rows[i].coeffs[j];
        }
        for (int j = 0; j < n; ++j)
            if (rc[j] < S(0)) return std::nullopt;

        LPOutcome<S> out;
        out.status = LPStatus::optimal;
        out.solution = std::move(x);
        out.objective = S(0);
        for (int j = 0; j < n; ++j) out.objective += lp.objective[j] * out.solution[j];
        out.duals = std::move(y);
        out.certified_basis = true;
        return out;
    }
}

// Certify infeasibility with an exact Farkas vector built from the float
// phase-1 basis: y with y.a_j <= 0 on every structural column, y_i <= 0 on
// <= rows, y_i >= 0 on >= rows, and y.b > 0 aggregates the constraints into
// an exact contradiction.  In tableau terms, basic structural/slack columns
// pin a zero multiplier equation and each basic artificial pins its row's
// multiplier to +-1 (the sign undoing the tableau's rhs normalization).
template <class S>
std::optional<LPOutcome<S>> certify_infeasible(const LinearProgram<S>& lp, const BasisHint& h) {
    const int m = static_cast<int>(lp.rows.size());
    const int n = static_cast<int>(lp.objective.size());

    std::vector<std::vector<S>> sys;
    std::vector<S> rhs;
    for (int c : h.structural) {
        std::vector<S> eq(m);
        for (int i = 0; i < m; ++i) eq[i] = lp.rows[i].coeffs[c];
        sys.push_back(std::move(eq));
        rhs.push_back(S(0));
    }
    for (int i = 0; i < m; ++i) {
        if (!h.slack_basic[i] && !h.art_basic[i]) continue;
        std::vector<S> eq(m, S(0));
        eq[i] = S(1);
        sys.push_back(std::move(eq));
        if (h.slack_basic[i]) rhs.push_back(S(0));
        else rhs.push_back(lp.rows[i].rhs < S(0) ? S(-1) : S(1));
    }
    std::vector<int> pref(m);
    for (int i = 0; i < m; ++i) pref[i] = i;
    auto yo = exact_solve<S>(std::move(sys), std::move(rhs), m, pref);
    if (!yo) return std::nullopt;
    const std::vector<S>& y = *yo;

    S yb(0);
    for (int i = 0; i < m; ++i) {
        if (lp.rows[i].rel == Rel::le && y[i] > S(0)) return std::nullopt;
        if (lp.rows[i].rel == Rel::ge && y[i] < S(0)) return std::nullopt;
        yb += y[i] * lp.rows[i].rhs;
    }
    if (!(yb > S(0))) return std::nullopt;
    for (int j = 0; j < n; ++j) {
        S a(0);
        for (int i = 0; i < m; ++i) a += y[i] * lp.rows[i].coeffs[j];
        if (a > S(0)) return std::nullopt;
    }

    LPOutcome<S> out;
    out.status = LPStatus::infeasible;
    out.certified_basis = true;
    return out;
}

template <class F, class S>
LinearProgram<F> lower_lp(const LinearProgram<S>& lp) {
    const auto conv = [](const S& v) { return v.template convert_to<F>(); };
    LinearProgram<F> out;
    out.objective.reserve(lp.objective.size());
    for (const auto& c : lp.objective) out.objective.push_back(conv(c));
    out.rows.reserve(lp.rows.size());
    for (const auto& row : lp.rows) {
        LPRow<F> r;
        r.rel = row.rel;
        r.rhs = conv(row.rhs);
        r.coeffs.reserve(row.coeffs.size());
        for (const auto& c : row.coeffs) r.coeffs.push_back(conv(c));
        out.rows.push_back(std::move(r));
    }
    return out;
}

// One rung of the presolve ladder: solve at floating precision F, then try
// to certify the outcome exactly.  Returns nothing when the rung produced no
// certificate (numeric failure, pivot-budget abort, or failed verification).
template <class F, class S>
std::optional<LPOutcome<S>> presolve_tier(const LinearProgram<S>& lp, const SolveOptions& opts) {
    try {
        const LinearProgram<F> flp = lower_lp<F>(lp);
        SolveOptions fopts = opts;
        fopts.max_iterations = std::min(opts.max_iterations, 20000);
        Tableau<F> ft(flp, fopts);
        const LPOutcome<F> fout = ft.run();
        std::optional<LPOutcome<S>> cert;
        if (fout.status == LPStatus::optimal)
            cert = certify_optimal(lp, extract_hint(ft, static_cast<int>(lp.rows.size())));
        else if (fout.status == LPStatus::infeasible)
            cert = certify_infeasible(lp, extract_hint(ft, static_cast<int>(lp.rows.size())));
        if (cert) {
            cert->iterations = fout.iterations;
            cert->anti_cycling_engaged = fout.anti_cycling_engaged;
        }
        return cert;
    } catch (const std::exception&) {
        return std::nullopt;
    }
}

} // namespace

template <class S>
LPOutcome<S> solve_lp(const LinearProgram<S>& lp, const SolveOptions& opts) {
    if constexpr (scalar_traits<S>::exact) {
        if (lp_nonzeros(lp) > kRationalNonzeroLimit)
            throw input_error("linear program too large for rational mode (> 20000 nonzeros); "
                              "switch to float mode");
        if (opts.float_presolve) {
            // Precision ladder: doubles first, then 50-digit floats for the
            // degenerate ties doubles cannot order.  Every rung's basis is
            // certified exactly or discarded, so no verdict rests on floats;
            // the ladder only decides how fast the exact answer arrives.
            if (auto cert = presolve_tier<double>(lp, opts)) return *cert;
            if (auto cert = presolve_tier<WideFloat>(lp, opts)) return *cert;
        }
    }
    return Tableau<S>(lp, opts).run();
}

template <class S>
std::size_t lp_nonzeros(const LinearProgram<S>& lp) {
    std::size_t count = 0;
    for (const auto& row : lp.rows)
        for (const auto& c : row.coeffs)
            if (c != S(0)) ++count;
    return count;
}

template <class S>
std::string dump_lp(const LinearProgram<S>& lp) {
    std::ostringstream os;
    auto term = [&os](bool& first, const S& c, int j) {
        if (c == S(0)) return;
        os << (first ? "  " : " + ") << c << " x" << j;
        first = false;
    };
    os << "minimize\n";
    bool first = true;
    for (size_t j = 0; j < lp.objective.size(); ++j)
        term(first, lp.objective[j], static_cast<int>(j));
    if (first) os << "  0";
    os << "\nsubject to\n";
    for (size_t i = 0; i < lp.rows.size(); ++i) {
        os << "  r" << i << ":";
        bool f2 = true;
        for (size_t j = 0; j < lp.rows[i].coeffs.size(); ++j)
            term(f2, lp.rows[i].coeffs[j], static_cast<int>(j));
        if (f2) os << " 0";
        const char* rel = lp.rows[i].rel == Rel::le ? "<=" : lp.rows[i].rel == Rel::ge ? ">=" : "=";
        os << " " << rel << " " << lp.rows[i].rhs << "\n";
    }
    os << "bounds\n  x >= 0\n";
    return os.str();
}

template LPOutcome<double> solve_lp(const LinearProgram<double>&, const SolveOptions&);
template LPOutcome<Rational> solve_lp(const LinearProgram<Rational>&, const SolveOptions&);
template std::size_t lp_nonzeros(const LinearProgram<double>&);
template std::size_t lp_nonzeros(const LinearProgram<Rational>&);
template std::string dump_lp(const LinearProgram<double>&);
template std::string dump_lp(const LinearProgram<Rational>&);

} // namespace bimart
