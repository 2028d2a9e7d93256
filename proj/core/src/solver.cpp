#include "bimart/solver.hpp"

#include "bimart/simplex.hpp"

#include <algorithm>
#include <map>
#include <sstream>
#include <stdexcept>
#include <tuple>

namespace bimart {

namespace {

template <class S>
std::string point_str(const Point<S>& p) {
    std::ostringstream os;
    os << "(";
    for (int i = 0; i < p.dim(); ++i) {
        if (i) os << ", ";
        os << to_double(p[i]);
    }
    os << ")";
    return os.str();
}

template <class S>
bool points_close(const Point<S>& a, const Point<S>& b, const Tolerances& tol) {
    if constexpr (scalar_traits<S>::exact)
        return a == b;
    else
        return to_double(max_abs(a - b)) <= tol.dedup;
}

} // namespace

// ---------------------------------------------------------------------------
// ThreePlan
// ---------------------------------------------------------------------------

template <class S>
ThreePlan<S>::ThreePlan(int dim, std::vector<PlanAtom<S>> atoms, const Tolerances& tol)
    : dim_(dim) {
    if (dim < 1) throw input_error("plan dimension must be at least 1");
    for (const auto& a : atoms) {
        if (a.x.dim() != dim || a.y.dim() != dim || a.z.dim() != dim)
            throw input_error("plan atom dimension mismatch");
        if (a.w < S(0)) {
            if (scalar_traits<S>::exact || to_double(a.w) < -tol.float_zero)
                throw input_error("plan weights must be nonnegative");
        }
    }
    std::sort(atoms.begin(), atoms.end(), [](const PlanAtom<S>& a, const PlanAtom<S>& b) {
        return std::tie(a.x, a.y, a.z) < std::tie(b.x, b.y, b.z);
    });
    for (auto& a : atoms) {
        if (scalar_traits<S>::is_zero(a.w, tol) || a.w < S(0)) continue;
        if (!atoms_.empty()) {
            auto& last = atoms_.back();
            if (points_close(last.x, a.x, tol) && points_close(last.y, a.y, tol) &&
                points_close(last.z, a.z, tol)) {
                last.w += a.w;
                continue;
            }
        }
        atoms_.push_back(a);
    }
}

template <class S>
DiscreteMeasure<S> ThreePlan<S>::marginal1() const {
    std::vector<WeightedAtom<S>> ws;
    ws.reserve(atoms_.size());
    for (const auto& a : atoms_) ws.push_back({a.x, a.w});
    return DiscreteMeasure<S>(dim_, std::move(ws));
}

template <class S>
DiscreteMeasure<S> ThreePlan<S>::marginal2() const {
    std::vector<WeightedAtom<S>> ws;
    ws.reserve(atoms_.size());
    for (const auto& a : atoms_) ws.push_back({a.y, a.w});
    return DiscreteMeasure<S>(dim_, std::move(ws));
}

template <class S>
DiscreteMeasure<S> ThreePlan<S>::marginal3() const {
    std::vector<WeightedAtom<S>> ws;
    ws.reserve(atoms_.size());
    for (const auto& a : atoms_) ws.push_back({a.z, a.w});
    return DiscreteMeasure<S>(dim_, std::move(ws));
}

template <class S>
S ThreePlan<S>::total_cost() const {
    S total(0);
    for (const auto& a : atoms_) total += a.w * cost(a.x, a.y, a.z);
    return total;
}

template <class S>
std::pair<S, S> ThreePlan<S>::martingale_residuals() const {
    std::map<Point<S>, Point<S>> by_x, by_y;
    for (const auto& a : atoms_) {
        by_x.try_emplace(a.x, Point<S>(dim_)).first->second += a.w * (a.z - a.x);
        by_y.try_emplace(a.y, Point<S>(dim_)).first->second += a.w * (a.z - a.y);
    }
    S rx(0), ry(0);
    for (const auto& kv : by_x) rx = std::max(rx, max_abs(kv.second));
    for (const auto& kv : by_y) ry = std::max(ry, max_abs(kv.second));
    return {rx, ry};
}

template <class S>
ThreePlan<S> ThreePlan<S>::mixed_with(const ThreePlan& other, const S& s) const {
    if (other.dim_ != dim_) throw input_error("plan dimension mismatch in mixture");
    std::vector<PlanAtom<S>> all = atoms_;
    for (auto a : other.atoms_) {
        a.w *= s;
        all.push_back(std::move(a));
    }
    return ThreePlan(dim_, std::move(all));
}

template <class S>
S cost(const Point<S>& x, const Point<S>& y, const Point<S>& z) {
    return (norm_sq(z - x) + norm_sq(z - y)) / S(2);
}

// ---------------------------------------------------------------------------
// Candidate grid
// ---------------------------------------------------------------------------

template <class S>
std::vector<Point<S>> build_z_grid(const DiscreteMeasure<S>& mu, const DiscreteMeasure<S>& nu,
                                   const std::optional<SubspacePair<S>>& pair,
                                   const std::vector<Point<S>>& extra, const Tolerances& tol) {
    const int n = mu.dim();
    if (nu.dim() != n) throw input_error("build_z_grid: measures must share a dimension");
    std::vector<Point<S>> pts;
    for (const auto& a : mu.atoms()) pts.push_back(a.x);
    for (const auto& a : nu.atoms()) pts.push_back(a.x);
    for (const auto& p : extra) {
        if (p.dim() != n) throw input_error("build_z_grid: extra point dimension mismatch");
        pts.push_back(p);
    }
    if (pair) {
        if (pair->dim != n) throw input_error("build_z_grid: subspace pair dimension mismatch");
        for (const auto& ax : mu.atoms()) {
            const Point<S> px = pair->project2(ax.x);
            const Point<S> kx = pair->project_kernel(ax.x);
            for (const auto& ay : nu.atoms()) {
                const Point<S> base = px + pair->project1(ay.x);
                // carry the kernel component of either endpoint so the
                // candidate lies on that endpoint's leaf (both coincide with
                // the plain formula when the pair spans the whole space)
                pts.push_back(base + kx);
                pts.push_back(base + pair->project_kernel(ay.x));
            }
        }
    }
    std::sort(pts.begin(), pts.end());
    std::vector<Point<S>> out;
    for (const auto& p : pts)
        if (out.empty() || !points_close(out.back(), p, tol)) out.push_back(p);
    return out;
}

// ---------------------------------------------------------------------------
// Dual bound
// ---------------------------------------------------------------------------

template <class S>
DualBound<S> quadratic_dual_bound(const DiscreteMeasure<S>& mu, const DiscreteMeasure<S>& nu,
                                  const Tolerances& tol) {
    const int n = mu.dim();
    if (nu.dim() != n) throw input_error("quadratic_dual_bound: measures must share a dimension");
    if (!mu.is_probability(tol) || !nu.is_probability(tol))
        throw input_error("quadratic_dual_bound requires probability measures");
    const Point<S> bm = barycenter(mu);
    const Point<S> bn = barycenter(nu);
    const S drift = max_abs(bm - bn);
    if (scalar_traits<S>::exact ? !(drift == S(0)) : to_double(drift) > tol.float_zero)
        throw input_error("quadratic_dual_bound requires a common barycenter");

    const SymmetricMatrix<S> c = covariance_difference(mu, nu);
    DualBound<S> d;
    d.pair = split_subspaces(c, std::nullopt, tol);
    // A = P_V1 - P_V2 is dual feasible for any orthogonal pair, so the value
    // 1/2 tr(A C) below is a true lower bound even when the split is inexact
    const S tr1 = restricted_trace(c, d.pair.basis1);
    const S tr2 = restricted_trace(c, d.pair.basis2);
    d.value = (tr1 - tr2) / S(2);
    d.potential.a = d.pair.projection_matrix1();
    d.potential.a -= d.pair.projection_matrix2();
    d.potential.linear = Point<S>(n);
    d.potential.constant = S(0);
    return d;
}

// ---------------------------------------------------------------------------
// Primal solve
// ---------------------------------------------------------------------------

template <class S>
SolveReport<S> solve_primal(const DiscreteMeasure<S>& mu, const DiscreteMeasure<S>& nu,
                            const std::vector<Point<S>>& z_grid, const Tolerances& tol,
                            std::string* lp_dump) {
    const int n = mu.dim();
    if (nu.dim() != n) throw input_error("solve_primal: measures must share a dimension");
    if (!mu.is_probability(tol) || !nu.is_probability(tol))
        throw input_error("solve_primal requires probability measures");
    if (z_grid.empty()) throw input_error("solve_primal: z grid must be nonempty");
    for (const auto& p : z_grid)
        if (p.dim() != n) throw input_error("solve_primal: grid point dimension mismatch");

    SolveReport<S> rep;
    rep.z_grid_size = static_cast<int>(z_grid.size());

    const Point<S> bm = barycenter(mu);
    const Point<S> bn = barycenter(nu);
    const S drift = max_abs(bm - bn);
    if (scalar_traits<S>::exact ? !(drift == S(0)) : to_double(drift) > tol.float_zero) {
        rep.status = SolveStatus::infeasible_grid;
        rep.note = "mu and nu have different barycenters, so no martingale plan exists on any "
                   "grid";
        return rep;
    }

    const DualBound<S> dual = quadratic_dual_bound(mu, nu, tol);
    rep.dual_bound = dual.value;
    rep.potential = dual.potential;
    rep.pair = dual.pair;

    if (mu.equals(nu, tol)) {
        // staying put is optimal: the diagonal plan costs zero and the dual
        // bound is zero because the second moments cancel
        if (lp_dump) *lp_dump = "(mu == nu: diagonal plan, no LP was formed)\n";
        std::vector<PlanAtom<S>> atoms;
        atoms.reserve(mu.atoms().size());
        for (const auto& a : mu.atoms()) atoms.push_back({a.x, a.x, a.x, a.w});
        rep.plan = ThreePlan<S>(n, std::move(atoms), tol);
        rep.primal_cost = S(0);
        rep.gap = rep.primal_cost - rep.dual_bound;
        rep.optimality_residual = check_optimality(rep.plan, rep.potential).max_residual;
        return rep;
    }

    const auto& mus = mu.atoms();
    const auto& nus = nu.atoms();
    const int nx = static_cast<int>(mus.size());
    const int ny = static_cast<int>(nus.size());
    const int ng = static_cast<int>(z_grid.size());
    const int nvars = nx * ny * ng;
    const auto vid = [&](int i, int j, int k) { return (i * ny + j) * ng + k; };

    LinearProgram<S> lp;
    lp.objective.assign(nvars, S(0));
    for (int i = 0; i < nx; ++i)
        for (int j = 0; j < ny; ++j)
            for (int k = 0; k < ng; ++k)
                lp.objective[vid(i, j, k)] = cost(mus[i].x, nus[j].x, z_grid[k]);

    for (int i = 0; i < nx; ++i) {
        LPRow<S> row{std::vector<S>(nvars, S(0)), Rel::eq, mus[i].w};
        for (int j = 0; j < ny; ++j)
            for (int k = 0; k < ng; ++k) row.coeffs[vid(i, j, k)] = S(1);
        lp.rows.push_back(std::move(row));
    }
    for (int j = 0; j < ny; ++j) {
        LPRow<S> row{std::vector<S>(nvars, S(0)), Rel::eq, nus[j].w};
        for (int i = 0; i < nx; ++i)
            for (int k = 0; k < ng; ++k) row.coeffs[vid(i, j, k)] = S(1);
        lp.rows.push_back(std::move(row));
    }
    for (int i = 0; i < nx; ++i) {
        for (int c = 0; c < n; ++c) {
            LPRow<S> row{std::vector<S>(nvars, S(0)), Rel::eq, S(0)};
            for (int j = 0; j < ny; ++j)
                for (int k = 0; k < ng; ++k)
                    row.coeffs[vid(i, j, k)] = z_grid[k][c] - mus[i].x[c];
            lp.rows.push_back(std::move(row));
        }
    }
    for (int j = 0; j < ny; ++j) {
        for (int c = 0; c < n; ++c) {
            LPRow<S> row{std::vector<S>(nvars, S(0)), Rel::eq, S(0)};
            for (int i = 0; i < nx; ++i)
                for (int k = 0; k < ng; ++k)
                    row.coeffs[vid(i, j, k)] = z_grid[k][c] - nus[j].x[c];
            lp.rows.push_back(std::move(row));
        }
    }

    if (lp_dump) *lp_dump = dump_lp(lp);

    const LPOutcome<S> out = solve_lp(lp);
    if (out.status == LPStatus::infeasible) {
        rep.status = SolveStatus::infeasible_grid;
        rep.note = "martingale rows cannot be met on this z grid; enlarge it (the structured "
                   "candidates from build_z_grid plus the mu and nu atoms usually suffice)";
        return rep;
    }
    if (out.status == LPStatus::unbounded)
        throw std::runtime_error("internal: three-marginal transport LP reported unbounded");

    std::vector<PlanAtom<S>> atoms;
    for (int i = 0; i < nx; ++i)
        for (int j = 0; j < ny; ++j)
            for (int k = 0; k < ng; ++k) {
                const S& w = out.solution[vid(i, j, k)];
                if (w > S(0)) atoms.push_back({mus[i].x, nus[j].x, z_grid[k], w});
            }
    rep.plan = ThreePlan<S>(n, std::move(atoms), tol);
    rep.primal_cost = out.objective;
    rep.gap = rep.primal_cost - rep.dual_bound;
    rep.optimality_residual = check_optimality(rep.plan, rep.potential).max_residual;
    const bool gap_positive =
        scalar_traits<S>::exact
            ? rep.gap > S(0)
            : to_double(rep.gap) > tol.float_zero * std::max(1.0, to_double(rep.primal_cost));
    if (gap_positive) rep.note = "positive duality gap: non-isometric regime; decompose first";
    return rep;
}

// ---------------------------------------------------------------------------
// Assembly from a bimartingale coupling
// ---------------------------------------------------------------------------

template <class S>
ThreePlan<S> assemble_from_bimartingale(const Coupling<S>& pi, const SubspacePair<S>& pair,
                                        const Tolerances& tol) {
    const int n = pi.dim();
    if (pair.dim != n)
        throw input_error("assemble_from_bimartingale: subspace pair dimension mismatch");
    const BimartingaleReport<S> report = verify_bimartingale(pi, pair);
    const auto violates = [&](const S& v) {
        return scalar_traits<S>::exact ? !(v == S(0)) : to_double(v) > tol.float_zero;
    };
    for (const auto& e : report.source) {
        const S v = max_abs(e.residual);
        if (violates(v))
            throw input_error("assemble_from_bimartingale: source-martingale residual " +
                              std::to_string(to_double(v)) + " at atom " + point_str(e.point));
    }
    for (const auto& e : report.target) {
        const S v = max_abs(e.residual);
        if (violates(v))
            throw input_error("assemble_from_bimartingale: target-martingale residual " +
                              std::to_string(to_double(v)) + " at atom " + point_str(e.point));
    }
    std::vector<PlanAtom<S>> atoms;
    atoms.reserve(pi.atoms().size());
    for (const auto& a : pi.atoms()) {
        // the kernel component rides along from x; on a common leaf it equals
        // the kernel component of y, so z stays on the leaf
        const Point<S> z = pair.project2(a.x) + pair.project1(a.y) + pair.project_kernel(a.x);
        atoms.push_back({a.x, a.y, z, a.w});
    }
    return ThreePlan<S>(n, std::move(atoms), tol);
}

// ---------------------------------------------------------------------------
// Optimality certificate
// ---------------------------------------------------------------------------

template <class S>
OptimalityReport<S> check_optimality(const ThreePlan<S>& plan, const QuadraticPotential<S>& u) {
    OptimalityReport<S> rep;
    rep.entries.reserve(plan.atoms().size());
    rep.max_residual = S(0);
    for (const auto& a : plan.atoms()) {
        const S uy = u.value(a.y);
        const S ux = u.value(a.x);
        const S uz = u.value(a.z);
        const Point<S> gy = u.gradient(a.y);
        const Point<S> gx = u.gradient(a.x);
        const S lhs = uy + dot(gy, a.z - a.y) - ux - dot(gx, a.z - a.x);
        typename OptimalityReport<S>::Entry e;
        const S opt_diff = lhs - cost(a.x, a.y, a.z);
        const S y_diff = uz - uy - dot(gy, a.z - a.y) - norm_sq(a.z - a.y) / S(2);
        const S x_diff = uz - ux - dot(gx, a.z - a.x) + norm_sq(a.z - a.x) / S(2);
        e.opt_residual = abs_value(opt_diff);
        e.y_identity = abs_value(y_diff);
        e.x_identity = abs_value(x_diff);
        rep.max_residual = std::max(rep.max_residual, e.opt_residual);
        rep.entries.push_back(std::move(e));
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Variance form
// ---------------------------------------------------------------------------

template <class S>
VarianceReport<S> solve_variance(const DiscreteMeasure<S>& mu, const DiscreteMeasure<S>& nu,
                                 const std::vector<Point<S>>& z_grid, const Tolerances& tol) {
    const int n = mu.dim();
    if (nu.dim() != n) throw input_error("solve_variance: measures must share a dimension");
    if (!mu.is_probability(tol) || !nu.is_probability(tol))
        throw input_error("solve_variance requires probability measures");
    if (z_grid.empty()) throw input_error("solve_variance: z grid must be nonempty");
    for (const auto& p : z_grid)
        if (p.dim() != n) throw input_error("solve_variance: grid point dimension mismatch");

    VarianceReport<S> rep;
    const Point<S> b = barycenter(mu);
    const S drift = max_abs(b - barycenter(nu));
    if (scalar_traits<S>::exact ? !(drift == S(0)) : to_double(drift) > tol.float_zero) {
        rep.status = SolveStatus::infeasible_grid;
        rep.note = "mu and nu have different barycenters, so no common martingale target exists";
        return rep;
    }

    const auto& mus = mu.atoms();
    const auto& nus = nu.atoms();
    const int nx = static_cast<int>(mus.size());
    const int ny = static_cast<int>(nus.size());
    const int ng = static_cast<int>(z_grid.size());
    const int na = nx * ng;
    const int nvars = na + ny * ng;
    const auto aid = [&](int i, int k) { return i * ng + k; };
    const auto bid = [&](int j, int k) { return na + j * ng + k; };

    LinearProgram<S> lp;
    lp.objective.assign(nvars, S(0));
    // any feasible rho has barycenter b, so minimizing the second moment
    // about b minimizes the variance
    for (int i = 0; i < nx; ++i)
        for (int k = 0; k < ng; ++k) lp.objective[aid(i, k)] = norm_sq(z_grid[k] - b);

    for (int i = 0; i < nx; ++i) {
        LPRow<S> row{std::vector<S>(nvars, S(0)), Rel::eq, mus[i].w};
        for (int k = 0; k < ng; ++k) row.coeffs[aid(i, k)] = S(1);
        lp.rows.push_back(std::move(row));
    }
    for (int j = 0; j < ny; ++j) {
        LPRow<S> row{std::vector<S>(nvars, S(0)), Rel::eq, nus[j].w};
        for (int k = 0; k < ng; ++k) row.coeffs[bid(j, k)] = S(1);
        lp.rows.push_back(std::move(row));
    }
    for (int i = 0; i < nx; ++i)
        for (int c = 0; c < n; ++c) {
            LPRow<S> row{std::vector<S>(nvars, S(0)), Rel::eq, S(0)};
            for (int k = 0; k < ng; ++k) row.coeffs[aid(i, k)] = z_grid[k][c] - mus[i].x[c];
            lp.rows.push_back(std::move(row));
        }
    for (int j = 0; j < ny; ++j)
        for (int c = 0; c < n; ++c) {
            LPRow<S> row{std::vector<S>(nvars, S(0)), Rel::eq, S(0)};
            for (int k = 0; k < ng; ++k) row.coeffs[bid(j, k)] = z_grid[k][c] - nus[j].x[c];
            lp.rows.push_back(std::move(row));
        }
    // both halves must land on the same intermediate measure
    for (int k = 0; k < ng; ++k) {
        LPRow<S> row{std::vector<S>(nvars, S(0)), Rel::eq, S(0)};
        for (int i = 0; i < nx; ++i) row.coeffs[aid(i, k)] = S(1);
        for (int j = 0; j < ny; ++j) row.coeffs[bid(j, k)] = S(-1);
        lp.rows.push_back(std::move(row));
    }

    const LPOutcome<S> out = solve_lp(lp);
    if (out.status == LPStatus::infeasible) {
        rep.status = SolveStatus::infeasible_grid;
        rep.note = "martingale rows cannot be met on this z grid; enlarge it";
        return rep;
    }
    if (out.status == LPStatus::unbounded)
        throw std::runtime_error("internal: variance LP reported unbounded");

    rep.value = out.objective;
    std::vector<WeightedAtom<S>> rho;
    for (int k = 0; k < ng; ++k) {
        S mass(0);
        for (int i = 0; i < nx; ++i) mass += out.solution[aid(i, k)];
        if (mass > S(0)) rho.push_back({z_grid[k], mass});
    }
    rep.rho = DiscreteMeasure<S>(n, std::move(rho), tol);
    return rep;
}

// ---------------------------------------------------------------------------
// Balance diagnostics
// ---------------------------------------------------------------------------

template <class S>
BalanceReport<S> balance_check(const ThreePlan<S>& plan,
                               const std::function<bool(const Point<S>&)>& in_set) {
    const int n = plan.dim();
    S mass_mu(0), mass_nu(0);
    Point<S> mom_mu(n), mom_nu(n);
    for (const auto& a : plan.atoms()) {
        if (in_set(a.x)) {
            mass_mu += a.w;
            mom_mu += a.w * a.x;
        }
        if (in_set(a.y)) {
            mass_nu += a.w;
            mom_nu += a.w * a.y;
        }
    }
    const S mass_gap = mass_mu - mass_nu;
    return {abs_value(mass_gap), mom_mu - mom_nu};
}

// ---------------------------------------------------------------------------

template class ThreePlan<double>;
template class ThreePlan<Rational>;

template double cost(const Point<double>&, const Point<double>&, const Point<double>&);
template Rational cost(const Point<Rational>&, const Point<Rational>&, const Point<Rational>&);

template std::vector<Point<double>> build_z_grid(const DiscreteMeasure<double>&,
                                                 const DiscreteMeasure<double>&,
                                                 const std::optional<SubspacePair<double>>&,
                                                 const std::vector<Point<double>>&,
                                                 const Tolerances&);
template std::vector<Point<Rational>> build_z_grid(const DiscreteMeasure<Rational>&,
                                                   const DiscreteMeasure<Rational>&,
                                                   const std::optional<SubspacePair<Rational>>&,
                                                   const std::vector<Point<Rational>>&,
                                                   const Tolerances&);

template DualBound<double> quadratic_dual_bound(const DiscreteMeasure<double>&,
                                                const DiscreteMeasure<double>&, const Tolerances&);
template DualBound<Rational> quadratic_dual_bound(const DiscreteMeasure<Rational>&,
                                                  const DiscreteMeasure<Rational>&,
                                                  const Tolerances&);

template SolveReport<double> solve_primal(const DiscreteMeasure<double>&,
                                          const DiscreteMeasure<double>&,
                                          const std::vector<Point<double>>&, const Tolerances&,
                                          std::string*);
template SolveReport<Rational> solve_primal(const DiscreteMeasure<Rational>&,
                                            const DiscreteMeasure<Rational>&,
                                            const std::vector<Point<Rational>>&,
                                            const Tolerances&, std::string*);

template ThreePlan<double> assemble_from_bimartingale(const Coupling<double>&,
                                                      const SubspacePair<double>&,
                                                      const Tolerances&);
template ThreePlan<Rational> assemble_from_bimartingale(const Coupling<Rational>&,
                                                        const SubspacePair<Rational>&,
                                                        const Tolerances&);

template OptimalityReport<double> check_optimality(const ThreePlan<double>&,
                                                   const QuadraticPotential<double>&);
template OptimalityReport<Rational> check_optimality(const ThreePlan<Rational>&,
                                                     const QuadraticPotential<Rational>&);

template VarianceReport<double> solve_variance(const DiscreteMeasure<double>&,
                                               const DiscreteMeasure<double>&,
                                               const std::vector<Point<double>>&,
                                               const Tolerances&);
template VarianceReport<Rational> solve_variance(const DiscreteMeasure<Rational>&,
                                                 const DiscreteMeasure<Rational>&,
                                                 const std::vector<Point<Rational>>&,
                                                 const Tolerances&);

template BalanceReport<double> balance_check(const ThreePlan<double>&,
                                             const std::function<bool(const Point<double>&)>&);
template BalanceReport<Rational> balance_check(
    const ThreePlan<Rational>&, const std::function<bool(const Point<Rational>&)>&);

} // namespace bimart
