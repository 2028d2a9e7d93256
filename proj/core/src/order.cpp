#include "bimart/order.hpp"

#include "bimart/simplex.hpp"

#include <algorithm>
#include <map>

namespace bimart {

// ===========================================================================
// Coupling
// ===========================================================================

namespace {

template <class S>
bool close_points(const Point<S>& a, const Point<S>& b, const Tolerances& tol) {
    if constexpr (scalar_traits<S>::exact) return a == b;
    else return to_double(norm_sq(a - b)) <= tol.dedup * tol.dedup;
}

} // namespace

template <class S>
Coupling<S>::Coupling(int dim, std::vector<CouplingAtom<S>> atoms, const Tolerances& tol)
    : dim_(dim) {
    if (dim < 1) throw input_error("coupling dimension must be >= 1");
    for (const auto& a : atoms) {
        if (a.x.dim() != dim || a.y.dim() != dim)
            throw input_error("coupling atom dimension mismatch");
        if (a.w < S(0)) throw input_error("negative coupling weight");
    }
    std::sort(atoms.begin(), atoms.end(), [](const CouplingAtom<S>& a, const CouplingAtom<S>& b) {
        if (a.x < b.x) return true;
        if (b.x < a.x) return false;
        return a.y < b.y;
    });
    for (auto& a : atoms) {
        if (a.w == S(0)) continue;
        if (!atoms_.empty() && close_points(atoms_.back().x, a.x, tol) &&
            close_points(atoms_.back().y, a.y, tol))
            atoms_.back().w += a.w;
        else
            atoms_.push_back(std::move(a));
    }
}

template <class S>
S Coupling<S>::total_mass() const {
    S m(0);
    for (const auto& a : atoms_) m += a.w;
    return m;
}

template <class S>
DiscreteMeasure<S> Coupling<S>::first_marginal() const {
    std::vector<WeightedAtom<S>> out;
    out.reserve(atoms_.size());
    for (const auto& a : atoms_) out.push_back({a.x, a.w});
    return DiscreteMeasure<S>(dim_, std::move(out));
}

template <class S>
DiscreteMeasure<S> Coupling<S>::second_marginal() const {
    std::vector<WeightedAtom<S>> out;
    out.reserve(atoms_.size());
    for (const auto& a : atoms_) out.push_back({a.y, a.w});
    return DiscreteMeasure<S>(dim_, std::move(out));
}

template <class S>
S Coupling<S>::quadratic_cost() const {
    S acc(0);
    for (const auto& a : atoms_) acc += a.w * norm_sq(a.x - a.y);
    return acc;
}

template <class S>
Coupling<S> identity_coupling(const DiscreteMeasure<S>& m) {
    std::vector<CouplingAtom<S>> atoms;
    atoms.reserve(m.atoms().size());
    for (const auto& a : m.atoms()) atoms.push_back({a.x, a.x, a.w});
    return Coupling<S>(m.dim(), std::move(atoms));
}

template <class S>
S martingale_residual(const Coupling<S>& pi) {
    S worst(0);
    size_t i = 0;
    const auto& atoms = pi.atoms();
    while (i < atoms.size()) { // atoms are sorted by x: group scan
        Point<S> acc(pi.dim());
        size_t j = i;
        for (; j < atoms.size() && atoms[j].x == atoms[i].x; ++j)
            acc += atoms[j].w * (atoms[j].y - atoms[j].x);
        worst = std::max(worst, max_abs(acc));
        i = j;
    }
    return worst;
}

// ===========================================================================
// Feasibility LPs
// ===========================================================================

namespace {

// Shared LP: pi >= 0 on support(mu) x support(nu); marginal equality rows;
// then one row per (source atom, V1 basis vector) and per (target atom, V2
// basis vector).  Objective: minimize sum pi_ij |x_i - y_j|^2.
template <class S>
std::optional<Coupling<S>> coupling_feasibility(const DiscreteMeasure<S>& mu,
                                                const DiscreteMeasure<S>& nu,
                                                const std::vector<Point<S>>& dirs1,
                                                const std::vector<Point<S>>& dirs2,
                                                const Tolerances& tol) {
    const auto& xs = mu.atoms();
    const auto& ys = nu.atoms();
    const int nx = static_cast<int>(xs.size()), ny = static_cast<int>(ys.size());
    const int nv = nx * ny;
    auto var = [ny](int i, int j) { return i * ny + j; };

    LinearProgram<S> lp;
    lp.objective.assign(nv, S(0));
    for (int i = 0; i < nx; ++i)
        for (int j = 0; j < ny; ++j) lp.objective[var(i, j)] = norm_sq(xs[i].x - ys[j].x);

    for (int i = 0; i < nx; ++i) { // source marginals
        LPRow<S> row{std::vector<S>(nv, S(0)), Rel::eq, xs[i].w};
        for (int j = 0; j < ny; ++j) row.coeffs[var(i, j)] = S(1);
        lp.rows.push_back(std::move(row));
    }
    for (int j = 0; j < ny; ++j) { // target marginals
        LPRow<S> row{std::vector<S>(nv, S(0)), Rel::eq, ys[j].w};
        for (int i = 0; i < nx; ++i) row.coeffs[var(i, j)] = S(1);
        lp.rows.push_back(std::move(row));
    }
    for (int i = 0; i < nx; ++i) // forward martingale rows along dirs1
        for (const auto& b : dirs1) {
            LPRow<S> row{std::vector<S>(nv, S(0)), Rel::eq, S(0)};
            for (int j = 0; j < ny; ++j) row.coeffs[var(i, j)] = dot(b, ys[j].x - xs[i].x);
            lp.rows.push_back(std::move(row));
        }
    for (int j = 0; j < ny; ++j) // backward martingale rows along dirs2
        for (const auto& b : dirs2) {
            LPRow<S> row{std::vector<S>(nv, S(0)), Rel::eq, S(0)};
            for (int i = 0; i < nx; ++i) row.coeffs[var(i, j)] = dot(b, xs[i].x - ys[j].x);
            lp.rows.push_back(std::move(row));
        }

    const auto outcome = solve_lp(lp);
    if (outcome.status != LPStatus::optimal) return std::nullopt;

    std::vector<CouplingAtom<S>> atoms;
    for (int i = 0; i < nx; ++i)
        for (int j = 0; j < ny; ++j) {
            const S& w = outcome.solution[var(i, j)];
            if (!scalar_traits<S>::is_zero(w, tol) && w > S(0))
                atoms.push_back({xs[i].x, ys[j].x, w});
        }
    return Coupling<S>(mu.dim(), std::move(atoms), tol);
}

} // namespace

template <class S>
std::optional<Coupling<S>> check_convex_order(const DiscreteMeasure<S>& mu,
                                              const DiscreteMeasure<S>& nu,
                                              const Tolerances& tol) {
    if (mu.dim() != nu.dim()) throw input_error("check_convex_order: dimension mismatch");
    if (!mu.is_probability(tol) || !nu.is_probability(tol))
        throw input_error("check_convex_order expects probability measures");
    return coupling_feasibility(mu, nu, full_space_pair<S>(mu.dim()).basis1, {}, tol);
}

template <class S>
std::optional<Coupling<S>> find_bimartingale(const DiscreteMeasure<S>& mu,
                                             const DiscreteMeasure<S>& nu,
                                             const SubspacePair<S>& pair, const Tolerances& tol) {
    if (mu.dim() != nu.dim() || pair.dim != mu.dim())
        throw input_error("find_bimartingale: dimension mismatch");
    if (!mu.is_probability(tol) || !nu.is_probability(tol))
        throw input_error("find_bimartingale expects probability measures");
    if (!pair.complementing())
        throw input_error("find_bimartingale: V1 and V2 must complement the ambient space "
                          "(restrict to the leaf tangent space first)");
    const Point<S> gap = barycenter(mu) - barycenter(nu);
    if (!scalar_traits<S>::is_zero(max_abs(gap), tol))
        throw input_error("find_bimartingale: measures do not share a barycenter");
    return coupling_feasibility(mu, nu, pair.basis1, pair.basis2, tol);
}

// ===========================================================================
// Verification and pushforwards
// ===========================================================================

template <class S>
BimartingaleReport<S> verify_bimartingale(const Coupling<S>& pi, const SubspacePair<S>& pair) {
    if (pi.dim() != pair.dim) throw input_error("verify_bimartingale: dimension mismatch");
    BimartingaleReport<S> report;
    report.max_violation = S(0);

    const auto& atoms = pi.atoms();
    size_t i = 0;
    while (i < atoms.size()) { // sorted by x: contiguous source groups
        Point<S> acc(pi.dim());
        size_t j = i;
        for (; j < atoms.size() && atoms[j].x == atoms[i].x; ++j)
            acc += atoms[j].w * pair.project1(atoms[j].y - atoms[j].x);
        report.max_violation = std::max(report.max_violation, max_abs(acc));
        report.source.push_back({atoms[i].x, std::move(acc)});
        i = j;
    }

    std::map<Point<S>, Point<S>> by_target; // Point's operator< is lexicographic
    for (const auto& a : atoms) {
        auto [it, inserted] = by_target.try_emplace(a.y, Point<S>(pi.dim()));
        it->second += a.w * pair.project2(a.x - a.y);
    }
    for (auto& [y, acc] : by_target) {
        report.max_violation = std::max(report.max_violation, max_abs(acc));
        report.target.push_back({y, std::move(acc)});
    }
    return report;
}

namespace {

// coefficient vector of x w.r.t. an orthogonal basis; empty basis -> 1-dim 0
template <class S>
Point<S> coefficients(const std::vector<Point<S>>& basis, const Point<S>& x) {
    if (basis.empty()) return Point<S>(1);
    Point<S> out(static_cast<int>(basis.size()));
    for (size_t k = 0; k < basis.size(); ++k)
        out[static_cast<int>(k)] = dot(basis[k], x) / norm_sq(basis[k]);
    return out;
}

} // namespace

template <class S>
std::pair<Coupling<S>, Coupling<S>>
marginal_martingale_pushforwards(const Coupling<S>& pi, const SubspacePair<S>& pair) {
    if (pi.dim() != pair.dim)
        throw input_error("marginal_martingale_pushforwards: dimension mismatch");
    std::vector<CouplingAtom<S>> fwd, swapped;
    fwd.reserve(pi.atoms().size());
    swapped.reserve(pi.atoms().size());
    for (const auto& a : pi.atoms()) {
        fwd.push_back({coefficients(pair.basis1, a.x), coefficients(pair.basis1, a.y), a.w});
        // S(w1, w2) = (w2, w1): the V2 projections swap roles
        swapped.push_back({coefficients(pair.basis2, a.y), coefficients(pair.basis2, a.x), a.w});
    }
    const int d1 = std::max(1, pair.dim1()), d2 = std::max(1, pair.dim2());
    return {Coupling<S>(d1, std::move(fwd)), Coupling<S>(d2, std::move(swapped))};
}

// ===========================================================================
// explicit instantiations
// ===========================================================================

template class Coupling<double>;
template class Coupling<Rational>;
template Coupling<double> identity_coupling(const DiscreteMeasure<double>&);
template Coupling<Rational> identity_coupling(const DiscreteMeasure<Rational>&);
template double martingale_residual(const Coupling<double>&);
template Rational martingale_residual(const Coupling<Rational>&);
template std::optional<Coupling<double>> check_convex_order(const DiscreteMeasure<double>&, const DiscreteMeasure<double>&, const Tolerances&);
template std::optional<Coupling<Rational>> check_convex_order(const DiscreteMeasure<Rational>&, const DiscreteMeasure<Rational>&, const Tolerances&);
template std::optional<Coupling<double>> find_bimartingale(const DiscreteMeasure<double>&, const DiscreteMeasure<double>&, const SubspacePair<double>&, const Tolerances&);
template std::optional<Coupling<Rational>> find_bimartingale(const DiscreteMeasure<Rational>&, const DiscreteMeasure<Rational>&, const SubspacePair<Rational>&, const Tolerances&);
template BimartingaleReport<double> verify_bimartingale(const Coupling<double>&, const SubspacePair<double>&);
template BimartingaleReport<Rational> verify_bimartingale(const Coupling<Rational>&, const SubspacePair<Rational>&);
template std::pair<Coupling<double>, Coupling<double>> marginal_martingale_pushforwards(const Coupling<double>&, const SubspacePair<double>&);
template std::pair<Coupling<Rational>, Coupling<Rational>> marginal_martingale_pushforwards(const Coupling<Rational>&, const SubspacePair<Rational>&);

} // namespace bimart
