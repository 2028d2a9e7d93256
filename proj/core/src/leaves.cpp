#include "bimart/leaves.hpp"

#include <algorithm>
#include <map>
#include <sstream>
#include <stdexcept>

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
bool keys_close(const Point<S>& a, const Point<S>& b, const Tolerances& tol) {
    if constexpr (scalar_traits<S>::exact)
        return a == b;
    else
        return to_double(max_abs(a - b)) <= tol.float_zero;
}

template <class S>
bool scalars_close(const S& a, const S& b, const Tolerances& tol) {
    if constexpr (scalar_traits<S>::exact) {
        return a == b;
    } else {
        const S d = a - b;
        return to_double(abs_value(d)) <= tol.float_zero;
    }
}

template <class S>
std::vector<Point<S>> joined_bases(const SubspacePair<S>& pair) {
    std::vector<Point<S>> basis = pair.basis1;
    basis.insert(basis.end(), pair.basis2.begin(), pair.basis2.end());
    return basis;
}

// shared partition engine; `parent_path` prefixes diagnostics, `parent_theta`
// scales the group weights into absolute node weights
template <class S>
std::vector<LeafNode<S>> partition_impl(const DiscreteMeasure<S>& mu, const DiscreteMeasure<S>& nu,
                                        const SubspacePair<S>& pair, const Tolerances& tol,
                                        const std::string& parent_path, const S& parent_theta,
                                        int depth) {
    const int n = mu.dim();
    struct Tagged {
        Point<S> key;
        bool from_mu;
        WeightedAtom<S> atom;
    };
    std::vector<Tagged> entries;
    entries.reserve(mu.atoms().size() + nu.atoms().size());
    for (const auto& a : mu.atoms()) entries.push_back({pair.project_kernel(a.x), true, a});
    for (const auto& a : nu.atoms()) entries.push_back({pair.project_kernel(a.x), false, a});
    std::stable_sort(entries.begin(), entries.end(),
                     [](const Tagged& a, const Tagged& b) { return a.key < b.key; });

    std::vector<LeafNode<S>> nodes;
    std::size_t start = 0;
    while (start < entries.size()) {
        std::size_t stop = start + 1;
        // stable clustering along the sorted key order (exact equality in
        // rational mode)
        while (stop < entries.size() && keys_close(entries[stop - 1].key, entries[stop].key, tol))
            ++stop;

        std::vector<WeightedAtom<S>> mu_atoms, nu_atoms;
        S mass_mu(0), mass_nu(0);
        for (std::size_t i = start; i < stop; ++i) {
            if (entries[i].from_mu) {
                mu_atoms.push_back(entries[i].atom);
                mass_mu += entries[i].atom.w;
            } else {
                nu_atoms.push_back(entries[i].atom);
                mass_nu += entries[i].atom.w;
            }
        }
        const std::string key = point_str(entries[start].key);
        const std::string path = parent_path.empty() ? key : parent_path + " > " + key;
        if (mu_atoms.empty() || nu_atoms.empty() || !scalars_close(mass_mu, mass_nu, tol))
            throw input_error("leaf " + path + ": mass balance violated (mu carries " +
                              std::to_string(to_double(mass_mu)) + ", nu carries " +
                              std::to_string(to_double(mass_nu)) + ")");

        LeafNode<S> node;
        node.id = static_cast<int>(nodes.size());
        node.depth = depth;
        node.key = key;
        node.path = path;
        node.theta = parent_theta * mass_mu;
        node.mu_s = DiscreteMeasure<S>(n, std::move(mu_atoms), tol).normalized();
        node.nu_s = DiscreteMeasure<S>(n, std::move(nu_atoms), tol).normalized();
        const Point<S> moment_gap = barycenter(node.mu_s) - barycenter(node.nu_s);
        if (scalar_traits<S>::exact ? !is_zero_point(moment_gap)
                                    : to_double(max_abs(moment_gap)) > tol.float_zero)
            throw input_error("leaf " + path + ": moment balance violated (barycenter gap " +
                              point_str(moment_gap) + ")");
        node.anchor = std::min(node.mu_s.atoms().front().x, node.nu_s.atoms().front().x);
        node.tangent = pair;
        node.tangent_basis = joined_bases(pair);
        node.trivial = node.mu_s.equals(node.nu_s, tol);
        nodes.push_back(std::move(node));
        start = stop;
    }
    return nodes;
}

template <class S>
void assign_ids(LeafNode<S>& node, int& counter) {
    node.id = counter++;
    for (auto& child : node.children) assign_ids(child, counter);
}

// coefficient vector of (p - anchor) with respect to an orthogonal basis
template <class S>
Point<S> coords_in_basis(const Point<S>& p, const Point<S>& anchor,
                         const std::vector<Point<S>>& basis) {
    Point<S> t(static_cast<int>(basis.size()));
    const Point<S> d = p - anchor;
    for (std::size_t i = 0; i < basis.size(); ++i) t[static_cast<int>(i)] =
        dot(d, basis[i]) / norm_sq(basis[i]);
    return t;
}

} // namespace

template <class S>
std::vector<LeafNode<S>> partition_by_leaf(const DiscreteMeasure<S>& mu,
                                           const DiscreteMeasure<S>& nu,
                                           const SubspacePair<S>& pair, const Tolerances& tol) {
    const int n = mu.dim();
    if (nu.dim() != n || pair.dim != n)
        throw input_error("partition_by_leaf: dimension mismatch");
    if (!mu.is_probability(tol) || !nu.is_probability(tol))
        throw input_error("partition_by_leaf requires probability measures");
    const Point<S> gap = barycenter(mu) - barycenter(nu);
    if (scalar_traits<S>::exact ? !is_zero_point(gap) : to_double(max_abs(gap)) > tol.float_zero)
        throw input_error("partition_by_leaf requires a common barycenter");
    return partition_impl(mu, nu, pair, tol, "", S(1), 1);
}

template <class S>
LeafNode<S> refine(LeafNode<S> node, const Tolerances& tol) {
    const int n = node.mu_s.dim();
    if (node.depth > n + 1)
        throw std::runtime_error("internal: leaf recursion exceeded the dimension bound");

    if (node.mu_s.equals(node.nu_s, tol)) {
        node.trivial = true;
        const SubspacePair<S> empty = make_subspace_pair<S>(n, {}, {}, tol);
        node.tangent = empty;
        if (node.mu_s.atoms().size() == 1) {
            // single support point: terminal with V(S) = {0}
            node.tangent_basis.clear();
            return node;
        }
        // identical conditionals cost nothing; still refine to points so that
        // terminal leaves all satisfy the non-degeneracy invariant
        int next_id = 0;
        for (const auto& a : node.mu_s.atoms()) {
            LeafNode<S> child;
            child.id = next_id++;
            child.depth = node.depth + 1;
            child.anchor = a.x;
            child.tangent = empty;
            child.key = point_str(a.x);
            child.path = node.path + " > " + child.key;
            child.theta = node.theta * a.w;
            child.mu_s = dirac(a.x);
            child.nu_s = dirac(a.x);
            child.trivial = true;
            node.children.push_back(std::move(child));
        }
        return node;
    }

    const SymmetricMatrix<S> c = covariance_difference(node.mu_s, node.nu_s);
    const SubspacePair<S> split = split_subspaces(c, std::nullopt, tol);
    const int dim_v = split.dim1() + split.dim2();
    const int dim_w = static_cast<int>(node.tangent_basis.size());

    if (dim_v >= dim_w) {
        // the covariance difference has full range in the tangent space
        node.tangent = split;
        node.tangent_basis = joined_bases(split);
        for (const auto* m : {&node.mu_s, &node.nu_s})
            for (const auto& a : m->atoms()) {
                const Point<S> d = a.x - node.anchor;
                const Point<S> off = d - split.project1(d) - split.project2(d);
                if (scalar_traits<S>::exact ? !is_zero_point(off)
                                            : to_double(max_abs(off)) > tol.float_zero)
                    throw input_error("leaf " + node.path +
                                      ": support leaves the tangent space at atom " +
                                      point_str(a.x));
            }
        return node;
    }

    node.tangent = split;
    node.children =
        partition_impl(node.mu_s, node.nu_s, split, tol, node.path, node.theta, node.depth + 1);
    for (auto& child : node.children) child = refine(std::move(child), tol);
    return node;
}

template <class S>
LeafNode<S> decompose(const DiscreteMeasure<S>& mu, const DiscreteMeasure<S>& nu,
                      const Tolerances& tol) {
    const int n = mu.dim();
    if (nu.dim() != n) throw input_error("decompose: measures must share a dimension");
    if (!mu.is_probability(tol) || !nu.is_probability(tol))
        throw input_error("decompose requires probability measures");
    const Point<S> gap = barycenter(mu) - barycenter(nu);
    if (scalar_traits<S>::exact ? !is_zero_point(gap) : to_double(max_abs(gap)) > tol.float_zero)
        throw input_error("decompose requires a common barycenter");

    LeafNode<S> root;
    root.depth = 0;
    root.key = "root";
    root.path = "root";
    root.theta = S(1);
    root.mu_s = mu;
    root.nu_s = nu;
    root.anchor = std::min(mu.atoms().front().x, nu.atoms().front().x);
    for (int i = 0; i < n; ++i) {
        Point<S> e(n);
        e[i] = S(1);
        root.tangent_basis.push_back(std::move(e));
    }
    root = refine(std::move(root), tol);
    int counter = 0;
    assign_ids(root, counter);
    return root;
}

namespace {

template <class S>
void solve_leaf(const LeafNode<S>& node, const Tolerances& tol,
                std::vector<PlanAtom<S>>& plan_atoms, std::vector<LeafLedgerEntry<S>>& ledger,
                S& total) {
    if (!node.terminal()) {
        for (const auto& child : node.children) solve_leaf(child, tol, plan_atoms, ledger, total);
        return;
    }

    LeafLedgerEntry<S> entry;
    entry.leaf_id = node.id;
    entry.path = node.path;
    entry.depth = node.depth;
    entry.theta = node.theta;
    entry.dim1 = node.tangent.dim1();
    entry.dim2 = node.tangent.dim2();
    entry.trivial = node.trivial;

    if (node.trivial) {
        entry.j_leaf = S(0);
        for (const auto& a : node.mu_s.atoms())
            plan_atoms.push_back({a.x, a.x, a.x, node.theta * a.w});
        ledger.push_back(std::move(entry));
        return;
    }

    const std::vector<Point<S>>& basis = node.tangent_basis;
    const int d = static_cast<int>(basis.size());

    // leaf split in coordinates: first dim1 axes carry V1, the rest V2
    std::vector<Point<S>> axes1, axes2;
    for (int i = 0; i < d; ++i) {
        Point<S> e(d);
        e[i] = S(1);
        (i < node.tangent.dim1() ? axes1 : axes2).push_back(std::move(e));
    }
    const SubspacePair<S> coord_pair = make_subspace_pair<S>(d, axes1, axes2, tol);

    std::map<Point<S>, Point<S>> back_mu, back_nu;
    std::vector<WeightedAtom<S>> muc, nuc;
    for (const auto& a : node.mu_s.atoms()) {
        Point<S> t = coords_in_basis(a.x, node.anchor, basis);
        back_mu.emplace(t, a.x);
        muc.push_back({std::move(t), a.w});
    }
    for (const auto& a : node.nu_s.atoms()) {
        Point<S> t = coords_in_basis(a.x, node.anchor, basis);
        back_nu.emplace(t, a.x);
        nuc.push_back({std::move(t), a.w});
    }

    const auto pi_hat = find_bimartingale(DiscreteMeasure<S>(d, std::move(muc), tol),
                                          DiscreteMeasure<S>(d, std::move(nuc), tol), coord_pair,
                                          tol);
    if (!pi_hat)
        throw input_error("leaf " + node.path +
                          ": conditionals admit no bimartingale coupling for the leaf split");

    std::vector<CouplingAtom<S>> ambient;
    ambient.reserve(pi_hat->atoms().size());
    for (const auto& a : pi_hat->atoms()) {
        const auto ix = back_mu.find(a.x);
        const auto iy = back_nu.find(a.y);
        if (ix == back_mu.end() || iy == back_nu.end())
            throw std::runtime_error("internal: leaf witness atom missing from the support maps");
        ambient.push_back({ix->second, iy->second, a.w});
    }
    const ThreePlan<S> leaf_plan = assemble_from_bimartingale(
        Coupling<S>(node.mu_s.dim(), std::move(ambient), tol), node.tangent, tol);

    const SymmetricMatrix<S> c = covariance_difference(node.mu_s, node.nu_s);
    const S tr1 = restricted_trace(c, node.tangent.basis1);
    const S tr2 = restricted_trace(c, node.tangent.basis2);
    entry.j_leaf = (tr1 - tr2) / S(2);
    total += node.theta * entry.j_leaf;
    for (const auto& a : leaf_plan.atoms())
        plan_atoms.push_back({a.x, a.y, a.z, node.theta * a.w});
    ledger.push_back(std::move(entry));
}

} // namespace

template <class S>
DecomposeReport<S> solve_decomposed(const DiscreteMeasure<S>& mu, const DiscreteMeasure<S>& nu,
                                    const Tolerances& tol) {
    DecomposeReport<S> report;
    report.root = decompose(mu, nu, tol);
    std::vector<PlanAtom<S>> plan_atoms;
    report.total_cost = S(0);
    solve_leaf(report.root, tol, plan_atoms, report.ledger, report.total_cost);
    report.plan = ThreePlan<S>(mu.dim(), std::move(plan_atoms), tol);
    return report;
}

// ---------------------------------------------------------------------------

template std::vector<LeafNode<double>> partition_by_leaf(const DiscreteMeasure<double>&,
                                                         const DiscreteMeasure<double>&,
                                                         const SubspacePair<double>&,
                                                         const Tolerances&);
template std::vector<LeafNode<Rational>> partition_by_leaf(const DiscreteMeasure<Rational>&,
                                                           const DiscreteMeasure<Rational>&,
                                                           const SubspacePair<Rational>&,
                                                           const Tolerances&);

template LeafNode<double> refine(LeafNode<double>, const Tolerances&);
template LeafNode<Rational> refine(LeafNode<Rational>, const Tolerances&);

template LeafNode<double> decompose(const DiscreteMeasure<double>&, const DiscreteMeasure<double>&,
                                    const Tolerances&);
template LeafNode<Rational> decompose(const DiscreteMeasure<Rational>&,
                                      const DiscreteMeasure<Rational>&, const Tolerances&);

template DecomposeReport<double> solve_decomposed(const DiscreteMeasure<double>&,
                                                  const DiscreteMeasure<double>&,
                                                  const Tolerances&);
template DecomposeReport<Rational> solve_decomposed(const DiscreteMeasure<Rational>&,
                                                    const DiscreteMeasure<Rational>&,
                                                    const Tolerances&);

} // namespace bimart
