#include "bimart/instance.hpp"

#include <algorithm>
#include <array>

namespace bimart {

template <class S>
std::pair<DiscreteMeasure<S>, DiscreteMeasure<S>> degenerate_covariance_instance() {
    using P = Point<S>;
    DiscreteMeasure<S> mu(2, {{P({S(0), S(1)}), S(1) / S(2)},
                              {P({S(-1), S(-1)}), S(1) / S(4)},
                              {P({S(1), S(-1)}), S(1) / S(4)}});
    DiscreteMeasure<S> nu(2, {{P({S(-1), S(-1)}), S(1) / S(4)},
                              {P({S(1), S(-1)}), S(1) / S(4)},
                              {P({S(-1), S(1)}), S(1) / S(4)},
                              {P({S(1), S(1)}), S(1) / S(4)}});
    return {std::move(mu), std::move(nu)};
}

template <class S>
Coupling<S> counterexample_coupling() {
    using P = Point<S>;
    return Coupling<S>(2, {{P({S(0), S(1)}), P({S(-1), S(1)}), S(1) / S(2)},
                           {P({S(0), S(-1)}), P({S(1), S(-1)}), S(1) / S(2)}});
}

template <class S>
SubspacePair<S> counterexample_pair() {
    using P = Point<S>;
    return make_subspace_pair<S>(2, {P({S(1), S(0)})}, {P({S(0), S(1)})});
}

template std::pair<DiscreteMeasure<double>, DiscreteMeasure<double>>
degenerate_covariance_instance();
template std::pair<DiscreteMeasure<Rational>, DiscreteMeasure<Rational>>
degenerate_covariance_instance();
template Coupling<double> counterexample_coupling();
template Coupling<Rational> counterexample_coupling();
template SubspacePair<double> counterexample_pair();
template SubspacePair<Rational> counterexample_pair();

// ---------------------------------------------------------------------------
// Generators
// ---------------------------------------------------------------------------

namespace {

using R = Rational;

int pick(std::mt19937& rng, int lo, int hi) {
    std::uniform_int_distribution<int> d(lo, hi);
    return d(rng);
}

// one block-local coupling atom list: (source coords, destination coords, w)
struct BlockAtom {
    std::vector<R> src, dst;
    R w;
};

// exact martingale coupling on a d-dimensional integer lattice: per source
// point, stay put, split symmetrically, or split with asymmetric exact odds
std::vector<BlockAtom> block_martingale(std::mt19937& rng, int d, int max_sources) {
    std::vector<BlockAtom> atoms;
    if (d == 0) {
        atoms.push_back({{}, {}, R(1)});
        return atoms;
    }
    const int sources = pick(rng, 1, max_sources);
    std::vector<R> weights(sources);
    R wsum(0);
    for (int s = 0; s < sources; ++s) {
        weights[s] = R(pick(rng, 1, 4));
        wsum += weights[s];
    }
    for (int s = 0; s < sources; ++s) {
        std::vector<R> x(d);
        for (auto& c : x) c = R(pick(rng, -2, 2));
        const R w = weights[s] / wsum;
        const int kind = pick(rng, 0, 2);
        std::vector<R> dir(d);
        bool nonzero = false;
        for (auto& c : dir) {
            c = R(pick(rng, -2, 2));
            nonzero = nonzero || c != 0;
        }
        if (kind == 0 || !nonzero) {
            atoms.push_back({x, x, w});
            continue;
        }
        auto shifted = [&](const R& t) {
            std::vector<R> y(d);
            for (int i = 0; i < d; ++i) y[i] = x[i] + t * dir[i];
            return y;
        };
        if (kind == 1) {
            atoms.push_back({x, shifted(R(1)), w / R(2)});
            atoms.push_back({x, shifted(R(-1)), w / R(2)});
        } else {
            const R a(pick(rng, 1, 2)), b(pick(rng, 1, 2));
            atoms.push_back({x, shifted(-a), w * b / (a + b)});
            atoms.push_back({x, shifted(b), w * a / (a + b)});
        }
    }
    return atoms;
}

Point<R> embed(const std::vector<int>& axes, const std::vector<R>& coords, Point<R> base) {
    for (std::size_t i = 0; i < axes.size(); ++i) base[axes[i]] = coords[i];
    return base;
}

// exact rotation in the (i, j) coordinate plane by a Pythagorean angle
void rotate_point(Point<R>& p, int i, int j, const R& c, const R& s) {
    const R a = p[i], b = p[j];
    p[i] = c * a - s * b;
    p[j] = s * a + c * b;
}

ForwardInstance build_forward_once(std::mt19937& rng, int max_dim) {
    const int n = pick(rng, 1, max_dim);
    std::vector<int> v1_axes, v2_axes, k_axes;
    while (v1_axes.empty() && v2_axes.empty()) {
        v1_axes.clear();
        v2_axes.clear();
        k_axes.clear();
        for (int i = 0; i < n; ++i) {
            switch (pick(rng, 0, 2)) {
            case 0: v1_axes.push_back(i); break;
            case 1: v2_axes.push_back(i); break;
            default: k_axes.push_back(i); break;
            }
        }
    }
    const bool both_blocks = !v1_axes.empty() && !v2_axes.empty();
    const int max_sources = both_blocks ? 1 : 2;
    const int leaves = k_axes.empty() ? 1 : pick(rng, 1, 2);

    std::vector<CouplingAtom<R>> atoms;
    R true_cost(0);
    for (int leaf = 0; leaf < leaves; ++leaf) {
        Point<R> base(n);
        for (int axis : k_axes) base[axis] = R(2 * leaf) + R(pick(rng, -1, 1));
        const R theta = leaves == 1 ? R(1) : R(1) / R(leaves);
        const auto pi1 = block_martingale(rng, static_cast<int>(v1_axes.size()), max_sources);
        const auto pi2 = block_martingale(rng, static_cast<int>(v2_axes.size()), max_sources);
        for (const auto& a1 : pi1)
            for (const auto& a2 : pi2) {
                // V2 block runs backward: its source lives on the y side
                const Point<R> x = embed(v2_axes, a2.dst, embed(v1_axes, a1.src, base));
                const Point<R> y = embed(v2_axes, a2.src, embed(v1_axes, a1.dst, base));
                const R w = theta * a1.w * a2.w;
                R c(0);
                for (std::size_t i = 0; i < a1.src.size(); ++i) {
                    const R diff = a1.dst[i] - a1.src[i];
                    c += diff * diff;
                }
                for (std::size_t i = 0; i < a2.src.size(); ++i) {
                    const R diff = a2.dst[i] - a2.src[i];
                    c += diff * diff;
                }
                true_cost += w * c / R(2);
                atoms.push_back({x, y, w});
            }
    }

    std::vector<Point<R>> basis1, basis2;
    for (int axis : v1_axes) {
        Point<R> e(n);
        e[axis] = R(1);
        basis1.push_back(std::move(e));
    }
    for (int axis : v2_axes) {
        Point<R> e(n);
        e[axis] = R(1);
        basis2.push_back(std::move(e));
    }

    // optional exact rotation so spectra are not axis-aligned
    if (n >= 2 && pick(rng, 0, 1) == 1) {
        const int i = pick(rng, 0, n - 2);
        const int j = pick(rng, i + 1, n - 1);
        const bool small = pick(rng, 0, 1) == 0;
        const R c = small ? R(3) / R(5) : R(5) / R(13);
        const R s = small ? R(4) / R(5) : R(12) / R(13);
        for (auto& a : atoms) {
            rotate_point(a.x, i, j, c, s);
            rotate_point(a.y, i, j, c, s);
        }
        for (auto& b : basis1) rotate_point(b, i, j, c, s);
        for (auto& b : basis2) rotate_point(b, i, j, c, s);
    }

    ForwardInstance inst;
    inst.pi = Coupling<R>(n, std::move(atoms));
    inst.mu = inst.pi.first_marginal();
    inst.nu = inst.pi.second_marginal();
    inst.pair = make_subspace_pair<R>(n, basis1, basis2);
    inst.true_cost = true_cost;
    return inst;
}

} // namespace

ForwardInstance generate_forward_instance(std::mt19937& rng, int max_dim, int max_atoms) {
    for (int attempt = 0; attempt < 64; ++attempt) {
        ForwardInstance inst = build_forward_once(rng, max_dim);
        if (static_cast<int>(inst.mu.atoms().size()) <= max_atoms &&
            static_cast<int>(inst.nu.atoms().size()) <= max_atoms)
            return inst;
    }
    // deterministic minimal fallback: delta_0 split to +-1 along axis 0
    std::vector<CouplingAtom<R>> atoms;
    Point<R> o(1), l(1), r(1);
    l[0] = R(-1);
    r[0] = R(1);
    atoms.push_back({o, l, R(1) / R(2)});
    atoms.push_back({o, r, R(1) / R(2)});
    ForwardInstance inst;
    inst.pi = Coupling<R>(1, std::move(atoms));
    inst.mu = inst.pi.first_marginal();
    inst.nu = inst.pi.second_marginal();
    Point<R> e(1);
    e[0] = R(1);
    inst.pair = make_subspace_pair<R>(1, {e}, {});
    inst.true_cost = R(1) / R(2);
    return inst;
}

std::pair<DiscreteMeasure<Rational>, DiscreteMeasure<Rational>>
generate_merge_instance(std::mt19937& rng, int max_dim, int max_atoms) {
    const int n = pick(rng, 1, max_dim);
    const int m = pick(rng, 2, std::max(2, max_atoms));
    std::vector<WeightedAtom<R>> nu_atoms(m);
    R mass(0);
    for (auto& a : nu_atoms) {
        a.x = Point<R>(n);
        for (int i = 0; i < n; ++i) a.x[i] = R(pick(rng, -3, 3));
        a.w = R(pick(rng, 1, 4));
        mass += a.w;
    }
    for (auto& a : nu_atoms) a.w /= mass;
    DiscreteMeasure<R> nu(n, nu_atoms);

    const int groups = pick(rng, 1, std::max(1, m / 2));
    std::vector<std::vector<WeightedAtom<R>>> buckets(groups);
    for (const auto& a : nu.atoms()) buckets[pick(rng, 0, groups - 1)].push_back(a);
    std::vector<WeightedAtom<R>> mu_atoms;
    for (const auto& bucket : buckets) {
        if (bucket.empty()) continue;
        Point<R> b(n);
        R w(0);
        for (const auto& a : bucket) {
            b += a.w * a.x;
            w += a.w;
        }
        mu_atoms.push_back({b * (R(1) / w), w});
    }
    return {DiscreteMeasure<R>(n, std::move(mu_atoms)), std::move(nu)};
}

DiscreteMeasure<Rational> generate_random_measure(std::mt19937& rng, int dim, int atoms,
                                                  bool centered) {
    std::vector<WeightedAtom<R>> ws(atoms);
    R mass(0);
    for (auto& a : ws) {
        a.x = Point<R>(dim);
        for (int i = 0; i < dim; ++i)
            a.x[i] = R(pick(rng, -6, 6)) / R(pick(rng, 1, 3));
        a.w = R(pick(rng, 1, 5));
        mass += a.w;
    }
    for (auto& a : ws) a.w /= mass;
    DiscreteMeasure<R> m(dim, std::move(ws));
    if (!centered) return m;
    const Point<R> b = barycenter(m);
    std::vector<WeightedAtom<R>> shifted;
    for (const auto& a : m.atoms()) shifted.push_back({a.x - b, a.w});
    return DiscreteMeasure<R>(dim, std::move(shifted));
}

// ---------------------------------------------------------------------------
// Conversions
// ---------------------------------------------------------------------------

Point<double> to_float(const Point<Rational>& p) {
    Point<double> out(p.dim());
    for (int i = 0; i < p.dim(); ++i) out[i] = to_double(p[i]);
    return out;
}

DiscreteMeasure<double> to_float(const DiscreteMeasure<Rational>& m) {
    std::vector<WeightedAtom<double>> atoms;
    atoms.reserve(m.atoms().size());
    for (const auto& a : m.atoms()) atoms.push_back({to_float(a.x), to_double(a.w)});
    return DiscreteMeasure<double>(m.dim(), std::move(atoms));
}

Coupling<double> to_float(const Coupling<Rational>& pi) {
    std::vector<CouplingAtom<double>> atoms;
    atoms.reserve(pi.atoms().size());
    for (const auto& a : pi.atoms())
        atoms.push_back({to_float(a.x), to_float(a.y), to_double(a.w)});
    return Coupling<double>(pi.dim(), std::move(atoms));
}

SubspacePair<double> to_float(const SubspacePair<Rational>& pair) {
    std::vector<Point<double>> b1, b2;
    for (const auto& b : pair.basis1) b1.push_back(to_float(b));
    for (const auto& b : pair.basis2) b2.push_back(to_float(b));
    return make_subspace_pair<double>(pair.dim, b1, b2);
}

} // namespace bimart
