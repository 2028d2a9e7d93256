#include "bimart/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace bimart {

// ===========================================================================
// Jacobi eigendecomposition (double precision, both modes)
// ===========================================================================

EigenDecomposition eigendecompose(const SymmetricMatrix<double>& m, const Tolerances& tol) {
    const int n = m.dim();
    std::vector<std::vector<double>> a(n, std::vector<double>(n));
    std::vector<std::vector<double>> v(n, std::vector<double>(n, 0.0));
    double fro = 0.0;
    for (int i = 0; i < n; ++i) {
        v[i][i] = 1.0;
        for (int j = 0; j < n; ++j) {
            a[i][j] = m.at(i, j);
            fro += a[i][j] * a[i][j];
        }
    }
    fro = std::sqrt(fro);
    const double threshold = tol.jacobi_off * std::max(1.0, fro);

    auto off_diag = [&] {
        double s = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) s += 2.0 * a[i][j] * a[i][j];
        return std::sqrt(s);
    };

    for (int sweep = 0; sweep < 128 && off_diag() > threshold; ++sweep) {
        for (int p = 0; p < n - 1; ++p) {
            for (int q = p + 1; q < n; ++q) {
                if (std::fabs(a[p][q]) <= threshold / (n * n)) continue;
                const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                const double t = (theta >= 0 ? 1.0 : -1.0) /
                                 (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (int k = 0; k < n; ++k) { // rotate rows/cols p and q
                    const double akp = a[k][p], akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for (int k = 0; k < n; ++k) {
                    const double apk = a[p][k], aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for (int k = 0; k < n; ++k) {
                    const double vkp = v[k][p], vkq = v[k][q];
                    v[k][p] = c * vkp - s * vkq;
                    v[k][q] = s * vkp + c * vkq;
                }
            }
        }
    }

    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int i, int j) { return a[i][i] > a[j][j]; });

    EigenDecomposition out;
    out.values.reserve(n);
    out.vectors.reserve(n);
    for (int rank = 0; rank < n; ++rank) {
        const int k = order[rank];
        out.values.push_back(a[k][k]);
        Point<double> vec(n);
        for (int i = 0; i < n; ++i) vec[i] = v[i][k];
        int lead = 0; // sign convention: largest-magnitude entry positive
        for (int i = 1; i < n; ++i)
            if (std::fabs(vec[i]) > std::fabs(vec[lead])) lead = i;
        if (vec[lead] < 0) vec *= -1.0;
        out.vectors.push_back(std::move(vec));
    }
    return out;
}

// ===========================================================================
// Exact / tolerant linear-algebra helpers
// ===========================================================================

namespace {

template <class S> bool negligible(const S& v, double floor_) {
    if constexpr (scalar_traits<S>::exact) {
        (void)floor_;
        return v == 0;
    } else {
        return std::fabs(to_double(v)) <= floor_;
    }
}

// component of x orthogonal to an orthogonal family
template <class S>
Point<S> reduce_against(Point<S> x, const std::vector<Point<S>>& basis) {
    for (const auto& b : basis) {
        S nb = norm_sq(b);
        if (nb == S(0)) continue;
        x -= (dot(b, x) / nb) * b;
    }
    return x;
}

} // namespace

template <class S>
std::vector<Point<S>> gram_schmidt(const std::vector<Point<S>>& vs, const Tolerances& tol) {
    std::vector<Point<S>> basis;
    for (const auto& v : vs) {
        Point<S> w = reduce_against(v, basis);
        const double floor_ = tol.float_zero * std::max(1.0, std::sqrt(std::fabs(to_double(norm_sq(v)))));
        if (negligible(norm_sq(w), floor_ * floor_)) continue;
        if constexpr (!scalar_traits<S>::exact) {
            const double len = std::sqrt(to_double(norm_sq(w)));
            w *= S(1.0 / len);
        }
        basis.push_back(std::move(w));
    }
    return basis;
}

template <class S>
std::vector<Point<S>> null_space(const SymmetricMatrix<S>& m, const Tolerances& tol) {
    const int n = m.dim();
    std::vector<std::vector<S>> rows(n, std::vector<S>(n));
    double scale = 1.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            rows[i][j] = m.at(i, j);
            scale = std::max(scale, std::fabs(to_double(m.at(i, j))));
        }

    // reduced row echelon form with exact pivots (rational) or largest-pivot
    // selection (float)
    std::vector<int> pivot_col;
    int rank = 0;
    for (int col = 0; col < n && rank < n; ++col) {
        int pivot = -1;
        if constexpr (scalar_traits<S>::exact) {
            for (int r = rank; r < n; ++r)
                if (rows[r][col] != 0) { pivot = r; break; }
        } else {
            double best = tol.float_zero * scale;
            for (int r = rank; r < n; ++r)
                if (std::fabs(to_double(rows[r][col])) > best) {
                    best = std::fabs(to_double(rows[r][col]));
                    pivot = r;
                }
        }
        if (pivot < 0) continue;
        std::swap(rows[rank], rows[pivot]);
        const S inv = S(1) / rows[rank][col];
        for (int j = 0; j < n; ++j) rows[rank][j] *= inv;
        for (int r = 0; r < n; ++r) {
            if (r == rank || rows[r][col] == S(0)) continue;
            const S f = rows[r][col];
            for (int j = 0; j < n; ++j) rows[r][j] -= f * rows[rank][j];
        }
        pivot_col.push_back(col);
        ++rank;
    }

    std::vector<Point<S>> kernel;
    for (int col = 0; col < n; ++col) {
        if (std::find(pivot_col.begin(), pivot_col.end(), col) != pivot_col.end()) continue;
        Point<S> v(n);
        v[col] = S(1);
        for (int r = 0; r < rank; ++r) v[pivot_col[r]] = S(0) - rows[r][col];
        kernel.push_back(std::move(v));
    }
    return gram_schmidt(kernel, tol);
}

template <class S>
std::vector<Point<S>> orthogonal_complement(int dim, const std::vector<Point<S>>& vs,
                                            const Tolerances& tol) {
    std::vector<Point<S>> prefix = gram_schmidt(vs, tol);
    const size_t fixed = prefix.size();
    for (int i = 0; i < dim; ++i) {
        Point<S> e(dim);
        e[i] = S(1);
        Point<S> w = reduce_against(e, prefix);
        if (negligible(norm_sq(w), tol.float_zero * tol.float_zero)) continue;
        if constexpr (!scalar_traits<S>::exact) {
            const double len = std::sqrt(to_double(norm_sq(w)));
            w *= S(1.0 / len);
        }
        prefix.push_back(std::move(w));
    }
    return std::vector<Point<S>>(prefix.begin() + fixed, prefix.end());
}

template <class S>
S restricted_trace(const SymmetricMatrix<S>& m, const std::vector<Point<S>>& basis) {
    S acc(0);
    for (const auto& b : basis) acc += dot(b, m.apply(b)) / norm_sq(b);
    return acc;
}

// ===========================================================================
// SubspacePair projections
// ===========================================================================

namespace {

template <class S>
Point<S> project_onto(const std::vector<Point<S>>& basis, const Point<S>& x, int dim) {
    Point<S> out(dim);
    for (const auto& b : basis) out += (dot(b, x) / norm_sq(b)) * b;
    return out;
}

template <class S>
SymmetricMatrix<S> projection_matrix(const std::vector<Point<S>>& basis, int dim) {
    SymmetricMatrix<S> p(dim);
    for (const auto& b : basis) p.add_outer(b, S(1) / norm_sq(b));
    return p;
}

} // namespace

template <class S> Point<S> SubspacePair<S>::project1(const Point<S>& x) const {
    return project_onto(basis1, x, dim);
}
template <class S> Point<S> SubspacePair<S>::project2(const Point<S>& x) const {
    return project_onto(basis2, x, dim);
}
template <class S> Point<S> SubspacePair<S>::project_kernel(const Point<S>& x) const {
    return x - project1(x) - project2(x);
}
template <class S> SymmetricMatrix<S> SubspacePair<S>::projection_matrix1() const {
    return projection_matrix(basis1, dim);
}
template <class S> SymmetricMatrix<S> SubspacePair<S>::projection_matrix2() const {
    return projection_matrix(basis2, dim);
}

template <class S> Point<S> project(const SubspacePair<S>& pair, int which, const Point<S>& x) {
    if (x.dim() != pair.dim) throw input_error("project: point dimension mismatch");
    if (which == 1) return pair.project1(x);
    if (which == 2) return pair.project2(x);
    throw input_error("project: subspace selector must be 1 or 2");
}

// ===========================================================================
// split_subspaces
// ===========================================================================

namespace {

// positive-definiteness of the (symmetric) Gram-style matrix B^T M B via
// elimination pivots: PD <=> all leading pivots > 0 (exact in rational mode)
template <class S>
bool restriction_positive_definite(const SymmetricMatrix<S>& m, const std::vector<Point<S>>& basis,
                                   bool negate) {
    const int k = static_cast<int>(basis.size());
    if (k == 0) return true;
    std::vector<std::vector<S>> g(k, std::vector<S>(k));
    for (int i = 0; i < k; ++i) {
        Point<S> mb = m.apply(basis[i]);
        if (negate) mb *= S(-1);
        for (int j = 0; j < k; ++j) g[j][i] = dot(basis[j], mb);
    }
    for (int step = 0; step < k; ++step) {
        if (!(g[step][step] > S(0))) return false;
        for (int r = step + 1; r < k; ++r) {
            const S f = g[r][step] / g[step][step];
            for (int c = step; c < k; ++c) g[r][c] -= f * g[step][c];
        }
    }
    return true;
}

// is span(basis) invariant under M?  (exact check; rational mode only)
template <class S>
bool span_invariant(const SymmetricMatrix<S>& m, const std::vector<Point<S>>& basis) {
    for (const auto& b : basis) {
        Point<S> mb = m.apply(b);
        Point<S> residual = mb - project_onto(basis, mb, m.dim());
        for (int i = 0; i < m.dim(); ++i)
            if (residual[i] != S(0)) return false;
    }
    return true;
}

Point<Rational> snap_point(const Point<double>& v, double tol) {
    Point<Rational> out(v.dim());
    for (int i = 0; i < v.dim(); ++i) out[i] = rational_snap(v[i], tol);
    return out;
}

} // namespace

template <>
SubspacePair<double> split_subspaces(const SymmetricMatrix<double>& m, std::optional<double> tol,
                                     const Tolerances& tols) {
    const auto eig = eigendecompose(m, tols);
    double sch = 0.0;
    for (double l : eig.values) sch += std::fabs(l);
    const double cut = tol.value_or(tols.split_rel * sch);
    if (cut <= 0 && tol.has_value()) throw input_error("split_subspaces: tol must be positive");

    SubspacePair<double> pair;
    pair.dim = m.dim();
    pair.exact_split = false; // float mode: verification not meaningful
    double gap = 0.0;
    for (size_t k = 0; k < eig.values.size(); ++k) {
        const double l = eig.values[k];
        if (l > cut) pair.basis1.push_back(eig.vectors[k]);
        else if (l < -cut) pair.basis2.push_back(eig.vectors[k]);
        else { pair.kernel.push_back(eig.vectors[k]); continue; }
        gap = (gap == 0.0) ? std::fabs(l) : std::min(gap, std::fabs(l));
    }
    pair.spectral_gap = gap;
    return pair;
}

template <>
SubspacePair<Rational> split_subspaces(const SymmetricMatrix<Rational>& m, std::optional<double> tol,
                                       const Tolerances& tols) {
    const auto eig = eigendecompose(m, tols);
    double sch = 0.0;
    for (double l : eig.values) sch += std::fabs(l);
    const double cut = tol.value_or(tols.split_rel * sch);
    if (cut <= 0 && tol.has_value()) throw input_error("split_subspaces: tol must be positive");

    std::vector<Point<double>> pos, neg, ker;
    double gap = 0.0;
    for (size_t k = 0; k < eig.values.size(); ++k) {
        const double l = eig.values[k];
        if (l > cut) pos.push_back(eig.vectors[k]);
        else if (l < -cut) neg.push_back(eig.vectors[k]);
        else { ker.push_back(eig.vectors[k]); continue; }
        gap = (gap == 0.0) ? std::fabs(l) : std::min(gap, std::fabs(l));
    }

    SubspacePair<Rational> pair;
    pair.dim = m.dim();
    pair.spectral_gap = gap;

    // Exact kernel.  If the float grouping saw more near-zero eigenvalues
    // than the matrix has exact null directions, the extras are genuinely
    // tiny-but-nonzero: honor the tolerance by padding the kernel with
    // snapped eigenvectors, but the split is no longer exact.
    std::vector<Point<Rational>> kernel_exact = null_space(m, tols);
    bool kernel_is_exact = kernel_exact.size() == ker.size();
    pair.kernel = kernel_exact;
    if (!kernel_is_exact) {
        for (const auto& kv : ker) {
            Point<Rational> cand = reduce_against(snap_point(kv, 1e-12), pair.kernel);
            if (norm_sq(cand) != Rational(0)) pair.kernel.push_back(std::move(cand));
        }
    }

    // One-signed spectra: the signed subspace is exactly the orthogonal
    // complement of the kernel — no eigenvector snapping needed.
    if (kernel_is_exact && neg.empty()) {
        pair.basis1 = orthogonal_complement(pair.dim, pair.kernel, tols);
        pair.exact_split = static_cast<int>(pair.basis1.size()) == static_cast<int>(pos.size()) &&
                           restriction_positive_definite(m, pair.basis1, false);
        return pair;
    }
    if (kernel_is_exact && pos.empty()) {
        pair.basis2 = orthogonal_complement(pair.dim, pair.kernel, tols);
        pair.exact_split = static_cast<int>(pair.basis2.size()) == static_cast<int>(neg.size()) &&
                           restriction_positive_definite(m, pair.basis2, true);
        return pair;
    }

    // Mixed signs: snap the float eigenvectors to rationals at increasing
    // coarseness, orthogonalize exactly, and re-verify against M.  The first
    // candidate that verifies wins; otherwise keep the finest snap and flag
    // the split as inexact.
    const double snap_levels[] = {1e-12, 1e-9, 1e-6, 0.0};
    std::vector<Point<Rational>> best1, best2;
    for (double snap : snap_levels) {
        std::vector<Point<Rational>> b1, b2;
        for (const auto& v : pos) {
            Point<Rational> w = reduce_against(reduce_against(snap_point(v, snap), pair.kernel), b1);
            if (norm_sq(w) != Rational(0)) b1.push_back(std::move(w));
        }
        for (const auto& v : neg) {
            Point<Rational> w = reduce_against(
                reduce_against(reduce_against(snap_point(v, snap), pair.kernel), b1), b2);
            if (norm_sq(w) != Rational(0)) b2.push_back(std::move(w));
        }
        if (best1.empty() && best2.empty()) { best1 = b1; best2 = b2; }
        if (b1.size() != pos.size() || b2.size() != neg.size()) continue;
        if (restriction_positive_definite(m, b1, false) &&
            restriction_positive_definite(m, b2, true) && span_invariant(m, b1) &&
            span_invariant(m, b2)) {
            pair.basis1 = std::move(b1);
            pair.basis2 = std::move(b2);
            pair.exact_split = kernel_is_exact;
            return pair;
        }
        best1 = std::move(b1);
        best2 = std::move(b2);
    }
    pair.basis1 = std::move(best1);
    pair.basis2 = std::move(best2);
    pair.exact_split = false;
    return pair;
}

// ===========================================================================
// schatten1
// ===========================================================================

template <> double schatten1(const SymmetricMatrix<double>& m, const Tolerances& tol) {
    double acc = 0.0;
    for (double l : eigendecompose(m, tol).values) acc += std::fabs(l);
    return acc;
}

template <> Rational schatten1(const SymmetricMatrix<Rational>& m, const Tolerances& tol) {
    SubspacePair<Rational> pair = split_subspaces(m, std::nullopt, tol);
    if (pair.exact_split)
        return restricted_trace(m, pair.basis1) - restricted_trace(m, pair.basis2);
    double acc = 0.0;
    for (double l : eigendecompose(m, tol).values) acc += std::fabs(l);
    return rational_from_double(acc);
}

// ===========================================================================
// pair construction
// ===========================================================================

template <class S>
SubspacePair<S> make_subspace_pair(int dim, const std::vector<Point<S>>& span1,
                                   const std::vector<Point<S>>& span2, const Tolerances& tol) {
    for (const auto& v : span1)
        if (v.dim() != dim) throw input_error("subspace vector dimension mismatch");
    for (const auto& v : span2)
        if (v.dim() != dim) throw input_error("subspace vector dimension mismatch");

    SubspacePair<S> pair;
    pair.dim = dim;
    pair.basis1 = gram_schmidt(span1, tol);
    pair.basis2 = gram_schmidt(span2, tol);
    for (const auto& a : pair.basis1)
        for (const auto& b : pair.basis2)
            if (!scalar_traits<S>::is_zero(dot(a, b), tol))
                throw input_error("subspaces V1 and V2 are not orthogonal");
    std::vector<Point<S>> joint = pair.basis1;
    joint.insert(joint.end(), pair.basis2.begin(), pair.basis2.end());
    pair.kernel = orthogonal_complement(dim, joint, tol);
    return pair;
}

template <class S> SubspacePair<S> full_space_pair(int dim) {
    SubspacePair<S> pair;
    pair.dim = dim;
    for (int i = 0; i < dim; ++i) {
        Point<S> e(dim);
        e[i] = S(1);
        pair.basis1.push_back(std::move(e));
    }
    return pair;
}

// ===========================================================================
// explicit instantiations
// ===========================================================================

template struct SubspacePair<double>;
template struct SubspacePair<Rational>;
template Point<double> project(const SubspacePair<double>&, int, const Point<double>&);
template Point<Rational> project(const SubspacePair<Rational>&, int, const Point<Rational>&);
template std::vector<Point<double>> gram_schmidt(const std::vector<Point<double>>&, const Tolerances&);
template std::vector<Point<Rational>> gram_schmidt(const std::vector<Point<Rational>>&, const Tolerances&);
template std::vector<Point<double>> null_space(const SymmetricMatrix<double>&, const Tolerances&);
template std::vector<Point<Rational>> null_space(const SymmetricMatrix<Rational>&, const Tolerances&);
template std::vector<Point<double>> orthogonal_complement(int, const std::vector<Point<double>>&, const Tolerances&);
template std::vector<Point<Rational>> orthogonal_complement(int, const std::vector<Point<Rational>>&, const Tolerances&);
template double restricted_trace(const SymmetricMatrix<double>&, const std::vector<Point<double>>&);
template Rational restricted_trace(const SymmetricMatrix<Rational>&, const std::vector<Point<Rational>>&);
template SubspacePair<double> make_subspace_pair(int, const std::vector<Point<double>>&, const std::vector<Point<double>>&, const Tolerances&);
template SubspacePair<Rational> make_subspace_pair(int, const std::vector<Point<Rational>>&, const std::vector<Point<Rational>>&, const Tolerances&);
template SubspacePair<double> full_space_pair(int);
template SubspacePair<Rational> full_space_pair(int);

} // namespace bimart
