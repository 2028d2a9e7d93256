#pragma once

// ============================================================================
// Spectral toolkit: Jacobi eigendecomposition, signed invariant-subspace
// extraction, orthogonal projections, Schatten-1 norm.
//
// Eigenvalue work always runs in double (cyclic Jacobi), in both numeric
// modes.  In rational mode the float eigenvectors are snapped back to exact
// rationals and re-verified against the matrix (definiteness of the
// restrictions, invariance of the spans); the kernel is recomputed exactly
// as a rational null space.  When every check passes the subspace pair is
// flagged exact_split and all downstream projections are exact arithmetic.
// ============================================================================

#include "bimart/geometry.hpp"

#include <optional>
#include <vector>

namespace bimart {

struct EigenDecomposition {
    std::vector<double> values;        // descending
    std::vector<Point<double>> vectors; // orthonormal, vectors[k] pairs with values[k]
};

// Pair of orthogonal subspaces (V1, V2) plus the leftover kernel directions.
// Bases are orthonormal in float mode; in rational mode they are exactly
// orthogonal with rational (generally non-unit) norms, because unit
// normalization would leave the rational world.  Projections never need unit
// norms: P x = sum_b b (b.x)/(b.b).
template <class S>
struct SubspacePair {
    int dim = 0;
    std::vector<Point<S>> basis1;
    std::vector<Point<S>> basis2;
    std::vector<Point<S>> kernel;
    bool exact_split = true;   // rational mode: spans verified invariant + definite
    double spectral_gap = 0.0; // min |lambda| over non-kernel eigenvalues (float estimate)

    [[nodiscard]] int dim1() const { return static_cast<int>(basis1.size()); }
    [[nodiscard]] int dim2() const { return static_cast<int>(basis2.size()); }
    [[nodiscard]] bool complementing() const { return dim1() + dim2() == dim; }

    [[nodiscard]] Point<S> project1(const Point<S>& x) const;
    [[nodiscard]] Point<S> project2(const Point<S>& x) const;
    [[nodiscard]] Point<S> project_kernel(const Point<S>& x) const;

    [[nodiscard]] SymmetricMatrix<S> projection_matrix1() const;
    [[nodiscard]] SymmetricMatrix<S> projection_matrix2() const;
};

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

// Cyclic Jacobi; converges when the off-diagonal Frobenius mass drops below
// jacobi_off relative to the input's scale.  Deterministic: fixed sweep
// order, eigenvalues sorted descending with index-order tie-breaking, each
// eigenvector's sign fixed so its largest-magnitude entry is positive.
EigenDecomposition eigendecompose(const SymmetricMatrix<double>& m, const Tolerances& tol = {});

template <class S>
EigenDecomposition eigendecompose(const SymmetricMatrix<S>& m, const Tolerances& tol = {}) {
    return eigendecompose(to_double_matrix(m), tol);
}

// V1 = span of eigenvectors with lambda > tol, V2 = span with lambda < -tol,
// kernel = the rest.  When `tol` is absent it defaults to
// split_rel * schatten1(M).  See split notes at the top of the file for the
// rational-mode exactness story.
template <class S>
SubspacePair<S> split_subspaces(const SymmetricMatrix<S>& m,
                                std::optional<double> tol = std::nullopt,
                                const Tolerances& tols = {});
template <>
SubspacePair<double> split_subspaces(const SymmetricMatrix<double>&, std::optional<double>,
                                     const Tolerances&);
template <>
SubspacePair<Rational> split_subspaces(const SymmetricMatrix<Rational>&, std::optional<double>,
                                       const Tolerances&);

// Sum of absolute eigenvalues.  Rational mode returns the exact value
// tr(M|V1) - tr(M|V2) whenever the signed split verifies exactly, and the
// float estimate (converted) otherwise.
template <class S> S schatten1(const SymmetricMatrix<S>& m, const Tolerances& tol = {});
template <> double schatten1(const SymmetricMatrix<double>&, const Tolerances&);
template <> Rational schatten1(const SymmetricMatrix<Rational>&, const Tolerances&);

template <class S>
Point<S> project(const SubspacePair<S>& pair, int which, const Point<S>& x);

// Build a pair from user-supplied spanning vectors.  Each family is
// orthogonalized (dependent vectors reduced away); the two families must be
// mutually orthogonal.  Kernel = orthogonal complement of V1 + V2.
template <class S>
SubspacePair<S> make_subspace_pair(int dim,
                                   const std::vector<Point<S>>& span1,
                                   const std::vector<Point<S>>& span2,
                                   const Tolerances& tol = {});

// (V1, V2) = (R^n, {0}); turns bimartingale machinery into plain martingale.
template <class S> SubspacePair<S> full_space_pair(int dim);

// ---------------------------------------------------------------------------
// Exact-linear-algebra helpers shared with other modules
// ---------------------------------------------------------------------------

// Orthogonalize in order, dropping vectors that fall into the span of the
// previous ones.  Exact in rational mode; unit-normalized in float mode.
template <class S>
std::vector<Point<S>> gram_schmidt(const std::vector<Point<S>>& vs, const Tolerances& tol = {});

// Basis of the null space of M (exact in rational mode), orthogonalized.
template <class S>
std::vector<Point<S>> null_space(const SymmetricMatrix<S>& m, const Tolerances& tol = {});

// Orthogonal complement of span(vs) in R^dim.
template <class S>
std::vector<Point<S>> orthogonal_complement(int dim, const std::vector<Point<S>>& vs,
                                            const Tolerances& tol = {});

// Trace of M restricted to the span of an orthogonal basis.
template <class S>
S restricted_trace(const SymmetricMatrix<S>& m, const std::vector<Point<S>>& basis);

} // namespace bimart
