#pragma once

// Discrete measures on R^n: finitely many weighted atoms, canonicalized so
// that equal measures have equal representations (atoms sorted, duplicates
// merged, zero weights dropped).

#include "bimart/geometry.hpp"

#include <optional>
#include <vector>

namespace bimart {

template <class S>
struct WeightedAtom {
    Point<S> x;
    S w;
};

template <class S>
class DiscreteMeasure {
public:
    DiscreteMeasure() = default;

    // Canonicalizes: sorts atoms lexicographically, merges duplicates
    // (exact coordinates in rational mode, distance <= tol.dedup in float
    // mode), drops zero weights.  Negative weights are rejected.
    DiscreteMeasure(int dim, std::vector<WeightedAtom<S>> atoms, const Tolerances& tol = {});

    [[nodiscard]] int dim() const { return dim_; }
    [[nodiscard]] const std::vector<WeightedAtom<S>>& atoms() const { return atoms_; }
    [[nodiscard]] int size() const { return static_cast<int>(atoms_.size()); }

    [[nodiscard]] S total_mass() const;
    [[nodiscard]] bool is_probability(const Tolerances& tol = {}) const;

    // Same support and weights; exact in rational mode, tolerance-based in float.
    [[nodiscard]] bool equals(const DiscreteMeasure& other, const Tolerances& tol = {}) const;

    [[nodiscard]] DiscreteMeasure normalized() const;

    // Mixture this + s * other (weights scaled, atoms merged).
    [[nodiscard]] DiscreteMeasure mixed_with(const DiscreteMeasure& other, const S& s) const;

private:
    int dim_ = 0;
    std::vector<WeightedAtom<S>> atoms_;
};

template <class S> Point<S> barycenter(const DiscreteMeasure<S>& m);
template <class S> S variance(const DiscreteMeasure<S>& m);
template <class S> S second_moment_trace(const DiscreteMeasure<S>& m);

// C = sum_nu w y y^T  -  sum_mu w x x^T   (second-moment difference of nu and mu)
template <class S>
SymmetricMatrix<S> covariance_difference(const DiscreteMeasure<S>& mu, const DiscreteMeasure<S>& nu);

template <class S> DiscreteMeasure<S> dirac(const Point<S>& p);

} // namespace bimart
