#pragma once

// ============================================================================
// Order checks: convex order via Strassen's theorem (martingale-coupling
// feasibility) and the convex-concave order w.r.t. a pair of orthogonal
// subspaces (bimartingale-coupling feasibility).
//
// A bimartingale coupling pi between mu and nu satisfies, atomwise,
//   for every source x:  sum_j pi(x, y_j) P_V1 (y_j - x) = 0
//   for every target y:  sum_i pi(x_i, y) P_V2 (x_i - y) = 0,
// i.e. it is a martingale in the V1 directions and a reverse martingale in
// the V2 directions.  Existence is equivalent to mu preceding nu in the
// convex-concave order w.r.t. (V1, V2); with V1 = R^n, V2 = {0} this
// degenerates to the classical convex order.  All verdicts are LP
// feasibility answers and are exact in rational mode.
// ============================================================================

#include "bimart/measure.hpp"
#include "bimart/spectral.hpp"

#include <optional>
#include <utility>
#include <vector>

namespace bimart {

template <class S>
struct CouplingAtom {
    Point<S> x, y;
    S w;
};

template <class S>
class Coupling {
public:
    Coupling() = default;
    // Canonicalizes like DiscreteMeasure: atoms sorted by (x, y), duplicates
    // merged, zero weights dropped.
    Coupling(int dim, std::vector<CouplingAtom<S>> atoms, const Tolerances& tol = {});

    [[nodiscard]] int dim() const { return dim_; }
    [[nodiscard]] const std::vector<CouplingAtom<S>>& atoms() const { return atoms_; }
    [[nodiscard]] int size() const { return static_cast<int>(atoms_.size()); }
    [[nodiscard]] S total_mass() const;
    [[nodiscard]] DiscreteMeasure<S> first_marginal() const;
    [[nodiscard]] DiscreteMeasure<S> second_marginal() const;

    // Transport cost sum w |x-y|^2 under this coupling.
    [[nodiscard]] S quadratic_cost() const;

private:
    int dim_ = 0;
    std::vector<CouplingAtom<S>> atoms_;
};

template <class S> Coupling<S> identity_coupling(const DiscreteMeasure<S>& m);

// max-abs component of the per-source martingale residuals sum_j w (y_j - x)
template <class S> S martingale_residual(const Coupling<S>& pi);

// ---------------------------------------------------------------------------
// Feasibility checks.  Among all feasible couplings the witness minimizes
// sum pi_ij |x_i - y_j|^2 (a deterministic, minimal-cost choice).
// ---------------------------------------------------------------------------

// Witness iff mu precedes nu in convex order (Strassen).
template <class S>
std::optional<Coupling<S>> check_convex_order(const DiscreteMeasure<S>& mu,
                                              const DiscreteMeasure<S>& nu,
                                              const Tolerances& tol = {});

// Witness iff mu precedes nu in the convex-concave order w.r.t. (V1, V2).
// Preconditions: common barycenter (error otherwise — feasibility would be
// vacuously impossible, and we keep bad input distinct from a genuine order
// failure) and dim V1 + dim V2 = n (leaf restriction happens upstream).
template <class S>
std::optional<Coupling<S>> find_bimartingale(const DiscreteMeasure<S>& mu,
                                             const DiscreteMeasure<S>& nu,
                                             const SubspacePair<S>& pair,
                                             const Tolerances& tol = {});

// ---------------------------------------------------------------------------
// Verification and reductions
// ---------------------------------------------------------------------------

template <class S>
struct BimartingaleReport {
    struct Entry {
        Point<S> point;    // the source/target atom
        Point<S> residual; // ambient-coordinates defect vector
    };
    std::vector<Entry> source; // per distinct x: sum_j pi(x,y_j) P_V1 (y_j - x)
    std::vector<Entry> target; // per distinct y: sum_i pi(x_i,y) P_V2 (x_i - y)
    S max_violation{};         // max over all entries of max-abs component
};

template <class S>
BimartingaleReport<S> verify_bimartingale(const Coupling<S>& pi, const SubspacePair<S>& pair);

// The two martingale couplings a bimartingale coupling reduces to:
//   (P_V1, P_V1)_# pi        on V1 x V1, and
//   (P_V2, P_V2)_# pi swapped on V2 x V2.
// Points are coefficient vectors w.r.t. pair.basis1 / pair.basis2 (for an
// empty subspace a 1-dim zero coordinate is used).  Both results are
// martingale couplings whenever pi is bimartingale.
template <class S>
std::pair<Coupling<S>, Coupling<S>>
marginal_martingale_pushforwards(const Coupling<S>& pi, const SubspacePair<S>& pair);

} // namespace bimart
