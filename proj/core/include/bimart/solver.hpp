#pragma once

// ============================================================================
// Three-marginal transport solver.
//
// Primal problem: over plans sigma >= 0 on support(mu) x support(nu) x grid
// with first marginal mu, second marginal nu, and both (x,z) and (y,z)
// couplings martingale, minimize
//     sum sigma * cost(x,y,z),   cost = 1/2 (|z-x|^2 + |z-y|^2).
// Because the z grid is finite the LP value is an upper bound on the true
// optimum, equal to it whenever the grid contains an optimal support.
//
// Dual side: quadratic potentials u(v) = 1/2 v^T A v + l.v + c with
// -Id <= A <= Id.  The best such bound is 1/2 schatten1(C) with
// C = covariance_difference(mu, nu), attained by A = P_V1 - P_V2 for the
// spectral split (V1, V2) of C.  A zero gap certifies both sides.
// ============================================================================

#include "bimart/order.hpp"

#include <cmath>
#include <functional>
#include <optional>
#include <string>

namespace bimart {

template <class S>
struct PlanAtom {
    Point<S> x, y, z;
    S w;
};

template <class S>
class ThreePlan {
public:
    ThreePlan() = default;
    ThreePlan(int dim, std::vector<PlanAtom<S>> atoms, const Tolerances& tol = {});

    [[nodiscard]] int dim() const { return dim_; }
    [[nodiscard]] const std::vector<PlanAtom<S>>& atoms() const { return atoms_; }
    [[nodiscard]] int size() const { return static_cast<int>(atoms_.size()); }

    [[nodiscard]] DiscreteMeasure<S> marginal1() const;
    [[nodiscard]] DiscreteMeasure<S> marginal2() const;
    [[nodiscard]] DiscreteMeasure<S> marginal3() const;

    [[nodiscard]] S total_cost() const;

    // max-abs of the per-source sums  sum w (z - x)  and per-target sums
    // sum w (z - y); both are exactly zero for a valid member of Sigma(mu,nu)
    [[nodiscard]] std::pair<S, S> martingale_residuals() const;

    // mixture of plans: this + s * other
    [[nodiscard]] ThreePlan mixed_with(const ThreePlan& other, const S& s) const;

private:
    int dim_ = 0;
    std::vector<PlanAtom<S>> atoms_;
};

template <class S>
S cost(const Point<S>& x, const Point<S>& y, const Point<S>& z);

// ---------------------------------------------------------------------------
// Quadratic dual potentials
// ---------------------------------------------------------------------------

template <class S>
struct QuadraticPotential {
    SymmetricMatrix<S> a; // must satisfy -Id <= A <= Id (1-Lipschitz derivative)
    Point<S> linear;
    S constant{};

    [[nodiscard]] S value(const Point<S>& v) const {
        return dot(v, a.apply(v)) / S(2) + dot(linear, v) + constant;
    }
    [[nodiscard]] Point<S> gradient(const Point<S>& v) const { return a.apply(v) + linear; }

    // spectral check of -Id <= A <= Id (float eigenvalues, slack tol)
    [[nodiscard]] bool is_one_lipschitz(const Tolerances& tol = {}) const {
        const EigenDecomposition ed = eigendecompose(a, tol);
        for (double v : ed.values)
            if (std::abs(v) > 1.0 + tol.float_zero) return false;
        return true;
    }

    static QuadraticPotential zero(int dim) {
        return {SymmetricMatrix<S>(dim), Point<S>(dim), S(0)};
    }
};

enum class SolveStatus { optimal, infeasible_grid };

template <class S>
struct DualBound {
    S value{};
    QuadraticPotential<S> potential;
    SubspacePair<S> pair;
};

template <class S>
struct OptimalityReport {
    struct Entry {
        S opt_residual; // |u(y)+Du(y)(z-y) - u(x)-Du(x)(z-x) - cost(x,y,z)|
        S y_identity;   // |u(z) - u(y) - Du(y)(z-y) - 1/2 |z-y|^2|  (u curves +1 toward z)
        S x_identity;   // |u(z) - u(x) - Du(x)(z-x) + 1/2 |z-x|^2|  (u curves -1 toward z)
    };
    std::vector<Entry> entries; // aligned with plan atoms
    S max_residual{};           // max over entries of opt_residual
};

template <class S>
struct SolveReport {
    SolveStatus status = SolveStatus::optimal;
    S primal_cost{};
    S dual_bound{};
    S gap{};
    ThreePlan<S> plan;
    QuadraticPotential<S> potential;
    SubspacePair<S> pair;   // spectral split behind the dual bound
    S optimality_residual{};
    int z_grid_size = 0;
    std::string grid_provenance = "caller";
    std::string note;       // infeasibility advice / non-isometric-regime hint
};

template <class S>
struct VarianceReport {
    SolveStatus status = SolveStatus::optimal;
    S value{};              // minimal variance over the grid
    DiscreteMeasure<S> rho; // minimizer (= third marginal of an optimal plan)
    std::string note;
};

template <class S>
struct BalanceReport {
    S mass_gap{};         // |mu(A) - nu(A)|
    Point<S> moment_gap;  // int_A x dmu - int_A y dnu
};

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

// Candidate z set: structured points P_V2 x_i + P_V1 y_j (with the atom's
// kernel component carried along when the pair does not complement R^n, so
// candidates stay on the source/target leaves), all mu and nu atoms, and
// user extras.  Deduplicated, lexicographically sorted.
template <class S>
std::vector<Point<S>> build_z_grid(const DiscreteMeasure<S>& mu, const DiscreteMeasure<S>& nu,
                                   const std::optional<SubspacePair<S>>& pair = std::nullopt,
                                   const std::vector<Point<S>>& extra = {},
                                   const Tolerances& tol = {});

// When lp_dump is non-null it receives the plain-text rendering of the LP
// actually solved (see dump_lp), for the CLI debug flag.
template <class S>
SolveReport<S> solve_primal(const DiscreteMeasure<S>& mu, const DiscreteMeasure<S>& nu,
                            const std::vector<Point<S>>& z_grid, const Tolerances& tol = {},
                            std::string* lp_dump = nullptr);

template <class S>
DualBound<S> quadratic_dual_bound(const DiscreteMeasure<S>& mu, const DiscreteMeasure<S>& nu,
                                  const Tolerances& tol = {});

// sigma = R_# pi with R(x,y) = (x, y, P_V2 x + P_V1 y (+ kernel part of x)).
// Precondition: pi verifies as bimartingale (exact in rational mode, <= 1e-9
// in float mode); the offending atom is named otherwise.
template <class S>
ThreePlan<S> assemble_from_bimartingale(const Coupling<S>& pi, const SubspacePair<S>& pair,
                                        const Tolerances& tol = {});

template <class S>
OptimalityReport<S> check_optimality(const ThreePlan<S>& plan, const QuadraticPotential<S>& u);

template <class S>
VarianceReport<S> solve_variance(const DiscreteMeasure<S>& mu, const DiscreteMeasure<S>& nu,
                                 const std::vector<Point<S>>& z_grid, const Tolerances& tol = {});

template <class S>
BalanceReport<S> balance_check(const ThreePlan<S>& plan,
                               const std::function<bool(const Point<S>&)>& in_set);

} // namespace bimart
