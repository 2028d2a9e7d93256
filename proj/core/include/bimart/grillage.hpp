#pragma once

// ============================================================================
// 2D grillage tensor measures.
//
// A plan atom (x, y, z, w) induces two bars: the x-segment [z, x] with sign
// +1 and the y-segment [z, y] with sign -1.  Each bar carries the rank-1
// tensor density  w * |xi - z| * (e-z)(e-z)^T / |e-z|^2  with respect to
// arclength on its segment.  The signed matrix measure rho built this way
// satisfies  div^2 rho = nu - mu  weakly:
//     integral <D^2 phi, d rho> = integral phi d(nu - mu)
// for every smooth phi, which verify_div2 checks exactly on polynomials.
// Its Schatten-1 total variation is the grillage's material volume.
// ============================================================================

#include "bimart/solver.hpp"

#include <string>
#include <vector>

namespace bimart {

template <class S>
struct GrillageBar {
    Point<S> from; // z, the hinge of the triple
    Point<S> to;   // e, either x (sign +1) or y (sign -1)
    int sign = 1;
    S weight{}; // plan atom weight

    // (e-z)(e-z)^T / |e-z|^2: symmetric, idempotent, trace 1
    [[nodiscard]] SymmetricMatrix<S> direction_tensor() const {
        SymmetricMatrix<S> t(from.dim());
        const Point<S> u = to - from;
        t.add_outer(u, S(1) / norm_sq(u));
        return t;
    }

    // analytic line integral of weight * |xi - z| over the segment
    [[nodiscard]] S mass() const { return weight * norm_sq(to - from) / S(2); }
};

template <class S>
class GrillageMeasure {
public:
    GrillageMeasure() = default;
    explicit GrillageMeasure(std::vector<GrillageBar<S>> bars);

    [[nodiscard]] static constexpr int dim() { return 2; }
    [[nodiscard]] const std::vector<GrillageBar<S>>& bars() const { return bars_; }
    [[nodiscard]] int size() const { return static_cast<int>(bars_.size()); }

private:
    std::vector<GrillageBar<S>> bars_;
};

// Two bars per triple, zero-length segments dropped.  Plans must be 2D.
template <class S>
GrillageMeasure<S> bars_from_plan(const ThreePlan<S>& plan, const Tolerances& tol = {});

// Schatten-1 total variation: bars sharing the same carrying line (hence the
// same direction tensor) merge their signed piecewise-linear densities and
// the absolute profile is integrated in closed form; bars on distinct lines
// never interact, and near-collinear bars are deliberately not merged.
template <class S>
S total_variation(const GrillageMeasure<S>& g, const Tolerances& tol = {});

template <class S>
struct Div2Report {
    struct Entry {
        int p = 0, q = 0; // test monomial xi_1^p xi_2^q
        S lhs{};          // integral <D^2 phi, d rho>
        S rhs{};          // integral phi d(nu - mu)
        S residual{};     // |lhs - rhs|
    };
    int degree = 0;
    std::vector<Entry> entries;
    S max_residual{};
};

// Pairs rho against every monomial of total degree <= d (d >= 2) using exact
// per-segment polynomial integration and compares with the moments of nu-mu.
template <class S>
Div2Report<S> verify_div2(const GrillageMeasure<S>& g, const DiscreteMeasure<S>& mu,
                          const DiscreteMeasure<S>& nu, int degree = 4);

// Geometry export ("export" itself is reserved in C++).  Both renderings are
// deterministic: bars appear in construction order with fixed formatting.
template <class S>
std::string export_svg(const GrillageMeasure<S>& g);

template <class S>
std::string export_csv(const GrillageMeasure<S>& g);

} // namespace bimart
