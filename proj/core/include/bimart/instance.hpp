#pragma once

// ============================================================================
// Built-in instances and exact random generators.
//
// The two named instances are small, fully worked examples: a coupling whose
// one-sided barycenter defect rules out any bimartingale rearrangement, and a
// balanced pair with degenerate covariance difference that decomposes into
// two horizontal leaves.  The generators build instances forward from an
// explicitly bimartingale coupling (product of per-block martingales on
// rational lattices, optionally rotated by an exact rational rotation), so
// the optimal value and a zero duality gap are known by construction.
// ============================================================================

#include "bimart/leaves.hpp"

#include <random>
#include <utility>

namespace bimart {

// mu = 1/4 (delta_(-1,-1) + delta_(1,-1) + 2 delta_(0,1)),
// nu = 1/4 (four corners of [-1,1]^2); <e2, C e2> = 0 exactly.
template <class S>
std::pair<DiscreteMeasure<S>, DiscreteMeasure<S>> degenerate_covariance_instance();

// pi = 1/2 (delta_((0,1),(-1,1)) + delta_((0,-1),(1,-1))): both coordinate
// pushforwards are martingale couplings, yet the source-side V1 residual at
// x = (0,1) equals -1/2, so pi itself is not bimartingale — and its marginals
// admit no bimartingale coupling at all for (span e1, span e2).
template <class S>
Coupling<S> counterexample_coupling();

template <class S>
SubspacePair<S> counterexample_pair(); // (span e1, span e2) in dimension 2

// ---------------------------------------------------------------------------
// Generators (exact arithmetic; convert with to_float for the double lane)
// ---------------------------------------------------------------------------

struct ForwardInstance {
    DiscreteMeasure<Rational> mu, nu;
    Coupling<Rational> pi;        // bimartingale for `pair` by construction
    SubspacePair<Rational> pair;  // inducing split (V1, V2)
    Rational true_cost;           // cost of R_# pi = 1/2 schatten1(C)
};

// Product-of-martingales construction: axes are split into a V1 block, a V2
// block and a kernel block; per kernel offset (leaf) an independent product
// of a forward martingale on the V1 coordinates and a backward martingale on
// the V2 coordinates is laid down, then everything may be rotated exactly.
ForwardInstance generate_forward_instance(std::mt19937& rng, int max_dim = 3,
                                          int max_atoms = 6);

// Convex-order pair: nu is a small random measure, mu collapses random
// groups of nu atoms to their barycenters (so mu precedes nu in convex
// order, with a merge coupling as witness).
std::pair<DiscreteMeasure<Rational>, DiscreteMeasure<Rational>>
generate_merge_instance(std::mt19937& rng, int max_dim = 3, int max_atoms = 6);

// Uniformly messy small-rational measure (not normalized to any order
// relation); barycenter is made exactly zero when `centered`.
DiscreteMeasure<Rational> generate_random_measure(std::mt19937& rng, int dim, int atoms,
                                                  bool centered);

// ---------------------------------------------------------------------------
// Exact-to-float conversions
// ---------------------------------------------------------------------------

Point<double> to_float(const Point<Rational>& p);
DiscreteMeasure<double> to_float(const DiscreteMeasure<Rational>& m);
Coupling<double> to_float(const Coupling<Rational>& pi);
SubspacePair<double> to_float(const SubspacePair<Rational>& pair);

} // namespace bimart
