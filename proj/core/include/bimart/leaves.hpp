#pragma once

// ============================================================================
// Leaf decomposition.
//
// A balanced pair (mu, nu) with common barycenter decomposes along the
// spectral split of C = covariance_difference(mu, nu): atoms are grouped by
// their projection onto the orthogonal complement of V = V1 + V2, each group
// carries normalized conditionals, and the construction recurses inside each
// group's tangent space until the restricted covariance difference has full
// range there.  On a terminal leaf the conditionals admit a bimartingale
// coupling, and the per-leaf optimal costs 1/2 schatten1(C_S) aggregate to
// the global transport value.
// ============================================================================

#include "bimart/solver.hpp"

#include <string>
#include <vector>

namespace bimart {

template <class S>
struct LeafNode {
    int id = 0;
    int depth = 0;
    Point<S> anchor;                    // a representative support point
    SubspacePair<S> tangent;            // V1(S), V2(S); kernel = complement of V(S)
    std::vector<Point<S>> tangent_basis; // orthogonal basis of the node's tangent space W(S)
    std::string key;  // projection of the node onto the parent's splitting directions
    std::string path; // root-to-node chain of keys, used in diagnostics
    S theta{};        // absolute weight of the node (root carries 1)
    DiscreteMeasure<S> mu_s, nu_s; // normalized conditionals
    bool trivial = false;          // mu_s == nu_s (zero-cost node)
    std::vector<LeafNode> children;

    [[nodiscard]] bool terminal() const { return children.empty(); }
};

// Depth-1 partition of (mu, nu) by the orthogonal projection of atoms onto
// the complement of V1 + V2.  Verifies per-group mass balance and barycenter
// agreement; a violation raises an input error naming the leaf key.
template <class S>
std::vector<LeafNode<S>> partition_by_leaf(const DiscreteMeasure<S>& mu,
                                           const DiscreteMeasure<S>& nu,
                                           const SubspacePair<S>& pair,
                                           const Tolerances& tol = {});

// Recursively refines a node carrying conditionals: restricts the covariance
// difference to the tangent space, splits, and re-partitions along the
// in-tangent kernel until terminal (V(S) = W(S)) or trivial (mu_s == nu_s,
// which refines to single-atom children marked trivial).
template <class S>
LeafNode<S> refine(LeafNode<S> node, const Tolerances& tol = {});

// Full tree for the instance: root at depth 0 with tangent space R^n.
template <class S>
LeafNode<S> decompose(const DiscreteMeasure<S>& mu, const DiscreteMeasure<S>& nu,
                      const Tolerances& tol = {});

template <class S>
struct LeafLedgerEntry {
    int leaf_id = 0;
    std::string path;
    int depth = 0;
    S theta{};
    S j_leaf{};  // per-leaf optimal cost 1/2 schatten1(C_S)
    int dim1 = 0, dim2 = 0;
    bool trivial = false;
};

template <class S>
struct DecomposeReport {
    LeafNode<S> root;
    std::vector<LeafLedgerEntry<S>> ledger; // one entry per terminal leaf
    S total_cost{};                         // sum theta * j_leaf
    ThreePlan<S> plan;                      // global plan sum theta * (R_S)# pi_S
};

// Runs decompose, solves a bimartingale coupling per terminal leaf in leaf
// coordinates, and assembles the global plan.  A leaf whose conditionals
// admit no bimartingale coupling raises an input error naming the leaf path.
template <class S>
DecomposeReport<S> solve_decomposed(const DiscreteMeasure<S>& mu, const DiscreteMeasure<S>& nu,
                                    const Tolerances& tol = {});

} // namespace bimart
