#pragma once

// ============================================================================
// Self-contained primal simplex over rationals or doubles.
//
// Variables are nonnegative (lower bound 0, no upper bound); rows may be
// <=, = or >=.  Two-phase method with explicit artificial variables;
// equality rows are kept as equalities.  Pricing in both modes: Dantzig rule
// with lexicographic ratio tie-breaking, falling back permanently to Bland's
// rule if the objective stalls (the fallback is flagged on the outcome).
// Termination is still guaranteed: a cycle cannot improve the objective, so
// the stall counter always trips, and Bland's rule terminates from any basis.
// In rational mode the stall test compares objectives exactly and verdicts
// stay exact; only the pivot path depends on the pricing rule.
//
// Rational mode additionally runs a floating-point presolve: the LP is solved
// in doubles and the suggested basis is then certified with exact arithmetic
// (exact basic solution, exact dual multipliers, every sign condition checked
// over the rationals; infeasible verdicts are certified by an exact Farkas
// vector).  Certification either succeeds — yielding an exactly optimal
// primal/dual pair at a fraction of the cost of exact pivoting — or the
// result is discarded and the pure exact simplex runs from scratch, so no
// verdict ever rests on floating point.
// ============================================================================

#include "bimart/numeric.hpp"

#include <string>
#include <vector>

namespace bimart {

enum class Rel { le, eq, ge };

template <class S>
struct LPRow {
    std::vector<S> coeffs;
    Rel rel = Rel::eq;
    S rhs{};
};

template <class S>
struct LinearProgram {
    std::vector<S> objective; // minimized
    std::vector<LPRow<S>> rows;
};

enum class LPStatus { optimal, infeasible, unbounded };

template <class S>
struct LPOutcome {
    LPStatus status = LPStatus::infeasible;
    std::vector<S> solution;          // when optimal
    S objective{};                    // when optimal
    std::vector<S> duals;             // per input row, when optimal
    bool anti_cycling_engaged = false; // pricing fell back to Bland's rule
    bool certified_basis = false;      // rational mode certified a float-suggested basis
    int iterations = 0;
};

struct SolveOptions {
    // pivots without strict objective improvement before the anti-cycling
    // fallback engages; <= 0 picks a size-based default
    int max_stall = 0;
    // hard pivot budget before the solve aborts with std::runtime_error
    int max_iterations = 200000;
    // rational mode: try the float presolve + exact certification fast path
    // before falling back to exact pivoting (no effect in float mode)
    bool float_presolve = true;
};

template <class S>
[[nodiscard]] LPOutcome<S> solve_lp(const LinearProgram<S>& lp, const SolveOptions& opts = {});

template <class S> [[nodiscard]] std::size_t lp_nonzeros(const LinearProgram<S>& lp);

// plain-text rendering for the CLI debug flag
template <class S> [[nodiscard]] std::string dump_lp(const LinearProgram<S>& lp);

} // namespace bimart
