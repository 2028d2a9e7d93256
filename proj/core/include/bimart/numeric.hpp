#pragma once

// ============================================================================
// Numeric layer: the two scalar modes and their shared conventions.
//
// Everything downstream is templated on a scalar S which is either
//   * bimart::Rational  — GMP-backed exact rationals; comparisons are exact
//     and a "zero" is literally zero, or
//   * double            — IEEE doubles; comparisons go through the tolerances
//     collected in bimart::Tolerances.
// The traits below let shared code ask "is this mode exact?" and pick the
// right notion of negligible without sprinkling ifs everywhere.
// ============================================================================

#include <boost/multiprecision/gmp.hpp>

#include <cmath>
#include <stdexcept>
#include <string>

namespace bimart {

using Rational = boost::multiprecision::mpq_rational;

// Thrown for malformed or inconsistent *input* (bad files, dimension
// mismatches, violated preconditions).  The CLI maps this family to exit
// code 2; anything else that escapes is an internal error (exit code 1).
class input_error : public std::runtime_error {
public:
    explicit input_error(const std::string& what) : std::runtime_error(what) {}
};

// Default tolerances for the floating-point mode, pinned in one place.
// Rational-mode code ignores all of these except jacobi_off / split_rel,
// which govern the float-backed eigenvalue work that runs in both modes.
struct Tolerances {
    double float_zero = 1e-9;   // general float comparisons (constraints, residuals)
    double dedup      = 1e-12;  // atom merge distance in float mode
    double jacobi_off = 1e-14;  // Jacobi convergence: off-diag Frobenius, relative
    double split_rel  = 1e-8;   // eigenvalue |lambda| <= split_rel * schatten1 => kernel
};

template <class S> struct scalar_traits;

template <> struct scalar_traits<double> {
    static constexpr bool exact = false;
    static bool is_zero(double v, const Tolerances& tol) { return std::fabs(v) <= tol.float_zero; }
    static const char* mode_name() { return "float"; }
};

template <> struct scalar_traits<Rational> {
    static constexpr bool exact = true;
    static bool is_zero(const Rational& v, const Tolerances&) { return v == 0; }
    static const char* mode_name() { return "rational"; }
};

inline double to_double(double v) { return v; }
inline double to_double(const Rational& v) { return v.template convert_to<double>(); }

template <class S> S abs_value(const S& v) { return v < 0 ? S(-v) : v; }

// ---------------------------------------------------------------------------
// Conversions between the two modes and from text.
// ---------------------------------------------------------------------------

// Exact binary value of the double (mpq_set_d semantics).  Not for snapping
// decimal-looking floats to "nice" fractions; see rational_from_decimal.
Rational rational_from_double(double v);

// Parse "3", "-1/2", "0.25", "2.5e-3" into an exact rational.  Decimal text
// is interpreted exactly (no binary round trip), which is why instance files
// carry weights as strings in rational mode.
Rational rational_from_decimal(const std::string& text);

// Best rational with |r - v| <= tol, via continued fractions; used to snap
// float eigenvector entries back into the exact world before re-verifying.
Rational rational_snap(double v, double tol);

// Canonical text form: "p/q" in lowest terms, or "p" when q == 1.
std::string to_decimal_string(const Rational& v);

template <class S> struct scalar_io;
template <> struct scalar_io<double> {
    // parse exactly first so fraction strings ("1/4") and trailing garbage
    // behave the same in both modes, then round once to double
    static double from_decimal(const std::string& text) {
        return to_double(rational_from_decimal(text));
    }
    static double from_double(double v) { return v; }
};
template <> struct scalar_io<Rational> {
    static Rational from_decimal(const std::string& text) { return rational_from_decimal(text); }
    static Rational from_double(double v) { return rational_from_double(v); }
};

} // namespace bimart
