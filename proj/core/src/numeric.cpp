#include "bimart/numeric.hpp"

#include <cctype>
#include <cstdlib>

namespace bimart {

Rational rational_from_double(double v) {
    if (!std::isfinite(v)) throw input_error("non-finite value cannot become a rational");
    return Rational(v); // mpq_set_d is exact on the binary representation
}

namespace {

bool all_digits(const std::string& s) {
    if (s.empty()) return false;
    for (char c : s)
        if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    return true;
}

} // namespace

Rational rational_from_decimal(const std::string& text) {
    std::string s = text;
    // trim whitespace
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.erase(s.begin());
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.pop_back();
    if (s.empty()) throw input_error("empty numeric string");

    bool negative = false;
    if (s[0] == '+' || s[0] == '-') {
        negative = (s[0] == '-');
        s.erase(s.begin());
    }

    // explicit fraction "p/q"
    if (auto slash = s.find('/'); slash != std::string::npos) {
        std::string num = s.substr(0, slash), den = s.substr(slash + 1);
        if (!all_digits(num) || !all_digits(den))
            throw input_error("malformed fraction: '" + text + "'");
        Rational r{boost::multiprecision::mpz_int(num), boost::multiprecision::mpz_int(den)};
        return negative ? Rational(-r) : r;
    }

    // decimal with optional exponent: digits[.digits][e[+-]digits]
    long exponent10 = 0;
    if (auto epos = s.find_first_of("eE"); epos != std::string::npos) {
        std::string exp = s.substr(epos + 1);
        s.erase(epos);
        if (exp.empty()) throw input_error("malformed exponent: '" + text + "'");
        exponent10 = std::strtol(exp.c_str(), nullptr, 10);
    }
    std::string digits = s;
    if (auto dot = s.find('.'); dot != std::string::npos) {
        digits = s.substr(0, dot) + s.substr(dot + 1);
        exponent10 -= static_cast<long>(s.size() - dot - 1);
    }
    if (!all_digits(digits)) throw input_error("malformed number: '" + text + "'");

    boost::multiprecision::mpz_int mantissa(digits);
    Rational r(mantissa);
    boost::multiprecision::mpz_int shift = 1;
    for (long i = 0; i < std::labs(exponent10); ++i) shift *= 10;
    if (exponent10 > 0) r *= Rational(shift);
    if (exponent10 < 0) r /= Rational(shift);
    return negative ? Rational(-r) : r;
}

Rational rational_snap(double v, double tol) {
    if (tol <= 0) return rational_from_double(v);
    // Continued-fraction expansion; stop once the convergent is within tol.
    double x = v;
    long long p0 = 0, q0 = 1, p1 = 1, q1 = 0;
    for (int step = 0; step < 64; ++step) {
        double fl = std::floor(x);
        if (fl > 9e17 || fl < -9e17) break; // integer part no longer fits
        long long a = static_cast<long long>(fl);
        long long p2 = a * p1 + p0, q2 = a * q1 + q0;
        if (q2 != 0 && std::fabs(static_cast<double>(p2) / static_cast<double>(q2) - v) <= tol)
            return Rational(p2, q2);
        p0 = p1; q0 = q1; p1 = p2; q1 = q2;
        double frac = x - fl;
        if (frac < 1e-18) break;
        x = 1.0 / frac;
    }
    return rational_from_double(v);
}

std::string to_decimal_string(const Rational& v) {
    return v.str(); // canonical lowest terms, "p/q" or "p"
}

} // namespace bimart
