#pragma once

// Points of R^n and dense symmetric matrices over either scalar mode.
// These are small value types; all arithmetic is exact in rational mode.

#include "bimart/numeric.hpp"

#include <algorithm>
#include <initializer_list>
#include <vector>

namespace bimart {

template <class S>
class Point {
public:
    Point() = default;
    explicit Point(int dim) : c_(static_cast<size_t>(dim), S(0)) {}
    Point(std::initializer_list<S> init) : c_(init) {}
    explicit Point(std::vector<S> coords) : c_(std::move(coords)) {}

    [[nodiscard]] int dim() const { return static_cast<int>(c_.size()); }
    S& operator[](int i) { return c_[static_cast<size_t>(i)]; }
    const S& operator[](int i) const { return c_[static_cast<size_t>(i)]; }
    [[nodiscard]] const std::vector<S>& coords() const { return c_; }

    Point& operator+=(const Point& o) {
        for (int i = 0; i < dim(); ++i) c_[i] += o[i];
        return *this;
    }
    Point& operator-=(const Point& o) {
        for (int i = 0; i < dim(); ++i) c_[i] -= o[i];
        return *this;
    }
    Point& operator*=(const S& s) {
        for (auto& v : c_) v *= s;
        return *this;
    }

    friend Point operator+(Point a, const Point& b) { return a += b; }
    friend Point operator-(Point a, const Point& b) { return a -= b; }
    friend Point operator*(const S& s, Point p) { return p *= s; }
    friend Point operator*(Point p, const S& s) { return p *= s; }
    friend bool operator==(const Point& a, const Point& b) { return a.c_ == b.c_; }
    friend bool operator!=(const Point& a, const Point& b) { return !(a == b); }

    // Lexicographic order; gives every atom container a canonical layout.
    friend bool operator<(const Point& a, const Point& b) {
        return std::lexicographical_compare(a.c_.begin(), a.c_.end(), b.c_.begin(), b.c_.end());
    }

private:
    std::vector<S> c_;
};

template <class S> S dot(const Point<S>& a, const Point<S>& b) {
    S acc(0);
    for (int i = 0; i < a.dim(); ++i) acc += a[i] * b[i];
    return acc;
}

template <class S> S norm_sq(const Point<S>& a) { return dot(a, a); }

// max |component|; the exact-friendly vector magnitude used for residuals
template <class S> S max_abs(const Point<S>& a) {
    S m(0);
    for (int i = 0; i < a.dim(); ++i) m = std::max(m, abs_value(a[i]));
    return m;
}

template <class S> bool is_zero_point(const Point<S>& a, const Tolerances& tol = {}) {
    for (int i = 0; i < a.dim(); ++i)
        if (!scalar_traits<S>::is_zero(a[i], tol)) return false;
    return true;
}

template <class S> Point<S> point_from(const Point<Rational>& p) {
    std::vector<S> c;
    c.reserve(static_cast<size_t>(p.dim()));
    for (int i = 0; i < p.dim(); ++i) {
        if constexpr (std::is_same_v<S, Rational>) c.push_back(p[i]);
        else c.push_back(to_double(p[i]));
    }
    return Point<S>(std::move(c));
}

// ---------------------------------------------------------------------------
// SymmetricMatrix: storage is the full n x n grid, symmetry is enforced at
// construction (exactly in rational mode, up to 1e-12 max-norm in float
// mode, after which the entries are symmetrized).
// ---------------------------------------------------------------------------

template <class S>
class SymmetricMatrix {
public:
    SymmetricMatrix() = default;
    explicit SymmetricMatrix(int n) : n_(n), a_(static_cast<size_t>(n) * n, S(0)) {}

    static SymmetricMatrix from_grid(int n, std::vector<S> entries) {
        if (static_cast<int>(entries.size()) != n * n)
            throw input_error("symmetric matrix: wrong number of entries");
        SymmetricMatrix m(n);
        m.a_ = std::move(entries);
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) {
                S diff = m.at(i, j) - m.at(j, i);
                if constexpr (scalar_traits<S>::exact) {
                    if (diff != 0) throw input_error("matrix is not symmetric");
                } else {
                    if (std::fabs(to_double(diff)) > 1e-12)
                        throw input_error("matrix is not symmetric");
                    S avg = (m.at(i, j) + m.at(j, i)) / S(2);
                    m.at(i, j) = avg;
                    m.at(j, i) = avg;
                }
            }
        return m;
    }

    static SymmetricMatrix identity(int n) {
        SymmetricMatrix m(n);
        for (int i = 0; i < n; ++i) m.at(i, i) = S(1);
        return m;
    }

    [[nodiscard]] int dim() const { return n_; }
    S& at(int i, int j) { return a_[static_cast<size_t>(i) * n_ + j]; }
    const S& at(int i, int j) const { return a_[static_cast<size_t>(i) * n_ + j]; }

    // rank-one update m += s * v v^T, keeping symmetry by construction
    void add_outer(const Point<S>& v, const S& s) {
        for (int i = 0; i < n_; ++i)
            for (int j = 0; j < n_; ++j) a_[static_cast<size_t>(i) * n_ + j] += s * v[i] * v[j];
    }

    [[nodiscard]] Point<S> apply(const Point<S>& x) const {
        Point<S> y(n_);
        for (int i = 0; i < n_; ++i) {
            S acc(0);
            for (int j = 0; j < n_; ++j) acc += at(i, j) * x[j];
            y[i] = acc;
        }
        return y;
    }

    [[nodiscard]] S trace() const {
        S t(0);
        for (int i = 0; i < n_; ++i) t += at(i, i);
        return t;
    }

    SymmetricMatrix& operator+=(const SymmetricMatrix& o) {
        for (size_t k = 0; k < a_.size(); ++k) a_[k] += o.a_[k];
        return *this;
    }
    SymmetricMatrix& operator-=(const SymmetricMatrix& o) {
        for (size_t k = 0; k < a_.size(); ++k) a_[k] -= o.a_[k];
        return *this;
    }
    friend SymmetricMatrix operator-(SymmetricMatrix a, const SymmetricMatrix& b) { return a -= b; }
    friend SymmetricMatrix operator+(SymmetricMatrix a, const SymmetricMatrix& b) { return a += b; }
    friend bool operator==(const SymmetricMatrix& a, const SymmetricMatrix& b) {
        return a.n_ == b.n_ && a.a_ == b.a_;
    }

private:
    int n_ = 0;
    std::vector<S> a_;
};

template <class S> SymmetricMatrix<double> to_double_matrix(const SymmetricMatrix<S>& m) {
    SymmetricMatrix<double> out(m.dim());
    for (int i = 0; i < m.dim(); ++i)
        for (int j = 0; j < m.dim(); ++j) out.at(i, j) = to_double(m.at(i, j));
    return out;
}

} // namespace bimart
