#include "bimart/measure.hpp"

#include <algorithm>

namespace bimart {

namespace {

template <class S>
bool same_atom(const Point<S>& a, const Point<S>& b, const Tolerances& tol) {
    if constexpr (scalar_traits<S>::exact) {
        return a == b;
    } else {
        return to_double(norm_sq(a - b)) <= tol.dedup * tol.dedup;
    }
}

} // namespace

template <class S>
DiscreteMeasure<S>::DiscreteMeasure(int dim, std::vector<WeightedAtom<S>> atoms, const Tolerances& tol)
    : dim_(dim) {
    if (dim < 1) throw input_error("measure dimension must be >= 1");
    for (const auto& a : atoms) {
        if (a.x.dim() != dim) throw input_error("atom dimension does not match measure dimension");
        if (a.w < S(0)) throw input_error("negative atom weight");
    }
    std::sort(atoms.begin(), atoms.end(),
              [](const WeightedAtom<S>& a, const WeightedAtom<S>& b) { return a.x < b.x; });
    for (auto& a : atoms) {
        if (a.w == S(0)) continue;
        if (!atoms_.empty() && same_atom(atoms_.back().x, a.x, tol))
            atoms_.back().w += a.w;
        else
            atoms_.push_back(std::move(a));
    }
}

template <class S>
S DiscreteMeasure<S>::total_mass() const {
    S m(0);
    for (const auto& a : atoms_) m += a.w;
    return m;
}

template <class S>
bool DiscreteMeasure<S>::is_probability(const Tolerances& tol) const {
    return scalar_traits<S>::is_zero(total_mass() - S(1), tol);
}

template <class S>
bool DiscreteMeasure<S>::equals(const DiscreteMeasure& other, const Tolerances& tol) const {
    if (dim_ != other.dim_ || atoms_.size() != other.atoms_.size()) return false;
    for (size_t i = 0; i < atoms_.size(); ++i) {
        if (!same_atom(atoms_[i].x, other.atoms_[i].x, tol)) return false;
        if (!scalar_traits<S>::is_zero(atoms_[i].w - other.atoms_[i].w, tol)) return false;
    }
    return true;
}

template <class S>
DiscreteMeasure<S> DiscreteMeasure<S>::normalized() const {
    S m = total_mass();
    if (m == S(0)) throw input_error("cannot normalize a measure with zero mass");
    auto scaled = atoms_;
    for (auto& a : scaled) a.w /= m;
    return DiscreteMeasure(dim_, std::move(scaled));
}

template <class S>
DiscreteMeasure<S> DiscreteMeasure<S>::mixed_with(const DiscreteMeasure& other, const S& s) const {
    if (other.dim_ != dim_) throw input_error("mixture of measures with different dimensions");
    auto combined = atoms_;
    for (auto a : other.atoms_) {
        a.w *= s;
        combined.push_back(std::move(a));
    }
    return DiscreteMeasure(dim_, std::move(combined));
}

template <class S>
Point<S> barycenter(const DiscreteMeasure<S>& m) {
    S mass = m.total_mass();
    if (mass == S(0)) throw input_error("barycenter of a measure with zero mass");
    Point<S> b(m.dim());
    for (const auto& a : m.atoms()) b += a.w * a.x;
    b *= S(1) / mass;
    return b;
}

template <class S>
S variance(const DiscreteMeasure<S>& m) {
    Point<S> b = barycenter(m);
    S mass = m.total_mass(), acc(0);
    for (const auto& a : m.atoms()) acc += a.w * norm_sq(a.x - b);
    return acc / mass;
}

template <class S>
S second_moment_trace(const DiscreteMeasure<S>& m) {
    S acc(0);
    for (const auto& a : m.atoms()) acc += a.w * norm_sq(a.x);
    return acc;
}

template <class S>
SymmetricMatrix<S> covariance_difference(const DiscreteMeasure<S>& mu, const DiscreteMeasure<S>& nu) {
    if (mu.dim() != nu.dim()) throw input_error("covariance difference: dimension mismatch");
    SymmetricMatrix<S> c(mu.dim());
    for (const auto& a : nu.atoms()) c.add_outer(a.x, a.w);
    for (const auto& a : mu.atoms()) c.add_outer(a.x, S(0) - a.w);
    return c;
}

template <class S>
DiscreteMeasure<S> dirac(const Point<S>& p) {
    return DiscreteMeasure<S>(p.dim(), {{p, S(1)}});
}

// explicit instantiations for the two numeric modes
template class DiscreteMeasure<double>;
template class DiscreteMeasure<Rational>;
template Point<double> barycenter(const DiscreteMeasure<double>&);
template Point<Rational> barycenter(const DiscreteMeasure<Rational>&);
template double variance(const DiscreteMeasure<double>&);
template Rational variance(const DiscreteMeasure<Rational>&);
template double second_moment_trace(const DiscreteMeasure<double>&);
template Rational second_moment_trace(const DiscreteMeasure<Rational>&);
template SymmetricMatrix<double> covariance_difference(const DiscreteMeasure<double>&, const DiscreteMeasure<double>&);
template SymmetricMatrix<Rational> covariance_difference(const DiscreteMeasure<Rational>&, const DiscreteMeasure<Rational>&);
template DiscreteMeasure<double> dirac(const Point<double>&);
template DiscreteMeasure<Rational> dirac(const Point<Rational>&);

} // namespace bimart
