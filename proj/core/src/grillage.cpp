#include "bimart/grillage.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <sstream>
#include <utility>

namespace bimart {

namespace {

template <class S>
S power(const S& base, int e) {
    S r(1);
    for (int i = 0; i < e; ++i) r *= base;
    return r;
}

std::string fmt(double v, const char* spec = "%.6g") {
    char buf[64];
    std::snprintf(buf, sizeof buf, spec, v);
    return buf;
}

} // namespace

template <class S>
GrillageMeasure<S>::GrillageMeasure(std::vector<GrillageBar<S>> bars) {
    for (auto& b : bars) {
        if (b.from.dim() != 2 || b.to.dim() != 2)
            throw input_error("grillage bars must live in dimension 2");
        if (b.sign != 1 && b.sign != -1) throw input_error("grillage bar sign must be +1 or -1");
        if (b.weight < S(0)) throw input_error("grillage bar weight must be nonnegative");
        if (is_zero_point(b.to - b.from)) continue; // zero-length carries no material
        bars_.push_back(std::move(b));
    }
}

template <class S>
GrillageMeasure<S> bars_from_plan(const ThreePlan<S>& plan, const Tolerances& tol) {
    if (plan.dim() != 2) throw input_error("bars_from_plan requires a 2-dimensional plan");
    std::vector<GrillageBar<S>> bars;
    bars.reserve(2 * plan.atoms().size());
    const auto longer_than_noise = [&](const Point<S>& u) {
        if constexpr (scalar_traits<S>::exact)
            return !is_zero_point(u);
        else
            return to_double(max_abs(u)) > tol.dedup;
    };
    for (const auto& a : plan.atoms()) {
        if (longer_than_noise(a.x - a.z)) bars.push_back({a.z, a.x, 1, a.w});
        if (longer_than_noise(a.y - a.z)) bars.push_back({a.z, a.y, -1, a.w});
    }
    return GrillageMeasure<S>(std::move(bars));
}

// ---------------------------------------------------------------------------
// Total variation
// ---------------------------------------------------------------------------

template <class S>
S total_variation(const GrillageMeasure<S>& g, const Tolerances&) {
    // A bar on the line {foot + s*d} has signed linear density
    // sign * w * |s - s_z| * |d| against arclength |d| ds, so per line the
    // total variation is |d|^2 * integral of |sum of the signed profiles|.
    // Lines are keyed exactly: d is the segment direction scaled so its first
    // nonzero component is 1, foot is the perpendicular foot of the origin.
    struct LineBar {
        S s_z, s_lo, s_hi, w; // w carries the sign
    };
    std::map<std::pair<Point<S>, Point<S>>, std::pair<S, std::vector<LineBar>>> lines;
    for (const auto& bar : g.bars()) {
        const Point<S> u = bar.to - bar.from;
        int lead = -1;
        for (int i = 0; i < u.dim() && lead < 0; ++i)
            if (!(u[i] == S(0))) lead = i;
        if (lead < 0) continue;
        const Point<S> d = u * (S(1) / u[lead]);
        const S dn = norm_sq(d);
        const S s_from = dot(bar.from, d) / dn;
        const S s_to = dot(bar.to, d) / dn;
        const Point<S> foot = bar.from - s_from * d;
        auto& slot = lines[{d, foot}];
        slot.first = dn;
        const S sw = S(bar.sign) * bar.weight;
        slot.second.push_back(
            {s_from, std::min(s_from, s_to), std::max(s_from, s_to), sw});
    }

    S total(0);
    for (const auto& kv : lines) {
        const S& dn = kv.second.first;
        const auto& bars = kv.second.second;
        std::vector<S> cuts;
        cuts.reserve(2 * bars.size());
        for (const auto& b : bars) {
            cuts.push_back(b.s_lo);
            cuts.push_back(b.s_hi);
        }
        std::sort(cuts.begin(), cuts.end());
        cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

        S line_total(0);
        for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
            const S& a = cuts[c];
            const S& b = cuts[c + 1];
            // every covering bar's kink s_z is itself a cut, so the summed
            // profile h is affine on [a, b]
            S ha(0), hb(0);
            for (const auto& lb : bars) {
                if (lb.s_lo <= a && b <= lb.s_hi) {
                    const S da = a - lb.s_z;
                    const S db = b - lb.s_z;
                    ha += lb.w * abs_value(da);
                    hb += lb.w * abs_value(db);
                }
            }
            const bool crosses = (ha > S(0) && hb < S(0)) || (ha < S(0) && hb > S(0));
            if (!crosses) {
                const S avg = (ha + hb) / S(2) * (b - a);
                line_total += abs_value(avg);
            } else {
                const S r = a + (b - a) * ha / (ha - hb);
                const S part = (abs_value(ha) * (r - a) + abs_value(hb) * (b - r)) / S(2);
                line_total += part;
            }
        }
        total += dn * line_total;
    }
    return total;
}

// ---------------------------------------------------------------------------
// Weak second divergence
// ---------------------------------------------------------------------------

template <class S>
Div2Report<S> verify_div2(const GrillageMeasure<S>& g, const DiscreteMeasure<S>& mu,
                          const DiscreteMeasure<S>& nu, int degree) {
    if (degree < 2) throw input_error("verify_div2 requires degree >= 2");
    if (mu.dim() != 2 || nu.dim() != 2) throw input_error("verify_div2 requires dimension 2");

    std::vector<std::vector<S>> choose(degree + 1);
    for (int i = 0; i <= degree; ++i) {
        choose[i].assign(i + 1, S(1));
        for (int j = 1; j < i; ++j) choose[i][j] = choose[i - 1][j - 1] + choose[i - 1][j];
    }
    // coefficients of t -> (z + t*u)^p as a polynomial in t
    const auto binomial_poly = [&](const S& z, const S& u, int p) {
        std::vector<S> c(p + 1);
        for (int i = 0; i <= p; ++i) c[i] = choose[p][i] * power(z, p - i) * power(u, i);
        return c;
    };

    Div2Report<S> rep;
    rep.degree = degree;
    rep.max_residual = S(0);
    for (int total = 0; total <= degree; ++total) {
        for (int p = total; p >= 0; --p) {
            const int q = total - p;
            typename Div2Report<S>::Entry e;
            e.p = p;
            e.q = q;
            // lhs: each bar contributes sign * w * int_0^1 t (phi(z+tu))'' dt
            //    = sign * w * sum_{k>=2} (k-1) c_k   for phi(z+tu) = sum c_k t^k
            e.lhs = S(0);
            for (const auto& bar : g.bars()) {
                const Point<S> u = bar.to - bar.from;
                const auto c1 = binomial_poly(bar.from[0], u[0], p);
                const auto c2 = binomial_poly(bar.from[1], u[1], q);
                S acc(0);
                for (int i = 0; i <= p; ++i)
                    for (int j = 0; j <= q; ++j) {
                        const int k = i + j;
                        if (k >= 2) acc += S(k - 1) * c1[i] * c2[j];
                    }
                e.lhs += S(bar.sign) * bar.weight * acc;
            }
            e.rhs = S(0);
            for (const auto& a : nu.atoms()) e.rhs += a.w * power(a.x[0], p) * power(a.x[1], q);
            for (const auto& a : mu.atoms()) e.rhs -= a.w * power(a.x[0], p) * power(a.x[1], q);
            const S diff = e.lhs - e.rhs;
            e.residual = abs_value(diff);
            rep.max_residual = std::max(rep.max_residual, e.residual);
            rep.entries.push_back(std::move(e));
        }
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Export
// ---------------------------------------------------------------------------

template <class S>
std::string export_svg(const GrillageMeasure<S>& g) {
    std::ostringstream os;
    os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    if (g.bars().empty()) {
        os << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 100 100\"></svg>\n";
        return os.str();
    }
    double lo[2] = {0, 0}, hi[2] = {0, 0};
    bool first = true;
    double max_density = 0.0;
    for (const auto& b : g.bars()) {
        for (const Point<S>* p : {&b.from, &b.to})
            for (int c = 0; c < 2; ++c) {
                const double v = to_double((*p)[c]);
                if (first || v < lo[c]) lo[c] = v;
                if (first || v > hi[c]) hi[c] = v;
                if (c == 1) first = false;
            }
        const double len_sq = to_double(norm_sq(b.to - b.from));
        max_density = std::max(max_density, to_double(b.weight) * std::sqrt(len_sq) / 2.0);
    }
    const double span = std::max({hi[0] - lo[0], hi[1] - lo[1], 1.0});
    const double margin = 0.1 * span;
    // flip the y axis so the mathematical orientation is preserved on screen
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"" << fmt(lo[0] - margin) << " "
       << fmt(-(hi[1] + margin)) << " " << fmt(hi[0] - lo[0] + 2 * margin) << " "
       << fmt(hi[1] - lo[1] + 2 * margin) << "\">\n";
    os << "<g transform=\"scale(1,-1)\" stroke-linecap=\"round\">\n";
    for (const auto& b : g.bars()) {
        const double density = to_double(b.weight) *
                               std::sqrt(to_double(norm_sq(b.to - b.from))) / 2.0;
        const double width =
            std::max(0.004 * span, 0.035 * span * (max_density > 0 ? density / max_density : 0));
        os << "<line x1=\"" << fmt(to_double(b.from[0])) << "\" y1=\"" << fmt(to_double(b.from[1]))
           << "\" x2=\"" << fmt(to_double(b.to[0])) << "\" y2=\"" << fmt(to_double(b.to[1]))
           << "\" stroke=\"" << (b.sign > 0 ? "#b2182b" : "#2166ac") << "\" stroke-width=\""
           << fmt(width) << "\"/>\n";
    }
    os << "</g>\n</svg>\n";
    return os.str();
}

template <class S>
std::string export_csv(const GrillageMeasure<S>& g) {
    std::ostringstream os;
    os << "x1,y1,x2,y2,sign,weight,mass\n";
    for (const auto& b : g.bars()) {
        os << fmt(to_double(b.from[0]), "%.17g") << "," << fmt(to_double(b.from[1]), "%.17g")
           << "," << fmt(to_double(b.to[0]), "%.17g") << "," << fmt(to_double(b.to[1]), "%.17g")
           << "," << b.sign << "," << fmt(to_double(b.weight), "%.17g") << ","
           << fmt(to_double(b.mass()), "%.17g") << "\n";
    }
    return os.str();
}

// ---------------------------------------------------------------------------

template class GrillageMeasure<double>;
template class GrillageMeasure<Rational>;

template GrillageMeasure<double> bars_from_plan(const ThreePlan<double>&, const Tolerances&);
template GrillageMeasure<Rational> bars_from_plan(const ThreePlan<Rational>&, const Tolerances&);

template double total_variation(const GrillageMeasure<double>&, const Tolerances&);
template Rational total_variation(const GrillageMeasure<Rational>&, const Tolerances&);

template Div2Report<double> verify_div2(const GrillageMeasure<double>&,
                                        const DiscreteMeasure<double>&,
                                        const DiscreteMeasure<double>&, int);
template Div2Report<Rational> verify_div2(const GrillageMeasure<Rational>&,
                                          const DiscreteMeasure<Rational>&,
                                          const DiscreteMeasure<Rational>&, int);

template std::string export_svg(const GrillageMeasure<double>&);
template std::string export_svg(const GrillageMeasure<Rational>&);

template std::string export_csv(const GrillageMeasure<double>&);
template std::string export_csv(const GrillageMeasure<Rational>&);

} // namespace bimart
