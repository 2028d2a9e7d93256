#include "doctest.h"

#include "bimart/instance.hpp"
#include "support/oracles.hpp"

#include <random>

using namespace bimart;
using R = Rational;

namespace {

DiscreteMeasure<R> make(int dim, std::vector<WeightedAtom<R>> atoms) {
    return DiscreteMeasure<R>(dim, std::move(atoms));
}

} // namespace

TEST_SUITE("measures") {

TEST_CASE("barycenter of symmetric two-point measure is the midpoint") {
    const auto m = make(1, {{{R(-1)}, R(1, 2)}, {{R(1)}, R(1, 2)}});
    CHECK(barycenter(m) == Point<R>{R(0)});
}

TEST_CASE("barycenter of the three-atom degenerate source is the origin") {
    const auto m = make(2, {{{R(-1), R(-1)}, R(1, 4)},
                            {{R(1), R(-1)}, R(1, 4)},
                            {{R(0), R(1)}, R(1, 2)}});
    CHECK(barycenter(m) == (Point<R>{R(0), R(0)}));
    CHECK(barycenter(m) == oracle::first_moment(m) * (R(1) / oracle::mass_direct(m)));
}

TEST_CASE("barycenter of a point mass is the point") {
    const Point<R> p{R(3), R(-7), R(1, 3)};
    CHECK(barycenter(dirac(p)) == p);
}

TEST_CASE("empty measure has no barycenter") {
    const DiscreteMeasure<R> m;
    CHECK_THROWS_AS(barycenter(m), input_error);
}

TEST_CASE("negative weights are rejected") {
    CHECK_THROWS_AS(make(1, {{{R(0)}, R(-1)}}), input_error);
}

TEST_CASE("construction canonicalizes: sorted, merged, zero weights dropped") {
    const auto m = make(1, {{{R(2)}, R(1, 4)},
                            {{R(1)}, R(1, 4)},
                            {{R(2)}, R(1, 4)},
                            {{R(5)}, R(0)},
                            {{R(1)}, R(1, 4)}});
    REQUIRE(m.size() == 2);
    CHECK(m.atoms()[0].x == Point<R>{R(1)});
    CHECK(m.atoms()[0].w == R(1, 2));
    CHECK(m.atoms()[1].x == Point<R>{R(2)});
    CHECK(m.atoms()[1].w == R(1, 2));
    CHECK(m.is_probability());
}

TEST_CASE("merging duplicates changes no moment") {
    std::mt19937 rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        const int dim = 1 + int(rng() % 3);
        const auto base = generate_random_measure(rng, dim, 4, false);
        // re-list every atom twice at half weight
        std::vector<WeightedAtom<R>> doubled;
        for (const auto& a : base.atoms()) {
            doubled.push_back({a.x, a.w / 2});
            doubled.push_back({a.x, a.w / 2});
        }
        const auto again = make(dim, std::move(doubled));
        CHECK(again.equals(base));
        CHECK(barycenter(again) == barycenter(base));
        CHECK(variance(again) == variance(base));
        CHECK(covariance_difference(base, again) == SymmetricMatrix<R>(dim));
    }
}

TEST_CASE("variance of a point mass is zero") {
    CHECK(variance(dirac(Point<R>{R(4), R(5)})) == R(0));
}

TEST_CASE("variance of the symmetric two-point measure is one") {
    const auto m = make(1, {{{R(-1)}, R(1, 2)}, {{R(1)}, R(1, 2)}});
    CHECK(variance(m) == R(1));
}

TEST_CASE("variance of the four-corner measure is two") {
    const auto nu = make(2, {{{R(-1), R(-1)}, R(1, 4)},
                             {{R(1), R(-1)}, R(1, 4)},
                             {{R(-1), R(1)}, R(1, 4)},
                             {{R(1), R(1)}, R(1, 4)}});
    CHECK(variance(nu) == R(2));
}

TEST_CASE("variance and second moment match direct summation") {
    std::mt19937 rng(23);
    for (int trial = 0; trial < 30; ++trial) {
        const int dim = 1 + int(rng() % 3);
        const auto m = generate_random_measure(rng, dim, 1 + int(rng() % 5), false);
        CHECK(variance(m) == oracle::variance_direct(m));
        CHECK(second_moment_trace(m) == oracle::second_moment(m).trace());
        CHECK(m.total_mass() == oracle::mass_direct(m));
    }
}

TEST_CASE("covariance difference of a measure with itself vanishes") {
    std::mt19937 rng(31);
    const auto m = generate_random_measure(rng, 2, 4, false);
    CHECK(covariance_difference(m, m) == SymmetricMatrix<R>(2));
}

TEST_CASE("covariance difference of the degenerate example is diag(1/2, 0)") {
    const auto [mu, nu] = degenerate_covariance_instance<R>();
    const auto c = covariance_difference(mu, nu);
    const Point<R> e2{R(0), R(1)};
    CHECK(dot(e2, c.apply(e2)) == R(0));
    CHECK(c.at(0, 0) == R(1, 2));
    CHECK(c.at(0, 1) == R(0));
    CHECK(c.at(1, 0) == R(0));
    CHECK(c.at(1, 1) == R(0));
    // independent oracle: direct summation over the seven atoms
    CHECK(c == oracle::second_moment(nu) - oracle::second_moment(mu));
}

TEST_CASE("covariance difference is antisymmetric in its arguments") {
    std::mt19937 rng(37);
    for (int trial = 0; trial < 20; ++trial) {
        const int dim = 1 + int(rng() % 3);
        const auto a = generate_random_measure(rng, dim, 3, false).normalized();
        const auto b = generate_random_measure(rng, dim, 3, false).normalized();
        const auto ab = covariance_difference(a, b);
        auto ba = covariance_difference(b, a);
        ba += ab;
        CHECK(ba == SymmetricMatrix<R>(dim));
    }
}

TEST_CASE("trace of the covariance difference is the variance gap at common barycenter") {
    std::mt19937 rng(41);
    for (int trial = 0; trial < 20; ++trial) {
        const int dim = 1 + int(rng() % 3);
        const auto mu = generate_random_measure(rng, dim, 4, true).normalized();
        const auto nu = generate_random_measure(rng, dim, 4, true).normalized();
        CHECK(covariance_difference(mu, nu).trace() == variance(nu) - variance(mu));
    }
}

TEST_CASE("covariance difference rejects dimension mismatch") {
    const auto a = dirac(Point<R>{R(0)});
    const auto b = dirac(Point<R>{R(0), R(0)});
    CHECK_THROWS_AS(covariance_difference(a, b), input_error);
}

TEST_CASE("normalized rescales to a probability") {
    const auto m = make(1, {{{R(0)}, R(3)}, {{R(2)}, R(1)}});
    const auto p = m.normalized();
    CHECK(p.is_probability());
    CHECK(p.atoms()[0].w == R(3, 4));
    CHECK(barycenter(p) == barycenter(m));
}

TEST_CASE("mixtures add atomwise") {
    const auto a = make(1, {{{R(0)}, R(1, 2)}, {{R(1)}, R(1, 2)}});
    const auto b = make(1, {{{R(1)}, R(1, 2)}, {{R(2)}, R(1, 2)}});
    const auto mix = a.mixed_with(b, R(1));
    REQUIRE(mix.size() == 3);
    CHECK(mix.atoms()[1].x == Point<R>{R(1)});
    CHECK(mix.atoms()[1].w == R(1));
    CHECK(mix.total_mass() == R(2));
}

TEST_CASE("float mode merges atoms within the dedup tolerance") {
    const Tolerances tol;
    const DiscreteMeasure<double> m(
        1, {{Point<double>{0.0}, 0.5}, {Point<double>{1e-13}, 0.5}}, tol);
    CHECK(m.size() == 1);
    CHECK(m.total_mass() == doctest::Approx(1.0));
}

} // TEST_SUITE
