#include "doctest.h"

#include "bimart/instance.hpp"
#include "support/oracles.hpp"

#include <random>

using namespace bimart;
using R = Rational;

TEST_SUITE("instances") {

TEST_CASE("the degenerate example is balanced with a rank-one covariance gap") {
    const auto [mu, nu] = degenerate_covariance_instance<R>();
    CHECK(mu.dim() == 2);
    CHECK(mu.size() == 3);
    CHECK(nu.size() == 4);
    CHECK(mu.is_probability());
    CHECK(nu.is_probability());
    CHECK(barycenter(mu) == Point<R>(2));
    CHECK(barycenter(nu) == Point<R>(2));

    SymmetricMatrix<R> expected(2);
    expected.add_outer(Point<R>{R(1), R(0)}, R(1, 2));
    CHECK(covariance_difference(mu, nu) == expected);
    // the vertical axis is degenerate for the gap
    const Point<R> e2{R(0), R(1)};
    CHECK(dot(e2, covariance_difference(mu, nu).apply(e2)) == R(0));
}

TEST_CASE("the float rendering of the degenerate example matches the exact one") {
    const auto [mu, nu] = degenerate_covariance_instance<R>();
    const auto [fmu, fnu] = degenerate_covariance_instance<double>();
    CHECK(to_float(mu).equals(fmu));
    CHECK(to_float(nu).equals(fnu));
}

TEST_CASE("the counterexample coupling has balanced marginals but no split works") {
    const auto pi = counterexample_coupling<R>();
    CHECK(pi.dim() == 2);
    CHECK(pi.total_mass() == R(1));
    const auto mu = pi.first_marginal();
    const auto nu = pi.second_marginal();
    CHECK(mu.size() == 2);
    CHECK(nu.size() == 2);
    CHECK(barycenter(mu) == barycenter(nu));
    // plain convex order fails in both directions: neither marginal dominates
    CHECK(!check_convex_order(mu, nu).has_value());
    CHECK(!check_convex_order(nu, mu).has_value());
    CHECK(!oracle::martingale_coupling_exists(mu, nu));
}

TEST_CASE("the counterexample pair is the coordinate split of the plane") {
    const auto pair = counterexample_pair<R>();
    CHECK(pair.dim == 2);
    REQUIRE(pair.dim1() == 1);
    REQUIRE(pair.dim2() == 1);
    CHECK(pair.basis1[0] == Point<R>{R(1), R(0)});
    CHECK(pair.basis2[0] == Point<R>{R(0), R(1)});
    CHECK(pair.kernel.empty());
}

TEST_CASE("the counterexample coupling violates its own split by one half") {
    const auto pi = counterexample_coupling<R>();
    const auto rep = verify_bimartingale(pi, counterexample_pair<R>());
    CHECK(rep.max_violation == R(1, 2));
}

TEST_CASE("forward instances are exactly bimartingale with the stated cost") {
    std::mt19937 rng(29);
    for (int trial = 0; trial < 50; ++trial) {
        const auto inst = generate_forward_instance(rng, 3, 6);
        CAPTURE(trial);
        REQUIRE(inst.mu.dim() == inst.nu.dim());
        CHECK(inst.mu.is_probability());
        CHECK(inst.nu.is_probability());
        CHECK(barycenter(inst.mu) == barycenter(inst.nu));
        CHECK(inst.pi.first_marginal().equals(inst.mu));
        CHECK(inst.pi.second_marginal().equals(inst.nu));
        CHECK(verify_bimartingale(inst.pi, inst.pair).max_violation == R(0));
        // the named optimal value is half the nuclear norm of the moment gap
        CHECK(inst.true_cost == schatten1(covariance_difference(inst.mu, inst.nu)) / R(2));
        // and the image plan realizes it
        CHECK(assemble_from_bimartingale(inst.pi, inst.pair).total_cost() == inst.true_cost);
    }
}

TEST_CASE("forward instances satisfy the independent coupling oracle") {
    std::mt19937 rng(31);
    for (int trial = 0; trial < 20; ++trial) {
        const auto inst = generate_forward_instance(rng, 3, 5);
        CAPTURE(trial);
        CHECK(oracle::bimartingale_coupling_exists(inst.mu, inst.nu, inst.pair));
    }
}

TEST_CASE("merge instances are convex-ordered by construction") {
    std::mt19937 rng(37);
    for (int trial = 0; trial < 30; ++trial) {
        const auto [mu, nu] = generate_merge_instance(rng, 3, 6);
        CAPTURE(trial);
        CHECK(mu.is_probability());
        CHECK(nu.is_probability());
        CHECK(barycenter(mu) == barycenter(nu));
        CHECK(oracle::martingale_coupling_exists(mu, nu));
        const auto witness = check_convex_order(mu, nu);
        REQUIRE(witness.has_value());
        CHECK(martingale_residual(*witness) == R(0));
        CHECK(witness->first_marginal().equals(mu));
        CHECK(witness->second_marginal().equals(nu));
    }
}

TEST_CASE("centered random measures have an exactly zero barycenter") {
    std::mt19937 rng(41);
    for (int trial = 0; trial < 25; ++trial) {
        const int dim = 1 + int(rng() % 3);
        const auto m = generate_random_measure(rng, dim, 4, true);
        CAPTURE(trial);
        CHECK(m.dim() == dim);
        CHECK(m.size() >= 1);
        CHECK(m.total_mass() > R(0));
        CHECK(barycenter(m) == Point<R>(dim));
    }
}

TEST_CASE("generators are deterministic in the seed") {
    std::mt19937 a(53), b(53);
    const auto ia = generate_forward_instance(a, 3, 6);
    const auto ib = generate_forward_instance(b, 3, 6);
    CHECK(ia.mu.equals(ib.mu));
    CHECK(ia.nu.equals(ib.nu));
    CHECK(ia.true_cost == ib.true_cost);
    const auto ma = generate_merge_instance(a, 3, 6);
    const auto mb = generate_merge_instance(b, 3, 6);
    CHECK(ma.first.equals(mb.first));
    CHECK(ma.second.equals(mb.second));
}

TEST_CASE("exact-to-float conversion preserves atoms and mass") {
    std::mt19937 rng(59);
    const auto m = generate_random_measure(rng, 2, 5, false).normalized();
    const auto f = to_float(m);
    REQUIRE(f.dim() == 2);
    CHECK(f.is_probability());
    REQUIRE(f.size() == m.size());
    for (int i = 0; i < m.size(); ++i) {
        const auto& exact = m.atoms()[size_t(i)];
        const auto& rough = f.atoms()[size_t(i)];
        CHECK(rough.w == doctest::Approx(to_double(exact.w)).epsilon(1e-12));
        for (int k = 0; k < 2; ++k)
            CHECK(rough.x[k] == doctest::Approx(to_double(exact.x[k])).epsilon(1e-12));
    }

    const auto pi = counterexample_coupling<R>();
    const auto fpi = to_float(pi);
    CHECK(fpi.total_mass() == 1.0);
    CHECK(fpi.size() == pi.size());
}

} // TEST_SUITE
