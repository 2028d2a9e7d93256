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

// exact rotation by the 3-4-5 angle applied to every atom
Point<R> rot(const Point<R>& p) {
    return Point<R>{R(3, 5) * p[0] - R(4, 5) * p[1], R(4, 5) * p[0] + R(3, 5) * p[1]};
}

DiscreteMeasure<R> rot(const DiscreteMeasure<R>& m) {
    std::vector<WeightedAtom<R>> atoms;
    for (const auto& a : m.atoms()) atoms.push_back({rot(a.x), a.w});
    return DiscreteMeasure<R>(2, std::move(atoms));
}

} // namespace

TEST_SUITE("order") {

TEST_CASE("couplings canonicalize and expose exact marginals") {
    Coupling<R> pi(1, {{{R(1)}, {R(0)}, R(1, 4)},
                       {{R(0)}, {R(0)}, R(1, 2)},
                       {{R(1)}, {R(0)}, R(1, 4)}});
    REQUIRE(pi.size() == 2);
    CHECK(pi.total_mass() == R(1));
    CHECK(pi.first_marginal().equals(
        make(1, {{{R(0)}, R(1, 2)}, {{R(1)}, R(1, 2)}})));
    CHECK(pi.second_marginal().equals(dirac(Point<R>{R(0)})));
    // direct summation: the merged (1 -> 0) atom carries weight 1/2 and cost |1-0|^2
    CHECK(pi.quadratic_cost() == R(1, 2));
}

TEST_CASE("identity coupling has zero martingale residual") {
    std::mt19937 rng(3);
    const auto m = generate_random_measure(rng, 2, 4, false).normalized();
    const auto pi = identity_coupling(m);
    CHECK(martingale_residual(pi) == R(0));
    CHECK(pi.first_marginal().equals(m));
    CHECK(pi.second_marginal().equals(m));
    CHECK(pi.quadratic_cost() == R(0));
}

TEST_CASE("a point mass precedes its symmetric spread in convex order") {
    const auto mu = dirac(Point<R>{R(0)});
    const auto nu = make(1, {{{R(-1)}, R(1, 2)}, {{R(1)}, R(1, 2)}});
    const auto witness = check_convex_order(mu, nu);
    REQUIRE(witness.has_value());
    REQUIRE(witness->size() == 2);
    CHECK(witness->atoms()[0].x == Point<R>{R(0)});
    CHECK(witness->atoms()[0].y == Point<R>{R(-1)});
    CHECK(witness->atoms()[0].w == R(1, 2));
    CHECK(witness->atoms()[1].y == Point<R>{R(1)});
    CHECK(martingale_residual(*witness) == R(0));

    CHECK_FALSE(check_convex_order(nu, mu).has_value());
}

TEST_CASE("the first-leaf conditionals of the degenerate example are convex-ordered") {
    const auto mu1 = dirac(Point<R>{R(0), R(1)});
    const auto nu1 = make(2, {{{R(-1), R(1)}, R(1, 2)}, {{R(1), R(1)}, R(1, 2)}});
    const auto witness = check_convex_order(mu1, nu1);
    REQUIRE(witness.has_value());
    CHECK(martingale_residual(*witness) == R(0));
    CHECK(witness->first_marginal().equals(mu1));
    CHECK(witness->second_marginal().equals(nu1));
}

TEST_CASE("convex order verdicts match the enumeration reference") {
    std::mt19937 rng(201);
    int holds = 0, fails = 0;
    for (int trial = 0; trial < 40; ++trial) {
        DiscreteMeasure<R> mu, nu;
        if (trial % 2 == 0) {
            std::tie(mu, nu) = generate_merge_instance(rng, 2, 3);
        } else {
            const int dim = 1 + int(rng() % 2);
            mu = generate_random_measure(rng, dim, 1 + int(rng() % 3), true).normalized();
            nu = generate_random_measure(rng, dim, 1 + int(rng() % 3), true).normalized();
        }
        const auto witness = check_convex_order(mu, nu);
        CAPTURE(trial);
        CHECK(witness.has_value() == oracle::martingale_coupling_exists(mu, nu));
        if (witness) {
            ++holds;
            CHECK(martingale_residual(*witness) == R(0));
            CHECK(witness->first_marginal().equals(mu));
            CHECK(witness->second_marginal().equals(nu));
        } else {
            ++fails;
        }
    }
    CHECK(holds > 5);
    CHECK(fails > 5);
}

TEST_CASE("convex order implies the convex-function inequality") {
    std::mt19937 rng(203);
    for (int trial = 0; trial < 10; ++trial) {
        const auto [mu, nu] = generate_merge_instance(rng, 3, 5);
        REQUIRE(check_convex_order(mu, nu).has_value());
        for (int probe = 0; probe < 50; ++probe) {
            const auto g = oracle::random_max_affine(rng, mu.dim(), 3);
            CHECK(oracle::integral(mu, g) <= oracle::integral(nu, g));
        }
    }
}

TEST_CASE("check_convex_order rejects dimension mismatch") {
    CHECK_THROWS_AS(check_convex_order(dirac(Point<R>{R(0)}), dirac(Point<R>{R(0), R(0)})),
                    input_error);
}

TEST_CASE("a measure is bimartingale-coupled to itself by the identity") {
    std::mt19937 rng(207);
    const auto m = generate_random_measure(rng, 2, 3, false).normalized();
    const auto pair = counterexample_pair<R>();
    const auto witness = find_bimartingale(m, m, pair);
    REQUIRE(witness.has_value());
    CHECK(verify_bimartingale(*witness, pair).max_violation == R(0));
    CHECK(witness->quadratic_cost() == R(0)); // minimal-cost witness is the diagonal
}

TEST_CASE("the counterexample marginals admit no bimartingale coupling") {
    const auto pi = counterexample_coupling<R>();
    const auto pair = counterexample_pair<R>();
    const auto mu = pi.first_marginal();
    const auto nu = pi.second_marginal();
    CHECK_FALSE(find_bimartingale(mu, nu, pair).has_value());
    CHECK_FALSE(oracle::bimartingale_coupling_exists(mu, nu, pair));
}

TEST_CASE("the counterexample coupling itself fails verification at x = (0,1)") {
    const auto pi = counterexample_coupling<R>();
    const auto pair = counterexample_pair<R>();
    const auto report = verify_bimartingale(pi, pair);
    CHECK(report.max_violation == R(1, 2));
    bool found = false;
    for (const auto& e : report.source)
        if (e.point == (Point<R>{R(0), R(1)})) {
            found = true;
            CHECK(e.residual == (Point<R>{R(-1, 2), R(0)}));
        }
    CHECK(found);
}

TEST_CASE("bimartingale witnesses verify with zero residual") {
    std::mt19937 rng(211);
    int found = 0;
    for (int trial = 0; trial < 30; ++trial) {
        const auto inst = generate_forward_instance(rng, 3, 4);
        if (!inst.pair.complementing()) continue;
        const auto witness = find_bimartingale(inst.mu, inst.nu, inst.pair);
        CAPTURE(trial);
        REQUIRE(witness.has_value());
        ++found;
        CHECK(verify_bimartingale(*witness, inst.pair).max_violation == R(0));
        const auto [fwd, bwd] = marginal_martingale_pushforwards(*witness, inst.pair);
        CHECK(martingale_residual(fwd) == R(0));
        CHECK(martingale_residual(bwd) == R(0));
    }
    CHECK(found > 10);
}

TEST_CASE("find_bimartingale verdicts match the enumeration reference") {
    std::mt19937 rng(213);
    int holds = 0, fails = 0;
    const auto pair = counterexample_pair<R>();
    for (int trial = 0; trial < 25; ++trial) {
        auto mu = generate_random_measure(rng, 2, 1 + int(rng() % 3), true).normalized();
        auto nu = generate_random_measure(rng, 2, 1 + int(rng() % 3), true).normalized();
        const auto witness = find_bimartingale(mu, nu, pair);
        CAPTURE(trial);
        CHECK(witness.has_value() == oracle::bimartingale_coupling_exists(mu, nu, pair));
        witness ? ++holds : ++fails;
    }
    CHECK(holds + fails == 25);
    CHECK(fails > 5);
}

TEST_CASE("with the full space as V1 the bimartingale check is the convex order") {
    std::mt19937 rng(217);
    for (int trial = 0; trial < 100; ++trial) {
        const int dim = 1 + int(rng() % 2);
        DiscreteMeasure<R> mu, nu;
        if (trial % 2 == 0) {
            std::tie(mu, nu) = generate_merge_instance(rng, dim, 3);
        } else {
            mu = generate_random_measure(rng, dim, 1 + int(rng() % 3), true).normalized();
            nu = generate_random_measure(rng, dim, 1 + int(rng() % 3), true).normalized();
        }
        const auto full = full_space_pair<R>(mu.dim());
        CAPTURE(trial);
        CHECK(find_bimartingale(mu, nu, full).has_value() ==
              check_convex_order(mu, nu).has_value());
    }
}

TEST_CASE("bimartingale feasibility requires a common barycenter") {
    const auto mu = dirac(Point<R>{R(0), R(0)});
    const auto nu = dirac(Point<R>{R(1), R(0)});
    CHECK_THROWS_AS(find_bimartingale(mu, nu, counterexample_pair<R>()), input_error);
}

TEST_CASE("bimartingale feasibility requires complementing subspaces") {
    const auto m = dirac(Point<R>{R(0), R(0)});
    const auto pair = make_subspace_pair<R>(2, {Point<R>{R(1), R(0)}}, {});
    CHECK_THROWS_AS(find_bimartingale(m, m, pair), input_error);
}

TEST_CASE("success implies the convex-concave inequality for split test functions") {
    std::mt19937 rng(223);
    int found = 0;
    for (int trial = 0; trial < 20 && found < 8; ++trial) {
        const auto inst = generate_forward_instance(rng, 3, 4);
        if (!inst.pair.complementing()) continue;
        ++found;
        // f(v) = g(<b1, v>, ...) - h(<b2, v>, ...): convex along V1, concave along V2
        auto coords = [](const std::vector<Point<R>>& basis, const Point<R>& v) {
            std::vector<R> c;
            for (const auto& b : basis) c.push_back(dot(b, v));
            return Point<R>(std::move(c));
        };
        for (int probe = 0; probe < 50; ++probe) {
            const auto g = oracle::random_max_affine(rng, inst.pair.dim1(), 3);
            const auto h = oracle::random_max_affine(rng, std::max(inst.pair.dim2(), 1), 3);
            auto f = [&](const Point<R>& v) {
                R val = inst.pair.dim1() > 0 ? g(coords(inst.pair.basis1, v)) : R(0);
                if (inst.pair.dim2() > 0) val -= h(coords(inst.pair.basis2, v));
                return val;
            };
            CHECK(oracle::integral(inst.mu, f) <= oracle::integral(inst.nu, f));
        }
    }
    CHECK(found == 8);
}

TEST_CASE("feasibility verdicts are rotation invariant") {
    std::mt19937 rng(227);
    const auto pair = counterexample_pair<R>();
    for (int trial = 0; trial < 10; ++trial) {
        const auto mu = generate_random_measure(rng, 2, 2, true).normalized();
        const auto nu = generate_random_measure(rng, 2, 2, true).normalized();
        const auto plain = find_bimartingale(mu, nu, pair);
        const auto rpair = make_subspace_pair<R>(2, {rot(Point<R>{R(1), R(0)})},
                                                 {rot(Point<R>{R(0), R(1)})});
        const auto rotated = find_bimartingale(rot(mu), rot(nu), rpair);
        CHECK(plain.has_value() == rotated.has_value());
    }
}

TEST_CASE("pushforwards of the counterexample match the worked values") {
    const auto pi = counterexample_coupling<R>();
    const auto pair = counterexample_pair<R>();
    const auto [fwd, bwd] = marginal_martingale_pushforwards(pi, pair);
    // forward V1 coupling: 1/2 (delta_(0,-1) + delta_(0,1)) in basis coordinates
    REQUIRE(fwd.size() == 2);
    CHECK(fwd.atoms()[0].x == Point<R>{R(0)});
    CHECK(fwd.atoms()[0].y == Point<R>{R(-1)});
    CHECK(fwd.atoms()[0].w == R(1, 2));
    CHECK(fwd.atoms()[1].y == Point<R>{R(1)});
    // swapped V2 coupling: 1/2 (delta_(1,1) + delta_(-1,-1))
    REQUIRE(bwd.size() == 2);
    CHECK(bwd.atoms()[0].x == Point<R>{R(-1)});
    CHECK(bwd.atoms()[0].y == Point<R>{R(-1)});
    CHECK(bwd.atoms()[1].x == Point<R>{R(1)});
    CHECK(bwd.atoms()[1].y == Point<R>{R(1)});
    // both are martingale couplings even though pi is not bimartingale
    CHECK(martingale_residual(fwd) == R(0));
    CHECK(martingale_residual(bwd) == R(0));
}

TEST_CASE("pushforwards of an identity coupling are identity couplings") {
    std::mt19937 rng(229);
    const auto m = generate_random_measure(rng, 2, 3, false).normalized();
    const auto pair = counterexample_pair<R>();
    const auto [fwd, bwd] = marginal_martingale_pushforwards(identity_coupling(m), pair);
    for (const auto& a : fwd.atoms()) CHECK(a.x == a.y);
    for (const auto& a : bwd.atoms()) CHECK(a.x == a.y);
}

} // TEST_SUITE
