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

Point<R> rot(const Point<R>& p) {
    return Point<R>{R(3, 5) * p[0] - R(4, 5) * p[1], R(4, 5) * p[0] + R(3, 5) * p[1]};
}

DiscreteMeasure<R> map_measure(const DiscreteMeasure<R>& m, auto&& f) {
    std::vector<WeightedAtom<R>> atoms;
    for (const auto& a : m.atoms()) atoms.push_back({f(a.x), a.w});
    return DiscreteMeasure<R>(m.dim(), std::move(atoms));
}

// two-stage grid: structured candidates, then the always-feasible convolution
// points z = x + y - b as a fallback
SolveReport<R> solve_two_stage(const DiscreteMeasure<R>& mu, const DiscreteMeasure<R>& nu) {
    const auto dual = quadratic_dual_bound(mu, nu);
    auto grid = build_z_grid(mu, nu, std::optional<SubspacePair<R>>(dual.pair));
    auto sol = solve_primal(mu, nu, grid);
    if (sol.status == SolveStatus::optimal) return sol;
    std::vector<Point<R>> extras;
    const Point<R> b = barycenter(mu);
    for (const auto& ax : mu.atoms())
        for (const auto& ay : nu.atoms()) extras.push_back(ax.x + ay.x - b);
    grid = build_z_grid(mu, nu, std::optional<SubspacePair<R>>{}, extras);
    return solve_primal(mu, nu, grid);
}

} // namespace

TEST_SUITE("solver") {

TEST_CASE("the cost function is the symmetric squared spread around z") {
    const Point<R> x{R(-1), R(0)}, y{R(1), R(0)}, z{R(0), R(0)};
    CHECK(cost(x, x, x) == R(0));
    CHECK(cost(x, y, z) == R(1));
    // translation invariance
    std::mt19937 rng(7);
    const Point<R> t{oracle::small_rational(rng), oracle::small_rational(rng)};
    CHECK(cost(x + t, y + t, z + t) == cost(x, y, z));
}

TEST_CASE("the structured midpoint collapses the cost to the coupling cost") {
    std::mt19937 rng(11);
    const auto pair = counterexample_pair<R>();
    for (int trial = 0; trial < 30; ++trial) {
        const Point<R> x{oracle::small_rational(rng), oracle::small_rational(rng)};
        const Point<R> y{oracle::small_rational(rng), oracle::small_rational(rng)};
        const Point<R> z = pair.project2(x) + pair.project1(y);
        CHECK(cost(x, y, z) == norm_sq(x - y) / R(2));
    }
}

TEST_CASE("plans canonicalize and report exact marginals and residuals") {
    const Point<R> x{R(0)}, y1{R(-1)}, y2{R(1)};
    ThreePlan<R> plan(1, {{x, y1, y1, R(1, 2)}, {x, y2, y2, R(1, 2)}});
    CHECK(plan.size() == 2);
    CHECK(plan.marginal1().equals(dirac(x)));
    CHECK(plan.marginal2().equals(make(1, {{y1, R(1, 2)}, {y2, R(1, 2)}})));
    CHECK(plan.marginal3().equals(plan.marginal2()));
    CHECK(plan.total_cost() == R(1, 2));
    const auto [rx, ry] = plan.martingale_residuals();
    CHECK(rx == R(0));
    CHECK(ry == R(0));

    // breaking the martingale rows is visible in the residual
    ThreePlan<R> broken(1, {{x, y1, y1, R(3, 4)}, {x, y2, y2, R(1, 4)}});
    const auto [bx, by] = broken.martingale_residuals();
    CHECK(bx == R(1, 2));
    CHECK(by == R(0));
}

TEST_CASE("build_z_grid includes the structured points and the atoms") {
    const auto mu = make(2, {{{R(0), R(1)}, R(1, 2)}, {{R(0), R(-1)}, R(1, 2)}});
    const auto nu = make(2, {{{R(-1), R(1)}, R(1, 2)}, {{R(1), R(-1)}, R(1, 2)}});
    const auto pair = counterexample_pair<R>();
    const auto grid = build_z_grid(mu, nu, std::optional<SubspacePair<R>>(pair));
    auto contains = [&](const Point<R>& p) {
        for (const auto& g : grid)
            if (g == p) return true;
        return false;
    };
    // structured points P2 x + P1 y for all four atom pairs
    for (const auto& ax : mu.atoms())
        for (const auto& ay : nu.atoms()) CHECK(contains(pair.project2(ax.x) + pair.project1(ay.x)));
    for (const auto& a : mu.atoms()) CHECK(contains(a.x));
    for (const auto& a : nu.atoms()) CHECK(contains(a.x));
    // deduplicated and sorted
    for (size_t k = 1; k < grid.size(); ++k) CHECK(grid[k - 1] < grid[k]);

    const Point<R> extra{R(7), R(7)};
    const auto with_extra =
        build_z_grid(mu, nu, std::optional<SubspacePair<R>>{}, {extra});
    bool found = false;
    for (const auto& g : with_extra) found = found || g == extra;
    CHECK(found);
}

TEST_CASE("identical marginals solve to the zero-cost diagonal") {
    std::mt19937 rng(17);
    const auto m = generate_random_measure(rng, 2, 4, false).normalized();
    const auto grid = build_z_grid(m, m);
    const auto sol = solve_primal(m, m, grid);
    REQUIRE(sol.status == SolveStatus::optimal);
    CHECK(sol.primal_cost == R(0));
    CHECK(sol.gap == R(0));
    for (const auto& a : sol.plan.atoms()) {
        CHECK(a.x == a.y);
        CHECK(a.y == a.z);
    }
}

TEST_CASE("the degenerate example solves to one quarter with zero gap") {
    const auto [mu, nu] = degenerate_covariance_instance<R>();
    const auto sol = solve_two_stage(mu, nu);
    REQUIRE(sol.status == SolveStatus::optimal);
    CHECK(sol.primal_cost == R(1, 4));
    CHECK(sol.dual_bound == R(1, 4));
    CHECK(sol.gap == R(0));
    CHECK(sol.optimality_residual == R(0));
    const auto [rx, ry] = sol.plan.martingale_residuals();
    CHECK(rx == R(0));
    CHECK(ry == R(0));
    CHECK(sol.plan.marginal1().equals(mu));
    CHECK(sol.plan.marginal2().equals(nu));
}

TEST_CASE("the one-dimensional convex pair solves to one half") {
    const auto mu = dirac(Point<R>{R(0)});
    const auto nu = make(1, {{{R(-1)}, R(1, 2)}, {{R(1)}, R(1, 2)}});
    const auto sol = solve_two_stage(mu, nu);
    REQUIRE(sol.status == SolveStatus::optimal);
    CHECK(sol.primal_cost == R(1, 2));
    CHECK(sol.dual_bound == R(1, 2));
    // the optimal plan moves z with y
    for (const auto& a : sol.plan.atoms()) CHECK(a.z == a.y);
}

TEST_CASE("a grid too poor for the martingale rows reports infeasibility") {
    const auto mu = dirac(Point<R>{R(0)});
    const auto nu = make(1, {{{R(-1)}, R(1, 2)}, {{R(1)}, R(1, 2)}});
    const std::vector<Point<R>> grid = {Point<R>{R(0)}};
    const auto sol = solve_primal(mu, nu, grid);
    CHECK(sol.status == SolveStatus::infeasible_grid);
    CHECK(!sol.note.empty());
}

TEST_CASE("the quadratic dual bound is half the Schatten norm of C") {
    std::mt19937 rng(23);
    for (int trial = 0; trial < 15; ++trial) {
        const int dim = 1 + int(rng() % 3);
        const auto mu = generate_random_measure(rng, dim, 4, true).normalized();
        const auto nu = generate_random_measure(rng, dim, 4, true).normalized();
        const auto dual = quadratic_dual_bound(mu, nu);
        CHECK(dual.value == schatten1(covariance_difference(mu, nu)) / R(2));
        CHECK(dual.potential.is_one_lipschitz());
    }
}

TEST_CASE("dual bound of the degenerate example is one quarter along e1") {
    const auto [mu, nu] = degenerate_covariance_instance<R>();
    const auto dual = quadratic_dual_bound(mu, nu);
    CHECK(dual.value == R(1, 4));
    REQUIRE(dual.pair.dim1() == 1);
    CHECK(dual.pair.dim2() == 0);
    CHECK(dual.pair.basis1[0][1] == R(0));
    // A acts as +1 along e1 and 0 along e2
    CHECK(dual.potential.a.at(0, 0) == R(1));
    CHECK(dual.potential.a.at(1, 1) == R(0));
}

TEST_CASE("dual bound of the one-dimensional convex pair is one half") {
    const auto mu = dirac(Point<R>{R(0)});
    const auto nu = make(1, {{{R(-1)}, R(1, 2)}, {{R(1)}, R(1, 2)}});
    const auto dual = quadratic_dual_bound(mu, nu);
    CHECK(dual.value == R(1, 2));
    CHECK(dual.potential.a.at(0, 0) == R(1));
}

TEST_CASE("identical marginals have a zero dual bound") {
    std::mt19937 rng(29);
    const auto m = generate_random_measure(rng, 2, 3, false).normalized();
    CHECK(quadratic_dual_bound(m, m).value == R(0));
}

TEST_CASE("weak duality holds exactly on random instances") {
    std::mt19937 rng(31);
    for (int trial = 0; trial < 10; ++trial) {
        const int dim = 1 + int(rng() % 2);
        const auto mu = generate_random_measure(rng, dim, 3, true).normalized();
        const auto nu = generate_random_measure(rng, dim, 3, true).normalized();
        const auto sol = solve_two_stage(mu, nu);
        CAPTURE(trial);
        REQUIRE(sol.status == SolveStatus::optimal);
        CHECK(sol.dual_bound <= sol.primal_cost);
        CHECK(sol.gap == sol.primal_cost - sol.dual_bound);
    }
}

TEST_CASE("assembly from an identity coupling is the diagonal plan") {
    std::mt19937 rng(37);
    const auto m = generate_random_measure(rng, 2, 3, false).normalized();
    const auto plan = assemble_from_bimartingale(identity_coupling(m), counterexample_pair<R>());
    CHECK(plan.total_cost() == R(0));
    for (const auto& a : plan.atoms()) CHECK(a.z == a.x);
}

TEST_CASE("assembled plans satisfy the martingale rows by construction") {
    std::mt19937 rng(41);
    int found = 0;
    for (int trial = 0; trial < 20; ++trial) {
        const auto inst = generate_forward_instance(rng, 3, 4);
        if (!inst.pair.complementing()) continue;
        ++found;
        const auto plan = assemble_from_bimartingale(inst.pi, inst.pair);
        const auto [rx, ry] = plan.martingale_residuals();
        CHECK(rx == R(0));
        CHECK(ry == R(0));
        CHECK(plan.marginal1().equals(inst.mu));
        CHECK(plan.marginal2().equals(inst.nu));
        CHECK(plan.total_cost() == inst.true_cost);
    }
    CHECK(found > 5);
}

TEST_CASE("the first-leaf witness assembles to the halved coupling cost") {
    const auto mu1 = dirac(Point<R>{R(0), R(1)});
    const auto nu1 = make(2, {{{R(-1), R(1)}, R(1, 2)}, {{R(1), R(1)}, R(1, 2)}});
    const auto pair = make_subspace_pair<R>(2, {Point<R>{R(1), R(0)}}, {Point<R>{R(0), R(1)}});
    const auto witness = find_bimartingale(mu1, nu1, pair);
    REQUIRE(witness.has_value());
    const auto plan = assemble_from_bimartingale(*witness, pair);
    CHECK(plan.total_cost() == witness->quadratic_cost() / R(2));
    CHECK(plan.total_cost() == R(1, 2));
}

TEST_CASE("assembly rejects couplings that are not bimartingale") {
    const auto pi = counterexample_coupling<R>();
    CHECK_THROWS_AS(assemble_from_bimartingale(pi, counterexample_pair<R>()), input_error);
    try {
        assemble_from_bimartingale(pi, counterexample_pair<R>());
    } catch (const input_error& e) {
        // the offending atom is named
        CHECK(std::string(e.what()).find("(0, 1)") != std::string::npos);
    }
}

TEST_CASE("optimality residual vanishes for a diagonal plan under the zero potential") {
    std::mt19937 rng(43);
    const auto m = generate_random_measure(rng, 2, 3, false).normalized();
    std::vector<PlanAtom<R>> atoms;
    for (const auto& a : m.atoms()) atoms.push_back({a.x, a.x, a.x, a.w});
    const ThreePlan<R> plan(2, std::move(atoms));
    const auto rep = check_optimality(plan, QuadraticPotential<R>::zero(2));
    CHECK(rep.max_residual == R(0));
}

TEST_CASE("optimality residual vanishes for assembled plans with their potential") {
    std::mt19937 rng(47);
    int found = 0;
    for (int trial = 0; trial < 20; ++trial) {
        const auto inst = generate_forward_instance(rng, 3, 4);
        if (!inst.pair.complementing()) continue;
        ++found;
        const auto plan = assemble_from_bimartingale(inst.pi, inst.pair);
        QuadraticPotential<R> u{inst.pair.projection_matrix1() - inst.pair.projection_matrix2(),
                                Point<R>(inst.mu.dim()), R(0)};
        const auto rep = check_optimality(plan, u);
        CHECK(rep.max_residual == R(0));
        // the two curvature identities hold atom by atom
        for (const auto& e : rep.entries) {
            CHECK(e.x_identity == R(0));
            CHECK(e.y_identity == R(0));
        }
    }
    CHECK(found > 5);
}

TEST_CASE("perturbing one hinge degrades the residual quadratically") {
    const auto mu1 = dirac(Point<R>{R(0), R(1)});
    const auto nu1 = make(2, {{{R(-1), R(1)}, R(1, 2)}, {{R(1), R(1)}, R(1, 2)}});
    const auto pair = make_subspace_pair<R>(2, {Point<R>{R(1), R(0)}}, {Point<R>{R(0), R(1)}});
    const auto plan = assemble_from_bimartingale(*find_bimartingale(mu1, nu1, pair), pair);
    QuadraticPotential<R> u{pair.projection_matrix1() - pair.projection_matrix2(), Point<R>(2),
                            R(0)};
    REQUIRE(check_optimality(plan, u).max_residual == R(0));

    for (const R delta : {R(1, 3), R(-1, 2), R(2)}) {
        auto atoms = plan.atoms();
        atoms[0].z += pair.basis1[0] * delta;
        const ThreePlan<R> moved(2, std::move(atoms));
        // second-order expansion around the optimal hinge: residual = delta^2 |b|^2
        CHECK(check_optimality(moved, u).max_residual ==
              delta * delta * norm_sq(pair.basis1[0]));
    }
}

TEST_CASE("variance of a shared point is zero") {
    const auto m = dirac(Point<R>{R(0)});
    const auto var = solve_variance(m, m, build_z_grid(m, m));
    REQUIRE(var.status == SolveStatus::optimal);
    CHECK(var.value == R(0));
    CHECK(var.rho.equals(m));
}

TEST_CASE("the spread measure is its own minimal dominating law") {
    const auto mu = dirac(Point<R>{R(0)});
    const auto nu = make(1, {{{R(-1)}, R(1, 2)}, {{R(1)}, R(1, 2)}});
    const auto var = solve_variance(mu, nu, build_z_grid(mu, nu));
    REQUIRE(var.status == SolveStatus::optimal);
    CHECK(var.value == R(1));
    CHECK(var.rho.equals(nu));
}

TEST_CASE("transport cost and minimal variance satisfy the shared-grid identity") {
    std::mt19937 rng(53);
    for (int trial = 0; trial < 8; ++trial) {
        const int dim = 1 + int(rng() % 2);
        const auto mu = generate_random_measure(rng, dim, 3, true).normalized();
        const auto nu = generate_random_measure(rng, dim, 3, true).normalized();
        // convolution grid: feasible for both problems
        std::vector<Point<R>> extras;
        const Point<R> b = barycenter(mu);
        for (const auto& ax : mu.atoms())
            for (const auto& ay : nu.atoms()) extras.push_back(ax.x + ay.x - b);
        const auto grid = build_z_grid(mu, nu, std::optional<SubspacePair<R>>{}, extras);
        const auto sol = solve_primal(mu, nu, grid);
        const auto var = solve_variance(mu, nu, grid);
        CAPTURE(trial);
        REQUIRE(sol.status == SolveStatus::optimal);
        REQUIRE(var.status == SolveStatus::optimal);
        CHECK(sol.primal_cost == var.value - (variance(mu) + variance(nu)) / R(2));
    }
}

TEST_CASE("balance gaps vanish on full, empty, and leaf sets") {
    const auto [mu, nu] = degenerate_covariance_instance<R>();
    const auto sol = solve_two_stage(mu, nu);
    REQUIRE(sol.status == SolveStatus::optimal);
    const auto all = balance_check<R>(sol.plan, [](const Point<R>&) { return true; });
    CHECK(all.mass_gap == R(0));
    CHECK(is_zero_point(all.moment_gap));
    const auto none = balance_check<R>(sol.plan, [](const Point<R>&) { return false; });
    CHECK(none.mass_gap == R(0));
    CHECK(is_zero_point(none.moment_gap));
    const auto top =
        balance_check<R>(sol.plan, [](const Point<R>& p) { return p[1] == R(1); });
    CHECK(top.mass_gap == R(0));
    CHECK(is_zero_point(top.moment_gap));
}

TEST_CASE("the primal value is invariant under exact rotation and translation") {
    std::mt19937 rng(59);
    for (int trial = 0; trial < 5; ++trial) {
        const auto mu = generate_random_measure(rng, 2, 3, true).normalized();
        const auto nu = generate_random_measure(rng, 2, 3, true).normalized();
        const auto base = solve_two_stage(mu, nu);
        REQUIRE(base.status == SolveStatus::optimal);

        const auto rsol = solve_two_stage(map_measure(mu, [](const Point<R>& p) { return rot(p); }),
                                          map_measure(nu, [](const Point<R>& p) { return rot(p); }));
        REQUIRE(rsol.status == SolveStatus::optimal);
        CHECK(rsol.primal_cost == base.primal_cost);

        const Point<R> t{R(5), R(-3)};
        const auto tsol =
            solve_two_stage(map_measure(mu, [&](const Point<R>& p) { return p + t; }),
                            map_measure(nu, [&](const Point<R>& p) { return p + t; }));
        REQUIRE(tsol.status == SolveStatus::optimal);
        CHECK(tsol.primal_cost == base.primal_cost);
    }
}

} // TEST_SUITE
