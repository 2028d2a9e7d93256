#include "doctest.h"

#include "bimart/simplex.hpp"
#include "support/oracles.hpp"

#include <algorithm>
#include <random>

using namespace bimart;
using R = Rational;

namespace {

LinearProgram<R> single_var(const R& objective, Rel rel, const R& rhs) {
    LinearProgram<R> lp;
    lp.objective = {objective};
    lp.rows.push_back({{R(1)}, rel, rhs});
    return lp;
}

} // namespace

TEST_SUITE("simplex") {

TEST_CASE("minimize x subject to x >= 3") {
    const auto out = solve_lp(single_var(R(1), Rel::ge, R(3)));
    REQUIRE(out.status == LPStatus::optimal);
    CHECK(out.objective == R(3));
    CHECK(out.solution[0] == R(3));
}

TEST_CASE("x <= -1 with x >= 0 is infeasible") {
    const auto out = solve_lp(single_var(R(0), Rel::le, R(-1)));
    CHECK(out.status == LPStatus::infeasible);
}

TEST_CASE("minimize -x with no upper bound is unbounded") {
    LinearProgram<R> lp;
    lp.objective = {R(-1)};
    lp.rows.push_back({{R(1)}, Rel::ge, R(0)});
    CHECK(solve_lp(lp).status == LPStatus::unbounded);
}

TEST_CASE("solver agrees with the enumeration reference on random programs") {
    std::mt19937 rng(101);
    int optimal = 0, infeasible = 0, unbounded = 0;
    for (int trial = 0; trial < 200; ++trial) {
        const auto lp = oracle::random_lp(rng, 6, 6);
        const auto expect = oracle::lp_reference(lp);
        CAPTURE(trial);

        const auto fast = solve_lp(lp); // float presolve + exact certification
        REQUIRE(fast.status == expect.status);

        SolveOptions pure;
        pure.float_presolve = false;
        const auto exact = solve_lp(lp, pure); // exact pivoting from scratch
        REQUIRE(exact.status == expect.status);
        CHECK_FALSE(exact.certified_basis);

        if (expect.status == LPStatus::optimal) {
            ++optimal;
            CHECK(fast.objective == expect.objective);
            CHECK(exact.objective == expect.objective);
            CHECK(oracle::certifies_optimal_pair(lp, fast));
            CHECK(oracle::certifies_optimal_pair(lp, exact));
        } else if (expect.status == LPStatus::infeasible) {
            ++infeasible;
        } else {
            ++unbounded;
        }
    }
    // the seed sweep must actually exercise all three verdicts
    CHECK(optimal > 20);
    CHECK(infeasible > 20);
    CHECK(unbounded > 20);
}

TEST_CASE("optimal value is invariant under row permutation") {
    std::mt19937 rng(107);
    int checked = 0;
    for (int trial = 0; trial < 60 && checked < 20; ++trial) {
        const auto lp = oracle::random_lp(rng, 5, 5);
        const auto base = solve_lp(lp);
        if (base.status != LPStatus::optimal) continue;
        ++checked;
        LinearProgram<R> shuffled = lp;
        std::shuffle(shuffled.rows.begin(), shuffled.rows.end(), rng);
        const auto again = solve_lp(shuffled);
        REQUIRE(again.status == LPStatus::optimal);
        CHECK(again.objective == base.objective);
    }
    CHECK(checked == 20);
}

TEST_CASE("repeated solves of one program are identical") {
    std::mt19937 rng(109);
    const auto lp = oracle::random_lp(rng, 5, 4);
    const auto a = solve_lp(lp);
    const auto b = solve_lp(lp);
    CHECK(a.status == b.status);
    CHECK(a.solution == b.solution);
    CHECK(a.duals == b.duals);
}

TEST_CASE("the classic cycling program terminates at its optimum") {
    // Beale's example: Dantzig pricing with naive tie-breaking cycles forever;
    // the stall detector must hand over to Bland's rule and finish.
    LinearProgram<R> lp;
    lp.objective = {R(-3, 4), R(150), R(-1, 50), R(6)};
    lp.rows.push_back({{R(1, 4), R(-60), R(-1, 25), R(9)}, Rel::le, R(0)});
    lp.rows.push_back({{R(1, 2), R(-90), R(-1, 50), R(3)}, Rel::le, R(0)});
    lp.rows.push_back({{R(0), R(0), R(1), R(0)}, Rel::le, R(1)});
    const auto out = solve_lp(lp);
    REQUIRE(out.status == LPStatus::optimal);
    CHECK(out.objective == R(-1, 20));
    CHECK(oracle::certifies_optimal_pair(lp, out));

    LinearProgram<double> flp;
    flp.objective = {-0.75, 150.0, -0.02, 6.0};
    flp.rows.push_back({{0.25, -60.0, -0.04, 9.0}, Rel::le, 0.0});
    flp.rows.push_back({{0.5, -90.0, -0.02, 3.0}, Rel::le, 0.0});
    flp.rows.push_back({{0.0, 0.0, 1.0, 0.0}, Rel::le, 1.0});
    const auto fout = solve_lp(flp);
    REQUIRE(fout.status == LPStatus::optimal);
    CHECK(fout.objective == doctest::Approx(-0.05));
}

TEST_CASE("float mode agrees with rational mode on well-conditioned programs") {
    std::mt19937 rng(113);
    for (int trial = 0; trial < 40; ++trial) {
        const auto lp = oracle::random_lp(rng, 4, 4);
        const auto exact = solve_lp(lp);
        LinearProgram<double> flp;
        for (const auto& c : lp.objective) flp.objective.push_back(to_double(c));
        for (const auto& row : lp.rows) {
            LPRow<double> fr;
            for (const auto& c : row.coeffs) fr.coeffs.push_back(to_double(c));
            fr.rel = row.rel;
            fr.rhs = to_double(row.rhs);
            flp.rows.push_back(std::move(fr));
        }
        const auto approx = solve_lp(flp);
        CHECK(approx.status == exact.status);
        if (exact.status == LPStatus::optimal)
            CHECK(approx.objective == doctest::Approx(to_double(exact.objective)).epsilon(1e-7));
    }
}

TEST_CASE("rational mode refuses oversized programs") {
    // > 20000 nonzeros: 150 x 150 dense rows
    LinearProgram<R> lp;
    lp.objective.assign(150, R(1));
    for (int i = 0; i < 150; ++i) {
        LPRow<R> row;
        row.coeffs.assign(150, R(1));
        row.rel = Rel::ge;
        row.rhs = R(1);
        lp.rows.push_back(std::move(row));
    }
    CHECK(lp_nonzeros(lp) > 20000);
    CHECK_THROWS_AS((void)solve_lp(lp), input_error);
}

TEST_CASE("degenerate ties are resolved exactly") {
    // many redundant rows through the same vertex
    LinearProgram<R> lp;
    lp.objective = {R(1), R(1)};
    lp.rows.push_back({{R(1), R(1)}, Rel::ge, R(2)});
    lp.rows.push_back({{R(2), R(2)}, Rel::ge, R(4)});
    lp.rows.push_back({{R(1), R(0)}, Rel::le, R(1)});
    lp.rows.push_back({{R(0), R(1)}, Rel::le, R(1)});
    lp.rows.push_back({{R(3), R(3)}, Rel::ge, R(6)});
    const auto out = solve_lp(lp);
    REQUIRE(out.status == LPStatus::optimal);
    CHECK(out.objective == R(2));
    CHECK(oracle::certifies_optimal_pair(lp, out));
}

TEST_CASE("the certified fast path and pure pivoting agree on duals validity") {
    std::mt19937 rng(127);
    int certified = 0;
    for (int trial = 0; trial < 80; ++trial) {
        const auto lp = oracle::random_lp(rng, 5, 5);
        const auto fast = solve_lp(lp);
        if (fast.status == LPStatus::optimal && fast.certified_basis) {
            ++certified;
            CHECK(oracle::certifies_optimal_pair(lp, fast));
        }
    }
    // the float presolve must actually certify a healthy share of bases
    CHECK(certified > 10);
}

TEST_CASE("dump_lp renders every row") {
    LinearProgram<R> lp;
    lp.objective = {R(1), R(-2)};
    lp.rows.push_back({{R(1), R(1)}, Rel::le, R(3)});
    lp.rows.push_back({{R(1), R(-1)}, Rel::eq, R(0)});
    const auto text = dump_lp(lp);
    CHECK(text.find("<=") != std::string::npos);
    CHECK(text.find("=") != std::string::npos);
    CHECK(lp_nonzeros(lp) == 4);
}

} // TEST_SUITE
