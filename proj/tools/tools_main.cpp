// bimart — command-line front end.
//
// Subcommands: check-order, solve, decompose, grillage, selftest.
// Machine-readable JSON goes to standard output (sorted keys, deterministic
// scalar rendering, so identical invocations produce byte-identical reports);
// the human-readable summary goes to standard error.  Exit codes: 0 success,
// 2 precondition/input errors (bad files, dimension mismatches, barycenter
// mismatch, infeasible grids), 1 internal errors.  No environment variables
// are consulted; everything arrives via flags.

#include "json_io.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

using namespace bimart;
using bimart::cli::json;
using bimart::cli::scalar_json;
using bimart::cli::scalar_text;

void emit(const json& report) { std::cout << report.dump(2) << "\n"; }

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw input_error("cannot open file for writing: " + path);
    out << content;
    if (!out) throw input_error("failed while writing: " + path);
}

int emit_error(const std::string& command, const std::string& kind, const std::string& message,
               int code) {
    emit(json{{"command", command}, {"error", {{"kind", kind}, {"message", message}}}});
    std::cerr << "error: " << message << "\n";
    return code;
}

// report skeleton shared by every subcommand
template <class S>
json report_base(const std::string& command, const Tolerances& tol,
                 const std::string& grid_provenance) {
    return {{"command", command},
            {"mode", scalar_traits<S>::mode_name()},
            {"tolerances", bimart::cli::tolerances_json(tol)},
            {"grid_provenance", grid_provenance}};
}

template <class S> json input_mass_json(const bimart::cli::Instance<S>& inst) {
    return {{"mu", scalar_json(inst.mu_mass)}, {"nu", scalar_json(inst.nu_mass)}};
}

struct Args {
    std::string instance_path;
    std::string mode_flag;
    std::string grid_path;
    std::string plan_csv;
    std::string dot_path;
    std::string svg_path;
    std::string csv_path;
    bool dump_lp = false;
    int verify_degree = 4;
};

// ---------------------------------------------------------------------------
// check-order
// ---------------------------------------------------------------------------

template <class S>
std::string negative_verdict(const SubspacePair<S>& pair) {
    return "no bimartingale coupling for " + bimart::cli::pair_text(pair);
}

template <class S> int cmd_check_order(const Args& args) {
    const Tolerances tol;
    const auto inst = bimart::cli::parse_instance<S>(
        bimart::cli::load_json_file(args.instance_path), tol);
    json rep = report_base<S>("check-order", tol, "none");
    rep["input_mass"] = input_mass_json(inst);

    const bool convex_concave = inst.pair.has_value();
    std::optional<Coupling<S>> witness;
    std::string verdict;
    SubspacePair<S> residual_pair = full_space_pair<S>(inst.dim);
    if (convex_concave) {
        residual_pair = *inst.pair;
        witness = find_bimartingale(inst.mu, inst.nu, *inst.pair, tol);
        verdict = witness ? "bimartingale coupling found for " + bimart::cli::pair_text(*inst.pair)
                          : negative_verdict(*inst.pair);
        rep["order"] = "convex-concave";
        rep["subspaces"] = bimart::cli::pair_json(*inst.pair);
    } else {
        witness = check_convex_order(inst.mu, inst.nu, tol);
        verdict = witness ? "convex order holds: martingale coupling found"
                          : "convex order fails: no martingale coupling";
        rep["order"] = "convex";
        rep["subspaces"] = nullptr;
    }
    rep["order_holds"] = witness.has_value();
    rep["verdict"] = verdict;
    if (witness) {
        rep["witness"] = bimart::cli::coupling_json(*witness);
        rep["witness_cost"] = scalar_json(witness->quadratic_cost());
        const auto res = verify_bimartingale(*witness, residual_pair);
        json source = json::array();
        for (const auto& e : res.source)
            source.push_back({{"point", bimart::cli::point_json(e.point)},
                              {"residual", bimart::cli::point_json(e.residual)}});
        json target = json::array();
        for (const auto& e : res.target)
            target.push_back({{"point", bimart::cli::point_json(e.point)},
                              {"residual", bimart::cli::point_json(e.residual)}});
        rep["residuals"] = {{"max_violation", scalar_json(res.max_violation)},
                            {"source", std::move(source)},
                            {"target", std::move(target)}};
    } else {
        rep["witness"] = nullptr;
        rep["witness_cost"] = nullptr;
        rep["residuals"] = nullptr;
    }
    emit(rep);
    std::cerr << "check-order: " << verdict << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// solve
// ---------------------------------------------------------------------------

template <class S>
std::string plan_csv_text(const ThreePlan<S>& plan, int dim) {
    std::string csv;
    for (const char* col : {"x", "y", "z"})
        for (int i = 0; i < dim; ++i) csv += std::string(col) + std::to_string(i + 1) + ",";
    csv += "w\n";
    for (const auto& a : plan.atoms()) {
        for (const Point<S>* p : {&a.x, &a.y, &a.z})
            for (int i = 0; i < dim; ++i) csv += scalar_text((*p)[i]) + ",";
        csv += scalar_text(a.w) + "\n";
    }
    return csv;
}

template <class S> int cmd_solve(const Args& args) {
    const Tolerances tol;
    const auto inst = bimart::cli::parse_instance<S>(
        bimart::cli::load_json_file(args.instance_path), tol);

    std::vector<Point<S>> grid;
    std::string provenance;
    if (!args.grid_path.empty()) {
        grid = bimart::cli::parse_grid_file<S>(args.grid_path, inst.dim);
        provenance = "file:" + args.grid_path;
    } else if (!inst.grid.empty()) {
        grid = inst.grid;
        provenance = "instance";
    } else {
        const auto dual = quadratic_dual_bound(inst.mu, inst.nu, tol);
        grid = build_z_grid(inst.mu, inst.nu, std::optional<SubspacePair<S>>(dual.pair), {}, tol);
        provenance = "structured";
    }

    std::string lp_text;
    auto sol = solve_primal(inst.mu, inst.nu, grid, tol, args.dump_lp ? &lp_text : nullptr);
    sol.grid_provenance = provenance;
    if (args.dump_lp) std::cerr << lp_text;

    json rep = report_base<S>("solve", tol, provenance);
    rep["input_mass"] = input_mass_json(inst);
    rep["z_grid_size"] = sol.z_grid_size;
    rep["note"] = sol.note;
    const bool optimal = sol.status == SolveStatus::optimal;
    rep["status"] = optimal ? "optimal" : "infeasible-grid";
    const bool have_dual = sol.pair.dim == inst.dim;
    if (optimal) {
        rep["primal_cost"] = scalar_json(sol.primal_cost);
        rep["gap"] = scalar_json(sol.gap);
        rep["optimality_residual"] = scalar_json(sol.optimality_residual);
        rep["plan"] = bimart::cli::plan_json(sol.plan);
        const auto [src, tgt] = sol.plan.martingale_residuals();
        rep["martingale_residuals"] = {{"source", scalar_json(src)}, {"target", scalar_json(tgt)}};
    } else {
        rep["primal_cost"] = nullptr;
        rep["gap"] = nullptr;
        rep["optimality_residual"] = nullptr;
        rep["plan"] = json::array();
        rep["martingale_residuals"] = nullptr;
    }
    rep["dual_bound"] = have_dual ? scalar_json(sol.dual_bound) : json(nullptr);
    rep["pair"] = have_dual ? bimart::cli::pair_json(sol.pair) : json(nullptr);
    rep["potential"] = have_dual ? bimart::cli::potential_json(sol.potential) : json(nullptr);
    if (!args.plan_csv.empty()) write_file(args.plan_csv, plan_csv_text(sol.plan, inst.dim));
    emit(rep);

    if (optimal) {
        std::cerr << "solve: primal = " << scalar_text(sol.primal_cost)
                  << ", dual = " << scalar_text(sol.dual_bound)
                  << ", gap = " << scalar_text(sol.gap) << " (grid " << provenance << ", "
                  << sol.z_grid_size << " points)\n";
        if (!sol.note.empty()) std::cerr << "note: " << sol.note << "\n";
        return 0;
    }
    std::cerr << "solve: infeasible on this grid — " << sol.note << "\n";
    return 2;
}

// ---------------------------------------------------------------------------
// decompose
// ---------------------------------------------------------------------------

template <class S> json node_json(const LeafNode<S>& node) {
    json children = json::array();
    for (const auto& c : node.children) children.push_back(node_json(c));
    return {{"id", node.id},
            {"depth", node.depth},
            {"key", node.key},
            {"path", node.path},
            {"theta", scalar_json(node.theta)},
            {"anchor", bimart::cli::point_json(node.anchor)},
            {"trivial", node.trivial},
            {"terminal", node.terminal()},
            {"tangent", bimart::cli::pair_json(node.tangent)},
            {"tangent_dim", static_cast<int>(node.tangent_basis.size())},
            {"mu", bimart::cli::measure_json(node.mu_s)},
            {"nu", bimart::cli::measure_json(node.nu_s)},
            {"children", std::move(children)}};
}

std::string dot_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    return out;
}

template <class S> void dot_walk(const LeafNode<S>& node, std::string& dot) {
    std::string label = dot_escape(node.key) + "\\ntheta = " + dot_escape(scalar_text(node.theta));
    if (node.terminal())
        label += node.trivial ? "\\ntrivial"
                              : "\\ndims (" + std::to_string(node.tangent.dim1()) + ", " +
                                    std::to_string(node.tangent.dim2()) + ")";
    dot += "  n" + std::to_string(node.id) + " [label=\"" + label + "\"];\n";
    for (const auto& c : node.children) {
        dot += "  n" + std::to_string(node.id) + " -> n" + std::to_string(c.id) + ";\n";
        dot_walk(c, dot);
    }
}

template <class S> int cmd_decompose(const Args& args) {
    const Tolerances tol;
    const auto inst = bimart::cli::parse_instance<S>(
        bimart::cli::load_json_file(args.instance_path), tol);
    const auto dec = solve_decomposed(inst.mu, inst.nu, tol);

    json leaves = json::array();
    int max_depth = 0;
    for (const auto& e : dec.ledger) {
        max_depth = std::max(max_depth, e.depth);
        leaves.push_back({{"leaf_id", e.leaf_id},
                          {"path", e.path},
                          {"depth", e.depth},
                          {"theta", scalar_json(e.theta)},
                          {"cost", scalar_json(e.j_leaf)},
                          {"dim1", e.dim1},
                          {"dim2", e.dim2},
                          {"trivial", e.trivial}});
    }
    json rep = report_base<S>("decompose", tol, "none");
    rep["input_mass"] = input_mass_json(inst);
    rep["tree"] = node_json(dec.root);
    rep["leaves"] = std::move(leaves);
    rep["leaf_count"] = static_cast<int>(dec.ledger.size());
    rep["depth"] = max_depth;
    rep["total_cost"] = scalar_json(dec.total_cost);
    rep["plan"] = bimart::cli::plan_json(dec.plan);
    rep["plan_cost"] = scalar_json(dec.plan.total_cost());

    if (!args.dot_path.empty()) {
        std::string dot = "digraph decomposition {\n  node [shape=box];\n";
        dot_walk(dec.root, dot);
        dot += "}\n";
        write_file(args.dot_path, dot);
    }
    emit(rep);
    std::cerr << "decompose: " << dec.ledger.size() << " terminal leaves, depth " << max_depth
              << ", total cost = " << scalar_text(dec.total_cost) << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// grillage
// ---------------------------------------------------------------------------

template <class S> int cmd_grillage(const Args& args) {
    const Tolerances tol;
    const auto inst = bimart::cli::parse_instance<S>(
        bimart::cli::load_json_file(args.instance_path), tol);
    if (inst.dim != 2)
        throw input_error("grillage: instances must have dim = 2, got dim = " +
                          std::to_string(inst.dim));
    const auto dec = solve_decomposed(inst.mu, inst.nu, tol);
    const auto g = bars_from_plan(dec.plan, tol);
    const S tv = total_variation(g, tol);
    const auto d2 = verify_div2(g, inst.mu, inst.nu, args.verify_degree);

    json bars = json::array();
    S bar_mass(0);
    for (const auto& b : g.bars()) {
        bar_mass += b.mass();
        bars.push_back({{"from", bimart::cli::point_json(b.from)},
                        {"to", bimart::cli::point_json(b.to)},
                        {"sign", b.sign},
                        {"weight", scalar_json(b.weight)},
                        {"mass", scalar_json(b.mass())}});
    }
    json entries = json::array();
    for (const auto& e : d2.entries)
        entries.push_back({{"p", e.p},
                           {"q", e.q},
                           {"lhs", scalar_json(e.lhs)},
                           {"rhs", scalar_json(e.rhs)},
                           {"residual", scalar_json(e.residual)}});

    json rep = report_base<S>("grillage", tol, "per-leaf");
    rep["input_mass"] = input_mass_json(inst);
    rep["plan_cost"] = scalar_json(dec.plan.total_cost());
    rep["bar_count"] = g.size();
    rep["bars"] = std::move(bars);
    rep["bar_mass_total"] = scalar_json(bar_mass);
    rep["total_variation"] = scalar_json(tv);
    rep["div2"] = {{"degree", d2.degree},
                   {"max_residual", scalar_json(d2.max_residual)},
                   {"entries", std::move(entries)}};
    rep["svg"] = args.svg_path;
    rep["csv"] = args.csv_path.empty() ? json(nullptr) : json(args.csv_path);

    write_file(args.svg_path, export_svg(g));
    if (!args.csv_path.empty()) write_file(args.csv_path, export_csv(g));
    emit(rep);
    std::cerr << "grillage: " << g.size() << " bars, total variation = " << scalar_text(tv)
              << ", div2 residual (degree " << d2.degree
              << ") = " << scalar_text(d2.max_residual) << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// selftest — the two built-in worked examples, exact rational arithmetic
// ---------------------------------------------------------------------------

struct Check {
    std::string name;
    bool pass;
    std::string expected;
    std::string actual;
};

int cmd_selftest() {
    using R = Rational;
    const Tolerances tol;
    std::vector<Check> checks;
    const auto add = [&](const std::string& name, bool pass, const std::string& expected,
                         const std::string& actual) {
        checks.push_back({name, pass, expected, actual});
    };

    // --- the coupling with martingale pushforwards but a one-sided defect ---
    const Coupling<R> pi = counterexample_coupling<R>();
    const SubspacePair<R> pair = counterexample_pair<R>();
    {
        const auto res = verify_bimartingale(pi, pair);
        R got(0);
        bool found = false;
        const Point<R> probe{R(0), R(1)};
        for (const auto& e : res.source)
            if (e.point == probe) {
                got = e.residual[0];
                found = true;
            }
        add("counterexample-source-residual", found && got == R(-1) / 2, "-1/2",
            found ? scalar_text(got) : "(no entry at (0,1))");
    }
    {
        const auto [fwd, bwd] = marginal_martingale_pushforwards(pi, pair);
        const R r1 = martingale_residual(fwd);
        const R r2 = martingale_residual(bwd);
        add("counterexample-pushforwards-martingale", r1 == 0 && r2 == 0, "0 and 0",
            scalar_text(r1) + " and " + scalar_text(r2));
    }
    {
        const auto witness = find_bimartingale(pi.first_marginal(), pi.second_marginal(), pair, tol);
        const std::string expected = "no bimartingale coupling for (span e1, span e2)";
        const std::string verdict =
            witness ? "bimartingale coupling found for " + bimart::cli::pair_text(pair)
                    : negative_verdict(pair);
        add("counterexample-no-bimartingale", !witness && verdict == expected, expected, verdict);
    }

    // --- the degenerate-covariance pair and its two-leaf decomposition ---
    const auto [mu, nu] = degenerate_covariance_instance<R>();
    {
        const auto c = covariance_difference(mu, nu);
        add("degenerate-e2-direction", c.at(1, 1) == 0, "0", scalar_text(c.at(1, 1)));
    }
    const LeafNode<R> root = decompose(mu, nu, tol);
    {
        const bool two = root.children.size() == 2;
        const bool halves =
            two && root.children[0].theta == R(1) / 2 && root.children[1].theta == R(1) / 2;
        add("degenerate-two-leaves", two && halves, "2 leaves with theta = 1/2",
            std::to_string(root.children.size()) + " leaves" +
                (two ? " with theta = " + scalar_text(root.children[0].theta) + ", " +
                           scalar_text(root.children[1].theta)
                     : ""));
    }
    {
        bool found = false, is_trivial = false;
        for (const auto& c : root.children)
            if (c.anchor[1] == R(-1)) {
                found = true;
                is_trivial = c.trivial && c.mu_s.equals(c.nu_s, tol);
            }
        add("degenerate-trivial-leaf", found && is_trivial, "mu_S = nu_S on the x2 = -1 leaf",
            found ? (is_trivial ? "mu_S = nu_S on the x2 = -1 leaf" : "leaf found but not trivial")
                  : "leaf not found");
    }
    const auto dec = solve_decomposed(mu, nu, tol);
    {
        const bool ok = dec.total_cost == R(1) / 4 && dec.plan.total_cost() == R(1) / 4;
        add("degenerate-decomposed-cost", ok, "1/4",
            scalar_text(dec.total_cost) + " (plan " + scalar_text(dec.plan.total_cost()) + ")");
    }
    const auto dual = quadratic_dual_bound(mu, nu, tol);
    const auto grid = build_z_grid(mu, nu, std::optional<SubspacePair<R>>(dual.pair), {}, tol);
    const auto sol = solve_primal(mu, nu, grid, tol);
    {
        const bool ok = sol.status == SolveStatus::optimal && sol.primal_cost == R(1) / 4 &&
                        sol.dual_bound == R(1) / 4 && sol.gap == 0 &&
                        sol.optimality_residual == 0;
        add("degenerate-solve", ok, "primal 1/4, dual 1/4, gap 0",
            "primal " + scalar_text(sol.primal_cost) + ", dual " + scalar_text(sol.dual_bound) +
                ", gap " + scalar_text(sol.gap));
    }
    {
        const auto var = solve_variance(mu, nu, grid, tol);
        const R expect = sol.primal_cost + (variance(mu) + variance(nu)) / 2;
        add("degenerate-variance-identity",
            var.status == SolveStatus::optimal && var.value == expect, scalar_text(expect),
            scalar_text(var.value));
    }
    {
        const auto g = bars_from_plan(dec.plan, tol);
        const auto d2 = verify_div2(g, mu, nu, 4);
        R bar_mass(0);
        for (const auto& b : g.bars()) bar_mass += b.mass();
        const R tv = total_variation(g, tol);
        const bool ok =
            d2.max_residual == 0 && bar_mass == dec.plan.total_cost() && tv <= dec.plan.total_cost();
        add("degenerate-grillage", ok, "div2 residual 0, bar mass = cost, TV <= cost",
            "div2 residual " + scalar_text(d2.max_residual) + ", bar mass " +
                scalar_text(bar_mass) + ", TV " + scalar_text(tv));
    }

    int failed = 0;
    json rows = json::array();
    for (const auto& c : checks) {
        failed += c.pass ? 0 : 1;
        rows.push_back({{"name", c.name},
                        {"pass", c.pass},
                        {"expected", c.expected},
                        {"actual", c.actual}});
        std::cerr << (c.pass ? "[PASS] " : "[FAIL] ") << c.name << " — expected " << c.expected
                  << ", got " << c.actual << "\n";
    }
    json rep = report_base<Rational>("selftest", tol, "built-in");
    rep["checks"] = std::move(rows);
    rep["passed"] = static_cast<int>(checks.size()) - failed;
    rep["failed"] = failed;
    emit(rep);
    std::cerr << "selftest: " << (checks.size() - static_cast<size_t>(failed)) << "/"
              << checks.size() << " checks passed\n";
    return failed == 0 ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"bimart — discrete second-order Beckmann transport: convex-concave order "
                 "checks, three-marginal martingale solves, leaf decomposition, 2D grillage "
                 "emission"};
    app.require_subcommand(1);
    Args args;

    const auto add_common = [&](CLI::App* sub) {
        sub->add_option("--instance", args.instance_path, "instance JSON file")
            ->required();
        sub->add_option("--mode", args.mode_flag, "numeric mode (overrides the instance file)")
            ->check(CLI::IsMember({"rational", "float"}));
    };

    CLI::App* co = app.add_subcommand(
        "check-order", "test convex order (or convex-concave order when the instance "
                       "carries v1/v2) via coupling feasibility");
    add_common(co);

    CLI::App* so = app.add_subcommand(
        "solve", "solve the three-marginal martingale transport problem on a z grid");
    add_common(so);
    so->add_option("--grid", args.grid_path, "z-grid JSON file (default: structured candidates)");
    so->add_option("--plan-csv", args.plan_csv, "write the optimal plan as CSV");
    so->add_flag("--dump-lp", args.dump_lp, "dump the LP in plain text to standard error");

    CLI::App* de = app.add_subcommand(
        "decompose", "build the covariance-driven leaf decomposition and per-leaf plans");
    add_common(de);
    de->add_option("--dot", args.dot_path, "write the partition tree as a DOT graph");

    CLI::App* gr = app.add_subcommand(
        "grillage", "emit the verified 2D grillage tensor measure for an instance");
    add_common(gr);
    gr->add_option("--out", args.svg_path, "output SVG file")->required();
    gr->add_option("--csv", args.csv_path, "also write bars as CSV");
    gr->add_option("--verify-degree", args.verify_degree,
                   "polynomial degree for the div2 check (>= 2)")
        ->capture_default_str();

    CLI::App* st =
        app.add_subcommand("selftest", "run the built-in worked examples (exact arithmetic)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    std::string command = "selftest";
    if (co->parsed()) command = "check-order";
    if (so->parsed()) command = "solve";
    if (de->parsed()) command = "decompose";
    if (gr->parsed()) command = "grillage";

    try {
        if (st->parsed()) return cmd_selftest();
        const std::string mode =
            bimart::cli::resolve_mode(args.mode_flag, bimart::cli::load_json_file(args.instance_path));
        const bool rational = mode == "rational";
        if (co->parsed())
            return rational ? cmd_check_order<Rational>(args) : cmd_check_order<double>(args);
        if (so->parsed()) return rational ? cmd_solve<Rational>(args) : cmd_solve<double>(args);
        if (de->parsed())
            return rational ? cmd_decompose<Rational>(args) : cmd_decompose<double>(args);
        return rational ? cmd_grillage<Rational>(args) : cmd_grillage<double>(args);
    } catch (const input_error& e) {
        return emit_error(command, "input", e.what(), 2);
    } catch (const json::exception& e) {
        return emit_error(command, "input", e.what(), 2);
    } catch (const std::exception& e) {
        return emit_error(command, "internal", e.what(), 1);
    }
}
