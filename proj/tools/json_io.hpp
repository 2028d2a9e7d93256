#pragma once

// JSON bridge for the CLI: instance-file parsing and report serialization.
//
// Conventions, both directions:
//   * scalars are accepted as JSON numbers or as decimal/fraction strings
//     ("0.25", "-1/2"); strings are parsed exactly in rational mode,
//   * rational scalars serialize as canonical "p/q" strings, floats as JSON
//     numbers — so a report is byte-identical across runs of the same build,
//   * objects are emitted with sorted keys (nlohmann's default map order).

#include "bimart/grillage.hpp"
#include "bimart/instance.hpp"

#include <json.hpp>

#include <fstream>
#include <optional>
#include <string>
#include <vector>

namespace bimart::cli {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Scalar rendering
// ---------------------------------------------------------------------------

inline json scalar_json(const Rational& v) { return json(to_decimal_string(v)); }
inline json scalar_json(double v) { return json(v); }

inline std::string scalar_text(const Rational& v) { return to_decimal_string(v); }
inline std::string scalar_text(double v) { return json(v).dump(); }

template <class S> S scalar_from_json(const json& v, const std::string& field) {
    try {
        if (v.is_string()) return scalar_io<S>::from_decimal(v.get<std::string>());
        if (v.is_number()) return scalar_io<S>::from_double(v.get<double>());
    } catch (const std::exception& e) {
        throw input_error(field + ": " + e.what());
    }
    throw input_error(field + ": expected a number or a decimal string, got " +
                      std::string(v.type_name()));
}

// ---------------------------------------------------------------------------
// Core values -> JSON
// ---------------------------------------------------------------------------

template <class S> json point_json(const Point<S>& p) {
    json arr = json::array();
    for (int i = 0; i < p.dim(); ++i) arr.push_back(scalar_json(p[i]));
    return arr;
}

template <class S> json basis_json(const std::vector<Point<S>>& basis) {
    json arr = json::array();
    for (const auto& b : basis) arr.push_back(point_json(b));
    return arr;
}

template <class S> json measure_json(const DiscreteMeasure<S>& m) {
    json arr = json::array();
    for (const auto& a : m.atoms()) arr.push_back({{"w", scalar_json(a.w)}, {"x", point_json(a.x)}});
    return arr;
}

template <class S> json coupling_json(const Coupling<S>& pi) {
    json arr = json::array();
    for (const auto& a : pi.atoms())
        arr.push_back({{"w", scalar_json(a.w)}, {"x", point_json(a.x)}, {"y", point_json(a.y)}});
    return arr;
}

template <class S> json plan_json(const ThreePlan<S>& plan) {
    json arr = json::array();
    for (const auto& a : plan.atoms())
        arr.push_back({{"w", scalar_json(a.w)},
                       {"x", point_json(a.x)},
                       {"y", point_json(a.y)},
                       {"z", point_json(a.z)}});
    return arr;
}

template <class S> json pair_json(const SubspacePair<S>& pair) {
    return {{"dim", pair.dim},
            {"v1", basis_json(pair.basis1)},
            {"v2", basis_json(pair.basis2)},
            {"kernel", basis_json(pair.kernel)},
            {"exact_split", pair.exact_split},
            {"spectral_gap", pair.spectral_gap}};
}

template <class S> json matrix_json(const SymmetricMatrix<S>& m) {
    json rows = json::array();
    for (int i = 0; i < m.dim(); ++i) {
        json row = json::array();
        for (int j = 0; j < m.dim(); ++j) row.push_back(scalar_json(m.at(i, j)));
        rows.push_back(std::move(row));
    }
    return rows;
}

template <class S> json potential_json(const QuadraticPotential<S>& u) {
    return {{"a", matrix_json(u.a)},
            {"linear", point_json(u.linear)},
            {"constant", scalar_json(u.constant)}};
}

inline json tolerances_json(const Tolerances& tol) {
    return {{"float_zero", tol.float_zero},
            {"dedup", tol.dedup},
            {"jacobi_off", tol.jacobi_off},
            {"split_rel", tol.split_rel}};
}

// ---------------------------------------------------------------------------
// Human-readable span descriptions ("span e1", "{0}", "span{(1,1), e3}")
// ---------------------------------------------------------------------------

template <class S> std::string vector_text(const Point<S>& v) {
    int nonzero = -1;
    int count = 0;
    for (int i = 0; i < v.dim(); ++i)
        if (!(v[i] == S(0))) {
            nonzero = i;
            ++count;
        }
    if (count == 1) return "e" + std::to_string(nonzero + 1);
    std::string s = "(";
    for (int i = 0; i < v.dim(); ++i) {
        if (i) s += ",";
        s += scalar_text(v[i]);
    }
    return s + ")";
}

template <class S> std::string span_text(const std::vector<Point<S>>& basis) {
    if (basis.empty()) return "{0}";
    if (basis.size() == 1) return "span " + vector_text(basis[0]);
    std::string s = "span{";
    for (size_t i = 0; i < basis.size(); ++i) {
        if (i) s += ", ";
        s += vector_text(basis[i]);
    }
    return s + "}";
}

template <class S> std::string pair_text(const SubspacePair<S>& pair) {
    return "(" + span_text(pair.basis1) + ", " + span_text(pair.basis2) + ")";
}

// ---------------------------------------------------------------------------
// Instance files
// ---------------------------------------------------------------------------

template <class S> struct Instance {
    int dim = 0;
    DiscreteMeasure<S> mu, nu;           // normalized to probability measures
    S mu_mass{}, nu_mass{};              // original input masses (metadata)
    std::optional<SubspacePair<S>> pair; // from optional "v1"/"v2"
    std::vector<Point<S>> grid;          // from optional "grid"
};

inline json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw input_error("cannot open file: " + path);
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw input_error(path + ": malformed JSON: " + e.what());
    }
}

// "mode" resolution order: --mode flag, then the instance's "mode" field,
// then rational.
inline std::string resolve_mode(const std::string& flag, const json& instance) {
    std::string mode = flag;
    if (mode.empty() && instance.is_object() && instance.contains("mode")) {
        const json& m = instance.at("mode");
        if (!m.is_string())
            throw input_error("mode: expected \"rational\" or \"float\", got " +
                              std::string(m.type_name()));
        mode = m.get<std::string>();
    }
    if (mode.empty()) mode = "rational";
    if (mode != "rational" && mode != "float")
        throw input_error("mode: expected \"rational\" or \"float\", got \"" + mode + "\"");
    return mode;
}

template <class S>
Point<S> parse_point(const json& v, int dim, const std::string& field) {
    if (!v.is_array())
        throw input_error(field + ": expected an array of coordinates, got " +
                          std::string(v.type_name()));
    if (dim >= 0 && static_cast<int>(v.size()) != dim)
        throw input_error(field + ": expected " + std::to_string(dim) + " coordinates, got " +
                          std::to_string(v.size()));
    std::vector<S> coords;
    coords.reserve(v.size());
    for (size_t i = 0; i < v.size(); ++i)
        coords.push_back(scalar_from_json<S>(v[i], field + "[" + std::to_string(i) + "]"));
    return Point<S>(std::move(coords));
}

template <class S>
std::vector<Point<S>> parse_points(const json& v, int dim, const std::string& field) {
    if (!v.is_array())
        throw input_error(field + ": expected an array of points, got " +
                          std::string(v.type_name()));
    std::vector<Point<S>> out;
    out.reserve(v.size());
    for (size_t i = 0; i < v.size(); ++i)
        out.push_back(parse_point<S>(v[i], dim, field + "[" + std::to_string(i) + "]"));
    return out;
}

template <class S>
DiscreteMeasure<S> parse_measure(const json& v, int dim, const std::string& field,
                                 const Tolerances& tol) {
    if (!v.is_array())
        throw input_error(field + ": expected an array of atoms, got " +
                          std::string(v.type_name()));
    if (v.empty()) throw input_error(field + ": needs at least one atom");
    std::vector<WeightedAtom<S>> atoms;
    atoms.reserve(v.size());
    for (size_t i = 0; i < v.size(); ++i) {
        const json& a = v[i];
        const std::string here = field + "[" + std::to_string(i) + "]";
        if (!a.is_object() || !a.contains("x") || !a.contains("w"))
            throw input_error(here + ": expected an object with fields \"x\" and \"w\"");
        for (const auto& [key, _] : a.items())
            if (key != "x" && key != "w") throw input_error(here + ": unknown field \"" + key + "\"");
        atoms.push_back({parse_point<S>(a.at("x"), dim, here + ".x"),
                         scalar_from_json<S>(a.at("w"), here + ".w")});
    }
    try {
        return DiscreteMeasure<S>(dim, std::move(atoms), tol);
    } catch (const input_error& e) {
        throw input_error(field + ": " + e.what());
    }
}

template <class S>
Instance<S> parse_instance(const json& j, const Tolerances& tol) {
    if (!j.is_object()) throw input_error("instance: expected a JSON object at top level");
    static const char* known[] = {"dim", "mu", "nu", "v1", "v2", "grid", "mode"};
    for (const auto& [key, _] : j.items()) {
        bool ok = false;
        for (const char* k : known) ok = ok || key == k;
        if (!ok) throw input_error("instance: unknown field \"" + key + "\"");
    }
    for (const char* req : {"dim", "mu", "nu"})
        if (!j.contains(req)) throw input_error("instance: missing field \"" + std::string(req) + "\"");
    if (!j.at("dim").is_number_integer())
        throw input_error("dim: expected a positive integer");
    Instance<S> inst;
    inst.dim = j.at("dim").get<int>();
    if (inst.dim <= 0) throw input_error("dim: expected a positive integer");

    DiscreteMeasure<S> mu = parse_measure<S>(j.at("mu"), inst.dim, "mu", tol);
    DiscreteMeasure<S> nu = parse_measure<S>(j.at("nu"), inst.dim, "nu", tol);
    inst.mu_mass = mu.total_mass();
    inst.nu_mass = nu.total_mass();
    // measures are normalized to probabilities on load; the original masses
    // stay available as metadata
    inst.mu = mu.normalized();
    inst.nu = nu.normalized();

    if (j.contains("v1") || j.contains("v2")) {
        std::vector<Point<S>> v1, v2;
        if (j.contains("v1")) v1 = parse_points<S>(j.at("v1"), inst.dim, "v1");
        if (j.contains("v2")) v2 = parse_points<S>(j.at("v2"), inst.dim, "v2");
        try {
            inst.pair = make_subspace_pair<S>(inst.dim, v1, v2, tol);
        } catch (const input_error& e) {
            throw input_error(std::string("v1/v2: ") + e.what());
        }
    }
    if (j.contains("grid")) inst.grid = parse_points<S>(j.at("grid"), inst.dim, "grid");
    return inst;
}

// Grid files: either a bare array of points or {"points": [...]}.
template <class S>
std::vector<Point<S>> parse_grid_file(const std::string& path, int dim) {
    const json j = load_json_file(path);
    const json* pts = &j;
    if (j.is_object()) {
        if (!j.contains("points")) throw input_error(path + ": missing field \"points\"");
        pts = &j.at("points");
    }
    return parse_points<S>(*pts, dim, path);
}

} // namespace bimart::cli
