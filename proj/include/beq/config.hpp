#pragma once

#include <array>
#include <cstdint>
#include <fstream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "beq/core.hpp"
#include "beq/integrate.hpp"
#include "beq/multiplier.hpp"
#include "beq/scenarios.hpp"

namespace beq {

using json = nlohmann::ordered_json;

namespace detail {

// Fail-closed key handling: every key must be known, required ones present.
inline void expect_keys(const json& obj, const std::string& ctx,
                        const std::vector<std::string>& required,
                        const std::vector<std::string>& optional = {}) {
    if (!obj.is_object()) throw invalid_input("config: " + ctx + " must be an object");
    std::set<std::string> known(required.begin(), required.end());
    known.insert(optional.begin(), optional.end());
    for (const auto& [key, _] : obj.items())
        if (!known.count(key)) throw invalid_input("config: unknown key '" + key + "' in " + ctx);
    for (const auto& req : required)
        if (!obj.contains(req))
            throw invalid_input("config: missing key '" + req + "' in " + ctx);
}

inline double num(const json& j, const std::string& ctx) {
    if (!j.is_number()) throw invalid_input("config: " + ctx + " must be a number");
    return j.get<double>();
}

} // namespace detail

inline GridSpec grid_from_json(const json& j) {
    detail::expect_keys(j, "grid", {"dim", "points", "lengths"});
    const int dim = j.at("dim").get<int>();
    if (!j.at("points").is_array() || !j.at("lengths").is_array() ||
        static_cast<int>(j.at("points").size()) != dim ||
        static_cast<int>(j.at("lengths").size()) != dim)
        throw invalid_input("config: grid points/lengths must be arrays of length dim");
    std::array<int, 3> pts{1, 1, 1};
    std::array<double, 3> len{1.0, 1.0, 1.0};
    for (int k = 0; k < dim && k < 3; ++k) {
        pts[k] = j.at("points")[k].get<int>();
        len[k] = detail::num(j.at("lengths")[k], "grid.lengths");
    }
    return make_grid(dim, pts, len);
}

inline MultiplierSymbol operator_from_json(const json& j, int dim) {
    detail::expect_keys(j, "operator", {"type"}, {"s", "terms"});
    const std::string type = j.at("type").get<std::string>();
    if (type == "sobolev") {
        detail::expect_keys(j, "operator(sobolev)", {"type", "s"});
        return builtin_sobolev(dim, detail::num(j.at("s"), "operator.s"));
    }
    if (type == "hilbert") {
        detail::expect_keys(j, "operator(hilbert)", {"type"});
        if (dim != 1) throw invalid_input("config: hilbert operator is 1D only");
        return builtin_hilbert();
    }
    if (type == "diff_poly") {
        detail::expect_keys(j, "operator(diff_poly)", {"type", "terms"});
        std::vector<PolyTerm> terms;
        for (const auto& t : j.at("terms")) {
            detail::expect_keys(t, "operator.terms[]", {"coeff", "alpha"});
            PolyTerm pt;
            pt.coeff = detail::num(t.at("coeff"), "terms.coeff");
            const auto& al = t.at("alpha");
            if (!al.is_array() || static_cast<int>(al.size()) != dim)
                throw invalid_input("config: terms.alpha must be an array of length dim");
            for (int k = 0; k < dim; ++k) pt.alpha[k] = al[k].get<int>();
            terms.push_back(pt);
        }
        return builtin_diff_poly(dim, terms);
    }
    throw invalid_input("config: unknown operator type '" + type + "'");
}

inline VectorField scenario_from_json(const json& j, const GridSpec& g,
                                      std::optional<std::uint64_t> seed_override) {
    detail::expect_keys(j, "scenario", {"type"},
                        {"center", "amplitude", "width", "seed", "kmax", "c", "t", "sigma_k"});
    const std::string type = j.at("type").get<std::string>();
    if (type == "gaussian") {
        detail::expect_keys(j, "scenario(gaussian)", {"type", "center", "amplitude", "width"});
        std::array<double, 3> center{0, 0, 0};
        const auto& c = j.at("center");
        if (!c.is_array() || static_cast<int>(c.size()) != g.dim)
            throw invalid_input("config: scenario.center must be an array of length dim");
        for (int k = 0; k < g.dim; ++k) center[k] = detail::num(c[k], "scenario.center");
        return gaussian_bump(g, center, detail::num(j.at("amplitude"), "scenario.amplitude"),
                             detail::num(j.at("width"), "scenario.width"));
    }
    if (type == "random") {
        detail::expect_keys(j, "scenario(random)", {"type", "seed", "kmax", "amplitude"});
        const std::uint64_t seed =
            seed_override ? *seed_override : j.at("seed").get<std::uint64_t>();
        return band_limited_random(g, seed, j.at("kmax").get<int>(),
                                   detail::num(j.at("amplitude"), "scenario.amplitude"));
    }
    if (type == "peakon") {
        detail::expect_keys(j, "scenario(peakon)", {"type", "c"}, {"t", "sigma_k"});
        const double c = detail::num(j.at("c"), "scenario.c");
        const double t = j.contains("t") ? detail::num(j.at("t"), "scenario.t") : 0.0;
        VectorField u = periodic_peakon(g, c, t);
        if (j.contains("sigma_k")) u = mollify(u, detail::num(j.at("sigma_k"), "scenario.sigma_k"));
        return u;
    }
    throw invalid_input("config: unknown scenario type '" + type + "'");
}

struct LoadedConfig {
    json raw;
    GridSpec grid;
    BParams params;
    VectorField u0;
    std::string formulation; // "eulerian" | "lagrangian" | "both"
    RunConfig run;
    std::string out_dir;
    bool write_snapshots = false;
    bool write_series = true;
};

inline json parse_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw invalid_input("config: cannot open " + path);
    try {
        return json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw invalid_input("config: JSON parse error in " + path + ": " + e.what());
    }
}

inline LoadedConfig load_run_config_json(json raw,
                                         std::optional<std::uint64_t> seed_override = {}) {
    LoadedConfig lc;
    lc.raw = std::move(raw);
    detail::expect_keys(lc.raw, "config", {"grid", "params", "scenario", "run", "output"});

    lc.grid = grid_from_json(lc.raw.at("grid"));

    const json& pj = lc.raw.at("params");
    detail::expect_keys(pj, "params", {"b", "operator"});
    lc.params = make_bparams(detail::num(pj.at("b"), "params.b"),
                             operator_from_json(pj.at("operator"), lc.grid.dim), lc.grid);

    lc.u0 = scenario_from_json(lc.raw.at("scenario"), lc.grid, seed_override);

    const json& rj = lc.raw.at("run");
    detail::expect_keys(rj, "run", {"formulation", "dt", "t_end"},
                        {"safety", "diagnostics_every", "snapshot_every", "blowup_caps",
                         "interpolation"});
    lc.formulation = rj.at("formulation").get<std::string>();
    if (lc.formulation != "eulerian" && lc.formulation != "lagrangian" &&
        lc.formulation != "both")
        throw invalid_input("config: run.formulation must be eulerian|lagrangian|both");
    if (rj.at("dt").is_string()) {
        if (rj.at("dt").get<std::string>() != "auto")
            throw invalid_input("config: run.dt must be a positive number or \"auto\"");
        lc.run.dt_auto = true;
    } else {
        lc.run.dt = detail::num(rj.at("dt"), "run.dt");
        if (!(lc.run.dt > 0.0)) throw invalid_input("config: run.dt must be positive");
    }
    lc.run.t_end = detail::num(rj.at("t_end"), "run.t_end");
    if (!(lc.run.t_end >= 0.0)) throw invalid_input("config: run.t_end must be >= 0");
    if (rj.contains("safety")) lc.run.safety = detail::num(rj.at("safety"), "run.safety");
    if (rj.contains("diagnostics_every"))
        lc.run.diagnostics_every = rj.at("diagnostics_every").get<int>();
    if (rj.contains("snapshot_every")) lc.run.snapshot_every = rj.at("snapshot_every").get<int>();
    if (rj.contains("blowup_caps")) {
        const json& bj = rj.at("blowup_caps");
        detail::expect_keys(bj, "run.blowup_caps", {}, {"max_sup_norm", "min_jacobian"});
        if (bj.contains("max_sup_norm"))
            lc.run.blowup_caps.max_sup_norm = detail::num(bj.at("max_sup_norm"), "max_sup_norm");
        if (bj.contains("min_jacobian"))
            lc.run.blowup_caps.min_jacobian = detail::num(bj.at("min_jacobian"), "min_jacobian");
        if (!(lc.run.blowup_caps.max_sup_norm > 0.0) || !(lc.run.blowup_caps.min_jacobian > 0.0))
            throw invalid_input("config: blow-up caps must be positive");
    }
    if (rj.contains("interpolation")) {
        const std::string m = rj.at("interpolation").get<std::string>();
        if (m == "spline")
            lc.run.interp = InterpMode::spline;
        else if (m == "trig")
            lc.run.interp = InterpMode::trig;
        else
            throw invalid_input("config: run.interpolation must be spline|trig");
    }
    lc.run.invert.jacobian_margin = lc.run.blowup_caps.min_jacobian;

    const json& oj = lc.raw.at("output");
    detail::expect_keys(oj, "output", {"directory"}, {"snapshots", "series"});
    lc.out_dir = oj.at("directory").get<std::string>();
    if (oj.contains("snapshots")) lc.write_snapshots = oj.at("snapshots").get<bool>();
    if (oj.contains("series")) lc.write_series = oj.at("series").get<bool>();
    return lc;
}

inline LoadedConfig load_run_config(const std::string& path,
                                    std::optional<std::uint64_t> seed_override = {}) {
    return load_run_config_json(parse_json_file(path), seed_override);
}

// Config for `validate-symbol`: operator plus test order and sampling plan.
struct SymbolConfig {
    json raw;
    MultiplierSymbol symbol;
    double order = 0.0;
    SamplePlan plan;
};

inline SymbolConfig load_symbol_config(const std::string& path) {
    SymbolConfig sc;
    sc.raw = parse_json_file(path);
    detail::expect_keys(sc.raw, "config", {"dim", "operator", "order"},
                        {"xi_max", "samples", "cap"});
    const int dim = sc.raw.at("dim").get<int>();
    if (dim < 1 || dim > 3) throw invalid_input("config: dim must be 1..3");
    sc.symbol = operator_from_json(sc.raw.at("operator"), dim);
    sc.order = detail::num(sc.raw.at("order"), "order");
    if (sc.raw.contains("xi_max")) sc.plan.xi_max = detail::num(sc.raw.at("xi_max"), "xi_max");
    if (sc.raw.contains("samples")) sc.plan.count = sc.raw.at("samples").get<int>();
    if (sc.raw.contains("cap")) sc.plan.cap = detail::num(sc.raw.at("cap"), "cap");
    if (sc.plan.count < 2 || !(sc.plan.xi_max > sc.plan.xi_min) || !(sc.plan.cap > 0.0))
        throw invalid_input("config: invalid sampling plan");
    return sc;
}

} // namespace beq
