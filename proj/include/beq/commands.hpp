#pragma once

#include <cmath>
#include <filesystem>
#include <future>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "beq/config.hpp"
#include "beq/integrate.hpp"
#include "beq/output.hpp"

namespace beq {

inline constexpr int exit_ok = 0;
inline constexpr int exit_config_error = 1;
inline constexpr int exit_blowup = 2;
inline constexpr int exit_validation = 3;

struct CmdOptions {
    std::string out_dir;  // empty: use the config's output.directory
    int threads = 1;
    std::optional<std::uint64_t> seed_override;
    double tolerance = 1e-4;        // compare: final relative sup difference
    int levels = 3;                 // convergence
    std::string mode = "temporal";  // convergence: temporal | spatial
};

namespace detail {

inline std::filesystem::path resolve_out_dir(const LoadedConfig& lc, const CmdOptions& opt) {
    const std::filesystem::path dir = opt.out_dir.empty() ? lc.out_dir : opt.out_dir;
    std::filesystem::create_directories(dir);
    return dir;
}

inline SolverState initial_state(const LoadedConfig& lc, Formulation f) {
    if (f == Formulation::eulerian) return SolverState::make_eulerian(0.0, lc.u0);
    return SolverState::make_lagrangian(0.0, identity_map(lc.grid), lc.u0);
}

inline Trajectory run_formulation(const LoadedConfig& lc, Formulation f) {
    return run(initial_state(lc, f), lc.params, lc.run);
}

inline int report_config_error(const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_config_error;
}

} // namespace detail

// ---------------------------------------------------------------------------
// run: one configured run (or both formulations), series + snapshots + manifest
// ---------------------------------------------------------------------------
inline int cmd_run(const std::string& config_path, const CmdOptions& opt = {}) {
    const std::string started = utc_timestamp();
    try {
        const LoadedConfig lc = load_run_config(config_path, opt.seed_override);
        const auto dir = detail::resolve_out_dir(lc, opt);

        std::vector<std::pair<std::string, Trajectory>> results;
        if (lc.formulation == "both") {
            if (opt.threads > 1) {
                auto fe = std::async(std::launch::async,
                                     [&] { return detail::run_formulation(lc, Formulation::eulerian); });
                auto fl = std::async(std::launch::async, [&] {
                    return detail::run_formulation(lc, Formulation::lagrangian);
                });
                results.emplace_back("eulerian", fe.get());
                results.emplace_back("lagrangian", fl.get());
            } else {
                results.emplace_back("eulerian", detail::run_formulation(lc, Formulation::eulerian));
                results.emplace_back("lagrangian",
                                     detail::run_formulation(lc, Formulation::lagrangian));
            }
        } else {
            const Formulation f =
                lc.formulation == "eulerian" ? Formulation::eulerian : Formulation::lagrangian;
            results.emplace_back(lc.formulation, detail::run_formulation(lc, f));
        }

        std::vector<std::string> files;
        json termination;
        bool all_completed = true;
        const bool single = results.size() == 1;
        for (const auto& [name, traj] : results) {
            termination[name] = traj.termination;
            all_completed = all_completed && traj.termination == "completed";
            if (lc.write_series) {
                const std::string fname = single ? "series.csv" : "series_" + name + ".csv";
                write_series_csv(dir / fname, traj.series);
                files.push_back(fname);
            }
            if (lc.write_snapshots) {
                auto snap = write_snapshots(dir, traj, name);
                files.insert(files.end(), snap.begin(), snap.end());
            }
        }
        write_manifest(dir, lc.raw, started, termination, files);
        return all_completed ? exit_ok : exit_blowup;
    } catch (const invalid_input& e) {
        return detail::report_config_error(e);
    } catch (const singular_symbol_error& e) {
        return detail::report_config_error(e);
    } catch (const std::exception& e) {
        return detail::report_config_error(e);
    }
}

// ---------------------------------------------------------------------------
// validate-symbol: certify the symbol classes, write the report
// ---------------------------------------------------------------------------
inline int cmd_validate_symbol(const std::string& config_path, const CmdOptions& opt = {}) {
    const std::string started = utc_timestamp();
    try {
        const SymbolConfig sc = load_symbol_config(config_path);
        const std::filesystem::path dir = opt.out_dir.empty() ? "." : opt.out_dir;
        std::filesystem::create_directories(dir);

        const ClassReport rep = validate_class(sc.symbol, sc.order, sc.plan);

        json rj;
        rj["symbol"] = sc.symbol.name;
        rj["order_tested"] = rep.order_tested;
        rj["s_r_bound"] = {{"ok", rep.s_r_bound_ok}, {"worst_ratio", rep.s_r_worst_ratio}};
        rj["elliptic"] = {{"ok", rep.elliptic_ok},
                          {"worst_ratio", std::isfinite(rep.elliptic_worst_ratio)
                                              ? json(rep.elliptic_worst_ratio)
                                              : json("inf")}};
        rj["hermitian_pd"] = {{"ok", rep.hermitian_pd_ok}, {"min_eigenvalue", rep.min_eigenvalue}};
        rj["sample_count"] = rep.sample_count;
        rj["cap"] = sc.plan.cap;
        rj["xi_max"] = sc.plan.xi_max;
        {
            std::ofstream out(dir / "class_report.json", std::ios::binary);
            out << rj.dump(2) << "\n";
        }
        write_manifest(dir, sc.raw, started, json(rep.all_ok() ? "pass" : "fail"),
                       {"class_report.json"});
        return rep.all_ok() ? exit_ok : exit_validation;
    } catch (const std::exception& e) {
        return detail::report_config_error(e);
    }
}

// ---------------------------------------------------------------------------
// compare: Eulerian vs Lagrangian from matched initial data
// ---------------------------------------------------------------------------
inline int cmd_compare(const std::string& config_path, const CmdOptions& opt = {}) {
    const std::string started = utc_timestamp();
    try {
        const LoadedConfig lc = load_run_config(config_path, opt.seed_override);
        if (lc.formulation != "both")
            throw invalid_input("compare: run.formulation must be \"both\"");
        const auto dir = detail::resolve_out_dir(lc, opt);

        Trajectory te, tl;
        if (opt.threads > 1) {
            auto fe = std::async(std::launch::async,
                                 [&] { return detail::run_formulation(lc, Formulation::eulerian); });
            auto fl = std::async(std::launch::async,
                                 [&] { return detail::run_formulation(lc, Formulation::lagrangian); });
            te = fe.get();
            tl = fl.get();
        } else {
            te = detail::run_formulation(lc, Formulation::eulerian);
            tl = detail::run_formulation(lc, Formulation::lagrangian);
        }

        std::vector<std::string> files;
        json termination;
        termination["eulerian"] = te.termination;
        termination["lagrangian"] = tl.termination;
        if (lc.write_series) {
            write_series_csv(dir / "series_eulerian.csv", te.series);
            write_series_csv(dir / "series_lagrangian.csv", tl.series);
            files.push_back("series_eulerian.csv");
            files.push_back("series_lagrangian.csv");
        }

        if (te.termination != "completed" || tl.termination != "completed") {
            write_manifest(dir, lc.raw, started, termination, files);
            return exit_blowup;
        }

        DiagnosticSeries sup_diff{"sup_diff", {}, {}};
        DiagnosticSeries rel_sup{"rel_sup_diff", {}, {}};
        DiagnosticSeries rel_l2{"rel_l2_diff", {}, {}};
        const std::size_t n = std::min(te.states.size(), tl.states.size());
        double final_rel_sup = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const SolverState& se = te.states[i];
            const SolverState& sl = tl.states[i];
            const VectorField urec =
                compose(sl.v, invert_map(sl.phi, lc.run.invert, lc.run.interp), lc.run.interp);
            const VectorField diff = se.u - urec;
            const double sd = sup_norm(diff);
            const double rs = sd / std::max(sup_norm(se.u), 1e-300);
            const double rl = l2_norm(diff) / std::max(l2_norm(se.u), 1e-300);
            sup_diff.times.push_back(se.time);
            sup_diff.values.push_back(sd);
            rel_sup.times.push_back(se.time);
            rel_sup.values.push_back(rs);
            rel_l2.times.push_back(se.time);
            rel_l2.values.push_back(rl);
            final_rel_sup = rs;
        }
        write_series_csv(dir / "compare.csv", {sup_diff, rel_sup, rel_l2});
        files.push_back("compare.csv");
        write_manifest(dir, lc.raw, started, termination, files);
        return final_rel_sup <= opt.tolerance ? exit_ok : exit_validation;
    } catch (const std::exception& e) {
        return detail::report_config_error(e);
    }
}

// ---------------------------------------------------------------------------
// convergence: temporal Richardson orders (dt, dt/2, ...) or spatial
// refinement errors (N, 2N, ...) against the finest level
// ---------------------------------------------------------------------------
namespace detail {

inline VectorField final_velocity(const Trajectory& t, const RunConfig& rc) {
    return state_velocity(t.states.back(), rc.interp, rc.invert);
}

// Sample a fine-grid field at the nodes of a coarser grid (integer stride).
inline VectorField restrict_to(const VectorField& fine, const GridSpec& coarse) {
    VectorField r = make_vector(coarse);
    const GridSpec& gf = fine.grid;
    int stride[3] = {1, 1, 1};
    for (int j = 0; j < coarse.dim; ++j) stride[j] = gf.points[j] / coarse.points[j];
    for_each_node(coarse, [&](int i0, int i1, int i2, std::size_t m) {
        const std::size_t mf = flat_index(gf, i0 * stride[0], i1 * stride[1], i2 * stride[2]);
        for (int c = 0; c < coarse.dim; ++c) r.components[c].values[m] = fine.components[c].values[mf];
    });
    return r;
}

} // namespace detail

inline int cmd_convergence(const std::string& config_path, const CmdOptions& opt = {}) {
    const std::string started = utc_timestamp();
    try {
        if (opt.levels < 3) throw invalid_input("convergence: need at least 3 levels");
        if (opt.mode != "temporal" && opt.mode != "spatial")
            throw invalid_input("convergence: mode must be temporal|spatial");
        const json base = parse_json_file(config_path);
        LoadedConfig lc0 = load_run_config_json(base, opt.seed_override);
        if (lc0.formulation == "both")
            throw invalid_input("convergence: pick one formulation (eulerian or lagrangian)");
        const Formulation form =
            lc0.formulation == "eulerian" ? Formulation::eulerian : Formulation::lagrangian;
        const auto dir = detail::resolve_out_dir(lc0, opt);

        struct Level {
            double dt = 0.0;
            int n = 0;
            Trajectory traj;
            RunConfig rc;
        };
        std::vector<Level> levels(static_cast<std::size_t>(opt.levels));

        auto run_level = [&](int i) {
            Level lev;
            if (opt.mode == "temporal") {
                LoadedConfig lc = load_run_config_json(base, opt.seed_override);
                double dt0 = lc.run.dt_auto ? cfl_dt(lc.u0, lc.grid, lc.run.safety) : lc.run.dt;
                lc.run.dt_auto = false;
                lc.run.dt = dt0 / std::pow(2.0, i);
                lev.dt = lc.run.dt;
                lev.n = lc.grid.points[0];
                lev.rc = lc.run;
                lev.traj = run(detail::initial_state(lc, form), lc.params, lc.run);
            } else {
                json patched = base;
                for (auto& p : patched.at("grid").at("points"))
                    p = p.get<int>() * (1 << i);
                LoadedConfig lc = load_run_config_json(patched, opt.seed_override);
                lev.dt = lc.run.dt;
                lev.n = lc.grid.points[0];
                lev.rc = lc.run;
                lev.traj = run(detail::initial_state(lc, form), lc.params, lc.run);
            }
            return lev;
        };

        if (opt.threads > 1) {
            std::vector<std::future<Level>> futs;
            for (int i = 0; i < opt.levels; ++i)
                futs.push_back(std::async(std::launch::async, run_level, i));
            for (int i = 0; i < opt.levels; ++i) levels[i] = futs[i].get();
        } else {
            for (int i = 0; i < opt.levels; ++i) levels[i] = run_level(i);
        }

        json termination;
        bool blew_up = false;
        for (int i = 0; i < opt.levels; ++i) {
            termination["level_" + std::to_string(i)] = levels[i].traj.termination;
            blew_up = blew_up || levels[i].traj.termination != "completed";
        }
        if (blew_up) {
            write_manifest(dir, base, started, termination, {});
            return exit_blowup;
        }

        std::ofstream out(dir / "convergence.csv", std::ios::binary);
        double observed_order = 0.0;
        if (opt.mode == "temporal") {
            std::vector<VectorField> finals;
            for (auto& lev : levels) finals.push_back(detail::final_velocity(lev.traj, lev.rc));
            std::vector<double> diffs;
            for (int i = 0; i + 1 < opt.levels; ++i)
                diffs.push_back(l2_norm(finals[i] - finals[i + 1]));
            out << "level,dt,diff_to_next,observed_order\n";
            for (int i = 0; i < opt.levels; ++i) {
                out << i << "," << format_double(levels[i].dt) << ",";
                out << (i < static_cast<int>(diffs.size()) ? format_double(diffs[i]) : "");
                out << ",";
                if (i + 2 < opt.levels && diffs[i + 1] > 0.0) {
                    const double p = std::log2(diffs[i] / diffs[i + 1]);
                    out << format_double(p);
                    observed_order = p; // finest triplet wins
                }
                out << "\n";
            }
        } else {
            const VectorField& fine = detail::final_velocity(levels.back().traj, levels.back().rc);
            out << "level,points,error_vs_finest,ratio_to_next\n";
            std::vector<double> errs;
            for (int i = 0; i + 1 < opt.levels; ++i) {
                const VectorField coarse = detail::final_velocity(levels[i].traj, levels[i].rc);
                errs.push_back(sup_norm(coarse - detail::restrict_to(fine, coarse.grid)));
            }
            for (int i = 0; i < opt.levels; ++i) {
                out << i << "," << levels[i].n << ",";
                out << (i < static_cast<int>(errs.size()) ? format_double(errs[i]) : "");
                out << ",";
                if (i + 1 < static_cast<int>(errs.size()) && errs[i + 1] > 0.0)
                    out << format_double(errs[i] / errs[i + 1]);
                out << "\n";
            }
        }
        out.close();
        write_manifest(dir, base, started, termination, {"convergence.csv"});
        if (opt.mode == "temporal" && observed_order < 3.8) return exit_validation;
        return exit_ok;
    } catch (const std::exception& e) {
        return detail::report_config_error(e);
    }
}

} // namespace beq
