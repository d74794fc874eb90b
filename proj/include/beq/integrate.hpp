#pragma once

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "beq/core.hpp"
#include "beq/diagnostics.hpp"

namespace beq {

enum class Formulation { eulerian, lagrangian };

struct SolverState {
    double time = 0.0;
    Formulation formulation = Formulation::eulerian;
    VectorField u; // Eulerian velocity
    FlowMap phi;   // Lagrangian map
    VectorField v; // Lagrangian velocity

    static SolverState make_eulerian(double t, VectorField u0) {
        SolverState s;
        s.time = t;
        s.formulation = Formulation::eulerian;
        s.u = std::move(u0);
        return s;
    }
    static SolverState make_lagrangian(double t, FlowMap phi0, VectorField v0) {
        SolverState s;
        s.time = t;
        s.formulation = Formulation::lagrangian;
        s.phi = std::move(phi0);
        s.v = std::move(v0);
        return s;
    }
};

struct BlowupCaps {
    double max_sup_norm = 1e6;
    double min_jacobian = 1e-3;
};

struct RunConfig {
    double dt = 0.0; // ignored when dt_auto
    bool dt_auto = false;
    double t_end = 1.0;
    std::string scheme = "rk4";
    double safety = 0.5; // for auto dt
    BlowupCaps blowup_caps;
    int diagnostics_every = 1;
    int snapshot_every = 0; // 0: keep only initial and final states
    InterpMode interp = InterpMode::spline;
    InvertOptions invert;
};

struct Trajectory {
    std::vector<SolverState> states;
    std::vector<DiagnosticSeries> series;
    std::string termination; // "completed" | "blowup:<reason>"
    double dt_used = 0.0;

    const DiagnosticSeries* find(const std::string& name) const {
        for (const auto& s : series)
            if (s.name == name) return &s;
        return nullptr;
    }
};

// Advective step-size heuristic dt = safety * min_j h_j / max(1e-12, sup|u|).
inline double cfl_dt(const VectorField& u, const GridSpec& g, double safety) {
    if (!(safety > 0.0 && safety <= 1.0)) throw invalid_input("cfl_dt: safety must be in (0, 1]");
    return safety * g.min_spacing() / std::max(1e-12, sup_norm(u));
}

// Generic classical RK4 stage arithmetic over flat vectors; used by the
// typed steps below and directly by test harnesses.
template <class Rhs>
inline std::vector<double> rk4_step_flat(const std::vector<double>& y, double t, double dt,
                                         Rhs&& rhs) {
    const std::size_t n = y.size();
    std::vector<double> k1 = rhs(t, y), s(n);
    for (std::size_t i = 0; i < n; ++i) s[i] = y[i] + 0.5 * dt * k1[i];
    std::vector<double> k2 = rhs(t + 0.5 * dt, s);
    for (std::size_t i = 0; i < n; ++i) s[i] = y[i] + 0.5 * dt * k2[i];
    std::vector<double> k3 = rhs(t + 0.5 * dt, s);
    for (std::size_t i = 0; i < n; ++i) s[i] = y[i] + dt * k3[i];
    std::vector<double> k4 = rhs(t + dt, s);
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i)
        out[i] = y[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    return out;
}

// One classical Runge-Kutta step of the configured formulation.
inline SolverState step_rk4(const SolverState& state, double dt, const BParams& p,
                            InterpMode mode = InterpMode::spline, const InvertOptions& opt = {}) {
    if (!(dt > 0.0)) throw invalid_input("step_rk4: dt must be positive");
    if (state.formulation == Formulation::eulerian) {
        const VectorField& u = state.u;
        const VectorField k1 = eulerian_rhs(u, p);
        VectorField s = u;
        axpy(s, 0.5 * dt, k1);
        const VectorField k2 = eulerian_rhs(s, p);
        s = u;
        axpy(s, 0.5 * dt, k2);
        const VectorField k3 = eulerian_rhs(s, p);
        s = u;
        axpy(s, dt, k3);
        const VectorField k4 = eulerian_rhs(s, p);
        VectorField out = u;
        axpy(out, dt / 6.0, k1);
        axpy(out, dt / 3.0, k2);
        axpy(out, dt / 3.0, k3);
        axpy(out, dt / 6.0, k4);
        if (!all_finite(out)) throw blowup_error("nan", "step_rk4: non-finite state");
        return SolverState::make_eulerian(state.time + dt, std::move(out));
    }

    const VectorField& f = state.phi.displacement;
    const VectorField& v = state.v;
    auto stage = [&](const VectorField& fs, const VectorField& vs) {
        return lagrangian_rhs(make_flowmap(fs), vs, p, mode, opt);
    };
    const auto k1 = stage(f, v);
    VectorField fs = f, vs = v;
    axpy(fs, 0.5 * dt, k1.first);
    axpy(vs, 0.5 * dt, k1.second);
    const auto k2 = stage(fs, vs);
    fs = f;
    vs = v;
    axpy(fs, 0.5 * dt, k2.first);
    axpy(vs, 0.5 * dt, k2.second);
    const auto k3 = stage(fs, vs);
    fs = f;
    vs = v;
    axpy(fs, dt, k3.first);
    axpy(vs, dt, k3.second);
    const auto k4 = stage(fs, vs);
    VectorField fo = f, vo = v;
    axpy(fo, dt / 6.0, k1.first);
    axpy(fo, dt / 3.0, k2.first);
    axpy(fo, dt / 3.0, k3.first);
    axpy(fo, dt / 6.0, k4.first);
    axpy(vo, dt / 6.0, k1.second);
    axpy(vo, dt / 3.0, k2.second);
    axpy(vo, dt / 3.0, k3.second);
    axpy(vo, dt / 6.0, k4.second);
    if (!all_finite(fo) || !all_finite(vo)) throw blowup_error("nan", "step_rk4: non-finite state");
    return SolverState::make_lagrangian(state.time + dt, make_flowmap(std::move(fo)),
                                        std::move(vo));
}

namespace detail {

// Eulerian velocity of a state (reconstructed for Lagrangian states).
inline VectorField state_velocity(const SolverState& s, InterpMode mode, const InvertOptions& opt) {
    if (s.formulation == Formulation::eulerian) return s.u;
    return compose(s.v, invert_map(s.phi, opt, mode), mode);
}

struct diag_recorder {
    std::vector<DiagnosticSeries> series;
    const BParams* p = nullptr;
    bool lagrangian = false;
    double energy0 = 0.0;
    bool first = true;

    void init(const BParams& params, bool lagr) {
        p = &params;
        lagrangian = lagr;
        series.push_back({"sup_u", {}, {}});
        series.push_back({"l2_u", {}, {}});
        series.push_back({"energy", {}, {}});
        series.push_back({"energy_rel_drift", {}, {}});
        for (int j = 0; j < p->grid.dim; ++j)
            series.push_back({"mean_momentum_" + std::to_string(j), {}, {}});
        for (int s = 1; s <= 4; ++s)
            series.push_back({"sobolev_s" + std::to_string(s), {}, {}});
        if (lagrangian) series.push_back({"min_jacobian", {}, {}});
    }

    void record(const SolverState& st, const VectorField& u) {
        std::size_t i = 0;
        auto push = [&](double val) {
            series[i].times.push_back(st.time);
            series[i].values.push_back(val);
            ++i;
        };
        push(sup_norm(u));
        push(l2_norm(u));
        const double en = energy(u, *p);
        if (first) {
            energy0 = en;
            first = false;
        }
        push(en);
        push(std::abs(en - energy0) / std::max(std::abs(energy0), 1e-300));
        const std::array<double, 3> mm = mean_momentum(u, *p);
        for (int j = 0; j < p->grid.dim; ++j) push(mm[j]);
        for (int s = 1; s <= 4; ++s) push(sobolev_norm(u, static_cast<double>(s)));
        if (lagrangian) push(min_jacobian_det(st.phi.displacement));
    }
};

} // namespace detail

// Integrate to t_end or blow-up with fixed-step RK4; records diagnostics and
// snapshots at the configured cadences (initial and final states always).
inline Trajectory run(const SolverState& initial, const BParams& p, const RunConfig& cfg) {
    if (!(cfg.t_end >= 0.0)) throw invalid_input("run: t_end must be >= 0");
    if (cfg.scheme != "rk4") throw invalid_input("run: unknown scheme " + cfg.scheme);
    if (!(cfg.blowup_caps.max_sup_norm > 0.0) || !(cfg.blowup_caps.min_jacobian > 0.0))
        throw invalid_input("run: blow-up caps must be positive");

    const bool lagr = initial.formulation == Formulation::lagrangian;
    Trajectory traj;
    detail::diag_recorder rec;
    rec.init(p, lagr);

    double dt = cfg.dt;
    if (cfg.dt_auto) {
        const VectorField& uref = lagr ? initial.v : initial.u;
        dt = cfl_dt(uref, p.grid, cfg.safety);
        if (cfg.t_end > 0.0) dt = std::min(dt, cfg.t_end);
    }
    long steps = 0;
    if (cfg.t_end > 0.0) {
        if (!(dt > 0.0)) throw invalid_input("run: dt must be positive");
        steps = static_cast<long>(std::ceil(cfg.t_end / dt - 1e-9));
        steps = std::max<long>(steps, 1);
        dt = cfg.t_end / static_cast<double>(steps);
    }
    traj.dt_used = dt;

    SolverState state = initial;
    rec.record(state, detail::state_velocity(state, cfg.interp, cfg.invert));
    traj.states.push_back(state);
    traj.termination = "completed";

    for (long step = 1; step <= steps; ++step) {
        try {
            state = step_rk4(state, dt, p, cfg.interp, cfg.invert);

            if (lagr) {
                const double dmin = min_jacobian_det(state.phi.displacement);
                if (dmin < cfg.blowup_caps.min_jacobian)
                    throw blowup_error("jacobian", "run: Jacobian determinant " +
                                                       std::to_string(dmin) + " below floor");
            }
            const double sup = sup_norm(lagr ? state.v : state.u);
            if (sup > cfg.blowup_caps.max_sup_norm)
                throw blowup_error("sup_norm", "run: sup-norm " + std::to_string(sup) + " above cap");
        } catch (const blowup_error& e) {
            traj.termination = "blowup:" + e.reason;
            break;
        } catch (const newton_error&) {
            traj.termination = "blowup:newton";
            break;
        }

        const bool last = step == steps;
        if (last || (cfg.diagnostics_every > 0 && step % cfg.diagnostics_every == 0))
            rec.record(state, detail::state_velocity(state, cfg.interp, cfg.invert));
        if (last || (cfg.snapshot_every > 0 && step % cfg.snapshot_every == 0))
            traj.states.push_back(state);
    }

    traj.series = std::move(rec.series);
    return traj;
}

// Norm and ratio traces over a trajectory's velocity snapshots.
inline std::vector<DiagnosticSeries> regularity_trace(const Trajectory& traj,
                                                      const std::vector<double>& orders,
                                                      InterpMode mode = InterpMode::spline,
                                                      const InvertOptions& opt = {}) {
    if (traj.states.empty()) throw invalid_input("regularity_trace: trajectory has no snapshots");
    return regularity_trace_impl(
        traj.states,
        [&](const SolverState& s) { return detail::state_velocity(s, mode, opt); }, orders);
}

} // namespace beq
