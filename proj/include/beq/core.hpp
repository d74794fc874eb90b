#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <memory>
#include <string>
#include <utility>

#include "beq/grid.hpp"
#include "beq/interp.hpp"
#include "beq/multiplier.hpp"

namespace beq {

// ---------------------------------------------------------------------------
// Equation parameters: family constant b, inertia operator, grid.
// ---------------------------------------------------------------------------
struct BParams {
    double b = 2.0;
    MultiplierSymbol inertia;
    GridSpec grid;
    // symbol values tabulated once per grid; shared so copies stay cheap
    std::shared_ptr<const SymbolTable> table;
};

inline BParams make_bparams(double b, MultiplierSymbol inertia, const GridSpec& grid) {
    if (!std::isfinite(b)) throw invalid_input("bparams: b must be finite");
    if (inertia.dim != grid.dim) throw invalid_input("bparams: inertia/grid dimension mismatch");
    auto table = std::make_shared<SymbolTable>(build_symbol_table(inertia, grid));
    return BParams{b, std::move(inertia), grid, std::move(table)};
}

// ---------------------------------------------------------------------------
// Flow maps phi = id + f with f periodic; diffeomorphism status is
// min det(I + df) > 0 over the grid.
// ---------------------------------------------------------------------------
inline double min_jacobian_det(const VectorField& displacement) {
    const GridSpec& g = displacement.grid;
    const int n = g.dim;
    const std::vector<ScalarField> df = jacobian(displacement);
    double dmin = std::numeric_limits<double>::infinity();
    const std::size_t m = g.size();
    for (std::size_t i = 0; i < m; ++i) {
        double j[3][3] = {};
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b) j[a][b] = (a == b ? 1.0 : 0.0) + df[a * n + b].values[i];
        double d;
        if (n == 1)
            d = j[0][0];
        else if (n == 2)
            d = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        else
            d = j[0][0] * (j[1][1] * j[2][2] - j[1][2] * j[2][1]) -
                j[0][1] * (j[1][0] * j[2][2] - j[1][2] * j[2][0]) +
                j[0][2] * (j[1][0] * j[2][1] - j[1][1] * j[2][0]);
        dmin = std::min(dmin, d);
    }
    return dmin;
}

struct FlowMap {
    GridSpec grid;
    VectorField displacement;
};

inline FlowMap make_flowmap(VectorField displacement) {
    if (!all_finite(displacement))
        throw blowup_error("nan", "flowmap: non-finite displacement");
    const double dmin = min_jacobian_det(displacement);
    if (!(dmin > 0.0))
        throw blowup_error("jacobian", "flowmap: det(id + df) reaches " + std::to_string(dmin));
    return FlowMap{displacement.grid, std::move(displacement)};
}

inline FlowMap identity_map(const GridSpec& g) { return FlowMap{g, make_vector(g)}; }

// Momentum Omega = A u paired with the velocity that produced it.
struct MomentumField {
    VectorField values;
};

// ---------------------------------------------------------------------------
// RHS building blocks. Every quadratic product is dealiased on the spot; the
// inverse inertia operator is applied last.
// ---------------------------------------------------------------------------
namespace detail {

// component i = dealias( sum_j (d_i u_j) w_j )   — (grad u)^T w
inline VectorField transposed_jacobian_action(const VectorField& u, const VectorField& w) {
    const GridSpec& g = u.grid;
    const int n = g.dim;
    const std::vector<ScalarField> du = jacobian(u);
    VectorField r = make_vector(g);
    for (int i = 0; i < n; ++i) {
        ScalarField acc = make_scalar(g);
        for (int j = 0; j < n; ++j) {
            const ScalarField& dij = du[j * n + i]; // d u_j / d x_i
            for (std::size_t m = 0; m < acc.values.size(); ++m)
                acc.values[m] += dij.values[m] * w.components[j].values[m];
        }
        r.components[i] = dealias_field(acc);
    }
    return r;
}

// component i = dealias( div(u) * w_i )
inline VectorField divergence_action(const VectorField& u, const VectorField& w) {
    const GridSpec& g = u.grid;
    const ScalarField d = divergence(u);
    VectorField r = make_vector(g);
    for (int i = 0; i < g.dim; ++i)
        r.components[i] = dealias_field(pointwise(d, w.components[i]));
    return r;
}

} // namespace detail

// u_t = -A^-1( (u.grad)(Au) + (grad u)^T (Au) + (b-1) div(u) Au )
inline VectorField eulerian_rhs(const VectorField& u, const BParams& p) {
    check_same_grid(u.grid, p.grid, "eulerian_rhs");
    const VectorField au = apply(*p.table, u);
    VectorField sum = advect(u, au) + detail::transposed_jacobian_action(u, au);
    axpy(sum, p.b - 1.0, detail::divergence_action(u, au));
    return -1.0 * apply_inverse(*p.table, sum);
}

// Symmetric connection bilinear form; B(u,u) = -eulerian_rhs(u).
inline VectorField bilinear_B(const VectorField& u, const VectorField& v, const BParams& p) {
    check_same_grid(u.grid, v.grid, "bilinear_B");
    const VectorField au = apply(*p.table, u);
    const VectorField av = apply(*p.table, v);
    VectorField sum = (advect(u, av) + advect(v, au)) +
                      (detail::transposed_jacobian_action(u, av) +
                       detail::transposed_jacobian_action(v, au));
    axpy(sum, p.b - 1.0, detail::divergence_action(u, av) + detail::divergence_action(v, au));
    return 0.5 * apply_inverse(*p.table, sum);
}

// ---------------------------------------------------------------------------
// Flow-map calculus
// ---------------------------------------------------------------------------

// w(phi(x_k)) at every grid node, via periodic interpolation of w.
inline VectorField compose(const VectorField& w, const FlowMap& phi,
                           InterpMode mode = InterpMode::spline) {
    check_same_grid(w.grid, phi.grid, "compose");
    const GridSpec& g = w.grid;
    const VectorInterpolant interp(w, mode);
    VectorField r = make_vector(g);
    for_each_node(g, [&](int i0, int i1, int i2, std::size_t m) {
        std::array<double, 3> y = node_point(g, i0, i1, i2);
        for (int j = 0; j < g.dim; ++j) y[j] += phi.displacement.components[j].values[m];
        const std::array<double, 3> val = interp(y);
        for (int j = 0; j < g.dim; ++j) r.components[j].values[m] = val[j];
    });
    return r;
}

struct InvertOptions {
    double jacobian_margin = 1e-3; // reject inversion below this det floor
    double newton_tol = 1e-10;     // on |phi(psi(x)) - x| per node
    int max_iter = 50;
};

namespace detail {

inline void solve_small(int n, const double j[3][3], const double* r, double* s) {
    if (n == 1) {
        s[0] = r[0] / j[0][0];
    } else if (n == 2) {
        const double d = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        s[0] = (r[0] * j[1][1] - r[1] * j[0][1]) / d;
        s[1] = (j[0][0] * r[1] - j[1][0] * r[0]) / d;
    } else {
        const double d = j[0][0] * (j[1][1] * j[2][2] - j[1][2] * j[2][1]) -
                         j[0][1] * (j[1][0] * j[2][2] - j[1][2] * j[2][0]) +
                         j[0][2] * (j[1][0] * j[2][1] - j[1][1] * j[2][0]);
        const double c00 = j[1][1] * j[2][2] - j[1][2] * j[2][1];
        const double c01 = j[0][2] * j[2][1] - j[0][1] * j[2][2];
        const double c02 = j[0][1] * j[1][2] - j[0][2] * j[1][1];
        const double c10 = j[1][2] * j[2][0] - j[1][0] * j[2][2];
        const double c11 = j[0][0] * j[2][2] - j[0][2] * j[2][0];
        const double c12 = j[0][2] * j[1][0] - j[0][0] * j[1][2];
        const double c20 = j[1][0] * j[2][1] - j[1][1] * j[2][0];
        const double c21 = j[0][1] * j[2][0] - j[0][0] * j[2][1];
        const double c22 = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        s[0] = (c00 * r[0] + c01 * r[1] + c02 * r[2]) / d;
        s[1] = (c10 * r[0] + c11 * r[1] + c12 * r[2]) / d;
        s[2] = (c20 * r[0] + c21 * r[1] + c22 * r[2]) / d;
    }
}

} // namespace detail

// Inverse map psi with phi(psi(x_k)) = x_k (mod period), damped Newton per
// node from the identity guess. The step is clamped in norm to
// max(h/2, |residual|/2): the h/2 floor keeps terminal steps free while the
// residual-scaled cap lets the iteration close large displacements within the
// iteration budget.
inline FlowMap invert_map(const FlowMap& phi, const InvertOptions& opt = {},
                          InterpMode mode = InterpMode::spline) {
    const GridSpec& g = phi.grid;
    const int n = g.dim;
    const double dmin = min_jacobian_det(phi.displacement);
    if (!(dmin >= opt.jacobian_margin))
        throw blowup_error("jacobian", "invert_map: Jacobian determinant " + std::to_string(dmin) +
                                           " below margin " + std::to_string(opt.jacobian_margin));

    const VectorInterpolant f(phi.displacement, mode);
    const std::vector<ScalarField> dfields = jacobian(phi.displacement);
    std::vector<PeriodicInterpolant> df;
    df.reserve(static_cast<std::size_t>(n) * n);
    for (const auto& e : dfields) df.emplace_back(e, mode);

    const double hclamp = 0.5 * g.min_spacing();
    VectorField disp = make_vector(g);

    for_each_node(g, [&](int i0, int i1, int i2, std::size_t m) {
        const std::array<double, 3> x = node_point(g, i0, i1, i2);
        std::array<double, 3> y = x;
        auto residual = [&](const std::array<double, 3>& yy, double* r) {
            const std::array<double, 3> fy = f(yy);
            double nrm = 0.0;
            for (int j = 0; j < n; ++j) {
                r[j] = (yy[j] - x[j]) + fy[j];
                nrm += r[j] * r[j];
            }
            return std::sqrt(nrm);
        };
        double r[3];
        double res = residual(y, r);
        // One extra iteration after crossing the tolerance drives each node to
        // the roundoff floor, which keeps the inversion shift-equivariant to
        // 1e-12 instead of to the stopping tolerance.
        bool polished = false;
        for (int it = 0; it < opt.max_iter; ++it) {
            if (res <= opt.newton_tol) {
                if (polished) break;
                polished = true;
            }
            double jm[3][3] = {};
            for (int a = 0; a < n; ++a)
                for (int b = 0; b < n; ++b)
                    jm[a][b] = (a == b ? 1.0 : 0.0) + df[a * n + b](y);
            double s[3];
            detail::solve_small(n, jm, r, s);
            double snorm = 0.0;
            for (int j = 0; j < n; ++j) snorm += s[j] * s[j];
            snorm = std::sqrt(snorm);
            const double cap = std::max(hclamp, 0.5 * res);
            double sc = snorm > cap ? cap / snorm : 1.0;
            std::array<double, 3> ynew = y;
            double rnew[3], resnew = res;
            for (int bt = 0; bt <= 4; ++bt) {
                for (int j = 0; j < n; ++j) ynew[j] = y[j] - sc * s[j];
                resnew = residual(ynew, rnew);
                if (resnew < res || bt == 4) break;
                sc *= 0.5;
            }
            y = ynew;
            res = resnew;
            for (int j = 0; j < n; ++j) r[j] = rnew[j];
        }
        if (res > opt.newton_tol)
            throw newton_error(m, res,
                               "invert_map: Newton failed at node " + std::to_string(m) +
                                   " (residual " + std::to_string(res) + " after " +
                                   std::to_string(opt.max_iter) + " iterations)");
        for (int j = 0; j < n; ++j) disp.components[j].values[m] = y[j] - x[j];
    });
    return make_flowmap(std::move(disp));
}

// ---------------------------------------------------------------------------
// Geodesic spray
// ---------------------------------------------------------------------------

// S(u) = A^-1( [A, grad_u]u - (grad u)^T (Au) - (b-1) div(u) Au )
inline VectorField spray_S(const VectorField& u, const BParams& p) {
    check_same_grid(u.grid, p.grid, "spray_S");
    const VectorField au = apply(*p.table, u);
    VectorField sum = commutator_term(*p.table, u) -
                      detail::transposed_jacobian_action(u, au);
    axpy(sum, -(p.b - 1.0), detail::divergence_action(u, au));
    return apply_inverse(*p.table, sum);
}

// S_phi(v) = (S(v o phi^-1)) o phi
inline VectorField spray_conjugated(const FlowMap& phi, const VectorField& v, const BParams& p,
                                    InterpMode mode = InterpMode::spline,
                                    const InvertOptions& opt = {}) {
    const FlowMap psi = invert_map(phi, opt, mode);
    const VectorField u = compose(v, psi, mode);
    return compose(spray_S(u, p), phi, mode);
}

// (phi_t, v_t) = (v, S_phi(v))
inline std::pair<VectorField, VectorField> lagrangian_rhs(const FlowMap& phi, const VectorField& v,
                                                          const BParams& p,
                                                          InterpMode mode = InterpMode::spline,
                                                          const InvertOptions& opt = {}) {
    return {v, spray_conjugated(phi, v, p, mode, opt)};
}

} // namespace beq
