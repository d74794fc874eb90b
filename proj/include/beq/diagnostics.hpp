#pragma once

#include <array>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "beq/core.hpp"

namespace beq {

struct DiagnosticSeries {
    std::string name;
    std::vector<double> times;
    std::vector<double> values;
};

// Spectral Sobolev norm: sqrt( sum_k (1+|xi_k|^2)^s |u_hat(k)|^2 ) with
// Parseval-consistent weights, summed over components.
inline double sobolev_norm(const VectorField& f, double s) {
    if (s < 0.0) throw invalid_input("sobolev_norm: s must be >= 0");
    const GridSpec& g = f.grid;
    const AxisFreq f0 = freq_table(g, 0), f1 = freq_table(g, 1), f2 = freq_table(g, 2);
    double acc = 0.0;
    for (const auto& comp : f.components) {
        const SpectralField F = forward_transform(comp);
        for_each_node(g, [&](int i0, int i1, int i2, std::size_t m) {
            const double x0 = f0.xi[i0], x1 = f1.xi[i1], x2 = f2.xi[i2];
            const double w = 1.0 + x0 * x0 + x1 * x1 + x2 * x2;
            acc += std::pow(w, s) * std::norm(F.coefficients[m]);
        });
    }
    return std::sqrt(acc * g.cell_volume());
}

inline MomentumField momentum(const VectorField& u, const BParams& p) {
    return MomentumField{apply(*p.table, u)};
}

// <u, Au> by trapezoid quadrature (exact on the periodic grid).
inline double energy(const VectorField& u, const BParams& p) {
    const VectorField au = apply(*p.table, u);
    double acc = 0.0;
    for (int c = 0; c < u.grid.dim; ++c)
        for (std::size_t m = 0; m < au.components[c].values.size(); ++m)
            acc += au.components[c].values[m] * u.components[c].values[m];
    return acc * u.grid.cell_volume();
}

// Componentwise torus integral of Omega = Au.
inline std::array<double, 3> mean_momentum(const VectorField& u, const BParams& p) {
    const VectorField om = momentum(u, p).values;
    std::array<double, 3> mm{0.0, 0.0, 0.0};
    for (int c = 0; c < u.grid.dim; ++c) {
        double acc = 0.0;
        for (double v : om.components[c].values) acc += v;
        mm[c] = acc * u.grid.cell_volume();
    }
    return mm;
}

inline double jacobian_min(const FlowMap& phi) { return min_jacobian_det(phi.displacement); }

namespace detail {

inline std::string order_label(double s) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", s);
    return buf;
}

} // namespace detail

// Sobolev norm traces at the requested orders over velocity snapshots, plus
// the ratio series |u|_{s+1}/|u|_s for each order.
template <class StateRange, class VelocityFn>
inline std::vector<DiagnosticSeries> regularity_trace_impl(const StateRange& states,
                                                           VelocityFn&& velocity,
                                                           const std::vector<double>& orders) {
    std::vector<DiagnosticSeries> out;
    for (double s : orders) {
        DiagnosticSeries norm{"sobolev_s" + detail::order_label(s), {}, {}};
        DiagnosticSeries ratio{"ratio_s" + detail::order_label(s + 1.0) + "_s" +
                                   detail::order_label(s),
                               {},
                               {}};
        for (const auto& st : states) {
            const VectorField u = velocity(st);
            const double ns = sobolev_norm(u, s);
            const double ns1 = sobolev_norm(u, s + 1.0);
            norm.times.push_back(st.time);
            norm.values.push_back(ns);
            ratio.times.push_back(st.time);
            ratio.values.push_back(ns1 / std::max(ns, 1e-300));
        }
        out.push_back(std::move(norm));
        out.push_back(std::move(ratio));
    }
    return out;
}

} // namespace beq
