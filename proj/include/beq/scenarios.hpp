#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "beq/core.hpp"
#include "beq/grid.hpp"

namespace beq {

// Periodized Gaussian bump amplitude * exp(-|x-center|^2_torus / width^2) on
// component 0 (torus distance per axis).
inline VectorField gaussian_bump(const GridSpec& g, const std::array<double, 3>& center,
                                 double amplitude, double width) {
    if (!std::isfinite(amplitude)) throw invalid_input("gaussian_bump: amplitude not finite");
    double hmax = 0.0;
    for (int j = 0; j < g.dim; ++j) hmax = std::max(hmax, g.spacing(j));
    if (!(width >= 4.0 * hmax))
        throw invalid_input("gaussian_bump: width under-resolved (need width >= 4*max h_j)");
    VectorField u = make_vector(g);
    for_each_node(g, [&](int i0, int i1, int i2, std::size_t m) {
        const std::array<double, 3> x = node_point(g, i0, i1, i2);
        double d2 = 0.0;
        for (int j = 0; j < g.dim; ++j) {
            double d = std::abs(x[j] - center[j]);
            d -= std::floor(d / g.lengths[j]) * g.lengths[j];
            d = std::min(d, g.lengths[j] - d);
            d2 += d * d;
        }
        u.components[0].values[m] = amplitude * std::exp(-d2 / (width * width));
    });
    return u;
}

namespace detail {

// Portable uniform double in [0,1) from a 64-bit generator.
inline double u01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

} // namespace detail

// Deterministic band-limited random field: Hermitian-symmetric coefficients on
// |k_j| <= kmax, rescaled so the nodal sup-norm equals amplitude.
inline VectorField band_limited_random(const GridSpec& g, std::uint64_t seed, int kmax,
                                       double amplitude) {
    for (int j = 0; j < g.dim; ++j)
        if (!(kmax < g.points[j] / 3))
            throw invalid_input("band_limited_random: kmax must satisfy kmax < N_j/3");
    if (kmax < 1) throw invalid_input("band_limited_random: kmax must be >= 1");

    VectorField u = make_vector(g);
    for (int c = 0; c < g.dim; ++c) {
        std::mt19937_64 rng(seed * 0x9e3779b97f4a7c15ULL + static_cast<std::uint64_t>(c) + 1);
        SpectralField F{g, std::vector<std::complex<double>>(g.size())};
        // iterate signed modes lexicographically; draw once per conjugate pair
        std::array<int, 3> k{0, 0, 0};
        auto visit = [&](auto&& self, int axis) -> void {
            if (axis == g.dim) {
                bool canonical = false, zero = true;
                for (int j = 0; j < g.dim; ++j) {
                    if (k[j] != 0) {
                        canonical = k[j] > 0;
                        zero = false;
                        break;
                    }
                }
                std::array<int, 3> idx{0, 0, 0}, cidx{0, 0, 0};
                for (int j = 0; j < g.dim; ++j) {
                    idx[j] = (k[j] + g.points[j]) % g.points[j];
                    cidx[j] = (g.points[j] - idx[j]) % g.points[j];
                }
                const std::size_t m = flat_index(g, idx[0], idx[1], idx[2]);
                const std::size_t mc = flat_index(g, cidx[0], cidx[1], cidx[2]);
                if (zero) {
                    F.coefficients[m] = 2.0 * detail::u01(rng) - 1.0;
                } else if (canonical) {
                    const std::complex<double> z(2.0 * detail::u01(rng) - 1.0,
                                                 2.0 * detail::u01(rng) - 1.0);
                    F.coefficients[m] = z;
                    F.coefficients[mc] = std::conj(z);
                }
                return;
            }
            for (k[axis] = -kmax; k[axis] <= kmax; ++k[axis]) self(self, axis + 1);
        };
        visit(visit, 0);
        u.components[c] = inverse_transform(F);
    }
    const double sup = sup_norm(u);
    if (!(sup > 0.0)) throw invalid_input("band_limited_random: degenerate draw");
    return (amplitude / sup) * u;
}

// Periodic peakon profile travelling at speed c; peak value c at x = ct.
// Deliberately not band-limited (cosh cusp); mollify before driving a run.
inline VectorField periodic_peakon(const GridSpec& g, double c, double t) {
    if (g.dim != 1) throw invalid_input("periodic_peakon: 1D only");
    if (c == 0.0) throw invalid_input("periodic_peakon: c must be nonzero");
    const double L = g.lengths[0];
    VectorField u = make_vector(g);
    for (std::size_t m = 0; m < g.size(); ++m) {
        const double x = static_cast<double>(m) * g.spacing(0);
        double d = x - c * t;
        d -= std::floor(d / L) * L; // into [0, L)
        u.components[0].values[m] = c * std::cosh(d - L / 2.0) / std::cosh(L / 2.0);
    }
    return u;
}

// Gaussian low-pass in frequency space: coefficient at integer mode k is
// damped by exp(-|k|^2 / (2 sigma_k^2)).
inline VectorField mollify(const VectorField& u, double sigma_k) {
    if (!(sigma_k > 0.0)) throw invalid_input("mollify: sigma_k must be positive");
    const GridSpec& g = u.grid;
    const AxisFreq f0 = freq_table(g, 0), f1 = freq_table(g, 1), f2 = freq_table(g, 2);
    VectorField r = make_vector(g);
    for (int c = 0; c < g.dim; ++c) {
        SpectralField F = forward_transform(u.components[c]);
        for_each_node(g, [&](int i0, int i1, int i2, std::size_t m) {
            const double k2 = double(f0.k[i0]) * f0.k[i0] + double(f1.k[i1]) * f1.k[i1] +
                              double(f2.k[i2]) * f2.k[i2];
            F.coefficients[m] *= std::exp(-k2 / (2.0 * sigma_k * sigma_k));
        });
        r.components[c] = inverse_transform(F);
    }
    return r;
}

// |eulerian_rhs(profile) + c * d_x profile|_L2 — zero for exact 1D traveling
// waves u(x - ct).
inline double traveling_wave_residual(const VectorField& profile, double c, const BParams& p) {
    if (profile.grid.dim != 1) throw invalid_input("traveling_wave_residual: 1D only");
    VectorField r = eulerian_rhs(profile, p);
    const ScalarField dx = partial_derivative(profile.components[0], 0);
    for (std::size_t m = 0; m < r.components[0].values.size(); ++m)
        r.components[0].values[m] += c * dx.values[m];
    return l2_norm(r);
}

} // namespace beq
