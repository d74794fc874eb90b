#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <vector>

#include "beq/grid.hpp"

namespace beq {

enum class InterpMode {
    spline, // periodic tensor-product cubic B-spline, O(h^4)
    trig    // direct mode summation, exact for band-limited fields, O(N) per point
};

// Interpolates one periodic scalar field at arbitrary points.
class PeriodicInterpolant {
public:
    PeriodicInterpolant(const ScalarField& f, InterpMode mode) : grid_(f.grid), mode_(mode) {
        if (mode_ == InterpMode::spline) {
            SpectralField F = forward_transform(f);
            const AxisFreq f0 = freq_table(grid_, 0);
            const AxisFreq f1 = freq_table(grid_, 1);
            const AxisFreq f2 = freq_table(grid_, 2);
            auto bfac = [](int k, int n) {
                return (4.0 + 2.0 * std::cos(2.0 * std::numbers::pi * k / n)) / 6.0;
            };
            std::array<std::vector<double>, 3> b;
            for (int j = 0; j < 3; ++j) {
                const int n = grid_.extent(j);
                b[j].resize(n, 1.0);
                if (j < grid_.dim) {
                    const AxisFreq& fr = j == 0 ? f0 : (j == 1 ? f1 : f2);
                    for (int t = 0; t < n; ++t) b[j][t] = bfac(fr.k[t], grid_.points[j]);
                }
            }
            for_each_node(grid_, [&](int i0, int i1, int i2, std::size_t m) {
                F.coefficients[m] /= b[0][i0] * b[1][i1] * b[2][i2];
            });
            ScalarField c = inverse_transform(F);
            spline_coef_ = std::move(c.values);
        } else {
            trig_coef_ = forward_transform(f).coefficients;
            for (int j = 0; j < grid_.dim; ++j) xi_[j] = freq_table(grid_, j).xi;
        }
    }

    double operator()(const std::array<double, 3>& x) const {
        return mode_ == InterpMode::spline ? eval_spline(x) : eval_trig(x);
    }

    const GridSpec& grid() const { return grid_; }

private:
    double eval_spline(const std::array<double, 3>& x) const {
        int idx[3][4];
        double wgt[3][4];
        for (int j = 0; j < 3; ++j) {
            const int n = grid_.extent(j);
            if (j >= grid_.dim) {
                for (int t = 0; t < 4; ++t) {
                    idx[j][t] = 0;
                    wgt[j][t] = t == 1 ? 1.0 : 0.0;
                }
                continue;
            }
            double t = x[j] / grid_.spacing(j);
            t -= std::floor(t / n) * n; // into [0, n)
            int i0 = static_cast<int>(std::floor(t));
            if (i0 >= n) i0 -= n;
            const double s = t - i0;
            const double s2 = s * s, s3 = s2 * s;
            wgt[j][0] = (1.0 - 3.0 * s + 3.0 * s2 - s3) / 6.0; // node i0-1
            wgt[j][1] = (4.0 - 6.0 * s2 + 3.0 * s3) / 6.0;     // node i0
            wgt[j][2] = (1.0 + 3.0 * s + 3.0 * s2 - 3.0 * s3) / 6.0;
            wgt[j][3] = s3 / 6.0;
            for (int t4 = 0; t4 < 4; ++t4) idx[j][t4] = (i0 + t4 - 1 + n) % n;
        }
        double out = 0.0;
        for (int a = 0; a < 4; ++a) {
            for (int b = 0; b < 4; ++b) {
                const double wab = wgt[0][a] * wgt[1][b];
                if (wab == 0.0) continue;
                for (int c = 0; c < 4; ++c) {
                    const double w = wab * wgt[2][c];
                    if (w == 0.0) continue;
                    out += w * spline_coef_[flat_index(grid_, idx[0][a], idx[1][b], idx[2][c])];
                }
            }
        }
        return out;
    }

    double eval_trig(const std::array<double, 3>& x) const {
        std::array<std::vector<std::complex<double>>, 3> ph;
        for (int j = 0; j < 3; ++j) {
            const int n = grid_.extent(j);
            ph[j].assign(n, 1.0);
            if (j < grid_.dim)
                for (int t = 0; t < n; ++t)
                    ph[j][t] = std::polar(1.0, xi_[j][t] * x[j]);
        }
        std::complex<double> acc = 0.0;
        for_each_node(grid_, [&](int i0, int i1, int i2, std::size_t m) {
            acc += trig_coef_[m] * ph[0][i0] * ph[1][i1] * ph[2][i2];
        });
        return acc.real() / std::sqrt(static_cast<double>(grid_.size()));
    }

    GridSpec grid_;
    InterpMode mode_;
    std::vector<double> spline_coef_;
    std::vector<std::complex<double>> trig_coef_;
    std::array<std::vector<double>, 3> xi_;
};

// Interpolant for each component of a vector field.
class VectorInterpolant {
public:
    VectorInterpolant(const VectorField& u, InterpMode mode) {
        comps_.reserve(u.grid.dim);
        for (const auto& c : u.components) comps_.emplace_back(c, mode);
    }
    std::array<double, 3> operator()(const std::array<double, 3>& x) const {
        std::array<double, 3> v{0.0, 0.0, 0.0};
        for (std::size_t i = 0; i < comps_.size(); ++i) v[i] = comps_[i](x);
        return v;
    }
    std::size_t size() const { return comps_.size(); }
    const PeriodicInterpolant& component(std::size_t i) const { return comps_[i]; }

private:
    std::vector<PeriodicInterpolant> comps_;
};

} // namespace beq
