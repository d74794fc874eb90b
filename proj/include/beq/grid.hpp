#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <string>
#include <vector>

#include "beq/detail/fft.hpp"
#include "beq/errors.hpp"

namespace beq {

// ---------------------------------------------------------------------------
// Periodic sampling grid on the torus [0,L_0) x ... x [0,L_{n-1}).
// Sample points x_j(k) = k * h_j with h_j = L_j / N_j, row-major storage,
// axis 0 slowest.
// ---------------------------------------------------------------------------
struct GridSpec {
    int dim = 0;
    std::array<int, 3> points{1, 1, 1};
    std::array<double, 3> lengths{1.0, 1.0, 1.0};

    int extent(int axis) const { return axis < dim ? points[axis] : 1; }
    double spacing(int axis) const { return lengths[axis] / points[axis]; }
    std::size_t size() const {
        std::size_t m = 1;
        for (int j = 0; j < dim; ++j) m *= static_cast<std::size_t>(points[j]);
        return m;
    }
    double volume() const {
        double v = 1.0;
        for (int j = 0; j < dim; ++j) v *= lengths[j];
        return v;
    }
    double cell_volume() const { return volume() / static_cast<double>(size()); }
    double min_spacing() const {
        double h = spacing(0);
        for (int j = 1; j < dim; ++j) h = std::min(h, spacing(j));
        return h;
    }

    bool operator==(const GridSpec&) const = default;
};

inline GridSpec make_grid(int dim, std::array<int, 3> points, std::array<double, 3> lengths) {
    if (dim < 1 || dim > 3) throw invalid_input("grid: dim must be 1, 2 or 3");
    GridSpec g;
    g.dim = dim;
    for (int j = 0; j < dim; ++j) {
        if (points[j] < 8 || points[j] % 2 != 0)
            throw invalid_input("grid: points per axis must be even and >= 8");
        if (!(lengths[j] > 0.0) || !std::isfinite(lengths[j]))
            throw invalid_input("grid: lengths must be positive and finite");
        g.points[j] = points[j];
        g.lengths[j] = lengths[j];
    }
    return g;
}

inline GridSpec make_grid_1d(int n, double length) { return make_grid(1, {n, 1, 1}, {length, 1, 1}); }

// Signed wavenumber of FFT bin t on an axis with N samples: k in [-N/2, N/2).
inline int signed_mode(int t, int n) { return t < n / 2 ? t : t - n; }

// Per-axis tables of signed wavenumbers and continuous frequencies xi = 2*pi*k/L.
struct AxisFreq {
    std::vector<int> k;
    std::vector<double> xi;
};

inline AxisFreq freq_table(const GridSpec& g, int axis) {
    const int n = g.extent(axis);
    AxisFreq f;
    f.k.resize(n);
    f.xi.resize(n);
    const double fac = 2.0 * std::numbers::pi / g.lengths[axis];
    for (int t = 0; t < n; ++t) {
        f.k[t] = signed_mode(t, n);
        f.xi[t] = axis < g.dim ? fac * f.k[t] : 0.0;
    }
    return f;
}

// Continuous frequency vector for a signed integer mode tuple.
inline std::array<double, 3> wavevector(const GridSpec& g, const std::array<int, 3>& k) {
    std::array<double, 3> xi{0.0, 0.0, 0.0};
    for (int j = 0; j < g.dim; ++j) {
        const int n = g.points[j];
        if (k[j] < -n / 2 || k[j] >= n / 2)
            throw invalid_input("wavevector: mode index out of range on axis " + std::to_string(j));
        xi[j] = 2.0 * std::numbers::pi * k[j] / g.lengths[j];
    }
    return xi;
}

// ---------------------------------------------------------------------------
// Fields
// ---------------------------------------------------------------------------
struct ScalarField {
    GridSpec grid;
    std::vector<double> values;
};

struct VectorField {
    GridSpec grid;
    std::vector<ScalarField> components;
};

// Complex Fourier coefficients, same row-major layout as the sample grid;
// bin t along an axis carries signed mode signed_mode(t, N).
struct SpectralField {
    GridSpec grid;
    std::vector<std::complex<double>> coefficients;
};

inline ScalarField make_scalar(const GridSpec& g, double fill = 0.0) {
    return ScalarField{g, std::vector<double>(g.size(), fill)};
}

inline VectorField make_vector(const GridSpec& g) {
    VectorField u{g, {}};
    u.components.reserve(g.dim);
    for (int i = 0; i < g.dim; ++i) u.components.push_back(make_scalar(g));
    return u;
}

inline std::size_t flat_index(const GridSpec& g, int i0, int i1 = 0, int i2 = 0) {
    return (static_cast<std::size_t>(i0) * g.extent(1) + i1) * g.extent(2) + i2;
}

// Invoke fn(i0, i1, i2, flat) over the whole grid in storage order.
template <class Fn>
inline void for_each_node(const GridSpec& g, Fn&& fn) {
    const int n0 = g.extent(0), n1 = g.extent(1), n2 = g.extent(2);
    std::size_t m = 0;
    for (int i0 = 0; i0 < n0; ++i0)
        for (int i1 = 0; i1 < n1; ++i1)
            for (int i2 = 0; i2 < n2; ++i2) fn(i0, i1, i2, m++);
}

// Physical coordinate of a node.
inline std::array<double, 3> node_point(const GridSpec& g, int i0, int i1 = 0, int i2 = 0) {
    std::array<double, 3> x{0.0, 0.0, 0.0};
    const int idx[3] = {i0, i1, i2};
    for (int j = 0; j < g.dim; ++j) x[j] = idx[j] * g.spacing(j);
    return x;
}

// ---------------------------------------------------------------------------
// Small field arithmetic
// ---------------------------------------------------------------------------
inline void check_same_grid(const GridSpec& a, const GridSpec& b, const char* who) {
    if (!(a == b)) throw invalid_input(std::string(who) + ": fields live on different grids");
}

inline ScalarField operator+(const ScalarField& a, const ScalarField& b) {
    check_same_grid(a.grid, b.grid, "operator+");
    ScalarField r = a;
    for (std::size_t m = 0; m < r.values.size(); ++m) r.values[m] += b.values[m];
    return r;
}

inline ScalarField operator-(const ScalarField& a, const ScalarField& b) {
    check_same_grid(a.grid, b.grid, "operator-");
    ScalarField r = a;
    for (std::size_t m = 0; m < r.values.size(); ++m) r.values[m] -= b.values[m];
    return r;
}

inline ScalarField operator*(double c, const ScalarField& a) {
    ScalarField r = a;
    for (double& v : r.values) v *= c;
    return r;
}

// Pointwise product of nodal samples.
inline ScalarField pointwise(const ScalarField& a, const ScalarField& b) {
    check_same_grid(a.grid, b.grid, "pointwise");
    ScalarField r = a;
    for (std::size_t m = 0; m < r.values.size(); ++m) r.values[m] *= b.values[m];
    return r;
}

inline VectorField operator+(const VectorField& a, const VectorField& b) {
    check_same_grid(a.grid, b.grid, "operator+");
    VectorField r = a;
    for (int i = 0; i < r.grid.dim; ++i) r.components[i] = r.components[i] + b.components[i];
    return r;
}

inline VectorField operator-(const VectorField& a, const VectorField& b) {
    check_same_grid(a.grid, b.grid, "operator-");
    VectorField r = a;
    for (int i = 0; i < r.grid.dim; ++i) r.components[i] = r.components[i] - b.components[i];
    return r;
}

inline VectorField operator*(double c, const VectorField& a) {
    VectorField r = a;
    for (auto& comp : r.components) comp = c * comp;
    return r;
}

inline void axpy(VectorField& y, double a, const VectorField& x) {
    check_same_grid(y.grid, x.grid, "axpy");
    for (int i = 0; i < y.grid.dim; ++i)
        for (std::size_t m = 0; m < y.components[i].values.size(); ++m)
            y.components[i].values[m] += a * x.components[i].values[m];
}

inline bool all_finite(const ScalarField& f) {
    for (double v : f.values)
        if (!std::isfinite(v)) return false;
    return true;
}

inline bool all_finite(const VectorField& u) {
    for (const auto& c : u.components)
        if (!all_finite(c)) return false;
    return true;
}

inline double sup_abs(const ScalarField& f) {
    double s = 0.0;
    for (double v : f.values) s = std::max(s, std::abs(v));
    return s;
}

// sup over nodes of the Euclidean magnitude |u(x)|.
inline double sup_norm(const VectorField& u) {
    const std::size_t m = u.grid.size();
    double s = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        double q = 0.0;
        for (int c = 0; c < u.grid.dim; ++c) q += u.components[c].values[i] * u.components[c].values[i];
        s = std::max(s, q);
    }
    return std::sqrt(s);
}

inline double l2_norm(const ScalarField& f) {
    double s = 0.0;
    for (double v : f.values) s += v * v;
    return std::sqrt(s * f.grid.cell_volume());
}

inline double l2_norm(const VectorField& u) {
    double s = 0.0;
    for (const auto& c : u.components)
        for (double v : c.values) s += v * v;
    return std::sqrt(s * u.grid.cell_volume());
}

// ---------------------------------------------------------------------------
// Transforms (unitary normalization: 1/sqrt(prod N_j) each direction, so the
// discrete Parseval identity carries the plain cell-volume weight).
// ---------------------------------------------------------------------------
inline constexpr double hermitian_rel_tol = 1e-12;

inline SpectralField forward_transform(const ScalarField& f) {
    const GridSpec& g = f.grid;
    const std::size_t m = g.size();
    std::vector<std::complex<double>> in(m);
    for (std::size_t i = 0; i < m; ++i) in[i] = f.values[i];
    SpectralField out{g, std::vector<std::complex<double>>(m)};
    detail::fft_engine::instance().transform(g.dim, g.points, FFTW_FORWARD, in.data(),
                                             out.coefficients.data());
    const double scale = 1.0 / std::sqrt(static_cast<double>(m));
    for (auto& c : out.coefficients) c *= scale;
    return out;
}

// Largest deviation from F(-k) = conj(F(k)) and the coefficient sup-norm.
inline std::pair<double, double> hermitian_violation(const SpectralField& F) {
    const GridSpec& g = F.grid;
    const int n0 = g.extent(0), n1 = g.extent(1), n2 = g.extent(2);
    double viol2 = 0.0, amax2 = 0.0;
    for_each_node(g, [&](int i0, int i1, int i2, std::size_t m) {
        const std::size_t mc =
            flat_index(g, (n0 - i0) % n0, (n1 - i1) % n1, (n2 - i2) % n2);
        amax2 = std::max(amax2, std::norm(F.coefficients[m]));
        viol2 = std::max(viol2,
                         std::norm(F.coefficients[m] - std::conj(F.coefficients[mc])));
    });
    return {std::sqrt(viol2), std::sqrt(amax2)};
}

inline ScalarField inverse_transform(const SpectralField& F) {
    auto [viol, amax] = hermitian_violation(F);
    if (!std::isfinite(amax) || !std::isfinite(viol))
        throw blowup_error("nan", "inverse_transform: non-finite coefficients");
    if (!(viol <= hermitian_rel_tol * std::max(amax, 1e-300)))
        throw invalid_input("inverse_transform: coefficients violate Hermitian symmetry (" +
                            std::to_string(viol) + " vs scale " + std::to_string(amax) + ")");
    const GridSpec& g = F.grid;
    const std::size_t m = g.size();
    std::vector<std::complex<double>> out(m);
    detail::fft_engine::instance().transform(g.dim, g.points, FFTW_BACKWARD,
                                             F.coefficients.data(), out.data());
    ScalarField f = make_scalar(g);
    const double scale = 1.0 / std::sqrt(static_cast<double>(m));
    for (std::size_t i = 0; i < m; ++i) f.values[i] = out[i].real() * scale;
    return f;
}

// ---------------------------------------------------------------------------
// Spectral calculus
// ---------------------------------------------------------------------------

// Multiply mode k by i*xi_axis; the unpaired Nyquist mode is zeroed to keep
// derivatives of real fields real.
inline SpectralField derivative_spectral(const SpectralField& F, int axis) {
    const GridSpec& g = F.grid;
    if (axis < 0 || axis >= g.dim) throw invalid_input("derivative: axis out of range");
    SpectralField r = F;
    const AxisFreq fr = freq_table(g, axis);
    const int nyq = -g.points[axis] / 2;
    for_each_node(g, [&](int i0, int i1, int i2, std::size_t m) {
        const int t = axis == 0 ? i0 : (axis == 1 ? i1 : i2);
        if (fr.k[t] == nyq) {
            r.coefficients[m] = 0.0;
        } else {
            r.coefficients[m] *= std::complex<double>(0.0, fr.xi[t]);
        }
    });
    return r;
}

inline ScalarField partial_derivative(const ScalarField& f, int axis) {
    return inverse_transform(derivative_spectral(forward_transform(f), axis));
}

// Entries (i,j) = d u_i / d x_j, row-major in a flat vector of n*n fields.
inline std::vector<ScalarField> jacobian(const VectorField& u) {
    const int n = u.grid.dim;
    std::vector<ScalarField> jac;
    jac.reserve(static_cast<std::size_t>(n) * n);
    for (int i = 0; i < n; ++i) {
        SpectralField ui = forward_transform(u.components[i]);
        for (int j = 0; j < n; ++j) jac.push_back(inverse_transform(derivative_spectral(ui, j)));
    }
    return jac;
}

inline ScalarField divergence(const VectorField& u) {
    const int n = u.grid.dim;
    ScalarField d = partial_derivative(u.components[0], 0);
    for (int i = 1; i < n; ++i) {
        const ScalarField di = partial_derivative(u.components[i], i);
        for (std::size_t m = 0; m < d.values.size(); ++m) d.values[m] += di.values[m];
    }
    return d;
}

// Two-thirds rule: zero every mode with 3*|k_j| > N_j on any axis.
inline bool dealias_keeps(const GridSpec& g, int i0, int i1, int i2) {
    const int idx[3] = {i0, i1, i2};
    for (int j = 0; j < g.dim; ++j) {
        const int k = signed_mode(idx[j], g.points[j]);
        if (3 * std::abs(k) > g.points[j]) return false;
    }
    return true;
}

// Project onto the Hermitian-symmetric part: F(k) <- (F(k) + conj(F(-k)))/2.
// Exact (bitwise) on already-symmetric data; removes roundoff asymmetry that
// high-order symbols would otherwise amplify past the type invariant.
inline void hermitian_symmetrize(SpectralField& F) {
    const GridSpec& g = F.grid;
    const int n0 = g.extent(0), n1 = g.extent(1), n2 = g.extent(2);
    for_each_node(g, [&](int i0, int i1, int i2, std::size_t m) {
        const std::size_t mc = flat_index(g, (n0 - i0) % n0, (n1 - i1) % n1, (n2 - i2) % n2);
        if (mc < m) return;
        if (mc == m) {
            F.coefficients[m] = F.coefficients[m].real();
            return;
        }
        const std::complex<double> avg =
            0.5 * (F.coefficients[m] + std::conj(F.coefficients[mc]));
        F.coefficients[m] = avg;
        F.coefficients[mc] = std::conj(avg);
    });
}

inline SpectralField dealias(const SpectralField& F) {
    SpectralField r = F;
    for_each_node(r.grid, [&](int i0, int i1, int i2, std::size_t m) {
        if (!dealias_keeps(r.grid, i0, i1, i2)) r.coefficients[m] = 0.0;
    });
    return r;
}

// Physical-space convenience used after every quadratic product in RHS code.
inline ScalarField dealias_field(const ScalarField& f) {
    return inverse_transform(dealias(forward_transform(f)));
}

} // namespace beq
