#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "beq/detail/smallmat.hpp"
#include "beq/grid.hpp"

namespace beq {

// ---------------------------------------------------------------------------
// Fourier multiplier A = op(a(xi)): the symbol a maps a frequency vector to a
// complex dim x dim matrix acting on the transformed field per mode.
// ---------------------------------------------------------------------------
struct MultiplierSymbol {
    int dim = 1;
    double order = 0.0;
    bool scalar = true; // a(xi) is a scalar multiple of the identity
    std::string name;
    std::function<detail::cmat(const std::array<double, 3>&)> evaluate;
};

inline double abs2(const std::array<double, 3>& xi) {
    return xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2];
}

// Sobolev inertia operator op((1+|xi|^2)^s), order 2s.
inline MultiplierSymbol builtin_sobolev(int dim, double s) {
    if (s < 0.0) throw invalid_input("builtin_sobolev: s must be >= 0");
    if (dim < 1 || dim > 3) throw invalid_input("builtin_sobolev: dim must be 1..3");
    MultiplierSymbol a;
    a.dim = dim;
    a.order = 2.0 * s;
    a.scalar = true;
    a.name = "sobolev(s=" + std::to_string(s) + ")";
    a.evaluate = [dim, s](const std::array<double, 3>& xi) {
        return detail::cmat::scalar(dim, std::pow(1.0 + abs2(xi), s));
    };
    return a;
}

// Hilbert transform symbol -i*sgn(xi), 1D only; sgn(0) = 0.
inline MultiplierSymbol builtin_hilbert() {
    MultiplierSymbol a;
    a.dim = 1;
    a.order = 0.0;
    a.scalar = true;
    a.name = "hilbert";
    a.evaluate = [](const std::array<double, 3>& xi) {
        const double sgn = xi[0] > 0.0 ? 1.0 : (xi[0] < 0.0 ? -1.0 : 0.0);
        return detail::cmat::scalar(1, std::complex<double>(0.0, -sgn));
    };
    return a;
}

// One term c * (i xi)^alpha of a constant-coefficient differential operator.
struct PolyTerm {
    double coeff = 0.0;
    std::array<int, 3> alpha{0, 0, 0};
};

inline MultiplierSymbol builtin_diff_poly(int dim, const std::vector<PolyTerm>& terms) {
    if (terms.empty()) throw invalid_input("builtin_diff_poly: empty coefficient set");
    if (dim < 1 || dim > 3) throw invalid_input("builtin_diff_poly: dim must be 1..3");
    int order = 0;
    for (const auto& t : terms) {
        int total = 0;
        for (int j = 0; j < 3; ++j) {
            if (t.alpha[j] < 0) throw invalid_input("builtin_diff_poly: negative exponent");
            if (j >= dim && t.alpha[j] != 0)
                throw invalid_input("builtin_diff_poly: exponent on axis beyond dim");
            total += t.alpha[j];
        }
        order = std::max(order, total);
    }
    MultiplierSymbol a;
    a.dim = dim;
    a.order = order;
    a.scalar = true;
    a.name = "diff_poly";
    a.evaluate = [dim, terms](const std::array<double, 3>& xi) {
        std::complex<double> s = 0.0;
        for (const auto& t : terms) {
            std::complex<double> p = t.coeff;
            for (int j = 0; j < 3; ++j)
                for (int e = 0; e < t.alpha[j]; ++e) p *= std::complex<double>(0.0, xi[j]);
            s += p;
        }
        return detail::cmat::scalar(dim, s);
    };
    return a;
}

// ---------------------------------------------------------------------------
// Application on grids
// ---------------------------------------------------------------------------
namespace detail {

template <class Fn>
inline void per_mode(const GridSpec& g, Fn&& fn) {
    const AxisFreq f0 = freq_table(g, 0), f1 = freq_table(g, 1), f2 = freq_table(g, 2);
    for_each_node(g, [&](int i0, int i1, int i2, std::size_t m) {
        fn(std::array<double, 3>{f0.xi[i0], f1.xi[i1], f2.xi[i2]}, m);
    });
}

inline std::vector<SpectralField> forward_components(const VectorField& u) {
    std::vector<SpectralField> F;
    F.reserve(u.grid.dim);
    for (const auto& c : u.components) F.push_back(forward_transform(c));
    return F;
}

inline VectorField inverse_components(const GridSpec& g, std::vector<SpectralField>& F) {
    VectorField u{g, {}};
    u.components.reserve(g.dim);
    for (auto& c : F) u.components.push_back(inverse_transform(c));
    return u;
}

} // namespace detail

inline VectorField apply(const MultiplierSymbol& a, const VectorField& u) {
    if (a.dim != u.grid.dim) throw invalid_input("apply: symbol/field dimension mismatch");
    const GridSpec& g = u.grid;
    std::vector<SpectralField> F = detail::forward_components(u);
    detail::per_mode(g, [&](const std::array<double, 3>& xi, std::size_t m) {
        const detail::cmat mat = a.evaluate(xi);
        std::complex<double> in[3], out[3];
        for (int c = 0; c < g.dim; ++c) in[c] = F[c].coefficients[m];
        detail::matvec(mat, in, out);
        for (int c = 0; c < g.dim; ++c) F[c].coefficients[m] = out[c];
    });
    for (auto& c : F) {
        for (const auto& z : c.coefficients)
            if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
                throw blowup_error("nan", "apply: non-finite result for symbol " + a.name);
        // high-order symbols amplify roundoff asymmetry by up to a(xi_max)
        hermitian_symmetrize(c);
    }
    return detail::inverse_components(g, F);
}

inline constexpr double default_symbol_cond_cap = 1e12;

// Checks a(xi_k) is invertible at every grid mode and that the spread
// max|a| * max|a^-1| stays below the condition cap.
inline void check_invertible_on_grid(const MultiplierSymbol& a, const GridSpec& g,
                                     double cond_cap = default_symbol_cond_cap) {
    double max_a = 0.0, max_ainv = 0.0;
    std::array<double, 3> worst{0, 0, 0};
    detail::per_mode(g, [&](const std::array<double, 3>& xi, std::size_t) {
        const detail::cmat mat = a.evaluate(xi);
        detail::cmat inv;
        if (!detail::invert(mat, inv))
            throw singular_symbol_error("symbol " + a.name + " is singular at xi = (" +
                                            std::to_string(xi[0]) + ", " + std::to_string(xi[1]) +
                                            ", " + std::to_string(xi[2]) + ")",
                                        xi[0], xi[1], xi[2]);
        max_a = std::max(max_a, detail::frobenius(mat));
        const double fi = detail::frobenius(inv);
        if (fi > max_ainv) {
            max_ainv = fi;
            worst = xi;
        }
    });
    if (max_a * max_ainv > cond_cap)
        throw singular_symbol_error("symbol " + a.name + " too ill-conditioned on grid (cond ~ " +
                                        std::to_string(max_a * max_ainv) + "), worst mode xi = (" +
                                        std::to_string(worst[0]) + ", ...)",
                                    worst[0], worst[1], worst[2]);
}

inline VectorField apply_inverse(const MultiplierSymbol& a, const VectorField& w,
                                 double cond_cap = default_symbol_cond_cap) {
    if (a.dim != w.grid.dim) throw invalid_input("apply_inverse: symbol/field dimension mismatch");
    check_invertible_on_grid(a, w.grid, cond_cap);
    const GridSpec& g = w.grid;
    std::vector<SpectralField> F = detail::forward_components(w);
    detail::per_mode(g, [&](const std::array<double, 3>& xi, std::size_t m) {
        const detail::cmat mat = a.evaluate(xi);
        detail::cmat inv;
        detail::invert(mat, inv); // cannot fail: checked above
        std::complex<double> in[3], out[3];
        for (int c = 0; c < g.dim; ++c) in[c] = F[c].coefficients[m];
        detail::matvec(inv, in, out);
        for (int c = 0; c < g.dim; ++c) F[c].coefficients[m] = out[c];
    });
    return detail::inverse_components(g, F);
}

// Per-grid table of symbol values (and inverses) at every mode, so RHS code
// does not re-evaluate the symbol per call. Values are the same a.evaluate
// results the direct operations use.
struct SymbolTable {
    GridSpec grid;
    std::vector<detail::cmat> fwd;
    std::vector<detail::cmat> inv;
};

inline SymbolTable build_symbol_table(const MultiplierSymbol& a, const GridSpec& g,
                                      double cond_cap = default_symbol_cond_cap) {
    if (a.dim != g.dim) throw invalid_input("symbol table: symbol/grid dimension mismatch");
    check_invertible_on_grid(a, g, cond_cap);
    SymbolTable t;
    t.grid = g;
    t.fwd.resize(g.size());
    t.inv.resize(g.size());
    detail::per_mode(g, [&](const std::array<double, 3>& xi, std::size_t m) {
        t.fwd[m] = a.evaluate(xi);
        detail::invert(t.fwd[m], t.inv[m]);
    });
    return t;
}

namespace detail {

inline VectorField apply_table(const std::vector<cmat>& table, const VectorField& u,
                               const GridSpec& g) {
    std::vector<SpectralField> F = forward_components(u);
    const std::size_t total = g.size();
    for (std::size_t m = 0; m < total; ++m) {
        std::complex<double> in[3], out[3];
        for (int c = 0; c < g.dim; ++c) in[c] = F[c].coefficients[m];
        matvec(table[m], in, out);
        for (int c = 0; c < g.dim; ++c) F[c].coefficients[m] = out[c];
    }
    for (auto& c : F) {
        for (const auto& z : c.coefficients)
            if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
                throw blowup_error("nan", "apply: non-finite result");
        hermitian_symmetrize(c);
    }
    return inverse_components(g, F);
}

} // namespace detail

inline VectorField apply(const SymbolTable& t, const VectorField& u) {
    check_same_grid(t.grid, u.grid, "apply(table)");
    return detail::apply_table(t.fwd, u, t.grid);
}

inline VectorField apply_inverse(const SymbolTable& t, const VectorField& w) {
    check_same_grid(t.grid, w.grid, "apply_inverse(table)");
    return detail::apply_table(t.inv, w, t.grid);
}

// Directional derivative (u . grad) w, quadratic products dealiased.
inline VectorField advect(const VectorField& u, const VectorField& w) {
    check_same_grid(u.grid, w.grid, "advect");
    const GridSpec& g = u.grid;
    const int n = g.dim;
    VectorField r = make_vector(g);
    for (int i = 0; i < n; ++i) {
        SpectralField wi = forward_transform(w.components[i]);
        ScalarField acc = make_scalar(g);
        for (int j = 0; j < n; ++j) {
            const ScalarField dj = inverse_transform(derivative_spectral(wi, j));
            for (std::size_t m = 0; m < acc.values.size(); ++m)
                acc.values[m] += u.components[j].values[m] * dj.values[m];
        }
        r.components[i] = dealias_field(acc);
    }
    return r;
}

// [A, grad_u] u = A((u.grad)u) - (u.grad)(Au)
inline VectorField commutator_term(const MultiplierSymbol& a, const VectorField& u) {
    return apply(a, advect(u, u)) - advect(u, apply(a, u));
}

inline VectorField commutator_term(const SymbolTable& t, const VectorField& u) {
    return apply(t, advect(u, u)) - advect(u, apply(t, u));
}

// ---------------------------------------------------------------------------
// Numerical certification of the symbol classes. The asymptotic bounds are
// falsified (or not) on a finite logarithmic frequency ladder against a fixed
// admissible constant; a pass is evidence, not proof.
// ---------------------------------------------------------------------------
struct ClassReport {
    double order_tested = 0.0;
    bool s_r_bound_ok = false;
    double s_r_worst_ratio = 0.0; // max over samples, |alpha| <= 2
    bool elliptic_ok = false;
    double elliptic_worst_ratio = 0.0;
    bool hermitian_pd_ok = false;
    double min_eigenvalue = 0.0; // of the Hermitian part, over all samples
    long sample_count = 0;

    bool all_ok() const { return s_r_bound_ok && elliptic_ok && hermitian_pd_ok; }
};

struct SamplePlan {
    int count = 200;      // logarithmic magnitudes per direction
    double xi_min = 1e-2; // first nonzero rung of the ladder
    double xi_max = 1e3;
    // Admissible constant for the asymptotic bounds. The Sobolev family itself
    // needs cap >= 4s^2 - 2s (= 12 at s = 2) on the second-derivative ratio, so
    // anything much tighter rejects the operators the solver is built around.
    double cap = 20.0;
};

namespace detail {

inline std::vector<std::array<double, 3>> sample_directions(int dim) {
    std::vector<std::array<double, 3>> dirs;
    if (dim == 1) {
        dirs = {{1, 0, 0}, {-1, 0, 0}};
    } else if (dim == 2) {
        const double s = 1.0 / std::sqrt(2.0);
        dirs = {{1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0},
                {s, s, 0}, {-s, s, 0}, {s, -s, 0}, {-s, -s, 0}};
    } else {
        for (int a = -1; a <= 1; ++a)
            for (int b = -1; b <= 1; ++b)
                for (int c = -1; c <= 1; ++c) {
                    if (a == 0 && b == 0 && c == 0) continue;
                    const double norm = std::sqrt(double(a * a + b * b + c * c));
                    dirs.push_back({a / norm, b / norm, c / norm});
                }
    }
    return dirs;
}

// 4th-order central differences of the symbol, step relative to (1+|xi|).
struct symbol_derivatives {
    cmat d1[3];    // first partials
    cmat d2[3][3]; // second partials
};

inline symbol_derivatives fd_derivatives(const MultiplierSymbol& a,
                                         const std::array<double, 3>& xi) {
    const double h = 1e-3 * (1.0 + std::sqrt(abs2(xi)));
    const double c1[4] = {1.0 / 12, -8.0 / 12, 8.0 / 12, -1.0 / 12};
    const int off[4] = {-2, -1, 1, 2};
    auto at = [&](int j, int o, int l = -1, int p = 0) {
        std::array<double, 3> q = xi;
        q[j] += o * h;
        if (l >= 0) q[l] += p * h;
        return a.evaluate(q);
    };
    symbol_derivatives d;
    const cmat a0 = a.evaluate(xi);
    for (int j = 0; j < a.dim; ++j) {
        cmat acc;
        acc.n = a.dim;
        for (int t = 0; t < 4; ++t) acc = add(acc, scale(c1[t] / h, at(j, off[t])));
        d.d1[j] = acc;
        // pure second derivative: (-f2 + 16 f1 - 30 f0 + 16 f-1 - f-2) / (12 h^2)
        cmat acc2 = scale(-30.0, a0);
        acc2 = add(acc2, scale(16.0, at(j, 1)));
        acc2 = add(acc2, scale(16.0, at(j, -1)));
        acc2 = add(acc2, scale(-1.0, at(j, 2)));
        acc2 = add(acc2, scale(-1.0, at(j, -2)));
        d.d2[j][j] = scale(1.0 / (12.0 * h * h), acc2);
    }
    for (int j = 0; j < a.dim; ++j)
        for (int l = j + 1; l < a.dim; ++l) {
            cmat acc;
            acc.n = a.dim;
            for (int t = 0; t < 4; ++t)
                for (int s = 0; s < 4; ++s)
                    acc = add(acc, scale(c1[t] * c1[s] / (h * h), at(j, off[t], l, off[s])));
            d.d2[j][l] = acc;
            d.d2[l][j] = acc;
        }
    return d;
}

} // namespace detail

inline ClassReport validate_class(const MultiplierSymbol& a, double r,
                                  const SamplePlan& plan = {}) {
    ClassReport rep;
    rep.order_tested = r;
    rep.s_r_worst_ratio = 0.0;
    rep.elliptic_worst_ratio = 0.0;
    rep.min_eigenvalue = std::numeric_limits<double>::infinity();
    bool hermitian = true;
    bool invertible = true;

    std::vector<std::array<double, 3>> samples;
    samples.push_back({0.0, 0.0, 0.0});
    const auto dirs = detail::sample_directions(a.dim);
    const double lmin = std::log(plan.xi_min), lmax = std::log(plan.xi_max);
    for (int i = 0; i < plan.count; ++i) {
        const double mag =
            std::exp(lmin + (lmax - lmin) * (plan.count == 1 ? 0.0 : double(i) / (plan.count - 1)));
        for (const auto& d : dirs)
            samples.push_back({mag * d[0], mag * d[1], mag * d[2]});
    }
    rep.sample_count = static_cast<long>(samples.size());

    for (const auto& xi : samples) {
        const detail::cmat a0 = a.evaluate(xi);
        if (!detail::finite(a0))
            throw invalid_input("validate_class: symbol evaluation failed at |xi| = " +
                                std::to_string(std::sqrt(abs2(xi))));
        const double w = 1.0 + abs2(xi);

        // S^r growth bounds for |alpha| <= 2
        double ratio = detail::opnorm2(a0) / std::pow(w, r / 2.0);
        const detail::symbol_derivatives der = detail::fd_derivatives(a, xi);
        for (int j = 0; j < a.dim; ++j)
            ratio = std::max(ratio, detail::opnorm2(der.d1[j]) / std::pow(w, (r - 1.0) / 2.0));
        for (int j = 0; j < a.dim; ++j)
            for (int l = 0; l < a.dim; ++l)
                ratio = std::max(ratio, detail::opnorm2(der.d2[j][l]) / std::pow(w, (r - 2.0) / 2.0));
        rep.s_r_worst_ratio = std::max(rep.s_r_worst_ratio, ratio);

        // ellipticity with inverse decay
        detail::cmat inv;
        if (detail::invert(a0, inv)) {
            rep.elliptic_worst_ratio = std::max(rep.elliptic_worst_ratio,
                                                detail::opnorm2(inv) * std::pow(w, r / 2.0));
        } else {
            invertible = false;
            rep.elliptic_worst_ratio = std::numeric_limits<double>::infinity();
        }

        // Hermitian positive-definiteness
        if (detail::opnorm2(detail::sub(a0, detail::adjoint(a0))) > 1e-10) hermitian = false;
        rep.min_eigenvalue = std::min(rep.min_eigenvalue, detail::min_eig_hermitian_part(a0));
    }

    rep.s_r_bound_ok = rep.s_r_worst_ratio <= plan.cap;
    rep.elliptic_ok = invertible && rep.elliptic_worst_ratio <= plan.cap;
    rep.hermitian_pd_ok = hermitian && rep.min_eigenvalue > 0.0;
    return rep;
}

} // namespace beq
