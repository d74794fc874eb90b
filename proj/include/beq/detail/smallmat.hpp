#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>

namespace beq::detail {

// Dense complex matrix of size n <= 3, row major. Small enough that every
// operation below is direct.
struct cmat {
    int n = 1;
    std::array<std::complex<double>, 9> a{};

    std::complex<double>& operator()(int i, int j) { return a[static_cast<std::size_t>(i) * n + j]; }
    const std::complex<double>& operator()(int i, int j) const {
        return a[static_cast<std::size_t>(i) * n + j];
    }

    static cmat identity(int n) {
        cmat m;
        m.n = n;
        for (int i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }
    static cmat scalar(int n, std::complex<double> s) {
        cmat m = identity(n);
        for (int i = 0; i < n; ++i) m(i, i) = s;
        return m;
    }
};

inline bool finite(const cmat& m) {
    for (int i = 0; i < m.n; ++i)
        for (int j = 0; j < m.n; ++j)
            if (!std::isfinite(m(i, j).real()) || !std::isfinite(m(i, j).imag())) return false;
    return true;
}

inline cmat add(const cmat& x, const cmat& y) {
    cmat r = x;
    for (int i = 0; i < x.n; ++i)
        for (int j = 0; j < x.n; ++j) r(i, j) += y(i, j);
    return r;
}

inline cmat sub(const cmat& x, const cmat& y) {
    cmat r = x;
    for (int i = 0; i < x.n; ++i)
        for (int j = 0; j < x.n; ++j) r(i, j) -= y(i, j);
    return r;
}

inline cmat scale(std::complex<double> c, const cmat& x) {
    cmat r = x;
    for (int i = 0; i < x.n; ++i)
        for (int j = 0; j < x.n; ++j) r(i, j) *= c;
    return r;
}

inline cmat adjoint(const cmat& x) {
    cmat r;
    r.n = x.n;
    for (int i = 0; i < x.n; ++i)
        for (int j = 0; j < x.n; ++j) r(i, j) = std::conj(x(j, i));
    return r;
}

inline cmat matmul(const cmat& x, const cmat& y) {
    cmat r;
    r.n = x.n;
    for (int i = 0; i < x.n; ++i)
        for (int j = 0; j < x.n; ++j) {
            std::complex<double> s = 0.0;
            for (int k = 0; k < x.n; ++k) s += x(i, k) * y(k, j);
            r(i, j) = s;
        }
    return r;
}

inline void matvec(const cmat& m, const std::complex<double>* x, std::complex<double>* y) {
    for (int i = 0; i < m.n; ++i) {
        std::complex<double> s = 0.0;
        for (int j = 0; j < m.n; ++j) s += m(i, j) * x[j];
        y[i] = s;
    }
}

inline std::complex<double> det(const cmat& m) {
    switch (m.n) {
        case 1:
            return m(0, 0);
        case 2:
            return m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
        default:
            return m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) -
                   m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0)) +
                   m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
    }
}

inline double frobenius(const cmat& m) {
    double s = 0.0;
    for (int i = 0; i < m.n; ++i)
        for (int j = 0; j < m.n; ++j) s += std::norm(m(i, j));
    return std::sqrt(s);
}

// Adjugate-based inverse; returns false when |det| is negligible against the
// matrix scale.
inline bool invert(const cmat& m, cmat& out) {
    const std::complex<double> d = det(m);
    const double scale_n = std::pow(std::max(frobenius(m), 1e-300), m.n);
    if (!(std::abs(d) > 1e-14 * scale_n)) return false;
    out.n = m.n;
    switch (m.n) {
        case 1:
            out(0, 0) = 1.0 / d;
            return true;
        case 2:
            out(0, 0) = m(1, 1) / d;
            out(0, 1) = -m(0, 1) / d;
            out(1, 0) = -m(1, 0) / d;
            out(1, 1) = m(0, 0) / d;
            return true;
        default: {
            auto cof = [&](int i, int j) {
                const int r0 = (i + 1) % 3, r1 = (i + 2) % 3;
                const int c0 = (j + 1) % 3, c1 = (j + 2) % 3;
                return m(r0, c0) * m(r1, c1) - m(r0, c1) * m(r1, c0);
            };
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j) out(j, i) = cof(i, j) / d;
            return true;
        }
    }
}

// Eigenvalues of a real symmetric matrix (size <= 6) by cyclic Jacobi.
template <int MaxN>
inline void jacobi_eigenvalues(double a[MaxN][MaxN], int n, double* eig) {
    for (int sweep = 0; sweep < 60; ++sweep) {
        double off = 0.0;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) off += a[p][q] * a[p][q];
        if (off < 1e-30) break;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) {
                if (std::abs(a[p][q]) < 1e-300) continue;
                const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                const double t = (theta >= 0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
                for (int k = 0; k < n; ++k) {
                    const double akp = a[k][p], akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for (int k = 0; k < n; ++k) {
                    const double apk = a[p][k], aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
    }
    for (int i = 0; i < n; ++i) eig[i] = a[i][i];
}

// Eigenvalues of a complex Hermitian matrix via the real symmetric embedding
// [Re -Im; Im Re] (each eigenvalue appears twice).
inline void hermitian_eigenvalues(const cmat& h, double* eig /* size h.n */) {
    const int n = h.n;
    double a[6][6] = {};
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            a[i][j] = h(i, j).real();
            a[i + n][j + n] = h(i, j).real();
            a[i + n][j] = h(i, j).imag();
            a[i][j + n] = -h(i, j).imag();
        }
    double all[6];
    jacobi_eigenvalues<6>(a, 2 * n, all);
    // doubled spectrum: sort and take every other one
    for (int i = 0; i < 2 * n; ++i)
        for (int j = i + 1; j < 2 * n; ++j)
            if (all[j] < all[i]) std::swap(all[i], all[j]);
    for (int i = 0; i < n; ++i) eig[i] = all[2 * i];
}

// Operator 2-norm = largest singular value.
inline double opnorm2(const cmat& m) {
    const cmat g = matmul(adjoint(m), m); // Hermitian PSD
    double eig[3];
    hermitian_eigenvalues(g, eig);
    double mx = 0.0;
    for (int i = 0; i < m.n; ++i) mx = std::max(mx, eig[i]);
    return std::sqrt(std::max(mx, 0.0));
}

inline double min_eig_hermitian_part(const cmat& m) {
    cmat h = scale(0.5, add(m, adjoint(m)));
    double eig[3];
    hermitian_eigenvalues(h, eig);
    double mn = eig[0];
    for (int i = 1; i < m.n; ++i) mn = std::min(mn, eig[i]);
    return mn;
}

} // namespace beq::detail
