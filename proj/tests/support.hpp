#pragma once

// Naive reference implementations the suites check the library against.
// Everything here trades speed for obviousness and is independent of the
// code under test.

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "sketchavg/types.hpp"

namespace oracle {

using sketchavg::Matrix;
using sketchavg::Vector;

inline Matrix naive_matmul(const Matrix& a, const Matrix& b) {
    Matrix c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < b.cols(); ++j) {
            long double acc = 0.0L;
            for (std::size_t k = 0; k < a.cols(); ++k)
                acc += static_cast<long double>(a(i, k)) * static_cast<long double>(b(k, j));
            c(i, j) = static_cast<double>(acc);
        }
    return c;
}

inline Vector naive_matvec(const Matrix& a, const Vector& x) {
    Vector y(a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        long double acc = 0.0L;
        for (std::size_t k = 0; k < a.cols(); ++k)
            acc += static_cast<long double>(a(i, k)) * static_cast<long double>(x[k]);
        y[i] = static_cast<double>(acc);
    }
    return y;
}

// Sylvester construction: H(1) = [1], H(2n) = [[H, H], [H, -H]].
inline Matrix hadamard(std::size_t n) {
    Matrix h(1, 1);
    h(0, 0) = 1.0;
    std::size_t k = 1;
    while (k < n) {
        Matrix next(2 * k, 2 * k);
        for (std::size_t i = 0; i < k; ++i)
            for (std::size_t j = 0; j < k; ++j) {
                next(i, j) = h(i, j);
                next(i, j + k) = h(i, j);
                next(i + k, j) = h(i, j);
                next(i + k, j + k) = -h(i, j);
            }
        h = std::move(next);
        k *= 2;
    }
    if (k != n) throw std::invalid_argument("hadamard: n must be a power of two");
    return h;
}

// Gaussian elimination with partial pivoting for small dense systems.
inline Vector solve_dense(Matrix g, Vector y) {
    const std::size_t n = g.rows();
    if (g.cols() != n || y.size() != n) throw std::invalid_argument("solve_dense: shape");
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t piv = k;
        for (std::size_t i = k + 1; i < n; ++i)
            if (std::abs(g(i, k)) > std::abs(g(piv, k))) piv = i;
        if (g(piv, k) == 0.0) throw std::runtime_error("solve_dense: singular");
        if (piv != k) {
            for (std::size_t j = 0; j < n; ++j) std::swap(g(k, j), g(piv, j));
            std::swap(y[k], y[piv]);
        }
        for (std::size_t i = k + 1; i < n; ++i) {
            double f = g(i, k) / g(k, k);
            for (std::size_t j = k; j < n; ++j) g(i, j) -= f * g(k, j);
            y[i] -= f * y[k];
        }
    }
    Vector x(n);
    for (std::size_t i = n; i-- > 0;) {
        long double acc = y[i];
        for (std::size_t j = i + 1; j < n; ++j)
            acc -= static_cast<long double>(g(i, j)) * static_cast<long double>(x[j]);
        x[i] = static_cast<double>(acc / g(i, i));
    }
    return x;
}

// Least squares through the normal equations A^T A x = A^T b.
inline Vector normal_eq_solve(const Matrix& a, const Vector& b) {
    const std::size_t d = a.cols();
    Matrix g(d, d);
    Vector y(d);
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = 0; j < d; ++j) {
            long double acc = 0.0L;
            for (std::size_t k = 0; k < a.rows(); ++k)
                acc += static_cast<long double>(a(k, i)) * static_cast<long double>(a(k, j));
            g(i, j) = static_cast<double>(acc);
        }
        long double acc = 0.0L;
        for (std::size_t k = 0; k < a.rows(); ++k)
            acc += static_cast<long double>(a(k, i)) * static_cast<long double>(b[k]);
        y[i] = static_cast<double>(acc);
    }
    return solve_dense(std::move(g), std::move(y));
}

// Minimum-norm solution x = A^T (A A^T)^{-1} b for wide full-row-rank A.
inline Vector minnorm_direct(const Matrix& a, const Vector& b) {
    const std::size_t n = a.rows();
    Matrix g(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            long double acc = 0.0L;
            for (std::size_t k = 0; k < a.cols(); ++k)
                acc += static_cast<long double>(a(i, k)) * static_cast<long double>(a(j, k));
            g(i, j) = static_cast<double>(acc);
        }
    Vector y = solve_dense(std::move(g), b);
    Vector x(a.cols(), 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < a.cols(); ++k) x[k] += a(i, k) * y[i];
    return x;
}

// One-sided Jacobi: rotate column pairs until mutually orthogonal, then
// normalize. Returns an orthonormal basis of range(A); needs full column
// rank.
inline Matrix orthonormal_basis(Matrix a) {
    const std::size_t n = a.rows(), d = a.cols();
    for (int sweep = 0; sweep < 60; ++sweep) {
        double worst = 0.0;
        for (std::size_t p = 0; p + 1 < d; ++p)
            for (std::size_t q = p + 1; q < d; ++q) {
                long double alpha = 0.0L, beta = 0.0L, gamma = 0.0L;
                for (std::size_t i = 0; i < n; ++i) {
                    alpha += static_cast<long double>(a(i, p)) * a(i, p);
                    beta += static_cast<long double>(a(i, q)) * a(i, q);
                    gamma += static_cast<long double>(a(i, p)) * a(i, q);
                }
                double off = std::abs(static_cast<double>(gamma)) /
                             std::sqrt(static_cast<double>(alpha) * static_cast<double>(beta));
                worst = std::max(worst, off);
                if (off < 1e-15) continue;
                double zeta = static_cast<double>((beta - alpha) / (2.0L * gamma));
                double t = (zeta >= 0.0 ? 1.0 : -1.0) /
                           (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
                double c = 1.0 / std::sqrt(1.0 + t * t);
                double s = c * t;
                for (std::size_t i = 0; i < n; ++i) {
                    double vp = a(i, p), vq = a(i, q);
                    a(i, p) = c * vp - s * vq;
                    a(i, q) = s * vp + c * vq;
                }
            }
        if (worst < 1e-14) break;
    }
    for (std::size_t j = 0; j < d; ++j) {
        long double nrm = 0.0L;
        for (std::size_t i = 0; i < n; ++i) nrm += static_cast<long double>(a(i, j)) * a(i, j);
        double inv = 1.0 / std::sqrt(static_cast<double>(nrm));
        for (std::size_t i = 0; i < n; ++i) a(i, j) *= inv;
    }
    return a;
}

inline Vector leverage_direct(const Matrix& a) {
    Matrix u = orthonormal_basis(a);
    Vector lev(u.rows(), 0.0);
    for (std::size_t i = 0; i < u.rows(); ++i)
        for (std::size_t j = 0; j < u.cols(); ++j) lev[i] += u(i, j) * u(i, j);
    return lev;
}

inline double max_abs_diff(const Vector& x, const Vector& y) {
    double m = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) m = std::max(m, std::abs(x[i] - y[i]));
    return m;
}

inline double max_abs_diff(const Matrix& x, const Matrix& y) {
    double m = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i)
        m = std::max(m, std::abs(x.data()[i] - y.data()[i]));
    return m;
}

inline double rel_diff(const Vector& x, const Vector& y) {
    long double num = 0.0L, den = 0.0L;
    for (std::size_t i = 0; i < x.size(); ++i) {
        num += static_cast<long double>(x[i] - y[i]) * (x[i] - y[i]);
        den += static_cast<long double>(y[i]) * y[i];
    }
    if (den == 0.0L) return num == 0.0L ? 0.0 : 1.0;
    return std::sqrt(static_cast<double>(num / den));
}

inline double rel_diff(const Matrix& x, const Matrix& y) {
    long double num = 0.0L, den = 0.0L;
    for (std::size_t i = 0; i < x.size(); ++i) {
        double xv = x.data()[i], yv = y.data()[i];
        num += static_cast<long double>(xv - yv) * (xv - yv);
        den += static_cast<long double>(yv) * yv;
    }
    if (den == 0.0L) return num == 0.0L ? 0.0 : 1.0;
    return std::sqrt(static_cast<double>(num / den));
}

inline bool bitwise_equal(const Vector& x, const Vector& y) {
    if (x.size() != y.size()) return false;
    for (std::size_t i = 0; i < x.size(); ++i)
        if (x[i] != y[i] || std::signbit(x[i]) != std::signbit(y[i])) return false;
    return true;
}

inline bool bitwise_equal(const Matrix& x, const Matrix& y) {
    return x.rows() == y.rows() && x.cols() == y.cols() && bitwise_equal(x.data(), y.data());
}

struct Moments {
    double mean = 0.0;
    double var = 0.0;
};

inline Moments moments(const std::vector<double>& xs) {
    Moments m;
    for (double x : xs) m.mean += x;
    m.mean /= static_cast<double>(xs.size());
    for (double x : xs) m.var += (x - m.mean) * (x - m.mean);
    m.var /= static_cast<double>(xs.size() - 1);
    return m;
}

// Deterministic filler for shape tests where the distribution is irrelevant.
inline Matrix test_matrix(std::size_t n, std::size_t d, std::uint64_t salt = 0) {
    Matrix a(n, d);
    std::uint64_t state = 0x243f6a8885a308d3ULL + salt;
    for (std::size_t i = 0; i < a.size(); ++i) {
        state = state * 6364136223846793005ULL + 1442695040888963407ULL;
        a.data()[i] = static_cast<double>(static_cast<std::int64_t>(state >> 11)) * 0x1.0p-53 * 4.0 -
                      2.0;
    }
    return a;
}

inline Vector test_vector(std::size_t n, std::uint64_t salt = 1) {
    Matrix a = test_matrix(n, 1, salt);
    return a.data();
}

}  // namespace oracle
