#include "sketchavg/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "sketchavg/errors.hpp"
#include "sketchavg/kernels.hpp"

namespace sketchavg {

namespace {

// Householder QR with the reflectors packed below the diagonal. Column k of
// the packed matrix stores R(k,k)=alpha on the diagonal and w_i = v_i/v_0
// below it (w_0 = 1 implicit); tau[k] recovers H_k = I - tau w w^T.
struct PackedQr {
    Matrix a;
    Vector tau;
    Vector diag_abs;  // |R_kk| per column, for rank decisions
};

double column_norm_below(const Matrix& a, std::size_t k) {
    double amax = 0.0;
    for (std::size_t i = k; i < a.rows(); ++i) amax = std::max(amax, std::abs(a(i, k)));
    if (amax == 0.0) return 0.0;
    double s = 0.0;
    for (std::size_t i = k; i < a.rows(); ++i) {
        double t = a(i, k) / amax;
        s += t * t;
    }
    return amax * std::sqrt(s);
}

// Apply reflector k (stored in `qr`) to one column of m, rows k..end.
void reflect_column(const Matrix& qr, double tau, std::size_t k, Matrix& m, std::size_t col) {
    const std::size_t n = qr.rows();
    double s = m(k, col);
    for (std::size_t i = k + 1; i < n; ++i) s += qr(i, k) * m(i, col);
    s *= tau;
    m(k, col) -= s;
    for (std::size_t i = k + 1; i < n; ++i) m(i, col) -= qr(i, k) * s;
}

void reflect_vector(const Matrix& qr, double tau, std::size_t k, Vector& v) {
    const std::size_t n = qr.rows();
    double s = v[k];
    for (std::size_t i = k + 1; i < n; ++i) s += qr(i, k) * v[i];
    s *= tau;
    v[k] -= s;
    for (std::size_t i = k + 1; i < n; ++i) v[i] -= qr(i, k) * s;
}

PackedQr householder_qr(Matrix a) {
    const std::size_t n = a.rows(), d = a.cols();
    if (n < d)
        throw ShapeMismatch("QR needs rows >= cols, got " + std::to_string(n) + "x" +
                            std::to_string(d));
    PackedQr f;
    f.tau.assign(d, 0.0);
    f.diag_abs.assign(d, 0.0);
    for (std::size_t k = 0; k < d; ++k) {
        double sigma = column_norm_below(a, k);
        if (sigma == 0.0) {
            // Column already zero below (and at) the diagonal.
            a(k, k) = 0.0;
            continue;
        }
        double alpha = a(k, k) >= 0.0 ? -sigma : sigma;
        double v0 = a(k, k) - alpha;
        for (std::size_t i = k + 1; i < n; ++i) a(i, k) /= v0;
        double tau = -v0 / alpha;
        a(k, k) = alpha;
        f.tau[k] = tau;
        f.diag_abs[k] = std::abs(alpha);
        const std::ptrdiff_t rest = static_cast<std::ptrdiff_t>(d - k - 1);
#pragma omp parallel for schedule(static)
        for (std::ptrdiff_t jj = 0; jj < rest; ++jj)
            reflect_column(a, tau, k, a, k + 1 + static_cast<std::size_t>(jj));
    }
    f.a = std::move(a);
    return f;
}

std::size_t qr_rank(const PackedQr& f, std::size_t n, std::size_t d) {
    double dmax = 0.0;
    for (double v : f.diag_abs) dmax = std::max(dmax, v);
    double tol = static_cast<double>(std::max(n, d)) * std::numeric_limits<double>::epsilon() * dmax;
    std::size_t r = 0;
    for (double v : f.diag_abs)
        if (v > tol && v > 0.0) ++r;
    return r;
}

void require_full_rank(const PackedQr& f, std::size_t n, std::size_t d, const char* who) {
    std::size_t r = qr_rank(f, n, d);
    if (r < d)
        throw RankDeficient(std::string(who) + ": detected rank " + std::to_string(r) +
                                " < " + std::to_string(d),
                            r);
}

}  // namespace

Vector lstsq_solve(const Matrix& a, const Vector& b) {
    const std::size_t n = a.rows(), d = a.cols();
    if (b.size() != n)
        throw ShapeMismatch("lstsq_solve: A is " + std::to_string(n) + "x" + std::to_string(d) +
                            " but b has length " + std::to_string(b.size()));
    if (n < d) throw ShapeMismatch("lstsq_solve: underdetermined system, use minnorm_solve");
    PackedQr f = householder_qr(a);
    require_full_rank(f, n, d, "lstsq_solve");
    Vector c = b;
    for (std::size_t k = 0; k < d; ++k)
        if (f.tau[k] != 0.0) reflect_vector(f.a, f.tau[k], k, c);
    Vector x(d);
    for (std::size_t jj = d; jj-- > 0;) {
        double s = c[jj];
        for (std::size_t l = jj + 1; l < d; ++l) s -= f.a(jj, l) * x[l];
        x[jj] = s / f.a(jj, jj);
    }
    return x;
}

Vector minnorm_solve(const Matrix& a, const Vector& b) {
    const std::size_t n = a.rows(), d = a.cols();
    if (b.size() != n)
        throw ShapeMismatch("minnorm_solve: A is " + std::to_string(n) + "x" + std::to_string(d) +
                            " but b has length " + std::to_string(b.size()));
    if (n > d) throw ShapeMismatch("minnorm_solve: overdetermined system, use lstsq_solve");
    PackedQr f = householder_qr(a.transposed());  // d x n
    require_full_rank(f, d, n, "minnorm_solve");
    // Solve R^T y = b (forward substitution on the transposed upper factor).
    Vector y(n);
    for (std::size_t i = 0; i < n; ++i) {
        double s = b[i];
        for (std::size_t j = 0; j < i; ++j) s -= f.a(j, i) * y[j];
        y[i] = s / f.a(i, i);
    }
    // x = Q [y; 0]
    Vector x(d, 0.0);
    std::copy(y.begin(), y.end(), x.begin());
    for (std::size_t k = n; k-- > 0;)
        if (f.tau[k] != 0.0) reflect_vector(f.a, f.tau[k], k, x);
    return x;
}

Vector leverage_scores(const Matrix& a) {
    const std::size_t n = a.rows(), d = a.cols();
    PackedQr f = householder_qr(a);
    require_full_rank(f, n, d, "leverage_scores");
    // Thin Q = H_0 ... H_{d-1} [I_d; 0], columns built independently.
    Matrix q(n, d);
    for (std::size_t j = 0; j < d; ++j) q(j, j) = 1.0;
    for (std::size_t k = d; k-- > 0;) {
        if (f.tau[k] == 0.0) continue;
        const std::ptrdiff_t cols = static_cast<std::ptrdiff_t>(d);
#pragma omp parallel for schedule(static)
        for (std::ptrdiff_t j = 0; j < cols; ++j)
            reflect_column(f.a, f.tau[k], k, q, static_cast<std::size_t>(j));
    }
    Vector lev(n);
    const std::ptrdiff_t rows = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < rows; ++i) {
        const double* qi = q.row(static_cast<std::size_t>(i));
        double s = 0.0;
        for (std::size_t j = 0; j < d; ++j) s += qi[j] * qi[j];
        lev[static_cast<std::size_t>(i)] = s;
    }
    return lev;
}

double residual_cost(const Matrix& a, const Vector& x, const Vector& b) {
    if (x.size() != a.cols() || b.size() != a.rows())
        throw ShapeMismatch("residual_cost: A is " + std::to_string(a.rows()) + "x" +
                            std::to_string(a.cols()) + ", x has length " +
                            std::to_string(x.size()) + ", b has length " +
                            std::to_string(b.size()));
    Vector r = matvec(a, x);
    NeumaierSum acc;
    for (std::size_t i = 0; i < r.size(); ++i) {
        double e = r[i] - b[i];
        acc.add(e * e);
    }
    return acc.value();
}

Vector fwht(Vector v) {
    fwht_inplace(v);
    return v;
}

Vector symmetric_eigenvalues(Matrix s) {
    const std::size_t n = s.rows();
    if (s.cols() != n) throw ShapeMismatch("symmetric_eigenvalues: matrix not square");
    if (n == 0) return {};
    double scale = 0.0;
    for (double v : s.data()) scale = std::max(scale, std::abs(v));
    if (scale == 0.0) return Vector(n, 0.0);
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) off = std::max(off, std::abs(s(p, q)));
        if (off < 1e-14 * scale) break;
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                double apq = s(p, q);
                if (std::abs(apq) < 1e-300) continue;
                double theta = (s(q, q) - s(p, p)) / (2.0 * apq);
                double t = (theta >= 0.0 ? 1.0 : -1.0) /
                           (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                double c = 1.0 / std::sqrt(t * t + 1.0);
                double sn = t * c;
                for (std::size_t i = 0; i < n; ++i) {
                    double sip = s(i, p), siq = s(i, q);
                    s(i, p) = c * sip - sn * siq;
                    s(i, q) = sn * sip + c * siq;
                }
                for (std::size_t i = 0; i < n; ++i) {
                    double spi = s(p, i), sqi = s(q, i);
                    s(p, i) = c * spi - sn * sqi;
                    s(q, i) = sn * spi + c * sqi;
                }
            }
        }
    }
    Vector eig(n);
    for (std::size_t i = 0; i < n; ++i) eig[i] = s(i, i);
    std::sort(eig.begin(), eig.end());
    return eig;
}

}  // namespace sketchavg
