#include "sketchavg/kernels.hpp"

#include <bit>
#include <cstdint>
#include <string>

#include "sketchavg/errors.hpp"

namespace sketchavg {

namespace {

void check_mul_shapes(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows())
        throw ShapeMismatch("matmul: " + std::to_string(a.rows()) + "x" +
                            std::to_string(a.cols()) + " times " + std::to_string(b.rows()) +
                            "x" + std::to_string(b.cols()));
}

void check_pow2(std::size_t n) {
    if (n == 0 || !std::has_single_bit(static_cast<std::uint64_t>(n)))
        throw NotPowerOfTwo("transform length " + std::to_string(n) + " is not a power of two");
}

// Row i of C accumulates a_ik * row_k(B) for ascending k. Each output element
// sees additions in the same order as the serial reference.
void matmul_row(const Matrix& a, const Matrix& b, Matrix& c, std::size_t i) {
    const std::size_t n = a.cols(), p = b.cols();
    double* ci = c.row(i);
    for (std::size_t k = 0; k < n; ++k) {
        const double aik = a(i, k);
        const double* bk = b.row(k);
        for (std::size_t j = 0; j < p; ++j) ci[j] += aik * bk[j];
    }
}

double matvec_row(const Matrix& a, const Vector& x, std::size_t i) {
    const double* ai = a.row(i);
    double s = 0.0;
    for (std::size_t j = 0; j < a.cols(); ++j) s += ai[j] * x[j];
    return s;
}

void fwht_stage(double* v, std::size_t block, std::size_t len) {
    double* lo = v + 2 * block * len;
    double* hi = lo + len;
    for (std::size_t j = 0; j < len; ++j) {
        double a = lo[j], b = hi[j];
        lo[j] = a + b;
        hi[j] = a - b;
    }
}

void fwht_rows_stage(Matrix& m, std::size_t block, std::size_t len) {
    const std::size_t c = m.cols();
    for (std::size_t r = 0; r < len; ++r) {
        double* lo = m.row(2 * block * len + r);
        double* hi = m.row(2 * block * len + len + r);
        for (std::size_t j = 0; j < c; ++j) {
            double a = lo[j], b = hi[j];
            lo[j] = a + b;
            hi[j] = a - b;
        }
    }
}

}  // namespace

Matrix matmul(const Matrix& a, const Matrix& b) {
    check_mul_shapes(a, b);
    Matrix c(a.rows(), b.cols());
    const std::ptrdiff_t rows = static_cast<std::ptrdiff_t>(a.rows());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < rows; ++i) matmul_row(a, b, c, static_cast<std::size_t>(i));
    return c;
}

Vector matvec(const Matrix& a, const Vector& x) {
    if (a.cols() != x.size())
        throw ShapeMismatch("matvec: " + std::to_string(a.rows()) + "x" +
                            std::to_string(a.cols()) + " times vector of length " +
                            std::to_string(x.size()));
    Vector y(a.rows());
    const std::ptrdiff_t rows = static_cast<std::ptrdiff_t>(a.rows());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < rows; ++i)
        y[static_cast<std::size_t>(i)] = matvec_row(a, x, static_cast<std::size_t>(i));
    return y;
}

void fwht_inplace(Vector& v) {
    check_pow2(v.size());
    const std::size_t n = v.size();
    for (std::size_t len = 1; len < n; len <<= 1) {
        const std::ptrdiff_t blocks = static_cast<std::ptrdiff_t>(n / (2 * len));
#pragma omp parallel for schedule(static)
        for (std::ptrdiff_t b = 0; b < blocks; ++b)
            fwht_stage(v.data(), static_cast<std::size_t>(b), len);
    }
}

void fwht_rows_inplace(Matrix& m) {
    check_pow2(m.rows());
    const std::size_t n = m.rows();
    for (std::size_t len = 1; len < n; len <<= 1) {
        const std::ptrdiff_t blocks = static_cast<std::ptrdiff_t>(n / (2 * len));
#pragma omp parallel for schedule(static)
        for (std::ptrdiff_t b = 0; b < blocks; ++b)
            fwht_rows_stage(m, static_cast<std::size_t>(b), len);
    }
}

namespace ref {

Matrix matmul(const Matrix& a, const Matrix& b) {
    check_mul_shapes(a, b);
    Matrix c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) matmul_row(a, b, c, i);
    return c;
}

Vector matvec(const Matrix& a, const Vector& x) {
    if (a.cols() != x.size())
        throw ShapeMismatch("matvec: shape mismatch");
    Vector y(a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i) y[i] = matvec_row(a, x, i);
    return y;
}

void fwht_inplace(Vector& v) {
    check_pow2(v.size());
    const std::size_t n = v.size();
    for (std::size_t len = 1; len < n; len <<= 1)
        for (std::size_t b = 0; b < n / (2 * len); ++b) fwht_stage(v.data(), b, len);
}

void fwht_rows_inplace(Matrix& m) {
    check_pow2(m.rows());
    const std::size_t n = m.rows();
    for (std::size_t len = 1; len < n; len <<= 1)
        for (std::size_t b = 0; b < n / (2 * len); ++b) fwht_rows_stage(m, b, len);
}

}  // namespace ref

}  // namespace sketchavg
