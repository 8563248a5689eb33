#pragma once

#include <cstddef>

#include "sketchavg/types.hpp"

namespace sketchavg {

// Dense kernels. The OpenMP versions parallelize only across independent
// output elements and keep every per-element reduction in a fixed serial
// order, so they produce bit-identical results to the serial references in
// sketchavg::ref regardless of thread count. Tests assert that equality.

// C = A * B
Matrix matmul(const Matrix& a, const Matrix& b);

// y = A * x
Vector matvec(const Matrix& a, const Vector& x);

// In-place Walsh-Hadamard transform (unnormalized Sylvester H) of a
// power-of-two-length vector.
void fwht_inplace(Vector& v);

// Apply the transform down the rows: each column of M is replaced by H times
// that column. M.rows() must be a power of two.
void fwht_rows_inplace(Matrix& m);

namespace ref {

Matrix matmul(const Matrix& a, const Matrix& b);
Vector matvec(const Matrix& a, const Vector& x);
void fwht_inplace(Vector& v);
void fwht_rows_inplace(Matrix& m);

}  // namespace ref

}  // namespace sketchavg
