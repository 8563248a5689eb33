#pragma once

#include "sketchavg/types.hpp"

namespace sketchavg {

// Least squares via Householder QR: minimizes ||A x - b||_2 for A with
// rows >= cols. Throws RankDeficient (with the detected rank) when some
// |R_ii| falls below max(rows, cols) * eps * max_j |R_jj|.
Vector lstsq_solve(const Matrix& a, const Vector& b);

// Minimum-norm solution of the underdetermined system A x = b (rows <= cols,
// full row rank): x = A^T (A A^T)^{-1} b, computed via QR of A^T.
Vector minnorm_solve(const Matrix& a, const Vector& b);

// Row leverage scores: squared row norms of the thin Q factor of A.
// Requires full column rank. Scores lie in [0, 1] and sum to cols(A) up to
// roundoff.
Vector leverage_scores(const Matrix& a);

// 0.5-free residual cost f(x) = ||A x - b||^2.
double residual_cost(const Matrix& a, const Vector& x, const Vector& b);

// Walsh-Hadamard transform (unnormalized Sylvester H) of a power-of-two
// length vector; returns H v.
Vector fwht(Vector v);

// Eigenvalues of a symmetric matrix by cyclic Jacobi, ascending. Intended
// for small matrices (spectral checks, privacy parameter extraction).
Vector symmetric_eigenvalues(Matrix s);

}  // namespace sketchavg
