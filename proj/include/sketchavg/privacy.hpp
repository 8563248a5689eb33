#pragma once

#include <cstddef>

#include "sketchavg/types.hpp"

namespace sketchavg {

// Inputs to the differential-privacy sketch sizing. For left sketches the
// bounds describe the concatenated matrix [A, b] (d+1 columns); for right
// sketches the roles of n and d swap (the sketch acts on A^T).
struct PrivacyParams {
    std::size_t n = 0;      // rows of the sketched matrix
    std::size_t d = 0;      // columns of A (the data part)
    double b0 = 0.0;        // entrywise bound |A_c[i][j]| <= b0
    double sigma0 = 0.0;    // sigma_min(A_c^T A_c / n) = sigma0^2
    double eps = 0.0;       // privacy parameter epsilon
    double beta = 0.0;      // delta = 4 e^{-beta}; needs beta > 1 + ln 4
    std::size_t q = 1;      // workers publishing sketches
};

// delta = 4 e^{-beta}; valid only when that lands in (0, 1/e).
double delta_of(double beta);

// Feasibility gate: n sigma0^2 >= (3 + 2 beta/eps) b0^2 d.
bool check_condition(const PrivacyParams& p);

// Largest per-worker sketch size m such that publishing q Gaussian sketches
// of size m stays (eps, delta)-differentially private:
// m*q <= (1/(8 beta)) * ((sigma^2/B^2 - 1) * eps*beta/(eps+beta) - 2 beta)^2
// with sigma^2 = sigma0^2 n and B^2 = b0^2 d. Floors the bound (any smaller
// m is also private) and rejects results at or below d+1, where the
// estimator theory stops applying.
std::size_t max_private_sketch_size(const PrivacyParams& p);

// Minimum sigma_min(A) certifying (eps, delta)-privacy of one m-dimensional
// Gaussian projection of a matrix with row norms at most B:
// w^2 = B^2 (1 + ((1 + eps/L)/eps) (2 sqrt(2 m L) + 2 L)), L = ln(4/delta).
// m is real-valued so concatenated sketches (m*q) can be queried directly.
double theorem3_w(double b, double m, double eps, double delta);

// Measure b0 and sigma0 from data: entrywise max of [A, b] and the smallest
// eigenvalue of its scaled Gram matrix. right_mode swaps to A^T (no
// concatenation).
PrivacyParams params_from_matrix(const Matrix& a, const Vector* b, bool right_mode, double eps,
                                 double beta, std::size_t q);

}  // namespace sketchavg
