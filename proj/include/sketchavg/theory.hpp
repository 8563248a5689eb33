#pragma once

#include <cstddef>
#include <optional>
#include <string>

#include "sketchavg/sketch.hpp"
#include "sketchavg/types.hpp"

namespace sketchavg {

// Expected relative error (E f(x_bar) - f*)/f* of the averaged Gaussian
// left sketch: (1/q) * d/(m - d - 1). Requires m > d + 1.
double gaussian_left_error(std::size_t d, std::size_t m, std::size_t q);

// Probability that the relative error stays within (1/epsilon) of its mean:
// (1 - e^{-c1 m})^q * (1 - (1/epsilon) * d/(m - d - 1)), clamped at 0.
// The constant c1 is not pinned down by theory and is caller-supplied.
double gaussian_left_prob_bound(std::size_t d, std::size_t m, std::size_t q, double epsilon,
                                double c1);

// Expected relative error (E ||x_bar - x*||^2)/f* of the averaged right
// sketch on an underdetermined system: (1/q) * (d - n)/(m - n - 1).
double gaussian_right_error(std::size_t n, std::size_t d, std::size_t m, std::size_t q);

// Upper bound on the prediction bias norm ||E[A x_hat] - A x*||_2 for the
// biased sketch families, sqrt(4 * epsilon * B) with B the kind-specific
// bound on E||z||^2:
//   ros:             (d/m) (1 - 2 min_lev / d) f*
//   uniform_with:    (n/m) max_lev f*
//   uniform_without: (n/m) ((n-m)/(n-1)) max_lev f*
//   leverage:        (d/m) f*
// epsilon is the spectral-deviation assumption (1-eps)I <= Q <= (1+eps)I.
double bias_bound(SketchKind kind, std::size_t n, std::size_t d, std::size_t m, double f_star,
                  double epsilon, std::optional<double> max_lev = std::nullopt,
                  std::optional<double> min_lev = std::nullopt);

struct CoherenceStats {
    double max_lev = 0.0;
    double min_lev = 0.0;
};

CoherenceStats coherence_stats(const Matrix& a);

// Everything the `predict` command reports for one configuration; inputs are
// echoed so a report is self-describing.
struct TheoryReport {
    std::string kind;
    std::string mode;
    std::size_t n = 0, d = 0, m = 0, q = 1;
    std::optional<double> epsilon, c1, f_star, max_lev, min_lev;
    std::optional<double> predicted_relative_error;
    std::optional<double> prob_bound;
    std::optional<double> bias_bound;
};

}  // namespace sketchavg
