#include "sketchavg/theory.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sketchavg/errors.hpp"
#include "sketchavg/linalg.hpp"

namespace sketchavg {

double gaussian_left_error(std::size_t d, std::size_t m, std::size_t q) {
    if (d < 1) throw RegimeViolation("gaussian_left_error: d must be >= 1");
    if (q < 1) throw RegimeViolation("gaussian_left_error: q must be >= 1");
    if (m <= d + 1)
        throw RegimeViolation("gaussian_left_error: need m > d+1, got m = " + std::to_string(m) +
                              ", d = " + std::to_string(d));
    return static_cast<double>(d) /
           (static_cast<double>(m - d - 1) * static_cast<double>(q));
}

double gaussian_left_prob_bound(std::size_t d, std::size_t m, std::size_t q, double epsilon,
                                double c1) {
    if (m <= d + 1)
        throw RegimeViolation("gaussian_left_prob_bound: need m > d+1");
    if (!(epsilon > 0.0)) throw RegimeViolation("gaussian_left_prob_bound: epsilon must be > 0");
    if (!(c1 > 0.0)) throw RegimeViolation("gaussian_left_prob_bound: c1 must be > 0");
    if (q < 1) throw RegimeViolation("gaussian_left_prob_bound: q must be >= 1");
    double rate = static_cast<double>(d) / static_cast<double>(m - d - 1);
    double p = std::pow(1.0 - std::exp(-c1 * static_cast<double>(m)), static_cast<double>(q)) *
               (1.0 - rate / epsilon);
    return std::max(0.0, p);
}

double gaussian_right_error(std::size_t n, std::size_t d, std::size_t m, std::size_t q) {
    if (d <= n)
        throw RegimeViolation("gaussian_right_error: need d > n (underdetermined system)");
    if (m <= n + 1)
        throw RegimeViolation("gaussian_right_error: need m > n+1, got m = " + std::to_string(m) +
                              ", n = " + std::to_string(n));
    if (q < 1) throw RegimeViolation("gaussian_right_error: q must be >= 1");
    return static_cast<double>(d - n) /
           (static_cast<double>(m - n - 1) * static_cast<double>(q));
}

double bias_bound(SketchKind kind, std::size_t n, std::size_t d, std::size_t m, double f_star,
                  double epsilon, std::optional<double> max_lev, std::optional<double> min_lev) {
    if (!(epsilon > 0.0) || !(epsilon < 1.0))
        throw RegimeViolation("bias_bound: epsilon must lie in (0, 1)");
    if (m < 1 || d < 1 || n < 1) throw RegimeViolation("bias_bound: dimensions must be >= 1");
    if (!(f_star >= 0.0)) throw RegimeViolation("bias_bound: f_star must be >= 0");
    double b;
    switch (kind) {
        case SketchKind::Ros: {
            if (!min_lev) throw MissingCoherence("bias_bound: ros needs min_lev");
            b = (static_cast<double>(d) / static_cast<double>(m)) *
                (1.0 - 2.0 * *min_lev / static_cast<double>(d)) * f_star;
            break;
        }
        case SketchKind::UniformWithReplacement: {
            if (!max_lev) throw MissingCoherence("bias_bound: uniform_with needs max_lev");
            b = (static_cast<double>(n) / static_cast<double>(m)) * *max_lev * f_star;
            break;
        }
        case SketchKind::UniformWithoutReplacement: {
            if (!max_lev) throw MissingCoherence("bias_bound: uniform_without needs max_lev");
            if (m > n)
                throw RegimeViolation("bias_bound: uniform_without needs m <= n");
            if (n < 2) throw RegimeViolation("bias_bound: uniform_without needs n >= 2");
            b = (static_cast<double>(n) / static_cast<double>(m)) *
                (static_cast<double>(n - m) / static_cast<double>(n - 1)) * *max_lev * f_star;
            break;
        }
        case SketchKind::LeverageScore:
            b = (static_cast<double>(d) / static_cast<double>(m)) * f_star;
            break;
        default:
            throw RegimeViolation(std::string("bias_bound: no bound for sketch kind '") +
                                  kind_name(kind) + "'");
    }
    return std::sqrt(4.0 * epsilon * std::max(0.0, b));
}

CoherenceStats coherence_stats(const Matrix& a) {
    Vector lev = leverage_scores(a);
    CoherenceStats cs;
    cs.max_lev = *std::max_element(lev.begin(), lev.end());
    cs.min_lev = *std::min_element(lev.begin(), lev.end());
    return cs;
}

}  // namespace sketchavg
