#include "sketchavg/privacy.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sketchavg/errors.hpp"
#include "sketchavg/kernels.hpp"
#include "sketchavg/linalg.hpp"

namespace sketchavg {

namespace {

const double kBetaFloor = 1.0 + std::log(4.0);

void validate(const PrivacyParams& p) {
    if (p.n < 1 || p.d < 1) throw InvalidSpec("privacy: n and d must be >= 1");
    if (!(p.b0 > 0.0)) throw InvalidSpec("privacy: b0 must be > 0");
    if (!(p.sigma0 > 0.0)) throw InvalidSpec("privacy: sigma0 must be > 0");
    if (!(p.eps > 0.0)) throw InvalidSpec("privacy: eps must be > 0");
    if (p.q < 1) throw InvalidSpec("privacy: q must be >= 1");
    if (!(p.beta > kBetaFloor))
        throw InvalidBeta("privacy: beta must exceed 1 + ln 4 = " + std::to_string(kBetaFloor));
}

}  // namespace

double delta_of(double beta) {
    if (!(beta > kBetaFloor))
        throw InvalidBeta("delta_of: beta must exceed 1 + ln 4 = " + std::to_string(kBetaFloor));
    return 4.0 * std::exp(-beta);
}

bool check_condition(const PrivacyParams& p) {
    validate(p);
    // n/d >= (3 + 2 beta/eps) b0^2/sigma0^2, in multiplied-out form.
    return static_cast<double>(p.n) * p.sigma0 * p.sigma0 >=
           (3.0 + 2.0 * p.beta / p.eps) * p.b0 * p.b0 * static_cast<double>(p.d);
}

std::size_t max_private_sketch_size(const PrivacyParams& p) {
    if (!check_condition(p))
        throw ConditionUnsatisfied(
            "privacy: n/d >= (3 + 2 beta/eps) b0^2/sigma0^2 fails (n = " + std::to_string(p.n) +
            ", d = " + std::to_string(p.d) + ")");
    const double sigma_sq = p.sigma0 * p.sigma0 * static_cast<double>(p.n);
    const double b_sq = p.b0 * p.b0 * static_cast<double>(p.d);
    const double t =
        (sigma_sq / b_sq - 1.0) * (p.eps * p.beta / (p.eps + p.beta)) - 2.0 * p.beta;
    double bound = t > 0.0 ? t * t / (8.0 * p.beta) : 0.0;
    double per_worker = std::floor(bound / static_cast<double>(p.q));
    if (per_worker <= static_cast<double>(p.d + 1))
        throw SketchTooSmall("privacy: admissible sketch size " +
                                 std::to_string(static_cast<long long>(per_worker)) +
                                 " does not exceed d+1 = " + std::to_string(p.d + 1),
                             static_cast<std::size_t>(std::max(0.0, per_worker)), p.d + 2);
    return static_cast<std::size_t>(per_worker);
}

double theorem3_w(double b, double m, double eps, double delta) {
    if (!(b > 0.0)) throw InvalidSpec("theorem3_w: b must be > 0");
    if (!(m > 0.0)) throw InvalidSpec("theorem3_w: m must be > 0");
    if (!(eps > 0.0)) throw InvalidSpec("theorem3_w: eps must be > 0");
    if (!(delta > 0.0) || !(delta < std::exp(-1.0)))
        throw InvalidDelta("theorem3_w: delta must lie in (0, 1/e)");
    const double l = std::log(4.0 / delta);
    const double w_sq =
        b * b * (1.0 + ((1.0 + eps / l) / eps) * (2.0 * std::sqrt(2.0 * m * l) + 2.0 * l));
    return std::sqrt(w_sq);
}

PrivacyParams params_from_matrix(const Matrix& a, const Vector* b, bool right_mode, double eps,
                                 double beta, std::size_t q) {
    Matrix m(0, 0);
    if (right_mode) {
        m = a.transposed();
    } else {
        if (!b) throw InvalidSpec("privacy: left mode needs the target vector b to form [A, b]");
        if (b->size() != a.rows())
            throw ShapeMismatch("privacy: A and b row counts differ");
        m = Matrix(a.rows(), a.cols() + 1);
        for (std::size_t i = 0; i < a.rows(); ++i) {
            const double* src = a.row(i);
            double* dst = m.row(i);
            for (std::size_t j = 0; j < a.cols(); ++j) dst[j] = src[j];
            dst[a.cols()] = (*b)[i];
        }
    }
    PrivacyParams p;
    p.n = m.rows();
    p.d = right_mode ? m.cols() : a.cols();
    p.eps = eps;
    p.beta = beta;
    p.q = q;
    double b0 = 0.0;
    for (double v : m.data()) b0 = std::max(b0, std::abs(v));
    p.b0 = b0;
    Matrix gram = matmul(m.transposed(), m);
    for (double& v : gram.data()) v /= static_cast<double>(m.rows());
    Vector eig = symmetric_eigenvalues(gram);
    p.sigma0 = std::sqrt(std::max(0.0, eig.empty() ? 0.0 : eig.front()));
    return p;
}

}  // namespace sketchavg
