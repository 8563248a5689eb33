#include <cmath>
#include <optional>
#include <vector>

#include "doctest.h"
#include "sketchavg/errors.hpp"
#include "sketchavg/kernels.hpp"
#include "sketchavg/linalg.hpp"
#include "sketchavg/sketch.hpp"
#include "sketchavg/solver.hpp"
#include "sketchavg/theory.hpp"
#include "support.hpp"

using namespace sketchavg;

TEST_SUITE("theory") {

TEST_CASE("left-sketch error rate matches hand-computed values") {
    CHECK(gaussian_left_error(10, 21, 1) == 1.0);
    CHECK(gaussian_left_error(10, 50, 1) == doctest::Approx(10.0 / 39.0).epsilon(1e-15));
    CHECK(gaussian_left_error(10, 50, 4) ==
          doctest::Approx(10.0 / 39.0 / 4.0).epsilon(1e-15));
    CHECK(gaussian_left_error(1, 4, 1) == 0.5);
}

TEST_CASE("left-sketch rate enforces its regime") {
    CHECK_THROWS_AS(gaussian_left_error(10, 11, 1), RegimeViolation);
    CHECK_THROWS_AS(gaussian_left_error(10, 10, 1), RegimeViolation);
    CHECK_NOTHROW(gaussian_left_error(10, 12, 1));
    CHECK_THROWS_AS(gaussian_left_error(0, 12, 1), RegimeViolation);
    CHECK_THROWS_AS(gaussian_left_error(10, 50, 0), RegimeViolation);
}

TEST_CASE("right-sketch error rate matches hand-computed values") {
    CHECK(gaussian_right_error(50, 1000, 200, 1) ==
          doctest::Approx(6.375838926174497).epsilon(1e-15));
    CHECK(gaussian_right_error(2000, 11588, 4000, 10) ==
          doctest::Approx(0.479639819909955).epsilon(1e-15));
    CHECK_THROWS_AS(gaussian_right_error(50, 50, 200, 1), RegimeViolation);
    CHECK_THROWS_AS(gaussian_right_error(50, 40, 200, 1), RegimeViolation);
    CHECK_THROWS_AS(gaussian_right_error(50, 1000, 51, 1), RegimeViolation);
    CHECK_THROWS_AS(gaussian_right_error(50, 1000, 200, 0), RegimeViolation);
}

TEST_CASE("success probability bound is clamped and frozen") {
    CHECK(gaussian_left_prob_bound(10, 50, 3, 1.0, 0.1) ==
          doctest::Approx(0.728659988046195).epsilon(1e-14));
    // rate/epsilon > 1 drives the bound negative; it must clamp to zero
    CHECK(gaussian_left_prob_bound(10, 50, 3, 0.2, 0.1) == 0.0);
    CHECK_THROWS_AS(gaussian_left_prob_bound(10, 11, 1, 1.0, 0.1), RegimeViolation);
    CHECK_THROWS_AS(gaussian_left_prob_bound(10, 50, 1, 0.0, 0.1), RegimeViolation);
    CHECK_THROWS_AS(gaussian_left_prob_bound(10, 50, 1, 1.0, 0.0), RegimeViolation);
    CHECK_THROWS_AS(gaussian_left_prob_bound(10, 50, 0, 1.0, 0.1), RegimeViolation);
}

TEST_CASE("rates move the right way with m, q, and d") {
    for (std::size_t m = 13; m < 60; ++m)
        CHECK(gaussian_left_error(10, m + 1, 2) < gaussian_left_error(10, m, 2));
    for (std::size_t q = 1; q < 20; ++q)
        CHECK(gaussian_left_error(10, 50, q + 1) < gaussian_left_error(10, 50, q));
    for (std::size_t d = 1; d < 30; ++d)
        CHECK(gaussian_left_error(d, 80, 1) < gaussian_left_error(d + 1, 80, 1));
    for (std::size_t m = 52; m < 90; ++m)
        CHECK(gaussian_right_error(50, 200, m + 1, 1) < gaussian_right_error(50, 200, m, 1));
    // the probability bound improves with larger m and decays with q
    for (std::size_t m = 20; m < 60; m += 5)
        CHECK(gaussian_left_prob_bound(10, m + 5, 2, 2.0, 0.5) >=
              gaussian_left_prob_bound(10, m, 2, 2.0, 0.5));
    for (std::size_t q = 1; q < 6; ++q)
        CHECK(gaussian_left_prob_bound(10, 50, q + 1, 2.0, 0.01) <=
              gaussian_left_prob_bound(10, 50, q, 2.0, 0.01));
}

TEST_CASE("bias bounds match hand-computed values") {
    CHECK(bias_bound(SketchKind::LeverageScore, 100, 41, 100, 1.0, 0.1) ==
          doctest::Approx(0.4049691346263318).epsilon(1e-14));
    CHECK(bias_bound(SketchKind::UniformWithReplacement, 100, 3, 20, 2.0, 0.05, 0.3) ==
          doctest::Approx(0.7745966692414834).epsilon(1e-14));
    CHECK(bias_bound(SketchKind::Ros, 64, 8, 32, 4.0, 0.1, std::nullopt, 0.5) ==
          doctest::Approx(0.5916079783099616).epsilon(1e-14));
    // sampling everything without replacement has no bias at all
    CHECK(bias_bound(SketchKind::UniformWithoutReplacement, 16, 3, 16, 5.0, 0.2, 0.9) == 0.0);
    // a negative inner bound clamps to zero rather than going imaginary
    CHECK(bias_bound(SketchKind::Ros, 64, 4, 32, 4.0, 0.1, std::nullopt, 2.5) == 0.0);
}

TEST_CASE("without-replacement bias never exceeds with-replacement") {
    const std::size_t n = 24, d = 4;
    for (std::size_t m = 2; m <= n; ++m) {
        double with = bias_bound(SketchKind::UniformWithReplacement, n, d, m, 3.0, 0.2, 0.7);
        double without =
            bias_bound(SketchKind::UniformWithoutReplacement, n, d, m, 3.0, 0.2, 0.7);
        CHECK(without <= with);
    }
}

TEST_CASE("bias bound rejects bad inputs") {
    CHECK_THROWS_AS(bias_bound(SketchKind::UniformWithReplacement, 10, 2, 5, 1.0, 0.1),
                    MissingCoherence);
    CHECK_THROWS_AS(bias_bound(SketchKind::UniformWithoutReplacement, 10, 2, 5, 1.0, 0.1),
                    MissingCoherence);
    CHECK_THROWS_AS(bias_bound(SketchKind::Ros, 10, 2, 5, 1.0, 0.1), MissingCoherence);
    CHECK_THROWS_AS(bias_bound(SketchKind::Gaussian, 10, 2, 5, 1.0, 0.1), RegimeViolation);
    CHECK_THROWS_AS(bias_bound(SketchKind::Sjlt, 10, 2, 5, 1.0, 0.1), RegimeViolation);
    CHECK_THROWS_AS(bias_bound(SketchKind::LeverageScore, 10, 2, 5, 1.0, 0.0), RegimeViolation);
    CHECK_THROWS_AS(bias_bound(SketchKind::LeverageScore, 10, 2, 5, 1.0, 1.0), RegimeViolation);
    CHECK_THROWS_AS(bias_bound(SketchKind::LeverageScore, 10, 2, 5, -1.0, 0.1), RegimeViolation);
    CHECK_THROWS_AS(
        bias_bound(SketchKind::UniformWithoutReplacement, 10, 2, 11, 1.0, 0.1, 0.5),
        RegimeViolation);
}

TEST_CASE("coherence stats summarize the leverage profile") {
    Matrix spiky = Matrix::from_data(3, 2, {1.0, 0.0, 0.0, 1.0, 0.0, 0.0});
    CoherenceStats cs = coherence_stats(spiky);
    CHECK(cs.max_lev == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(cs.min_lev == doctest::Approx(0.0).epsilon(1e-12));

    // Four columns of an orthogonal design spread leverage evenly: d/n each.
    Matrix h8 = oracle::hadamard(8);
    Matrix flat(8, 4);
    for (std::size_t i = 0; i < 8; ++i)
        for (std::size_t j = 0; j < 4; ++j) flat(i, j) = h8(i, j);
    cs = coherence_stats(flat);
    CHECK(cs.max_lev == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(cs.min_lev == doctest::Approx(0.5).epsilon(1e-12));

    Matrix a = oracle::test_matrix(20, 4, 11);
    Vector direct = oracle::leverage_direct(a);
    cs = coherence_stats(a);
    double mx = 0.0, mn = 1.0;
    for (double l : direct) {
        mx = std::max(mx, l);
        mn = std::min(mn, l);
    }
    CHECK(cs.max_lev == doctest::Approx(mx).epsilon(1e-9));
    CHECK(cs.min_lev == doctest::Approx(mn).epsilon(1e-9));
}

TEST_CASE("monte carlo agrees with the predicted curve across q") {
    const std::size_t n = 200, d = 10, m = 50;
    Matrix a = oracle::test_matrix(n, d, 2101);
    Vector b = oracle::test_vector(n, 2102);
    Vector x_star = lstsq_solve(a, b);
    double f_star = residual_cost(a, x_star, b);
    SketchSpec spec = SketchSpec::gaussian(m);
    for (std::size_t q : {std::size_t{1}, std::size_t{4}, std::size_t{16}}) {
        const std::size_t reps = 300;
        NeumaierSum sum, sumsq;
        for (std::size_t t = 0; t < reps; ++t) {
            AveragedEstimate est =
                run_distributed(a, b, spec, q, 80000 + 1000 * q + t, SolveMode::Left);
            double r = relative_error(SolveMode::Left, a, est.x_bar, x_star, f_star);
            sum.add(r);
            sumsq.add(r * r);
        }
        const double T = static_cast<double>(reps);
        double mean = sum.value() / T;
        double se = std::sqrt((sumsq.value() / T - mean * mean) / (T - 1.0));
        double predicted = gaussian_left_error(d, m, q);
        CAPTURE(q);
        CHECK(std::abs(mean - predicted) < std::max(0.10 * predicted, 4.0 * se));
    }
}

TEST_CASE("measured bias sits below the bound at the measured distortion") {
    // Estimate the spectral deviation eps of Q = U^T S^T S U empirically,
    // then check the observed prediction bias against the certified bound.
    const std::size_t n = 32, d = 3, m = 16;
    Matrix a = oracle::test_matrix(n, d, 2201);
    Vector b = oracle::test_vector(n, 2202);
    Vector x_star = lstsq_solve(a, b);
    double f_star = residual_cost(a, x_star, b);
    Vector ax_star = matvec(a, x_star);
    Vector lev = leverage_scores(a);
    Matrix u = oracle::orthonormal_basis(a);
    SketchSpec spec = SketchSpec::leverage(m);

    const std::size_t reps = 200;
    double eps_hat = 0.0;
    Vector mean_dev(n, 0.0);
    Matrix dev(reps, n);
    for (std::size_t t = 0; t < reps; ++t) {
        const std::uint64_t seed = 91000 + t;
        Matrix s = materialize(spec, n, seed, &lev);
        Matrix su = matmul(s, u);
        Matrix qmat(d, d);
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < d; ++j)
                for (std::size_t l = 0; l < d; ++l) qmat(j, l) += su(i, j) * su(i, l);
        for (double ev : symmetric_eigenvalues(qmat))
            eps_hat = std::max(eps_hat, std::abs(ev - 1.0));
        WorkerOutput w = worker_solve_left(spec, a, b, seed, &lev);
        Vector ax = matvec(a, w.x_hat);
        for (std::size_t i = 0; i < n; ++i) {
            dev(t, i) = ax[i] - ax_star[i];
            mean_dev[i] += ax[i] - ax_star[i];
        }
    }
    REQUIRE(eps_hat < 1.0);
    for (double& v : mean_dev) v /= static_cast<double>(reps);
    double bias_norm = std::sqrt(squared_norm(mean_dev));
    double se_sq = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double var = 0.0;
        for (std::size_t t = 0; t < reps; ++t)
            var += (dev(t, i) - mean_dev[i]) * (dev(t, i) - mean_dev[i]);
        se_sq += var / (static_cast<double>(reps) - 1.0) / static_cast<double>(reps);
    }
    double bound = bias_bound(SketchKind::LeverageScore, n, d, m, f_star, eps_hat);
    CHECK(bias_norm <= bound + 3.0 * std::sqrt(se_sq));
}

}  // TEST_SUITE
