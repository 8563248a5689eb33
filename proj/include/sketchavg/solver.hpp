#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "sketchavg/sketch.hpp"
#include "sketchavg/types.hpp"

namespace sketchavg {

enum class SolveMode { Left, Right };

const char* mode_name(SolveMode m);
SolveMode mode_from_name(const std::string& name);

struct WorkerOutput {
    std::size_t index = 0;  // 1-based worker number within a run
    Vector x_hat;
    std::uint64_t seed_used = 0;
    std::size_t retries = 0;
    double elapsed_seconds = 0.0;
};

struct StragglerPolicy {
    enum class Mode { WaitAll, FirstK, Deadline };
    Mode mode = Mode::WaitAll;
    std::size_t k = 0;        // FirstK
    double seconds = 0.0;     // Deadline
    std::size_t min_k = 1;    // Deadline

    static StragglerPolicy wait_all() { return {}; }
    static StragglerPolicy first_k(std::size_t k) {
        StragglerPolicy p;
        p.mode = Mode::FirstK;
        p.k = k;
        return p;
    }
    static StragglerPolicy deadline(double seconds, std::size_t min_k) {
        StragglerPolicy p;
        p.mode = Mode::Deadline;
        p.seconds = seconds;
        p.min_k = min_k;
        return p;
    }
};

bool operator==(const StragglerPolicy& a, const StragglerPolicy& b);

// Simulated per-worker delays for straggler experiments; no real sleeping.
struct DelayModel {
    enum class Kind { None, Exponential, FixedList };
    Kind kind = Kind::None;
    double rate = 1.0;            // Exponential
    std::vector<double> delays;   // FixedList, one entry per worker

    static DelayModel none() { return {}; }
    static DelayModel exponential(double rate) {
        DelayModel d;
        d.kind = Kind::Exponential;
        d.rate = rate;
        return d;
    }
    static DelayModel fixed(std::vector<double> delays) {
        DelayModel d;
        d.kind = Kind::FixedList;
        d.delays = std::move(delays);
        return d;
    }
};

struct RunOptions {
    // Reproducible mode averages in worker-index order and uses simulated
    // arrival times only; live mode orders by arrival and adds measured
    // compute time to the simulated delay.
    bool reproducible = true;
    bool record_prefix_errors = false;
    std::size_t max_retries = 4;
    // Optional exact solution, to avoid recomputing when recording prefix
    // errors. f_star < 0 means "compute it".
    const Vector* x_star = nullptr;
    double f_star = -1.0;
};

struct AveragedEstimate {
    Vector x_bar;
    std::size_t q_used = 0;
    std::size_t total_retries = 0;
    // Arrival time of the last worker the average waited for: simulated delay
    // only in reproducible mode, plus measured compute time in live mode.
    double wall_time_seconds = 0.0;
    std::optional<std::vector<std::pair<std::size_t, double>>> prefix_errors;
};

// One sketch-and-solve worker. Resamples with a fresh derived seed on a
// rank-deficient sketch, up to max_retries times.
WorkerOutput worker_solve_left(const SketchSpec& spec, const Matrix& a, const Vector& b,
                               std::uint64_t seed, const Vector* lev = nullptr,
                               std::size_t max_retries = 4);

// Right-sketch worker for underdetermined systems: solves the minimum-norm
// problem on A S^T and lifts back with the same draw, x_hat = S^T z_hat.
WorkerOutput worker_solve_right(const SketchSpec& spec, const Matrix& a, const Vector& b,
                                std::uint64_t seed, const Vector* lev = nullptr,
                                std::size_t max_retries = 4);

// q workers, seeds splitmix64(master_seed + k), averaged per policy.
AveragedEstimate run_distributed(const Matrix& a, const Vector& b, const SketchSpec& spec,
                                 std::size_t q, std::uint64_t master_seed, SolveMode mode,
                                 const StragglerPolicy& policy = StragglerPolicy::wait_all(),
                                 const DelayModel& delays = DelayModel::none(),
                                 const RunOptions& opts = {}, const Vector* lev = nullptr);

// Relative error of an estimate against the exact solution:
// left: ||A(x - x*)||^2 / f*, which equals (f(x) - f*)/f* by the normal
// equations; right: ||x - x*||^2 / f* with f* = ||x*||^2.
double relative_error(SolveMode mode, const Matrix& a, const Vector& x, const Vector& x_star,
                      double f_star);

struct ErrorDecomposition {
    double total = 0.0;          // mean of f(x_bar) - f* across trials
    double variance_term = 0.0;  // (1/q) E ||A x_hat - A x*||^2
    double bias_sq_term = 0.0;   // ((q-1)/q) ||mean(A x_hat) - A x*||^2
    double total_se = 0.0;
    double variance_se = 0.0;
    // Unbiased (U-statistic) estimate of the bias term and its batch
    // standard error; can dip below zero when the true bias is null.
    double bias_sq_unbiased = 0.0;
    double bias_sq_se = 0.0;
    std::size_t trials = 0;
    std::size_t q = 0;
};

// Monte-Carlo split of the averaged error into variance and squared-bias
// contributions (left mode).
ErrorDecomposition decompose_error_mc(const Matrix& a, const Vector& b, const SketchSpec& spec,
                                      std::size_t q, std::size_t trials,
                                      std::uint64_t master_seed, const Vector* lev = nullptr);

}  // namespace sketchavg
