#include "sketchavg/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <limits>
#include <numeric>
#include <string>

#include "sketchavg/errors.hpp"
#include "sketchavg/kernels.hpp"
#include "sketchavg/linalg.hpp"
#include "sketchavg/rng.hpp"

namespace sketchavg {

namespace {

double now_seconds() {
    using clock = std::chrono::steady_clock;
    return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

void warn_below_regime(SolveMode mode, std::size_t m, std::size_t dim) {
    if (mode == SolveMode::Left && m <= dim + 1)
        std::fprintf(stderr,
                     "sketchavg: warning: sketch size m=%zu <= d+1=%zu; averaging theory "
                     "requires m > d+1\n",
                     m, dim + 1);
    if (mode == SolveMode::Right && m <= dim + 1)
        std::fprintf(stderr,
                     "sketchavg: warning: sketch size m=%zu <= n+1=%zu; averaging theory "
                     "requires m > n+1\n",
                     m, dim + 1);
}

WorkerOutput solve_one(SolveMode mode, const SketchSpec& spec, const Matrix& a, const Vector& b,
                       std::uint64_t seed, const Vector* lev, std::size_t max_retries) {
    const double t0 = now_seconds();
    std::uint64_t attempt_seed = seed;
    std::size_t retries = 0;
    for (;;) {
        try {
            Vector x;
            if (mode == SolveMode::Left) {
                SketchedProblem sp = apply_left(spec, a, b, attempt_seed, lev);
                x = lstsq_solve(sp.sa, sp.sb);
            } else {
                Matrix as = apply_right(spec, a, attempt_seed, lev);
                Vector z = minnorm_solve(as, b);
                x = apply_transpose(spec, a.cols(), z, attempt_seed, lev);
            }
            WorkerOutput out;
            out.x_hat = std::move(x);
            out.seed_used = seed;
            out.retries = retries;
            out.elapsed_seconds = now_seconds() - t0;
            return out;
        } catch (const RankDeficient&) {
            if (retries == max_retries)
                throw PersistentRankDeficiency(
                    "sketched problem stayed rank-deficient after " + std::to_string(retries) +
                    " resamples (m = " + std::to_string(spec.m) + ")");
            ++retries;
            attempt_seed = substream(seed, kTagRetry + retries);
        }
    }
}

struct Arrival {
    std::size_t index;  // 1-based
    double time;
};

std::vector<double> simulate_delays(const DelayModel& model, std::size_t q,
                                    std::uint64_t master_seed) {
    std::vector<double> delays(q, 0.0);
    switch (model.kind) {
        case DelayModel::Kind::None:
            break;
        case DelayModel::Kind::Exponential: {
            if (!(model.rate > 0.0)) throw InvalidSpec("delay model: rate must be positive");
            Rng rng(substream(master_seed, kTagDelay));
            for (std::size_t k = 0; k < q; ++k) delays[k] = rng.next_exponential(model.rate);
            break;
        }
        case DelayModel::Kind::FixedList:
            if (model.delays.size() < q)
                throw InvalidSpec("delay model: need at least " + std::to_string(q) +
                                  " fixed delays, got " + std::to_string(model.delays.size()));
            std::copy_n(model.delays.begin(), q, delays.begin());
            break;
    }
    return delays;
}

}  // namespace

const char* mode_name(SolveMode m) { return m == SolveMode::Left ? "left" : "right"; }

SolveMode mode_from_name(const std::string& name) {
    if (name == "left") return SolveMode::Left;
    if (name == "right") return SolveMode::Right;
    throw InvalidSpec("unknown solve mode '" + name + "'");
}

bool operator==(const StragglerPolicy& a, const StragglerPolicy& b) {
    if (a.mode != b.mode) return false;
    switch (a.mode) {
        case StragglerPolicy::Mode::WaitAll: return true;
        case StragglerPolicy::Mode::FirstK: return a.k == b.k;
        case StragglerPolicy::Mode::Deadline: return a.seconds == b.seconds && a.min_k == b.min_k;
    }
    return false;
}

WorkerOutput worker_solve_left(const SketchSpec& spec, const Matrix& a, const Vector& b,
                               std::uint64_t seed, const Vector* lev, std::size_t max_retries) {
    if (a.rows() < a.cols())
        throw ShapeMismatch("worker_solve_left: A has fewer rows than columns");
    warn_below_regime(SolveMode::Left, spec.m, a.cols());
    return solve_one(SolveMode::Left, spec, a, b, seed, lev, max_retries);
}

WorkerOutput worker_solve_right(const SketchSpec& spec, const Matrix& a, const Vector& b,
                                std::uint64_t seed, const Vector* lev, std::size_t max_retries) {
    if (a.rows() > a.cols())
        throw ShapeMismatch("worker_solve_right: A has more rows than columns");
    warn_below_regime(SolveMode::Right, spec.m, a.rows());
    return solve_one(SolveMode::Right, spec, a, b, seed, lev, max_retries);
}

double relative_error(SolveMode mode, const Matrix& a, const Vector& x, const Vector& x_star,
                      double f_star) {
    if (x.size() != x_star.size())
        throw ShapeMismatch("relative_error: estimate and solution lengths differ");
    double num;
    if (mode == SolveMode::Left) {
        Vector diff(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) diff[i] = x[i] - x_star[i];
        num = squared_norm(matvec(a, diff));
    } else {
        NeumaierSum acc;
        for (std::size_t i = 0; i < x.size(); ++i) {
            double e = x[i] - x_star[i];
            acc.add(e * e);
        }
        num = acc.value();
    }
    if (f_star <= 0.0) return num == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    return num / f_star;
}

AveragedEstimate run_distributed(const Matrix& a, const Vector& b, const SketchSpec& spec,
                                 std::size_t q, std::uint64_t master_seed, SolveMode mode,
                                 const StragglerPolicy& policy, const DelayModel& delays,
                                 const RunOptions& opts, const Vector* lev) {
    if (q == 0) throw InvalidSpec("run_distributed: q must be >= 1");
    switch (policy.mode) {
        case StragglerPolicy::Mode::WaitAll:
            break;
        case StragglerPolicy::Mode::FirstK:
            if (policy.k < 1) throw PolicyUnsatisfiable("FirstK: k must be >= 1");
            if (policy.k > q)
                throw PolicyUnsatisfiable("FirstK: k = " + std::to_string(policy.k) +
                                          " exceeds q = " + std::to_string(q));
            break;
        case StragglerPolicy::Mode::Deadline:
            if (policy.min_k < 1) throw PolicyUnsatisfiable("Deadline: min_k must be >= 1");
            if (policy.min_k > q)
                throw PolicyUnsatisfiable("Deadline: min_k = " + std::to_string(policy.min_k) +
                                          " exceeds q = " + std::to_string(q));
            break;
    }
    warn_below_regime(mode, spec.m, mode == SolveMode::Left ? a.cols() : a.rows());

    std::vector<double> delay = simulate_delays(delays, q, master_seed);
    std::vector<WorkerOutput> outputs(q);
    std::exception_ptr failure = nullptr;
    const std::ptrdiff_t qq = static_cast<std::ptrdiff_t>(q);
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t kk = 0; kk < qq; ++kk) {
        const std::size_t k = static_cast<std::size_t>(kk) + 1;
        try {
            WorkerOutput out = solve_one(mode, spec, a, b, splitmix64(master_seed + k), lev,
                                         opts.max_retries);
            out.index = k;
            outputs[k - 1] = std::move(out);
        } catch (...) {
#pragma omp critical
            if (!failure) failure = std::current_exception();
        }
    }
    if (failure) std::rethrow_exception(failure);

    std::vector<Arrival> arrivals(q);
    for (std::size_t k = 0; k < q; ++k) {
        double t = delay[k];
        if (!opts.reproducible) t += outputs[k].elapsed_seconds;
        arrivals[k] = {k + 1, t};
    }
    auto by_arrival = [](const Arrival& x, const Arrival& y) {
        return x.time != y.time ? x.time < y.time : x.index < y.index;
    };

    std::vector<std::size_t> included;  // 1-based worker indices
    switch (policy.mode) {
        case StragglerPolicy::Mode::WaitAll:
            included.resize(q);
            std::iota(included.begin(), included.end(), std::size_t{1});
            break;
        case StragglerPolicy::Mode::FirstK: {
            std::vector<Arrival> sorted = arrivals;
            std::sort(sorted.begin(), sorted.end(), by_arrival);
            for (std::size_t i = 0; i < policy.k; ++i) included.push_back(sorted[i].index);
            break;
        }
        case StragglerPolicy::Mode::Deadline: {
            std::vector<Arrival> sorted = arrivals;
            std::sort(sorted.begin(), sorted.end(), by_arrival);
            for (const Arrival& ar : sorted)
                if (ar.time <= policy.seconds) included.push_back(ar.index);
            if (included.size() < policy.min_k)
                throw PolicyUnsatisfiable("Deadline: only " + std::to_string(included.size()) +
                                          " workers arrived within " +
                                          std::to_string(policy.seconds) + "s, need " +
                                          std::to_string(policy.min_k));
            break;
        }
    }
    if (opts.reproducible) std::sort(included.begin(), included.end());

    const std::size_t used = included.size();
    const std::size_t d = outputs[included[0] - 1].x_hat.size();
    AveragedEstimate est;
    est.q_used = used;
    for (std::size_t k = 0; k < q; ++k) est.total_retries += outputs[k].retries;
    for (std::size_t idx : included)
        est.wall_time_seconds = std::max(est.wall_time_seconds, arrivals[idx - 1].time);

    est.x_bar.assign(d, 0.0);
    {
        std::vector<NeumaierSum> acc(d);
        for (std::size_t idx : included) {
            const Vector& x = outputs[idx - 1].x_hat;
            for (std::size_t j = 0; j < d; ++j) acc[j].add(x[j]);
        }
        const double inv = 1.0 / static_cast<double>(used);
        for (std::size_t j = 0; j < d; ++j) est.x_bar[j] = acc[j].value() * inv;
    }

    if (opts.record_prefix_errors) {
        const Vector* xs = opts.x_star;
        Vector xs_local;
        if (!xs) {
            xs_local = mode == SolveMode::Left ? lstsq_solve(a, b) : minnorm_solve(a, b);
            xs = &xs_local;
        }
        double fs = opts.f_star;
        if (fs < 0.0)
            fs = mode == SolveMode::Left ? residual_cost(a, *xs, b) : squared_norm(*xs);
        std::vector<std::pair<std::size_t, double>> trace;
        trace.reserve(used);
        std::vector<NeumaierSum> acc(d);
        Vector mean(d);
        for (std::size_t j0 = 0; j0 < used; ++j0) {
            const Vector& x = outputs[included[j0] - 1].x_hat;
            for (std::size_t j = 0; j < d; ++j) acc[j].add(x[j]);
            const double inv = 1.0 / static_cast<double>(j0 + 1);
            for (std::size_t j = 0; j < d; ++j) mean[j] = acc[j].value() * inv;
            trace.emplace_back(j0 + 1, relative_error(mode, a, mean, *xs, fs));
        }
        est.prefix_errors = std::move(trace);
    }
    return est;
}

ErrorDecomposition decompose_error_mc(const Matrix& a, const Vector& b, const SketchSpec& spec,
                                      std::size_t q, std::size_t trials,
                                      std::uint64_t master_seed, const Vector* lev) {
    if (trials < 100) throw InvalidSpec("decompose_error_mc: trials must be >= 100");
    if (q == 0) throw InvalidSpec("decompose_error_mc: q must be >= 1");
    const std::size_t n = a.rows();
    Vector x_star = lstsq_solve(a, b);
    Vector ax_star = matvec(a, x_star);

    // Per trial: squared prediction error of the average, the summed squared
    // worker deviations, and the summed deviation vector.
    std::vector<double> total_t(trials), vsq_t(trials);
    std::vector<Vector> vsum_t(trials);
    std::exception_ptr failure = nullptr;
    const std::ptrdiff_t tt = static_cast<std::ptrdiff_t>(trials);
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t ti = 0; ti < tt; ++ti) {
        try {
            const std::size_t t = static_cast<std::size_t>(ti);
            const std::uint64_t trial_seed = substream(master_seed, kTagTrial + t);
            Vector vsum(n, 0.0);
            double vsq = 0.0;
            for (std::size_t k = 1; k <= q; ++k) {
                WorkerOutput w = solve_one(SolveMode::Left, spec, a, b,
                                           splitmix64(trial_seed + k), lev, 4);
                Vector ax = matvec(a, w.x_hat);
                for (std::size_t i = 0; i < n; ++i) {
                    double v = ax[i] - ax_star[i];
                    vsq += v * v;
                    vsum[i] += v;
                }
            }
            // A x_bar - A x* = vsum / q, so f(x_bar) - f* falls out directly.
            double tot = 0.0;
            for (double v : vsum) tot += v * v;
            total_t[t] = tot / (static_cast<double>(q) * static_cast<double>(q));
            vsq_t[t] = vsq;
            vsum_t[t] = std::move(vsum);
        } catch (...) {
#pragma omp critical
            if (!failure) failure = std::current_exception();
        }
    }
    if (failure) std::rethrow_exception(failure);

    ErrorDecomposition out;
    out.trials = trials;
    out.q = q;
    const double T = static_cast<double>(trials);
    const double N = T * static_cast<double>(q);
    const double bias_factor = static_cast<double>(q - 1) / static_cast<double>(q);

    {
        NeumaierSum s;
        for (double v : total_t) s.add(v);
        out.total = s.value() / T;
        double var = 0.0;
        for (double v : total_t) var += (v - out.total) * (v - out.total);
        out.total_se = trials > 1 ? std::sqrt(var / (T - 1.0) / T) : 0.0;
    }
    {
        NeumaierSum s;
        for (double v : vsq_t) s.add(v / static_cast<double>(q));  // per-trial mean ||v||^2
        double mean_vsq = s.value() / T;
        out.variance_term = mean_vsq / static_cast<double>(q);
        double var = 0.0;
        for (double v : vsq_t) {
            double x = v / static_cast<double>(q);
            var += (x - mean_vsq) * (x - mean_vsq);
        }
        double se_mean = trials > 1 ? std::sqrt(var / (T - 1.0) / T) : 0.0;
        out.variance_se = se_mean / static_cast<double>(q);
    }
    {
        Vector s(n, 0.0);
        double sumsq = 0.0;
        for (std::size_t t = 0; t < trials; ++t) {
            const Vector& v = vsum_t[t];
            for (std::size_t i = 0; i < n; ++i) s[i] += v[i];
            sumsq += vsq_t[t];
        }
        double snorm = squared_norm(s);
        out.bias_sq_term = bias_factor * (snorm / (N * N));
        out.bias_sq_unbiased = bias_factor * ((snorm - sumsq) / (N * (N - 1.0)));

        // Batch-mean standard error of the U-statistic.
        const std::size_t nbatch = std::min<std::size_t>(20, trials);
        std::vector<double> u(nbatch);
        for (std::size_t bi = 0; bi < nbatch; ++bi) {
            std::size_t lo = bi * trials / nbatch, hi = (bi + 1) * trials / nbatch;
            Vector sb(n, 0.0);
            double ssb = 0.0;
            for (std::size_t t = lo; t < hi; ++t) {
                for (std::size_t i = 0; i < n; ++i) sb[i] += vsum_t[t][i];
                ssb += vsq_t[t];
            }
            double nb = static_cast<double>(hi - lo) * static_cast<double>(q);
            u[bi] = (squared_norm(sb) - ssb) / (nb * (nb - 1.0));
        }
        double umean = 0.0;
        for (double v : u) umean += v;
        umean /= static_cast<double>(nbatch);
        double uvar = 0.0;
        for (double v : u) uvar += (v - umean) * (v - umean);
        double use = nbatch > 1 ? std::sqrt(uvar / (static_cast<double>(nbatch) - 1.0) /
                                            static_cast<double>(nbatch))
                                : 0.0;
        out.bias_sq_se = bias_factor * use;
    }
    return out;
}

}  // namespace sketchavg
