#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "sketchavg/errors.hpp"
#include "sketchavg/experiment.hpp"
#include "sketchavg/generator.hpp"
#include "sketchavg/io.hpp"
#include "sketchavg/linalg.hpp"
#include "sketchavg/privacy.hpp"
#include "sketchavg/sketch.hpp"
#include "sketchavg/solver.hpp"
#include "sketchavg/theory.hpp"
#include "sketchavg/threads.hpp"

namespace {

using namespace sketchavg;

const std::vector<std::string> kAllKinds = {"gaussian",        "ros",      "uniform_with",
                                            "uniform_without", "leverage", "sjlt",
                                            "hybrid"};
const std::vector<std::string> kInnerKinds = {"gaussian", "ros", "uniform_with",
                                              "uniform_without", "sjlt"};
const std::vector<std::string> kBoundKinds = {"gaussian", "ros", "uniform_with",
                                              "uniform_without", "leverage"};

struct SketchFlags {
    std::string kind = "gaussian";
    std::size_t m = 0;
    std::size_t s = 0;
    std::size_t m_prime = 0;
    std::string inner_kind;
    std::size_t inner_s = 0;
};

void add_sketch_flags(CLI::App* cmd, SketchFlags& f) {
    cmd->add_option("--kind", f.kind, "Sketch kind")
        ->required()
        ->check(CLI::IsMember(kAllKinds));
    cmd->add_option("--m", f.m, "Sketch size (rows of S)")->required();
    cmd->add_option("--s", f.s, "SJLT nonzeros per column");
    cmd->add_option("--m-prime", f.m_prime, "Hybrid intermediate sample size");
    cmd->add_option("--inner-kind", f.inner_kind, "Hybrid second-stage kind")
        ->check(CLI::IsMember(kInnerKinds));
    cmd->add_option("--inner-s", f.inner_s, "Hybrid second-stage SJLT nonzeros");
}

SketchSpec make_spec(const std::string& kind, std::size_t m, std::size_t s) {
    switch (kind_from_name(kind)) {
        case SketchKind::Gaussian: return SketchSpec::gaussian(m);
        case SketchKind::Ros: return SketchSpec::ros(m);
        case SketchKind::UniformWithReplacement: return SketchSpec::uniform_with(m);
        case SketchKind::UniformWithoutReplacement: return SketchSpec::uniform_without(m);
        case SketchKind::LeverageScore: return SketchSpec::leverage(m);
        case SketchKind::Sjlt: return SketchSpec::sjlt(m, s);
        case SketchKind::Hybrid: break;
    }
    throw InvalidSpec("hybrid sketches need --m-prime and --inner-kind");
}

SketchSpec spec_from_flags(const SketchFlags& f) {
    if (f.kind == "hybrid") {
        if (f.inner_kind.empty())
            throw CLI::ValidationError("--inner-kind", "required with --kind hybrid");
        if (f.m_prime == 0)
            throw CLI::ValidationError("--m-prime", "required with --kind hybrid");
        return SketchSpec::hybrid(f.m, f.m_prime, make_spec(f.inner_kind, f.m, f.inner_s));
    }
    return make_spec(f.kind, f.m, f.s);
}

std::string opt_field(const std::optional<double>& v) {
    return v ? format_double(*v) : std::string();
}

// ===== gendata =====

struct GendataArgs {
    GeneratorSpec gspec;
    std::string dist = "gaussian";
    std::uint64_t seed = 0;
    std::string a_path, b_path, x_path;
};

void setup_gendata(CLI::App& app, GendataArgs& args) {
    CLI::App* cmd = app.add_subcommand("gendata", "Generate a synthetic problem to files");
    cmd->add_option("--n", args.gspec.n, "Rows of A")->required();
    cmd->add_option("--d", args.gspec.d, "Columns of A")->required();
    cmd->add_option("--dist", args.dist, "Entry distribution")
        ->check(CLI::IsMember({"gaussian", "student_t"}));
    cmd->add_option("--df", args.gspec.df, "Degrees of freedom for student_t (> 1)");
    cmd->add_option("--noise-std", args.gspec.noise_std, "Noise level for planted b");
    cmd->add_flag("--planted,!--no-planted", args.gspec.planted,
                  "Plant b = A x_truth + noise (default) or draw b at random");
    cmd->add_option("--seed", args.seed, "Master seed");
    cmd->add_option("--a", args.a_path, "Output path for A (.csv or binary)")->required();
    cmd->add_option("--b", args.b_path, "Output path for b")->required();
    cmd->add_option("--x-truth", args.x_path, "Optional output path for the planted solution");
    cmd->callback([&args] {
        if (args.dist == "student_t" && !(args.gspec.df > 1.0))
            throw CLI::ValidationError("--df", "student_t needs --df > 1");
        if (args.dist == "gaussian" && args.gspec.df != 0.0)
            throw CLI::ValidationError("--df", "only applies to --dist student_t");
        args.gspec.distribution = args.dist == "gaussian" ? GeneratorSpec::Dist::Gaussian
                                                          : GeneratorSpec::Dist::StudentT;
        GeneratedProblem p = generate(args.gspec, args.seed);
        write_matrix(args.a_path, p.a);
        write_vector(args.b_path, p.b);
        std::cout << "a," << args.a_path << '\n' << "b," << args.b_path << '\n';
        if (!args.x_path.empty()) {
            if (!p.x_truth) throw InvalidSpec("--x-truth needs a planted problem");
            write_vector(args.x_path, *p.x_truth);
            std::cout << "x_truth," << args.x_path << '\n';
        }
    });
}

// ===== solve =====

struct SolveArgs {
    std::string a_path, b_path, out_path, mode = "left", policy = "wait_all";
    SketchFlags sketch;
    std::size_t q = 1;
    std::uint64_t seed = 0;
    std::size_t k = 0;
    double deadline_seconds = 0.0;
    std::size_t min_k = 1;
    std::size_t max_retries = 4;
    double delay_rate = 0.0;
};

void setup_solve(CLI::App& app, SolveArgs& args) {
    CLI::App* cmd = app.add_subcommand("solve", "One distributed sketch-and-average solve");
    cmd->add_option("--a", args.a_path, "Matrix file (CSV or binary)")->required();
    cmd->add_option("--b", args.b_path, "Right-hand-side file")->required();
    cmd->add_option("--mode", args.mode, "Sketch rows (left) or columns (right)")
        ->check(CLI::IsMember({"left", "right"}));
    add_sketch_flags(cmd, args.sketch);
    cmd->add_option("--q", args.q, "Number of averaged workers");
    cmd->add_option("--seed", args.seed, "Master seed");
    cmd->add_option("--policy", args.policy, "Straggler policy")
        ->check(CLI::IsMember({"wait_all", "first_k", "deadline"}));
    cmd->add_option("--k", args.k, "Workers to wait for under first_k");
    cmd->add_option("--deadline-seconds", args.deadline_seconds, "Cutoff under deadline");
    cmd->add_option("--min-k", args.min_k, "Minimum arrivals under deadline");
    cmd->add_option("--max-retries", args.max_retries, "Resample budget per worker");
    cmd->add_option("--delay-rate", args.delay_rate,
                    "Simulate exponential worker delays with this rate");
    cmd->add_option("--out", args.out_path, "Write x_bar to this file instead of stdout");
    cmd->callback([&args] {
        const SolveMode mode = mode_from_name(args.mode);
        const SketchSpec spec = spec_from_flags(args.sketch);
        StragglerPolicy policy = StragglerPolicy::wait_all();
        if (args.policy == "first_k") {
            if (args.k == 0) throw CLI::ValidationError("--k", "required with --policy first_k");
            policy = StragglerPolicy::first_k(args.k);
        } else if (args.policy == "deadline") {
            policy = StragglerPolicy::deadline(args.deadline_seconds, args.min_k);
        }
        const Matrix a = read_matrix(args.a_path);
        const Vector b = read_vector(args.b_path);

        std::optional<Vector> lev;
        if (spec.kind == SketchKind::LeverageScore)
            lev = mode == SolveMode::Left ? leverage_scores(a) : leverage_scores(a.transposed());

        ExactSolution sol = exact_solution_cached(mode, a, b, args.a_path);
        RunOptions opts;
        opts.max_retries = args.max_retries;
        opts.x_star = &sol.x_star;
        opts.f_star = sol.f_star;
        const DelayModel delays = args.delay_rate > 0.0 ? DelayModel::exponential(args.delay_rate)
                                                        : DelayModel::none();
        AveragedEstimate est = run_distributed(a, b, spec, args.q, args.seed, mode, policy,
                                               delays, opts, lev ? &*lev : nullptr);
        const double err = relative_error(mode, a, est.x_bar, sol.x_star, sol.f_star);
        std::cout << "relative_error," << format_double(err) << '\n'
                  << "q_used," << est.q_used << '\n'
                  << "retries," << est.total_retries << '\n'
                  << "wall_time," << format_double(est.wall_time_seconds) << '\n';
        if (!args.out_path.empty()) {
            write_vector(args.out_path, est.x_bar);
            std::cout << "x_bar_file," << args.out_path << '\n';
        } else {
            std::cout << "x_bar";
            for (double v : est.x_bar) std::cout << ',' << format_double(v);
            std::cout << '\n';
        }
    });
}

// ===== experiment =====

void setup_experiment(CLI::App& app, std::string& config_path) {
    CLI::App* cmd = app.add_subcommand("experiment", "Run a sweep from a JSON config");
    cmd->add_option("config", config_path, "Config file path")->required();
    cmd->callback([&config_path] {
        const ExperimentConfig config = load_config(config_path);
        ExperimentResult result = run_experiment(config);
        std::size_t failed = 0;
        for (const TrialRecord& r : result.records)
            if (!r.error.empty()) ++failed;
        std::cout << "data_csv," << config.outputs << '\n'
                  << "summary_csv," << summary_path_for(config.outputs) << '\n';
        if (config.record_prefix_errors)
            std::cout << "prefix_csv," << prefix_path_for(config.outputs) << '\n';
        std::cout << "records," << result.records.size() << '\n'
                  << "failed," << failed << '\n';
    });
}

// ===== predict =====

struct PredictArgs {
    std::string kind, mode = "left", from_matrix;
    std::size_t n = 0, d = 0, m = 0, q = 1;
    std::optional<double> epsilon, c1, f_star, max_lev, min_lev;
};

void setup_predict(CLI::App& app, PredictArgs& args) {
    CLI::App* cmd = app.add_subcommand(
        "predict", "Evaluate the closed-form error and bias predictions for one setup");
    cmd->add_option("--kind", args.kind, "Sketch kind")
        ->required()
        ->check(CLI::IsMember(kBoundKinds));
    cmd->add_option("--mode", args.mode, "left or right")
        ->check(CLI::IsMember({"left", "right"}));
    cmd->add_option("--n", args.n, "Rows of A");
    cmd->add_option("--d", args.d, "Columns of A");
    cmd->add_option("--m", args.m, "Sketch size")->required();
    cmd->add_option("--q", args.q, "Averaged workers");
    cmd->add_option("--epsilon", args.epsilon, "Deviation parameter for tail/bias bounds");
    cmd->add_option("--c1", args.c1, "Embedding-failure rate constant for the tail bound");
    cmd->add_option("--f-star", args.f_star, "Optimal cost f(x*)");
    cmd->add_option("--max-lev", args.max_lev, "Largest leverage score");
    cmd->add_option("--min-lev", args.min_lev, "Smallest leverage score");
    cmd->add_option("--from-matrix", args.from_matrix,
                    "Compute n, d and leverage extrema from this matrix file");
    cmd->callback([&args] {
        if (args.from_matrix.empty() && args.d == 0)
            throw CLI::ValidationError("--d", "required unless --from-matrix is given");
        const SolveMode mode = mode_from_name(args.mode);
        TheoryReport rep;
        rep.kind = args.kind;
        rep.mode = args.mode;
        rep.n = args.n;
        rep.d = args.d;
        rep.m = args.m;
        rep.q = args.q;
        rep.epsilon = args.epsilon;
        rep.c1 = args.c1;
        rep.f_star = args.f_star;
        rep.max_lev = args.max_lev;
        rep.min_lev = args.min_lev;
        if (!args.from_matrix.empty()) {
            const Matrix a = read_matrix(args.from_matrix);
            rep.n = a.rows();
            rep.d = a.cols();
            const CoherenceStats cs = coherence_stats(a);
            rep.max_lev = cs.max_lev;
            rep.min_lev = cs.min_lev;
        }

        const SketchKind kind = kind_from_name(args.kind);
        if (kind == SketchKind::Gaussian) {
            if (mode == SolveMode::Left) {
                rep.predicted_relative_error = gaussian_left_error(rep.d, rep.m, rep.q);
                if (rep.epsilon && rep.c1)
                    rep.prob_bound =
                        gaussian_left_prob_bound(rep.d, rep.m, rep.q, *rep.epsilon, *rep.c1);
            } else {
                if (rep.n == 0)
                    throw CLI::ValidationError("--n", "required for right-sketch predictions");
                rep.predicted_relative_error = gaussian_right_error(rep.n, rep.d, rep.m, rep.q);
            }
        } else {
            if (mode == SolveMode::Right)
                throw InvalidSpec("bias bounds are only available for left sketches");
            if (rep.epsilon && rep.f_star) {
                if ((kind == SketchKind::UniformWithReplacement ||
                     kind == SketchKind::UniformWithoutReplacement) &&
                    rep.n == 0)
                    throw CLI::ValidationError("--n", "required for uniform sketch bounds");
                rep.bias_bound = bias_bound(kind, rep.n, rep.d, rep.m, *rep.f_star, *rep.epsilon,
                                            rep.max_lev, rep.min_lev);
            }
        }

        std::cout << "kind,mode,n,d,m,q,epsilon,c1,f_star,max_lev,min_lev,"
                     "predicted_relative_error,prob_bound,bias_bound\n";
        std::cout << rep.kind << ',' << rep.mode << ',' << rep.n << ',' << rep.d << ',' << rep.m
                  << ',' << rep.q << ',' << opt_field(rep.epsilon) << ',' << opt_field(rep.c1)
                  << ',' << opt_field(rep.f_star) << ',' << opt_field(rep.max_lev) << ','
                  << opt_field(rep.min_lev) << ',' << opt_field(rep.predicted_relative_error)
                  << ',' << opt_field(rep.prob_bound) << ',' << opt_field(rep.bias_bound) << '\n';
    });
}

// ===== privacy-size =====

struct PrivacyArgs {
    std::string kind = "gaussian", mode = "left", from_matrix, b_path;
    std::size_t n = 0, d = 0, q = 1;
    double b0 = 0.0, sigma0 = 0.0, eps = 0.0, beta = 0.0;
};

void setup_privacy(CLI::App& app, PrivacyArgs& args) {
    CLI::App* cmd = app.add_subcommand(
        "privacy-size", "Largest sketch size that keeps published sketches private");
    cmd->add_option("--kind", args.kind, "Sketch kind (only gaussian is supported)")
        ->check(CLI::IsMember(kAllKinds));
    cmd->add_option("--n", args.n, "Rows of A");
    cmd->add_option("--d", args.d, "Columns of A");
    cmd->add_option("--b0", args.b0, "Entrywise bound on the concatenated matrix");
    cmd->add_option("--sigma0", args.sigma0, "Scaled smallest singular value");
    cmd->add_option("--eps", args.eps, "Privacy epsilon")->required();
    cmd->add_option("--beta", args.beta, "Sets delta = 4 exp(-beta); needs beta > 1 + ln 4")
        ->required();
    cmd->add_option("--q", args.q, "Workers publishing sketches");
    cmd->add_option("--mode", args.mode, "left (rows of [A, b]) or right (rows of A^T)")
        ->check(CLI::IsMember({"left", "right"}));
    cmd->add_option("--from-matrix", args.from_matrix, "Measure b0 and sigma0 from this file");
    cmd->add_option("--from-b", args.b_path, "Right-hand side to concatenate in left mode");
    cmd->callback([&args] {
        if (args.kind == "hybrid")
            throw InvalidSpec(
                "the hybrid sketch has no privacy guarantee; size its inner gaussian stage "
                "instead");
        if (args.kind != "gaussian")
            throw InvalidSpec("privacy sizing applies to gaussian sketches only");
        const bool right = args.mode == "right";

        PrivacyParams p;
        if (!args.from_matrix.empty()) {
            const Matrix a = read_matrix(args.from_matrix);
            std::optional<Vector> b;
            if (!args.b_path.empty()) b = read_vector(args.b_path);
            p = params_from_matrix(a, b ? &*b : nullptr, right, args.eps, args.beta, args.q);
        } else {
            if (args.n == 0 || args.d == 0)
                throw CLI::ValidationError("--n/--d", "required without --from-matrix");
            if (!(args.b0 > 0.0) || !(args.sigma0 > 0.0))
                throw CLI::ValidationError("--b0/--sigma0", "required without --from-matrix");
            p.n = right ? args.d : args.n;
            p.d = right ? args.n : args.d;
            p.b0 = args.b0;
            p.sigma0 = args.sigma0;
            p.eps = args.eps;
            p.beta = args.beta;
            p.q = args.q;
        }

        const double delta = delta_of(p.beta);
        const bool ok = check_condition(p);
        std::cout << "n,d,b0,sigma0,eps,beta,q,delta,condition,m\n";
        std::cout << p.n << ',' << p.d << ',' << format_double(p.b0) << ','
                  << format_double(p.sigma0) << ',' << format_double(p.eps) << ','
                  << format_double(p.beta) << ',' << p.q << ',' << format_double(delta) << ','
                  << (ok ? "true" : "false") << ',';
        if (ok) std::cout << max_private_sketch_size(p);
        std::cout << '\n';
    });
}

}  // namespace

int main(int argc, char** argv) {
    apply_thread_env();

    CLI::App app{"Distributed sketch-and-average solver for least-squares and minimum-norm "
                 "problems"};
    app.require_subcommand(1);

    GendataArgs gendata_args;
    SolveArgs solve_args;
    std::string experiment_config;
    PredictArgs predict_args;
    PrivacyArgs privacy_args;

    setup_gendata(app, gendata_args);
    setup_solve(app, solve_args);
    setup_experiment(app, experiment_config);
    setup_predict(app, predict_args);
    setup_privacy(app, privacy_args);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    } catch (const Error& e) {
        std::fprintf(stderr, "sketchavg: error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "sketchavg: unexpected error: %s\n", e.what());
        return 2;
    }
    return 0;
}
