#include "sketchavg/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "json.hpp"
#include "sketchavg/errors.hpp"
#include "sketchavg/io.hpp"
#include "sketchavg/linalg.hpp"
#include "sketchavg/rng.hpp"

namespace sketchavg {

using json = nlohmann::ordered_json;

// ===== Config equality =====

bool operator==(const DataFiles& x, const DataFiles& y) {
    return x.a_path == y.a_path && x.b_path == y.b_path;
}

bool operator==(const ProblemSpec& x, const ProblemSpec& y) {
    return x.mode == y.mode && x.generator == y.generator && x.files == y.files;
}

bool operator==(const ExperimentConfig& x, const ExperimentConfig& y) {
    return x.problem == y.problem && x.sketches == y.sketches && x.q_grid == y.q_grid &&
           x.trials == y.trials && x.master_seed == y.master_seed &&
           x.straggler == y.straggler && x.outputs == y.outputs &&
           x.record_prefix_errors == y.record_prefix_errors;
}

// ===== JSON parsing =====

namespace {

[[noreturn]] void bad(const std::string& msg) { throw InvalidConfig("config: " + msg); }

const json& need(const json& j, const char* key, const std::string& ctx) {
    auto it = j.find(key);
    if (it == j.end()) bad(ctx + ": missing field '" + key + "'");
    return *it;
}

void check_object(const json& j, std::initializer_list<const char*> allowed,
                  const std::string& ctx) {
    if (!j.is_object()) bad(ctx + ": expected an object");
    for (const auto& item : j.items()) {
        bool ok = false;
        for (const char* a : allowed)
            if (item.key() == a) ok = true;
        if (!ok) bad(ctx + ": unknown field '" + item.key() + "'");
    }
}

std::uint64_t get_u64(const json& j, const std::string& ctx) {
    if (j.is_number_unsigned()) return j.get<std::uint64_t>();
    if (j.is_number_integer() && j.get<std::int64_t>() >= 0)
        return static_cast<std::uint64_t>(j.get<std::int64_t>());
    bad(ctx + ": expected a non-negative integer");
}

std::size_t get_count(const json& j, const std::string& ctx) {
    return static_cast<std::size_t>(get_u64(j, ctx));
}

double get_real(const json& j, const std::string& ctx) {
    if (!j.is_number()) bad(ctx + ": expected a number");
    return j.get<double>();
}

bool get_bool(const json& j, const std::string& ctx) {
    if (!j.is_boolean()) bad(ctx + ": expected true or false");
    return j.get<bool>();
}

std::string get_string(const json& j, const std::string& ctx) {
    if (!j.is_string()) bad(ctx + ": expected a string");
    return j.get<std::string>();
}

SketchSpec parse_sketch(const json& j, const std::string& ctx) {
    if (!j.is_object()) bad(ctx + ": expected an object");
    SketchKind kind;
    try {
        kind = kind_from_name(get_string(need(j, "kind", ctx), ctx + ".kind"));
    } catch (const InvalidSpec& e) {
        bad(ctx + ": " + e.what());
    }
    const std::size_t m = get_count(need(j, "m", ctx), ctx + ".m");
    switch (kind) {
        case SketchKind::Gaussian:
            check_object(j, {"kind", "m"}, ctx);
            return SketchSpec::gaussian(m);
        case SketchKind::Ros:
            check_object(j, {"kind", "m"}, ctx);
            return SketchSpec::ros(m);
        case SketchKind::UniformWithReplacement:
            check_object(j, {"kind", "m"}, ctx);
            return SketchSpec::uniform_with(m);
        case SketchKind::UniformWithoutReplacement:
            check_object(j, {"kind", "m"}, ctx);
            return SketchSpec::uniform_without(m);
        case SketchKind::LeverageScore:
            check_object(j, {"kind", "m"}, ctx);
            return SketchSpec::leverage(m);
        case SketchKind::Sjlt:
            check_object(j, {"kind", "m", "s"}, ctx);
            return SketchSpec::sjlt(m, get_count(need(j, "s", ctx), ctx + ".s"));
        case SketchKind::Hybrid: {
            check_object(j, {"kind", "m", "m_prime", "inner"}, ctx);
            const std::size_t mp = get_count(need(j, "m_prime", ctx), ctx + ".m_prime");
            SketchSpec inner = parse_sketch(need(j, "inner", ctx), ctx + ".inner");
            return SketchSpec::hybrid(m, mp, std::move(inner));
        }
    }
    bad(ctx + ": unhandled sketch kind");
}

json sketch_to_json(const SketchSpec& s) {
    json j;
    j["kind"] = kind_name(s.kind);
    j["m"] = s.m;
    if (s.kind == SketchKind::Sjlt) j["s"] = s.s;
    if (s.kind == SketchKind::Hybrid) {
        j["m_prime"] = s.m_prime;
        j["inner"] = sketch_to_json(*s.inner);
    }
    return j;
}

GeneratorSpec parse_generator(const json& j, const std::string& ctx) {
    check_object(j, {"n", "d", "distribution", "df", "noise_std", "planted"}, ctx);
    GeneratorSpec g;
    g.n = get_count(need(j, "n", ctx), ctx + ".n");
    g.d = get_count(need(j, "d", ctx), ctx + ".d");
    const std::string dist = get_string(need(j, "distribution", ctx), ctx + ".distribution");
    if (dist == "gaussian") {
        g.distribution = GeneratorSpec::Dist::Gaussian;
        if (j.contains("df")) bad(ctx + ": 'df' only applies to student_t");
    } else if (dist == "student_t") {
        g.distribution = GeneratorSpec::Dist::StudentT;
        g.df = get_real(need(j, "df", ctx), ctx + ".df");
    } else {
        bad(ctx + ".distribution: expected 'gaussian' or 'student_t', got '" + dist + "'");
    }
    if (j.contains("noise_std")) g.noise_std = get_real(j["noise_std"], ctx + ".noise_std");
    if (j.contains("planted")) g.planted = get_bool(j["planted"], ctx + ".planted");
    return g;
}

StragglerPolicy parse_straggler(const json& j, const std::string& ctx) {
    const std::string mode = get_string(need(j, "mode", ctx), ctx + ".mode");
    if (mode == "wait_all") {
        check_object(j, {"mode"}, ctx);
        return StragglerPolicy::wait_all();
    }
    if (mode == "first_k") {
        check_object(j, {"mode", "k"}, ctx);
        return StragglerPolicy::first_k(get_count(need(j, "k", ctx), ctx + ".k"));
    }
    if (mode == "deadline") {
        check_object(j, {"mode", "seconds", "min_k"}, ctx);
        double seconds = get_real(need(j, "seconds", ctx), ctx + ".seconds");
        std::size_t min_k = 1;
        if (j.contains("min_k")) min_k = get_count(j["min_k"], ctx + ".min_k");
        return StragglerPolicy::deadline(seconds, min_k);
    }
    bad(ctx + ".mode: expected 'wait_all', 'first_k' or 'deadline', got '" + mode + "'");
}

}  // namespace

ExperimentConfig parse_config(const std::string& json_text) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::parse_error& e) {
        bad(std::string("not valid JSON: ") + e.what());
    }
    check_object(root,
                 {"problem", "sketches", "q_grid", "trials", "master_seed", "straggler",
                  "outputs", "record_prefix_errors"},
                 "config");

    ExperimentConfig c;

    const json& pj = need(root, "problem", "config");
    check_object(pj, {"mode", "generator", "files"}, "problem");
    try {
        c.problem.mode = mode_from_name(get_string(need(pj, "mode", "problem"), "problem.mode"));
    } catch (const InvalidSpec& e) {
        bad(std::string("problem: ") + e.what());
    }
    const bool has_gen = pj.contains("generator");
    const bool has_files = pj.contains("files");
    if (has_gen == has_files)
        bad("problem: provide exactly one of 'generator' and 'files'");
    if (has_gen) {
        c.problem.generator = parse_generator(pj["generator"], "problem.generator");
    } else {
        const json& fj = pj["files"];
        check_object(fj, {"a", "b"}, "problem.files");
        DataFiles f;
        f.a_path = get_string(need(fj, "a", "problem.files"), "problem.files.a");
        f.b_path = get_string(need(fj, "b", "problem.files"), "problem.files.b");
        c.problem.files = std::move(f);
    }

    const json& sj = need(root, "sketches", "config");
    if (!sj.is_array() || sj.empty()) bad("sketches: expected a nonempty array");
    for (std::size_t i = 0; i < sj.size(); ++i)
        c.sketches.push_back(parse_sketch(sj[i], "sketches[" + std::to_string(i) + "]"));

    const json& qj = need(root, "q_grid", "config");
    if (!qj.is_array() || qj.empty()) bad("q_grid: expected a nonempty array");
    for (std::size_t i = 0; i < qj.size(); ++i) {
        std::size_t q = get_count(qj[i], "q_grid[" + std::to_string(i) + "]");
        if (q < 1) bad("q_grid[" + std::to_string(i) + "]: must be >= 1");
        c.q_grid.push_back(q);
    }

    c.trials = get_count(need(root, "trials", "config"), "trials");
    if (c.trials < 1) bad("trials: must be >= 1");
    if (root.contains("master_seed")) c.master_seed = get_u64(root["master_seed"], "master_seed");
    if (root.contains("straggler")) c.straggler = parse_straggler(root["straggler"], "straggler");
    c.outputs = get_string(need(root, "outputs", "config"), "outputs");
    if (c.outputs.empty()) bad("outputs: must be a nonempty path");
    if (root.contains("record_prefix_errors"))
        c.record_prefix_errors = get_bool(root["record_prefix_errors"], "record_prefix_errors");
    return c;
}

std::string serialize_config(const ExperimentConfig& config) {
    json root;
    json pj;
    pj["mode"] = mode_name(config.problem.mode);
    if (config.problem.generator) {
        const GeneratorSpec& g = *config.problem.generator;
        json gj;
        gj["n"] = g.n;
        gj["d"] = g.d;
        if (g.distribution == GeneratorSpec::Dist::Gaussian) {
            gj["distribution"] = "gaussian";
        } else {
            gj["distribution"] = "student_t";
            gj["df"] = g.df;
        }
        gj["noise_std"] = g.noise_std;
        gj["planted"] = g.planted;
        pj["generator"] = std::move(gj);
    }
    if (config.problem.files) {
        json fj;
        fj["a"] = config.problem.files->a_path;
        fj["b"] = config.problem.files->b_path;
        pj["files"] = std::move(fj);
    }
    root["problem"] = std::move(pj);

    json sj = json::array();
    for (const SketchSpec& s : config.sketches) sj.push_back(sketch_to_json(s));
    root["sketches"] = std::move(sj);
    root["q_grid"] = config.q_grid;
    root["trials"] = config.trials;
    root["master_seed"] = config.master_seed;

    json stj;
    switch (config.straggler.mode) {
        case StragglerPolicy::Mode::WaitAll:
            stj["mode"] = "wait_all";
            break;
        case StragglerPolicy::Mode::FirstK:
            stj["mode"] = "first_k";
            stj["k"] = config.straggler.k;
            break;
        case StragglerPolicy::Mode::Deadline:
            stj["mode"] = "deadline";
            stj["seconds"] = config.straggler.seconds;
            stj["min_k"] = config.straggler.min_k;
            break;
    }
    root["straggler"] = std::move(stj);
    root["outputs"] = config.outputs;
    root["record_prefix_errors"] = config.record_prefix_errors;
    return root.dump(2) + "\n";
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

// ===== Output paths =====

namespace {

std::string derived_path(const std::string& outputs, const char* tag) {
    const std::string suffix = ".csv";
    if (outputs.size() > suffix.size() &&
        outputs.compare(outputs.size() - suffix.size(), suffix.size(), suffix) == 0)
        return outputs.substr(0, outputs.size() - suffix.size()) + tag + suffix;
    return outputs + tag + suffix;
}

}  // namespace

std::string summary_path_for(const std::string& outputs) {
    return derived_path(outputs, ".summary");
}

std::string prefix_path_for(const std::string& outputs) {
    return derived_path(outputs, ".prefix");
}

// ===== Exact solution cache =====

ExactSolution exact_solution(SolveMode mode, const Matrix& a, const Vector& b) {
    ExactSolution sol;
    if (mode == SolveMode::Left) {
        sol.x_star = lstsq_solve(a, b);
        sol.f_star = residual_cost(a, sol.x_star, b);
    } else {
        sol.x_star = minnorm_solve(a, b);
        sol.f_star = squared_norm(sol.x_star);
    }
    return sol;
}

namespace {

constexpr char kCacheMagic[4] = {'D', 'S', 'K', 'C'};

std::uint64_t fnv1a_init() { return 0xcbf29ce484222325ull; }

void fnv1a_bytes(std::uint64_t& h, const void* data, std::size_t len) {
    const unsigned char* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ull;
    }
}

std::uint64_t problem_hash(SolveMode mode, const Matrix& a, const Vector& b) {
    std::uint64_t h = fnv1a_init();
    const std::uint64_t tag[3] = {mode == SolveMode::Left ? 0ull : 1ull, a.rows(), a.cols()};
    fnv1a_bytes(h, tag, sizeof tag);
    fnv1a_bytes(h, a.data().data(), a.rows() * a.cols() * sizeof(double));
    fnv1a_bytes(h, b.data(), b.size() * sizeof(double));
    return h;
}

void put_u64(std::ostream& out, std::uint64_t v) {
    unsigned char buf[8];
    for (int i = 0; i < 8; ++i) buf[i] = static_cast<unsigned char>(v >> (8 * i));
    out.write(reinterpret_cast<const char*>(buf), 8);
}

bool get_u64(std::istream& in, std::uint64_t& v) {
    unsigned char buf[8];
    if (!in.read(reinterpret_cast<char*>(buf), 8)) return false;
    v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
    return true;
}

void put_f64(std::ostream& out, double d) {
    std::uint64_t v;
    std::memcpy(&v, &d, 8);
    put_u64(out, v);
}

bool get_f64(std::istream& in, double& d) {
    std::uint64_t v;
    if (!get_u64(in, v)) return false;
    std::memcpy(&d, &v, 8);
    return true;
}

bool try_read_cache(const std::string& path, std::uint64_t want_hash, ExactSolution& sol) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return false;
    char magic[4];
    if (!in.read(magic, 4) || std::memcmp(magic, kCacheMagic, 4) != 0) return false;
    std::uint64_t hash = 0, len = 0;
    if (!get_u64(in, hash) || hash != want_hash) return false;
    if (!get_u64(in, len) || len > (1u << 26)) return false;
    Vector x(len);
    for (std::size_t i = 0; i < len; ++i)
        if (!get_f64(in, x[i])) return false;
    double f = 0.0;
    if (!get_f64(in, f)) return false;
    sol.x_star = std::move(x);
    sol.f_star = f;
    return true;
}

void try_write_cache(const std::string& path, std::uint64_t hash, const ExactSolution& sol) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) return;  // best effort; the cache is an optimization only
    out.write(kCacheMagic, 4);
    put_u64(out, hash);
    put_u64(out, sol.x_star.size());
    for (double v : sol.x_star) put_f64(out, v);
    put_f64(out, sol.f_star);
}

}  // namespace

ExactSolution exact_solution_cached(SolveMode mode, const Matrix& a, const Vector& b,
                                    const std::string& a_path) {
    const std::uint64_t hash = problem_hash(mode, a, b);
    const std::string cache_path = a_path + ".xstar";
    ExactSolution sol;
    if (try_read_cache(cache_path, hash, sol)) return sol;
    sol = exact_solution(mode, a, b);
    try_write_cache(cache_path, hash, sol);
    return sol;
}

// ===== CSV output =====

namespace {

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        out += c;
    }
    out += "\"";
    return out;
}

std::ofstream open_out(const std::string& path) {
    const std::filesystem::path parent = std::filesystem::path(path).parent_path();
    if (!parent.empty()) {
        std::error_code ec;
        std::filesystem::create_directories(parent, ec);
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    return out;
}

void spec_columns(std::ostream& out, SketchKind kind, std::size_t m, std::size_t m_prime,
                  std::size_t s) {
    out << kind_name(kind) << ',' << m << ',';
    if (kind == SketchKind::Hybrid) out << m_prime;
    out << ',';
    if (kind == SketchKind::Sjlt) out << s;
}

}  // namespace

void write_data_csv(const std::string& path, const std::vector<TrialRecord>& records) {
    std::ofstream out = open_out(path);
    out << "kind,m,m_prime,s,q,trial,seed,relative_error,wall_time,retries,error\n";
    for (const TrialRecord& r : records) {
        spec_columns(out, r.kind, r.m, r.m_prime, r.s);
        out << ',' << r.q << ',' << r.trial << ',' << r.seed << ',';
        if (r.error.empty()) {
            out << format_double(r.relative_error) << ',' << format_double(r.wall_time) << ','
                << r.retries << ',';
        } else {
            out << ",,," << csv_escape(r.error);
        }
        out << '\n';
    }
    if (!out) throw IoError("failed writing '" + path + "'");
}

void write_summary_csv(const std::string& path, const std::vector<SummaryRecord>& summary) {
    std::ofstream out = open_out(path);
    out << "kind,m,m_prime,s,q,count,mean_error,stderr_error\n";
    for (const SummaryRecord& r : summary) {
        spec_columns(out, r.kind, r.m, r.m_prime, r.s);
        out << ',' << r.q << ',' << r.count << ',';
        if (r.count > 0)
            out << format_double(r.mean_error) << ',' << format_double(r.stderr_error);
        else
            out << ',';
        out << '\n';
    }
    if (!out) throw IoError("failed writing '" + path + "'");
}

void write_prefix_csv(const std::string& path, const std::vector<PrefixRecord>& prefix) {
    std::ofstream out = open_out(path);
    out << "kind,m,m_prime,s,q,trial,prefix_q,relative_error\n";
    for (const PrefixRecord& r : prefix) {
        spec_columns(out, r.kind, r.m, r.m_prime, r.s);
        out << ',' << r.q << ',' << r.trial << ',' << r.prefix_q << ','
            << format_double(r.relative_error) << '\n';
    }
    if (!out) throw IoError("failed writing '" + path + "'");
}

// ===== Experiment sweep =====

namespace {

void validate_config(const ExperimentConfig& c) {
    if (c.trials < 1) throw InvalidConfig("config: trials must be >= 1");
    if (c.q_grid.empty()) throw InvalidConfig("config: q_grid must be nonempty");
    for (std::size_t q : c.q_grid)
        if (q < 1) throw InvalidConfig("config: q_grid entries must be >= 1");
    if (c.sketches.empty()) throw InvalidConfig("config: sketches must be nonempty");
    const bool has_gen = c.problem.generator.has_value();
    const bool has_files = c.problem.files.has_value();
    if (has_gen == has_files)
        throw InvalidConfig("config: provide exactly one of generator and files");
}

struct LoadedProblem {
    Matrix a;
    Vector b;
    ExactSolution sol;
    std::optional<Vector> lev;  // of the sketched dimension, when needed
};

LoadedProblem load_problem(const ExperimentConfig& c) {
    LoadedProblem p;
    if (c.problem.generator) {
        GeneratedProblem gp = generate(*c.problem.generator, substream(c.master_seed, kTagData));
        p.a = std::move(gp.a);
        p.b = std::move(gp.b);
    } else {
        p.a = read_matrix(c.problem.files->a_path);
        p.b = read_vector(c.problem.files->b_path);
    }
    if (p.b.size() != p.a.rows())
        throw ShapeMismatch("problem: b has " + std::to_string(p.b.size()) + " entries but A has " +
                            std::to_string(p.a.rows()) + " rows");

    if (c.problem.files) {
        p.sol = exact_solution_cached(c.problem.mode, p.a, p.b, c.problem.files->a_path);
    } else {
        p.sol = exact_solution(c.problem.mode, p.a, p.b);
    }

    bool needs_lev = false;
    for (const SketchSpec& s : c.sketches)
        if (s.kind == SketchKind::LeverageScore) needs_lev = true;
    if (needs_lev) {
        p.lev = c.problem.mode == SolveMode::Left ? leverage_scores(p.a)
                                                  : leverage_scores(p.a.transposed());
    }
    return p;
}

}  // namespace

ExperimentResult run_experiment_collect(const ExperimentConfig& config) {
    validate_config(config);
    LoadedProblem prob = load_problem(config);
    const Vector* lev = prob.lev ? &*prob.lev : nullptr;

    struct Job {
        std::size_t si, qi, trial;
        std::uint64_t seed;
    };
    std::vector<Job> jobs;
    jobs.reserve(config.sketches.size() * config.q_grid.size() * config.trials);
    for (std::size_t si = 0; si < config.sketches.size(); ++si) {
        for (std::size_t qi = 0; qi < config.q_grid.size(); ++qi) {
            const std::uint64_t cell_seed =
                substream(config.master_seed, kTagGrid + si * config.q_grid.size() + qi);
            for (std::size_t t = 0; t < config.trials; ++t)
                jobs.push_back({si, qi, t, substream(cell_seed, kTagTrial + t)});
        }
    }

    std::vector<TrialRecord> records(jobs.size());
    std::vector<std::vector<PrefixRecord>> prefixes(jobs.size());
    const std::ptrdiff_t njobs = static_cast<std::ptrdiff_t>(jobs.size());
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
    for (std::ptrdiff_t ji = 0; ji < njobs; ++ji) {
        const Job& job = jobs[static_cast<std::size_t>(ji)];
        const SketchSpec& spec = config.sketches[job.si];
        TrialRecord& rec = records[static_cast<std::size_t>(ji)];
        rec.kind = spec.kind;
        rec.m = spec.m;
        rec.m_prime = spec.m_prime;
        rec.s = spec.s;
        rec.q = config.q_grid[job.qi];
        rec.trial = job.trial;
        rec.seed = job.seed;
        try {
            RunOptions opts;
            opts.reproducible = true;
            opts.record_prefix_errors = config.record_prefix_errors;
            opts.x_star = &prob.sol.x_star;
            opts.f_star = prob.sol.f_star;
            AveragedEstimate est =
                run_distributed(prob.a, prob.b, spec, rec.q, job.seed, config.problem.mode,
                                config.straggler, DelayModel::none(), opts, lev);
            rec.relative_error = relative_error(config.problem.mode, prob.a, est.x_bar,
                                                prob.sol.x_star, prob.sol.f_star);
            rec.wall_time = est.wall_time_seconds;
            rec.retries = est.total_retries;
            if (est.prefix_errors) {
                std::vector<PrefixRecord>& pr = prefixes[static_cast<std::size_t>(ji)];
                pr.reserve(est.prefix_errors->size());
                for (const auto& [pq, err] : *est.prefix_errors) {
                    PrefixRecord p;
                    p.kind = rec.kind;
                    p.m = rec.m;
                    p.m_prime = rec.m_prime;
                    p.s = rec.s;
                    p.q = rec.q;
                    p.trial = rec.trial;
                    p.prefix_q = pq;
                    p.relative_error = err;
                    pr.push_back(p);
                }
            }
        } catch (const std::exception& e) {
            rec.error = e.what();
        }
    }

    ExperimentResult result;
    result.records = std::move(records);
    for (auto& pr : prefixes)
        result.prefix.insert(result.prefix.end(), pr.begin(), pr.end());

    // Per-(sketch, q) mean and standard error over successful trials.
    for (std::size_t si = 0; si < config.sketches.size(); ++si) {
        for (std::size_t qi = 0; qi < config.q_grid.size(); ++qi) {
            const std::size_t base = (si * config.q_grid.size() + qi) * config.trials;
            SummaryRecord sr;
            const SketchSpec& spec = config.sketches[si];
            sr.kind = spec.kind;
            sr.m = spec.m;
            sr.m_prime = spec.m_prime;
            sr.s = spec.s;
            sr.q = config.q_grid[qi];
            NeumaierSum sum;
            std::size_t count = 0;
            for (std::size_t t = 0; t < config.trials; ++t) {
                const TrialRecord& r = result.records[base + t];
                if (!r.error.empty()) continue;
                sum.add(r.relative_error);
                ++count;
            }
            sr.count = count;
            if (count > 0) {
                sr.mean_error = sum.value() / static_cast<double>(count);
                double var = 0.0;
                for (std::size_t t = 0; t < config.trials; ++t) {
                    const TrialRecord& r = result.records[base + t];
                    if (!r.error.empty()) continue;
                    var += (r.relative_error - sr.mean_error) * (r.relative_error - sr.mean_error);
                }
                sr.stderr_error = count > 1 ? std::sqrt(var / static_cast<double>(count - 1) /
                                                        static_cast<double>(count))
                                            : 0.0;
            }
            result.summary.push_back(sr);
        }
    }
    return result;
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
    ExperimentResult result = run_experiment_collect(config);
    write_data_csv(config.outputs, result.records);
    write_summary_csv(summary_path_for(config.outputs), result.summary);
    if (config.record_prefix_errors)
        write_prefix_csv(prefix_path_for(config.outputs), result.prefix);
    return result;
}

}  // namespace sketchavg
