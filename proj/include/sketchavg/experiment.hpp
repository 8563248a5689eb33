#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sketchavg/generator.hpp"
#include "sketchavg/sketch.hpp"
#include "sketchavg/solver.hpp"
#include "sketchavg/types.hpp"

namespace sketchavg {

struct DataFiles {
    std::string a_path;
    std::string b_path;
};

bool operator==(const DataFiles& x, const DataFiles& y);

struct ProblemSpec {
    SolveMode mode = SolveMode::Left;
    std::optional<GeneratorSpec> generator;  // exactly one of generator/files
    std::optional<DataFiles> files;
};

bool operator==(const ProblemSpec& x, const ProblemSpec& y);

struct ExperimentConfig {
    ProblemSpec problem;
    std::vector<SketchSpec> sketches;
    std::vector<std::size_t> q_grid;
    std::size_t trials = 1;
    std::uint64_t master_seed = 0;
    StragglerPolicy straggler;
    std::string outputs;  // data CSV path; summary/prefix paths derive from it
    bool record_prefix_errors = false;
};

bool operator==(const ExperimentConfig& x, const ExperimentConfig& y);

// JSON config round-trip; parse(serialize(c)) == c.
ExperimentConfig parse_config(const std::string& json_text);
std::string serialize_config(const ExperimentConfig& config);
ExperimentConfig load_config(const std::string& path);

// results.csv -> results.summary.csv / results.prefix.csv
std::string summary_path_for(const std::string& outputs);
std::string prefix_path_for(const std::string& outputs);

struct TrialRecord {
    SketchKind kind = SketchKind::Gaussian;
    std::size_t m = 0;
    std::size_t m_prime = 0;  // 0 when absent
    std::size_t s = 0;        // 0 when absent
    std::size_t q = 0;
    std::size_t trial = 0;
    std::uint64_t seed = 0;
    double relative_error = 0.0;
    double wall_time = 0.0;
    std::size_t retries = 0;
    std::string error;  // empty on success; numeric fields blank in CSV otherwise
};

struct SummaryRecord {
    SketchKind kind = SketchKind::Gaussian;
    std::size_t m = 0;
    std::size_t m_prime = 0;
    std::size_t s = 0;
    std::size_t q = 0;
    std::size_t count = 0;  // successful trials
    double mean_error = 0.0;
    double stderr_error = 0.0;
};

struct PrefixRecord {
    SketchKind kind = SketchKind::Gaussian;
    std::size_t m = 0;
    std::size_t m_prime = 0;
    std::size_t s = 0;
    std::size_t q = 0;
    std::size_t trial = 0;
    std::size_t prefix_q = 0;
    double relative_error = 0.0;
};

struct ExperimentResult {
    std::vector<TrialRecord> records;
    std::vector<SummaryRecord> summary;
    std::vector<PrefixRecord> prefix;
};

// Runs the full (sketch x q x trial) sweep in memory; per-trial solver errors
// are captured in the record's error column and the sweep continues.
ExperimentResult run_experiment_collect(const ExperimentConfig& config);

// run_experiment_collect plus CSV output to config.outputs (and derived
// summary/prefix paths). Byte-identical files for identical config and seed.
ExperimentResult run_experiment(const ExperimentConfig& config);

void write_data_csv(const std::string& path, const std::vector<TrialRecord>& records);
void write_summary_csv(const std::string& path, const std::vector<SummaryRecord>& summary);
void write_prefix_csv(const std::string& path, const std::vector<PrefixRecord>& prefix);

// Exact solution and optimal cost for one problem; file-backed datasets cache
// the pair beside the matrix, keyed by a content hash.
struct ExactSolution {
    Vector x_star;
    double f_star = 0.0;
};

ExactSolution exact_solution(SolveMode mode, const Matrix& a, const Vector& b);
ExactSolution exact_solution_cached(SolveMode mode, const Matrix& a, const Vector& b,
                                    const std::string& a_path);

}  // namespace sketchavg
