#pragma once

#include <cstdint>
#include <memory>
#include <string>

#include "sketchavg/types.hpp"

namespace sketchavg {

enum class SketchKind {
    Gaussian,
    Ros,
    UniformWithReplacement,
    UniformWithoutReplacement,
    LeverageScore,
    Sjlt,
    Hybrid,
};

// Lowercase names used in configs and CSV output.
const char* kind_name(SketchKind k);
SketchKind kind_from_name(const std::string& name);

struct SketchSpec {
    SketchKind kind = SketchKind::Gaussian;
    std::size_t m = 0;        // sketch dimension
    std::size_t s = 0;        // SJLT: nonzeros per column
    std::size_t m_prime = 0;  // Hybrid: intermediate sample size
    std::shared_ptr<const SketchSpec> inner;  // Hybrid: second stage

    static SketchSpec gaussian(std::size_t m);
    static SketchSpec ros(std::size_t m);
    static SketchSpec uniform_with(std::size_t m);
    static SketchSpec uniform_without(std::size_t m);
    static SketchSpec leverage(std::size_t m);
    static SketchSpec sjlt(std::size_t m, std::size_t s);
    static SketchSpec hybrid(std::size_t m, std::size_t m_prime, SketchSpec inner_spec);
};

bool operator==(const SketchSpec& a, const SketchSpec& b);
inline bool operator!=(const SketchSpec& a, const SketchSpec& b) { return !(a == b); }

struct SketchedProblem {
    Matrix sa;
    Vector sb;
};

// Check the spec against the dimension it will sketch. Throws InvalidSpec.
// Leverage-score sketches additionally need scores at application time.
void validate_spec(const SketchSpec& spec, std::size_t n);

// S * M for the draw of S determined entirely by (spec, seed). All kinds
// stream over the rows of M; nothing forms S explicitly.
Matrix apply_rows(const SketchSpec& spec, const Matrix& m, std::uint64_t seed,
                  const Vector* lev = nullptr);

// (S A, S b) for one shared draw of S.
SketchedProblem apply_left(const SketchSpec& spec, const Matrix& a, const Vector& b,
                           std::uint64_t seed, const Vector* lev = nullptr);

// A S^T where S sketches the column space (dimension A.cols()).
Matrix apply_right(const SketchSpec& spec, const Matrix& a, std::uint64_t seed,
                   const Vector* lev = nullptr);

// S^T z for the same draw; n is the sketched dimension (S is m x n).
Vector apply_transpose(const SketchSpec& spec, std::size_t n, const Vector& z,
                       std::uint64_t seed, const Vector* lev = nullptr);

// Explicit m x n sketch matrix for small-n checks. Guarded at n <= 4096.
Matrix materialize(const SketchSpec& spec, std::size_t n, std::uint64_t seed,
                   const Vector* lev = nullptr);

}  // namespace sketchavg
