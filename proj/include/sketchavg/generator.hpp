#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "sketchavg/types.hpp"

namespace sketchavg {

struct GeneratorSpec {
    enum class Dist { Gaussian, StudentT };
    std::size_t n = 0;
    std::size_t d = 0;
    Dist distribution = Dist::Gaussian;
    double df = 0.0;        // StudentT only; must be > 1
    double noise_std = 0.0;
    bool planted = true;
};

bool operator==(const GeneratorSpec& a, const GeneratorSpec& b);

struct GeneratedProblem {
    Matrix a;
    Vector b;
    std::optional<Vector> x_truth;  // present when planted
};

// Synthetic problem: A i.i.d. from the named distribution; if planted,
// b = A x_truth + noise_std * N(0, I) with x_truth standard normal,
// otherwise b i.i.d. standard normal. Deterministic in seed.
GeneratedProblem generate(const GeneratorSpec& gspec, std::uint64_t seed);

}  // namespace sketchavg
