#include "sketchavg/generator.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

#include "sketchavg/errors.hpp"
#include "sketchavg/kernels.hpp"
#include "sketchavg/rng.hpp"

namespace sketchavg {

bool operator==(const GeneratorSpec& a, const GeneratorSpec& b) {
    return a.n == b.n && a.d == b.d && a.distribution == b.distribution &&
           a.df == b.df && a.noise_std == b.noise_std && a.planted == b.planted;
}

namespace {

void validate_generator_spec(const GeneratorSpec& g) {
    if (g.n < 1 || g.d < 1) {
        throw InvalidSpec("generator: n and d must be at least 1");
    }
    if (g.distribution == GeneratorSpec::Dist::StudentT && !(g.df > 1.0)) {
        throw InvalidSpec("generator: student_t requires df > 1");
    }
    if (!(g.noise_std >= 0.0)) {
        throw InvalidSpec("generator: noise_std must be non-negative");
    }
}

void fill_row(Rng& rng, const GeneratorSpec& g, double* row) {
    if (g.distribution == GeneratorSpec::Dist::Gaussian) {
        for (std::size_t j = 0; j < g.d; ++j) row[j] = rng.next_normal();
    } else {
        for (std::size_t j = 0; j < g.d; ++j) row[j] = rng.next_student_t(g.df);
    }
}

}  // namespace

GeneratedProblem generate(const GeneratorSpec& gspec, std::uint64_t seed) {
    validate_generator_spec(gspec);

    GeneratedProblem out;
    out.a = Matrix(gspec.n, gspec.d);

    // Independent per-row streams so the result is identical for any thread count.
    const std::uint64_t a_seed = substream(seed, kTagData);
    const std::int64_t n_rows = static_cast<std::int64_t>(gspec.n);
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (std::int64_t i = 0; i < n_rows; ++i) {
        Rng rng(substream(a_seed, kTagRow + static_cast<std::uint64_t>(i)));
        fill_row(rng, gspec, out.a.row(static_cast<std::size_t>(i)));
    }

    if (gspec.planted) {
        Vector x(gspec.d);
        Rng xrng(substream(seed, kTagData + 1));
        for (std::size_t j = 0; j < gspec.d; ++j) x[j] = xrng.next_normal();

        out.b = matvec(out.a, x);
        if (gspec.noise_std > 0.0) {
            Rng nrng(substream(seed, kTagData + 2));
            for (std::size_t i = 0; i < gspec.n; ++i) {
                out.b[i] += gspec.noise_std * nrng.next_normal();
            }
        }
        out.x_truth = std::move(x);
    } else {
        out.b.resize(gspec.n);
        Rng brng(substream(seed, kTagData + 3));
        for (std::size_t i = 0; i < gspec.n; ++i) out.b[i] = brng.next_normal();
    }

    ensure_finite(out.a, "generated matrix");
    return out;
}

}  // namespace sketchavg
