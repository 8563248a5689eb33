#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace sketchavg {

// Counter-based randomness built on the splitmix64 finalizer. Every stream
// is addressable by (seed, index), so parallel code can draw the i-th value
// without generating the first i-1, and results never depend on thread count.

inline constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

inline std::uint64_t mix64(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xbf58476d1ce4e5b9ULL;
    z ^= z >> 27;
    z *= 0x94d049bb133111ebULL;
    z ^= z >> 31;
    return z;
}

// One step of splitmix64 from the given state.
inline std::uint64_t splitmix64(std::uint64_t state) { return mix64(state + kGolden); }

// The (i+1)-th output of the splitmix64 sequence seeded at `seed`.
// stream_at(seed, 0) == splitmix64(seed).
inline std::uint64_t stream_at(std::uint64_t seed, std::uint64_t i) {
    return mix64(seed + (i + 1) * kGolden);
}

// Derive an independent child seed. Tags live in disjoint ranges (below) so
// that two different purposes never hash the same (seed, tag) pair.
inline std::uint64_t substream(std::uint64_t seed, std::uint64_t tag) {
    return mix64(seed ^ mix64(tag + kGolden));
}

// Tag namespaces for substream(). Values beyond a base are indexed by the
// caller (row index, trial index, ...).
inline constexpr std::uint64_t kTagRow = 0x100000000ULL << 0;     // per-row generation
inline constexpr std::uint64_t kTagCol = 0x100000000ULL << 1;     // per-column generation
inline constexpr std::uint64_t kTagDraw = 0x100000000ULL << 2;    // index/sign draws of one sketch
inline constexpr std::uint64_t kTagStage = 0x100000000ULL << 3;   // hybrid outer/inner stages
inline constexpr std::uint64_t kTagRetry = 0x100000000ULL << 4;   // worker resample attempts
inline constexpr std::uint64_t kTagTrial = 0x100000000ULL << 5;   // Monte-Carlo trials
inline constexpr std::uint64_t kTagData = 0x100000000ULL << 6;    // dataset synthesis
inline constexpr std::uint64_t kTagDelay = 0x100000000ULL << 7;   // straggler delay draws
inline constexpr std::uint64_t kTagGrid = 0x100000000ULL << 8;    // experiment grid cells

inline double unit_open_closed(std::uint64_t bits) {  // (0, 1]
    return static_cast<double>((bits >> 11) + 1) * 0x1.0p-53;
}

inline double unit_closed_open(std::uint64_t bits) {  // [0, 1)
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

// Standard normal pair (Box-Muller) at pair counter p of the stream. Uses
// stream outputs 2p and 2p+1, i.e. matches Rng::next_normal consumed in order.
inline void normal_pair_at(std::uint64_t seed, std::uint64_t p, double& z0, double& z1) {
    double u1 = unit_open_closed(stream_at(seed, 2 * p));
    double u2 = unit_closed_open(stream_at(seed, 2 * p + 1));
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 2.0 * std::numbers::pi * u2;
    z0 = r * std::cos(a);
    z1 = r * std::sin(a);
}

// Sequential generator over the same stream, for code that draws a
// data-dependent number of values (rejection sampling, sampling without
// replacement). Deterministic given the seed.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        state_ += kGolden;
        return mix64(state_);
    }

    double next_unit_oc() { return unit_open_closed(next_u64()); }
    double next_unit_co() { return unit_closed_open(next_u64()); }

    // Uniform integer in [0, n) without modulo bias.
    std::uint64_t next_below(std::uint64_t n) {
        std::uint64_t threshold = (0 - n) % n;  // 2^64 mod n
        for (;;) {
            std::uint64_t r = next_u64();
            if (r >= threshold) return r % n;
        }
    }

    double next_normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double z0, z1;
        // Consume two outputs, exactly like normal_pair_at at the current
        // pair counter.
        double u1 = next_unit_oc();
        double u2 = next_unit_co();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 2.0 * std::numbers::pi * u2;
        z0 = r * std::cos(a);
        z1 = r * std::sin(a);
        spare_ = z1;
        have_spare_ = true;
        return z0;
    }

    double next_exponential(double rate) { return -std::log(next_unit_oc()) / rate; }

    // Marsaglia-Tsang for shape >= 1; boosted for shape < 1.
    double next_gamma(double shape) {
        if (shape < 1.0) {
            double u = next_unit_oc();
            return next_gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
        }
        double d = shape - 1.0 / 3.0;
        double c = 1.0 / std::sqrt(9.0 * d);
        for (;;) {
            double x = next_normal();
            double v = 1.0 + c * x;
            if (v <= 0.0) continue;
            v = v * v * v;
            double u = next_unit_oc();
            if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
            if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
        }
    }

    // Student t with df degrees of freedom: z / sqrt(chi2(df)/df).
    double next_student_t(double df) {
        double z = next_normal();
        double chi2 = 2.0 * next_gamma(df / 2.0);
        return z / std::sqrt(chi2 / df);
    }

private:
    std::uint64_t state_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace sketchavg
