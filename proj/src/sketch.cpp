#include "sketchavg/sketch.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <unordered_map>
#include <utility>

#include "sketchavg/errors.hpp"
#include "sketchavg/kernels.hpp"
#include "sketchavg/rng.hpp"

namespace sketchavg {

namespace {

constexpr std::size_t kMaterializeLimit = 4096;

std::size_t pad_pow2(std::size_t n) { return std::bit_ceil(static_cast<std::uint64_t>(n)); }

// ===== draw helpers: all randomness of one sketch, derived from its seed =====

// Row sample with a per-row scale; covers both uniform kinds and leverage.
struct RowSample {
    std::vector<std::size_t> rows;
    Vector scales;
};

RowSample draw_uniform_with(std::uint64_t seed, std::size_t n, std::size_t m) {
    Rng rng(substream(seed, kTagDraw));
    RowSample rs;
    rs.rows.resize(m);
    const double scale = std::sqrt(static_cast<double>(n) / static_cast<double>(m));
    rs.scales.assign(m, scale);
    for (std::size_t i = 0; i < m; ++i) rs.rows[i] = rng.next_below(n);
    return rs;
}

// Partial Fisher-Yates over an implicit identity array; O(m) memory.
RowSample draw_uniform_without(std::uint64_t seed, std::size_t n, std::size_t m) {
    Rng rng(substream(seed, kTagDraw));
    RowSample rs;
    rs.rows.resize(m);
    const double scale = std::sqrt(static_cast<double>(n) / static_cast<double>(m));
    rs.scales.assign(m, scale);
    std::unordered_map<std::size_t, std::size_t> moved;
    auto slot = [&](std::size_t i) {
        auto it = moved.find(i);
        return it == moved.end() ? i : it->second;
    };
    for (std::size_t i = 0; i < m; ++i) {
        std::size_t j = i + rng.next_below(n - i);
        std::size_t vi = slot(i), vj = slot(j);
        rs.rows[i] = vj;
        moved[j] = vi;
    }
    return rs;
}

RowSample draw_leverage(std::uint64_t seed, const Vector& lev, std::size_t m) {
    const std::size_t n = lev.size();
    Vector cum(n);
    double total = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        double l = lev[j];
        if (!(l >= -1e-12))
            throw InvalidSpec("leverage scores must be nonnegative");
        total += std::max(l, 0.0);
        cum[j] = total;
    }
    if (!(total > 0.0)) throw InvalidSpec("leverage scores sum to zero");
    Rng rng(substream(seed, kTagDraw));
    RowSample rs;
    rs.rows.resize(m);
    rs.scales.resize(m);
    for (std::size_t i = 0; i < m; ++i) {
        double u = rng.next_unit_co() * total;
        std::size_t j = static_cast<std::size_t>(
            std::upper_bound(cum.begin(), cum.end(), u) - cum.begin());
        if (j >= n) j = n - 1;
        rs.rows[i] = j;
        // p_j = lev_j / total, so the scaled rows satisfy E[S^T S] = I exactly.
        double pj = std::max(lev[j], 0.0) / total;
        rs.scales[i] = 1.0 / std::sqrt(static_cast<double>(m) * pj);
    }
    return rs;
}

struct RosDraw {
    std::vector<double> signs;       // n entries, +-1
    std::vector<std::size_t> rows;   // m picks in [0, n_pad), with replacement
    std::size_t n_pad = 0;
    double scale = 0.0;              // sqrt(n_pad/m) / sqrt(n_pad)
};

RosDraw draw_ros(std::uint64_t seed, std::size_t n, std::size_t m) {
    RosDraw dr;
    dr.n_pad = pad_pow2(n);
    dr.scale = std::sqrt(static_cast<double>(dr.n_pad) / static_cast<double>(m)) /
               std::sqrt(static_cast<double>(dr.n_pad));
    dr.signs.resize(n);
    Rng sign_rng(substream(seed, kTagDraw));
    for (std::size_t j = 0; j < n; ++j)
        dr.signs[j] = (sign_rng.next_u64() >> 63) ? -1.0 : 1.0;
    dr.rows.resize(m);
    Rng row_rng(substream(seed, kTagDraw + 1));
    for (std::size_t i = 0; i < m; ++i) dr.rows[i] = row_rng.next_below(dr.n_pad);
    return dr;
}

// One SJLT column: s distinct rows (ascending) with signs, value +-1/sqrt(s).
// Floyd's sampling, then sort; signs are drawn after sorting so they stay
// i.i.d. regardless of order.
void sjlt_column(std::uint64_t seed, std::size_t j, std::size_t m, std::size_t s,
                 std::size_t* rows_out, double* vals_out) {
    Rng rng(substream(seed, kTagCol + j));
    std::vector<std::size_t> picked;
    picked.reserve(s);
    for (std::size_t t = m - s; t < m; ++t) {
        std::size_t r = rng.next_below(t + 1);
        if (std::find(picked.begin(), picked.end(), r) != picked.end())
            picked.push_back(t);
        else
            picked.push_back(r);
    }
    std::sort(picked.begin(), picked.end());
    const double v = 1.0 / std::sqrt(static_cast<double>(s));
    for (std::size_t t = 0; t < s; ++t) {
        rows_out[t] = picked[t];
        vals_out[t] = (rng.next_u64() >> 63) ? -v : v;
    }
}

std::uint64_t hybrid_outer_seed(std::uint64_t seed) { return substream(seed, kTagStage); }
std::uint64_t hybrid_inner_seed(std::uint64_t seed) { return substream(seed, kTagStage + 1); }

// ===== shared application pieces =====

Matrix gather_scaled(const Matrix& m, const RowSample& rs) {
    Matrix out(rs.rows.size(), m.cols());
    const std::ptrdiff_t rows = static_cast<std::ptrdiff_t>(rs.rows.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < rows; ++i) {
        const std::size_t ii = static_cast<std::size_t>(i);
        const double c = rs.scales[ii];
        const double* src = m.row(rs.rows[ii]);
        double* dst = out.row(ii);
        for (std::size_t l = 0; l < m.cols(); ++l) dst[l] = c * src[l];
    }
    return out;
}

Vector scatter_scaled(std::size_t n, const Vector& z, const RowSample& rs) {
    Vector x(n, 0.0);
    for (std::size_t i = 0; i < rs.rows.size(); ++i) x[rs.rows[i]] += rs.scales[i] * z[i];
    return x;
}

// Streaming Gaussian apply: SA accumulates G_block * M_block over row pairs
// of M, so M is read once. The inner accumulation order matches a dense
// matmul exactly (ascending rows of M, one multiply-add per entry), which is
// what makes materialize() consistent bit-for-bit.
Matrix gaussian_apply(const Matrix& m, std::size_t out_rows, std::uint64_t seed) {
    const std::size_t n = m.rows(), c = m.cols();
    const double inv = 1.0 / std::sqrt(static_cast<double>(out_rows));
    Matrix out(out_rows, c);
    const std::ptrdiff_t rows = static_cast<std::ptrdiff_t>(out_rows);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < rows; ++i) {
        const std::uint64_t row_seed = substream(seed, kTagRow + static_cast<std::uint64_t>(i));
        double* oi = out.row(static_cast<std::size_t>(i));
        for (std::size_t p = 0; 2 * p < n; ++p) {
            double z0, z1;
            normal_pair_at(row_seed, p, z0, z1);
            const double g0 = z0 * inv;
            const double* r0 = m.row(2 * p);
            for (std::size_t l = 0; l < c; ++l) oi[l] += g0 * r0[l];
            if (2 * p + 1 < n) {
                const double g1 = z1 * inv;
                const double* r1 = m.row(2 * p + 1);
                for (std::size_t l = 0; l < c; ++l) oi[l] += g1 * r1[l];
            }
        }
    }
    return out;
}

Vector gaussian_transpose(std::size_t n, const Vector& z, std::size_t m, std::uint64_t seed) {
    const double inv = 1.0 / std::sqrt(static_cast<double>(m));
    Vector x(n, 0.0);
    const std::ptrdiff_t pairs = static_cast<std::ptrdiff_t>((n + 1) / 2);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t pp = 0; pp < pairs; ++pp) {
        const std::size_t p = static_cast<std::size_t>(pp);
        double s0 = 0.0, s1 = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            const std::uint64_t row_seed = substream(seed, kTagRow + i);
            double z0, z1;
            normal_pair_at(row_seed, p, z0, z1);
            s0 += (z0 * inv) * z[i];
            s1 += (z1 * inv) * z[i];
        }
        x[2 * p] = s0;
        if (2 * p + 1 < n) x[2 * p + 1] = s1;
    }
    return x;
}

Matrix ros_apply(const Matrix& m, const RosDraw& dr) {
    const std::size_t n = m.rows(), c = m.cols();
    Matrix y(dr.n_pad, c);
    const std::ptrdiff_t rows = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < rows; ++i) {
        const std::size_t ii = static_cast<std::size_t>(i);
        const double sgn = dr.signs[ii];
        const double* src = m.row(ii);
        double* dst = y.row(ii);
        for (std::size_t l = 0; l < c; ++l) dst[l] = sgn * src[l];
    }
    fwht_rows_inplace(y);
    Matrix out(dr.rows.size(), c);
    const std::ptrdiff_t orows = static_cast<std::ptrdiff_t>(dr.rows.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < orows; ++i) {
        const std::size_t ii = static_cast<std::size_t>(i);
        const double* src = y.row(dr.rows[ii]);
        double* dst = out.row(ii);
        for (std::size_t l = 0; l < c; ++l) dst[l] = dr.scale * src[l];
    }
    return out;
}

Vector ros_transpose(std::size_t n, const Vector& z, const RosDraw& dr) {
    Vector w(dr.n_pad, 0.0);
    for (std::size_t i = 0; i < dr.rows.size(); ++i) w[dr.rows[i]] += z[i];
    fwht_inplace(w);
    Vector x(n);
    for (std::size_t j = 0; j < n; ++j) x[j] = dr.scale * dr.signs[j] * w[j];
    return x;
}

struct SjltRows {
    // CSR over output rows; columns ascend within each row.
    std::vector<std::size_t> offsets;
    std::vector<std::size_t> cols;
    std::vector<double> vals;
};

SjltRows sjlt_by_rows(std::uint64_t seed, std::size_t n, std::size_t m, std::size_t s) {
    std::vector<std::size_t> nz_rows(n * s);
    std::vector<double> nz_vals(n * s);
    const std::ptrdiff_t ncols = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t j = 0; j < ncols; ++j) {
        const std::size_t jj = static_cast<std::size_t>(j);
        sjlt_column(seed, jj, m, s, nz_rows.data() + jj * s, nz_vals.data() + jj * s);
    }
    SjltRows out;
    out.offsets.assign(m + 1, 0);
    for (std::size_t r : nz_rows) ++out.offsets[r + 1];
    for (std::size_t i = 0; i < m; ++i) out.offsets[i + 1] += out.offsets[i];
    out.cols.resize(n * s);
    out.vals.resize(n * s);
    std::vector<std::size_t> cursor(out.offsets.begin(), out.offsets.end() - 1);
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t t = 0; t < s; ++t) {
            std::size_t r = nz_rows[j * s + t];
            std::size_t pos = cursor[r]++;
            out.cols[pos] = j;
            out.vals[pos] = nz_vals[j * s + t];
        }
    }
    return out;
}

Matrix sjlt_apply(const Matrix& m, std::size_t out_rows, std::size_t s, std::uint64_t seed) {
    SjltRows sr = sjlt_by_rows(seed, m.rows(), out_rows, s);
    Matrix out(out_rows, m.cols());
    const std::ptrdiff_t rows = static_cast<std::ptrdiff_t>(out_rows);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < rows; ++i) {
        const std::size_t ii = static_cast<std::size_t>(i);
        double* oi = out.row(ii);
        for (std::size_t pos = sr.offsets[ii]; pos < sr.offsets[ii + 1]; ++pos) {
            const double v = sr.vals[pos];
            const double* src = m.row(sr.cols[pos]);
            for (std::size_t l = 0; l < m.cols(); ++l) oi[l] += v * src[l];
        }
    }
    return out;
}

Vector sjlt_transpose(std::size_t n, const Vector& z, std::size_t m, std::size_t s,
                      std::uint64_t seed) {
    Vector x(n);
    const std::ptrdiff_t ncols = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t j = 0; j < ncols; ++j) {
        const std::size_t jj = static_cast<std::size_t>(j);
        std::vector<std::size_t> rows(s);
        std::vector<double> vals(s);
        sjlt_column(seed, jj, m, s, rows.data(), vals.data());
        double acc = 0.0;
        for (std::size_t t = 0; t < s; ++t) acc += vals[t] * z[rows[t]];
        x[jj] = acc;
    }
    return x;
}

RowSample hybrid_outer(const SketchSpec& spec, std::size_t n, std::uint64_t seed) {
    return draw_uniform_without(hybrid_outer_seed(seed), n, spec.m_prime);
}

}  // namespace

// ===== spec plumbing =====

const char* kind_name(SketchKind k) {
    switch (k) {
        case SketchKind::Gaussian: return "gaussian";
        case SketchKind::Ros: return "ros";
        case SketchKind::UniformWithReplacement: return "uniform_with";
        case SketchKind::UniformWithoutReplacement: return "uniform_without";
        case SketchKind::LeverageScore: return "leverage";
        case SketchKind::Sjlt: return "sjlt";
        case SketchKind::Hybrid: return "hybrid";
    }
    return "?";
}

SketchKind kind_from_name(const std::string& name) {
    if (name == "gaussian") return SketchKind::Gaussian;
    if (name == "ros") return SketchKind::Ros;
    if (name == "uniform_with") return SketchKind::UniformWithReplacement;
    if (name == "uniform_without") return SketchKind::UniformWithoutReplacement;
    if (name == "leverage") return SketchKind::LeverageScore;
    if (name == "sjlt") return SketchKind::Sjlt;
    if (name == "hybrid") return SketchKind::Hybrid;
    throw InvalidSpec("unknown sketch kind '" + name + "'");
}

SketchSpec SketchSpec::gaussian(std::size_t m) { return {SketchKind::Gaussian, m, 0, 0, nullptr}; }
SketchSpec SketchSpec::ros(std::size_t m) { return {SketchKind::Ros, m, 0, 0, nullptr}; }
SketchSpec SketchSpec::uniform_with(std::size_t m) {
    return {SketchKind::UniformWithReplacement, m, 0, 0, nullptr};
}
SketchSpec SketchSpec::uniform_without(std::size_t m) {
    return {SketchKind::UniformWithoutReplacement, m, 0, 0, nullptr};
}
SketchSpec SketchSpec::leverage(std::size_t m) {
    return {SketchKind::LeverageScore, m, 0, 0, nullptr};
}
SketchSpec SketchSpec::sjlt(std::size_t m, std::size_t s) {
    return {SketchKind::Sjlt, m, s, 0, nullptr};
}
SketchSpec SketchSpec::hybrid(std::size_t m, std::size_t m_prime, SketchSpec inner_spec) {
    SketchSpec sp{SketchKind::Hybrid, m, 0, m_prime, nullptr};
    sp.inner = std::make_shared<const SketchSpec>(std::move(inner_spec));
    return sp;
}

bool operator==(const SketchSpec& a, const SketchSpec& b) {
    if (a.kind != b.kind || a.m != b.m || a.s != b.s || a.m_prime != b.m_prime) return false;
    if (!a.inner != !b.inner) return false;
    return !a.inner || *a.inner == *b.inner;
}

void validate_spec(const SketchSpec& spec, std::size_t n) {
    if (n == 0) throw InvalidSpec("cannot sketch an empty dimension");
    if (spec.m == 0) throw InvalidSpec("sketch dimension m must be >= 1");
    switch (spec.kind) {
        case SketchKind::Gaussian:
        case SketchKind::Ros:
        case SketchKind::UniformWithReplacement:
        case SketchKind::LeverageScore:
            break;
        case SketchKind::UniformWithoutReplacement:
            if (spec.m > n)
                throw InvalidSpec("uniform_without: m = " + std::to_string(spec.m) +
                                  " exceeds n = " + std::to_string(n));
            break;
        case SketchKind::Sjlt:
            if (spec.s < 1 || spec.s > spec.m)
                throw InvalidSpec("sjlt: need 1 <= s <= m, got s = " + std::to_string(spec.s) +
                                  ", m = " + std::to_string(spec.m));
            break;
        case SketchKind::Hybrid: {
            if (spec.m_prime < spec.m || spec.m_prime > n)
                throw InvalidSpec("hybrid: need m <= m_prime <= n, got m = " +
                                  std::to_string(spec.m) + ", m_prime = " +
                                  std::to_string(spec.m_prime) + ", n = " + std::to_string(n));
            if (!spec.inner) throw InvalidSpec("hybrid: missing inner sketch");
            if (spec.inner->kind == SketchKind::Hybrid)
                throw InvalidSpec("hybrid: inner sketch may not be hybrid");
            if (spec.inner->kind == SketchKind::LeverageScore)
                throw InvalidSpec(
                    "hybrid: inner leverage sketch is not supported (leverage scores of the "
                    "sampled block are data-dependent)");
            if (spec.inner->m != spec.m)
                throw InvalidSpec("hybrid: inner sketch dimension " +
                                  std::to_string(spec.inner->m) + " != m = " +
                                  std::to_string(spec.m));
            validate_spec(*spec.inner, spec.m_prime);
            break;
        }
    }
}

namespace {

const Vector& require_lev(const SketchSpec& spec, std::size_t n, const Vector* lev) {
    if (!lev)
        throw InvalidSpec("leverage sketch requires precomputed leverage scores");
    if (lev->size() != n)
        throw InvalidSpec("leverage scores have length " + std::to_string(lev->size()) +
                          ", expected " + std::to_string(n));
    (void)spec;
    return *lev;
}

}  // namespace

Matrix apply_rows(const SketchSpec& spec, const Matrix& m, std::uint64_t seed,
                  const Vector* lev) {
    validate_spec(spec, m.rows());
    switch (spec.kind) {
        case SketchKind::Gaussian:
            return gaussian_apply(m, spec.m, seed);
        case SketchKind::Ros:
            return ros_apply(m, draw_ros(seed, m.rows(), spec.m));
        case SketchKind::UniformWithReplacement:
            return gather_scaled(m, draw_uniform_with(seed, m.rows(), spec.m));
        case SketchKind::UniformWithoutReplacement:
            return gather_scaled(m, draw_uniform_without(seed, m.rows(), spec.m));
        case SketchKind::LeverageScore:
            return gather_scaled(m, draw_leverage(seed, require_lev(spec, m.rows(), lev), spec.m));
        case SketchKind::Sjlt:
            return sjlt_apply(m, spec.m, spec.s, seed);
        case SketchKind::Hybrid: {
            Matrix mid = gather_scaled(m, hybrid_outer(spec, m.rows(), seed));
            // With m_prime == m the sampled block is already at the target
            // dimension and the hybrid degenerates to uniform sampling.
            if (spec.m_prime == spec.m) return mid;
            return apply_rows(*spec.inner, mid, hybrid_inner_seed(seed), nullptr);
        }
    }
    throw InvalidSpec("unreachable sketch kind");
}

SketchedProblem apply_left(const SketchSpec& spec, const Matrix& a, const Vector& b,
                           std::uint64_t seed, const Vector* lev) {
    if (b.size() != a.rows())
        throw ShapeMismatch("apply_left: A has " + std::to_string(a.rows()) + " rows but b has " +
                            std::to_string(b.size()) + " entries");
    // One pass over [A | b] so both see the same draw of S.
    const std::size_t n = a.rows(), d = a.cols();
    Matrix ab(n, d + 1);
    for (std::size_t i = 0; i < n; ++i) {
        const double* src = a.row(i);
        double* dst = ab.row(i);
        for (std::size_t j = 0; j < d; ++j) dst[j] = src[j];
        dst[d] = b[i];
    }
    Matrix sab = apply_rows(spec, ab, seed, lev);
    const std::size_t m = sab.rows();
    SketchedProblem out;
    out.sa = Matrix(m, d);
    out.sb.resize(m);
    for (std::size_t i = 0; i < m; ++i) {
        const double* src = sab.row(i);
        double* dst = out.sa.row(i);
        for (std::size_t j = 0; j < d; ++j) dst[j] = src[j];
        out.sb[i] = src[d];
    }
    return out;
}

Matrix apply_right(const SketchSpec& spec, const Matrix& a, std::uint64_t seed,
                   const Vector* lev) {
    return apply_rows(spec, a.transposed(), seed, lev).transposed();
}

Vector apply_transpose(const SketchSpec& spec, std::size_t n, const Vector& z,
                       std::uint64_t seed, const Vector* lev) {
    validate_spec(spec, n);
    if (z.size() != spec.m)
        throw ShapeMismatch("apply_transpose: z has length " + std::to_string(z.size()) +
                            ", expected " + std::to_string(spec.m));
    switch (spec.kind) {
        case SketchKind::Gaussian:
            return gaussian_transpose(n, z, spec.m, seed);
        case SketchKind::Ros:
            return ros_transpose(n, z, draw_ros(seed, n, spec.m));
        case SketchKind::UniformWithReplacement:
            return scatter_scaled(n, z, draw_uniform_with(seed, n, spec.m));
        case SketchKind::UniformWithoutReplacement:
            return scatter_scaled(n, z, draw_uniform_without(seed, n, spec.m));
        case SketchKind::LeverageScore:
            return scatter_scaled(n, z, draw_leverage(seed, require_lev(spec, n, lev), spec.m));
        case SketchKind::Sjlt:
            return sjlt_transpose(n, z, spec.m, spec.s, seed);
        case SketchKind::Hybrid: {
            RowSample outer = hybrid_outer(spec, n, seed);
            if (spec.m_prime == spec.m) return scatter_scaled(n, z, outer);
            Vector mid = apply_transpose(*spec.inner, spec.m_prime, z, hybrid_inner_seed(seed),
                                         nullptr);
            return scatter_scaled(n, mid, outer);
        }
    }
    throw InvalidSpec("unreachable sketch kind");
}

Matrix materialize(const SketchSpec& spec, std::size_t n, std::uint64_t seed,
                   const Vector* lev) {
    if (n > kMaterializeLimit)
        throw TooLarge("materialize: n = " + std::to_string(n) + " exceeds limit " +
                       std::to_string(kMaterializeLimit));
    validate_spec(spec, n);
    switch (spec.kind) {
        case SketchKind::Gaussian: {
            Matrix s(spec.m, n);
            const double inv = 1.0 / std::sqrt(static_cast<double>(spec.m));
            for (std::size_t i = 0; i < spec.m; ++i) {
                const std::uint64_t row_seed = substream(seed, kTagRow + i);
                for (std::size_t p = 0; 2 * p < n; ++p) {
                    double z0, z1;
                    normal_pair_at(row_seed, p, z0, z1);
                    s(i, 2 * p) = z0 * inv;
                    if (2 * p + 1 < n) s(i, 2 * p + 1) = z1 * inv;
                }
            }
            return s;
        }
        case SketchKind::Ros: {
            RosDraw dr = draw_ros(seed, n, spec.m);
            Matrix s(spec.m, n);
            for (std::size_t i = 0; i < spec.m; ++i) {
                const std::uint64_t r = dr.rows[i];
                for (std::size_t j = 0; j < n; ++j) {
                    double h = (std::popcount(r & static_cast<std::uint64_t>(j)) & 1) ? -1.0 : 1.0;
                    s(i, j) = dr.scale * (h * dr.signs[j]);
                }
            }
            return s;
        }
        case SketchKind::UniformWithReplacement:
        case SketchKind::UniformWithoutReplacement:
        case SketchKind::LeverageScore: {
            RowSample rs = spec.kind == SketchKind::UniformWithReplacement
                               ? draw_uniform_with(seed, n, spec.m)
                               : spec.kind == SketchKind::UniformWithoutReplacement
                                     ? draw_uniform_without(seed, n, spec.m)
                                     : draw_leverage(seed, require_lev(spec, n, lev), spec.m);
            Matrix s(spec.m, n);
            for (std::size_t i = 0; i < spec.m; ++i) s(i, rs.rows[i]) = rs.scales[i];
            return s;
        }
        case SketchKind::Sjlt: {
            Matrix s(spec.m, n);
            std::vector<std::size_t> rows(spec.s);
            std::vector<double> vals(spec.s);
            for (std::size_t j = 0; j < n; ++j) {
                sjlt_column(seed, j, spec.m, spec.s, rows.data(), vals.data());
                for (std::size_t t = 0; t < spec.s; ++t) s(rows[t], j) = vals[t];
            }
            return s;
        }
        case SketchKind::Hybrid: {
            RowSample outer = hybrid_outer(spec, n, seed);
            Matrix souter(outer.rows.size(), n);
            for (std::size_t i = 0; i < outer.rows.size(); ++i)
                souter(i, outer.rows[i]) = outer.scales[i];
            if (spec.m_prime == spec.m) return souter;
            Matrix sinner = materialize(*spec.inner, spec.m_prime, hybrid_inner_seed(seed));
            return matmul(sinner, souter);
        }
    }
    throw InvalidSpec("unreachable sketch kind");
}

}  // namespace sketchavg
