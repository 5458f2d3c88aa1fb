#include "srmc/quantization.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>

#include "srmc/detmath.hpp"
#include "srmc/error.hpp"

namespace srmc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

QuantizerSpec degenerate_spec(QuantizerKind kind, double mean) {
    QuantizerSpec q;
    q.kind = kind;
    q.degenerate = true;
    q.lo = q.hi = mean;
    q.below_value = q.above_value = mean;
    q.reproductions = {mean};
    return q;
}

void check_model(const GaussianModel& g) {
    if (!std::isfinite(g.mean) || !std::isfinite(g.sigma) || g.sigma < 0.0)
        throw DomainError("Gaussian model needs finite mean and sigma >= 0");
}

// pdf(a) - pdf(b) over the standard normal, infinite ends allowed.
double pdf_at(double u) { return std::isinf(u) ? 0.0 : detmath::normal_pdf(u); }

double u_pdf_at(double u) { return std::isinf(u) ? 0.0 : u * detmath::normal_pdf(u); }

// E[(Z - r)^2 ; a < Z < b]
double partial_mse(double a, double b, double r) {
    const double mass = gaussian_mass(a, b);
    const double second = mass - (u_pdf_at(b) - u_pdf_at(a));
    const double first = pdf_at(a) - pdf_at(b);
    return second - 2.0 * r * first + r * r * mass;
}

// E[Z | a < Z < b]
double centroid(double a, double b) {
    const double mass = gaussian_mass(a, b);
    if (mass < 1e-300) {
        if (std::isinf(a)) return b;
        if (std::isinf(b)) return a;
        return 0.5 * (a + b);
    }
    return (pdf_at(a) - pdf_at(b)) / mass;
}

}  // namespace

double gaussian_mass(double a, double b) {
    if (!(a <= b)) return 0.0;
    if (a >= 0.0) return detmath::normal_upper_tail(a) - detmath::normal_upper_tail(b);
    if (b <= 0.0) return detmath::normal_upper_tail(-b) - detmath::normal_upper_tail(-a);
    return 1.0 - detmath::normal_upper_tail(-a) - detmath::normal_upper_tail(b);
}

QuantizerSpec design_uniform_range(std::size_t levels, double lo, double hi) {
    if (levels < 1) throw DomainError("quantizer needs at least one level");
    if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi)) throw DomainError("quantizer range must be finite with lo < hi");
    QuantizerSpec q;
    q.kind = QuantizerKind::uniform;
    q.levels = levels;
    q.lo = lo;
    q.hi = hi;
    q.step = (hi - lo) / static_cast<double>(levels);
    q.boundaries.resize(levels + 1);
    for (std::size_t i = 0; i < levels; ++i) q.boundaries[i] = lo + static_cast<double>(i) * q.step;
    q.boundaries[levels] = hi;
    q.reproductions.resize(levels);
    for (std::size_t i = 0; i < levels; ++i) q.reproductions[i] = lo + (static_cast<double>(i) + 0.5) * q.step;
    q.below_value = lo - 0.5 * q.step;
    q.above_value = hi + 0.5 * q.step;
    return q;
}

QuantizerSpec design_uniform_t(const GaussianModel& g, std::size_t levels, double t_star) {
    check_model(g);
    if (levels < 2) throw DomainError("uniform quantizer needs levels >= 2");
    if (!(t_star > 0.0)) throw DomainError("t* must be positive");
    if (g.sigma == 0.0) return degenerate_spec(QuantizerKind::uniform, g.mean);
    const double half = t_star * g.sigma;
    return design_uniform_range(levels, g.mean - half, g.mean + half);
}

QuantizerSpec design_uniform(const GaussianModel& g, std::size_t levels, double delta_sat, const BoundFn& bound) {
    if (!(delta_sat > 0.0) || !(delta_sat < 1.0)) throw DomainError("delta_sat must lie in (0, 1)");
    return design_uniform_t(g, levels, invert_bound(bound, delta_sat));
}

QuantizerSpec design_uniform_step(const GaussianModel& g, double step, double t_star) {
    check_model(g);
    if (!(step > 0.0) || !std::isfinite(step)) throw DomainError("quantizer step must be positive");
    if (!(t_star > 0.0)) throw DomainError("t* must be positive");
    if (g.sigma == 0.0) return degenerate_spec(QuantizerKind::uniform, g.mean);
    const double cells = std::ceil(t_star * g.sigma / step);
    if (cells > 1e8) throw DomainError("step too small for the quantizer range");
    const auto half = static_cast<std::size_t>(std::max(1.0, cells));
    const double extent = static_cast<double>(half) * step;
    QuantizerSpec q = design_uniform_range(2 * half, g.mean - extent, g.mean + extent);
    return q;
}

QuantizerSpec design_lloyd_max(const GaussianModel& g, std::size_t levels, double tol) {
    check_model(g);
    if (levels < 2) throw DomainError("Lloyd-Max quantizer needs levels >= 2");
    if (!(tol > 0.0)) throw DomainError("Lloyd-Max tolerance must be positive");
    if (g.sigma == 0.0) return degenerate_spec(QuantizerKind::lloyd_max, g.mean);

    const std::size_t L = levels;
    const double Ld = static_cast<double>(L);
    // Companding start: quantiles of N(0, 3), the high-rate optimum point density.
    std::vector<double> r(L), b(L + 1);
    for (std::size_t i = 0; i < L; ++i)
        r[i] = std::sqrt(3.0) * detmath::normal_quantile((static_cast<double>(i) + 0.5) / Ld);
    b[0] = -kInf;
    b[L] = kInf;

    bool converged = false;
    std::size_t it = 0;
    while (it < kLloydMaxIterations) {
        ++it;
        for (std::size_t i = 1; i < L; ++i) b[i] = 0.5 * (r[i - 1] + r[i]);
        double moved = 0.0;
        for (std::size_t i = 0; i < L; ++i) {
            const double c = centroid(b[i], b[i + 1]);
            moved = std::max(moved, std::abs(c - r[i]));
            r[i] = c;
        }
        if (moved < tol) {
            converged = true;
            break;
        }
    }
    for (std::size_t i = 1; i < L; ++i) b[i] = 0.5 * (r[i - 1] + r[i]);
    b[0] = 2.0 * r[0] - b[1];
    b[L] = 2.0 * r[L - 1] - b[L - 1];

    QuantizerSpec unit;
    unit.kind = QuantizerKind::lloyd_max;
    unit.levels = L;
    unit.converged = converged;
    unit.iterations = it;
    unit.boundaries = b;
    unit.reproductions = r;
    unit.lo = b[0];
    unit.hi = b[L];
    unit.below_value = centroid(-kInf, b[0]);
    unit.above_value = centroid(b[L], kInf);
    return scale_quantizer(unit, g);
}

QuantizerSpec scale_quantizer(const QuantizerSpec& unit, const GaussianModel& g) {
    check_model(g);
    if (g.sigma == 0.0) return degenerate_spec(unit.kind, g.mean);
    QuantizerSpec q = unit;
    const auto map = [&](double v) { return g.mean + g.sigma * v; };
    for (auto& v : q.boundaries) v = map(v);
    for (auto& v : q.reproductions) v = map(v);
    q.lo = map(unit.lo);
    q.hi = map(unit.hi);
    q.step = unit.step * g.sigma;
    q.below_value = map(unit.below_value);
    q.above_value = map(unit.above_value);
    return q;
}

std::size_t quantize(const QuantizerSpec& q, double v) {
    if (std::isnan(v)) throw DomainError("cannot quantize NaN");
    if (q.degenerate) return 0;
    if (v < q.lo) return 0;
    if (v >= q.hi) return q.levels + 1;
    const auto it = std::upper_bound(q.boundaries.begin(), q.boundaries.end(), v);
    return static_cast<std::size_t>(it - q.boundaries.begin());
}

double dequantize(const QuantizerSpec& q, std::size_t c) {
    if (c >= q.codebook_size())
        throw IndexError("codeword " + std::to_string(c) + " outside codebook of size " +
                         std::to_string(q.codebook_size()));
    if (q.degenerate) return q.reproductions[0];
    if (c == 0) return q.below_value;
    if (c == q.levels + 1) return q.above_value;
    return q.reproductions[c - 1];
}

std::vector<double> codeword_probs(const QuantizerSpec& q, const GaussianModel& g) {
    check_model(g);
    if (q.degenerate) return {1.0};
    std::vector<double> p(q.levels + 2, 0.0);
    if (g.sigma == 0.0) {
        p[quantize(q, g.mean)] = 1.0;
        return p;
    }
    std::vector<double> u(q.levels + 3);
    u[0] = -kInf;
    for (std::size_t i = 0; i <= q.levels; ++i) u[i + 1] = (q.boundaries[i] - g.mean) / g.sigma;
    u[q.levels + 2] = kInf;
    for (std::size_t c = 0; c < p.size(); ++c) p[c] = gaussian_mass(u[c], u[c + 1]);
    return p;
}

double entropy(std::span<const double> probs) {
    double h = 0.0;
    for (double p : probs) {
        if (p < 0.0) throw DomainError("negative probability");
        if (p > 0.0) h -= p * std::log2(p);
    }
    return h;
}

double distortion(const QuantizerSpec& q, const GaussianModel& g) {
    check_model(g);
    if (g.sigma == 0.0) {
        const double e = g.mean - dequantize(q, quantize(q, g.mean));
        return e * e;
    }
    const auto norm = [&](double v) { return (v - g.mean) / g.sigma; };
    if (q.degenerate) return g.sigma * g.sigma * partial_mse(-kInf, kInf, norm(q.reproductions[0]));
    double acc = partial_mse(-kInf, norm(q.lo), norm(q.below_value));
    for (std::size_t i = 0; i < q.levels; ++i)
        acc += partial_mse(norm(q.boundaries[i]), norm(q.boundaries[i + 1]), norm(q.reproductions[i]));
    acc += partial_mse(norm(q.hi), kInf, norm(q.above_value));
    return g.sigma * g.sigma * acc;
}

std::uint64_t fingerprint(const QuantizerSpec& q) {
    std::uint64_t h = 14695981039346656037ull;
    auto mix = [&](double v) {
        const auto bits = std::bit_cast<std::uint64_t>(v);
        for (int i = 0; i < 8; ++i) {
            h ^= (bits >> (8 * i)) & 0xffu;
            h *= 1099511628211ull;
        }
    };
    for (double v : q.boundaries) mix(v);
    for (double v : q.reproductions) mix(v);
    mix(q.below_value);
    mix(q.above_value);
    return h;
}

}  // namespace srmc
