#include <doctest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "srmc/detmath.hpp"
#include "srmc/error.hpp"
#include "srmc/quantization.hpp"
#include "srmc/rng.hpp"

using namespace srmc;

namespace {

std::size_t argmin_codeword(const QuantizerSpec& q, double v) {
    if (v < q.lo) return 0;
    if (v >= q.hi) return q.levels + 1;
    std::size_t best = 1;
    for (std::size_t c = 1; c <= q.levels; ++c)
        if (std::abs(v - dequantize(q, c)) < std::abs(v - dequantize(q, best))) best = c;
    return best;
}

double std_pdf(double u) { return std::exp(-0.5 * u * u) / std::sqrt(2 * std::numbers::pi); }

// distortion by quadrature over [-12, 12]
double distortion_oracle(const QuantizerSpec& q) {
    auto f = [&](double u) {
        const double e = u - dequantize(q, quantize(q, u));
        return e * e * std_pdf(u);
    };
    const int N = 400000;
    const double a = -12, b = 12, h = (b - a) / N;
    double s = 0;
    for (int i = 0; i < N; ++i) s += f(a + (i + 0.5) * h);
    return s * h;
}

}  // namespace

TEST_CASE("uniform quantizer construction") {
    const QuantizerSpec q = design_uniform_t({0.0, 1.0}, 2, 1.0);
    CHECK(q.boundaries == std::vector<double>{-1.0, 0.0, 1.0});
    CHECK(q.reproductions == std::vector<double>{-0.5, 0.5});
    CHECK(q.step == 1.0);
    CHECK(quantize(q, -0.5) == 1);
    CHECK(quantize(q, 0.0) == 2);
    CHECK(quantize(q, 2.0) == 3);
    CHECK(quantize(q, -1.0001) == 0);
    CHECK(dequantize(q, 0) == -1.5);
    CHECK(dequantize(q, 3) == 1.5);
    CHECK_THROWS_AS(dequantize(q, 4), IndexError);

    const QuantizerSpec r = design_uniform({0.0, 1.0}, 8, 0.01, lr_bound);
    CHECK(r.hi == doctest::Approx(3.2552473).epsilon(1e-7));
    CHECK(r.lo == doctest::Approx(-3.2552473).epsilon(1e-7));

    const QuantizerSpec s = design_uniform_step({1.0, 2.0}, 0.5, 2.2);
    CHECK(s.levels == 18);
    CHECK(s.step == 0.5);
    CHECK(s.lo == doctest::Approx(1.0 - 4.5));

    const QuantizerSpec d = design_uniform_t({3.0, 0.0}, 4, 2.0);
    CHECK(d.degenerate);
    CHECK(d.codebook_size() == 1);
    CHECK(quantize(d, 100.0) == 0);
    CHECK(dequantize(d, 0) == 3.0);
}

TEST_CASE("uniform in-range error and nearest-codeword agreement") {
    const QuantizerSpec q = design_uniform_t({0.3, 1.7}, 64, 3.0);
    CounterRng rng(5, 1);
    for (int i = 0; i < 10000; ++i) {
        const double v = 0.3 + 12.0 * (rng.uniform() - 0.5) * 1.7;
        const std::size_t c = quantize(q, v);
        CHECK(c == argmin_codeword(q, v));
        if (!q.saturated(c)) CHECK(std::abs(v - dequantize(q, c)) <= q.step / 2 * (1 + 1e-12));
    }
    for (std::size_t c = 1; c <= q.levels; ++c) CHECK(quantize(q, dequantize(q, c)) == c);
}

TEST_CASE("Lloyd-Max") {
    const QuantizerSpec two = design_lloyd_max({0.0, 1.0}, 2, 1e-12);
    CHECK(two.converged);
    CHECK(std::abs(two.reproductions[1] - std::sqrt(2 / std::numbers::pi)) < 1e-6);
    CHECK(std::abs(two.reproductions[0] + std::sqrt(2 / std::numbers::pi)) < 1e-6);

    const QuantizerSpec four = design_lloyd_max({0.0, 1.0}, 4, 1e-10);
    const QuantizerSpec uni = design_uniform_range(4, four.lo, four.hi);
    CHECK(distortion(four, {0.0, 1.0}) < distortion(uni, {0.0, 1.0}));
    CHECK(distortion(four, {0.0, 1.0}) == doctest::Approx(distortion_oracle(four)).epsilon(1e-6));
    CHECK(distortion(uni, {0.0, 1.0}) == doctest::Approx(distortion_oracle(uni)).epsilon(1e-6));
    // classical table value for 4 levels
    CHECK(four.reproductions[3] == doctest::Approx(1.5104).epsilon(1e-4));
    // saturation cells refine the outer regions, so distortion sits below the table value
    CHECK(distortion(four, {0.0, 1.0}) < 0.11752);
    CHECK(distortion(four, {0.0, 1.0}) > 0.05);

    // optimality conditions
    const QuantizerSpec eight = design_lloyd_max({0.0, 1.0}, 8, 1e-12);
    for (std::size_t i = 1; i < 8; ++i)
        CHECK(eight.boundaries[i] == doctest::Approx(0.5 * (eight.reproductions[i - 1] + eight.reproductions[i])));
    for (std::size_t i = 0; i < 8; ++i) {
        const double a = i == 0 ? -INFINITY : eight.boundaries[i], b = i == 7 ? INFINITY : eight.boundaries[i + 1];
        const double pa = std::isinf(a) ? 0.0 : detmath::normal_pdf(a), pb = std::isinf(b) ? 0.0 : detmath::normal_pdf(b);
        CHECK(eight.reproductions[i] == doctest::Approx((pa - pb) / gaussian_mass(a, b)).epsilon(1e-9));
    }
    // affine equivariance
    const QuantizerSpec shifted = design_lloyd_max({2.0, 3.0}, 8, 1e-12);
    for (std::size_t i = 0; i < 8; ++i)
        CHECK(shifted.reproductions[i] == doctest::Approx(2.0 + 3.0 * eight.reproductions[i]).epsilon(1e-12));
    CHECK(shifted.below_value < shifted.lo);
    CHECK(shifted.above_value > shifted.hi);
}

TEST_CASE("codeword probabilities") {
    const QuantizerSpec q = design_uniform({0.0, 1.0}, 2, 0.01, [](double t) { return 2 * detmath::normal_upper_tail(t); });
    const auto p = codeword_probs(q, {0.0, 1.0});
    REQUIRE(p.size() == 4);
    CHECK(p[0] == doctest::Approx(0.005).epsilon(1e-6));
    CHECK(p[1] == doctest::Approx(0.495).epsilon(1e-6));
    CHECK(p[0] == doctest::Approx(p[3]).epsilon(1e-12));
    CHECK(p[1] == doctest::Approx(p[2]).epsilon(1e-12));
    double s = 0;
    for (double v : p) s += v;
    CHECK(std::abs(s - 1) < 1e-12);

    const QuantizerSpec big = design_uniform_t({1.0, 2.0}, 256, 4.0);
    const auto pb = codeword_probs(big, {1.0, 2.0});
    s = 0;
    for (double v : pb) s += v;
    CHECK(std::abs(s - 1) < 1e-12);
    for (std::size_t c = 0; c < pb.size() / 2; ++c) CHECK(pb[c] == doctest::Approx(pb[pb.size() - 1 - c]).epsilon(1e-9));
    // saturation mass against the bound that set the range
    const QuantizerSpec lr = design_uniform({0.0, 1.0}, 16, 0.05, lr_bound);
    const auto pl = codeword_probs(lr, {0.0, 1.0});
    CHECK(pl.front() + pl.back() <= 0.05);
}

TEST_CASE("entropy and distortion") {
    const std::vector<double> u(8, 0.125);
    CHECK(entropy(u) == doctest::Approx(3.0));
    CHECK(entropy(std::vector<double>{1.0, 0.0}) == 0.0);
    CHECK_THROWS_AS(entropy(std::vector<double>{1.1, -0.1}), DomainError);

    const QuantizerSpec lm = design_lloyd_max({0.0, 1.0}, 8, 1e-10);
    const double h_lm = entropy(codeword_probs(lm, {0.0, 1.0}));
    CHECK(h_lm <= std::log2(10.0));
    // uniform quantizer with the same distortion
    const double target = distortion(lm, {0.0, 1.0});
    double lo = 0.01, hi = 2.0;
    for (int i = 0; i < 60; ++i) {
        const double step = 0.5 * (lo + hi);
        if (distortion(design_uniform_step({0.0, 1.0}, step, 5.0), {0.0, 1.0}) > target)
            hi = step;
        else
            lo = step;
    }
    const QuantizerSpec matched = design_uniform_step({0.0, 1.0}, lo, 5.0);
    const double h_u = entropy(codeword_probs(matched, {0.0, 1.0}));
    CHECK(std::abs(h_lm - h_u) < 0.5);

    double prev = INFINITY;
    for (std::size_t L = 2; L <= 256; L *= 2) {
        const double dist = distortion(design_uniform_t({0.0, 1.0}, L, 3.0), {0.0, 1.0});
        CHECK(dist <= prev);
        prev = dist;
    }
}

TEST_CASE("saturation rate under model-matched data") {
    const double delta = 0.01;
    const QuantizerSpec q = design_uniform({0.0, 1.0}, 32, delta, lr_bound);
    CounterRng rng(17, 2);
    const int N = 1000000;
    int sat = 0;
    for (int i = 0; i < N; ++i) sat += q.saturated(quantize(q, rng.normal()));
    CHECK(double(sat) / N <= delta + 3 * std::sqrt(delta / N));
}
