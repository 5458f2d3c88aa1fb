#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "srmc/error.hpp"
#include "srmc/harness.hpp"
#include "srmc/rng.hpp"

using namespace srmc;

TEST_CASE("synthetic signals") {
    const Signal p = synth_signal("pulse_train", 16, {.d = 4});
    for (std::size_t k = 0; k < 16; ++k) CHECK((p[k] != 0.0) == (k % 4 == 0));
    CHECK(!alpha_x(synth_signal("constant", 32, {.value = 2.0})));
    CHECK(synth_signal("constant", 8, {.value = 2.0})[5] == 2.0);
    const Signal r = synth_signal("ramp", 5);
    CHECK(r[4] > r[0]);

    const std::size_t n = 1 << 14;
    const Signal a = synth_signal("ar1", n, {.rho = 0.95});
    const std::vector<double> v(a.samples().begin(), a.samples().end());
    const std::vector<double> head(v.begin(), v.end() - 1), tail(v.begin() + 1, v.end());
    CHECK(std::abs(pearson(head, tail) - 0.95) < 0.02);

    const Signal s1 = synth_signal("smooth", 256, {.seed = 4}), s2 = synth_signal("smooth", 256, {.seed = 4});
    CHECK(s1.vec() == s2.vec());
    CHECK(synth_signal("smooth", 256, {.seed = 5}).vec() != s1.vec());

    const Signal sp = synth_signal("sparse_in", 64, {.k = 3, .transform = "dct"});
    const auto c = TransformOp::dct(64).apply_forward(sp.samples());
    int nz = 0;
    for (double e : c) nz += std::abs(e) > 1e-9;
    CHECK(nz == 3);
    CHECK_THROWS_AS(synth_signal("nope", 8), DomainError);
}

TEST_CASE("Monte Carlo moments have small z-scores") {
    const std::size_t n = 64;
    for (Mode mode : {Mode::lr, Mode::gr, Mode::rc}) {
        ExperimentConfig cfg;
        cfg.spec.mode = mode;
        if (mode != Mode::rc) cfg.spec.transform = TransformOp::dct(n);
        cfg.spec.n = n;
        cfg.spec.m = 16;
        cfg.signal = synth_signal("ar1", n, {.rho = 0.7, .seed = 3});
        cfg.trials = 20000;
        cfg.probe = {1, 2, 3, 10, 33};
        const MomentsReport rep = mc_moments(cfg);
        CAPTURE(to_string(mode));
        CHECK(rep.max_abs_z < 5.0);
    }
    ExperimentConfig lr;
    lr.spec = {.mode = Mode::lr, .transform = TransformOp::wht(32), .n = 32, .m = 8};
    lr.signal = synth_signal("constant", 32);
    lr.trials = 2000;
    lr.probe = {2, 3, 4};
    const MomentsReport c = mc_moments(lr);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            if (i != j) CHECK(c.theoretical_cov(i, j) == 0.0);
    lr.trials = 999;
    CHECK_THROWS_AS(mc_moments(lr), DomainError);
}

TEST_CASE("Q-Q machinery") {
    CounterRng rng(1, Stream::harness);
    std::vector<double> s(200000);
    for (auto& v : s) v = 3.0 + 2.0 * rng.normal();
    const QqResult q = qq_from_samples(s);
    CHECK(q.normal_quantiles.size() == kQqGrid);
    CHECK(q.correlation > 0.9999);
    CHECK(q.normal_quantiles.front() == doctest::Approx(-3.2972).epsilon(1e-3));
    for (std::size_t i = 1; i < kQqGrid; ++i) CHECK(q.sample_quantiles[i] >= q.sample_quantiles[i - 1]);
    std::vector<double> heavy(200000);
    for (auto& v : heavy) {
        const double u = rng.uniform();
        v = (u < 0.5 ? -1 : 1) * std::log(1 - std::abs(2 * u - 1) + 1e-300);
    }
    CHECK(qq_from_samples(heavy).correlation < q.correlation);
    CHECK_THROWS_AS(qq_from_samples(std::vector<double>(10, 1.0)), DomainError);
}

TEST_CASE("replacement ratio") {
    CHECK(replacement_ratio(10, 2) == doctest::Approx(0.9).epsilon(1e-15));
    CHECK(replacement_ratio(10000, 10) == doctest::Approx(0.99551).epsilon(1e-5));
    CHECK(replacement_ratio(5, 1) == 1.0);
    CHECK(replacement_ratio(5, 5) == doctest::Approx(120.0 / 3125));
    double prev = 0;
    for (std::size_t n : {1000, 10000, 100000}) {
        const auto m = static_cast<std::size_t>(std::ceil(std::pow(double(n), 0.4)));
        const double r = replacement_ratio(n, m);
        CHECK(r > prev);
        CHECK(r < 1.0);
        prev = r;
    }
    const ReplacementReport rep = replacement_study(64, 4, 4000, 3);
    CHECK(rep.exact_ratio == doctest::Approx(replacement_ratio(64, 4)));
    REQUIRE(rep.empirical_ratio);
    CHECK(*rep.empirical_ratio > 0.5);
    CHECK(*rep.empirical_ratio < 1.5);
    CHECK_THROWS_AS(replacement_ratio(4, 5), DomainError);
}

TEST_CASE("pearson") {
    CHECK(pearson({1, 2, 3}, {2, 4, 6}) == doctest::Approx(1.0));
    CHECK(pearson({1, 2, 3}, {3, 2, 1}) == doctest::Approx(-1.0));
    CHECK_THROWS(pearson({1, 2}, {1}));
}
