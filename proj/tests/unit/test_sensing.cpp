#include <doctest.h>

#include <algorithm>
#include <complex>
#include <set>

#include "oracles.hpp"
#include "srmc/error.hpp"
#include "srmc/sensing.hpp"

using namespace srmc;

namespace {

SensingSpec make_spec(Mode mode, const std::string& t, std::size_t n, std::size_t m, std::uint64_t seed = 7) {
    SensingSpec s;
    s.mode = mode;
    if (mode != Mode::rc) s.transform = TransformOp::parse(t, n);
    s.n = n;
    s.m = m;
    s.seed = seed;
    return s;
}

// z from the dense sensing matrix of the draw.
std::vector<double> dense_z(const SensingSpec& s, const SensingDraw& d, const std::vector<double>& x) {
    const std::size_t n = s.n;
    const double scale = std::sqrt(static_cast<double>(n) / s.m);
    std::vector<double> z(n, 0.0);
    if (s.mode == Mode::rc) {
        using C = std::complex<double>;
        std::vector<C> f(n);
        for (std::size_t k = 0; k < n; ++k)
            for (std::size_t j = 0; j < n; ++j)
                f[k] += x[j] * std::polar(1.0 / std::sqrt(double(n)), -2.0 * std::numbers::pi * double(k * j % n) / n);
        for (std::size_t k = 0; k < n; ++k) f[k] *= d.rc_phases[k];
        for (std::size_t j = 0; j < n; ++j) {
            C acc = 0;
            for (std::size_t k = 0; k < n; ++k)
                acc += f[k] * std::polar(1.0 / std::sqrt(double(n)), 2.0 * std::numbers::pi * double(k * j % n) / n);
            z[j] = scale * acc.real();
        }
        return z;
    }
    const Eigen::MatrixXd w = s.transform->dense();
    Eigen::MatrixXd r = Eigen::MatrixXd::Zero(n, n);
    for (std::size_t k = 0; k < n; ++k) {
        if (s.mode == Mode::lr) r(k, k) = d.rademacher[k];
        if (s.mode == Mode::gr) r(d.permutation[k] - 1, k) = 1.0;
        if (s.mode == Mode::rst) r(k, k) = 1.0;
    }
    const Eigen::MatrixXd phi = scale * w * r;
    return oracle::apply(phi, x);
}

}  // namespace

TEST_CASE("mixture vector matches the dense sensing matrix") {
    const auto xv = oracle::gaussian(32, 11);
    const Signal x(xv);
    for (auto [mode, t] : {std::pair{Mode::lr, "dct"}, std::pair{Mode::gr, "wht"}, std::pair{Mode::rc, ""},
                           std::pair{Mode::rst, "dft"}, std::pair{Mode::lr, "dft"}}) {
        const SensingSpec s = make_spec(mode, t, 32, 8);
        const SensingDraw d = draw(s);
        const auto z = mixture_vector(s, d, x);
        const auto ref = dense_z(s, d, xv);
        for (std::size_t i = 0; i < 32; ++i) CHECK(z[i] == doctest::Approx(ref[i]).epsilon(1e-10));
        const auto y = measure(s, d, x);
        REQUIRE(y.size() == 8);
        for (std::size_t k = 0; k < 8; ++k) CHECK(y[k] == z[d.selection[k] - 1]);
    }
}

TEST_CASE("per-draw energy identity |z|^2 = (n/m)|x|^2") {
    const Signal x(oracle::gaussian(256, 5));
    for (auto [mode, t] : {std::pair{Mode::lr, "wht"}, std::pair{Mode::gr, "dct"}, std::pair{Mode::rc, ""},
                           std::pair{Mode::rst, "dft"}})
        for (std::uint64_t seed = 0; seed < 20; ++seed) {
            const SensingSpec s = make_spec(mode, t, 256, 64, seed);
            const auto z = mixture_vector(s, draw(s), x);
            double e = 0;
            for (double v : z) e += v * v;
            CHECK(e == doctest::Approx(4.0 * x.norm2()).epsilon(1e-9));
        }
}

TEST_CASE("draws are deterministic, valid and stream separated") {
    const SensingSpec s = make_spec(Mode::gr, "wht", 64, 20, 42);
    const SensingDraw a = draw(s), b = draw(s);
    CHECK(a.permutation == b.permutation);
    CHECK(a.selection == b.selection);
    std::vector<std::size_t> p = a.permutation;
    std::sort(p.begin(), p.end());
    for (std::size_t k = 0; k < 64; ++k) CHECK(p[k] == k + 1);
    CHECK(std::set<std::size_t>(a.selection.begin(), a.selection.end()).size() == 20);
    // the selection stream does not depend on the mode
    CHECK(draw(make_spec(Mode::lr, "wht", 64, 20, 42)).selection == a.selection);
    CHECK(draw_selection(s, 42) == a.selection);
    CHECK(draw(s, 43).selection != a.selection);
}

TEST_CASE("random convolution phases are conjugate symmetric") {
    const SensingSpec s = make_spec(Mode::rc, "", 16, 4, 3);
    const SensingDraw d = draw(s);
    for (std::size_t k = 1; k <= 16; ++k) {
        CHECK(std::abs(d.rc_phases[k - 1]) == doctest::Approx(1.0));
        const std::size_t mirror = (16 + 2 - k - 1) % 16 + 1;
        CHECK(std::abs(d.rc_phases[k - 1] - std::conj(d.rc_phases[mirror - 1])) < 1e-15);
        if (self_symmetric(k, 16)) CHECK(d.rc_phases[k - 1].imag() == 0.0);
    }
}

TEST_CASE("with-replacement selection covers duplicates and stays in range") {
    SensingSpec s = make_spec(Mode::lr, "wht", 8, 64, 1);
    s.selection = Selection::with_replacement;
    const SensingDraw d = draw(s);
    CHECK(d.selection.size() == 64);
    for (std::size_t c : d.selection) CHECK((c >= 1 && c <= 8));
}

TEST_CASE("spec validation") {
    SensingSpec s = make_spec(Mode::lr, "wht", 8, 9);
    CHECK_THROWS_AS(s.validate(), DomainError);
    s = make_spec(Mode::rc, "", 7, 2);
    CHECK_THROWS_AS(s.validate(), DomainError);
    s = make_spec(Mode::lr, "wht", 8, 4);
    s.n = 16;
    CHECK_THROWS_AS(s.validate(), DimensionError);
    const SensingSpec ok = make_spec(Mode::lr, "wht", 8, 4);
    CHECK_THROWS_AS(mixture_vector(ok, draw(ok), Signal(std::vector<double>(5, 1.0))), DimensionError);
}

TEST_CASE("zero padding") {
    const Signal x({1.0, 2.0, 3.0});
    const Signal p = zero_pad(x, next_power_of_two(3));
    CHECK(p.size() == 4);
    CHECK(p[3] == 0.0);
    CHECK(p.norm2() == x.norm2());
    CHECK_THROWS_AS(zero_pad(x, 2), DomainError);
    CHECK_THROWS_AS(Signal({1.0, 5.0}, 2.0), DomainError);
}
