#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "srmc/error.hpp"
#include "srmc/harness.hpp"
#include "srmc/tailbounds.hpp"

using namespace srmc;

namespace {
// (1+u) ln(1+u) - u in long double, adequate away from zero
double xi_ref(double u) {
    const long double U = u;
    return static_cast<double>(((1 + U) * std::log1p(U) - U) / (U * U));
}
}  // namespace

TEST_CASE("xi") {
    CHECK(xi(0.0) == 0.5);
    CHECK(xi(4.115) == doctest::Approx(0.25).epsilon(4e-3));
    CHECK(std::abs(xi(4.115) - 0.25) < 1e-3);
    CHECK(std::abs(xi(1e-6) - 0.5) < 1e-6);
    CHECK(xi(1e-6) == doctest::Approx(0.5 - 1e-6 / 6 + 1e-12 / 12).epsilon(1e-14));
    for (double u : {1e-3, 0.01, 0.3, 0.9, 1.0, 1.5, 10.0, 1e4})
        CHECK(xi(u) == doctest::Approx(xi_ref(u)).epsilon(1e-12));
    // continuity across the branch points
    for (double u : {1e-4, 1.0}) CHECK(std::abs(xi(std::nextafter(u, 0.0)) - xi(u)) < 1e-12);
    double prev = xi(0.0);
    for (double u = 1e-6; u < 100; u *= 1.1) {
        CHECK(xi(u) <= prev);
        prev = xi(u);
    }
    CHECK_THROWS_AS(xi(-1e-9), DomainError);
}

TEST_CASE("bound values") {
    CHECK(lr_bound(0.0) == 2.0);
    CHECK(lr_bound(2.0) == doctest::Approx(2 * std::exp(-2.0)));
    CHECK(rc_bound(2.0, 0.1) == doctest::Approx(2 * std::exp(-1.0)));
    CHECK(rc_bound(1e-3, 1e6) == doctest::Approx(2 * std::exp(-0.5e-6)));
    CHECK(gr_bound(0.0, 3.0, 64) == 2.0);
    CHECK_THROWS_AS(rc_bound(1.0, 0.0), DomainError);
    CHECK_THROWS_AS(gr_bound(1.0, -1.0, 8), DomainError);
    // large n: eta ~ tau^2 / 8n
    const double n = 1e6, tau = 0.5 * std::sqrt(n);
    CHECK(-std::log(gr_bound(1.0, tau, 1000000) / 2) == doctest::Approx(0.25 / 8).epsilon(1e-3));
}

TEST_CASE("monotone and ordered on a grid") {
    for (int i = 0; i < 1000; ++i) {
        const double t0 = 10.0 * i / 1000, t1 = 10.0 * (i + 1) / 1000;
        CHECK(lr_bound(t1) <= lr_bound(t0));
        for (double tau : {0.05, 1.0, 20.0}) {
            CHECK(rc_bound(t1, tau) <= rc_bound(t0, tau));
            CHECK(lr_bound(t0) <= rc_bound(t0, tau));
            CHECK(rc_bound(t0, tau) <= 2 * std::exp(-t0 * t0 / 4) * (1 + 1e-15));
        }
        CHECK(gr_bound(t1, 5.0, 256) <= gr_bound(t0, 5.0, 256));
    }
}

TEST_CASE("bound inversion") {
    CHECK(invert_bound(lr_bound, 2 * std::exp(-2.0)) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(invert_bound(lr_bound, 0.01) == doctest::Approx(3.2552473).epsilon(1e-7));
    CHECK(invert_bound([](double t) { return gr_bound(t, 3.0, 64); }, 2 - 1e-9) < 1e-3);
    const BoundFn rc = [](double t) { return rc_bound(t, 0.7); };
    for (int i = 1; i <= 100; ++i) {
        const double t = 0.1 * i;
        CHECK(invert_bound(lr_bound, lr_bound(t)) <= t);
        CHECK(invert_bound(rc, rc(t)) <= t);
    }
    CHECK_THROWS_AS(invert_bound(lr_bound, 0.0), DomainError);
    CHECK_THROWS_AS(invert_bound(lr_bound, 2.0), DomainError);
}

TEST_CASE("tail parameters") {
    const std::size_t n = 64;
    const TransformOp t = TransformOp::wht(n);
    std::vector<double> signs(n);
    for (std::size_t k = 0; k < n; ++k) signs[k] = (k * 7 + 3) % 5 < 2 ? 1.0 : -1.0;
    const Signal pulses = synth_signal("pulse_train", n, {.d = 4});
    for (std::size_t j = 2; j <= n; ++j) {
        const double tau = tau_gr(t, j, pulses);
        CHECK(tau <= n / std::sqrt(n - 1.0) + 1e-12);
        CHECK(tau == doctest::Approx(n / std::sqrt(n - 1.0) / std::sqrt(3.0)));
    }
    CHECK_THROWS_AS(tau_gr(t, 1, pulses), DomainError);
    CHECK_THROWS_AS(tau_gr(t, 2, Signal(std::vector<double>(n, 1.0))), DomainError);
    std::vector<double> imp(n, 0.0);
    imp[3] = 1.0;
    CHECK(tau_rc(Signal(imp)) == doctest::Approx(0.5 * std::sqrt(double(n))));
}

TEST_CASE("Monte Carlo exceedance stays under the bounds") {
    const std::size_t n = 64;
    for (Mode mode : {Mode::lr, Mode::rc, Mode::gr}) {
        ExperimentConfig cfg;
        cfg.spec.mode = mode;
        if (mode != Mode::rc) cfg.spec.transform = TransformOp::wht(n);
        cfg.spec.n = n;
        cfg.spec.m = 16;
        cfg.signal = Signal(oracle::gaussian(n, 6));
        cfg.trials = 20000;
        cfg.probe = {2, 7, 40};
        for (const TailRow& row : mc_tails(cfg)) CHECK(row.pass);
    }
}
