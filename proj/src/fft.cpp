#include "srmc/fft.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <numbers>
#include <string>

#include "srmc/error.hpp"

namespace srmc {

namespace {

struct Radix2Plan {
    std::size_t n = 0;
    std::vector<std::size_t> bitrev;
    std::vector<cplx> twiddle;  // exp(-2 pi i k / n), k < n/2
};

const Radix2Plan& plan_for(std::size_t n) {
    thread_local std::map<std::size_t, std::unique_ptr<Radix2Plan>> cache;
    auto& slot = cache[n];
    if (!slot) {
        auto plan = std::make_unique<Radix2Plan>();
        plan->n = n;
        plan->bitrev.resize(n);
        std::size_t bits = 0;
        while ((std::size_t{1} << bits) < n) ++bits;
        for (std::size_t i = 0; i < n; ++i) {
            std::size_t r = 0;
            for (std::size_t b = 0; b < bits; ++b)
                if (i & (std::size_t{1} << b)) r |= std::size_t{1} << (bits - 1 - b);
            plan->bitrev[i] = r;
        }
        plan->twiddle.resize(n / 2);
        for (std::size_t k = 0; k < n / 2; ++k) {
            const double ang = -2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
            plan->twiddle[k] = {std::cos(ang), std::sin(ang)};
        }
        slot = std::move(plan);
    }
    return *slot;
}

void radix2(std::span<cplx> a, bool inverse) {
    const std::size_t n = a.size();
    const Radix2Plan& plan = plan_for(n);
    for (std::size_t i = 0; i < n; ++i)
        if (i < plan.bitrev[i]) std::swap(a[i], a[plan.bitrev[i]]);
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const std::size_t half = len / 2;
        const std::size_t step = n / len;
        for (std::size_t start = 0; start < n; start += len) {
            for (std::size_t k = 0; k < half; ++k) {
                cplx w = plan.twiddle[k * step];
                if (inverse) w = std::conj(w);
                const cplx u = a[start + k];
                const cplx v = a[start + k + half] * w;
                a[start + k] = u + v;
                a[start + k + half] = u - v;
            }
        }
    }
}

void direct_dft(std::span<cplx> a, bool inverse) {
    const std::size_t n = a.size();
    if (n > kDenseFallbackMax)
        throw DomainError("DFT of non power-of-two length " + std::to_string(n) +
                          " exceeds the dense fallback limit");
    std::vector<cplx> out(n);
    const double sgn = inverse ? 1.0 : -1.0;
    for (std::size_t f = 0; f < n; ++f) {
        cplx acc{0.0, 0.0};
        for (std::size_t k = 0; k < n; ++k) {
            // reduce f*k mod n before the angle so large products stay exact
            const std::size_t fk = (f * k) % n;
            const double ang = sgn * 2.0 * std::numbers::pi * static_cast<double>(fk) / static_cast<double>(n);
            acc += a[k] * cplx{std::cos(ang), std::sin(ang)};
        }
        out[f] = acc;
    }
    std::copy(out.begin(), out.end(), a.begin());
}

}  // namespace

void fft_inplace(std::span<cplx> a, bool inverse) {
    if (a.size() <= 1) return;
    if (is_power_of_two(a.size()))
        radix2(a, inverse);
    else
        direct_dft(a, inverse);
}

std::vector<cplx> unitary_dft(std::span<const double> x) {
    std::vector<cplx> v(x.begin(), x.end());
    fft_inplace(v, false);
    const double s = 1.0 / std::sqrt(static_cast<double>(v.size()));
    for (auto& e : v) e *= s;
    return v;
}

std::vector<cplx> unitary_idft(std::span<const cplx> v) {
    std::vector<cplx> out(v.begin(), v.end());
    fft_inplace(out, true);
    const double s = 1.0 / std::sqrt(static_cast<double>(out.size()));
    for (auto& e : out) e *= s;
    return out;
}

}  // namespace srmc
