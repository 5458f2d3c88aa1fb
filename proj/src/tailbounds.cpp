#include "srmc/tailbounds.hpp"

#include <algorithm>
#include <cmath>

#include "srmc/error.hpp"
#include "srmc/fft.hpp"
#include "srmc/moments.hpp"

namespace srmc {

double xi(double u) {
    if (!(u >= 0.0)) throw DomainError("xi: argument must be nonnegative");
    if (u < 1e-4) {
        // sum_{k>=2} (-1)^k u^{k-2} / (k (k-1))
        return 0.5 + u * (-1.0 / 6 + u * (1.0 / 12 + u * (-1.0 / 20 + u * (1.0 / 30 + u * (-1.0 / 42)))));
    }
    if (u <= 1.0) {
        // ln(1+u) = 2 atanh(s), s = u/(2+u); the u^2/(2+u) part cancels exactly.
        const double s = u / (2.0 + u);
        const double s2 = s * s;
        double acc = 0.0, pw = 1.0;
        for (int k = 0; k < 24; ++k) {
            acc += pw / (2 * k + 3);
            pw *= s2;
        }
        const double d = 2.0 + u;
        return 1.0 / d + 2.0 * (1.0 + u) * u / (d * d * d) * acc;
    }
    if (std::isinf(u)) return 0.0;
    return ((1.0 + u) * std::log1p(u) - u) / (u * u);
}

double lr_bound(double t) {
    if (!(t >= 0.0)) throw DomainError("bound argument t must be nonnegative");
    return 2.0 * std::exp(-t * t / 2.0);
}

double rc_bound(double t, double tau) {
    if (!(t >= 0.0)) throw DomainError("bound argument t must be nonnegative");
    if (!(tau > 0.0)) throw DomainError("rc_bound: tau must be positive");
    return 2.0 * std::exp(-t * t * std::max(0.25, xi(t / tau)));
}

double gr_bound(double t, double tau_j, std::size_t n) {
    if (!(t >= 0.0)) throw DomainError("bound argument t must be nonnegative");
    if (!(tau_j > 0.0)) throw DomainError("gr_bound: tau_j must be positive");
    const double nd = static_cast<double>(n);
    return 2.0 * std::exp(-t * t * tau_j * tau_j / (8.0 * nd + 4.0 * t * tau_j));
}

double tau_rc(const Signal& x) {
    const std::size_t n = x.size();
    if (n == 0) throw DimensionError("empty signal");
    const std::vector<cplx> f = unitary_dft(x.samples());
    double mx = 0.0;
    for (std::size_t k = 1; k <= n; ++k) {
        const double w = self_symmetric(k, n) ? 1.0 : 2.0;
        mx = std::max(mx, w * std::abs(f[k - 1]));
    }
    if (mx <= 0.0) throw DomainError("tau_rc: zero signal");
    return x.norm() / mx;
}

double tau_gr(const TransformOp& t, std::size_t j, const Signal& x) {
    if (x.size() != t.order()) throw DimensionError("signal length does not match transform order");
    const auto a = alpha_x(x);
    if (!a) throw DomainError("tau_gr: constant signal has no GR tail parameter");
    const auto b = t.row_stats(j).beta;
    if (!b) throw DomainError("tau_gr: row " + std::to_string(j) + " is constant");
    const double n = static_cast<double>(x.size());
    return n / std::sqrt(n - 1.0) * (*a) * (*b);
}

double TailBoundParams::bound(double t) const {
    switch (mode) {
        case Mode::lr: return lr_bound(t);
        case Mode::rc: return rc_bound(t, tau);
        case Mode::gr: return gr_bound(t, tau, n);
        case Mode::rst: break;
    }
    throw DomainError("no tail bound for deterministic sensing");
}

BoundFn TailBoundParams::fn() const {
    TailBoundParams p = *this;
    return [p](double t) { return p.bound(t); };
}

double invert_bound(const BoundFn& b, double delta) {
    if (!(delta > 0.0) || !(delta < 2.0)) throw DomainError("invert_bound: delta must lie in (0, 2)");
    double lo = 0.0, hi = 1.0;
    while (b(hi) > delta) {
        lo = hi;
        hi *= 2.0;
        if (hi > 1e300) throw NumericalError("invert_bound: bound does not decay below delta");
    }
    for (;;) {
        const double mid = lo + (hi - lo) / 2.0;
        if (mid <= lo || mid >= hi) break;
        if (b(mid) > delta)
            lo = mid;
        else
            hi = mid;
    }
    return hi;
}

}  // namespace srmc
