#include "srmc/sensing.hpp"

#include <cmath>
#include <numbers>
#include <unordered_map>

#include "srmc/error.hpp"
#include "srmc/rng.hpp"

namespace srmc {

std::string to_string(Mode mode) {
    switch (mode) {
        case Mode::lr: return "lr";
        case Mode::gr: return "gr";
        case Mode::rc: return "rc";
        case Mode::rst: return "rst";
    }
    return "?";
}

std::string to_string(Selection selection) {
    return selection == Selection::with_replacement ? "with_replacement" : "without_replacement";
}

Mode parse_mode(std::string_view s) {
    if (s == "lr" || s == "LR") return Mode::lr;
    if (s == "gr" || s == "GR") return Mode::gr;
    if (s == "rc" || s == "RC") return Mode::rc;
    if (s == "rst" || s == "RST") return Mode::rst;
    throw DomainError("unknown sensing mode '" + std::string(s) + "'");
}

Selection parse_selection(std::string_view s) {
    if (s == "with_replacement") return Selection::with_replacement;
    if (s == "without_replacement") return Selection::without_replacement;
    throw DomainError("unknown selection '" + std::string(s) + "'");
}

double SensingSpec::scale() const { return std::sqrt(static_cast<double>(n) / static_cast<double>(m)); }

void SensingSpec::validate() const {
    if (n == 0 || m == 0) throw DomainError("n and m must be positive");
    if (selection == Selection::without_replacement && m > n)
        throw DomainError("m = " + std::to_string(m) + " > n = " + std::to_string(n) + " without replacement");
    if (mode == Mode::rc) {
        if (n % 2 != 0) throw DomainError("random convolution needs even n");
        return;
    }
    if (!transform) throw DomainError(to_string(mode) + " sensing needs a transform");
    if (transform->order() != n)
        throw DimensionError("transform order " + std::to_string(transform->order()) + " != n = " + std::to_string(n));
}

const TransformOp& SensingSpec::transform_op() const {
    if (!transform) throw DomainError("sensing spec has no transform");
    return *transform;
}

bool self_symmetric(std::size_t k, std::size_t n) { return k == 1 || (n % 2 == 0 && k == n / 2 + 1); }

std::vector<std::size_t> draw_selection(const SensingSpec& spec, std::uint64_t seed) {
    CounterRng rng(seed, Stream::selection);
    std::vector<std::size_t> c(spec.m);
    if (spec.selection == Selection::with_replacement) {
        for (auto& e : c) e = 1 + rng.below(spec.n);
        return c;
    }
    // Partial Fisher-Yates over 1..n; only displaced slots are stored.
    std::unordered_map<std::size_t, std::size_t> displaced;
    auto at = [&](std::size_t i) {
        auto it = displaced.find(i);
        return it == displaced.end() ? i + 1 : it->second;
    };
    for (std::size_t i = 0; i < spec.m; ++i) {
        const std::size_t j = i + rng.below(spec.n - i);
        const std::size_t vi = at(i), vj = at(j);
        c[i] = vj;
        displaced[j] = vi;
    }
    return c;
}

SensingDraw draw(const SensingSpec& spec) { return draw(spec, spec.seed); }

SensingDraw draw(const SensingSpec& spec, std::uint64_t seed) {
    spec.validate();
    SensingDraw d;
    d.mode = spec.mode;
    const std::size_t n = spec.n;
    switch (spec.mode) {
        case Mode::lr: {
            CounterRng rng(seed, Stream::rademacher);
            d.rademacher.resize(n);
            for (auto& b : d.rademacher) b = static_cast<std::int8_t>(rng.sign());
            break;
        }
        case Mode::gr: {
            CounterRng rng(seed, Stream::permutation);
            d.permutation.resize(n);
            for (std::size_t k = 0; k < n; ++k) d.permutation[k] = k + 1;
            for (std::size_t i = n; i > 1; --i) std::swap(d.permutation[i - 1], d.permutation[rng.below(i)]);
            break;
        }
        case Mode::rc: {
            CounterRng rng(seed, Stream::rc_phases);
            d.rc_phases.resize(n);
            for (std::size_t k = 1; k <= n / 2 + 1; ++k) {
                if (self_symmetric(k, n)) {
                    d.rc_phases[k - 1] = cplx{static_cast<double>(rng.sign()), 0.0};
                } else {
                    const double ang = 2.0 * std::numbers::pi * rng.uniform();
                    d.rc_phases[k - 1] = cplx{std::cos(ang), std::sin(ang)};
                }
            }
            for (std::size_t k = n / 2 + 2; k <= n; ++k) d.rc_phases[k - 1] = std::conj(d.rc_phases[n + 1 - k]);
            break;
        }
        case Mode::rst: break;
    }
    d.selection = draw_selection(spec, seed);
    return d;
}

std::vector<double> mixture_vector(const SensingSpec& spec, const SensingDraw& d, const Signal& x) {
    if (x.size() != spec.n)
        throw DimensionError("signal length " + std::to_string(x.size()) + " != n = " + std::to_string(spec.n) +
                             " (zero-pad first)");
    if (d.mode != spec.mode) throw DomainError("draw mode does not match spec mode");
    const double s = spec.scale();
    const std::size_t n = spec.n;
    std::vector<double> z(n);
    switch (spec.mode) {
        case Mode::lr:
            for (std::size_t k = 0; k < n; ++k) z[k] = d.rademacher[k] * x[k];
            spec.transform_op().forward_inplace(z);
            break;
        case Mode::gr:
            // (R x)_{pi(k)} = x_k
            for (std::size_t k = 0; k < n; ++k) z[d.permutation[k] - 1] = x[k];
            spec.transform_op().forward_inplace(z);
            break;
        case Mode::rst:
            std::copy(x.samples().begin(), x.samples().end(), z.begin());
            spec.transform_op().forward_inplace(z);
            break;
        case Mode::rc: {
            std::vector<cplx> v = unitary_dft(x.samples());
            for (std::size_t k = 0; k < n; ++k) v[k] *= d.rc_phases[k];
            const std::vector<cplx> back = unitary_idft(v);
            double max_imag = 0.0;
            for (std::size_t k = 0; k < n; ++k) {
                z[k] = back[k].real();
                max_imag = std::max(max_imag, std::abs(back[k].imag()));
            }
            if (max_imag >= 1e-9 * x.norm() && max_imag > 0.0)
                throw NumericalError("random convolution produced imaginary residue " + std::to_string(max_imag) +
                                     "; phases are not conjugate symmetric");
            break;
        }
    }
    for (auto& e : z) e *= s;
    return z;
}

std::vector<double> select(std::span<const double> z, std::span<const std::size_t> selection) {
    std::vector<double> y(selection.size());
    for (std::size_t k = 0; k < selection.size(); ++k) y[k] = z[selection[k] - 1];
    return y;
}

std::vector<double> measure(const SensingSpec& spec, const SensingDraw& d, const Signal& x) {
    const std::vector<double> z = mixture_vector(spec, d, x);
    return select(z, d.selection);
}

}  // namespace srmc
