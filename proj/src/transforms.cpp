#include "srmc/transforms.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <numbers>

#include "srmc/error.hpp"
#include "srmc/fft.hpp"

namespace srmc {

struct TransformOp::Impl {
    TransformKind kind;
    std::size_t n;
    std::optional<TransformOp> left;
    std::optional<TransformOp> right;
};

namespace {

void check_length(std::size_t got, std::size_t n) {
    if (got != n)
        throw DimensionError("transform of order " + std::to_string(n) + " applied to vector of length " +
                             std::to_string(got));
}

void check_row(std::size_t j, std::size_t n) {
    if (j < 1 || j > n)
        throw IndexError("row index " + std::to_string(j) + " outside 1.." + std::to_string(n));
}

double inv_sqrt(std::size_t n) { return 1.0 / std::sqrt(static_cast<double>(n)); }

void fwht(std::span<double> v) {
    const std::size_t n = v.size();
    for (std::size_t len = 1; len < n; len <<= 1) {
        for (std::size_t i = 0; i < n; i += len << 1) {
            for (std::size_t k = i; k < i + len; ++k) {
                const double a = v[k];
                const double b = v[k + len];
                v[k] = a + b;
                v[k + len] = a - b;
            }
        }
    }
    const double s = inv_sqrt(n);
    for (auto& e : v) e *= s;
}

// Orthonormal DCT-II via one length-n complex FFT (Makhoul reordering).
void dct2(std::span<double> x) {
    const std::size_t n = x.size();
    if (n == 1) return;
    std::vector<cplx> v(n);
    for (std::size_t k = 0; k < n / 2; ++k) {
        v[k] = x[2 * k];
        v[n - 1 - k] = x[2 * k + 1];
    }
    fft_inplace(v, false);
    const double s0 = inv_sqrt(n);
    const double s1 = std::sqrt(2.0 / static_cast<double>(n));
    for (std::size_t f = 0; f < n; ++f) {
        const double ang = -std::numbers::pi * static_cast<double>(f) / (2.0 * static_cast<double>(n));
        const double c = (v[f] * cplx{std::cos(ang), std::sin(ang)}).real();
        x[f] = c * (f == 0 ? s0 : s1);
    }
}

// Inverse (= transpose) of dct2.
void dct3(std::span<double> y) {
    const std::size_t n = y.size();
    if (n == 1) return;
    const double s0 = inv_sqrt(n);
    const double s1 = std::sqrt(2.0 / static_cast<double>(n));
    std::vector<double> c(n + 1, 0.0);
    for (std::size_t f = 0; f < n; ++f) c[f] = y[f] / (f == 0 ? s0 : s1);
    std::vector<cplx> v(n);
    for (std::size_t f = 0; f < n; ++f) {
        const double ang = std::numbers::pi * static_cast<double>(f) / (2.0 * static_cast<double>(n));
        v[f] = cplx{std::cos(ang), std::sin(ang)} * cplx{c[f], -c[n - f]};
    }
    fft_inplace(v, true);
    const double inv_n = 1.0 / static_cast<double>(n);
    for (std::size_t k = 0; k < n / 2; ++k) {
        y[2 * k] = v[k].real() * inv_n;
        y[2 * k + 1] = v[n - 1 - k].real() * inv_n;
    }
}

void real_dft_forward(std::span<double> x) {
    const std::size_t n = x.size();
    std::vector<cplx> v(x.begin(), x.end());
    fft_inplace(v, false);
    const double s0 = inv_sqrt(n);
    const double s1 = std::sqrt(2.0 / static_cast<double>(n));
    x[0] = v[0].real() * s0;
    for (std::size_t f = 1; f < n / 2; ++f) {
        x[2 * f - 1] = v[f].real() * s1;
        x[2 * f] = v[f].imag() * s1;
    }
    x[n - 1] = v[n / 2].real() * s0;
}

void real_dft_adjoint(std::span<double> y) {
    const std::size_t n = y.size();
    const double s0 = inv_sqrt(n);
    const double s2 = 1.0 / std::sqrt(2.0 * static_cast<double>(n));
    std::vector<cplx> u(n);
    u[0] = y[0] * s0;
    u[n / 2] = y[n - 1] * s0;
    for (std::size_t f = 1; f < n / 2; ++f) {
        u[f] = cplx{y[2 * f - 1], y[2 * f]} * s2;
        u[n - f] = std::conj(u[f]);
    }
    fft_inplace(u, true);
    for (std::size_t k = 0; k < n; ++k) y[k] = u[k].real();
}

// Shared by entry() and the dense fallback.
double closed_form_entry(const TransformOp& t, std::size_t j, std::size_t k) {
    const std::size_t n = t.order();
    const double nd = static_cast<double>(n);
    switch (t.kind()) {
        case TransformKind::wht: {
            const int parity = std::popcount((j - 1) & (k - 1)) & 1;
            return (parity ? -1.0 : 1.0) * inv_sqrt(n);
        }
        case TransformKind::dct: {
            if (j == 1) return inv_sqrt(n);
            const std::size_t arg = ((j - 1) * (2 * k - 1)) % (4 * n);
            return std::sqrt(2.0 / nd) * std::cos(std::numbers::pi * static_cast<double>(arg) / (2.0 * nd));
        }
        case TransformKind::real_dft: {
            if (j == 1) return inv_sqrt(n);
            if (j == n) return ((k - 1) % 2 ? -1.0 : 1.0) * inv_sqrt(n);
            const std::size_t f = j / 2;
            const double ang = 2.0 * std::numbers::pi * static_cast<double>((f * (k - 1)) % n) / nd;
            return (j % 2 == 0) ? std::sqrt(2.0 / nd) * std::cos(ang) : -std::sqrt(2.0 / nd) * std::sin(ang);
        }
        case TransformKind::kronecker: {
            const std::size_t n2 = t.right().order();
            const std::size_t j1 = (j - 1) / n2 + 1, j2 = (j - 1) % n2 + 1;
            const std::size_t k1 = (k - 1) / n2 + 1, k2 = (k - 1) % n2 + 1;
            return t.left().entry(j1, k1) * t.right().entry(j2, k2);
        }
    }
    return 0.0;
}

void dense_apply(const TransformOp& t, std::span<double> v, bool adjoint) {
    const std::size_t n = v.size();
    if (n > kDenseFallbackMax)
        throw DomainError("order " + std::to_string(n) + " has no fast path and exceeds the dense fallback limit");
    std::vector<double> out(n, 0.0);
    for (std::size_t j = 1; j <= n; ++j)
        for (std::size_t k = 1; k <= n; ++k) {
            const double w = adjoint ? closed_form_entry(t, k, j) : closed_form_entry(t, j, k);
            out[j - 1] += w * v[k - 1];
        }
    std::copy(out.begin(), out.end(), v.begin());
}

// Applies `left` along the slow index and `right` along the fast index of a
// row-major n1 x n2 array.
void kron_apply(const TransformOp& t, std::span<double> v, bool adjoint) {
    const std::size_t n1 = t.left().order();
    const std::size_t n2 = t.right().order();
    for (std::size_t a = 0; a < n1; ++a) {
        auto seg = v.subspan(a * n2, n2);
        adjoint ? t.right().adjoint_inplace(seg) : t.right().forward_inplace(seg);
    }
    std::vector<double> col(n1);
    for (std::size_t b = 0; b < n2; ++b) {
        for (std::size_t a = 0; a < n1; ++a) col[a] = v[a * n2 + b];
        adjoint ? t.left().adjoint_inplace(col) : t.left().forward_inplace(col);
        for (std::size_t a = 0; a < n1; ++a) v[a * n2 + b] = col[a];
    }
}

// ---- pointwise row products -------------------------------------------------

void add_term(std::map<std::size_t, double>& acc, std::size_t index, double gamma) { acc[index] += gamma; }

RowProductRep finish(const std::map<std::size_t, double>& acc) {
    RowProductRep rep;
    for (const auto& [idx, g] : acc)
        if (std::abs(g) > 1e-14) rep.terms.push_back({g, idx});
    return rep;
}

RowProductRep wht_product(std::size_t j, std::size_t h) {
    return RowProductRep{{{1.0, 1 + ((j - 1) ^ (h - 1))}}};
}

// cos(a t) cos(b t) = (cos((a+b) t) + cos((a-b) t)) / 2 on the DCT grid
// t_k = pi (2k-1) / 2n, where cos(F t) = -cos((2n-F) t) and cos(n t) = 0.
RowProductRep dct_product(std::size_t n, std::size_t j, std::size_t h) {
    if (j == 1) return RowProductRep{{{1.0, h}}};
    if (h == 1) return RowProductRep{{{1.0, j}}};
    const std::size_t f = j - 1, g = h - 1;
    std::map<std::size_t, double> acc;
    const double half_sqrt2 = std::sqrt(0.5);
    auto emit = [&](std::size_t freq, double sign) {
        if (freq == n) return;
        std::size_t row_freq = freq;
        if (freq > n) {
            row_freq = 2 * n - freq;
            sign = -sign;
        }
        // gamma = sqrt(n) * (s_f s_g / 2) / s_F
        add_term(acc, row_freq + 1, sign * (row_freq == 0 ? 1.0 : half_sqrt2));
    };
    emit(f + g, 1.0);
    emit(f > g ? f - g : g - f, 1.0);
    return finish(acc);
}

// Real-DFT rows as amplitude * trig(2 pi F (k-1) / n).
struct TrigRow {
    bool is_sin;
    long long freq;
    double amp;
};

TrigRow dft_row(std::size_t n, std::size_t j) {
    const double a0 = inv_sqrt(n);
    const double a1 = std::sqrt(2.0 / static_cast<double>(n));
    if (j == 1) return {false, 0, a0};
    if (j == n) return {false, static_cast<long long>(n / 2), a0};
    if (j % 2 == 0) return {false, static_cast<long long>(j / 2), a1};
    return {true, static_cast<long long>(j / 2), -a1};
}

RowProductRep real_dft_product(std::size_t n, std::size_t j, std::size_t h) {
    const TrigRow a = dft_row(n, j);
    const TrigRow b = dft_row(n, h);
    const long long nn = static_cast<long long>(n);
    const double a0 = inv_sqrt(n);
    const double a1 = std::sqrt(2.0 / static_cast<double>(n));
    const double root_n = std::sqrt(static_cast<double>(n));
    std::map<std::size_t, double> acc;

    // Adds coef * trig(F) expressed in the row basis.
    auto emit = [&](bool is_sin, long long freq, double coef) {
        long long fr = ((freq % nn) + nn) % nn;
        if (fr > nn / 2) {
            fr = nn - fr;
            if (is_sin) coef = -coef;
        }
        if (fr == 0 || 2 * fr == nn) {
            if (is_sin) return;
            add_term(acc, fr == 0 ? 1 : n, root_n * coef / a0);
            return;
        }
        const std::size_t row = is_sin ? static_cast<std::size_t>(2 * fr + 1) : static_cast<std::size_t>(2 * fr);
        add_term(acc, row, root_n * coef / (is_sin ? -a1 : a1));
    };

    const double c = 0.5 * a.amp * b.amp;
    const long long sum = a.freq + b.freq;
    const long long diff = a.freq - b.freq;
    if (!a.is_sin && !b.is_sin) {
        emit(false, sum, c);
        emit(false, diff, c);
    } else if (a.is_sin && b.is_sin) {
        emit(false, diff, c);
        emit(false, sum, -c);
    } else if (a.is_sin) {  // sin a cos b
        emit(true, sum, c);
        emit(true, diff, c);
    } else {  // cos a sin b
        emit(true, sum, c);
        emit(true, diff, -c);
    }
    return finish(acc);
}

}  // namespace

TransformOp TransformOp::wht(std::size_t n) {
    if (!is_power_of_two(n)) throw DomainError("WHT order must be a power of two, got " + std::to_string(n));
    return TransformOp(std::make_shared<const Impl>(Impl{TransformKind::wht, n, {}, {}}));
}

TransformOp TransformOp::dct(std::size_t n) {
    if (n == 0) throw DomainError("DCT order must be positive");
    return TransformOp(std::make_shared<const Impl>(Impl{TransformKind::dct, n, {}, {}}));
}

TransformOp TransformOp::real_dft(std::size_t n) {
    if (n < 2 || n % 2 != 0) throw DomainError("real DFT order must be even, got " + std::to_string(n));
    return TransformOp(std::make_shared<const Impl>(Impl{TransformKind::real_dft, n, {}, {}}));
}

TransformOp TransformOp::kronecker(const TransformOp& left, const TransformOp& right) {
    return TransformOp(
        std::make_shared<const Impl>(Impl{TransformKind::kronecker, left.order() * right.order(), left, right}));
}

namespace {

TransformOp parse_factor(std::string_view s, std::size_t& pos);

std::size_t parse_uint(std::string_view s, std::size_t& pos) {
    std::size_t start = pos, v = 0;
    while (pos < s.size() && s[pos] >= '0' && s[pos] <= '9') v = v * 10 + static_cast<std::size_t>(s[pos++] - '0');
    if (pos == start) throw DomainError("expected an order in transform name '" + std::string(s) + "'");
    return v;
}

TransformOp make_simple(std::string_view kind, std::size_t n) {
    if (kind == "wht") return TransformOp::wht(n);
    if (kind == "dct") return TransformOp::dct(n);
    if (kind == "dft" || kind == "real_dft") return TransformOp::real_dft(n);
    throw DomainError("unknown transform kind '" + std::string(kind) + "'");
}

TransformOp parse_kron(std::string_view s, std::size_t& pos) {
    pos += 5;  // "kron("
    TransformOp a = parse_factor(s, pos);
    if (pos >= s.size() || s[pos] != ',') throw DomainError("malformed kron transform '" + std::string(s) + "'");
    ++pos;
    TransformOp b = parse_factor(s, pos);
    if (pos >= s.size() || s[pos] != ')') throw DomainError("malformed kron transform '" + std::string(s) + "'");
    ++pos;
    return TransformOp::kronecker(a, b);
}

TransformOp parse_factor(std::string_view s, std::size_t& pos) {
    if (s.substr(pos, 5) == "kron(") return parse_kron(s, pos);
    const std::size_t colon = s.find(':', pos);
    if (colon == std::string_view::npos) throw DomainError("kron factor needs 'kind:order' in '" + std::string(s) + "'");
    const std::string_view kind = s.substr(pos, colon - pos);
    pos = colon + 1;
    return make_simple(kind, parse_uint(s, pos));
}

}  // namespace

TransformOp TransformOp::parse(std::string_view name, std::size_t n) {
    if (name.substr(0, 5) == "kron(") {
        std::size_t pos = 0;
        TransformOp t = parse_kron(name, pos);
        if (pos != name.size()) throw DomainError("trailing characters in transform '" + std::string(name) + "'");
        if (n != 0 && t.order() != n)
            throw DimensionError("kron transform order " + std::to_string(t.order()) + " != n = " + std::to_string(n));
        return t;
    }
    return make_simple(name, n);
}

TransformKind TransformOp::kind() const { return impl_->kind; }
std::size_t TransformOp::order() const { return impl_->n; }

const TransformOp& TransformOp::left() const {
    if (!impl_->left) throw DomainError("left(): not a Kronecker transform");
    return *impl_->left;
}

const TransformOp& TransformOp::right() const {
    if (!impl_->right) throw DomainError("right(): not a Kronecker transform");
    return *impl_->right;
}

std::string TransformOp::name() const {
    switch (kind()) {
        case TransformKind::wht: return "wht";
        case TransformKind::dct: return "dct";
        case TransformKind::real_dft: return "dft";
        case TransformKind::kronecker: {
            auto factor = [](const TransformOp& t) {
                return t.kind() == TransformKind::kronecker ? t.name() : t.name() + ":" + std::to_string(t.order());
            };
            return "kron(" + factor(left()) + "," + factor(right()) + ")";
        }
    }
    return "?";
}

bool TransformOp::fast() const {
    if (kind() == TransformKind::kronecker) return left().fast() && right().fast();
    return is_power_of_two(order());
}

void TransformOp::forward_inplace(std::span<double> v) const {
    check_length(v.size(), order());
    if (kind() == TransformKind::kronecker) return kron_apply(*this, v, false);
    if (!is_power_of_two(order())) return dense_apply(*this, v, false);
    switch (kind()) {
        case TransformKind::wht: fwht(v); break;
        case TransformKind::dct: dct2(v); break;
        case TransformKind::real_dft: real_dft_forward(v); break;
        default: break;
    }
}

void TransformOp::adjoint_inplace(std::span<double> v) const {
    check_length(v.size(), order());
    if (kind() == TransformKind::kronecker) return kron_apply(*this, v, true);
    if (!is_power_of_two(order())) return dense_apply(*this, v, true);
    switch (kind()) {
        case TransformKind::wht: fwht(v); break;
        case TransformKind::dct: dct3(v); break;
        case TransformKind::real_dft: real_dft_adjoint(v); break;
        default: break;
    }
}

std::vector<double> TransformOp::apply_forward(std::span<const double> v) const {
    std::vector<double> out(v.begin(), v.end());
    forward_inplace(out);
    return out;
}

std::vector<double> TransformOp::apply_adjoint(std::span<const double> v) const {
    std::vector<double> out(v.begin(), v.end());
    adjoint_inplace(out);
    return out;
}

std::vector<double> TransformOp::row(std::size_t j) const {
    check_row(j, order());
    std::vector<double> e(order(), 0.0);
    e[j - 1] = 1.0;
    adjoint_inplace(e);
    return e;
}

RowStats TransformOp::row_stats(std::size_t j) const {
    const std::vector<double> w = row(j);
    const double n = static_cast<double>(w.size());
    double sum = 0.0, inf = 0.0;
    for (double e : w) {
        sum += e;
        inf = std::max(inf, std::abs(e));
    }
    const double mean = sum / n;
    double l2 = 0.0, tinf = 0.0;
    for (double e : w) {
        const double c = e - mean;
        l2 += c * c;
        tinf = std::max(tinf, std::abs(c));
    }
    RowStats s{mean, inf, std::nullopt};
    if (tinf > 1e-12) s.beta = std::sqrt(l2) / tinf / std::sqrt(n);
    return s;
}

double TransformOp::row_mean(std::size_t j) const {
    check_row(j, order());
    return j == 1 ? inv_sqrt(order()) : 0.0;
}

RowProductRep TransformOp::pointwise_product_rep(std::size_t j, std::size_t h) const {
    check_row(j, order());
    check_row(h, order());
    switch (kind()) {
        case TransformKind::wht: return wht_product(j, h);
        case TransformKind::dct: return dct_product(order(), j, h);
        case TransformKind::real_dft: return real_dft_product(order(), j, h);
        case TransformKind::kronecker: {
            const std::size_t n2 = right().order();
            const RowProductRep a = left().pointwise_product_rep((j - 1) / n2 + 1, (h - 1) / n2 + 1);
            const RowProductRep b = right().pointwise_product_rep((j - 1) % n2 + 1, (h - 1) % n2 + 1);
            RowProductRep rep;
            for (const auto& ta : a.terms)
                for (const auto& tb : b.terms) rep.terms.push_back({ta.gamma * tb.gamma, (ta.index - 1) * n2 + tb.index});
            std::sort(rep.terms.begin(), rep.terms.end(),
                      [](const ProductTerm& x, const ProductTerm& y) { return x.index < y.index; });
            return rep;
        }
    }
    throw DomainError("unsupported transform kind for product representation");
}

double TransformOp::entry(std::size_t j, std::size_t k) const {
    check_row(j, order());
    check_row(k, order());
    return closed_form_entry(*this, j, k);
}

Eigen::MatrixXd TransformOp::dense() const {
    const std::size_t n = order();
    if (n > kDenseFallbackMax) throw DomainError("dense(): order too large");
    Eigen::MatrixXd m(n, n);
    for (std::size_t j = 1; j <= n; ++j)
        for (std::size_t k = 1; k <= n; ++k) m(j - 1, k - 1) = closed_form_entry(*this, j, k);
    return m;
}

double mutual_coherence(const TransformOp& w, const Eigen::MatrixXd& psi) {
    const std::size_t n = w.order();
    if (static_cast<std::size_t>(psi.rows()) != n)
        throw DimensionError("mutual_coherence: psi has " + std::to_string(psi.rows()) + " rows, transform order " +
                             std::to_string(n));
    double best = 0.0;
    std::vector<double> col(n);
    for (Eigen::Index c = 0; c < psi.cols(); ++c) {
        const double norm = psi.col(c).norm();
        if (norm == 0.0) throw DomainError("mutual_coherence: column " + std::to_string(c + 1) + " is zero");
        for (std::size_t i = 0; i < n; ++i) col[i] = psi(static_cast<Eigen::Index>(i), c);
        w.forward_inplace(col);  // rows have unit norm
        for (double e : col) best = std::max(best, std::abs(e) / norm);
    }
    return std::sqrt(static_cast<double>(n)) * best;
}

}  // namespace srmc
