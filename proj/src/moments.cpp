#include "srmc/moments.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <numbers>
#include <set>

#include "srmc/error.hpp"
#include "srmc/fft.hpp"

namespace srmc {

std::vector<double> SparseModel::densify() const {
    std::vector<double> v(n, 0.0);
    for (std::size_t i = 0; i < indices.size(); ++i) v[indices[i] - 1] = values[i];
    return v;
}

MixtureMoments MixtureMoments::lr(const TransformOp& t, std::vector<double> wxx, std::size_t m,
                                  std::optional<double> norm2) {
    if (wxx.size() != t.order()) throw DimensionError("W(x o x) length does not match transform order");
    if (m == 0) throw DomainError("m must be positive");
    MixtureMoments mm;
    mm.mode_ = Mode::lr;
    mm.n_ = t.order();
    mm.m_ = m;
    mm.t_ = t;
    mm.norm2_ = norm2 ? *norm2 : std::sqrt(static_cast<double>(mm.n_)) * wxx[0];
    mm.data_ = std::move(wxx);
    return mm;
}

MixtureMoments MixtureMoments::rc(std::vector<double> rho, std::size_t n, std::size_t m) {
    if (rho.empty() || rho.size() > n) throw DimensionError("autocorrelation window must hold 1..n lags");
    if (m == 0) throw DomainError("m must be positive");
    MixtureMoments mm;
    mm.mode_ = Mode::rc;
    mm.n_ = n;
    mm.m_ = m;
    mm.norm2_ = rho[0];
    mm.data_ = std::move(rho);
    return mm;
}

MixtureMoments MixtureMoments::gr(const TransformOp& t, double mean, double norm2, std::size_t m) {
    if (m == 0) throw DomainError("m must be positive");
    MixtureMoments mm;
    mm.mode_ = Mode::gr;
    mm.n_ = t.order();
    mm.m_ = m;
    mm.t_ = t;
    mm.xmean_ = mean;
    mm.norm2_ = norm2;
    return mm;
}

MixtureMoments MixtureMoments::rst(std::vector<double> z, double norm2, std::size_t m) {
    MixtureMoments mm;
    mm.mode_ = Mode::rst;
    mm.n_ = z.size();
    mm.m_ = m;
    mm.norm2_ = norm2;
    mm.data_ = std::move(z);
    return mm;
}

void MixtureMoments::check_index(std::size_t j) const {
    if (j < 1 || j > n_) throw IndexError("component index " + std::to_string(j) + " outside 1.." + std::to_string(n_));
}

double MixtureMoments::rho_at(std::size_t lag) const {
    lag %= n_;
    const std::size_t l = std::min(lag, n_ - lag);
    return l < data_.size() ? data_[l] : 0.0;
}

double MixtureMoments::mean(std::size_t j) const {
    check_index(j);
    switch (mode_) {
        case Mode::gr: {
            const double n = static_cast<double>(n_);
            return n * std::sqrt(n) / std::sqrt(static_cast<double>(m_)) * t_->row_mean(j) * xmean_;
        }
        case Mode::rst: return data_[j - 1];
        default: return 0.0;
    }
}

double MixtureMoments::cov(std::size_t j, std::size_t h) const {
    check_index(j);
    check_index(h);
    const double n = static_cast<double>(n_);
    const double m = static_cast<double>(m_);
    switch (mode_) {
        case Mode::lr: {
            const RowProductRep rep = t_->pointwise_product_rep(j, h);
            double acc = 0.0;
            for (const auto& term : rep.terms) acc += term.gamma * data_[term.index - 1];
            return std::sqrt(n) / m * acc;
        }
        case Mode::rc: return rho_at(j >= h ? j - h : n_ - (h - j)) / m;
        case Mode::gr: {
            const double wj = t_->row_mean(j), wh = t_->row_mean(h);
            const double spread = norm2_ - n * xmean_ * xmean_;
            return n / (m * (n - 1.0)) * ((j == h ? 1.0 : 0.0) - n * wj * wh) * spread;
        }
        case Mode::rst: return 0.0;
    }
    return 0.0;
}

double MixtureMoments::variance(std::size_t j) const { return cov(j, j); }

double MixtureMoments::measurement_mean() const {
    switch (mode_) {
        case Mode::gr: {
            // n^{3/2} m^{-1/2} Wbar xbar with Wbar = n^{-1} sum_j wbar_j = n^{-3/2}
            return xmean_ / std::sqrt(static_cast<double>(m_));
        }
        case Mode::rst: {
            double s = 0.0;
            for (double z : data_) s += z;
            return s / static_cast<double>(n_);
        }
        default: return 0.0;
    }
}

double MixtureMoments::measurement_var() const {
    const double mu = measurement_mean();
    return norm2_ / static_cast<double>(m_) - mu * mu;
}

Eigen::VectorXd MixtureMoments::mean_vector(std::span<const std::size_t> probe) const {
    Eigen::VectorXd v(static_cast<Eigen::Index>(probe.size()));
    for (std::size_t i = 0; i < probe.size(); ++i) v(static_cast<Eigen::Index>(i)) = mean(probe[i]);
    return v;
}

Eigen::MatrixXd MixtureMoments::covariance(std::span<const std::size_t> probe) const {
    if (probe.size() > kMaxProbe) throw DomainError("probe larger than " + std::to_string(kMaxProbe));
    const auto r = static_cast<Eigen::Index>(probe.size());
    Eigen::MatrixXd c(r, r);
    for (Eigen::Index a = 0; a < r; ++a)
        for (Eigen::Index b = a; b < r; ++b) {
            c(a, b) = cov(probe[static_cast<std::size_t>(a)], probe[static_cast<std::size_t>(b)]);
            c(b, a) = c(a, b);
        }
    return c;
}

std::vector<double> squared_signal_transform(const TransformOp& t, const Signal& x) {
    if (x.size() != t.order()) throw DimensionError("signal length does not match transform order");
    std::vector<double> sq(x.size());
    for (std::size_t k = 0; k < x.size(); ++k) sq[k] = x[k] * x[k];
    t.forward_inplace(sq);
    return sq;
}

std::vector<double> circular_autocorrelation(const Signal& x) {
    const std::size_t n = x.size();
    std::vector<cplx> v(x.samples().begin(), x.samples().end());
    fft_inplace(v, false);
    for (auto& e : v) e = cplx{std::norm(e), 0.0};
    fft_inplace(v, true);
    std::vector<double> rho(n);
    const double inv_n = 1.0 / static_cast<double>(n);
    for (std::size_t l = 0; l < n; ++l) rho[l] = v[l].real() * inv_n;
    return rho;
}

MixtureMoments lr_moments(const TransformOp& t, const Signal& x, std::size_t m) {
    return MixtureMoments::lr(t, squared_signal_transform(t, x), m, x.norm2());
}

MixtureMoments rc_moments(const Signal& x, std::size_t m) {
    if (x.size() == 0) throw DimensionError("empty signal");
    return MixtureMoments::rc(circular_autocorrelation(x), x.size(), m);
}

MixtureMoments gr_moments(const TransformOp& t, const Signal& x, std::size_t m) {
    if (x.size() != t.order()) throw DimensionError("signal length does not match transform order");
    return MixtureMoments::gr(t, x.mean(), x.norm2(), m);
}

MixtureMoments rst_moments(const TransformOp& t, const Signal& x, std::size_t m) {
    if (x.size() != t.order()) throw DimensionError("signal length does not match transform order");
    std::vector<double> z = t.apply_forward(x.samples());
    const double s = std::sqrt(static_cast<double>(x.size()) / static_cast<double>(m));
    for (auto& e : z) e *= s;
    return MixtureMoments::rst(std::move(z), x.norm2(), m);
}

MixtureMoments moments_for(const SensingSpec& spec, const Signal& x) {
    spec.validate();
    switch (spec.mode) {
        case Mode::lr: return lr_moments(spec.transform_op(), x, spec.m);
        case Mode::gr: return gr_moments(spec.transform_op(), x, spec.m);
        case Mode::rc: return rc_moments(x, spec.m);
        case Mode::rst: return rst_moments(spec.transform_op(), x, spec.m);
    }
    throw DomainError("unknown mode");
}

DftPairVariance dft_pair_variance(const Signal& x, std::size_t m, std::size_t h) {
    const std::size_t n = x.size();
    if (n < 4 || n % 2 != 0) throw DomainError("dft_pair_variance needs even n >= 4");
    if (h < 2 || h > n / 2)
        throw IndexError("frequency index " + std::to_string(h) + " outside 2.." + std::to_string(n / 2));
    const double md = static_cast<double>(m);
    double q = 0.0;
    for (std::size_t k = 1; k <= n; ++k) {
        const std::size_t arg = (2 * (h - 1) * (k - 1)) % n;  // 4 pi (h-1)(k-1)/n reduced mod 2 pi
        q += x[k - 1] * x[k - 1] * std::cos(2.0 * std::numbers::pi * static_cast<double>(arg) / static_cast<double>(n));
    }
    q /= md;
    const double sy2 = x.norm2() / md;
    return {sy2 + q, sy2 - q, q};
}

std::optional<double> alpha_x(const Signal& x) {
    const double mean = x.mean();
    double l2 = 0.0, inf = 0.0;
    for (double v : x.samples()) {
        const double c = v - mean;
        l2 += c * c;
        inf = std::max(inf, std::abs(c));
    }
    if (inf <= 1e-300 || l2 <= 0.0) return std::nullopt;
    return std::sqrt(l2) / inf / std::sqrt(static_cast<double>(x.size()));
}

double min_eigenvalue(const Eigen::MatrixXd& a) {
    if (a.rows() == 0) return 0.0;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

AmnReport amn_diagnostics(const std::optional<TransformOp>& t, const Signal& x, const MixtureMoments& mm,
                          std::span<const std::size_t> probe) {
    if (probe.size() > 64) throw DomainError("amn_diagnostics probe limited to 64 indices");
    if (x.size() != mm.n()) throw DimensionError("signal length does not match moments order");
    const double n = static_cast<double>(mm.n());
    const double scale = static_cast<double>(mm.m()) / n;
    AmnReport r;
    r.probe.assign(probe.begin(), probe.end());
    r.signal_energy_density = x.norm2() / n;
    double fx_inf = 0.0;
    for (const cplx& v : unitary_dft(x.samples())) fx_inf = std::max(fx_inf, std::abs(v));
    r.fx_infnorm = fx_inf;
    r.alpha_x = alpha_x(x);

    double min_var = std::numeric_limits<double>::infinity();
    for (std::size_t j : probe) {
        min_var = std::min(min_var, mm.variance(j));
        if (t && mm.mode() != Mode::rc) {
            const RowStats rs = t->row_stats(j);
            r.max_row_infnorm = std::max(r.max_row_infnorm, rs.inf_norm);
            r.beta.push_back(rs.beta);
        } else {
            r.max_row_infnorm = 1.0 / std::sqrt(n);
            r.beta.push_back(std::nullopt);
        }
    }
    r.scaled_min_variance = probe.empty() ? 0.0 : scale * min_var;
    r.scaled_cov_min_eig = min_eigenvalue(scale * mm.covariance(probe));
    return r;
}

std::size_t count_distinct_components(const TransformOp& t) {
    std::set<std::vector<long long>> classes;
    for (std::size_t j = 1; j <= t.order(); ++j) {
        const std::vector<double> w = t.row(j);
        std::vector<long long> key(w.size());
        for (std::size_t k = 0; k < w.size(); ++k) key[k] = std::llround(w[k] * 1e12);
        std::sort(key.begin(), key.end());
        classes.insert(std::move(key));
    }
    return classes.size();
}

SparseModel topk_from(std::span<const double> wxx, std::size_t k) {
    if (k > wxx.size()) throw DomainError("top-K larger than n");
    std::vector<std::size_t> order(wxx.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return std::abs(wxx[a]) > std::abs(wxx[b]); });
    order.resize(k);
    std::sort(order.begin(), order.end());
    SparseModel s;
    s.n = wxx.size();
    for (std::size_t i : order) {
        s.indices.push_back(i + 1);
        s.values.push_back(wxx[i]);
    }
    return s;
}

SparseModel topk_model(const TransformOp& t, const Signal& x, std::size_t k) {
    return topk_from(squared_signal_transform(t, x), k);
}

}  // namespace srmc
