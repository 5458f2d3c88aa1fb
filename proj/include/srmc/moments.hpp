#pragma once

// Closed-form first and second moments of the mixture components z_j.
//
// Covariances are exposed through accessors backed by O(n) models:
//   LR   cov(j,h) = (sqrt(n)/m) sum_k gamma_k(j,h) [W(x o x)]_{l_k(j,h)}
//   RC   cov(j,h) = rho(j - h) / m,  rho the circular autocorrelation of x
//   GR   mu_j = n^{3/2} m^{-1/2} wbar_j xbar,
//        cov(j,h) = n / (m (n-1)) (delta_jh - n wbar_j wbar_h)(|x|^2 - n xbar^2)
//   RST  deterministic: mu_j = z_j, cov = 0
// Dense matrices are only materialised for probe subsets.

#include <Eigen/Dense>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "srmc/sensing.hpp"
#include "srmc/signal.hpp"
#include "srmc/transforms.hpp"

namespace srmc {

/// The K largest-magnitude entries of W(x o x), ascending by index.
struct SparseModel {
    std::size_t n = 0;
    std::vector<std::size_t> indices;  // 1-based
    std::vector<double> values;

    std::vector<double> densify() const;
};

inline constexpr std::size_t kMaxProbe = 1024;

class MixtureMoments {
public:
    /// LR model from a (possibly truncated) W(x o x). norm2 = |x|^2; when
    /// absent it is recovered from the DC entry, sqrt(n) [W(x o x)]_1.
    static MixtureMoments lr(const TransformOp& t, std::vector<double> wxx, std::size_t m,
                             std::optional<double> norm2 = std::nullopt);
    /// RC model from rho(0..L-1), L <= n; lags beyond the window read as zero.
    static MixtureMoments rc(std::vector<double> rho, std::size_t n, std::size_t m);
    static MixtureMoments gr(const TransformOp& t, double mean, double norm2, std::size_t m);
    static MixtureMoments rst(std::vector<double> z, double norm2, std::size_t m);

    Mode mode() const { return mode_; }
    std::size_t n() const { return n_; }
    std::size_t m() const { return m_; }

    double mean(std::size_t j) const;
    double variance(std::size_t j) const;
    double cov(std::size_t j, std::size_t h) const;

    /// mu_y = n^{-1} sum_j mu_j
    double measurement_mean() const;
    /// sigma_y^2 = |x|^2 / m - mu_y^2
    double measurement_var() const;

    Eigen::VectorXd mean_vector(std::span<const std::size_t> probe) const;
    Eigen::MatrixXd covariance(std::span<const std::size_t> probe) const;

    /// rho(l) with rho(l) = rho(n - l); RC only.
    double rho_at(std::size_t lag) const;

    const std::vector<double>& backing() const { return data_; }
    double signal_norm2() const { return norm2_; }
    double signal_mean() const { return xmean_; }

private:
    MixtureMoments() = default;
    void check_index(std::size_t j) const;

    Mode mode_ = Mode::lr;
    std::size_t n_ = 0, m_ = 0;
    std::optional<TransformOp> t_;
    std::vector<double> data_;  // LR: W(x o x); RC: rho window; RST: z
    double norm2_ = 0.0;
    double xmean_ = 0.0;
};

MixtureMoments lr_moments(const TransformOp& t, const Signal& x, std::size_t m);
MixtureMoments rc_moments(const Signal& x, std::size_t m);
MixtureMoments gr_moments(const TransformOp& t, const Signal& x, std::size_t m);
MixtureMoments rst_moments(const TransformOp& t, const Signal& x, std::size_t m);

/// Moments for whichever mode the spec selects.
MixtureMoments moments_for(const SensingSpec& spec, const Signal& x);

/// W(x o x).
std::vector<double> squared_signal_transform(const TransformOp& t, const Signal& x);

/// rho(l) = sum_k x_k x_{<k+l>_n}, l = 0..n-1, via the inverse DFT of |Fx|^2.
std::vector<double> circular_autocorrelation(const Signal& x);

struct DftPairVariance {
    double sigma_real2;
    double sigma_imag2;
    double q;
};

/// Variances of the real-DFT row pair of complex coefficient h (2 <= h <= n/2).
DftPairVariance dft_pair_variance(const Signal& x, std::size_t m, std::size_t h);

struct AmnReport {
    double max_row_infnorm = 0.0;
    double scaled_min_variance = 0.0;
    double scaled_cov_min_eig = 0.0;
    double signal_energy_density = 0.0;
    double fx_infnorm = 0.0;
    std::optional<double> alpha_x;
    std::vector<std::size_t> probe;
    std::vector<std::optional<double>> beta;
};

/// Finite-n surrogates of the asymptotic-normality conditions on a probe set
/// (|probe| <= 64). `t` may be empty for RC, whose rows all have modulus
/// n^{-1/2}.
AmnReport amn_diagnostics(const std::optional<TransformOp>& t, const Signal& x, const MixtureMoments& mm,
                          std::span<const std::size_t> probe);

/// n^{-1/2} |Tx|_2 / |Tx|_inf, empty when x is constant.
std::optional<double> alpha_x(const Signal& x);

/// Number of classes of rows whose entries are permutations of each other.
std::size_t count_distinct_components(const TransformOp& t);

SparseModel topk_model(const TransformOp& t, const Signal& x, std::size_t k);
SparseModel topk_from(std::span<const double> wxx, std::size_t k);

/// Smallest eigenvalue of a symmetric matrix.
double min_eigenvalue(const Eigen::MatrixXd& a);

}  // namespace srmc
