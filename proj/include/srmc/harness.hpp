#pragma once

// Monte Carlo validation of the closed forms, Q-Q data and the
// with/without-replacement study. Trial t uses seed base ^ t.

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "srmc/moments.hpp"
#include "srmc/sensing.hpp"
#include "srmc/signal.hpp"
#include "srmc/tailbounds.hpp"

namespace srmc {

struct ExperimentConfig {
    SensingSpec spec;
    Signal signal;
    std::size_t trials = 1000;
    std::vector<std::size_t> probe;    // 1-based component indices
    std::vector<double> t_grid{1.0, 2.0, 3.0};
    std::uint64_t base_seed = 1;
};

struct MomentsReport {
    std::vector<std::size_t> probe;
    std::size_t trials = 0;
    Eigen::VectorXd empirical_mean, theoretical_mean, mean_z;
    Eigen::MatrixXd empirical_cov, theoretical_cov, cov_z;
    double max_abs_z = 0.0;
};

/// Empirical mean and covariance of z on the probe against the closed forms.
/// Covariance entries average (z_j - mu_j)(z_h - mu_h) with the model means;
/// standard errors come from the spread of those per-trial products.
MomentsReport mc_moments(const ExperimentConfig& cfg);

struct TailRow {
    double t = 0.0;
    std::size_t j = 0;
    double empirical = 0.0;
    double bound = 0.0;   // capped at 1
    double slack = 0.0;   // 3 sqrt(bound / trials)
    bool pass = false;
};

/// Exceedance frequency of |z_j - mu_j| > t sigma_j for each probe j and
/// grid t. Components with sigma_j = 0 are skipped.
std::vector<TailRow> mc_tails(const ExperimentConfig& cfg);

/// Tail bound of component j for the spec's mode, evaluated at t.
TailBoundParams tail_params(const SensingSpec& spec, const Signal& x, std::size_t j);

struct QqResult {
    std::vector<double> normal_quantiles;
    std::vector<double> sample_quantiles;
    double correlation = 0.0;
    std::size_t samples = 0;
};

inline constexpr std::size_t kQqGrid = 1024;

/// Standardises the samples and pairs Phi^{-1}((i - 0.5)/N) with the sample
/// quantile at the same probability, i = 1..N.
QqResult qq_from_samples(std::vector<double> samples, std::size_t grid = kQqGrid);

/// Measurements pooled over cfg.trials seeds (8 in the desk experiment).
/// GR drops measurements of component 1; LR removes the signal mean first.
QqResult qq_data(const ExperimentConfig& cfg);

struct ReplacementReport {
    std::size_t n = 0, m = 0;
    double exact_ratio = 0.0;                 // |C1| / |C0|
    std::optional<double> empirical_ratio;    // F1(h) / F0(h) at the medians
    std::size_t trials = 0;
};

/// prod_{k<m} (1 - k/n) in log space.
double replacement_ratio(std::size_t n, std::size_t m);

/// Exact ratio, plus a paired Monte Carlo estimate (LR sensing of a smooth
/// signal) when trials > 0 and a transform of order n is available.
ReplacementReport replacement_study(std::size_t n, std::size_t m, std::size_t trials, std::uint64_t seed = 1);

struct SynthParams {
    std::size_t d = 4;            // pulse_train period
    double rho = 0.95;            // ar1 coefficient
    std::size_t k = 8;            // sparse_in nonzeros
    std::size_t width = 0;        // smooth filter length, 0 = max(1, n/32)
    double value = 1.0;           // constant level
    std::string transform = "wht";  // sparse_in basis
    std::uint64_t seed = 1;
};

/// smooth | pulse_train | ar1 | ramp | constant | sparse_in
Signal synth_signal(const std::string& name, std::size_t n, const SynthParams& p = {});

/// Pearson correlation.
double pearson(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace srmc
