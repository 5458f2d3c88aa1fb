#include "srmc/harness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "srmc/detmath.hpp"
#include "srmc/error.hpp"
#include "srmc/rng.hpp"

namespace srmc {

namespace {

// Neumaier compensated sum.
struct Accum {
    double sum = 0.0, comp = 0.0;
    void add(double v) {
        const double t = sum + v;
        if (std::abs(sum) >= std::abs(v))
            comp += (sum - t) + v;
        else
            comp += (v - t) + sum;
        sum = t;
    }
    double value() const { return sum + comp; }
};

// Differences at rounding level (deterministic components) score zero.
double z_score(double emp, double theo, double se, double scale) {
    const double diff = emp - theo;
    if (std::abs(diff) <= 1e-9 * scale) return 0.0;
    if (se > 0.0) return diff / se;
    return std::copysign(std::numeric_limits<double>::infinity(), diff);
}

void check_probe(const ExperimentConfig& cfg, std::size_t limit) {
    if (cfg.probe.empty()) throw DomainError("probe set is empty");
    if (cfg.probe.size() > limit) throw DomainError("probe larger than " + std::to_string(limit));
    for (std::size_t j : cfg.probe)
        if (j < 1 || j > cfg.spec.n) throw IndexError("probe index " + std::to_string(j) + " outside 1..n");
}

}  // namespace

MomentsReport mc_moments(const ExperimentConfig& cfg) {
    check_probe(cfg, 64);
    if (cfg.trials < 1000) throw DomainError("mc_moments needs at least 1000 trials");
    const MixtureMoments mm = moments_for(cfg.spec, cfg.signal);
    const std::size_t p = cfg.probe.size();
    const auto P = static_cast<Eigen::Index>(p);

    MomentsReport r;
    r.probe = cfg.probe;
    r.trials = cfg.trials;
    r.theoretical_mean = mm.mean_vector(cfg.probe);
    r.theoretical_cov = mm.covariance(cfg.probe);

    std::vector<Accum> s1(p), s2(p), c1(p * p), c2(p * p);
    std::vector<double> dz(p);
    for (std::size_t t = 0; t < cfg.trials; ++t) {
        const SensingDraw d = draw(cfg.spec, trial_seed(cfg.base_seed, t));
        const std::vector<double> z = mixture_vector(cfg.spec, d, cfg.signal);
        for (std::size_t a = 0; a < p; ++a) {
            const double v = z[cfg.probe[a] - 1];
            s1[a].add(v);
            s2[a].add(v * v);
            dz[a] = v - r.theoretical_mean(static_cast<Eigen::Index>(a));
        }
        for (std::size_t a = 0; a < p; ++a)
            for (std::size_t b = a; b < p; ++b) {
                const double prod = dz[a] * dz[b];
                c1[a * p + b].add(prod);
                c2[a * p + b].add(prod * prod);
            }
    }
    const double T = static_cast<double>(cfg.trials);
    r.empirical_mean.resize(P);
    r.mean_z.resize(P);
    r.empirical_cov.resize(P, P);
    r.cov_z.resize(P, P);
    for (std::size_t a = 0; a < p; ++a) {
        const auto A = static_cast<Eigen::Index>(a);
        const double mean = s1[a].value() / T;
        const double var = std::max(0.0, (s2[a].value() / T - mean * mean) * T / (T - 1.0));
        r.empirical_mean(A) = mean;
        r.mean_z(A) = z_score(mean, r.theoretical_mean(A), std::sqrt(var / T), std::sqrt(s2[a].value() / T));
        for (std::size_t b = a; b < p; ++b) {
            const auto B = static_cast<Eigen::Index>(b);
            const double m1 = c1[a * p + b].value() / T;
            const double v = std::max(0.0, (c2[a * p + b].value() / T - m1 * m1) * T / (T - 1.0));
            r.empirical_cov(A, B) = r.empirical_cov(B, A) = m1;
            r.cov_z(A, B) = r.cov_z(B, A) = z_score(m1, r.theoretical_cov(A, B), std::sqrt(v / T),
                                                       std::sqrt(s2[a].value() / T * s2[b].value() / T));
        }
    }
    r.max_abs_z = std::max(r.mean_z.cwiseAbs().maxCoeff(), r.cov_z.cwiseAbs().maxCoeff());
    return r;
}

TailBoundParams tail_params(const SensingSpec& spec, const Signal& x, std::size_t j) {
    TailBoundParams tp;
    tp.mode = spec.mode;
    tp.n = spec.n;
    switch (spec.mode) {
        case Mode::lr: break;
        case Mode::rc: tp.tau = tau_rc(x); break;
        case Mode::gr: tp.tau = tau_gr(spec.transform_op(), j, x); break;
        case Mode::rst: throw DomainError("no tail bound for deterministic sensing");
    }
    return tp;
}

std::vector<TailRow> mc_tails(const ExperimentConfig& cfg) {
    check_probe(cfg, 64);
    if (cfg.trials < 1) throw DomainError("trials must be positive");
    const MixtureMoments mm = moments_for(cfg.spec, cfg.signal);
    struct Target {
        std::size_t j;
        double mu, sigma;
        TailBoundParams tp;
    };
    std::vector<Target> targets;
    for (std::size_t j : cfg.probe) {
        const double var = mm.variance(j);
        if (!(var > 0.0)) continue;
        targets.push_back({j, mm.mean(j), std::sqrt(var), tail_params(cfg.spec, cfg.signal, j)});
    }
    const std::size_t G = cfg.t_grid.size();
    std::vector<std::size_t> count(targets.size() * G, 0);
    for (std::size_t t = 0; t < cfg.trials; ++t) {
        const SensingDraw d = draw(cfg.spec, trial_seed(cfg.base_seed, t));
        const std::vector<double> z = mixture_vector(cfg.spec, d, cfg.signal);
        for (std::size_t a = 0; a < targets.size(); ++a) {
            const double dev = std::abs(z[targets[a].j - 1] - targets[a].mu);
            for (std::size_t g = 0; g < G; ++g)
                if (dev > cfg.t_grid[g] * targets[a].sigma) ++count[a * G + g];
        }
    }
    std::vector<TailRow> rows;
    const double T = static_cast<double>(cfg.trials);
    for (std::size_t g = 0; g < G; ++g)
        for (std::size_t a = 0; a < targets.size(); ++a) {
            TailRow row;
            row.t = cfg.t_grid[g];
            row.j = targets[a].j;
            row.empirical = static_cast<double>(count[a * G + g]) / T;
            row.bound = capped(targets[a].tp.bound(row.t));
            row.slack = 3.0 * std::sqrt(row.bound / T);
            row.pass = row.empirical <= row.bound + row.slack;
            rows.push_back(row);
        }
    return rows;
}

double pearson(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size() || a.size() < 2) throw DimensionError("pearson needs two equal-length samples");
    const double n = static_cast<double>(a.size());
    double ma = 0.0, mb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ma += a[i];
        mb += b[i];
    }
    ma /= n;
    mb /= n;
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        sab += (a[i] - ma) * (b[i] - mb);
        saa += (a[i] - ma) * (a[i] - ma);
        sbb += (b[i] - mb) * (b[i] - mb);
    }
    if (saa <= 0.0 || sbb <= 0.0) throw DomainError("pearson: degenerate variance");
    return sab / std::sqrt(saa * sbb);
}

QqResult qq_from_samples(std::vector<double> samples, std::size_t grid) {
    if (samples.size() < 2 || grid < 2) throw DomainError("Q-Q needs at least two samples and grid points");
    const double N = static_cast<double>(samples.size());
    double mean = 0.0;
    for (double v : samples) mean += v;
    mean /= N;
    double var = 0.0;
    for (double v : samples) var += (v - mean) * (v - mean);
    var /= N - 1.0;
    if (!(var > 0.0)) throw DomainError("Q-Q: samples have zero variance");
    const double sd = std::sqrt(var);
    for (double& v : samples) v = (v - mean) / sd;
    std::sort(samples.begin(), samples.end());

    QqResult r;
    r.samples = samples.size();
    for (std::size_t i = 1; i <= grid; ++i) {
        const double p = (static_cast<double>(i) - 0.5) / static_cast<double>(grid);
        r.normal_quantiles.push_back(detmath::normal_quantile(p));
        // sample k (1-based) sits at plotting position (k - 0.5)/N
        const double pos = std::clamp(p * N + 0.5, 1.0, N);
        const auto lo = static_cast<std::size_t>(std::floor(pos));
        const double frac = pos - static_cast<double>(lo);
        const double v = lo >= samples.size() ? samples.back()
                                              : samples[lo - 1] + frac * (samples[lo] - samples[lo - 1]);
        r.sample_quantiles.push_back(v);
    }
    r.correlation = pearson(r.normal_quantiles, r.sample_quantiles);
    return r;
}

QqResult qq_data(const ExperimentConfig& cfg) {
    if (cfg.trials < 1) throw DomainError("qq needs at least one seed");
    Signal x = cfg.signal;
    if (cfg.spec.mode == Mode::lr) {
        std::vector<double> v(x.samples().begin(), x.samples().end());
        const double mean = x.mean();
        for (double& e : v) e -= mean;
        x = Signal(std::move(v));
    }
    std::vector<double> pooled;
    for (std::size_t s = 0; s < cfg.trials; ++s) {
        const SensingDraw d = draw(cfg.spec, trial_seed(cfg.base_seed, s));
        const std::vector<double> z = mixture_vector(cfg.spec, d, x);
        for (std::size_t c : d.selection) {
            if (cfg.spec.mode == Mode::gr && c == 1) continue;
            pooled.push_back(z[c - 1]);
        }
    }
    return qq_from_samples(std::move(pooled));
}

double replacement_ratio(std::size_t n, std::size_t m) {
    if (n == 0) throw DomainError("n must be positive");
    if (m > n) throw DomainError("m must not exceed n");
    double acc = 0.0;
    for (std::size_t k = 0; k < m; ++k) acc += std::log1p(-static_cast<double>(k) / static_cast<double>(n));
    return std::exp(acc);
}

ReplacementReport replacement_study(std::size_t n, std::size_t m, std::size_t trials, std::uint64_t seed) {
    ReplacementReport r;
    r.n = n;
    r.m = m;
    r.exact_ratio = replacement_ratio(n, m);
    r.trials = trials;
    const bool pow2 = (n & (n - 1)) == 0;
    if (trials == 0 || m == 0 || (!pow2 && n > 4096)) return r;

    SensingSpec spec;
    spec.mode = Mode::lr;
    spec.n = n;
    spec.m = m;
    spec.transform = pow2 ? TransformOp::wht(n) : TransformOp::dct(n);
    SynthParams sp;
    sp.seed = seed;
    const Signal x = synth_signal("smooth", n, sp);

    std::vector<std::vector<double>> y0, y1;
    for (std::size_t t = 0; t < trials; ++t) {
        const std::uint64_t s = trial_seed(seed, t);
        spec.selection = Selection::with_replacement;
        const SensingDraw d = draw(spec, s);
        const std::vector<double> z = mixture_vector(spec, d, x);
        y0.push_back(select(z, d.selection));
        spec.selection = Selection::without_replacement;
        y1.push_back(select(z, draw_selection(spec, s)));
    }
    // thresholds: per-coordinate medians of the pooled runs
    std::vector<double> h(m);
    std::vector<double> col;
    for (std::size_t k = 0; k < m; ++k) {
        col.clear();
        for (std::size_t t = 0; t < trials; ++t) {
            col.push_back(y0[t][k]);
            col.push_back(y1[t][k]);
        }
        std::nth_element(col.begin(), col.begin() + static_cast<std::ptrdiff_t>(col.size() / 2), col.end());
        h[k] = col[col.size() / 2];
    }
    const auto below = [&](const std::vector<double>& y) {
        for (std::size_t k = 0; k < m; ++k)
            if (y[k] > h[k]) return false;
        return true;
    };
    std::size_t f0 = 0, f1 = 0;
    for (std::size_t t = 0; t < trials; ++t) {
        f0 += below(y0[t]);
        f1 += below(y1[t]);
    }
    if (f0 > 0) r.empirical_ratio = static_cast<double>(f1) / static_cast<double>(f0);
    return r;
}

Signal synth_signal(const std::string& name, std::size_t n, const SynthParams& p) {
    if (n == 0) throw DomainError("signal length must be positive");
    std::vector<double> x(n, 0.0);
    CounterRng rng(p.seed, Stream::signal);
    if (name == "smooth") {
        std::vector<double> w(n);
        for (auto& e : w) e = rng.normal();
        const std::size_t width = std::min(n, p.width ? p.width : std::max<std::size_t>(1, n / 32));
        double acc = 0.0;
        for (std::size_t i = 1; i <= width; ++i) acc += w[(n - i % n) % n];
        for (std::size_t k = 0; k < n; ++k) {
            acc += w[k] - w[(k + n - width) % n];
            x[k] = acc / std::sqrt(static_cast<double>(width));
        }
    } else if (name == "pulse_train") {
        if (p.d < 1) throw DomainError("pulse_train period must be positive");
        for (std::size_t k = 0; k < n; k += p.d) x[k] = 1.0;
    } else if (name == "ar1") {
        if (!(std::abs(p.rho) < 1.0)) throw DomainError("ar1 needs |rho| < 1");
        x[0] = rng.normal() / std::sqrt(1.0 - p.rho * p.rho);
        for (std::size_t k = 1; k < n; ++k) x[k] = p.rho * x[k - 1] + rng.normal();
    } else if (name == "ramp") {
        for (std::size_t k = 0; k < n; ++k) x[k] = n == 1 ? 0.0 : static_cast<double>(k) / static_cast<double>(n - 1);
    } else if (name == "constant") {
        std::fill(x.begin(), x.end(), p.value);
    } else if (name == "sparse_in") {
        const TransformOp t = TransformOp::parse(p.transform, n);
        if (p.k > n) throw DomainError("sparse_in: k exceeds n");
        std::vector<double> s(n, 0.0);
        // partial Fisher-Yates for the support
        std::vector<std::size_t> idx(n);
        for (std::size_t i = 0; i < n; ++i) idx[i] = i;
        for (std::size_t i = 0; i < p.k; ++i) {
            std::swap(idx[i], idx[i + rng.below(n - i)]);
            s[idx[i]] = rng.normal();
        }
        x = t.apply_adjoint(s);
    } else {
        throw DomainError("unknown synthetic signal '" + name + "'");
    }
    return Signal(std::move(x));
}

}  // namespace srmc
