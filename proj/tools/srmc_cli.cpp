// srmc command line: measurement, closed-form statistics, bounds, quantizer
// reports, encode/decode and Monte Carlo validation.

#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <sstream>

#include "srmc/coding.hpp"
#include "srmc/error.hpp"
#include "srmc/harness.hpp"
#include "srmc/io.hpp"
#include "srmc/moments.hpp"
#include "srmc/quantization.hpp"
#include "srmc/tailbounds.hpp"

using nlohmann::json;
using namespace srmc;

namespace {

struct SignalOpts {
    std::string in;
    std::string synth;
    std::size_t n = 0;
    SynthParams p;
    bool pad = false;
};

void add_signal_opts(CLI::App* app, SignalOpts& s) {
    app->add_option("--in", s.in, "signal file (.f64 or .csv)");
    app->add_option("--synth", s.synth, "synthetic signal: smooth|pulse_train|ar1|ramp|constant|sparse_in");
    app->add_option("--length", s.n, "synthetic signal length (default: spec n)");
    app->add_option("--period", s.p.d, "pulse_train period");
    app->add_option("--rho", s.p.rho, "ar1 coefficient");
    app->add_option("--sparsity", s.p.k, "sparse_in nonzeros");
    app->add_option("--width", s.p.width, "smooth filter length");
    app->add_option("--value", s.p.value, "constant level");
    app->add_option("--basis", s.p.transform, "sparse_in basis transform");
    app->add_option("--signal-seed", s.p.seed, "synthetic signal seed");
    app->add_flag("--pad", s.pad, "zero-pad the signal to the spec length");
}

Signal load_signal(const SignalOpts& s, std::size_t n) {
    if (!s.in.empty() && !s.synth.empty()) throw DomainError("give either --in or --synth, not both");
    Signal x;
    if (!s.in.empty())
        x = io::read_signal(s.in);
    else if (!s.synth.empty())
        x = synth_signal(s.synth, s.n ? s.n : n, s.p);
    else
        throw DomainError("no signal: pass --in or --synth");
    if (s.pad && n > x.size()) x = zero_pad(x, n);
    return x;
}

std::vector<std::size_t> parse_index_list(const std::string& s) {
    std::vector<std::size_t> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        const auto dash = tok.find('-');
        if (dash != std::string::npos) {
            const std::size_t a = std::stoul(tok.substr(0, dash)), b = std::stoul(tok.substr(dash + 1));
            for (std::size_t i = a; i <= b; ++i) out.push_back(i);
        } else if (!tok.empty()) {
            out.push_back(std::stoul(tok));
        }
    }
    return out;
}

std::vector<double> parse_grid(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) out.push_back(std::stod(tok));
    return out;
}

// Default probe: 1..min(n, 16).
std::vector<std::size_t> probe_or_default(const std::string& s, std::size_t n) {
    if (!s.empty()) return parse_index_list(s);
    std::vector<std::size_t> p;
    for (std::size_t j = 1; j <= std::min<std::size_t>(n, 16); ++j) p.push_back(j);
    return p;
}

void emit(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path);
    if (!out) throw Error("cannot open '" + path + "' for writing");
    out << text;
}

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

json matrix_json(const Eigen::MatrixXd& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json r = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) r.push_back(m(i, j));
        rows.push_back(r);
    }
    return rows;
}

json vector_json(const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

json opt_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

BoundFn bound_fn(const std::string& mode, double tau, std::size_t n) {
    const Mode md = parse_mode(mode);
    TailBoundParams tp{md, n, tau};
    if (md == Mode::rst) throw DomainError("no tail bound for rst");
    if (md != Mode::lr && !(tau > 0.0)) throw DomainError("--tau must be positive for " + mode);
    if (md == Mode::gr && n < 2) throw DomainError("--n is required for gr bounds");
    return tp.fn();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Structurally random matrix measurements: statistics, quantization and coding"};
    app.require_subcommand(1);

    // measure
    std::string spec_path, out_path, json_path, z_path;
    SignalOpts sig;
    auto* measure = app.add_subcommand("measure", "draw a sensing matrix and write y = Phi x");
    measure->add_option("--spec", spec_path, "sensing spec JSON")->required();
    add_signal_opts(measure, sig);
    measure->add_option("--out", out_path, "measurements (.f64 or .csv)")->required();
    measure->add_option("--z", z_path, "also write the full mixture vector z");
    measure->add_option("--json", json_path, "selection indices and spec as JSON");

    // stats
    std::string probe_s;
    auto* stats = app.add_subcommand("stats", "closed-form moments and normality diagnostics (JSON)");
    stats->add_option("--spec", spec_path, "sensing spec JSON")->required();
    add_signal_opts(stats, sig);
    stats->add_option("--probe", probe_s, "component indices, e.g. 1,2,10-16 (default 1-16)");
    stats->add_option("--out", out_path, "output JSON (default stdout)");

    // bounds
    std::string mode_s = "lr", grid_s;
    double tau = 0.0, t_max = 5.0, t_step = 0.1;
    std::size_t bn = 0, comp = 0;
    auto* bounds = app.add_subcommand("bounds", "tail bound over a t grid (CSV)");
    bounds->add_option("--mode", mode_s, "lr|rc|gr");
    bounds->add_option("--tau", tau, "concentration parameter (rc, gr)");
    bounds->add_option("--n", bn, "signal length (gr)");
    bounds->add_option("--spec", spec_path, "derive mode, n and tau from a spec and signal");
    add_signal_opts(bounds, sig);
    bounds->add_option("--component", comp, "row j for the gr tau (with --spec)");
    bounds->add_option("--t-max", t_max, "grid end");
    bounds->add_option("--t-step", t_step, "grid spacing");
    bounds->add_option("--t-grid", grid_s, "explicit comma-separated grid");
    bounds->add_option("--out", out_path, "output CSV (default stdout)");

    // quantize-report
    std::string kind_s = "uniform";
    std::size_t levels = 16;
    double delta = 0.01, qmean = 0.0, qsigma = 1.0, tol = 1e-9, step = 0.0;
    std::optional<double> t_star;
    auto* qrep = app.add_subcommand("quantize-report", "design a quantizer for N(mean, sigma^2) and report it (JSON)");
    qrep->add_option("--kind", kind_s, "uniform|lloyd_max");
    qrep->add_option("--levels", levels, "unsaturated levels L");
    qrep->add_option("--step", step, "uniform cell width (overrides --levels)");
    qrep->add_option("--mean", qmean, "model mean");
    qrep->add_option("--sigma", qsigma, "model standard deviation");
    qrep->add_option("--delta-sat", delta, "saturation probability target");
    qrep->add_option("--mode", mode_s, "bound used for the range: lr|rc|gr");
    qrep->add_option("--tau", tau, "bound parameter (rc, gr)");
    qrep->add_option("--n", bn, "signal length (gr)");
    qrep->add_option("--t-star", t_star, "explicit range half-width in sigma units");
    qrep->add_option("--tol", tol, "Lloyd-Max tolerance");
    qrep->add_option("--out", out_path, "output JSON (default stdout)");

    // encode / decode
    std::string cfg_path, in_path;
    auto* enc = app.add_subcommand("encode", "sense, quantize and entropy-code a signal");
    enc->add_option("--spec", spec_path, "sensing spec JSON")->required();
    enc->add_option("--config", cfg_path, "coding config JSON");
    add_signal_opts(enc, sig);
    enc->add_option("--out", out_path, "bitstream (.srmc)")->required();
    enc->add_option("--json", json_path, "rate report JSON");
    std::string recon_path;
    enc->add_option("--recon", recon_path, "encoder-side dequantized measurements (.f64 or .csv)");

    auto* dec = app.add_subcommand("decode", "decode a bitstream to dequantized measurements");
    dec->add_option("--in", in_path, "bitstream (.srmc)")->required();
    dec->add_option("--out", out_path, "dequantized measurements (.f64 or .csv)")->required();
    dec->add_option("--json", json_path, "side information, selection and saturation flags");

    // validate-moments / validate-tails / qq
    std::size_t trials = 0;
    std::uint64_t base_seed = 1;
    auto* vm = app.add_subcommand("validate-moments", "Monte Carlo moments against the closed forms (JSON)");
    auto* vt = app.add_subcommand("validate-tails", "Monte Carlo exceedance against the tail bounds (CSV)");
    auto* qq = app.add_subcommand("qq", "pooled Q-Q data (CSV) and correlation");
    bool strict = false;
    for (auto* c : {vm, vt, qq}) {
        c->add_option("--spec", spec_path, "sensing spec JSON")->required();
        add_signal_opts(c, sig);
        c->add_option("--trials", trials, c == qq ? "seeds pooled (default 8)" : "Monte Carlo draws");
        c->add_option("--seed", base_seed, "base seed; trial t uses seed ^ t");
        c->add_option("--out", out_path, "output file (default stdout)");
    }
    for (auto* c : {vm, vt}) {
        c->add_option("--probe", probe_s, "component indices (default 1-16)");
        c->add_flag("--strict", strict, "exit with status 2 when a check fails");
    }
    vt->add_option("--t-grid", grid_s, "comma-separated t values (default 1,2,3)");
    qq->add_option("--json", json_path, "correlation summary JSON");

    // replacement
    std::size_t rn = 0, rm = 0;
    bool sweep = false;
    auto* rep = app.add_subcommand("replacement", "with/without replacement probability ratio");
    rep->add_option("--n", rn, "signal length")->required();
    rep->add_option("--m", rm, "measurements (default ceil(n^0.4))");
    rep->add_option("--trials", trials, "paired Monte Carlo runs (0 = exact ratio only)");
    rep->add_option("--seed", base_seed, "base seed");
    rep->add_flag("--sweep", sweep, "CSV over n = 10^3..n by decades with m = ceil(n^0.4)");
    rep->add_option("--out", out_path, "output (default stdout)");

    // synth
    auto* syn = app.add_subcommand("synth", "write a synthetic signal");
    add_signal_opts(syn, sig);
    syn->add_option("--out", out_path, "signal file (.f64 or .csv)")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*measure) {
            const SensingSpec spec = io::spec_from_json(io::read_json(spec_path));
            const Signal x = load_signal(sig, spec.n);
            const SensingDraw d = draw(spec);
            const auto z = mixture_vector(spec, d, x);
            io::write_signal(out_path, select(z, d.selection));
            if (!z_path.empty()) io::write_signal(z_path, z);
            if (!json_path.empty()) io::write_json(json_path, {{"spec", io::to_json(spec)}, {"selection", d.selection}});
        } else if (*stats) {
            const SensingSpec spec = io::spec_from_json(io::read_json(spec_path));
            const Signal x = load_signal(sig, spec.n);
            const MixtureMoments mm = moments_for(spec, x);
            const auto probe = probe_or_default(probe_s, spec.n);
            json j{{"mode", to_string(spec.mode)},
                   {"n", spec.n},
                   {"m", spec.m},
                   {"mu_y", mm.measurement_mean()},
                   {"sigma_y2", mm.measurement_var()},
                   {"probe", probe},
                   {"mean", vector_json(mm.mean_vector(probe))},
                   {"covariance", matrix_json(mm.covariance(probe))}};
            if (probe.size() <= 64) {
                const AmnReport a = amn_diagnostics(spec.transform, x, mm, probe);
                json beta = json::array();
                for (const auto& b : a.beta) beta.push_back(opt_json(b));
                j["amn"] = {{"max_row_infnorm", a.max_row_infnorm},
                            {"scaled_min_variance", a.scaled_min_variance},
                            {"scaled_cov_min_eig", a.scaled_cov_min_eig},
                            {"signal_energy_density", a.signal_energy_density},
                            {"fx_infnorm", a.fx_infnorm},
                            {"alpha_x", opt_json(a.alpha_x)},
                            {"beta", beta}};
            }
            emit(out_path, j.dump(2) + "\n");
        } else if (*bounds) {
            BoundFn b;
            if (!spec_path.empty()) {
                const SensingSpec spec = io::spec_from_json(io::read_json(spec_path));
                const Signal x = load_signal(sig, spec.n);
                b = tail_params(spec, x, comp ? comp : 2).fn();
            } else {
                b = bound_fn(mode_s, tau, bn);
            }
            std::vector<double> grid = grid_s.empty() ? std::vector<double>{} : parse_grid(grid_s);
            if (grid.empty()) {
                if (!(t_step > 0.0)) throw DomainError("--t-step must be positive");
                const auto steps = static_cast<std::size_t>(std::floor(t_max / t_step + 1e-9));
                for (std::size_t i = 0; i <= steps; ++i) grid.push_back(static_cast<double>(i) * t_step);
            }
            std::string csv = "t,bound\n";
            for (double t : grid) csv += num(t) + "," + num(b(t)) + "\n";
            emit(out_path, csv);
        } else if (*qrep) {
            const GaussianModel g{qmean, qsigma};
            const QuantizerKind kind = parse_quantizer_kind(kind_s);
            QuantizerSpec q;
            std::optional<double> ts = t_star;
            if (kind == QuantizerKind::lloyd_max) {
                q = design_lloyd_max(g, levels, tol);
            } else {
                if (!ts) ts = invert_bound(bound_fn(mode_s, tau, bn), delta);
                q = step > 0.0 ? design_uniform_step(g, step, *ts) : design_uniform_t(g, levels, *ts);
            }
            const auto p = codeword_probs(q, g);
            json j{{"kind", to_string(q.kind)},
                   {"levels", q.levels},
                   {"codebook_size", q.codebook_size()},
                   {"lo", q.lo},
                   {"hi", q.hi},
                   {"step", q.step},
                   {"t_star", opt_json(ts)},
                   {"boundaries", q.boundaries},
                   {"reproductions", q.reproductions},
                   {"below_value", q.below_value},
                   {"above_value", q.above_value},
                   {"probabilities", p},
                   {"saturation_probability", q.degenerate ? 0.0 : p.front() + p.back()},
                   {"entropy_bits", entropy(p)},
                   {"distortion", distortion(q, g)},
                   {"fixed_length_bits", flc_width(q.codebook_size())}};
            if (kind == QuantizerKind::lloyd_max) {
                j["converged"] = q.converged;
                j["iterations"] = q.iterations;
            }
            emit(out_path, j.dump(2) + "\n");
        } else if (*enc) {
            const SensingSpec spec = io::spec_from_json(io::read_json(spec_path));
            const CodingConfig cfg = cfg_path.empty() ? CodingConfig{} : io::config_from_json(io::read_json(cfg_path));
            const Signal x = load_signal(sig, spec.n);
            const EncodeResult r = encode(x, spec, cfg);
            io::write_bytes(out_path, r.bytes);
            if (!recon_path.empty()) io::write_signal(recon_path, r.yhat);
            if (!json_path.empty()) {
                std::size_t sat = 0;
                for (bool s : r.saturated) sat += s;
                io::write_json(json_path, {{"side_info", io::to_json(r.stream.side)},
                                           {"tv_count", r.tv_count},
                                           {"header_bits", r.header_bits},
                                           {"payload_bits", r.payload_bits},
                                           {"total_bits", r.total_bits},
                                           {"model_entropy_bits", r.model_entropy_bits},
                                           {"bits_per_measurement", double(r.total_bits) / double(spec.m)},
                                           {"saturated", sat}});
            }
        } else if (*dec) {
            const DecodeResult r = decode(io::read_bytes(in_path));
            io::write_signal(out_path, r.yhat);
            if (!json_path.empty()) {
                std::vector<int> sat(r.saturated.begin(), r.saturated.end());
                io::write_json(json_path, {{"side_info", io::to_json(r.side)},
                                           {"selection", r.selection},
                                           {"saturated", sat},
                                           {"tv_count", r.tv_count}});
            }
        } else if (*vm || *vt || *qq) {
            ExperimentConfig cfg;
            cfg.spec = io::spec_from_json(io::read_json(spec_path));
            cfg.signal = load_signal(sig, cfg.spec.n);
            cfg.base_seed = base_seed;
            cfg.probe = probe_or_default(probe_s, cfg.spec.n);
            if (!grid_s.empty()) cfg.t_grid = parse_grid(grid_s);
            if (*vm) {
                cfg.trials = trials ? trials : 100000;
                const MomentsReport r = mc_moments(cfg);
                const bool pass = r.max_abs_z < 5.0;
                json j{{"mode", to_string(cfg.spec.mode)},
                       {"trials", r.trials},
                       {"base_seed", cfg.base_seed},
                       {"probe", r.probe},
                       {"empirical_mean", vector_json(r.empirical_mean)},
                       {"theoretical_mean", vector_json(r.theoretical_mean)},
                       {"mean_z", vector_json(r.mean_z)},
                       {"empirical_cov", matrix_json(r.empirical_cov)},
                       {"theoretical_cov", matrix_json(r.theoretical_cov)},
                       {"cov_z", matrix_json(r.cov_z)},
                       {"max_abs_z", r.max_abs_z},
                       {"pass", pass}};
                emit(out_path, j.dump(2) + "\n");
                if (strict && !pass) return 2;
            } else if (*vt) {
                cfg.trials = trials ? trials : 100000;
                const auto rows = mc_tails(cfg);
                bool pass = true;
                std::string csv = "t,j,empirical,bound,slack,pass\n";
                for (const auto& r : rows) {
                    csv += num(r.t) + "," + std::to_string(r.j) + "," + num(r.empirical) + "," + num(r.bound) + "," +
                           num(r.slack) + "," + (r.pass ? "1" : "0") + "\n";
                    pass = pass && r.pass;
                }
                emit(out_path, csv);
                if (strict && !pass) return 2;
            } else {
                cfg.trials = trials ? trials : 8;
                const QqResult r = qq_data(cfg);
                std::string csv = "normal_quantile,sample_quantile\n";
                for (std::size_t i = 0; i < r.normal_quantiles.size(); ++i)
                    csv += num(r.normal_quantiles[i]) + "," + num(r.sample_quantiles[i]) + "\n";
                emit(out_path, csv);
                const json j{{"mode", to_string(cfg.spec.mode)},
                             {"seeds", cfg.trials},
                             {"samples", r.samples},
                             {"correlation", r.correlation}};
                if (!json_path.empty())
                    io::write_json(json_path, j);
                else if (!out_path.empty() && out_path != "-")
                    std::cout << j.dump() << "\n";
            }
        } else if (*rep) {
            if (sweep) {
                std::string csv = "n,m,ratio\n";
                for (std::size_t n = 1000; n <= rn; n *= 10) {
                    const auto m = static_cast<std::size_t>(std::ceil(std::pow(static_cast<double>(n), 0.4)));
                    csv += std::to_string(n) + "," + std::to_string(m) + "," + num(replacement_ratio(n, m)) + "\n";
                }
                emit(out_path, csv);
            } else {
                const std::size_t m = rm ? rm : static_cast<std::size_t>(std::ceil(std::pow(static_cast<double>(rn), 0.4)));
                const ReplacementReport r = replacement_study(rn, m, trials, base_seed);
                const json j{{"n", r.n},
                             {"m", r.m},
                             {"exact_ratio", r.exact_ratio},
                             {"empirical_ratio", opt_json(r.empirical_ratio)},
                             {"trials", r.trials}};
                emit(out_path, j.dump(2) + "\n");
            }
        } else if (*syn) {
            if (sig.synth.empty() || sig.n == 0) throw DomainError("synth needs --synth and --length");
            io::write_signal(out_path, synth_signal(sig.synth, sig.n, sig.p).vec());
        }
    } catch (const std::exception& e) {
        std::cerr << "srmc: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
