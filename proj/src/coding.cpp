#include "srmc/coding.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <limits>
#include <map>

#include "srmc/error.hpp"
#include "srmc/tailbounds.hpp"

namespace srmc {

std::string to_string(ModelKind k) {
    switch (k) {
        case ModelKind::sigma_y: return "sigma_y";
        case ModelKind::gr: return "gr";
        case ModelKind::topk: return "topk";
        case ModelKind::rho: return "rho";
    }
    return "?";
}

std::string to_string(CoderKind k) { return k == CoderKind::vlc ? "vlc" : "flc"; }

std::string to_string(QuantizerKind k) { return k == QuantizerKind::uniform ? "uniform" : "lloyd_max"; }

ModelKind parse_model_kind(std::string_view s) {
    if (s == "sigma_y") return ModelKind::sigma_y;
    if (s == "gr") return ModelKind::gr;
    if (s == "topk") return ModelKind::topk;
    if (s == "rho") return ModelKind::rho;
    throw DomainError("unknown side-information model '" + std::string(s) + "'");
}

CoderKind parse_coder_kind(std::string_view s) {
    if (s == "vlc" || s == "arithmetic") return CoderKind::vlc;
    if (s == "flc") return CoderKind::flc;
    throw DomainError("unknown coder '" + std::string(s) + "'");
}

QuantizerKind parse_quantizer_kind(std::string_view s) {
    if (s == "uniform") return QuantizerKind::uniform;
    if (s == "lloyd_max" || s == "lloyd-max") return QuantizerKind::lloyd_max;
    throw DomainError("unknown quantizer kind '" + std::string(s) + "'");
}

bool equal_magnitude_rows(const TransformOp& t) {
    if (t.kind() == TransformKind::wht) return true;
    if (t.kind() == TransformKind::kronecker) return equal_magnitude_rows(t.left()) && equal_magnitude_rows(t.right());
    return false;
}

SensingSpec SideInfo::sensing_spec() const {
    SensingSpec s;
    s.mode = mode;
    s.n = n;
    s.m = m;
    s.selection = selection;
    s.seed = seed;
    if (mode != Mode::rc) s.transform = TransformOp::parse(transform, n);
    return s;
}

bool operator==(const SideInfo& a, const SideInfo& b) {
    const auto same = [](double u, double v) { return std::bit_cast<std::uint64_t>(u) == std::bit_cast<std::uint64_t>(v); };
    const auto same_vec = [&](const std::vector<double>& u, const std::vector<double>& v) {
        if (u.size() != v.size()) return false;
        for (std::size_t i = 0; i < u.size(); ++i)
            if (!same(u[i], v[i])) return false;
        return true;
    };
    return a.mode == b.mode && a.transform == b.transform && a.n == b.n && a.m == b.m && a.selection == b.selection &&
           a.seed == b.seed && a.model == b.model && same(a.mu_y, b.mu_y) && same(a.sigma_y, b.sigma_y) &&
           same(a.mean, b.mean) && same(a.norm, b.norm) && a.topk.indices == b.topk.indices &&
           same_vec(a.topk.values, b.topk.values) && same_vec(a.rho, b.rho) && a.quantizer.kind == b.quantizer.kind &&
           a.quantizer.levels == b.quantizer.levels && same(a.quantizer.step, b.quantizer.step) &&
           same(a.quantizer.delta_sat, b.quantizer.delta_sat) && same(a.quantizer.tol, b.quantizer.tol) &&
           same(a.t_star, b.t_star) && a.coder == b.coder && a.prediction == b.prediction &&
           a.quantizer_hash == b.quantizer_hash;
}

// ---------------------------------------------------------------- bytes

namespace {

class ByteWriter {
public:
    template <typename T>
    void put(T v) {
        static_assert(std::is_integral_v<T>);
        for (std::size_t i = 0; i < sizeof(T); ++i)
            out.push_back(static_cast<std::uint8_t>(static_cast<std::uint64_t>(v) >> (8 * i)));
    }
    void put_f64(double v) { put(std::bit_cast<std::uint64_t>(v)); }
    void put_bytes(std::span<const std::uint8_t> b) { out.insert(out.end(), b.begin(), b.end()); }
    std::vector<std::uint8_t> out;
};

class ByteReader {
public:
    explicit ByteReader(std::span<const std::uint8_t> b) : in_(b) {}
    template <typename T>
    T get() {
        need(sizeof(T));
        std::uint64_t v = 0;
        for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<std::uint64_t>(in_[pos_ + i]) << (8 * i);
        pos_ += sizeof(T);
        return static_cast<T>(v);
    }
    double get_f64() { return std::bit_cast<double>(get<std::uint64_t>()); }
    std::span<const std::uint8_t> get_bytes(std::size_t k) {
        need(k);
        auto s = in_.subspan(pos_, k);
        pos_ += k;
        return s;
    }
    std::size_t remaining() const { return in_.size() - pos_; }

private:
    void need(std::size_t k) const {
        if (in_.size() - pos_ < k) throw FormatError("stream truncated");
    }
    std::span<const std::uint8_t> in_;
    std::size_t pos_ = 0;
};

}  // namespace

std::vector<std::uint8_t> serialize(const SideInfo& s) {
    ByteWriter w;
    w.put(static_cast<std::uint8_t>(s.mode));
    if (s.transform.size() > 0xffff) throw DomainError("transform name too long");
    w.put(static_cast<std::uint16_t>(s.transform.size()));
    w.put_bytes({reinterpret_cast<const std::uint8_t*>(s.transform.data()), s.transform.size()});
    w.put(s.n);
    w.put(s.m);
    w.put(static_cast<std::uint8_t>(s.selection));
    w.put(s.seed);
    w.put(static_cast<std::uint8_t>(s.model));
    switch (s.model) {
        case ModelKind::sigma_y:
            w.put_f64(s.mu_y);
            w.put_f64(s.sigma_y);
            break;
        case ModelKind::gr:
            w.put_f64(s.mean);
            w.put_f64(s.norm);
            break;
        case ModelKind::topk:
            w.put(static_cast<std::uint32_t>(s.topk.indices.size()));
            for (std::size_t i = 0; i < s.topk.indices.size(); ++i) {
                w.put(static_cast<std::uint32_t>(s.topk.indices[i]));
                w.put_f64(s.topk.values[i]);
            }
            break;
        case ModelKind::rho:
            w.put(static_cast<std::uint32_t>(s.rho.size()));
            for (double v : s.rho) w.put_f64(v);
            break;
    }
    w.put(static_cast<std::uint8_t>(s.quantizer.kind));
    w.put(s.quantizer.levels);
    w.put_f64(s.quantizer.step);
    w.put_f64(s.quantizer.delta_sat);
    w.put_f64(s.t_star);
    w.put_f64(s.quantizer.tol);
    w.put(static_cast<std::uint8_t>(s.coder));
    w.put(s.prediction);
    w.put(s.quantizer_hash);
    return std::move(w.out);
}

SideInfo parse_side_info(std::span<const std::uint8_t> bytes) {
    ByteReader r(bytes);
    SideInfo s;
    const auto mode = r.get<std::uint8_t>();
    if (mode > 3) throw FormatError("unknown mode tag " + std::to_string(mode));
    s.mode = static_cast<Mode>(mode);
    const auto len = r.get<std::uint16_t>();
    const auto name = r.get_bytes(len);
    s.transform.assign(name.begin(), name.end());
    s.n = r.get<std::uint64_t>();
    s.m = r.get<std::uint64_t>();
    const auto sel = r.get<std::uint8_t>();
    if (sel > 1) throw FormatError("unknown selection tag");
    s.selection = static_cast<Selection>(sel);
    s.seed = r.get<std::uint64_t>();
    const auto model = r.get<std::uint8_t>();
    if (model > 3) throw FormatError("unknown model tag");
    s.model = static_cast<ModelKind>(model);
    switch (s.model) {
        case ModelKind::sigma_y:
            s.mu_y = r.get_f64();
            s.sigma_y = r.get_f64();
            break;
        case ModelKind::gr:
            s.mean = r.get_f64();
            s.norm = r.get_f64();
            break;
        case ModelKind::topk: {
            const auto k = r.get<std::uint32_t>();
            if (static_cast<std::uint64_t>(k) * 12 > r.remaining()) throw FormatError("stream truncated");
            s.topk.n = s.n;
            for (std::uint32_t i = 0; i < k; ++i) {
                const auto idx = r.get<std::uint32_t>();
                if (idx < 1 || idx > s.n) throw FormatError("top-K index outside 1..n");
                s.topk.indices.push_back(idx);
                s.topk.values.push_back(r.get_f64());
            }
            break;
        }
        case ModelKind::rho: {
            const auto l = r.get<std::uint32_t>();
            if (static_cast<std::uint64_t>(l) * 8 > r.remaining()) throw FormatError("stream truncated");
            for (std::uint32_t i = 0; i < l; ++i) s.rho.push_back(r.get_f64());
            break;
        }
    }
    const auto qk = r.get<std::uint8_t>();
    if (qk > 1) throw FormatError("unknown quantizer tag");
    s.quantizer.kind = static_cast<QuantizerKind>(qk);
    s.quantizer.levels = r.get<std::uint32_t>();
    s.quantizer.step = r.get_f64();
    s.quantizer.delta_sat = r.get_f64();
    s.t_star = r.get_f64();
    s.quantizer.tol = r.get_f64();
    const auto coder = r.get<std::uint8_t>();
    if (coder > 1) throw FormatError("unknown coder tag");
    s.coder = static_cast<CoderKind>(coder);
    s.prediction = r.get<std::uint32_t>();
    s.quantizer_hash = r.get<std::uint64_t>();
    if (r.remaining() != 0) throw FormatError("trailing bytes after side information");
    return s;
}

std::vector<std::uint8_t> serialize(const Bitstream& b) {
    ByteWriter w;
    w.put_bytes({reinterpret_cast<const std::uint8_t*>("SRMC"), 4});
    w.put(kFormatVersion);
    const std::vector<std::uint8_t> side = serialize(b.side);
    w.put(static_cast<std::uint32_t>(side.size()));
    w.put_bytes(side);
    w.put(b.payload.bits);
    if (b.payload.bytes.size() != (b.payload.bits + 7) / 8) throw DimensionError("payload byte count does not match bit count");
    w.put_bytes(b.payload.bytes);
    return std::move(w.out);
}

Bitstream parse_bitstream(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < 4 || std::memcmp(bytes.data(), "SRMC", 4) != 0) throw FormatError("bad magic: not an SRMC stream");
    ByteReader r(bytes.subspan(4));
    const auto version = r.get<std::uint16_t>();
    if (version != kFormatVersion)
        throw FormatError("unsupported format version " + std::to_string(version) + " (expected " +
                          std::to_string(kFormatVersion) + ")");
    const auto side_len = r.get<std::uint32_t>();
    Bitstream b;
    b.side = parse_side_info(r.get_bytes(side_len));
    b.payload.bits = r.get<std::uint64_t>();
    if (b.payload.bits / 8 > r.remaining()) throw FormatError("payload truncated");
    const std::size_t nbytes = static_cast<std::size_t>((b.payload.bits + 7) / 8);
    if (r.remaining() < nbytes) throw FormatError("payload truncated");
    if (r.remaining() > nbytes) throw FormatError("trailing bytes after payload");
    const auto p = r.get_bytes(nbytes);
    b.payload.bytes.assign(p.begin(), p.end());
    if (b.payload.bits % 8 != 0 && (b.payload.bytes.back() & (0xffu >> (b.payload.bits % 8))) != 0)
        throw FormatError("nonzero padding bits in payload");
    return b;
}

// ---------------------------------------------------------------- scheme

namespace {

constexpr double kVarianceFloor = 1e-6;

struct QuantEntry {
    QuantizerSpec spec;
    FrequencyTable table;
    double entropy = 0.0;
};

// Everything the decoder derives from side information alone.
struct Scheme {
    std::vector<std::size_t> selection;
    std::vector<std::size_t> tv_measure;  // measurement position (0-based) of each TV
    std::vector<PredictionGroup> groups;  // members index into the TV list
    std::vector<std::vector<const QuantEntry*>> quant;
    std::vector<double> tv_sigma;
    std::map<std::uint64_t, QuantEntry> cache;  // keyed by sigma bits; nodes are stable
    std::optional<double> z1;                   // GR: value of component 1
    std::uint64_t hash = 0;
};

std::optional<MixtureMoments> model_moments(const SideInfo& s, const SensingSpec& spec) {
    switch (s.model) {
        case ModelKind::sigma_y: return std::nullopt;
        case ModelKind::gr: return MixtureMoments::gr(spec.transform_op(), s.mean, s.norm * s.norm, s.m);
        case ModelKind::topk: {
            if (s.topk.indices.empty() || s.topk.indices.front() != 1)
                throw FormatError("top-K model must carry the DC entry");
            return MixtureMoments::lr(spec.transform_op(), s.topk.densify(), s.m);
        }
        case ModelKind::rho:
            if (s.rho.empty() || s.rho.size() > s.n) throw FormatError("autocorrelation window must hold 1..n lags");
            return MixtureMoments::rc(s.rho, s.n, s.m);
    }
    return std::nullopt;
}

void check_model_for_mode(const SideInfo& s) {
    const bool ok = (s.model == ModelKind::gr && s.mode == Mode::gr) ||
                    (s.model == ModelKind::topk && s.mode == Mode::lr) ||
                    (s.model == ModelKind::rho && s.mode == Mode::rc) ||
                    (s.model == ModelKind::sigma_y && s.mode != Mode::gr);
    if (!ok) throw DomainError("side-information model " + to_string(s.model) + " does not fit " + to_string(s.mode) + " sensing");
    if (s.prediction > 1 && s.model == ModelKind::sigma_y)
        throw DomainError("prediction needs a covariance model in the side information");
    if (s.prediction > kMaxGroupSize) throw DomainError("prediction group size above " + std::to_string(kMaxGroupSize));
}

const QuantEntry* quantizer_for(Scheme& sc, const SideInfo& s, const std::optional<QuantizerSpec>& unit_lloyd,
                                double sigma) {
    const std::uint64_t key = std::bit_cast<std::uint64_t>(sigma);
    auto it = sc.cache.find(key);
    if (it != sc.cache.end()) return &it->second;
    const GaussianModel g{0.0, sigma};
    QuantizerSpec q;
    if (s.quantizer.kind == QuantizerKind::lloyd_max)
        q = scale_quantizer(*unit_lloyd, g);
    else if (s.quantizer.levels > 0)
        q = design_uniform_t(g, s.quantizer.levels, s.t_star);
    else
        q = design_uniform_step(g, s.quantizer.step, s.t_star);
    const std::vector<double> p = codeword_probs(q, g);
    QuantEntry e{std::move(q), FrequencyTable::from_probs(p), entropy(p)};
    return &sc.cache.emplace(key, std::move(e)).first->second;
}

Scheme build_scheme(const SideInfo& s) {
    check_model_for_mode(s);
    const SensingSpec spec = s.sensing_spec();
    spec.validate();
    if (s.quantizer.kind == QuantizerKind::uniform) {
        if (s.quantizer.levels == 0 && !(s.quantizer.step > 0.0)) throw DomainError("uniform quantizer needs levels or step");
        if (s.quantizer.levels == 1) throw DomainError("uniform quantizer needs levels >= 2");
        if (!(s.t_star > 0.0)) throw DomainError("quantizer range t* must be positive");
    } else if (s.quantizer.levels < 2) {
        throw DomainError("Lloyd-Max quantizer needs levels >= 2");
    }

    Scheme sc;
    sc.selection = draw_selection(spec, s.seed);
    std::vector<std::size_t> comps;
    for (std::size_t k = 0; k < sc.selection.size(); ++k) {
        if (s.mode == Mode::gr && sc.selection[k] == 1) continue;
        sc.tv_measure.push_back(k);
        comps.push_back(sc.selection[k]);
    }
    if (s.mode == Mode::gr)
        sc.z1 = static_cast<double>(s.n) * s.mean / std::sqrt(static_cast<double>(s.m));

    const std::optional<MixtureMoments> mm = model_moments(s, spec);
    const bool floored = s.model == ModelKind::topk || s.model == ModelKind::rho;
    const double floor = mm ? kVarianceFloor * std::max(0.0, mm->measurement_var()) : 0.0;
    const auto sigma_of = [&](double var) { return std::sqrt(std::max(var, floored ? floor : 0.0)); };

    if (s.prediction > 1) {
        PredictionPlan pl = plan(*mm, comps, s.prediction);
        sc.groups = std::move(pl.groups);
    } else {
        sc.groups.reserve(comps.size());
        for (std::size_t i = 0; i < comps.size(); ++i) {
            PredictionGroup g;
            g.members = {i};
            g.components = {comps[i]};
            g.coeffs = {{}};
            const double var = mm ? mm->variance(comps[i]) : s.sigma_y * s.sigma_y;
            g.mean = {mm ? mm->mean(comps[i]) : s.mu_y};
            g.raw_residual_var = {var};
            g.residual_var = {std::max(0.0, var)};
            sc.groups.push_back(std::move(g));
        }
    }

    std::optional<QuantizerSpec> unit_lloyd;
    if (s.quantizer.kind == QuantizerKind::lloyd_max) {
        unit_lloyd = design_lloyd_max({0.0, 1.0}, s.quantizer.levels, s.quantizer.tol);
        if (!unit_lloyd->converged) throw NumericalError("Lloyd-Max design did not converge");
    }

    sc.tv_sigma.assign(comps.size(), 0.0);
    std::uint64_t h = 14695981039346656037ull;
    for (const auto& g : sc.groups) {
        std::vector<const QuantEntry*> qs;
        for (std::size_t q = 0; q < g.members.size(); ++q) {
            const double sigma = sigma_of(g.residual_var[q]);
            sc.tv_sigma[g.members[q]] = sigma;
            const QuantEntry* e = quantizer_for(sc, s, unit_lloyd, sigma);
            qs.push_back(e);
            h = (h ^ fingerprint(e->spec)) * 1099511628211ull;
        }
        sc.quant.push_back(std::move(qs));
    }
    sc.hash = h;
    return sc;
}

template <typename F>
auto with_stage(const char* stage, F&& f) -> decltype(f()) {
    const std::string ctx = std::string("encode: ") + stage + ": ";
    try {
        return f();
    } catch (const DimensionError& e) {
        throw DimensionError(ctx + e.what());
    } catch (const IndexError& e) {
        throw IndexError(ctx + e.what());
    } catch (const DomainError& e) {
        throw DomainError(ctx + e.what());
    } catch (const FormatError& e) {
        throw FormatError(ctx + e.what());
    } catch (const NumericalError& e) {
        throw NumericalError(ctx + e.what());
    }
}

ModelKind default_model(const SensingSpec& spec, const CodingConfig& cfg) {
    switch (spec.mode) {
        case Mode::gr: return ModelKind::gr;
        case Mode::lr:
            return equal_magnitude_rows(spec.transform_op()) && cfg.prediction <= 1 ? ModelKind::sigma_y : ModelKind::topk;
        case Mode::rc: return cfg.prediction > 1 ? ModelKind::rho : ModelKind::sigma_y;
        case Mode::rst: return ModelKind::sigma_y;
    }
    return ModelKind::sigma_y;
}

double mode_t_star(const SensingSpec& spec, const Signal& x, double delta) {
    switch (spec.mode) {
        case Mode::lr:
        case Mode::rst: return invert_bound(lr_bound, delta);
        case Mode::rc: {
            if (x.norm2() == 0.0) return 1.0;
            const double tau = tau_rc(x);
            return invert_bound([tau](double t) { return rc_bound(t, tau); }, delta);
        }
        case Mode::gr: {
            // The loosest bound over the first rows sets one range for all TVs.
            const TransformOp& t = spec.transform_op();
            std::optional<double> tau;
            const std::size_t last = std::min<std::size_t>(spec.n, 65);
            for (std::size_t j = 2; j <= last; ++j) {
                try {
                    const double v = tau_gr(t, j, x);
                    tau = tau ? std::min(*tau, v) : v;
                } catch (const DomainError&) {
                }
            }
            if (!tau) return 1.0;
            const double tj = *tau;
            const std::size_t n = spec.n;
            return invert_bound([tj, n](double u) { return gr_bound(u, tj, n); }, delta);
        }
    }
    return 1.0;
}

}  // namespace

EncodeResult encode(const Signal& x, const SensingSpec& spec, const CodingConfig& cfg) {
    with_stage("spec", [&] {
        spec.validate();
        if (x.size() != spec.n)
            throw DimensionError("signal length " + std::to_string(x.size()) + " != n = " + std::to_string(spec.n));
        if (spec.n > 0xffffffffu) throw DomainError("n above 2^32 is not representable in v1 streams");
    });

    SideInfo s;
    s.mode = spec.mode;
    s.transform = spec.mode == Mode::rc ? "" : spec.transform_op().name();
    s.n = spec.n;
    s.m = spec.m;
    s.selection = spec.selection;
    s.seed = spec.seed;
    s.model = cfg.model ? *cfg.model : default_model(spec, cfg);
    s.quantizer = cfg.quantizer;
    s.coder = cfg.coder;
    s.prediction = cfg.prediction;

    EncodeResult res;
    std::vector<double> z;
    with_stage("sensing", [&] {
        const SensingDraw d = draw(spec);
        z = mixture_vector(spec, d, x);
        res.selection = d.selection;
        res.y = select(z, d.selection);
    });

    with_stage("model", [&] {
        check_model_for_mode(s);
        const double m = static_cast<double>(spec.m);
        switch (s.model) {
            case ModelKind::sigma_y: {
                double mu = 0.0;
                if (spec.mode == Mode::rst) {
                    for (double v : z) mu += v;
                    mu /= static_cast<double>(spec.n);
                }
                s.mu_y = mu;
                s.sigma_y = std::sqrt(std::max(0.0, x.norm2() / m - mu * mu));
                break;
            }
            case ModelKind::gr:
                s.mean = x.mean();
                s.norm = x.norm();
                break;
            case ModelKind::topk: {
                const std::vector<double> wxx = squared_signal_transform(spec.transform_op(), x);
                std::vector<double> mags(wxx.size());
                for (std::size_t i = 0; i < wxx.size(); ++i) mags[i] = std::abs(wxx[i]);
                mags[0] = std::numeric_limits<double>::infinity();  // the DC entry carries |x|^2
                const std::size_t k = std::clamp<std::size_t>(cfg.topk, 1, spec.n);
                SparseModel sm = topk_from(mags, k);
                for (std::size_t i = 0; i < sm.indices.size(); ++i) sm.values[i] = wxx[sm.indices[i] - 1];
                s.topk = std::move(sm);
                break;
            }
            case ModelKind::rho: {
                std::vector<double> rho = circular_autocorrelation(x);
                rho.resize(std::clamp<std::size_t>(cfg.rho_window, 1, spec.n));
                s.rho = std::move(rho);
                break;
            }
        }
    });

    with_stage("quantizer", [&] {
        if (cfg.t_star) {
            s.t_star = *cfg.t_star;
        } else if (s.quantizer.kind == QuantizerKind::uniform) {
            if (!(s.quantizer.delta_sat > 0.0) || !(s.quantizer.delta_sat < 1.0))
                throw DomainError("delta_sat must lie in (0, 1)");
            s.t_star = mode_t_star(spec, x, s.quantizer.delta_sat);
        }
    });

    Scheme sc = with_stage("scheme", [&] { return build_scheme(s); });
    s.quantizer_hash = sc.hash;

    res.tv_count = sc.tv_measure.size();
    res.tv_sigma = sc.tv_sigma;
    res.yhat.assign(spec.m, 0.0);
    res.saturated.assign(spec.m, false);
    if (sc.z1)
        for (std::size_t k = 0; k < spec.m; ++k)
            if (res.selection[k] == 1) res.yhat[k] = *sc.z1;

    ArithmeticEncoder ac;
    BitWriter flc;
    with_stage("coding", [&] {
        for (std::size_t gi = 0; gi < sc.groups.size(); ++gi) {
            const PredictionGroup& g = sc.groups[gi];
            std::vector<double> vals;
            std::vector<const QuantizerSpec*> qs;
            for (std::size_t q = 0; q < g.members.size(); ++q) {
                vals.push_back(res.y[sc.tv_measure[g.members[q]]]);
                qs.push_back(&sc.quant[gi][q]->spec);
            }
            const GroupCode gc = encode_group(g, vals, qs);
            for (std::size_t q = 0; q < g.members.size(); ++q) {
                const QuantEntry& e = *sc.quant[gi][q];
                const std::size_t k = sc.tv_measure[g.members[q]];
                res.yhat[k] = gc.zhat[q];
                res.saturated[k] = gc.saturated[q];
                res.model_entropy_bits += e.entropy;
                res.ideal_bits += e.table.cost_bits(gc.codes[q]);
                if (s.coder == CoderKind::vlc)
                    ac.encode(e.table, gc.codes[q]);
                else
                    flc.put_bits(gc.codes[q], flc_width(e.spec.codebook_size()));
            }
        }
    });

    res.stream.side = s;
    res.stream.payload = s.coder == CoderKind::vlc ? ac.finish() : flc.take();
    res.bytes = serialize(res.stream);
    res.payload_bits = res.stream.payload.bits;
    res.header_bits = 8 * static_cast<std::uint64_t>(res.bytes.size() - res.stream.payload.bytes.size());
    res.total_bits = res.header_bits + res.payload_bits;
    return res;
}

DecodeResult decode(std::span<const std::uint8_t> bytes) { return decode(parse_bitstream(bytes)); }

DecodeResult decode(const Bitstream& b) {
    const SideInfo& s = b.side;
    Scheme sc = build_scheme(s);
    if (sc.hash != s.quantizer_hash)
        throw FormatError("quantizer reconstruction mismatch: derived hash differs from the stream header");

    DecodeResult out;
    out.side = s;
    out.selection = sc.selection;
    out.tv_count = sc.tv_measure.size();
    out.yhat.assign(s.m, 0.0);
    out.saturated.assign(s.m, false);
    if (sc.z1)
        for (std::size_t k = 0; k < s.m; ++k)
            if (sc.selection[k] == 1) out.yhat[k] = *sc.z1;

    std::optional<ArithmeticDecoder> ad;
    std::optional<BitReader> fr;
    if (s.coder == CoderKind::vlc)
        ad.emplace(b.payload);
    else
        fr.emplace(b.payload);

    for (std::size_t gi = 0; gi < sc.groups.size(); ++gi) {
        const PredictionGroup& g = sc.groups[gi];
        std::vector<std::size_t> codes;
        std::vector<const QuantizerSpec*> qs;
        for (std::size_t q = 0; q < g.members.size(); ++q) {
            const QuantEntry& e = *sc.quant[gi][q];
            std::size_t c;
            if (ad) {
                c = ad->decode(e.table);
            } else {
                c = fr->get_bits(flc_width(e.spec.codebook_size()));
                if (c >= e.spec.codebook_size()) throw FormatError("fixed-length codeword outside codebook");
            }
            codes.push_back(c);
            qs.push_back(&e.spec);
        }
        const std::vector<double> zhat = decode_group(g, codes, qs);
        for (std::size_t q = 0; q < g.members.size(); ++q) {
            const std::size_t k = sc.tv_measure[g.members[q]];
            out.yhat[k] = zhat[q];
            out.saturated[k] = qs[q]->saturated(codes[q]);
        }
    }
    if (fr && fr->position() != b.payload.bits) throw FormatError("unused bits at the end of the payload");
    return out;
}

}  // namespace srmc
