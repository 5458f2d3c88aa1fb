#include "srmc/io.hpp"

#include <bit>
#include <charconv>
#include <fstream>
#include <sstream>

#include "srmc/error.hpp"

namespace srmc::io {

namespace fs = std::filesystem;
using nlohmann::json;

std::vector<std::uint8_t> read_bytes(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw Error("cannot open '" + p.string() + "' for reading");
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_bytes(const fs::path& p, std::span<const std::uint8_t> b) {
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open '" + p.string() + "' for writing");
    out.write(reinterpret_cast<const char*>(b.data()), static_cast<std::streamsize>(b.size()));
    if (!out) throw Error("write to '" + p.string() + "' failed");
}

std::vector<double> read_f64(const fs::path& p) {
    const std::vector<std::uint8_t> b = read_bytes(p);
    if (b.size() % 8 != 0) throw FormatError("'" + p.string() + "' size is not a multiple of 8 bytes");
    std::vector<double> v(b.size() / 8);
    for (std::size_t i = 0; i < v.size(); ++i) {
        std::uint64_t u = 0;
        for (int k = 0; k < 8; ++k) u |= static_cast<std::uint64_t>(b[8 * i + k]) << (8 * k);
        v[i] = std::bit_cast<double>(u);
    }
    return v;
}

void write_f64(const fs::path& p, std::span<const double> v) {
    std::vector<std::uint8_t> b(v.size() * 8);
    for (std::size_t i = 0; i < v.size(); ++i) {
        const auto u = std::bit_cast<std::uint64_t>(v[i]);
        for (int k = 0; k < 8; ++k) b[8 * i + k] = static_cast<std::uint8_t>(u >> (8 * k));
    }
    write_bytes(p, b);
}

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r,");
    return s.substr(a, b - a + 1);
}

bool parse_double(const std::string& s, double& out) {
    const char* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(s.data(), end, out);
    return ec == std::errc() && ptr == end;
}

}  // namespace

std::vector<double> read_csv_column(const fs::path& p) {
    std::ifstream in(p);
    if (!in) throw Error("cannot open '" + p.string() + "' for reading");
    std::vector<double> v;
    std::string line;
    std::size_t lineno = 0;
    bool first = true;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        double d;
        if (!parse_double(t, d)) {
            if (first) {
                first = false;
                continue;
            }
            throw FormatError(p.string() + ":" + std::to_string(lineno) + ": not a number: '" + t + "'");
        }
        first = false;
        v.push_back(d);
    }
    return v;
}

void write_csv_column(const fs::path& p, std::span<const double> v) {
    std::ofstream out(p, std::ios::trunc);
    if (!out) throw Error("cannot open '" + p.string() + "' for writing");
    out.precision(17);
    for (double d : v) out << d << '\n';
}

Signal read_signal(const fs::path& p) {
    return Signal(p.extension() == ".csv" ? read_csv_column(p) : read_f64(p));
}

void write_signal(const fs::path& p, std::span<const double> v) {
    if (p.extension() == ".csv")
        write_csv_column(p, v);
    else
        write_f64(p, v);
}

json read_json(const fs::path& p) {
    std::ifstream in(p);
    if (!in) throw Error("cannot open '" + p.string() + "' for reading");
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw FormatError("'" + p.string() + "': " + e.what());
    }
}

void write_json(const fs::path& p, const json& j) {
    std::ofstream out(p, std::ios::trunc);
    if (!out) throw Error("cannot open '" + p.string() + "' for writing");
    out << j.dump(2) << '\n';
}

namespace {

void check_keys(const json& j, std::initializer_list<const char*> allowed, const char* what) {
    if (!j.is_object()) throw FormatError(std::string(what) + " must be a JSON object");
    for (const auto& [k, _] : j.items()) {
        bool ok = false;
        for (const char* a : allowed) ok = ok || k == a;
        if (!ok) throw FormatError(std::string("unknown key '") + k + "' in " + what);
    }
}

template <typename T>
T field(const json& j, const char* key, const char* what) {
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw FormatError(std::string(what) + ": field '" + key + "': " + e.what());
    }
}

}  // namespace

SensingSpec spec_from_json(const json& j) {
    check_keys(j, {"mode", "transform", "n", "m", "selection", "seed"}, "sensing spec");
    SensingSpec s;
    s.mode = parse_mode(field<std::string>(j, "mode", "sensing spec"));
    s.n = field<std::size_t>(j, "n", "sensing spec");
    s.m = field<std::size_t>(j, "m", "sensing spec");
    if (j.contains("selection")) s.selection = parse_selection(field<std::string>(j, "selection", "sensing spec"));
    if (j.contains("seed")) s.seed = field<std::uint64_t>(j, "seed", "sensing spec");
    if (j.contains("transform") && !j.at("transform").is_null()) {
        const std::string t = field<std::string>(j, "transform", "sensing spec");
        if (s.mode != Mode::rc) s.transform = TransformOp::parse(t, s.n);
    } else if (s.mode != Mode::rc) {
        throw FormatError("sensing spec: mode " + to_string(s.mode) + " needs a transform");
    }
    s.validate();
    return s;
}

json to_json(const SensingSpec& s) {
    json j{{"mode", to_string(s.mode)}, {"n", s.n}, {"m", s.m}, {"selection", to_string(s.selection)}, {"seed", s.seed}};
    j["transform"] = s.transform ? json(s.transform->name()) : json(nullptr);
    return j;
}

CodingConfig config_from_json(const json& j) {
    check_keys(j, {"quantizer", "coder", "prediction", "model", "topk", "rho_window", "t_star"}, "coding config");
    CodingConfig c;
    if (j.contains("quantizer")) {
        const json& q = j.at("quantizer");
        check_keys(q, {"kind", "levels", "step", "delta_sat", "tol"}, "quantizer config");
        if (q.contains("kind")) c.quantizer.kind = parse_quantizer_kind(field<std::string>(q, "kind", "quantizer"));
        if (q.contains("step")) {
            c.quantizer.step = field<double>(q, "step", "quantizer");
            c.quantizer.levels = 0;
        }
        if (q.contains("levels")) c.quantizer.levels = field<std::uint32_t>(q, "levels", "quantizer");
        if (q.contains("delta_sat")) c.quantizer.delta_sat = field<double>(q, "delta_sat", "quantizer");
        if (q.contains("tol")) c.quantizer.tol = field<double>(q, "tol", "quantizer");
    }
    if (j.contains("coder")) c.coder = parse_coder_kind(field<std::string>(j, "coder", "coding config"));
    if (j.contains("prediction")) c.prediction = field<std::uint32_t>(j, "prediction", "coding config");
    if (j.contains("model") && !j.at("model").is_null()) {
        const std::string m = field<std::string>(j, "model", "coding config");
        if (m != "auto") c.model = parse_model_kind(m);
    }
    if (j.contains("topk")) c.topk = field<std::uint32_t>(j, "topk", "coding config");
    if (j.contains("rho_window")) c.rho_window = field<std::uint32_t>(j, "rho_window", "coding config");
    if (j.contains("t_star") && !j.at("t_star").is_null()) c.t_star = field<double>(j, "t_star", "coding config");
    return c;
}

json to_json(const CodingConfig& c) {
    json q{{"kind", to_string(c.quantizer.kind)}, {"delta_sat", c.quantizer.delta_sat}, {"tol", c.quantizer.tol}};
    if (c.quantizer.levels > 0)
        q["levels"] = c.quantizer.levels;
    else
        q["step"] = c.quantizer.step;
    json j{{"quantizer", q},
           {"coder", to_string(c.coder)},
           {"prediction", c.prediction},
           {"topk", c.topk},
           {"rho_window", c.rho_window}};
    j["model"] = c.model ? json(to_string(*c.model)) : json("auto");
    if (c.t_star) j["t_star"] = *c.t_star;
    return j;
}

json to_json(const SideInfo& s) {
    json j{{"mode", to_string(s.mode)},
           {"transform", s.transform.empty() ? json(nullptr) : json(s.transform)},
           {"n", s.n},
           {"m", s.m},
           {"selection", to_string(s.selection)},
           {"seed", s.seed},
           {"model", to_string(s.model)},
           {"t_star", s.t_star},
           {"coder", to_string(s.coder)},
           {"prediction", s.prediction}};
    switch (s.model) {
        case ModelKind::sigma_y:
            j["mu_y"] = s.mu_y;
            j["sigma_y"] = s.sigma_y;
            break;
        case ModelKind::gr:
            j["mean"] = s.mean;
            j["norm"] = s.norm;
            break;
        case ModelKind::topk:
            j["topk_indices"] = s.topk.indices;
            j["topk_values"] = s.topk.values;
            break;
        case ModelKind::rho: j["rho"] = s.rho; break;
    }
    json q{{"kind", to_string(s.quantizer.kind)}, {"delta_sat", s.quantizer.delta_sat}, {"tol", s.quantizer.tol}};
    if (s.quantizer.levels > 0)
        q["levels"] = s.quantizer.levels;
    else
        q["step"] = s.quantizer.step;
    j["quantizer"] = q;
    char hex[17];
    std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(s.quantizer_hash));
    j["quantizer_hash"] = hex;
    return j;
}

}  // namespace srmc::io
