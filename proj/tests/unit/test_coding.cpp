#include <doctest.h>

#include <bit>
#include <cmath>

#include "oracles.hpp"
#include "srmc/coding.hpp"
#include "srmc/error.hpp"
#include "srmc/harness.hpp"

using namespace srmc;

namespace {

SensingSpec make_spec(Mode mode, const std::string& tr, std::size_t n, std::size_t m, std::uint64_t seed = 7) {
    SensingSpec s;
    s.mode = mode;
    if (mode != Mode::rc) s.transform = TransformOp::parse(tr, n);
    s.n = n;
    s.m = m;
    s.seed = seed;
    return s;
}

void check_round_trip(const EncodeResult& e) {
    const DecodeResult d = decode(e.bytes);
    REQUIRE(d.yhat.size() == e.yhat.size());
    for (std::size_t k = 0; k < e.yhat.size(); ++k)
        CHECK(std::bit_cast<std::uint64_t>(d.yhat[k]) == std::bit_cast<std::uint64_t>(e.yhat[k]));
    CHECK(d.saturated == e.saturated);
    CHECK(d.selection == e.selection);
    CHECK(d.side == e.stream.side);
}

}  // namespace

TEST_CASE("side information round trip") {
    SideInfo s;
    s.mode = Mode::lr;
    s.transform = "kron(dct:4,wht:8)";
    s.n = 32;
    s.m = 9;
    s.seed = 0xDEADBEEFCAFEull;
    s.model = ModelKind::topk;
    s.topk = {32, {1, 5, 17}, {0.25, -1e-300, std::nextafter(1.0, 2.0)}};
    s.quantizer = {QuantizerKind::lloyd_max, 12, 0.0, 0.02, 1e-10};
    s.t_star = 3.25;
    s.coder = CoderKind::flc;
    s.prediction = 4;
    s.quantizer_hash = 0x0123456789abcdefull;
    const auto bytes = serialize(s);
    CHECK(parse_side_info(bytes) == s);
    SideInfo r = s;
    r.model = ModelKind::rho;
    r.mode = Mode::rc;
    r.transform.clear();
    r.topk = {};
    r.rho = {3.0, -0.0, 1e-17};
    CHECK(parse_side_info(serialize(r)) == r);
    r.rho[1] = 0.0;
    CHECK(!(parse_side_info(serialize(r)) == s));
    auto cut = bytes;
    cut.pop_back();
    CHECK_THROWS_AS(parse_side_info(cut), FormatError);
}

TEST_CASE("container errors") {
    const Signal x(oracle::gaussian(64, 1));
    const EncodeResult e = encode(x, make_spec(Mode::lr, "wht", 64, 16), {});
    CHECK(std::string(e.bytes.begin(), e.bytes.begin() + 4) == "SRMC");
    auto bad = e.bytes;
    bad[0] = 'X';
    CHECK_THROWS_AS(decode(bad), FormatError);
    bad = e.bytes;
    bad[4] = 2;
    CHECK_THROWS_AS(decode(bad), FormatError);
    bad = e.bytes;
    bad.pop_back();
    CHECK_THROWS_AS(decode(bad), FormatError);
    bad = e.bytes;
    bad.push_back(0);
    CHECK_THROWS_AS(decode(bad), FormatError);
    // side info altered so the derived quantizers differ from the hashed ones
    Bitstream b = e.stream;
    b.side.t_star *= 1.01;
    CHECK_THROWS_AS(decode(b), FormatError);
    CHECK_THROWS_AS(decode(std::vector<std::uint8_t>{}), FormatError);
}

TEST_CASE("round trips across modes and configurations") {
    const std::size_t n = 256;
    const Signal x = synth_signal("ar1", n, {.rho = 0.9, .seed = 2});
    struct Case {
        Mode mode;
        std::string tr;
        CodingConfig cfg;
    };
    std::vector<Case> cases;
    cases.push_back({Mode::lr, "wht", {}});
    cases.push_back({Mode::lr, "dct", {}});
    cases.push_back({Mode::lr, "dft", {}});
    cases.push_back({Mode::gr, "wht", {}});
    cases.push_back({Mode::gr, "dct", {}});
    cases.push_back({Mode::rc, "", {}});
    cases.push_back({Mode::rst, "dct", {}});
    CodingConfig pred;
    pred.prediction = 4;
    cases.push_back({Mode::rc, "", pred});
    cases.push_back({Mode::lr, "dct", pred});
    cases.push_back({Mode::gr, "wht", pred});
    CodingConfig lm;
    lm.quantizer.kind = QuantizerKind::lloyd_max;
    lm.quantizer.levels = 16;
    cases.push_back({Mode::lr, "wht", lm});
    cases.push_back({Mode::rc, "", lm});
    CodingConfig flc;
    flc.coder = CoderKind::flc;
    flc.quantizer.levels = 30;
    cases.push_back({Mode::lr, "dft", flc});
    CodingConfig step;
    step.quantizer.levels = 0;
    step.quantizer.step = 0.05;
    cases.push_back({Mode::rc, "", step});
    CodingConfig fixed;
    fixed.t_star = 2.0;
    fixed.quantizer.levels = 8;
    cases.push_back({Mode::gr, "dct", fixed});
    for (const auto& c : cases) {
        CAPTURE(to_string(c.mode));
        CAPTURE(c.tr);
        const EncodeResult e = encode(x, make_spec(c.mode, c.tr, n, 64), c.cfg);
        check_round_trip(e);
        CHECK(e.total_bits == e.header_bits + e.payload_bits);
        CHECK(e.total_bits == 8 * e.bytes.size() - (8 * e.bytes.size() - e.total_bits));
        CHECK(e.bytes.size() * 8 >= e.total_bits);
        CHECK(e.bytes.size() * 8 < e.total_bits + 8);
    }
}

TEST_CASE("unsaturated error within half a step") {
    const std::size_t n = 512;
    const Signal x(oracle::gaussian(n, 3));
    const EncodeResult e = encode(x, make_spec(Mode::lr, "wht", n, 128), {});
    const SideInfo& s = e.stream.side;
    CHECK(s.model == ModelKind::sigma_y);
    CHECK(s.sigma_y == doctest::Approx(std::sqrt(x.norm2() / 128)));
    const double step = 2 * s.t_star * s.sigma_y / 256;
    for (std::size_t k = 0; k < e.y.size(); ++k)
        if (!e.saturated[k]) CHECK(std::abs(e.y[k] - e.yhat[k]) <= step / 2 * (1 + 1e-12));
    CHECK(e.tv_count == 128);
}

TEST_CASE("GR stream reconstructs component one from the mean") {
    const std::size_t n = 64, m = 64;
    std::vector<double> v = oracle::gaussian(n, 5);
    for (auto& e : v) e += 2.5;
    const Signal x(v);
    const EncodeResult e = encode(x, make_spec(Mode::gr, "wht", n, m, 3), {});
    const DecodeResult d = decode(e.bytes);
    CHECK(e.tv_count == m - 1);
    const double z1 = double(n) * x.mean() / std::sqrt(double(m));
    bool seen = false;
    for (std::size_t k = 0; k < m; ++k)
        if (d.selection[k] == 1) {
            seen = true;
            CHECK(d.yhat[k] == z1);
            CHECK(e.y[k] == doctest::Approx(z1).epsilon(1e-12));
        }
    CHECK(seen);
    const SideInfo& s = e.stream.side;
    CHECK(s.model == ModelKind::gr);
    CHECK(s.mean == x.mean());
    CHECK(s.norm == x.norm());
    // one shared quantizer for N(0, (|x|^2 - n xbar^2) n / (m (n-1)))
    const double sigma = std::sqrt((x.norm2() - n * x.mean() * x.mean()) * n / (m * (n - 1.0)));
    for (double t : e.tv_sigma) CHECK(t == doctest::Approx(sigma).epsilon(1e-12));
}

TEST_CASE("rate accounting against model entropies") {
    const std::size_t n = 1 << 16;
    const Signal x = synth_signal("smooth", n, {.seed = 9});
    CodingConfig cfg;
    cfg.quantizer.levels = 64;
    const EncodeResult e = encode(x, make_spec(Mode::lr, "wht", n, 50000), cfg);
    CHECK(e.tv_count == 50000);
    // the arithmetic coder tracks the ideal code length closely
    CHECK(std::abs(double(e.payload_bits) - e.ideal_bits) / e.tv_count < 0.001);
    // and the realised code length tracks the model entropy
    CHECK(std::abs(double(e.payload_bits) - e.model_entropy_bits) / e.tv_count < 0.05);
}

TEST_CASE("adaptive LR-DCT model does not exceed the single-model rate") {
    const std::size_t n = 1024, m = 512;
    const Signal x = synth_signal("pulse_train", n, {.d = 8});
    CodingConfig adaptive;
    adaptive.quantizer.levels = 0;
    adaptive.quantizer.step = 0.05;
    adaptive.t_star = 4.0;
    adaptive.topk = n;
    CodingConfig single = adaptive;
    single.model = ModelKind::sigma_y;
    const auto spec = make_spec(Mode::lr, "dct", n, m);
    const EncodeResult a = encode(x, spec, adaptive);
    const EncodeResult s = encode(x, spec, single);
    check_round_trip(a);
    check_round_trip(s);
    CHECK(a.stream.side.model == ModelKind::topk);
    CHECK(a.model_entropy_bits < s.model_entropy_bits);
}

TEST_CASE("RC prediction lowers the rate on a correlated signal") {
    const std::size_t n = 4096, m = 2048;
    const Signal x = synth_signal("ar1", n, {.rho = 0.95, .seed = 6});
    CodingConfig direct;
    direct.quantizer.levels = 0;
    direct.quantizer.step = 0.1;
    direct.t_star = 4.0;
    CodingConfig pred = direct;
    pred.prediction = 2;
    const auto spec = make_spec(Mode::rc, "", n, m);
    const EncodeResult a = encode(x, spec, direct);
    const EncodeResult b = encode(x, spec, pred);
    check_round_trip(b);
    CHECK(b.stream.side.model == ModelKind::rho);
    CHECK(b.payload_bits < a.payload_bits);
    CHECK(b.model_entropy_bits < a.model_entropy_bits);
}

TEST_CASE("configuration errors carry the stage") {
    const Signal x(oracle::gaussian(64, 1));
    CodingConfig cfg;
    cfg.model = ModelKind::gr;
    try {
        encode(x, make_spec(Mode::lr, "wht", 64, 8), cfg);
        FAIL("expected an error");
    } catch (const DomainError& e) {
        CHECK(std::string(e.what()).find("encode: model") == 0);
    }
    CodingConfig p;
    p.prediction = 2;
    p.model = ModelKind::sigma_y;
    CHECK_THROWS_AS(encode(x, make_spec(Mode::rc, "", 64, 8), p), DomainError);
    CHECK_THROWS_AS(encode(Signal(oracle::gaussian(32, 1)), make_spec(Mode::lr, "wht", 64, 8), {}), DimensionError);
    CHECK(equal_magnitude_rows(TransformOp::wht(16)));
    CHECK(equal_magnitude_rows(TransformOp::parse("kron(wht:4,wht:8)", 32)));
    CHECK(!equal_magnitude_rows(TransformOp::dct(16)));
}

TEST_CASE("constant signal codes without error") {
    const Signal x(std::vector<double>(64, 1.5));
    for (Mode mode : {Mode::lr, Mode::gr, Mode::rc, Mode::rst}) {
        const EncodeResult e = encode(x, make_spec(mode, "dct", 64, 16), {});
        check_round_trip(e);
    }
}
