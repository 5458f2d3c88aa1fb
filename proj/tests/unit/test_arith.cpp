#include <doctest.h>

#include <cmath>

#include "srmc/arith.hpp"
#include "srmc/error.hpp"
#include "srmc/quantization.hpp"
#include "srmc/rng.hpp"

using namespace srmc;

TEST_CASE("bit packing") {
    BitWriter w;
    w.put(true);
    w.put_bits(0b0110, 4);
    w.put_bits(0xABCDEF, 24);
    const BitBuffer b = w.take();
    CHECK(b.bits == 29);
    CHECK(b.bytes.size() == 4);
    CHECK(b.bytes[0] == 0xB5);
    CHECK((b.bytes[3] & 0x7) == 0);
    BitReader r(b);
    CHECK(r.get());
    CHECK(r.get_bits(4) == 0b0110);
    CHECK(r.get_bits(24) == 0xABCDEF);
    CHECK_THROWS_AS(r.get(), FormatError);
}

TEST_CASE("frequency table") {
    const auto t = FrequencyTable::from_probs(std::vector<double>{0.5, 0.0, 0.25, 0.25});
    std::uint64_t s = 0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        CHECK(t.freq(i) >= 1);
        s += t.freq(i);
    }
    CHECK(s == kFreqTotal);
    CHECK(t.freq(1) == 1);
    CHECK(t.lookup(0) == 0);
    CHECK(t.lookup(t.cum(2)) == 2);
    CHECK(t.lookup(kFreqTotal - 1) == 3);
    CHECK(t.cost_bits(0) == doctest::Approx(1.0).epsilon(1e-8));
    CHECK_THROWS_AS(FrequencyTable::from_probs(std::vector<double>{0.0, 0.0}), DomainError);
    CHECK_THROWS_AS(FrequencyTable::from_probs(std::vector<double>{-0.1, 1.1}), DomainError);
}

TEST_CASE("arithmetic coder reaches the entropy") {
    const std::vector<double> p{0.4, 0.2, 0.1, 0.1, 0.08, 0.06, 0.04, 0.02};
    double h = 0;
    for (double v : p) h -= v * std::log2(v);
    const std::size_t N = 100000;
    CounterRng rng(3, 1);
    std::vector<std::size_t> sym(N);
    for (auto& s : sym) {
        double u = rng.uniform(), c = 0;
        s = p.size() - 1;
        for (std::size_t i = 0; i < p.size(); ++i)
            if (u < (c += p[i])) {
                s = i;
                break;
            }
    }
    // empirical entropy of this particular draw
    std::vector<double> cnt(p.size(), 0.0);
    for (auto s : sym) cnt[s] += 1;
    double ideal = 0;
    for (std::size_t i = 0; i < p.size(); ++i) ideal -= cnt[i] * std::log2(p[i]);
    const std::vector<std::vector<double>> models(N, p);
    const BitBuffer b = arithmetic_encode(sym, models);
    CHECK(double(b.bits) / N <= h + 0.02);
    CHECK(std::abs(double(b.bits) - ideal) / N < 0.001);
    CHECK(arithmetic_decode(b, models, N) == sym);
}

TEST_CASE("single-symbol alphabet costs at most two bits") {
    const std::vector<std::vector<double>> models(1000, std::vector<double>{1.0});
    const std::vector<std::size_t> sym(1000, 0);
    const BitBuffer b = arithmetic_encode(sym, models);
    CHECK(b.bits <= 2);
    CHECK(arithmetic_decode(b, models, 1000) == sym);
    CHECK(arithmetic_encode(std::vector<std::size_t>{}, std::vector<std::vector<double>>{}).bits == 0);
}

TEST_CASE("round trip with varying models") {
    CounterRng rng(11, 2);
    for (int rep = 0; rep < 30; ++rep) {
        const std::size_t N = 1 + rng.below(3000);
        std::vector<std::vector<double>> models(N);
        std::vector<std::size_t> sym(N);
        for (std::size_t k = 0; k < N; ++k) {
            const std::size_t a = 1 + rng.below(300);
            std::vector<double> p(a);
            double s = 0;
            for (auto& v : p) s += v = std::pow(rng.uniform(), 6.0);
            for (auto& v : p) v /= s;
            if (a > 1 && rng.below(5) == 0) p[rng.below(a)] = 0.0;  // zero-probability entries still get a floor
            models[k] = p;
            sym[k] = rng.below(a);
        }
        const BitBuffer b = arithmetic_encode(sym, models);
        CHECK(arithmetic_decode(b, models, N) == sym);
    }
}

TEST_CASE("extreme skew exercises the carry path") {
    std::vector<std::vector<double>> models;
    std::vector<std::size_t> sym;
    CounterRng rng(5, 3);
    for (int k = 0; k < 50000; ++k) {
        models.push_back({1 - 1e-9, 1e-9});
        sym.push_back(rng.below(2000) == 0 ? 1 : 0);
    }
    const BitBuffer b = arithmetic_encode(sym, models);
    CHECK(arithmetic_decode(b, models, sym.size()) == sym);
}

TEST_CASE("fixed-length codes") {
    CHECK(flc_width(1) == 0);
    CHECK(flc_width(2) == 1);
    CHECK(flc_width(5) == 3);
    CHECK(flc_width(8) == 3);
    CHECK(flc_width(258) == 9);
    const std::vector<std::size_t> s{0, 4, 2, 3, 1};
    const BitBuffer b = flc_encode(s, 5);
    CHECK(b.bits == 15);
    CHECK(flc_decode(b, 5, 5) == s);
    CHECK(flc_encode(s, 8).bits == 15);
    CHECK_THROWS_AS(flc_encode(s, 4), IndexError);
    CounterRng rng(1, 1);
    std::vector<std::size_t> r(1000);
    for (auto& v : r) v = rng.below(1000);
    CHECK(flc_decode(flc_encode(r, 1000), 1000, r.size()) == r);
}

TEST_CASE("Gaussian codeword models") {
    const QuantizerSpec q = design_uniform_t({0.0, 1.0}, 64, 3.0);
    const auto p = codeword_probs(q, {0.0, 1.0});
    CounterRng rng(8, 4);
    std::vector<std::size_t> sym(100000);
    for (auto& s : sym) s = quantize(q, rng.normal());
    const std::vector<std::vector<double>> models(sym.size(), p);
    const BitBuffer b = arithmetic_encode(sym, models);
    CHECK(double(b.bits) / sym.size() <= entropy(p) + 0.02);
    CHECK(arithmetic_decode(b, models, sym.size()) == sym);
}
