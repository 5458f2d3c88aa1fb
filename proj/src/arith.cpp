#include "srmc/arith.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "srmc/error.hpp"

namespace srmc {

void BitWriter::put(bool bit) {
    if (buf_.bits % 8 == 0) buf_.bytes.push_back(0);
    if (bit) buf_.bytes.back() |= static_cast<std::uint8_t>(0x80u >> (buf_.bits % 8));
    ++buf_.bits;
}

void BitWriter::put_bits(std::uint64_t v, unsigned width) {
    for (unsigned i = width; i-- > 0;) put((v >> i) & 1u);
}

bool BitReader::get() {
    if (pos_ >= buf_->bits) throw FormatError("bit stream truncated");
    const bool b = (buf_->bytes[pos_ / 8] >> (7 - pos_ % 8)) & 1u;
    ++pos_;
    return b;
}

std::uint64_t BitReader::get_bits(unsigned width) {
    std::uint64_t v = 0;
    for (unsigned i = 0; i < width; ++i) v = (v << 1) | static_cast<std::uint64_t>(get());
    return v;
}

FrequencyTable FrequencyTable::from_probs(std::span<const double> p) {
    if (p.empty()) throw DomainError("empty probability vector");
    if (p.size() >= kFreqTotal) throw DomainError("alphabet too large for the coder");
    double total = 0.0;
    for (double v : p) {
        if (!(v >= 0.0) || !std::isfinite(v)) throw DomainError("invalid probability in model");
        total += v;
    }
    if (!(total > 0.0)) throw DomainError("probability vector sums to zero");
    const double spare = static_cast<double>(kFreqTotal - p.size());
    std::vector<std::uint64_t> f(p.size());
    std::uint64_t sum = 0;
    std::size_t big = 0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double share = std::min(1.0, p[i] / total);
        f[i] = 1 + static_cast<std::uint64_t>(std::floor(share * spare));
        sum += f[i];
        if (p[i] > p[big]) big = i;
    }
    if (sum > kFreqTotal) {
        // floor(share * spare) can only overshoot through rounding of the shares
        const std::uint64_t over = sum - kFreqTotal;
        if (f[big] <= over) throw NumericalError("frequency table overflow");
        f[big] -= over;
    } else {
        f[big] += kFreqTotal - sum;
    }
    return from_freqs(std::move(f));
}

FrequencyTable FrequencyTable::from_freqs(std::vector<std::uint64_t> f) {
    FrequencyTable t;
    t.cum_.assign(f.size() + 1, 0);
    for (std::size_t i = 0; i < f.size(); ++i) {
        if (f[i] == 0) throw DomainError("zero frequency");
        t.cum_[i + 1] = t.cum_[i] + f[i];
    }
    if (t.cum_.back() != kFreqTotal) throw DomainError("frequencies must total 2^32");
    t.freq_ = std::move(f);
    return t;
}

std::size_t FrequencyTable::lookup(std::uint64_t v) const {
    const auto it = std::upper_bound(cum_.begin(), cum_.end(), v);
    return static_cast<std::size_t>(it - cum_.begin()) - 1;
}

double FrequencyTable::cost_bits(std::size_t s) const {
    return static_cast<double>(kFreqBits) - std::log2(static_cast<double>(freq_[s]));
}

namespace {
constexpr std::uint64_t kTop = std::uint64_t{1} << 56;
}

void ArithmeticEncoder::carry() {
    for (std::size_t i = out_.size(); i-- > 0;) {
        if (++out_[i] != 0) return;
    }
    throw NumericalError("arithmetic coder carry past the first byte");
}

void ArithmeticEncoder::emit_byte(std::uint8_t b) { out_.push_back(b); }

void ArithmeticEncoder::encode(const FrequencyTable& t, std::size_t s) {
    if (s >= t.size()) throw IndexError("symbol " + std::to_string(s) + " outside model of size " + std::to_string(t.size()));
    const std::uint64_t r = range_ >> kFreqBits;
    const std::uint64_t start = r * t.cum(s);
    const std::uint64_t old = low_;
    low_ += start;
    if (low_ < old) carry();
    range_ = (s + 1 == t.size()) ? range_ - start : r * t.freq(s);
    while (range_ < kTop) {
        emit_byte(static_cast<std::uint8_t>(low_ >> 56));
        low_ <<= 8;
        range_ <<= 8;
    }
}

BitBuffer ArithmeticEncoder::finish() {
    // Shortest V = ceil(low / 2^s) 2^s with V < low + range, in 65-bit arithmetic.
    __extension__ typedef unsigned __int128 u128;
    const u128 lo = low_;
    const u128 hi = lo + range_;  // exclusive
    unsigned keep = 0;
    u128 v = 0;
    for (unsigned s = 64;; --s) {
        const u128 unit = u128{1} << s;
        const u128 cand = (lo + unit - 1) / unit * unit;
        if (cand < hi) {
            v = cand;
            keep = 64 - s;
            break;
        }
        if (s == 0) throw NumericalError("arithmetic coder interval is empty");
    }
    if (v >> 64) carry();
    const auto vl = static_cast<std::uint64_t>(v);

    BitWriter w;
    for (std::uint8_t b : out_) w.put_bits(b, 8);
    w.put_bits(keep == 0 ? 0 : vl >> (64 - keep), keep);
    BitBuffer buf = w.take();
    while (buf.bits > 0) {
        const std::uint64_t i = buf.bits - 1;
        if ((buf.bytes[i / 8] >> (7 - i % 8)) & 1u) break;
        --buf.bits;
    }
    buf.bytes.resize((buf.bits + 7) / 8);
    out_.clear();
    low_ = 0;
    range_ = ~std::uint64_t{0};
    return buf;
}

ArithmeticDecoder::ArithmeticDecoder(const BitBuffer& b) : buf_(&b) {
    if (b.bytes.size() * 8 < b.bits) throw FormatError("bit buffer shorter than its declared length");
    for (int i = 0; i < 8; ++i) cml_ = (cml_ << 8) | next_byte();
}

std::uint8_t ArithmeticDecoder::next_byte() {
    const std::size_t i = pos_++;
    return i < buf_->bytes.size() ? buf_->bytes[i] : 0;
}

std::size_t ArithmeticDecoder::decode(const FrequencyTable& t) {
    const std::uint64_t r = range_ >> kFreqBits;
    const std::uint64_t v = std::min(cml_ / r, kFreqTotal - 1);
    const std::size_t s = t.lookup(v);
    const std::uint64_t start = r * t.cum(s);
    cml_ -= start;
    range_ = (s + 1 == t.size()) ? range_ - start : r * t.freq(s);
    while (range_ < kTop) {
        cml_ = (cml_ << 8) | next_byte();
        range_ <<= 8;
    }
    return s;
}

BitBuffer arithmetic_encode(std::span<const std::size_t> symbols, std::span<const std::vector<double>> models) {
    if (symbols.size() != models.size()) throw DimensionError("one model per symbol required");
    ArithmeticEncoder enc;
    for (std::size_t k = 0; k < symbols.size(); ++k) {
        const FrequencyTable t = FrequencyTable::from_probs(models[k]);
        enc.encode(t, symbols[k]);
    }
    return enc.finish();
}

std::vector<std::size_t> arithmetic_decode(const BitBuffer& bits, std::span<const std::vector<double>> models,
                                           std::size_t count) {
    if (models.size() < count) throw DimensionError("fewer models than symbols to decode");
    ArithmeticDecoder dec(bits);
    std::vector<std::size_t> out(count);
    for (std::size_t k = 0; k < count; ++k) out[k] = dec.decode(FrequencyTable::from_probs(models[k]));
    return out;
}

unsigned flc_width(std::uint64_t alphabet) {
    if (alphabet == 0) throw DomainError("alphabet must be nonempty");
    unsigned w = 0;
    while (w < 64 && (std::uint64_t{1} << w) < alphabet) ++w;
    return w;
}

BitBuffer flc_encode(std::span<const std::size_t> symbols, std::uint64_t alphabet) {
    const unsigned w = flc_width(alphabet);
    BitWriter out;
    for (std::size_t s : symbols) {
        if (s >= alphabet) throw IndexError("symbol " + std::to_string(s) + " outside alphabet of size " + std::to_string(alphabet));
        out.put_bits(s, w);
    }
    return out.take();
}

std::vector<std::size_t> flc_decode(const BitBuffer& bits, std::uint64_t alphabet, std::size_t count) {
    const unsigned w = flc_width(alphabet);
    BitReader in(bits);
    std::vector<std::size_t> out(count);
    for (auto& s : out) {
        s = in.get_bits(w);
        if (s >= alphabet) throw FormatError("fixed-length codeword outside alphabet");
    }
    return out;
}

}  // namespace srmc
