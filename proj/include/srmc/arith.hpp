#pragma once

// Bit packing, fixed-length codes and a 64-bit integer arithmetic coder.
//
// Coder state: low and range are 64-bit; bytes leave from the top of low
// while range < 2^56, and a carry out of low is pushed back through the
// bytes already written. Frequencies total 2^32 with every entry >= 1. The
// stream ends with the shortest bit string inside the final interval and
// trailing zero bits are dropped, since the decoder reads zeros past the end.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace srmc {

/// Bits packed MSB-first; bits beyond `bits` in the last byte are zero.
struct BitBuffer {
    std::vector<std::uint8_t> bytes;
    std::uint64_t bits = 0;

    bool operator==(const BitBuffer&) const = default;
};

class BitWriter {
public:
    void put(bool bit);
    /// Low `width` bits of v, most significant first (width <= 64).
    void put_bits(std::uint64_t v, unsigned width);
    const BitBuffer& buffer() const { return buf_; }
    BitBuffer take() { return std::move(buf_); }

private:
    BitBuffer buf_;
};

class BitReader {
public:
    explicit BitReader(const BitBuffer& b) : buf_(&b) {}
    /// Throws FormatError past the end.
    bool get();
    std::uint64_t get_bits(unsigned width);
    std::uint64_t position() const { return pos_; }

private:
    const BitBuffer* buf_;
    std::uint64_t pos_ = 0;
};

inline constexpr unsigned kFreqBits = 32;
inline constexpr std::uint64_t kFreqTotal = std::uint64_t{1} << kFreqBits;

class FrequencyTable {
public:
    /// f_i = 1 + floor(p_i (2^32 - S)); the largest p_i (first on ties)
    /// absorbs the remainder. p must be nonnegative with a positive sum.
    static FrequencyTable from_probs(std::span<const double> p);
    static FrequencyTable from_freqs(std::vector<std::uint64_t> f);

    std::size_t size() const { return freq_.size(); }
    std::uint64_t freq(std::size_t s) const { return freq_[s]; }
    std::uint64_t cum(std::size_t s) const { return cum_[s]; }
    /// Symbol s with cum(s) <= v < cum(s + 1).
    std::size_t lookup(std::uint64_t v) const;
    /// -log2(freq/2^32)
    double cost_bits(std::size_t s) const;

private:
    std::vector<std::uint64_t> freq_, cum_;
};

class ArithmeticEncoder {
public:
    void encode(const FrequencyTable& t, std::size_t s);
    BitBuffer finish();

private:
    void emit_byte(std::uint8_t b);
    void carry();
    std::vector<std::uint8_t> out_;
    std::uint64_t low_ = 0;
    std::uint64_t range_ = ~std::uint64_t{0};
};

class ArithmeticDecoder {
public:
    explicit ArithmeticDecoder(const BitBuffer& b);
    std::size_t decode(const FrequencyTable& t);

private:
    std::uint8_t next_byte();
    const BitBuffer* buf_;
    std::size_t pos_ = 0;
    std::uint64_t cml_ = 0;  // code - low
    std::uint64_t range_ = ~std::uint64_t{0};
};

/// models[k] is the probability vector of symbol k.
BitBuffer arithmetic_encode(std::span<const std::size_t> symbols, std::span<const std::vector<double>> models);
std::vector<std::size_t> arithmetic_decode(const BitBuffer& bits, std::span<const std::vector<double>> models,
                                           std::size_t count);

/// ceil(log2 alphabet), 0 for a one-symbol alphabet.
unsigned flc_width(std::uint64_t alphabet);
BitBuffer flc_encode(std::span<const std::size_t> symbols, std::uint64_t alphabet);
std::vector<std::size_t> flc_decode(const BitBuffer& bits, std::uint64_t alphabet, std::size_t count);

}  // namespace srmc
