#pragma once

// Side information, the .srmc container and the encode/decode pipelines.
//
// Container (all integers little-endian, floats raw IEEE-754 binary64 LE):
//   "SRMC" | u16 version | u32 side_len | side_info[side_len]
//          | u64 payload_bits | payload[ceil(payload_bits / 8)]
// Payload bits are packed MSB-first. SideInfo v1 layout:
//   u8 mode | u16 len, transform name | u64 n | u64 m | u8 selection | u64 seed
//   u8 model | model payload
//       sigma_y: f64 mu_y, f64 sigma_y
//       gr:      f64 mean, f64 norm
//       topk:    u32 K, K x (u32 index, f64 value)
//       rho:     u32 L, L x f64
//   u8 quantizer kind | u32 levels | f64 step | f64 delta_sat | f64 t_star | f64 tol
//   u8 coder | u32 group size | u64 quantizer hash

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "srmc/arith.hpp"
#include "srmc/linpred.hpp"
#include "srmc/moments.hpp"
#include "srmc/quantization.hpp"
#include "srmc/sensing.hpp"

namespace srmc {

inline constexpr std::uint16_t kFormatVersion = 1;

enum class ModelKind : std::uint8_t { sigma_y = 0, gr = 1, topk = 2, rho = 3 };
enum class CoderKind : std::uint8_t { vlc = 0, flc = 1 };

std::string to_string(ModelKind k);
std::string to_string(CoderKind k);
std::string to_string(QuantizerKind k);
ModelKind parse_model_kind(std::string_view s);
CoderKind parse_coder_kind(std::string_view s);
QuantizerKind parse_quantizer_kind(std::string_view s);

struct QuantizerConfig {
    QuantizerKind kind = QuantizerKind::uniform;
    std::uint32_t levels = 256;  // 0 selects step-sized uniform cells
    double step = 0.0;
    double delta_sat = 0.01;
    double tol = 1e-9;           // Lloyd-Max

    bool operator==(const QuantizerConfig&) const = default;
};

struct CodingConfig {
    QuantizerConfig quantizer;
    CoderKind coder = CoderKind::vlc;
    std::uint32_t prediction = 0;       // group size r; 0 or 1 disables prediction
    std::optional<ModelKind> model;     // chosen per mode when empty
    std::uint32_t topk = 64;
    std::uint32_t rho_window = 64;
    std::optional<double> t_star;       // overrides the bound-derived range
};

struct SideInfo {
    Mode mode = Mode::lr;
    std::string transform;  // empty for RC
    std::uint64_t n = 0, m = 0;
    Selection selection = Selection::without_replacement;
    std::uint64_t seed = 0;

    ModelKind model = ModelKind::sigma_y;
    double mu_y = 0.0, sigma_y = 0.0;      // sigma_y
    double mean = 0.0, norm = 0.0;         // gr
    SparseModel topk;                      // topk
    std::vector<double> rho;               // rho

    QuantizerConfig quantizer;
    double t_star = 0.0;
    CoderKind coder = CoderKind::vlc;
    std::uint32_t prediction = 0;
    std::uint64_t quantizer_hash = 0;

    SensingSpec sensing_spec() const;
};

bool operator==(const SideInfo& a, const SideInfo& b);

std::vector<std::uint8_t> serialize(const SideInfo& s);
SideInfo parse_side_info(std::span<const std::uint8_t> bytes);

struct Bitstream {
    SideInfo side;
    BitBuffer payload;
};

std::vector<std::uint8_t> serialize(const Bitstream& b);
Bitstream parse_bitstream(std::span<const std::uint8_t> bytes);

struct EncodeResult {
    Bitstream stream;
    std::vector<std::uint8_t> bytes;
    std::vector<double> y;               // measurements, k = 1..m
    std::vector<double> yhat;            // encoder-side reconstruction
    std::vector<bool> saturated;
    std::vector<std::size_t> selection;  // c(1..m)
    std::size_t tv_count = 0;
    std::uint64_t header_bits = 0;
    std::uint64_t payload_bits = 0;
    std::uint64_t total_bits = 0;
    double model_entropy_bits = 0.0;     // sum of per-TV codeword entropies
    double ideal_bits = 0.0;             // sum of -log2 p(codeword)
    std::vector<double> tv_sigma;        // per-TV quantizer model sigma, TV order
};

EncodeResult encode(const Signal& x, const SensingSpec& spec, const CodingConfig& cfg);

struct DecodeResult {
    SideInfo side;
    std::vector<double> yhat;
    std::vector<bool> saturated;
    std::vector<std::size_t> selection;
    std::size_t tv_count = 0;
};

DecodeResult decode(const Bitstream& b);
DecodeResult decode(std::span<const std::uint8_t> bytes);

/// True when every row entry has modulus n^{-1/2} (WHT and its Kronecker products).
bool equal_magnitude_rows(const TransformOp& t);

}  // namespace srmc
