#pragma once

// Scalar quantizers for Gaussian-modelled variables.
//
// Codeword layout: 0 = below lo, 1..L = unsaturated regions
// [b_{i-1}, b_i), L+1 = at or above hi. A degenerate spec (sigma = 0) has a
// single codeword 0 reproducing the mean.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "srmc/tailbounds.hpp"

namespace srmc {

struct GaussianModel {
    double mean = 0.0;
    double sigma = 1.0;
};

enum class QuantizerKind : std::uint8_t { uniform = 0, lloyd_max = 1 };

struct QuantizerSpec {
    QuantizerKind kind = QuantizerKind::uniform;
    std::size_t levels = 0;              // L
    double lo = 0.0, hi = 0.0;
    double step = 0.0;                   // uniform only
    std::vector<double> boundaries;      // b_0 = lo, ..., b_L = hi
    std::vector<double> reproductions;   // L values, one per region
    double below_value = 0.0;            // reproduction of codeword 0
    double above_value = 0.0;            // reproduction of codeword L+1
    bool degenerate = false;
    bool converged = true;               // Lloyd-Max only
    std::size_t iterations = 0;          // Lloyd-Max only

    std::size_t codebook_size() const { return degenerate ? 1 : levels + 2; }
    std::size_t below_code() const { return 0; }
    std::size_t above_code() const { return levels + 1; }
    bool saturated(std::size_t c) const { return !degenerate && (c == 0 || c == levels + 1); }
};

/// Range mean +- t* sigma with t* = invert_bound(bound, delta_sat).
QuantizerSpec design_uniform(const GaussianModel& g, std::size_t levels, double delta_sat, const BoundFn& bound);
/// Range mean +- t_star sigma split into `levels` equal cells.
QuantizerSpec design_uniform_t(const GaussianModel& g, std::size_t levels, double t_star);
/// Cells of width `step`; L = 2 ceil(t_star sigma / step), centred on the mean.
QuantizerSpec design_uniform_step(const GaussianModel& g, double step, double t_star);
/// `levels` equal cells over [lo, hi].
QuantizerSpec design_uniform_range(std::size_t levels, double lo, double hi);

inline constexpr std::size_t kLloydMaxIterations = 10000;

/// Lloyd iteration for N(0,1), mapped affinely to N(mean, sigma^2). Stops
/// when no reproduction moves by tol or more (in sigma units); otherwise
/// returns the last iterate with converged = false.
QuantizerSpec design_lloyd_max(const GaussianModel& g, std::size_t levels, double tol);

/// Maps a spec designed for N(0,1) to N(mean, sigma^2): v -> mean + sigma v.
QuantizerSpec scale_quantizer(const QuantizerSpec& unit, const GaussianModel& g);

std::size_t quantize(const QuantizerSpec& q, double v);
double dequantize(const QuantizerSpec& q, std::size_t c);

/// Gaussian mass of every codeword region (saturation cells included).
std::vector<double> codeword_probs(const QuantizerSpec& q, const GaussianModel& g);

/// Entropy in bits.
double entropy(std::span<const double> probs);

/// E[(v - dequantize(quantize(v)))^2] for v ~ g.
double distortion(const QuantizerSpec& q, const GaussianModel& g);

/// P(a < Z < b) for Z ~ N(0,1), a <= b, without cancellation in either tail.
double gaussian_mass(double a, double b);

/// FNV-1a over the bit patterns of boundaries and reproductions.
std::uint64_t fingerprint(const QuantizerSpec& q);

}  // namespace srmc
