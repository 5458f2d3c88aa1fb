#pragma once

// Sensing with structurally random matrices:
//   z = sqrt(n/m) W R x,   y_k = z_{c(k)},  k = 1..m
// LR: R = diag(b), b IID Rademacher.  GR: R_{jk} = delta_{j, pi(k)}.
// RC: z = sqrt(n/m) F^* diag(b) F x with conjugate-symmetric unit phases b.
// RST: R = I (baseline, not universal).

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "srmc/fft.hpp"
#include "srmc/signal.hpp"
#include "srmc/transforms.hpp"

namespace srmc {

enum class Mode : std::uint8_t { lr = 0, gr = 1, rc = 2, rst = 3 };
enum class Selection : std::uint8_t { with_replacement = 0, without_replacement = 1 };

std::string to_string(Mode mode);
std::string to_string(Selection selection);
Mode parse_mode(std::string_view s);
Selection parse_selection(std::string_view s);

struct SensingSpec {
    Mode mode = Mode::lr;
    std::optional<TransformOp> transform;  // unused by RC, which fixes the complex DFT
    std::size_t n = 0;
    std::size_t m = 0;
    Selection selection = Selection::without_replacement;
    std::uint64_t seed = 0;

    /// sqrt(n/m).
    double scale() const;
    /// Throws DomainError/DimensionError for inconsistent fields.
    void validate() const;
    const TransformOp& transform_op() const;
};

/// chi_n(k): 1 when k = <n + 2 - k>_n, i.e. k = 1 or (n even) k = n/2 + 1.
bool self_symmetric(std::size_t k, std::size_t n);

/// One realisation of the sensing randomness. Only the fields relevant to
/// the mode are populated; indices are 1-based.
struct SensingDraw {
    Mode mode = Mode::lr;
    std::vector<std::int8_t> rademacher;    // LR: b_k
    std::vector<std::size_t> permutation;   // GR: permutation[k-1] = pi(k)
    std::vector<cplx> rc_phases;            // RC: b_k
    std::vector<std::size_t> selection;     // c(1..m)
};

SensingDraw draw(const SensingSpec& spec);
SensingDraw draw(const SensingSpec& spec, std::uint64_t seed);

/// Only the measurement indices c(1..m); reads just the selection stream.
std::vector<std::size_t> draw_selection(const SensingSpec& spec, std::uint64_t seed);

/// z = sqrt(n/m) W R x (mode-dependent, see header comment).
std::vector<double> mixture_vector(const SensingSpec& spec, const SensingDraw& d, const Signal& x);

/// y_k = z_{c(k)}.
std::vector<double> measure(const SensingSpec& spec, const SensingDraw& d, const Signal& x);

/// Picks z_{c(k)} from an already computed mixture vector.
std::vector<double> select(std::span<const double> z, std::span<const std::size_t> selection);

}  // namespace srmc
