#pragma once

#include <cstdint>
#include <limits>

namespace srmc {

/// Independent random streams derived from one seed. Each component of a
/// sensing draw reads only its own stream, so any one of them can be
/// regenerated without the others (the decoder only needs `selection`).
enum class Stream : std::uint64_t {
    rademacher = 1,
    permutation = 2,
    rc_phases = 3,
    selection = 4,
    signal = 5,
    harness = 6,
};

std::uint64_t splitmix64(std::uint64_t x);

/// SplitMix64 counter generator keyed by (seed, stream). Output i is
/// splitmix64(key + (i + 1) * golden_gamma), identical on every platform.
class CounterRng {
public:
    using result_type = std::uint64_t;

    CounterRng(std::uint64_t seed, Stream stream);
    CounterRng(std::uint64_t seed, std::uint64_t stream_id);

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()() { return next_u64(); }
    std::uint64_t next_u64();

    /// Uniform in [0, 1) with 53 random bits.
    double uniform();

    /// Uniform integer in [0, bound), bound > 0. Lemire's multiply-shift with
    /// rejection, so no modulo bias.
    std::uint64_t below(std::uint64_t bound);

    /// +1 or -1 with equal probability.
    int sign();

    /// Standard normal deviate (Box-Muller, one value per call).
    double normal();

    std::uint64_t counter() const { return counter_; }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

/// Per-trial seed for Monte Carlo experiments: base seed XOR trial index.
inline std::uint64_t trial_seed(std::uint64_t base, std::uint64_t trial) { return base ^ trial; }

}  // namespace srmc
