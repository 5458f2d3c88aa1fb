#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace srmc {

/// Finite real samples with an optional declared amplitude bound. Mean and
/// energy are computed once at construction.
class Signal {
public:
    Signal() = default;
    explicit Signal(std::vector<double> samples, std::optional<double> x_max = std::nullopt);

    std::size_t size() const { return samples_.size(); }
    std::span<const double> samples() const { return samples_; }
    const std::vector<double>& vec() const { return samples_; }
    double operator[](std::size_t k) const { return samples_[k]; }

    std::optional<double> x_max() const { return x_max_; }
    double mean() const { return mean_; }
    double norm2() const { return norm2_; }  // |x|_2^2
    double norm() const;                     // |x|_2

private:
    std::vector<double> samples_;
    std::optional<double> x_max_;
    double mean_ = 0.0;
    double norm2_ = 0.0;
};

/// Extends x with zeros to target_n samples.
Signal zero_pad(const Signal& x, std::size_t target_n);

/// Smallest power of two >= n.
std::size_t next_power_of_two(std::size_t n);

}  // namespace srmc
