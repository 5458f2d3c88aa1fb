#include "srmc/signal.hpp"

#include <cmath>
#include <string>

#include "srmc/error.hpp"

namespace srmc {

Signal::Signal(std::vector<double> samples, std::optional<double> x_max)
    : samples_(std::move(samples)), x_max_(x_max) {
    double sum = 0.0, sq = 0.0;
    for (std::size_t k = 0; k < samples_.size(); ++k) {
        const double v = samples_[k];
        if (!std::isfinite(v)) throw DomainError("signal sample " + std::to_string(k + 1) + " is not finite");
        if (x_max_ && std::abs(v) > *x_max_)
            throw DomainError("signal sample " + std::to_string(k + 1) + " exceeds declared x_max");
        sum += v;
        sq += v * v;
    }
    mean_ = samples_.empty() ? 0.0 : sum / static_cast<double>(samples_.size());
    norm2_ = sq;
}

double Signal::norm() const { return std::sqrt(norm2_); }

Signal zero_pad(const Signal& x, std::size_t target_n) {
    if (target_n < x.size())
        throw DomainError("zero_pad: target " + std::to_string(target_n) + " shorter than signal " +
                          std::to_string(x.size()));
    std::vector<double> s(x.samples().begin(), x.samples().end());
    s.resize(target_n, 0.0);
    return Signal(std::move(s), x.x_max());
}

std::size_t next_power_of_two(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

}  // namespace srmc
