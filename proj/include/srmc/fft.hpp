#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace srmc {

using cplx = std::complex<double>;

/// Largest order accepted by the O(n^2) fallback used for non power-of-two
/// lengths. Intended for tests and small problems only.
inline constexpr std::size_t kDenseFallbackMax = 4096;

inline bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

/// Unnormalized in-place DFT: X_f = sum_k a_k exp(-+2 pi i f k / n), the sign
/// being + when `inverse` is set. Radix-2 for power-of-two n, direct
/// summation otherwise (n <= kDenseFallbackMax).
void fft_inplace(std::span<cplx> a, bool inverse);

/// Unitary DFT F x with F_{kj} = n^{-1/2} exp(-2 pi i (k-1)(j-1)/n).
std::vector<cplx> unitary_dft(std::span<const double> x);

/// F^* v, the inverse of unitary_dft.
std::vector<cplx> unitary_idft(std::span<const cplx> v);

}  // namespace srmc
