#pragma once

// Platform-independent elementary functions.
//
// Everything the decoder derives from side information (codeword
// probabilities, Lloyd-Max tables) goes through these routines instead of
// libm, so encoder and decoder agree to the last bit on any IEEE-754 target
// that honours -ffp-contract=off. Only +, -, *, /, sqrt, frexp and ldexp are
// used internally.

namespace srmc::detmath {

double exp(double x);

/// Natural log, x > 0. Returns NaN for x <= 0 or NaN.
double log(double x);

/// log(1 + u) for u > -1.
double log1p(double u);

/// Standard normal density.
double normal_pdf(double x);

/// Standard normal CDF, Phi(x).
double normal_cdf(double x);

/// Upper tail Q(x) = 1 - Phi(x), evaluated without cancellation for x > 0.
double normal_upper_tail(double x);

/// Phi^{-1}(p) for 0 < p < 1.
double normal_quantile(double p);

}  // namespace srmc::detmath
