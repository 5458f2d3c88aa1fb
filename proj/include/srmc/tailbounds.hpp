#pragma once

// Concentration bounds of the form Pr{|z_j - mu_j| > t sigma_j} <= 2 exp(-t^2 eta(t, tau_j)).
//   LR  eta = 1/2
//   RC  eta = max(1/4, xi(t / tau))
//   GR  eta = tau_j^2 / (8n + 4 t tau_j)

#include <cstddef>
#include <functional>

#include "srmc/sensing.hpp"
#include "srmc/signal.hpp"
#include "srmc/transforms.hpp"

namespace srmc {

/// xi(u) = u^{-2} [(1 + u) ln(1 + u) - u], xi(0) = 1/2.
double xi(double u);

double lr_bound(double t);
double rc_bound(double t, double tau);
double gr_bound(double t, double tau_j, std::size_t n);

/// |x|_2 / max_k (2 - chi_n(k)) |(Fx)_k| with F the unitary DFT.
double tau_rc(const Signal& x);

/// (n-1)^{-1/2} (|T w_j|_2 / |T w_j|_inf)(|Tx|_2 / |Tx|_inf), T = I - n^{-1} 1 1^T.
/// Throws DomainError when x is constant or row j has zero spread.
double tau_gr(const TransformOp& t, std::size_t j, const Signal& x);

using BoundFn = std::function<double(double)>;

struct TailBoundParams {
    Mode mode = Mode::lr;
    std::size_t n = 0;
    double tau = 0.0;  // unused for LR

    double bound(double t) const;
    BoundFn fn() const;
};

/// Smallest t with b(t) <= delta, bisected until the bracket is two adjacent
/// doubles. delta must lie in (0, 2).
double invert_bound(const BoundFn& b, double delta);

/// min(1, b).
inline double capped(double b) { return b < 1.0 ? b : 1.0; }

}  // namespace srmc
