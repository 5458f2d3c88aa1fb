#pragma once

// Closed-loop linear prediction inside small groups of correlated TVs.
//
// For group members z_1..z_r (ascending component index) position q is
// predicted from the reconstructions of positions 1..q-1:
//   u_q    = (z_q - E z_q) - sum_h a_{h,q} (zhat_h - E z_h)
//   zhat_q = Q_q(u_q) + E z_q + sum_h a_{h,q} (zhat_h - E z_h)
// Coefficients come from the covariance model only, so the decoder derives
// the same plan from side information.

#include <cstddef>
#include <span>
#include <vector>

#include "srmc/moments.hpp"
#include "srmc/quantization.hpp"

namespace srmc {

inline constexpr std::size_t kMaxGroupSize = 16;

struct PredictionGroup {
    std::vector<std::size_t> members;          // positions in the TV list, 0-based
    std::vector<std::size_t> components;       // component index of each member, 1-based
    std::vector<std::vector<double>> coeffs;   // coeffs[q][h] = a_{h,q}, h < q
    std::vector<double> residual_var;          // var{u_q}
    std::vector<double> mean;                  // E z_q
    std::vector<double> raw_residual_var;      // before clamping at 0
};

struct PredictionPlan {
    std::size_t r = 1;
    std::vector<PredictionGroup> groups;
};

/// Groups the TVs whose component indices are `components` (TV order) and
/// solves the normal equations of every position. RC/GR/RST: consecutive runs
/// of the index-sorted TVs. LR: greedy, the lowest unassigned index anchors a
/// group and takes the r-1 unassigned TVs with the largest |cov| to it.
PredictionPlan plan(const MixtureMoments& mm, std::span<const std::size_t> components, std::size_t r);

struct GroupCode {
    std::vector<std::size_t> codes;
    std::vector<double> zhat;
    std::vector<double> residual;   // u_q before quantization
    std::vector<bool> saturated;
};

/// z holds the group's values in member order; quantizers[q] is designed
/// for N(0, var{u_q}).
GroupCode encode_group(const PredictionGroup& g, std::span<const double> z,
                       std::span<const QuantizerSpec* const> quantizers);

std::vector<double> decode_group(const PredictionGroup& g, std::span<const std::size_t> codes,
                                 std::span<const QuantizerSpec* const> quantizers);

/// Solves the SPD system a x = b (row-major k x k) by Cholesky. Returns the
/// largest order k' <= k whose leading block factors with pivots above
/// eps * max diag; x has length k', the solution of that leading system.
std::size_t cholesky_solve_leading(std::vector<double> a, std::size_t k, std::span<const double> b,
                                   std::vector<double>& x, double eps = 1e-12);

}  // namespace srmc
