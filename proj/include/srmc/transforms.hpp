#pragma once

// Orthonormal fast transforms with row introspection.
//
// Rows are numbered from 1 in every public function; row 1 is the constant
// (DC) row for all supported kinds, including Kronecker products.
//
// Row layouts:
//   wht      natural (Sylvester) order, w_jk = n^{-1/2} (-1)^{popcount((j-1)&(k-1))}
//   dct      orthonormal DCT-II, w_jk = s_j cos(pi (j-1)(2k-1) / 2n)
//   dft      real DFT of even order: row 1 constant; for h = 2..n/2 rows
//            2h-2 and 2h-1 are sqrt(2/n) cos and -sqrt(2/n) sin of frequency
//            h-1; row n alternates +-n^{-1/2} (Nyquist)
//   kron     W' (x) W'', row (j1-1) n'' + j2 = w'_{j1} (x) w''_{j2}

#include <Eigen/Dense>
#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace srmc {

enum class TransformKind { wht, dct, real_dft, kronecker };

/// One term gamma * w_index of the expansion
///   w_j o w_h = n^{-1/2} sum_k gamma_k w_{l_k}.
struct ProductTerm {
    double gamma;
    std::size_t index;  // 1-based row number
};

struct RowProductRep {
    std::vector<ProductTerm> terms;  // sorted by index, no zero weights
    std::size_t p() const { return terms.size(); }
};

struct RowStats {
    double row_mean;            // n^{-1} sum_k w_jk
    double inf_norm;            // max_k |w_jk|
    std::optional<double> beta; // n^{-1/2} |T w_j|_2 / |T w_j|_inf; empty when T w_j = 0
};

/// Immutable handle to an n x n orthonormal transform. Cheap to copy.
class TransformOp {
public:
    static TransformOp wht(std::size_t n);
    static TransformOp dct(std::size_t n);
    static TransformOp real_dft(std::size_t n);
    static TransformOp kronecker(const TransformOp& left, const TransformOp& right);

    /// Parses "wht", "dct", "dft" (order taken from n) or
    /// "kron(<kind>:<n1>,<kind>:<n2>)" (nesting allowed), checking the order.
    static TransformOp parse(std::string_view name, std::size_t n);

    TransformKind kind() const;
    std::size_t order() const;
    const TransformOp& left() const;   // kronecker only
    const TransformOp& right() const;  // kronecker only

    /// Round-trips through parse(); factor orders are included for kron.
    std::string name() const;

    /// True when apply_forward runs in O(n log n) (power-of-two factors).
    bool fast() const;

    std::vector<double> apply_forward(std::span<const double> v) const;
    std::vector<double> apply_adjoint(std::span<const double> v) const;
    void forward_inplace(std::span<double> v) const;
    void adjoint_inplace(std::span<double> v) const;

    std::vector<double> row(std::size_t j) const;
    RowStats row_stats(std::size_t j) const;

    /// Exact row mean: n^{-1/2} for j = 1, zero otherwise. Holds for every
    /// supported kind and is free of transform round-off.
    double row_mean(std::size_t j) const;

    RowProductRep pointwise_product_rep(std::size_t j, std::size_t h) const;

    /// Dense matrix from the closed-form entry definitions (n <= 4096).
    Eigen::MatrixXd dense() const;

    /// Closed-form entry w_jk (1-based); O(1) except for Kronecker depth.
    double entry(std::size_t j, std::size_t k) const;

    struct Impl;

private:
    explicit TransformOp(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
    std::shared_ptr<const Impl> impl_;
};

/// sqrt(n) max_{i,j} |w_i psi_j| / (|w_i|_2 |psi_j|_2) over the columns of psi.
double mutual_coherence(const TransformOp& w, const Eigen::MatrixXd& psi);

}  // namespace srmc
