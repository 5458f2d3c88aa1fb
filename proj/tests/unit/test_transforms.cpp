#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "srmc/error.hpp"
#include "srmc/transforms.hpp"

using srmc::TransformOp;

namespace {

TransformOp make(const std::string& kind, std::size_t n) { return TransformOp::parse(kind, n); }

double max_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double d = 0;
    for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
    return d;
}

}  // namespace

TEST_CASE("closed-form entries match the definitions") {
    for (std::string kind : {"wht", "dct", "dft"})
        for (std::size_t n : {8u, 16u}) {
            const TransformOp t = make(kind, n);
            const Eigen::MatrixXd ref = oracle::matrix(kind, n);
            CHECK((t.dense() - ref).cwiseAbs().maxCoeff() < 1e-12);
        }
}

TEST_CASE("fast apply matches the dense oracle, including non power-of-two orders") {
    struct Case {
        std::string kind;
        std::size_t n;
    };
    for (const Case& c : {Case{"wht", 64}, Case{"dct", 64}, Case{"dft", 64}, Case{"dct", 12}, Case{"dft", 10},
                          Case{"dct", 1}, Case{"dft", 2}}) {
        const TransformOp t = make(c.kind, c.n);
        const Eigen::MatrixXd w = oracle::matrix(c.kind, c.n);
        const auto x = oracle::gaussian(c.n, c.n);
        CHECK(max_diff(t.apply_forward(x), oracle::apply(w, x)) < 1e-12);
        CHECK(max_diff(t.apply_adjoint(x), oracle::apply(w.transpose(), x)) < 1e-12);
        CHECK(max_diff(t.apply_adjoint(t.apply_forward(x)), x) < 1e-12);
    }
}

TEST_CASE("kronecker rows are products of factor rows") {
    const TransformOp t = TransformOp::parse("kron(dct:4,wht:8)", 32);
    CHECK(t.name() == "kron(dct:4,wht:8)");
    CHECK(TransformOp::parse(t.name(), 32).name() == t.name());
    const Eigen::MatrixXd a = oracle::matrix("dct", 4), b = oracle::matrix("wht", 8);
    Eigen::MatrixXd k(32, 32);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) k.block(i * 8, j * 8, 8, 8) = a(i, j) * b;
    CHECK((t.dense() - k).cwiseAbs().maxCoeff() < 1e-12);
    const auto x = oracle::gaussian(32, 3);
    CHECK(max_diff(t.apply_forward(x), oracle::apply(k, x)) < 1e-12);
    CHECK(t.row_mean(1) == doctest::Approx(1.0 / std::sqrt(32.0)));
}

TEST_CASE("row product representations reconstruct w_j o w_h") {
    for (std::string kind : {"wht", "dct", "dft", "kron(dft:4,dct:4)"}) {
        const std::size_t n = 16;
        const TransformOp t = make(kind, n);
        const Eigen::MatrixXd w = t.dense();
        for (std::size_t j = 1; j <= n; ++j)
            for (std::size_t h = 1; h <= n; ++h) {
                const auto rep = t.pointwise_product_rep(j, h);
                Eigen::VectorXd acc = Eigen::VectorXd::Zero(n);
                for (const auto& term : rep.terms) acc += term.gamma * w.row(term.index - 1).transpose();
                acc /= std::sqrt(16.0);
                const Eigen::VectorXd direct = w.row(j - 1).cwiseProduct(w.row(h - 1)).transpose();
                CHECK((acc - direct).cwiseAbs().maxCoeff() < 1e-12);
            }
    }
}

TEST_CASE("row statistics") {
    const TransformOp t = TransformOp::wht(16);
    for (std::size_t j = 1; j <= 16; ++j) {
        const auto s = t.row_stats(j);
        CHECK(s.inf_norm == doctest::Approx(0.25));
        CHECK(s.row_mean == doctest::Approx(t.row_mean(j)).epsilon(1e-12));
        if (j == 1)
            CHECK_FALSE(s.beta.has_value());
        else
            CHECK(*s.beta == doctest::Approx(1.0));
    }
    const TransformOp d = TransformOp::dct(16);
    for (std::size_t j = 2; j <= 16; ++j) {
        const auto s = d.row_stats(j);
        REQUIRE(s.beta.has_value());
        CHECK(*s.beta > 0.0);
        CHECK(*s.beta <= 1.0 + 1e-12);
    }
}

TEST_CASE("mutual coherence") {
    const TransformOp t = TransformOp::wht(16);
    CHECK(srmc::mutual_coherence(t, Eigen::MatrixXd::Identity(16, 16)) == doctest::Approx(1.0));
    CHECK(srmc::mutual_coherence(t, t.dense().transpose()) == doctest::Approx(4.0));
}

TEST_CASE("invalid orders and names are rejected") {
    CHECK_THROWS_AS(TransformOp::wht(12), srmc::DomainError);
    CHECK_THROWS_AS(TransformOp::real_dft(7), srmc::DomainError);
    CHECK_THROWS_AS(TransformOp::parse("fft", 8), srmc::DomainError);
    CHECK_THROWS_AS(TransformOp::parse("kron(wht:2,wht:2)", 8), srmc::Error);
    CHECK_THROWS_AS(TransformOp::wht(8).row(9), srmc::IndexError);
}
