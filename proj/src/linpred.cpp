#include "srmc/linpred.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "srmc/error.hpp"

namespace srmc {

std::size_t cholesky_solve_leading(std::vector<double> a, std::size_t k, std::span<const double> b,
                                   std::vector<double>& x, double eps) {
    double dmax = 0.0;
    for (std::size_t i = 0; i < k; ++i) dmax = std::max(dmax, a[i * k + i]);
    const double floor = eps * dmax;
    std::size_t order = 0;
    // In-place lower factor; stops at the first pivot that is not clearly positive.
    for (std::size_t i = 0; i < k; ++i) {
        double d = a[i * k + i];
        for (std::size_t p = 0; p < i; ++p) d -= a[i * k + p] * a[i * k + p];
        if (!(d > floor) || dmax <= 0.0) break;
        const double l = std::sqrt(d);
        a[i * k + i] = l;
        for (std::size_t r = i + 1; r < k; ++r) {
            double s = a[r * k + i];
            for (std::size_t p = 0; p < i; ++p) s -= a[r * k + p] * a[i * k + p];
            a[r * k + i] = s / l;
        }
        order = i + 1;
    }
    x.assign(order, 0.0);
    for (std::size_t i = 0; i < order; ++i) {
        double s = b[i];
        for (std::size_t p = 0; p < i; ++p) s -= a[i * k + p] * x[p];
        x[i] = s / a[i * k + i];
    }
    for (std::size_t ii = order; ii-- > 0;) {
        double s = x[ii];
        for (std::size_t p = ii + 1; p < order; ++p) s -= a[p * k + ii] * x[p];
        x[ii] = s / a[ii * k + ii];
    }
    return order;
}

namespace {

std::vector<std::vector<std::size_t>> group_consecutive(const std::vector<std::size_t>& sorted, std::size_t r) {
    std::vector<std::vector<std::size_t>> out;
    for (std::size_t i = 0; i < sorted.size(); i += r)
        out.emplace_back(sorted.begin() + static_cast<std::ptrdiff_t>(i),
                         sorted.begin() + static_cast<std::ptrdiff_t>(std::min(sorted.size(), i + r)));
    return out;
}

std::vector<std::vector<std::size_t>> group_greedy(const MixtureMoments& mm, const std::vector<std::size_t>& sorted,
                                                   std::span<const std::size_t> comp, std::size_t r) {
    std::vector<std::vector<std::size_t>> out;
    std::vector<bool> used(sorted.size(), false);
    std::vector<std::pair<double, std::size_t>> cand;
    for (std::size_t a = 0; a < sorted.size(); ++a) {
        if (used[a]) continue;
        used[a] = true;
        std::vector<std::size_t> g{sorted[a]};
        cand.clear();
        for (std::size_t b = a + 1; b < sorted.size(); ++b)
            if (!used[b]) cand.emplace_back(std::abs(mm.cov(comp[sorted[a]], comp[sorted[b]])), b);
        // sorted is ascending by index, so stable order breaks ties by lower index
        const std::size_t take = std::min(r - 1, cand.size());
        std::partial_sort(cand.begin(), cand.begin() + static_cast<std::ptrdiff_t>(take), cand.end(),
                          [](const auto& u, const auto& v) { return u.first > v.first || (u.first == v.first && u.second < v.second); });
        for (std::size_t i = 0; i < take; ++i) {
            used[cand[i].second] = true;
            g.push_back(sorted[cand[i].second]);
        }
        std::sort(g.begin(), g.end(), [&](std::size_t u, std::size_t v) {
            return comp[u] < comp[v] || (comp[u] == comp[v] && u < v);
        });
        out.push_back(std::move(g));
    }
    return out;
}

}  // namespace

PredictionPlan plan(const MixtureMoments& mm, std::span<const std::size_t> components, std::size_t r) {
    if (r < 1 || r > kMaxGroupSize) throw DomainError("group size must lie in 1.." + std::to_string(kMaxGroupSize));
    for (std::size_t c : components)
        if (c < 1 || c > mm.n()) throw IndexError("component index " + std::to_string(c) + " outside 1..n");
    PredictionPlan pl;
    pl.r = r;
    std::vector<std::size_t> sorted(components.size());
    std::iota(sorted.begin(), sorted.end(), std::size_t{0});
    std::stable_sort(sorted.begin(), sorted.end(),
                     [&](std::size_t u, std::size_t v) { return components[u] < components[v]; });

    std::vector<std::vector<std::size_t>> groups;
    if (r == 1 || mm.mode() != Mode::lr)
        groups = group_consecutive(sorted, r);
    else
        groups = group_greedy(mm, sorted, components, r);

    for (auto& members : groups) {
        PredictionGroup g;
        const std::size_t k = members.size();
        g.members = members;
        for (std::size_t pos : members) {
            g.components.push_back(components[pos]);
            g.mean.push_back(mm.mean(components[pos]));
        }
        std::vector<double> c(k * k);
        for (std::size_t i = 0; i < k; ++i)
            for (std::size_t j = i; j < k; ++j) c[i * k + j] = c[j * k + i] = mm.cov(g.components[i], g.components[j]);
        g.coeffs.resize(k);
        for (std::size_t q = 0; q < k; ++q) {
            std::vector<double> a(q * q), rhs(q), sol;
            for (std::size_t i = 0; i < q; ++i) {
                rhs[i] = c[i * k + q];
                for (std::size_t j = 0; j < q; ++j) a[i * q + j] = c[i * k + j];
            }
            const std::size_t order = q == 0 ? 0 : cholesky_solve_leading(a, q, rhs, sol);
            sol.resize(q, 0.0);
            double v = c[q * k + q];
            for (std::size_t h = 0; h < order; ++h) v -= sol[h] * rhs[h];
            g.coeffs[q] = std::move(sol);
            g.raw_residual_var.push_back(v);
            g.residual_var.push_back(std::max(0.0, v));
        }
        pl.groups.push_back(std::move(g));
    }
    return pl;
}

namespace {

double prediction(const PredictionGroup& g, std::size_t q, const std::vector<double>& zhat) {
    double p = g.mean[q];
    for (std::size_t h = 0; h < q; ++h) p += g.coeffs[q][h] * (zhat[h] - g.mean[h]);
    return p;
}

}  // namespace

GroupCode encode_group(const PredictionGroup& g, std::span<const double> z,
                       std::span<const QuantizerSpec* const> quantizers) {
    const std::size_t k = g.members.size();
    if (z.size() != k || quantizers.size() != k) throw DimensionError("group size mismatch");
    GroupCode out;
    out.zhat.resize(k);
    for (std::size_t q = 0; q < k; ++q) {
        const double pred = prediction(g, q, out.zhat);
        const double u = z[q] - pred;
        const std::size_t c = quantize(*quantizers[q], u);
        out.codes.push_back(c);
        out.residual.push_back(u);
        out.saturated.push_back(quantizers[q]->saturated(c));
        out.zhat[q] = pred + dequantize(*quantizers[q], c);
    }
    return out;
}

std::vector<double> decode_group(const PredictionGroup& g, std::span<const std::size_t> codes,
                                 std::span<const QuantizerSpec* const> quantizers) {
    const std::size_t k = g.members.size();
    if (codes.size() != k || quantizers.size() != k) throw DimensionError("codeword count does not match group size");
    std::vector<double> zhat(k);
    for (std::size_t q = 0; q < k; ++q) zhat[q] = prediction(g, q, zhat) + dequantize(*quantizers[q], codes[q]);
    return zhat;
}

}  // namespace srmc
