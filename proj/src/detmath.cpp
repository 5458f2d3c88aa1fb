#include "srmc/detmath.hpp"

#include <cmath>
#include <limits>

namespace srmc::detmath {

namespace {

constexpr double kLn2Hi = 6.93147180369123816490e-01;
constexpr double kLn2Lo = 1.90821492927058770002e-10;
constexpr double kLog2e = 1.44269504088896338700e+00;
constexpr double kInvSqrt2Pi = 0.39894228040143267794;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// 2 * atanh(s) = log((1+s)/(1-s)) for |s| <= 0.1716.
double two_atanh_small(double s) {
    const double s2 = s * s;
    double acc = 0.0;
    for (int k = 25; k >= 3; k -= 2) acc = (acc + 1.0 / k) * s2;
    return 2.0 * s * (1.0 + acc);
}

}  // namespace

double exp(double x) {
    if (x != x) return x;
    if (x > 709.782712893384) return std::numeric_limits<double>::infinity();
    if (x < -745.2) return 0.0;
    const double k = std::floor(x * kLog2e + 0.5);
    const double r = (x - k * kLn2Hi) - k * kLn2Lo;  // |r| <= 0.35
    // Taylor to degree 14 in Horner form; truncation < 1e-18 relative.
    double p = 1.0;
    for (int i = 14; i >= 1; --i) p = 1.0 + p * r / i;
    return std::ldexp(p, static_cast<int>(k));
}

double log(double x) {
    if (!(x > 0.0)) return x == 0.0 ? -std::numeric_limits<double>::infinity() : kNaN;
    if (x == std::numeric_limits<double>::infinity()) return x;
    int e = 0;
    double f = std::frexp(x, &e);  // f in [0.5, 1)
    if (f < 0.70710678118654752440) {
        f *= 2.0;
        --e;
    }
    const double s = (f - 1.0) / (f + 1.0);
    return e * kLn2Hi + (two_atanh_small(s) + e * kLn2Lo);
}

double log1p(double u) {
    if (!(u > -1.0)) return u == -1.0 ? -std::numeric_limits<double>::infinity() : kNaN;
    if (u > 0.4 || u < -0.29) return log(1.0 + u);
    // s = u / (2 + u) is exact enough and keeps full relative accuracy near 0.
    return two_atanh_small(u / (2.0 + u));
}

double normal_pdf(double x) { return kInvSqrt2Pi * exp(-0.5 * x * x); }

double normal_upper_tail(double x) {
    if (x != x) return x;
    if (x < 0.0) return 1.0 - normal_upper_tail(-x);
    if (x > 38.5) return 0.0;
    if (x < 2.5) {
        // Phi(x) - 1/2 = pdf(x) * sum_k x^{2k+1} / (2k+1)!!
        const double x2 = x * x;
        double term = x;
        double sum = x;
        for (int k = 1; k < 200; ++k) {
            term *= x2 / (2 * k + 1);
            sum += term;
            if (term < 1e-17 * sum) break;
        }
        return 0.5 - normal_pdf(x) * sum;
    }
    // Laplace continued fraction, evaluated backwards with a fixed depth.
    double f = x;
    for (int k = 100; k >= 1; --k) f = x + k / f;
    return normal_pdf(x) / f;
}

double normal_cdf(double x) { return normal_upper_tail(-x); }

double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) {
        if (p == 0.0) return -std::numeric_limits<double>::infinity();
        if (p == 1.0) return std::numeric_limits<double>::infinity();
        return kNaN;
    }
    // Acklam's rational starting point, then Newton steps on the frozen CDF.
    static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                   -2.759285104469687e+02, 1.383577518672690e+02,
                                   -3.066479806614716e+01, 2.506628277459239e+00};
    static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                   -1.556989798598866e+02, 6.680131188771972e+01,
                                   -1.328068155288572e+01};
    static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                   -2.400758277161838e+00, -2.549671010322563e+00,
                                   4.374664141464968e+00,  2.938163982698783e+00};
    static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                   2.445134137142996e+00, 3.754408661907416e+00};
    constexpr double p_low = 0.02425;
    double x;
    if (p < p_low) {
        const double q = std::sqrt(-2.0 * log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (p <= 1.0 - p_low) {
        const double q = p - 0.5;
        const double r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        const double q = std::sqrt(-2.0 * log(1.0 - p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    for (int it = 0; it < 3; ++it) {
        const double pdf = normal_pdf(x);
        if (pdf <= 0.0) break;
        // Work on whichever tail carries the relative precision.
        const double err = p < 0.5 ? normal_cdf(x) - p : (1.0 - p) - normal_upper_tail(x);
        x -= err / pdf;
    }
    return x;
}

}  // namespace srmc::detmath
