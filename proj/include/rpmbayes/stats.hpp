#pragma once
// Special functions needed by the goodness-of-fit screen: the regularized
// incomplete gamma functions P(a,x) and Q(a,x), and the chi-squared survival
// function built on them. Series expansion for x < a+1, continued fraction
// (modified Lentz) otherwise.

#include <cmath>
#include <limits>
#include <stdexcept>

namespace rpmbayes {

namespace detail {

inline constexpr int kGammaMaxIter = 500;

inline double gamma_p_series(double a, double x) {
    const double eps = std::numeric_limits<double>::epsilon();
    double ap = a;
    double del = 1.0 / a;
    double sum = del;
    for (int n = 0; n < kGammaMaxIter; ++n) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::abs(del) < std::abs(sum) * eps)
            return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
    }
    throw std::runtime_error("incomplete gamma series did not converge");
}

inline double gamma_q_contfrac(double a, double x) {
    const double eps = std::numeric_limits<double>::epsilon();
    const double fpmin = std::numeric_limits<double>::min() / eps;
    double b = x + 1.0 - a;
    double c = 1.0 / fpmin;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= kGammaMaxIter; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < fpmin) d = fpmin;
        c = b + an / c;
        if (std::abs(c) < fpmin) c = fpmin;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) <= eps)
            return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
    }
    throw std::runtime_error("incomplete gamma continued fraction did not converge");
}

} // namespace detail

// Regularized lower incomplete gamma P(a,x) = gamma(a,x)/Gamma(a).
inline double gamma_p(double a, double x) {
    if (!(a > 0.0) || !(x >= 0.0))
        throw std::domain_error("gamma_p requires a > 0 and x >= 0");
    if (x == 0.0) return 0.0;
    if (x < a + 1.0) return detail::gamma_p_series(a, x);
    return 1.0 - detail::gamma_q_contfrac(a, x);
}

// Regularized upper incomplete gamma Q(a,x) = 1 - P(a,x).
inline double gamma_q(double a, double x) {
    if (!(a > 0.0) || !(x >= 0.0))
        throw std::domain_error("gamma_q requires a > 0 and x >= 0");
    if (x == 0.0) return 1.0;
    if (x < a + 1.0) return 1.0 - detail::gamma_p_series(a, x);
    return detail::gamma_q_contfrac(a, x);
}

// P(X > x) for X ~ chi-squared with df degrees of freedom.
inline double chi_squared_survival(double x, double df) {
    if (!(df > 0.0)) throw std::domain_error("chi_squared_survival requires df > 0");
    if (!(x >= 0.0)) throw std::domain_error("chi_squared_survival requires x >= 0");
    return gamma_q(0.5 * df, 0.5 * x);
}

} // namespace rpmbayes
