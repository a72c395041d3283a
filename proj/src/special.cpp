#include "urp/special.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace urp::special {

namespace {

constexpr double kEps = 1e-16;
constexpr int kMaxIter = 10000;

// exp(-x + a log x - lgamma(a)), the common prefactor of P and Q.
double prefactor(double a, double x) {
    return std::exp(-x + a * std::log(x) - std::lgamma(a));
}

double lower_series(double a, double x) {
    double term = 1.0 / a;
    double sum = term;
    for (int n = 1; n < kMaxIter; ++n) {
        term *= x / (a + n);
        sum += term;
        if (std::fabs(term) < std::fabs(sum) * kEps) break;
    }
    return sum * prefactor(a, x);
}

// Modified Lentz evaluation of the continued fraction for Q(a, x).
double upper_fraction(double a, double x) {
    constexpr double tiny = std::numeric_limits<double>::min() / kEps;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < kMaxIter; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::fabs(delta - 1.0) < kEps) break;
    }
    return h * prefactor(a, x);
}

} // namespace

double gamma_q(double a, double x) {
    if (!(a > 0.0)) throw std::domain_error("gamma_q: shape must be positive");
    if (std::isnan(x)) return std::numeric_limits<double>::quiet_NaN();
    if (x <= 0.0) return 1.0;
    if (std::isinf(x)) return 0.0;
    if (x < a + 1.0) return 1.0 - lower_series(a, x);
    return upper_fraction(a, x);
}

double gamma_p(double a, double x) {
    if (!(a > 0.0)) throw std::domain_error("gamma_p: shape must be positive");
    if (std::isnan(x)) return std::numeric_limits<double>::quiet_NaN();
    if (x <= 0.0) return 0.0;
    if (std::isinf(x)) return 1.0;
    if (x < a + 1.0) return lower_series(a, x);
    return 1.0 - upper_fraction(a, x);
}

double chi2_sf(double x, double df) {
    if (!(df > 0.0)) throw std::domain_error("chi2_sf: degrees of freedom must be positive");
    return gamma_q(0.5 * df, 0.5 * x);
}

double normal_two_sided(double z) {
    return std::erfc(std::fabs(z) / std::numbers::sqrt2);
}

} // namespace urp::special
