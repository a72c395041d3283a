#pragma once

namespace urp::special {

/// Regularized upper incomplete gamma function Q(a, x) = Γ(a, x) / Γ(a).
double gamma_q(double a, double x);

/// Regularized lower incomplete gamma function P(a, x) = 1 - Q(a, x).
double gamma_p(double a, double x);

/// Upper tail P(X >= x) of a chi-square variable with df degrees of freedom.
double chi2_sf(double x, double df);

/// Two-sided standard normal tail P(|Z| >= z).
double normal_two_sided(double z);

} // namespace urp::special
