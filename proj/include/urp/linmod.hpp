#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <span>
#include <vector>

namespace urp {

using ScoreMatrix = Eigen::Matrix<double, Eigen::Dynamic, 2>;

/// OLS fit of y = intercept + slope * x on one node.
struct LinearFit {
    double intercept = 0.0;
    double slope = 0.0;
    std::vector<double> residuals;
    /// Row i is the gradient of r_i^2 w.r.t. (intercept, slope):
    /// (-2 r_i, -2 r_i x_i).
    ScoreMatrix scores;
    double rss = 0.0;

    std::size_t n() const noexcept { return residuals.size(); }
};

/// Closed-form OLS on mean-centered data.
/// Throws InsufficientData for n < 3 and DegenerateRegressor for constant x.
LinearFit fit_ols(std::span<const double> y, std::span<const double> x);

/// Score of a single observation: -2 r (1, x).
inline Eigen::Vector2d score_of(double residual, double x) {
    return {-2.0 * residual, -2.0 * residual * x};
}

/// Score contribution of observation i.
Eigen::Vector2d score_row(const LinearFit& fit, std::size_t i);

std::vector<double> predict(const LinearFit& fit, std::span<const double> x);
std::vector<double> predict(double intercept, double slope, std::span<const double> x);

} // namespace urp
