#include "urp/linmod.hpp"

#include "urp/errors.hpp"

#include <stdexcept>
#include <string>

namespace urp {

LinearFit fit_ols(std::span<const double> y, std::span<const double> x) {
    const std::size_t n = y.size();
    if (x.size() != n) throw DataError("fit_ols: y and x lengths differ");
    if (n < 3) throw InsufficientData("fit_ols needs at least 3 observations, got " + std::to_string(n));

    double xbar = 0.0, ybar = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        xbar += x[i];
        ybar += y[i];
    }
    xbar /= static_cast<double>(n);
    ybar /= static_cast<double>(n);

    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = x[i] - xbar;
        sxx += dx * dx;
        sxy += dx * (y[i] - ybar);
    }
    if (!(sxx > 0.0)) throw DegenerateRegressor("fit_ols: regressor is constant");

    LinearFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = ybar - fit.slope * xbar;
    fit.residuals.resize(n);
    fit.scores.resize(static_cast<Eigen::Index>(n), 2);
    for (std::size_t i = 0; i < n; ++i) {
        // Centered form keeps the residuals orthogonal to (1, x) to rounding.
        const double r = (y[i] - ybar) - fit.slope * (x[i] - xbar);
        fit.residuals[i] = r;
        fit.rss += r * r;
        const auto row = static_cast<Eigen::Index>(i);
        fit.scores.row(row) = score_of(r, x[i]).transpose();
    }
    return fit;
}

Eigen::Vector2d score_row(const LinearFit& fit, std::size_t i) {
    if (i >= fit.n()) throw std::out_of_range("score_row: index out of range");
    return fit.scores.row(static_cast<Eigen::Index>(i)).transpose();
}

std::vector<double> predict(double intercept, double slope, std::span<const double> x) {
    std::vector<double> out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = intercept + slope * x[i];
    return out;
}

std::vector<double> predict(const LinearFit& fit, std::span<const double> x) {
    return predict(fit.intercept, fit.slope, x);
}

} // namespace urp
