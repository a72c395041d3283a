#pragma once

#include "urp/dataset.hpp"
#include "urp/linmod.hpp"

#include <Eigen/Dense>

#include <string_view>
#include <vector>

namespace urp {

/// Observation-wise goodness-of-fit measure h(Y): n x K with K = 1
/// (residuals) or K = 2 (scores), optionally replaced by the indicator of
/// nonnegativity.
struct GofMatrix {
    Eigen::MatrixXd values;
    bool dichotomized = false;

    Eigen::Index rows() const noexcept { return values.rows(); }
    Eigen::Index k() const noexcept { return values.cols(); }
};

enum class SplitMode { lin, cat, max };

std::string_view to_string(SplitMode mode) noexcept;
SplitMode split_mode_from_string(std::string_view s);

/// Influence transformation g(Z) of one split variable.
struct SplitTransform {
    SplitMode mode = SplitMode::lin;
    /// n x P design.
    Eigen::MatrixXd design;
    /// Quartile breaks actually used (cat mode on a numeric column).
    std::vector<double> bin_breaks;
    /// Split values c_p; column p of the design is 1{z > c_p} (max mode).
    std::vector<double> candidate_splits;

    Eigen::Index p() const noexcept { return design.cols(); }
};

GofMatrix make_gof(const LinearFit& fit, bool use_scores, bool dichotomize);

/// Indicator 1{h >= 0}, applied elementwise.
Eigen::MatrixXd dichotomize_values(const Eigen::MatrixXd& values);

/// Builds g(Z). Categorical columns are one-hot over their observed levels
/// and only accept mode=cat (DataError otherwise). Throws DegenerateColumn
/// when the column has no association structure: fewer than two nonempty
/// bins, or no admissible split in max mode.
SplitTransform make_split_transform(const SplitColumn& col, SplitMode mode, int min_segment);

/// Bin index of v for breaks (-inf, b0], (b0, b1], ..., (b_last, inf).
int bin_of(double v, const std::vector<double>& breaks) noexcept;

} // namespace urp
