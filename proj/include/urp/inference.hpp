#pragma once

#include "urp/dataset.hpp"
#include "urp/linmod.hpp"
#include "urp/transform.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace urp {

/// One point of the {residuals, scores} x {dichotomized, raw} x {lin, cat, max}
/// factorial of split-variable tests.
struct StrategyConfig {
    bool use_scores = true;
    bool dichotomize = false;
    SplitMode split_mode = SplitMode::lin;
    double alpha = 0.05;
    /// Minimal segment size for supLM trimming and max-mode split candidates;
    /// 0 selects max(10, ceil(0.1 n)) per node.
    int min_segment = 0;

    friend bool operator==(const StrategyConfig&, const StrategyConfig&) = default;
};

/// Effective minimal segment size for n observations.
int resolve_min_segment(int requested, std::size_t n) noexcept;

/// Named strategies: ctree, mob, guide, guide_scores and the aliases
/// ctree_max, ctree_cat, ctree_dich, mob_cat, mob_dich. An explicit triple
/// "residuals|scores:dich|raw:lin|cat|max" is accepted as well.
StrategyConfig strategy_from_name(std::string_view name);
std::vector<std::string> strategy_names();
/// Canonical triple spelling, e.g. "scores:raw:max".
std::string strategy_triple(const StrategyConfig& config);
/// Which engine family Table-4 style dispatch uses for a configuration.
std::string_view engine_name(const StrategyConfig& config);

enum class LimitLaw { chi2, normal, suplm, degenerate };
std::string_view to_string(LimitLaw law) noexcept;

struct TestOutcome {
    std::string variable;
    double statistic = 0.0;
    double p_value = 1.0;
    LimitLaw law = LimitLaw::degenerate;
    /// chi2: degrees of freedom; suplm: dimension K of the limiting bridge.
    std::optional<int> df;
    /// supLM trimming interval [from, to] as fractions of n.
    double trim_from = 0.0;
    double trim_to = 1.0;

    static TestOutcome degenerate(std::string variable);
    bool is_degenerate() const noexcept { return law == LimitLaw::degenerate; }
};

// ---------------------------------------------------------------------------
// Conditional inference (linear statistic under the permutation null)

struct ConditionalMoments {
    Eigen::VectorXd mu;
    Eigen::MatrixXd sigma;
};

/// vec(sum_i g_i h_i^T), column-major: entry p + q * P.
Eigen::VectorXd linear_statistic(const Eigen::MatrixXd& h, const Eigen::MatrixXd& g);
Eigen::VectorXd linear_statistic(const GofMatrix& gof, const SplitTransform& g);

/// Permutation moments of the linear statistic (unit weights).
ConditionalMoments conditional_moments(const Eigen::MatrixXd& h, const Eigen::MatrixXd& g);
ConditionalMoments conditional_moments(const GofMatrix& gof, const SplitTransform& g);

/// Quadratic form (t - mu)^T Sigma^+ (t - mu) with a chi2(rank) reference.
TestOutcome c_quad(const Eigen::VectorXd& t, const ConditionalMoments& m);

/// |t - mu| / sqrt(Sigma) with a two-sided normal reference; PQ must be 1.
TestOutcome c_max(const Eigen::VectorXd& t, const ConditionalMoments& m);

/// Moore-Penrose pseudo-inverse of a symmetric PSD matrix and its numerical
/// rank; eigenvalues below dim * lambda_max * 1e-12 count as zero.
struct PseudoInverse {
    Eigen::MatrixXd inverse;
    int rank = 0;
};
PseudoInverse symmetric_pinv(const Eigen::MatrixXd& a);

// ---------------------------------------------------------------------------
// Score fluctuation (supLM)

inline constexpr int kSupLmGrid = 1000;
inline constexpr int kSupLmReplicates = 20000;
inline constexpr std::uint64_t kSupLmSeed = 0x5AB1E5EED2019ull;

/// Cumulative sums of the decorrelated gof rows in the order of a split
/// variable. Rows are centered by their column means first, so the process
/// is tied down at both ends for any h (raw scores already have mean zero).
struct FluctuationProcess {
    /// (n + 1) x K, row 0 is zero; row i = V^{-1/2} n^{-1/2} sum_{l <= i} s_(l).
    Eigen::MatrixXd cumulative;
    Eigen::MatrixXd vhat_root_inv;
    /// Numerical rank of V-hat, the dimension of the limiting bridge.
    int rank = 0;
};

FluctuationProcess fluctuation_process(const Eigen::MatrixXd& h, const std::vector<std::size_t>& order);

struct SupLmResult {
    double statistic = 0.0;
    /// Number of observations in the left segment at the maximum.
    std::size_t argmax_index = 0;
    int rank = 0;
};

/// max over i in [m, n - m] of ((i/n)(1 - i/n))^{-1} ||W(i/n)||^2. When the
/// split values are given, only i between two distinct sorted values count.
/// Throws InsufficientData when the range is empty and DegenerateColumn when
/// V-hat is numerically zero or no admissible i is left.
SupLmResult suplm_statistic(const GofMatrix& gof, const SplitColumn& col, int min_segment);
SupLmResult suplm_statistic(const Eigen::MatrixXd& h, const std::vector<std::size_t>& order,
                            int min_segment, std::span<const double> values = {});

/// Monte Carlo p-value of the trimmed supLM functional of a K-dimensional
/// Brownian bridge (grid kSupLmGrid, kSupLmReplicates paths, seed
/// kSupLmSeed). Uses (exceedances + 1) / (replicates + 1).
double suplm_pvalue(double statistic, int k, int min_segment, std::size_t n);

/// Grid index where the trimmed window starts for a trimming fraction.
int suplm_grid_trim(int min_segment, std::size_t n) noexcept;

/// Sorted null sample of the supLM functional for (K, grid trim); cached.
const std::vector<double>& suplm_null_table(int k, int grid_trim);

// ---------------------------------------------------------------------------
// Contingency tables

struct ChiSquare {
    double statistic = 0.0;
    int df = 0;
};

/// Pearson X^2 of a 2 x P table of counts. Empty columns are dropped; an
/// empty row yields zero with zero degrees of freedom.
ChiSquare chisq_contingency(const Eigen::MatrixXd& observed);

/// Sum over gof columns of the 2 x P sign-by-bin X^2 statistics.
TestOutcome chisq_statistic(const GofMatrix& gof, const SplitTransform& g);

// ---------------------------------------------------------------------------
// Dispatch

/// Runs the configured test of one split variable against the node fit.
/// Degenerate columns yield a p-value of 1.
TestOutcome run_strategy(const StrategyConfig& config, const LinearFit& fit, const SplitColumn& col);

struct Selection {
    std::vector<TestOutcome> outcomes;
    /// argmin p-value among non-degenerate variables (ties: smallest index).
    std::optional<std::size_t> argmin;
    /// argmin, provided its p-value is below alpha.
    std::optional<std::size_t> chosen;
};

Selection select_variable(const StrategyConfig& config, const LinearFit& fit, const Dataset& data);
/// Selection from precomputed outcomes.
Selection select_from_outcomes(std::vector<TestOutcome> outcomes, double alpha);

} // namespace urp
