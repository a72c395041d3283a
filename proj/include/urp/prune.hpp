#pragma once

#include "urp/dataset.hpp"
#include "urp/inference.hpp"
#include "urp/rng.hpp"
#include "urp/tree.hpp"

#include <string>
#include <vector>

namespace urp {

struct CostComplexityStep {
    double alpha = 0.0;
    TreeNode subtree;
};

/// Weakest-link sequence: starts with (0, tree) and repeatedly collapses the
/// internal nodes minimizing (RSS(t) - RSS(T_t)) / (|leaves(T_t)| - 1).
std::vector<CostComplexityStep> cost_complexity_path(const TreeNode& tree);

/// Subtree of the path for complexity parameter `alpha` (last knot <= alpha).
const TreeNode& subtree_at(const std::vector<CostComplexityStep>& path, double alpha);

struct AlphaPathEntry {
    double alpha = 0.0;
    std::size_t leaves = 0;
    double cv_loss = 0.0;
    double cv_se = 0.0;
};

struct PruneResult {
    TreeNode tree;
    /// One entry per knot of the main tree's path, in increasing alpha.
    std::vector<AlphaPathEntry> alpha_path;
    double chosen_alpha = 0.0;
    int usable_folds = 0;
    std::vector<std::string> warnings;
};

struct CvOptions {
    int folds = 10;
    /// Pick the simplest subtree within one standard error of the minimum.
    bool one_se = false;
    int threads = 1;
};

/// Grows a large tree (pre-pruning off) and prunes it by k-fold
/// cross-validated cost-complexity.
PruneResult cv_prune(const Dataset& data, const StrategyConfig& strategy, const GrowControl& control,
                     const CvOptions& options, RngStream seed);

/// Cross-validated cost-complexity pruning of an existing tree grown on
/// `data`; fold trees are regrown with `strategy` and `control`.
PruneResult cv_prune_tree(const TreeNode& tree, const Dataset& data, const StrategyConfig& strategy,
                          const GrowControl& control, const CvOptions& options, RngStream seed);

/// Fold index of every observation: a seeded permutation dealt round-robin.
std::vector<int> assign_folds(std::size_t n, int folds, RngStream& rng);

enum class InfoCriterion { aic, bic };

/// Gaussian profile log-likelihood of a node with the given RSS.
double gaussian_loglik(double rss, std::size_t n);

/// Bottom-up collapse of every internal node whose subtree does not lower
/// the criterion. Each leaf costs 3 parameters (intercept, slope, variance)
/// and each split `split_df` more. BIC uses log of the node size.
TreeNode ic_prune(const TreeNode& tree, InfoCriterion criterion, double split_df = 1.0);

} // namespace urp
