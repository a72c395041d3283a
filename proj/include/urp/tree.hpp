#pragma once

#include "urp/dataset.hpp"
#include "urp/inference.hpp"
#include "urp/linmod.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace urp {

/// Binary split of a node. Numeric: value <= point goes left. Categorical:
/// level labels in left_levels go left, codes in right_levels go right, and levels
/// never seen in the node follow the larger child.
struct Split {
    std::size_t variable = 0;
    std::string name;
    ColumnKind kind = ColumnKind::numeric;
    double point = 0.0;
    std::vector<std::string> left_levels;
    std::vector<std::string> right_levels;
    bool unseen_left = true;

    bool goes_left(const SplitColumn& col, std::size_t row) const;
};

struct GrowControl {
    double alpha = 0.05;
    int min_node_size = 20;
    /// 0 selects the strategy's value (or its per-node default).
    int min_segment = 0;
    int max_depth = 5;
    bool prepruning = true;
};

struct TreeNode {
    int id = 0;
    int depth = 0;
    std::size_t n_node = 0;
    double intercept = 0.0;
    double slope = 0.0;
    double rss = 0.0;
    /// OLS was not identifiable (n < 3 or constant regressor); the node
    /// predicts the mean response and is terminal.
    bool model_degenerate = false;
    std::vector<TestOutcome> outcomes;
    std::optional<Split> split;
    std::vector<TreeNode> children; // empty or {left, right}
    /// Training rows (indices into the data the tree was grown on). Not
    /// serialized.
    std::vector<std::size_t> rows;

    bool is_leaf() const noexcept { return children.empty(); }
};

struct SplitSearch {
    Split split;
    double total_rss = 0.0;
};

/// Exhaustive search for the split of `col` minimizing the summed child RSS.
/// Numeric candidates are midpoints between consecutive distinct values;
/// categorical candidates are all binary partitions of the observed levels
/// (at most 10). Both children need min_node_size rows and a non-constant
/// regressor. Ties go to the smallest point / first partition enumerated.
std::optional<SplitSearch> best_split_point(std::span<const double> y, std::span<const double> x,
                                            const SplitColumn& col, int min_node_size);

TreeNode grow(const Dataset& data, const StrategyConfig& strategy, const GrowControl& control);

/// Assigns pre-order ids starting at 0.
void renumber(TreeNode& root);

/// Leaf id of every row of `data`; split variables are matched by name.
std::vector<int> partition_labels(const TreeNode& tree, const Dataset& data);

/// Leaf-model prediction for every row of `data`.
std::vector<double> predict_tree(const TreeNode& tree, const Dataset& data);

std::size_t count_leaves(const TreeNode& tree);
int tree_depth(const TreeNode& tree);
double leaf_rss(const TreeNode& tree);
std::vector<const TreeNode*> leaves(const TreeNode& tree);

/// Plain-text rendering of the tree, one node per line.
std::string format_tree(const TreeNode& tree);

} // namespace urp
