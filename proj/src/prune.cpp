#include "urp/prune.hpp"

#include "urp/errors.hpp"
#include "urp/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <numeric>

namespace urp {

namespace {

struct LinkStats {
    double rss_subtree = 0.0;
    std::size_t leaves = 0;
};

LinkStats link_stats(const TreeNode& node) {
    if (node.is_leaf()) return {node.rss, 1};
    LinkStats s;
    for (const auto& c : node.children) {
        const LinkStats cs = link_stats(c);
        s.rss_subtree += cs.rss_subtree;
        s.leaves += cs.leaves;
    }
    return s;
}

void collapse(TreeNode& node) {
    node.children.clear();
    node.split.reset();
}

// Smallest weakest-link value g(t) over internal nodes.
double min_link(const TreeNode& node) {
    if (node.is_leaf()) return std::numeric_limits<double>::infinity();
    const LinkStats s = link_stats(node);
    double g = (node.rss - s.rss_subtree) / static_cast<double>(s.leaves - 1);
    for (const auto& c : node.children) g = std::min(g, min_link(c));
    return g;
}

void collapse_links(TreeNode& node, double threshold) {
    if (node.is_leaf()) return;
    const LinkStats s = link_stats(node);
    const double g = (node.rss - s.rss_subtree) / static_cast<double>(s.leaves - 1);
    if (g <= threshold) {
        collapse(node);
        return;
    }
    for (auto& c : node.children) collapse_links(c, threshold);
}

} // namespace

std::vector<CostComplexityStep> cost_complexity_path(const TreeNode& tree) {
    std::vector<CostComplexityStep> path;
    path.push_back({0.0, tree});
    TreeNode current = tree;
    double last_alpha = 0.0;
    while (!current.is_leaf()) {
        const double g = min_link(current);
        // Links tied with the weakest one (to rounding) collapse together.
        const double threshold = g + 1e-12 * std::max(1.0, std::fabs(g));
        collapse_links(current, threshold);
        last_alpha = std::max(last_alpha, g);
        path.push_back({last_alpha, current});
    }
    return path;
}

const TreeNode& subtree_at(const std::vector<CostComplexityStep>& path, double alpha) {
    const TreeNode* best = &path.front().subtree;
    for (const auto& step : path) {
        if (step.alpha <= alpha) best = &step.subtree;
    }
    return *best;
}

std::vector<int> assign_folds(std::size_t n, int folds, RngStream& rng) {
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    for (std::size_t i = n; i > 1; --i) {
        const auto j = static_cast<std::size_t>(rng.below(i));
        std::swap(perm[i - 1], perm[j]);
    }
    std::vector<int> fold(n);
    for (std::size_t i = 0; i < n; ++i) fold[perm[i]] = static_cast<int>(i % static_cast<std::size_t>(folds));
    return fold;
}

PruneResult cv_prune_tree(const TreeNode& tree, const Dataset& data, const StrategyConfig& strategy,
                          const GrowControl& control, const CvOptions& options, RngStream seed) {
    if (options.folds < 2) throw UnsupportedConfiguration("cross-validation needs at least 2 folds");
    const std::size_t n = data.n();
    if (static_cast<std::size_t>(options.folds) > n) {
        throw InsufficientData("more folds than observations");
    }
    GrowControl fold_control = control;
    fold_control.prepruning = false;

    const auto path = cost_complexity_path(tree);
    const std::size_t knots = path.size();
    std::vector<double> beta(knots);
    for (std::size_t k = 0; k + 1 < knots; ++k) beta[k] = std::sqrt(path[k].alpha * path[k + 1].alpha);
    beta[knots - 1] = std::numeric_limits<double>::infinity();

    const std::vector<int> fold = assign_folds(n, options.folds, seed);
    const auto nfolds = static_cast<std::size_t>(options.folds);

    // Per fold: squared error of every held-out row at every knot.
    struct FoldResult {
        bool usable = false;
        std::vector<std::size_t> test_rows;
        std::vector<std::vector<double>> sq_error; // [knot][test row]
    };
    std::vector<FoldResult> results(nfolds);
    parallel_for(nfolds, options.threads, [&](std::size_t f) {
        std::vector<std::size_t> train, test;
        for (std::size_t i = 0; i < n; ++i) (fold[i] == static_cast<int>(f) ? test : train).push_back(i);
        FoldResult& r = results[f];
        r.test_rows = test;
        if (train.size() < 3 || test.empty()) return;
        const Dataset train_data = data.subset(train);
        const TreeNode fold_tree = grow(train_data, strategy, fold_control);
        if (fold_tree.model_degenerate) return;
        const auto fold_path = cost_complexity_path(fold_tree);
        const Dataset test_data = data.subset(test);
        r.sq_error.resize(knots);
        for (std::size_t k = 0; k < knots; ++k) {
            const auto pred = predict_tree(subtree_at(fold_path, beta[k]), test_data);
            r.sq_error[k].resize(test.size());
            for (std::size_t i = 0; i < test.size(); ++i) {
                const double e = test_data.y()[i] - pred[i];
                r.sq_error[k][i] = e * e;
            }
        }
        r.usable = true;
    });

    PruneResult out;
    std::size_t evaluated = 0;
    for (std::size_t f = 0; f < nfolds; ++f) {
        if (results[f].usable) {
            ++out.usable_folds;
            evaluated += results[f].test_rows.size();
        } else {
            out.warnings.push_back("fold " + std::to_string(f) + " skipped: degenerate training fit");
        }
    }
    if (out.usable_folds * 2 < options.folds || evaluated == 0) {
        throw InsufficientData("cross-validation: only " + std::to_string(out.usable_folds) + " of " +
                               std::to_string(options.folds) + " folds usable");
    }

    for (std::size_t k = 0; k < knots; ++k) {
        double sum = 0.0, sumsq = 0.0;
        for (const auto& r : results) {
            if (!r.usable) continue;
            for (const double e : r.sq_error[k]) {
                sum += e;
                sumsq += e * e;
            }
        }
        const auto m = static_cast<double>(evaluated);
        const double mean = sum / m;
        const double var = m > 1 ? std::max(0.0, (sumsq - m * mean * mean) / (m - 1.0)) : 0.0;
        out.alpha_path.push_back({path[k].alpha, count_leaves(path[k].subtree), mean, std::sqrt(var / m)});
    }

    // Ties favour the larger alpha (smaller tree).
    std::size_t best = 0;
    for (std::size_t k = 1; k < knots; ++k) {
        if (out.alpha_path[k].cv_loss <= out.alpha_path[best].cv_loss) best = k;
    }
    if (options.one_se) {
        const double limit = out.alpha_path[best].cv_loss + out.alpha_path[best].cv_se;
        for (std::size_t k = best; k < knots; ++k) {
            if (out.alpha_path[k].cv_loss <= limit) best = k;
        }
    }
    out.chosen_alpha = path[best].alpha;
    out.tree = path[best].subtree;
    return out;
}

PruneResult cv_prune(const Dataset& data, const StrategyConfig& strategy, const GrowControl& control,
                     const CvOptions& options, RngStream seed) {
    GrowControl grow_control = control;
    grow_control.prepruning = false;
    const TreeNode tree = grow(data, strategy, grow_control);
    return cv_prune_tree(tree, data, strategy, grow_control, options, seed);
}

double gaussian_loglik(double rss, std::size_t n) {
    const auto nd = static_cast<double>(n);
    const double floor = std::numeric_limits<double>::min();
    return -0.5 * nd * (std::log(2.0 * std::numbers::pi * std::max(rss, floor) / nd) + 1.0);
}

namespace {

struct IcStats {
    double loglik = 0.0;
    std::size_t leaves = 0;
};

IcStats ic_stats(const TreeNode& node) {
    if (node.is_leaf()) return {gaussian_loglik(node.rss, node.n_node), 1};
    IcStats s;
    for (const auto& c : node.children) {
        const IcStats cs = ic_stats(c);
        s.loglik += cs.loglik;
        s.leaves += cs.leaves;
    }
    return s;
}

void ic_prune_node(TreeNode& node, InfoCriterion criterion, double split_df) {
    if (node.is_leaf()) return;
    for (auto& c : node.children) ic_prune_node(c, criterion, split_df);
    const double penalty =
        criterion == InfoCriterion::aic ? 2.0 : std::log(static_cast<double>(node.n_node));
    const IcStats sub = ic_stats(node);
    const auto leaves = static_cast<double>(sub.leaves);
    const double params_sub = 3.0 * leaves + split_df * (leaves - 1.0);
    const double ic_sub = -2.0 * sub.loglik + penalty * params_sub;
    const double ic_leaf = -2.0 * gaussian_loglik(node.rss, node.n_node) + penalty * 3.0;
    if (ic_sub >= ic_leaf) collapse(node);
}

} // namespace

TreeNode ic_prune(const TreeNode& tree, InfoCriterion criterion, double split_df) {
    TreeNode out = tree;
    ic_prune_node(out, criterion, split_df);
    return out;
}

} // namespace urp
