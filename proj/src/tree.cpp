#include "urp/tree.hpp"

#include "urp/errors.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>

namespace urp {

bool Split::goes_left(const SplitColumn& col, std::size_t row) const {
    if (kind == ColumnKind::numeric) {
        if (!col.is_numeric()) throw DataError("split variable '" + name + "' is not numeric in the data");
        return col.values.at(row) <= point;
    }
    if (col.is_numeric()) throw DataError("split variable '" + name + "' is not categorical in the data");
    const std::string& label = col.levels.at(static_cast<std::size_t>(col.codes.at(row)));
    if (std::find(left_levels.begin(), left_levels.end(), label) != left_levels.end()) return true;
    if (std::find(right_levels.begin(), right_levels.end(), label) != right_levels.end()) return false;
    return unseen_left;
}

namespace {

// Running sums of centered (x, y) for closed-form OLS RSS.
struct Moments {
    double n = 0, sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    double xmin = std::numeric_limits<double>::infinity();
    double xmax = -std::numeric_limits<double>::infinity();

    void add(double x, double y) {
        n += 1;
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        syy += y * y;
        xmin = std::min(xmin, x);
        xmax = std::max(xmax, x);
    }
    void merge(const Moments& o) {
        n += o.n;
        sx += o.sx;
        sy += o.sy;
        sxx += o.sxx;
        sxy += o.sxy;
        syy += o.syy;
        xmin = std::min(xmin, o.xmin);
        xmax = std::max(xmax, o.xmax);
    }
    bool identifiable() const { return n >= 3 && xmax > xmin; }
    double rss() const {
        const double cxx = sxx - sx * sx / n;
        const double cxy = sxy - sx * sy / n;
        const double cyy = syy - sy * sy / n;
        return std::max(0.0, cyy - cxy * cxy / cxx);
    }
};

double mean_of(std::span<const double> v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

std::optional<SplitSearch> best_numeric_split(std::span<const double> y, std::span<const double> x,
                                              const SplitColumn& col, std::size_t min_size) {
    const std::size_t n = y.size();
    const auto order = order_permutation(col.values);
    const double xm = mean_of(x);
    const double ym = mean_of(y);

    std::vector<Moments> suffix(n + 1);
    for (std::size_t k = n; k-- > 0;) {
        suffix[k] = suffix[k + 1];
        suffix[k].add(x[order[k]] - xm, y[order[k]] - ym);
    }

    std::optional<SplitSearch> best;
    Moments left;
    for (std::size_t k = 0; k + 1 < n; ++k) {
        left.add(x[order[k]] - xm, y[order[k]] - ym);
        const double zl = col.values[order[k]];
        const double zr = col.values[order[k + 1]];
        if (!(zl < zr)) continue;
        const std::size_t nl = k + 1;
        if (nl < min_size || n - nl < min_size) continue;
        const Moments& right = suffix[k + 1];
        if (!left.identifiable() || !right.identifiable()) continue;
        const double total = left.rss() + right.rss();
        if (!best || total < best->total_rss) {
            double point = zl + 0.5 * (zr - zl);
            if (!(point < zr)) point = zl;
            SplitSearch s;
            s.split.kind = ColumnKind::numeric;
            s.split.name = col.name;
            s.split.point = point;
            s.total_rss = total;
            best = std::move(s);
        }
    }
    return best;
}

std::optional<SplitSearch> best_categorical_split(std::span<const double> y, std::span<const double> x,
                                                  const SplitColumn& col, std::size_t min_size) {
    const double xm = mean_of(x);
    const double ym = mean_of(y);
    std::map<int, Moments> by_level;
    for (std::size_t i = 0; i < y.size(); ++i) by_level[col.codes[i]].add(x[i] - xm, y[i] - ym);
    std::vector<int> levels;
    std::vector<Moments> moments;
    for (const auto& [code, m] : by_level) {
        levels.push_back(code);
        moments.push_back(m);
    }
    const std::size_t count = levels.size();
    if (count < 2) return std::nullopt;
    if (count > 10) {
        throw UnsupportedConfiguration("categorical split search supports at most 10 levels ('" +
                                       col.name + "' has " + std::to_string(count) + ")");
    }

    std::optional<SplitSearch> best;
    const unsigned full = (1u << (count - 1)) - 1u;
    for (unsigned mask = 0; mask < full; ++mask) {
        // Level 0 is always on the left; bit b puts level b + 1 on the left.
        Moments left = moments[0];
        Moments right;
        std::vector<std::string> left_labels = {col.levels[static_cast<std::size_t>(levels[0])]};
        std::vector<std::string> right_labels;
        for (std::size_t b = 1; b < count; ++b) {
            if (mask & (1u << (b - 1))) {
                left.merge(moments[b]);
                left_labels.push_back(col.levels[static_cast<std::size_t>(levels[b])]);
            } else {
                right.merge(moments[b]);
                right_labels.push_back(col.levels[static_cast<std::size_t>(levels[b])]);
            }
        }
        if (left.n < static_cast<double>(min_size) || right.n < static_cast<double>(min_size)) continue;
        if (!left.identifiable() || !right.identifiable()) continue;
        const double total = left.rss() + right.rss();
        if (!best || total < best->total_rss) {
            SplitSearch s;
            s.split.kind = ColumnKind::categorical;
            s.split.name = col.name;
            s.split.left_levels = std::move(left_labels);
            s.split.right_levels = std::move(right_labels);
            s.split.unseen_left = left.n >= right.n;
            s.total_rss = total;
            best = std::move(s);
        }
    }
    return best;
}

} // namespace

std::optional<SplitSearch> best_split_point(std::span<const double> y, std::span<const double> x,
                                            const SplitColumn& col, int min_node_size) {
    if (y.size() != x.size() || col.size() != y.size()) {
        throw DataError("best_split_point: column lengths differ");
    }
    const auto min_size = static_cast<std::size_t>(std::max(3, min_node_size));
    if (y.size() < 2 * min_size) return std::nullopt;
    return col.is_numeric() ? best_numeric_split(y, x, col, min_size)
                            : best_categorical_split(y, x, col, min_size);
}

// ---------------------------------------------------------------------------

namespace {

void fit_node(TreeNode& node, const Dataset& sub) {
    try {
        const LinearFit fit = fit_ols(sub.y(), sub.x());
        node.intercept = fit.intercept;
        node.slope = fit.slope;
        node.rss = fit.rss;
    } catch (const InsufficientData&) {
        node.model_degenerate = true;
    } catch (const DegenerateRegressor&) {
        node.model_degenerate = true;
    }
    if (node.model_degenerate) {
        const double ym = mean_of(sub.y());
        node.intercept = ym;
        node.slope = 0.0;
        node.rss = 0.0;
        for (const double v : sub.y()) node.rss += (v - ym) * (v - ym);
    }
}

struct Grower {
    const Dataset& data;
    StrategyConfig strategy;
    GrowControl control;

    TreeNode grow_node(std::vector<std::size_t> rows, int depth) const {
        TreeNode node;
        node.depth = depth;
        node.n_node = rows.size();
        const Dataset sub = data.subset(rows);
        node.rows = std::move(rows);
        fit_node(node, sub);

        const auto min_size = static_cast<std::size_t>(std::max(3, control.min_node_size));
        if (node.model_degenerate || depth >= control.max_depth || node.n_node < 2 * min_size) {
            return node;
        }

        const LinearFit fit = fit_ols(sub.y(), sub.x());
        Selection sel = select_variable(strategy, fit, sub);
        node.outcomes = std::move(sel.outcomes);
        const auto var = control.prepruning ? sel.chosen : sel.argmin;
        if (!var) return node;

        std::optional<SplitSearch> found;
        try {
            found = best_split_point(sub.y(), sub.x(), sub.z(*var), control.min_node_size);
        } catch (const UnsupportedConfiguration&) {
            return node;
        }
        if (!found) return node;

        Split split = std::move(found->split);
        split.variable = *var;
        std::vector<std::size_t> left_rows, right_rows;
        const SplitColumn& col = sub.z(*var);
        for (std::size_t i = 0; i < node.n_node; ++i) {
            (split.goes_left(col, i) ? left_rows : right_rows).push_back(node.rows[i]);
        }
        node.split = std::move(split);
        node.children.push_back(grow_node(std::move(left_rows), depth + 1));
        node.children.push_back(grow_node(std::move(right_rows), depth + 1));
        return node;
    }
};

} // namespace

TreeNode grow(const Dataset& data, const StrategyConfig& strategy, const GrowControl& control) {
    if (control.max_depth < 1) throw UnsupportedConfiguration("max_depth must be at least 1");
    if (control.min_node_size < 3) throw UnsupportedConfiguration("min_node_size must be at least 3");
    StrategyConfig cfg = strategy;
    cfg.alpha = control.alpha;
    if (control.min_segment > 0) cfg.min_segment = control.min_segment;
    const Grower grower{data, cfg, control};
    std::vector<std::size_t> rows(data.n());
    std::iota(rows.begin(), rows.end(), std::size_t{0});
    TreeNode root = grower.grow_node(std::move(rows), 0);
    renumber(root);
    return root;
}

void renumber(TreeNode& root) {
    int next = 0;
    std::function<void(TreeNode&)> visit = [&](TreeNode& node) {
        node.id = next++;
        for (auto& child : node.children) visit(child);
    };
    visit(root);
}

namespace {

// Split variable indices of `data` for every split name used in the tree.
std::map<std::string, std::size_t> resolve_split_columns(const TreeNode& tree, const Dataset& data) {
    std::map<std::string, std::size_t> index;
    std::function<void(const TreeNode&)> visit = [&](const TreeNode& node) {
        if (node.split && !index.contains(node.split->name)) {
            const std::size_t j = data.split_index(node.split->name);
            const bool numeric = data.z(j).is_numeric();
            if (numeric != (node.split->kind == ColumnKind::numeric)) {
                throw DataError("split variable '" + node.split->name + "' has a different kind in the data");
            }
            index.emplace(node.split->name, j);
        }
        for (const auto& child : node.children) visit(child);
    };
    visit(tree);
    return index;
}

const TreeNode& route(const TreeNode& root, const Dataset& data, std::size_t row,
                      const std::map<std::string, std::size_t>& index) {
    const TreeNode* node = &root;
    while (!node->is_leaf()) {
        const Split& s = *node->split;
        const SplitColumn& col = data.z(index.at(s.name));
        const bool left = s.goes_left(col, row);
        node = &node->children[left ? 0 : 1];
    }
    return *node;
}

} // namespace

std::vector<int> partition_labels(const TreeNode& tree, const Dataset& data) {
    const auto index = resolve_split_columns(tree, data);
    std::vector<int> labels(data.n());
    for (std::size_t i = 0; i < data.n(); ++i) labels[i] = route(tree, data, i, index).id;
    return labels;
}

std::vector<double> predict_tree(const TreeNode& tree, const Dataset& data) {
    const auto index = resolve_split_columns(tree, data);
    std::vector<double> out(data.n());
    for (std::size_t i = 0; i < data.n(); ++i) {
        const TreeNode& leaf = route(tree, data, i, index);
        out[i] = leaf.intercept + leaf.slope * data.x()[i];
    }
    return out;
}

std::size_t count_leaves(const TreeNode& tree) {
    if (tree.is_leaf()) return 1;
    std::size_t total = 0;
    for (const auto& c : tree.children) total += count_leaves(c);
    return total;
}

int tree_depth(const TreeNode& tree) {
    int d = 0;
    for (const auto& c : tree.children) d = std::max(d, 1 + tree_depth(c));
    return d;
}

double leaf_rss(const TreeNode& tree) {
    if (tree.is_leaf()) return tree.rss;
    double total = 0.0;
    for (const auto& c : tree.children) total += leaf_rss(c);
    return total;
}

std::vector<const TreeNode*> leaves(const TreeNode& tree) {
    std::vector<const TreeNode*> out;
    std::function<void(const TreeNode&)> visit = [&](const TreeNode& node) {
        if (node.is_leaf()) out.push_back(&node);
        for (const auto& c : node.children) visit(c);
    };
    visit(tree);
    return out;
}

std::string format_tree(const TreeNode& tree) {
    std::ostringstream os;
    os.setf(std::ios::fixed);
    os.precision(4);
    std::function<void(const TreeNode&, const std::string&)> visit = [&](const TreeNode& node,
                                                                       const std::string& label) {
        os << std::string(static_cast<std::size_t>(node.depth) * 2, ' ') << "[" << node.id << "] " << label
           << "n=" << node.n_node << " intercept=" << node.intercept << " slope=" << node.slope
           << " rss=" << node.rss;
        if (!node.outcomes.empty()) {
            os << " p={";
            for (std::size_t j = 0; j < node.outcomes.size(); ++j) {
                os << (j ? ", " : "") << node.outcomes[j].variable << ": ";
                os.unsetf(std::ios::fixed);
                os.precision(3);
                os << node.outcomes[j].p_value;
                os.setf(std::ios::fixed);
                os.precision(4);
            }
            os << "}";
        }
        os << "\n";
        if (node.is_leaf()) return;
        const Split& s = *node.split;
        std::ostringstream left, right;
        if (s.kind == ColumnKind::numeric) {
            left << s.name << " <= " << s.point << ": ";
            right << s.name << " > " << s.point << ": ";
        } else {
            left << s.name << " in {";
            for (std::size_t i = 0; i < s.left_levels.size(); ++i) left << (i ? "," : "") << s.left_levels[i];
            left << "}: ";
            right << s.name << " in {";
            for (std::size_t i = 0; i < s.right_levels.size(); ++i) right << (i ? "," : "") << s.right_levels[i];
            right << "}: ";
        }
        visit(node.children[0], left.str());
        visit(node.children[1], right.str());
    };
    visit(tree, "");
    return os.str();
}

} // namespace urp
