#include "urp/transform.hpp"

#include "urp/errors.hpp"

#include <algorithm>
#include <string>

namespace urp {

std::string_view to_string(SplitMode mode) noexcept {
    switch (mode) {
    case SplitMode::lin: return "lin";
    case SplitMode::cat: return "cat";
    case SplitMode::max: return "max";
    }
    return "?";
}

SplitMode split_mode_from_string(std::string_view s) {
    if (s == "lin") return SplitMode::lin;
    if (s == "cat") return SplitMode::cat;
    if (s == "max") return SplitMode::max;
    throw UnsupportedConfiguration("unknown split mode '" + std::string(s) + "' (lin, cat, max)");
}

Eigen::MatrixXd dichotomize_values(const Eigen::MatrixXd& values) {
    return (values.array() >= 0.0).cast<double>().matrix();
}

GofMatrix make_gof(const LinearFit& fit, bool use_scores, bool dichotomize) {
    GofMatrix gof;
    if (use_scores) {
        gof.values = fit.scores;
    } else {
        gof.values = Eigen::Map<const Eigen::VectorXd>(fit.residuals.data(),
                                                       static_cast<Eigen::Index>(fit.n()));
    }
    if (dichotomize) {
        gof.values = dichotomize_values(gof.values);
        gof.dichotomized = true;
    }
    return gof;
}

int bin_of(double v, const std::vector<double>& breaks) noexcept {
    const auto it = std::lower_bound(breaks.begin(), breaks.end(), v);
    return static_cast<int>(it - breaks.begin());
}

namespace {

// One-hot over `bins` groups, dropping groups with no observations.
Eigen::MatrixXd one_hot_nonempty(const std::vector<int>& group, int bins, std::vector<int>& kept) {
    std::vector<int> count(static_cast<std::size_t>(bins), 0);
    for (const int g : group) ++count[static_cast<std::size_t>(g)];
    std::vector<int> column(static_cast<std::size_t>(bins), -1);
    kept.clear();
    for (int b = 0; b < bins; ++b) {
        if (count[static_cast<std::size_t>(b)] > 0) {
            column[static_cast<std::size_t>(b)] = static_cast<int>(kept.size());
            kept.push_back(b);
        }
    }
    Eigen::MatrixXd design = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(group.size()),
                                                   static_cast<Eigen::Index>(kept.size()));
    for (std::size_t i = 0; i < group.size(); ++i) {
        design(static_cast<Eigen::Index>(i), column[static_cast<std::size_t>(group[i])]) = 1.0;
    }
    return design;
}

SplitTransform categorize_numeric(const SplitColumn& col) {
    const Quartiles q = empirical_quartiles(col);
    std::vector<double> breaks = {q.q1, q.q2, q.q3};
    breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());

    std::vector<int> group(col.values.size());
    for (std::size_t i = 0; i < group.size(); ++i) group[i] = bin_of(col.values[i], breaks);

    SplitTransform t;
    t.mode = SplitMode::cat;
    std::vector<int> kept;
    t.design = one_hot_nonempty(group, static_cast<int>(breaks.size()) + 1, kept);
    if (kept.size() < 2) {
        throw DegenerateColumn("constant column '" + col.name + "' has no association structure");
    }
    // Keep the break closing each nonempty bin except the last one.
    for (std::size_t k = 0; k + 1 < kept.size(); ++k) {
        t.bin_breaks.push_back(breaks[static_cast<std::size_t>(kept[k])]);
    }
    return t;
}

} // namespace

SplitTransform make_split_transform(const SplitColumn& col, SplitMode mode, int min_segment) {
    const std::size_t n = col.size();
    if (!col.is_numeric()) {
        if (mode != SplitMode::cat) {
            throw DataError("split mode '" + std::string(to_string(mode)) +
                            "' needs a numeric column ('" + col.name + "')");
        }
        SplitTransform t;
        t.mode = SplitMode::cat;
        std::vector<int> kept;
        t.design = one_hot_nonempty(col.codes, static_cast<int>(col.levels.size()), kept);
        if (kept.size() < 2) {
            throw DegenerateColumn("column '" + col.name + "' has a single observed level");
        }
        return t;
    }

    switch (mode) {
    case SplitMode::lin: {
        if (std::all_of(col.values.begin(), col.values.end(), [&](double v) { return v == col.values.front(); })) {
            throw DegenerateColumn("constant column '" + col.name + "' has no association structure");
        }
        SplitTransform t;
        t.mode = SplitMode::lin;
        t.design = Eigen::Map<const Eigen::VectorXd>(col.values.data(), static_cast<Eigen::Index>(n));
        return t;
    }
    case SplitMode::cat:
        if (n < 4) throw DegenerateColumn("column '" + col.name + "' is too short to categorize");
        return categorize_numeric(col);
    case SplitMode::max: {
        if (min_segment < 1) throw UnsupportedConfiguration("min_segment must be at least 1");
        std::vector<double> sorted = col.values;
        std::sort(sorted.begin(), sorted.end());
        SplitTransform t;
        t.mode = SplitMode::max;
        const auto m = static_cast<std::size_t>(min_segment);
        for (std::size_t i = 0; i + 1 < n; ++i) {
            if (sorted[i] == sorted[i + 1]) continue;
            const std::size_t left = i + 1;
            if (left >= m && n - left >= m) t.candidate_splits.push_back(sorted[i]);
        }
        if (t.candidate_splits.empty()) {
            throw DegenerateColumn("column '" + col.name + "' has no admissible split point");
        }
        t.design.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(t.candidate_splits.size()));
        for (std::size_t p = 0; p < t.candidate_splits.size(); ++p) {
            for (std::size_t i = 0; i < n; ++i) {
                t.design(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(p)) =
                    col.values[i] > t.candidate_splits[p] ? 1.0 : 0.0;
            }
        }
        return t;
    }
    }
    throw UnsupportedConfiguration("unknown split mode");
}

} // namespace urp
