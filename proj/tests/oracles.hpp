#pragma once

// Brute-force reference implementations shared by unit and acceptance tests.
// Each one recomputes a quantity from its definition without calling the
// library code it is compared against.

#include "urp/tree.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <set>
#include <span>
#include <vector>

namespace oracle {

/// Every value of vec(sum_i g_i h_{pi(i)}^T) over all n! permutations pi.
inline std::vector<Eigen::VectorXd> permutation_statistics(const Eigen::MatrixXd& h, const Eigen::MatrixXd& g) {
    const auto n = static_cast<int>(h.rows());
    const auto K = h.cols(), P = g.cols();
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::vector<Eigen::VectorXd> out;
    do {
        Eigen::VectorXd t = Eigen::VectorXd::Zero(P * K);
        for (int i = 0; i < n; ++i)
            for (Eigen::Index q = 0; q < K; ++q)
                for (Eigen::Index p = 0; p < P; ++p) t(p + q * P) += g(i, p) * h(perm[i], q);
        out.push_back(t);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return out;
}

struct Moments {
    Eigen::VectorXd mean;
    Eigen::MatrixXd cov;
};

inline Moments moments_of(const std::vector<Eigen::VectorXd>& ts) {
    const auto d = ts.front().size();
    Moments m{Eigen::VectorXd::Zero(d), Eigen::MatrixXd::Zero(d, d)};
    for (const auto& t : ts) m.mean += t;
    m.mean /= static_cast<double>(ts.size());
    for (const auto& t : ts) m.cov += (t - m.mean) * (t - m.mean).transpose();
    m.cov /= static_cast<double>(ts.size());
    return m;
}

/// Pseudo-inverse via SVD (a different route than the library).
inline Eigen::MatrixXd pinv_svd(const Eigen::MatrixXd& a) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const auto& s = svd.singularValues();
    const double tol = 1e-9 * (s.size() > 0 ? s(0) : 0.0);
    Eigen::VectorXd inv = Eigen::VectorXd::Zero(s.size());
    for (Eigen::Index i = 0; i < s.size(); ++i)
        if (s(i) > tol) inv(i) = 1.0 / s(i);
    return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

/// Exact permutation p-value of the quadratic form: share of permutations
/// whose statistic is at least the observed one.
inline double permutation_pvalue_quad(const Eigen::MatrixXd& h, const Eigen::MatrixXd& g) {
    const auto ts = permutation_statistics(h, g);
    const Moments m = moments_of(ts);
    const Eigen::MatrixXd pinv = pinv_svd(m.cov);
    auto quad = [&](const Eigen::VectorXd& t) { return (t - m.mean).dot(pinv * (t - m.mean)); };
    const double observed = quad(ts.front()); // identity permutation comes first
    std::size_t hits = 0;
    for (const auto& t : ts) hits += quad(t) >= observed - 1e-9 * std::max(1.0, observed);
    return static_cast<double>(hits) / static_cast<double>(ts.size());
}

/// supLM statistic evaluated termwise from its definition:
/// max_{m <= i <= n-m} n / (i (n - i)) * S_i^T V^{-1} S_i / n, where S_i is
/// the partial sum of the centered rows in the given order and V the mean of
/// their outer products. Handles K = 1 and K = 2 with closed-form inverses.
struct SupLm {
    double statistic = -1.0;
    std::size_t argmax = 0;
};

inline SupLm suplm_termwise(const std::vector<std::vector<double>>& rows, const std::vector<std::size_t>& order,
                            std::size_t m) {
    const std::size_t n = rows.size();
    const std::size_t K = rows.front().size();
    std::vector<double> mean(K, 0.0);
    for (const auto& r : rows)
        for (std::size_t k = 0; k < K; ++k) mean[k] += r[k] / static_cast<double>(n);
    double v00 = 0, v01 = 0, v11 = 0;
    for (const auto& r : rows) {
        const double a = r[0] - mean[0];
        const double b = K > 1 ? r[1] - mean[1] : 0.0;
        v00 += a * a / static_cast<double>(n);
        v01 += a * b / static_cast<double>(n);
        v11 += b * b / static_cast<double>(n);
    }
    SupLm best;
    double s0 = 0, s1 = 0;
    for (std::size_t i = 1; i < n; ++i) {
        const auto& r = rows[order[i - 1]];
        s0 += r[0] - mean[0];
        if (K > 1) s1 += r[1] - mean[1];
        if (i < m || i > n - m) continue;
        double q;
        if (K == 1) {
            q = s0 * s0 / v00;
        } else {
            const double det = v00 * v11 - v01 * v01;
            q = (v11 * s0 * s0 - 2.0 * v01 * s0 * s1 + v00 * s1 * s1) / det;
        }
        const double t = static_cast<double>(i) / static_cast<double>(n);
        const double value = (q / static_cast<double>(n)) / (t * (1.0 - t));
        if (value > best.statistic) {
            best.statistic = value;
            best.argmax = i;
        }
    }
    return best;
}

/// Pearson X^2 written out cell by cell.
inline double pearson(const std::vector<std::vector<double>>& o) {
    const std::size_t r = o.size(), c = o.front().size();
    std::vector<double> rs(r, 0.0), cs(c, 0.0);
    double total = 0.0;
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < c; ++j) {
            rs[i] += o[i][j];
            cs[j] += o[i][j];
            total += o[i][j];
        }
    double x2 = 0.0;
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < c; ++j) {
            const double e = rs[i] * cs[j] / total;
            if (e > 0) x2 += (o[i][j] - e) * (o[i][j] - e) / e;
        }
    return x2;
}

/// RSS of an OLS line by the textbook normal equations.
inline double ols_rss(const std::vector<double>& y, const std::vector<double>& x) {
    const double n = static_cast<double>(y.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    const double b = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    const double a = (sy - b * sx) / n;
    double rss = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) rss += (y[i] - a - b * x[i]) * (y[i] - a - b * x[i]);
    return rss;
}

struct Cut {
    bool found = false;
    double point = 0.0;
    double rss = 0.0;
};

/// Tries every midpoint between distinct values, refitting both sides.
inline Cut best_cut(const std::vector<double>& y, const std::vector<double>& x, const std::vector<double>& z,
                    std::size_t min_size) {
    std::vector<double> values(z);
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());
    Cut best;
    for (std::size_t k = 0; k + 1 < values.size(); ++k) {
        // Midpoint written so that it stays strictly below the upper value.
        double c = values[k] + 0.5 * (values[k + 1] - values[k]);
        if (!(c < values[k + 1])) c = values[k];
        std::vector<double> yl, xl, yr, xr;
        for (std::size_t i = 0; i < y.size(); ++i) {
            if (z[i] <= c) {
                yl.push_back(y[i]);
                xl.push_back(x[i]);
            } else {
                yr.push_back(y[i]);
                xr.push_back(x[i]);
            }
        }
        if (yl.size() < min_size || yr.size() < min_size) continue;
        auto constant = [](const std::vector<double>& v) {
            return std::all_of(v.begin(), v.end(), [&](double e) { return e == v.front(); });
        };
        if (constant(xl) || constant(xr)) continue;
        const double rss = ols_rss(yl, xl) + ols_rss(yr, xr);
        if (!best.found || rss < best.rss - 1e-9 * std::max(1.0, best.rss)) {
            best = {true, c, rss};
        }
    }
    return best;
}

// --- pruning -----------------------------------------------------------------

inline void internal_ids(const urp::TreeNode& node, std::set<int>& out) {
    if (node.is_leaf()) return;
    out.insert(node.id);
    for (const auto& c : node.children) internal_ids(c, out);
}

/// A pruned subtree represented by the ids of its internal nodes, with its
/// leaf count and summed leaf RSS.
struct Pruned {
    std::set<int> internal;
    std::size_t leaves = 0;
    double rss = 0.0;
};

/// Every subtree obtained from `node` by collapsing internal nodes.
inline std::vector<Pruned> all_prunings(const urp::TreeNode& node) {
    std::vector<Pruned> out;
    out.push_back({{}, 1, node.rss});
    if (node.is_leaf()) return out;
    const auto left = all_prunings(node.children[0]);
    const auto right = all_prunings(node.children[1]);
    for (const auto& l : left)
        for (const auto& r : right) {
            Pruned p;
            p.internal = l.internal;
            p.internal.insert(r.internal.begin(), r.internal.end());
            p.internal.insert(node.id);
            p.leaves = l.leaves + r.leaves;
            p.rss = l.rss + r.rss;
            out.push_back(p);
        }
    return out;
}

/// Smallest subtree minimizing rss + alpha * leaves.
inline Pruned optimal_pruning(const std::vector<Pruned>& all, double alpha) {
    const Pruned* best = nullptr;
    for (const auto& p : all) {
        const double cost = p.rss + alpha * static_cast<double>(p.leaves);
        if (!best) {
            best = &p;
            continue;
        }
        const double bcost = best->rss + alpha * static_cast<double>(best->leaves);
        const double tol = 1e-12 * std::max(1.0, std::fabs(bcost));
        if (cost < bcost - tol || (std::fabs(cost - bcost) <= tol && p.leaves < best->leaves)) best = &p;
    }
    return *best;
}

/// Values of alpha where the optimal subtree changes. Candidates are the
/// pairwise break-even points; a candidate is a knot when the minimizers at
/// the midpoints on either side of it differ.
inline std::vector<double> pruning_knots(const std::vector<Pruned>& all) {
    std::vector<double> cand;
    for (const auto& a : all)
        for (const auto& b : all)
            if (a.leaves > b.leaves) {
                const double c = (b.rss - a.rss) / static_cast<double>(a.leaves - b.leaves);
                if (c > 0.0) cand.push_back(c);
            }
    std::sort(cand.begin(), cand.end());
    std::vector<double> distinct;
    for (const double c : cand)
        if (distinct.empty() || c - distinct.back() > 1e-12 * c) distinct.push_back(c);
    std::vector<double> knots;
    for (std::size_t i = 0; i < distinct.size(); ++i) {
        const double below = i == 0 ? 0.5 * distinct[0] : 0.5 * (distinct[i - 1] + distinct[i]);
        const double above = i + 1 < distinct.size() ? 0.5 * (distinct[i] + distinct[i + 1]) : 2.0 * distinct[i];
        if (optimal_pruning(all, below).internal != optimal_pruning(all, above).internal) knots.push_back(distinct[i]);
    }
    return knots;
}

// --- partitions ---------------------------------------------------------------

/// ARI from the four pair categories, counted over all pairs.
inline double ari_pairs(std::span<const int> a, std::span<const int> b) {
    double ss = 0, sd = 0, ds = 0, dd = 0;
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = i + 1; j < a.size(); ++j) {
            const bool sa = a[i] == a[j], sb = b[i] == b[j];
            if (sa && sb) ++ss;
            else if (sa) ++sd;
            else if (sb) ++ds;
            else ++dd;
        }
    const double total = ss + sd + ds + dd;
    const double expected = (ss + sd) * (ss + ds) / total;
    const double max_index = 0.5 * ((ss + sd) + (ss + ds));
    if (max_index == expected) return 1.0;
    return (ss - expected) / (max_index - expected);
}

} // namespace oracle
