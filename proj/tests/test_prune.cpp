#include "oracles.hpp"

#include "urp/errors.hpp"
#include "urp/prune.hpp"
#include "urp/sim.hpp"

#include <doctest.h>

using namespace urp;

namespace {

Dataset tree_data(std::uint64_t seed, double delta, int n = 250) {
    ScenarioConfig c;
    c.scenario = Scenario::tree;
    c.delta = delta;
    c.n = n;
    return gen_tree(c, RngStream(seed, 0));
}

GrowControl deep(int depth) {
    GrowControl g;
    g.prepruning = false;
    g.max_depth = depth;
    return g;
}

} // namespace

TEST_CASE("root-only path") {
    const auto d = tree_data(1, 0.0);
    GrowControl c;
    c.max_depth = 1;
    TreeNode root = grow(d, strategy_from_name("ctree"), c);
    root.children.clear();
    root.split.reset();
    const auto path = cost_complexity_path(root);
    REQUIRE(path.size() == 1);
    CHECK(path[0].alpha == 0.0);
    CHECK(path[0].subtree.is_leaf());
}

TEST_CASE("stump path") {
    const auto d = tree_data(2, 1.0);
    const auto t = grow(d, strategy_from_name("mob"), deep(1));
    REQUIRE(count_leaves(t) == 2);
    const double gain = t.rss - leaf_rss(t);
    const auto path = cost_complexity_path(t);
    REQUIRE(path.size() == 2);
    CHECK(path[0].alpha == 0.0);
    CHECK(count_leaves(path[0].subtree) == 2);
    CHECK(path[1].alpha == doctest::Approx(gain).epsilon(1e-12));
    CHECK(path[1].subtree.is_leaf());
    CHECK(&subtree_at(path, gain * 0.99) == &path[0].subtree);
    CHECK(&subtree_at(path, gain * 1.01) == &path[1].subtree);
}

TEST_CASE("cost-complexity path equals exhaustive subtree enumeration") {
    int checked = 0;
    for (std::uint64_t seed = 1; seed <= 30; ++seed) {
        const auto d = tree_data(seed, seed % 2 ? 1.0 : 0.4);
        const auto t = grow(d, strategy_from_name(seed % 3 ? "ctree" : "guide"), deep(2));
        std::set<int> internal;
        oracle::internal_ids(t, internal);
        if (internal.empty() || internal.size() > 3) continue;
        const auto all = oracle::all_prunings(t);
        const auto knots = oracle::pruning_knots(all);
        const auto path = cost_complexity_path(t);
        CAPTURE(seed);
        REQUIRE(path.size() == knots.size() + 1);
        for (std::size_t k = 0; k < knots.size(); ++k) {
            CHECK(path[k + 1].alpha == doctest::Approx(knots[k]).epsilon(1e-10));
            std::set<int> got;
            oracle::internal_ids(path[k + 1].subtree, got);
            CHECK(got == oracle::optimal_pruning(all, knots[k]).internal);
            const double next = k + 1 < knots.size() ? knots[k + 1] : 2.0 * knots[k] + 1.0;
            CHECK(got == oracle::optimal_pruning(all, 0.5 * (knots[k] + next)).internal);
        }
        ++checked;
    }
    CHECK(checked >= 20);
}

TEST_CASE("path alphas increase and subtrees shrink") {
    const auto d = tree_data(8, 0.5);
    const auto t = grow(d, strategy_from_name("ctree"), deep(5));
    const auto path = cost_complexity_path(t);
    for (std::size_t k = 1; k < path.size(); ++k) {
        CHECK(path[k].alpha >= path[k - 1].alpha);
        CHECK(count_leaves(path[k].subtree) < count_leaves(path[k - 1].subtree));
    }
    CHECK(path.back().subtree.is_leaf());
}

TEST_CASE("folds are balanced and seeded") {
    RngStream a(5, 0), b(5, 0);
    const auto f1 = assign_folds(103, 10, a);
    const auto f2 = assign_folds(103, 10, b);
    CHECK(f1 == f2);
    std::vector<int> counts(10, 0);
    for (int f : f1) ++counts[f];
    for (int c : counts) CHECK((c == 10 || c == 11));
}

TEST_CASE("cross-validated pruning collapses null trees") {
    int root = 0;
    const int reps = 30;
    for (int r = 0; r < reps; ++r) {
        const auto d = tree_data(500 + r, 0.0);
        const auto res = cv_prune(d, strategy_from_name("ctree"), GrowControl{}, CvOptions{}, RngStream(900 + r, 1));
        root += res.tree.is_leaf();
    }
    CHECK(root >= 27);
}

TEST_CASE("cross-validated pruning is deterministic and keeps real structure") {
    const auto d = tree_data(31, 1.0);
    CvOptions opt;
    opt.folds = 5;
    const auto a = cv_prune(d, strategy_from_name("guide"), GrowControl{}, opt, RngStream(7, 0));
    opt.threads = 3;
    const auto b = cv_prune(d, strategy_from_name("guide"), GrowControl{}, opt, RngStream(7, 0));
    CHECK(format_tree(a.tree) == format_tree(b.tree));
    CHECK(a.chosen_alpha == b.chosen_alpha);
    REQUIRE(a.alpha_path.size() == b.alpha_path.size());
    for (std::size_t k = 0; k < a.alpha_path.size(); ++k) CHECK(a.alpha_path[k].cv_loss == b.alpha_path[k].cv_loss);
    CHECK(count_leaves(a.tree) >= 2);
    for (std::size_t k = 1; k < a.alpha_path.size(); ++k) {
        CHECK(a.alpha_path[k].alpha >= a.alpha_path[k - 1].alpha);
        CHECK(a.alpha_path[k].leaves <= a.alpha_path[k - 1].leaves);
    }
    opt.one_se = true;
    const auto c = cv_prune(d, strategy_from_name("guide"), GrowControl{}, opt, RngStream(7, 0));
    CHECK(count_leaves(c.tree) <= count_leaves(a.tree));
    CHECK_THROWS_AS(cv_prune(d, strategy_from_name("guide"), GrowControl{}, CvOptions{1}, RngStream(7, 0)),
                    UnsupportedConfiguration);
}

TEST_CASE("gaussian log-likelihood") {
    const double ll = gaussian_loglik(50.0, 100);
    CHECK(ll == doctest::Approx(-50.0 * (std::log(2.0 * M_PI * 0.5) + 1.0)));
}

TEST_CASE("information-criterion pruning") {
    // Zero-signal deep tree collapses under BIC.
    int collapsed = 0;
    for (int r = 0; r < 10; ++r) {
        const auto t = grow(tree_data(40 + r, 0.0), strategy_from_name("ctree"), deep(4));
        collapsed += ic_prune(t, InfoCriterion::bic).is_leaf();
    }
    CHECK(collapsed >= 9);

    // Exact two-regime data keeps the split under both criteria.
    const int n = 400;
    std::vector<double> y(n), x(n), z(n);
    RngStream rng(3, 0);
    for (int i = 0; i < n; ++i) {
        x[i] = rng.uniform(-1, 1);
        z[i] = rng.uniform(-1, 1);
        y[i] = (z[i] <= 0 ? 2.0 * x[i] : -2.0 * x[i]) + 0.1 * rng.normal();
    }
    const Dataset d(y, x, {SplitColumn::numeric("z1", z)});
    const auto t = grow(d, strategy_from_name("mob"), deep(1));
    REQUIRE(count_leaves(t) == 2);
    CHECK(count_leaves(ic_prune(t, InfoCriterion::aic)) == 2);
    CHECK(count_leaves(ic_prune(t, InfoCriterion::bic)) == 2);

    // BIC is at least as aggressive as AIC.
    for (int r = 0; r < 10; ++r) {
        const auto deep_tree = grow(tree_data(70 + r, 0.3), strategy_from_name("guide"), deep(4));
        CHECK(count_leaves(ic_prune(deep_tree, InfoCriterion::bic)) <=
              count_leaves(ic_prune(deep_tree, InfoCriterion::aic)));
    }
}
