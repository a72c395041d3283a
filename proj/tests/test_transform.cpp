#include "urp/errors.hpp"
#include "urp/linmod.hpp"
#include "urp/transform.hpp"

#include <doctest.h>

using namespace urp;

namespace {

LinearFit hand_fit() {
    return fit_ols(std::vector<double>{0, 1, 1, 2}, std::vector<double>{0, 0, 1, 1});
}

} // namespace

TEST_CASE("dichotomized residuals") {
    const auto g = make_gof(hand_fit(), false, true);
    CHECK(g.k() == 1);
    CHECK(g.dichotomized);
    const std::vector<double> expect{0, 1, 0, 1};
    for (int i = 0; i < 4; ++i) CHECK(g.values(i, 0) == expect[i]);
}

TEST_CASE("zero maps to one under dichotomization") {
    Eigen::MatrixXd v(3, 2);
    v << 0.0, -1e-300, 2.0, -0.0, -3.0, 1e-300;
    const auto d = dichotomize_values(v);
    CHECK(d(0, 0) == 1.0);
    CHECK(d(0, 1) == 0.0);
    CHECK(d(1, 0) == 1.0);
    CHECK(d(1, 1) == 1.0);
    CHECK(d(2, 0) == 0.0);
    CHECK(d(2, 1) == 1.0);
}

TEST_CASE("scores gof") {
    const auto f = hand_fit();
    const auto g = make_gof(f, true, false);
    CHECK(g.k() == 2);
    for (int i = 0; i < 4; ++i) CHECK(g.values(i, 0) == -2.0 * f.residuals[i]);
    const auto r = make_gof(f, false, false);
    CHECK(r.k() == 1);
}

TEST_CASE("lin design is the raw column") {
    const auto col = SplitColumn::numeric("z", {3, -1, 2});
    const auto t = make_split_transform(col, SplitMode::lin, 1);
    CHECK(t.p() == 1);
    CHECK(t.design(1, 0) == -1.0);
}

TEST_CASE("cat bins of 1..8") {
    const auto col = SplitColumn::numeric("z", {1, 2, 3, 4, 5, 6, 7, 8});
    const auto t = make_split_transform(col, SplitMode::cat, 1);
    REQUIRE(t.p() == 4);
    CHECK(t.bin_breaks == std::vector<double>{2.75, 4.5, 6.25});
    for (int p = 0; p < 4; ++p) CHECK(t.design.col(p).sum() == 2.0);
    for (int i = 0; i < 8; ++i) CHECK(t.design.row(i).sum() == 1.0);
    CHECK(t.design(1, 0) == 1.0);
    CHECK(t.design(2, 1) == 1.0);
}

TEST_CASE("cat bins shrink under tied quartiles") {
    const auto col = SplitColumn::numeric("z", {0, 0, 0, 0, 0, 1, 2, 3});
    const auto t = make_split_transform(col, SplitMode::cat, 1);
    CHECK(t.p() >= 2);
    CHECK(t.p() < 4);
    for (int i = 0; i < 8; ++i) CHECK(t.design.row(i).sum() == 1.0);
    for (int p = 0; p < t.p(); ++p) CHECK(t.design.col(p).sum() > 0.0);
}

TEST_CASE("max design on 1..4") {
    const auto col = SplitColumn::numeric("z", {4, 1, 3, 2});
    const auto t = make_split_transform(col, SplitMode::max, 1);
    REQUIRE(t.p() == 3);
    CHECK(t.candidate_splits == std::vector<double>{1, 2, 3});
    // Column p is 1{z > c_p}.
    for (int i = 0; i < 4; ++i)
        for (int p = 0; p < 3; ++p) CHECK(t.design(i, p) == (col.values[i] > t.candidate_splits[p] ? 1.0 : 0.0));
    const auto t2 = make_split_transform(col, SplitMode::max, 2);
    CHECK(t2.p() == 1);
    CHECK_THROWS_AS(make_split_transform(col, SplitMode::max, 3), DegenerateColumn);
}

TEST_CASE("constant column is degenerate") {
    const auto col = SplitColumn::numeric("z", {5, 5, 5, 5, 5});
    CHECK_THROWS_AS(make_split_transform(col, SplitMode::cat, 1), DegenerateColumn);
    CHECK_THROWS_AS(make_split_transform(col, SplitMode::max, 1), DegenerateColumn);
}

TEST_CASE("categorical columns") {
    const auto col = SplitColumn::categorical("g", {0, 2, 2, 0}, {"a", "b", "c"});
    const auto t = make_split_transform(col, SplitMode::cat, 1);
    CHECK(t.p() == 2);
    for (int i = 0; i < 4; ++i) CHECK(t.design.row(i).sum() == 1.0);
    CHECK_THROWS_AS(make_split_transform(col, SplitMode::lin, 1), DataError);
    CHECK_THROWS_AS(make_split_transform(col, SplitMode::max, 1), DataError);
}

TEST_CASE("bin_of") {
    const std::vector<double> b{1.0, 2.0};
    CHECK(bin_of(0.5, b) == 0);
    CHECK(bin_of(1.0, b) == 0);
    CHECK(bin_of(1.5, b) == 1);
    CHECK(bin_of(2.0, b) == 1);
    CHECK(bin_of(9.0, b) == 2);
}
