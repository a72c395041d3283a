#include "urp/inference.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

// Independent Monte Carlo of sup_{t in [0.1, 0.9]} B(t)^2 / (t (1 - t)) for a
// one-dimensional Brownian bridge on the same grid, with a different
// generator and four times as many paths.
TEST_CASE("supLM p-values agree with a 200000-path reference") {
    const int grid = 1000, reps = 200000, lo = 100, hi = 900;
    std::mt19937_64 gen(20190611);
    std::normal_distribution<double> nd;
    std::vector<double> sup(reps);
    std::vector<double> walk(grid + 1);
    for (int r = 0; r < reps; ++r) {
        walk[0] = 0.0;
        for (int i = 1; i <= grid; ++i) walk[i] = walk[i - 1] + nd(gen) / std::sqrt(double(grid));
        double best = 0.0;
        for (int i = lo; i <= hi; ++i) {
            const double t = double(i) / grid;
            const double b = walk[i] - t * walk[grid];
            best = std::max(best, b * b / (t * (1.0 - t)));
        }
        sup[r] = best;
    }
    std::sort(sup.begin(), sup.end());
    for (double stat : {2.0, 4.0, 6.0, 8.0, 10.0, 12.0}) {
        const auto above = sup.end() - std::lower_bound(sup.begin(), sup.end(), stat);
        const double ref = double(above) / reps;
        const double p = urp::suplm_pvalue(stat, 1, 100, 1000);
        CAPTURE(stat);
        CAPTURE(ref);
        CHECK(std::abs(p - ref) <= 0.01);
    }
}
