#include "urp/errors.hpp"
#include "urp/inference.hpp"
#include "urp/rng.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>

namespace urp {

FluctuationProcess fluctuation_process(const Eigen::MatrixXd& h, const std::vector<std::size_t>& order) {
    const Eigen::Index n = h.rows();
    if (static_cast<Eigen::Index>(order.size()) != n) {
        throw DataError("fluctuation_process: ordering length differs from gof rows");
    }
    if (n < 2) throw InsufficientData("fluctuation_process needs at least 2 observations");
    const Eigen::Index k = h.cols();

    const Eigen::RowVectorXd mean = h.colwise().mean();
    const Eigen::MatrixXd hc = h.rowwise() - mean;
    const Eigen::MatrixXd vhat = (hc.transpose() * hc) / static_cast<double>(n);

    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(vhat);
    const Eigen::VectorXd& lambda = eig.eigenvalues();
    const double lmax = lambda.maxCoeff();
    FluctuationProcess fp;
    Eigen::VectorXd inv_root = Eigen::VectorXd::Zero(k);
    if (lmax > 0.0 && std::isfinite(lmax)) {
        const double tol = static_cast<double>(k) * lmax * 1e-12;
        for (Eigen::Index i = 0; i < k; ++i) {
            if (lambda(i) > tol) {
                inv_root(i) = 1.0 / std::sqrt(lambda(i));
                ++fp.rank;
            }
        }
    }
    if (fp.rank == 0) throw DegenerateColumn("goodness-of-fit measure has no variation");
    fp.vhat_root_inv = eig.eigenvectors() * inv_root.asDiagonal() * eig.eigenvectors().transpose();

    const Eigen::MatrixXd decorrelated = hc * fp.vhat_root_inv / std::sqrt(static_cast<double>(n));
    fp.cumulative = Eigen::MatrixXd::Zero(n + 1, k);
    for (Eigen::Index i = 0; i < n; ++i) {
        fp.cumulative.row(i + 1) =
            fp.cumulative.row(i) + decorrelated.row(static_cast<Eigen::Index>(order[static_cast<std::size_t>(i)]));
    }
    return fp;
}

SupLmResult suplm_statistic(const Eigen::MatrixXd& h, const std::vector<std::size_t>& order,
                            int min_segment, std::span<const double> values) {
    const auto n = static_cast<std::size_t>(h.rows());
    const std::size_t lo = static_cast<std::size_t>(std::max(1, min_segment));
    if (lo > n || lo > n - lo) {
        throw InsufficientData("supLM: no admissible split fraction for n = " + std::to_string(n) +
                               " and minimal segment " + std::to_string(min_segment));
    }
    const std::size_t hi = n - lo;
    const FluctuationProcess fp = fluctuation_process(h, order);

    SupLmResult best;
    best.rank = fp.rank;
    best.statistic = -1.0;
    const auto nd = static_cast<double>(n);
    for (std::size_t i = lo; i <= hi; ++i) {
        if (!values.empty() && values[order[i - 1]] == values[order[i]]) continue;
        const double t = static_cast<double>(i) / nd;
        const double value = fp.cumulative.row(static_cast<Eigen::Index>(i)).squaredNorm() / (t * (1.0 - t));
        if (value > best.statistic) {
            best.statistic = value;
            best.argmax_index = i;
        }
    }
    if (best.statistic < 0.0) {
        throw DegenerateColumn("supLM: no split between distinct values in the admissible range");
    }
    return best;
}

SupLmResult suplm_statistic(const GofMatrix& gof, const SplitColumn& col, int min_segment) {
    if (gof.rows() != static_cast<Eigen::Index>(col.size())) {
        throw DataError("suplm_statistic: column length differs from gof rows");
    }
    return suplm_statistic(gof.values, order_permutation(col), min_segment, col.values);
}

// ---------------------------------------------------------------------------
// Null distribution of the trimmed supLM functional.
//
// Paths are simulated once per dimension K. For each path only the
// "record" points of M(lo) = max_{lo <= g <= G - lo} f(g) are kept while lo
// moves outward from the centre, which is enough to evaluate the functional
// for every trimming level without storing the whole path.

int suplm_grid_trim(int min_segment, std::size_t n) noexcept {
    const double frac = static_cast<double>(std::max(1, min_segment)) / static_cast<double>(n);
    const auto g = static_cast<int>(std::llround(frac * kSupLmGrid));
    return std::clamp(g, 1, kSupLmGrid / 2);
}

namespace {

struct PathRecords {
    // Per path, records in order of decreasing trim index; value nondecreasing.
    std::vector<std::uint32_t> offset; // size replicates + 1
    std::vector<std::uint16_t> trim;
    std::vector<double> value;
};

PathRecords simulate_paths(int k) {
    constexpr int grid = kSupLmGrid;
    constexpr int half = grid / 2;
    const double step_sd = 1.0 / std::sqrt(static_cast<double>(grid));

    PathRecords rec;
    rec.offset.reserve(kSupLmReplicates + 1);
    rec.offset.push_back(0);
    std::vector<double> walk(static_cast<std::size_t>(grid + 1));
    std::vector<double> f(static_cast<std::size_t>(grid + 1));
    for (int r = 0; r < kSupLmReplicates; ++r) {
        RngStream rng(kSupLmSeed, static_cast<std::uint64_t>(r));
        std::fill(f.begin(), f.end(), 0.0);
        for (int d = 0; d < k; ++d) {
            walk[0] = 0.0;
            for (int g = 1; g <= grid; ++g) walk[static_cast<std::size_t>(g)] = walk[static_cast<std::size_t>(g - 1)] + step_sd * rng.normal();
            const double end = walk[static_cast<std::size_t>(grid)];
            for (int g = 1; g < grid; ++g) {
                const double t = static_cast<double>(g) / grid;
                const double bridge = walk[static_cast<std::size_t>(g)] - t * end;
                f[static_cast<std::size_t>(g)] += bridge * bridge;
            }
        }
        for (int g = 1; g < grid; ++g) {
            const double t = static_cast<double>(g) / grid;
            f[static_cast<std::size_t>(g)] /= t * (1.0 - t);
        }
        double running = -1.0;
        for (int lo = half; lo >= 1; --lo) {
            const double v = std::max(f[static_cast<std::size_t>(lo)], f[static_cast<std::size_t>(grid - lo)]);
            if (v > running) {
                running = v;
                rec.trim.push_back(static_cast<std::uint16_t>(lo));
                rec.value.push_back(v);
            }
        }
        rec.offset.push_back(static_cast<std::uint32_t>(rec.value.size()));
    }
    return rec;
}

std::vector<double> table_from_records(const PathRecords& rec, int grid_trim) {
    std::vector<double> out;
    out.reserve(kSupLmReplicates);
    for (int r = 0; r < kSupLmReplicates; ++r) {
        double m = 0.0;
        for (auto i = rec.offset[static_cast<std::size_t>(r)]; i < rec.offset[static_cast<std::size_t>(r) + 1]; ++i) {
            if (rec.trim[i] < grid_trim) break;
            m = rec.value[i];
        }
        out.push_back(m);
    }
    std::sort(out.begin(), out.end());
    return out;
}

template <class Key, class Value>
class OnceCache {
public:
    template <class Make>
    const Value& get(const Key& key, Make&& make) {
        Entry* entry = nullptr;
        {
            std::lock_guard lock(mutex_);
            auto& slot = entries_[key];
            if (!slot) slot = std::make_unique<Entry>();
            entry = slot.get();
        }
        std::call_once(entry->once, [&] { entry->value = make(); });
        return entry->value;
    }

private:
    struct Entry {
        std::once_flag once;
        Value value;
    };
    std::mutex mutex_;
    std::map<Key, std::unique_ptr<Entry>> entries_;
};

OnceCache<int, PathRecords>& path_cache() {
    static OnceCache<int, PathRecords> cache;
    return cache;
}

OnceCache<std::pair<int, int>, std::vector<double>>& table_cache() {
    static OnceCache<std::pair<int, int>, std::vector<double>> cache;
    return cache;
}

} // namespace

const std::vector<double>& suplm_null_table(int k, int grid_trim) {
    if (k < 1) throw UnsupportedConfiguration("supLM null table needs K >= 1");
    grid_trim = std::clamp(grid_trim, 1, kSupLmGrid / 2);
    return table_cache().get({k, grid_trim}, [&] {
        const PathRecords& rec = path_cache().get(k, [&] { return simulate_paths(k); });
        return table_from_records(rec, grid_trim);
    });
}

double suplm_pvalue(double statistic, int k, int min_segment, std::size_t n) {
    if (!(statistic > 0.0)) return 1.0;
    const auto& table = suplm_null_table(k, suplm_grid_trim(min_segment, n));
    const auto exceed = static_cast<double>(table.end() - std::lower_bound(table.begin(), table.end(), statistic));
    return (exceed + 1.0) / (static_cast<double>(table.size()) + 1.0);
}

} // namespace urp
