#pragma once

#include "urp/dataset.hpp"
#include "urp/inference.hpp"
#include "urp/prune.hpp"
#include "urp/rng.hpp"
#include "urp/tree.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace urp {

enum class Scenario { stump, tree, stump_continuous };
enum class Variation { intercept, slope, both };
enum class Pruning { pre, post };

std::string_view to_string(Scenario s) noexcept;
std::string_view to_string(Variation v) noexcept;
std::string_view to_string(Pruning p) noexcept;
Scenario scenario_from_string(std::string_view s);
Variation variation_from_string(std::string_view s);
Pruning pruning_from_string(std::string_view s);

struct ScenarioConfig {
    Scenario scenario = Scenario::stump;
    /// Ignored for the tree scenario, where both coefficients vary.
    Variation variation = Variation::both;
    double xi = 0.0;
    double delta = 0.0;
    int n = 250;
    int replications = 100;
    /// Split variables are z1 .. z(1 + j_noise). In the tree scenario z2 is
    /// a second true split variable, so j_noise - 1 columns are pure noise.
    int j_noise = 9;
};

/// Intercept and slope of the data-generating model for one observation.
struct Coefficients {
    double intercept = 0.0;
    double slope = 0.0;
};

Coefficients stump_coefficients(Variation variation, double xi, double delta, double z1);
Coefficients stump_continuous_coefficients(Variation variation, double delta, double z1);
Coefficients tree_coefficients(double xi, double delta, double z1, double z2);

/// Y = b0(Z1) + b1(Z1) X + e with X, Z1 ~ U[-1, 1], e ~ N(0, 1); noise
/// variables alternate U[-1, 1] (even index) and N(0, 1) (odd index).
/// Every column is drawn from its own sub-stream of `rng`.
Dataset gen_stump(const ScenarioConfig& config, const RngStream& rng);
Dataset gen_tree(const ScenarioConfig& config, const RngStream& rng);
Dataset gen_stump_continuous(const ScenarioConfig& config, const RngStream& rng);
Dataset generate(const ScenarioConfig& config, const RngStream& rng);

/// Labels of the data-generating partition (stump: 2 groups split at xi on
/// z1; tree: {z2 <= xi}, {z2 > xi, z1 <= xi}, {z2 > xi, z1 > xi};
/// continuous stump: a single group).
std::vector<int> true_partition(const ScenarioConfig& config, const Dataset& data);

/// Hubert-Arabie adjusted Rand index.
double adjusted_rand_index(std::span<const int> a, std::span<const int> b);

struct NamedStrategy {
    std::string name;
    StrategyConfig config;
};

NamedStrategy named_strategy(std::string_view name);

struct StudyConfig {
    Scenario scenario = Scenario::stump;
    Variation variation = Variation::both;
    std::vector<double> xis = {0.0};
    std::vector<double> deltas = {0.0};
    int n = 250;
    int replications = 100;
    int j_noise = 9;
    std::vector<NamedStrategy> strategies;
    GrowControl control;
    Pruning pruning = Pruning::pre;
    int folds = 10;
    std::uint64_t seed = 1;
    int threads = 1;
};

struct ReplicationRecord {
    Scenario scenario = Scenario::stump;
    std::string strategy;
    Variation variation = Variation::both;
    double xi = 0.0;
    double delta = 0.0;
    int rep = 0;
    /// Root-node p-values, one per split variable.
    std::vector<double> p_values;
    std::optional<std::size_t> argmin;
    std::optional<std::size_t> chosen;
    std::optional<double> ari;
    std::size_t leaves = 1;
};

/// Seed of the dataset for one grid cell and replication. Independent of the
/// strategy, so all strategies are compared on the same datasets.
std::uint64_t cell_seed(std::uint64_t seed, Scenario scenario, Variation variation, std::size_t xi_index,
                        std::size_t delta_index, int rep) noexcept;

/// Runs every (xi, delta, strategy, replication) combination. Records are
/// ordered by xi, delta, strategy and replication regardless of threads.
std::vector<ReplicationRecord> run_study(const StudyConfig& config);

/// Evaluates one strategy on one generated dataset.
ReplicationRecord run_replication(const ScenarioConfig& scenario, const NamedStrategy& strategy,
                                  const GrowControl& control, Pruning pruning, int folds,
                                  std::uint64_t data_seed);

struct CellSummary {
    Scenario scenario = Scenario::stump;
    std::string strategy;
    Variation variation = Variation::both;
    double xi = 0.0;
    double delta = 0.0;
    int replications = 0;
    /// z1 has the smallest p-value and it is below alpha.
    double selection_probability = 0.0;
    /// z1 has the smallest p-value.
    double argmin_probability = 0.0;
    /// Smallest p-value below alpha (any variable).
    double rejection_rate = 0.0;
    double mean_p = 0.0;
    std::optional<double> mean_ari;
    double mean_leaves = 0.0;
};

std::vector<CellSummary> summarize(const std::vector<ReplicationRecord>& records, double alpha);

std::string long_csv(const std::vector<ReplicationRecord>& records, const std::vector<std::string>& variables);
std::string aggregate_csv(const std::vector<CellSummary>& cells);

/// Names z1 .. zJ.
std::vector<std::string> split_variable_names(int count);

} // namespace urp
