#include "urp/sim.hpp"

#include "urp/errors.hpp"
#include "urp/linmod.hpp"
#include "urp/parallel.hpp"

#include <charconv>
#include <cmath>
#include <map>

namespace urp {

std::string_view to_string(Scenario s) noexcept {
    switch (s) {
    case Scenario::stump: return "stump";
    case Scenario::tree: return "tree";
    case Scenario::stump_continuous: return "stump_continuous";
    }
    return "?";
}

std::string_view to_string(Variation v) noexcept {
    switch (v) {
    case Variation::intercept: return "intercept";
    case Variation::slope: return "slope";
    case Variation::both: return "both";
    }
    return "?";
}

std::string_view to_string(Pruning p) noexcept {
    return p == Pruning::pre ? "pre" : "post";
}

Scenario scenario_from_string(std::string_view s) {
    if (s == "stump") return Scenario::stump;
    if (s == "tree") return Scenario::tree;
    if (s == "stump_continuous" || s == "continuous") return Scenario::stump_continuous;
    throw UnsupportedConfiguration("unknown scenario '" + std::string(s) + "' (stump, tree, stump_continuous)");
}

Variation variation_from_string(std::string_view s) {
    if (s == "intercept") return Variation::intercept;
    if (s == "slope") return Variation::slope;
    if (s == "both") return Variation::both;
    throw UnsupportedConfiguration("unknown variation '" + std::string(s) + "' (intercept, slope, both)");
}

Pruning pruning_from_string(std::string_view s) {
    if (s == "pre") return Pruning::pre;
    if (s == "post") return Pruning::post;
    throw UnsupportedConfiguration("unknown pruning '" + std::string(s) + "' (pre, post)");
}

// ---------------------------------------------------------------------------
// Data-generating processes

Coefficients stump_coefficients(Variation variation, double xi, double delta, double z1) {
    // Intercept moves -delta -> +delta and slope +delta -> -delta across xi.
    const double side = z1 <= xi ? -1.0 : 1.0;
    switch (variation) {
    case Variation::intercept: return {side * delta, 1.0};
    case Variation::slope: return {0.0, -side * delta};
    case Variation::both: return {side * delta, -side * delta};
    }
    return {};
}

Coefficients stump_continuous_coefficients(Variation variation, double delta, double z1) {
    switch (variation) {
    case Variation::intercept: return {delta * z1, 1.0};
    case Variation::slope: return {0.0, -delta * z1};
    case Variation::both: return {delta * z1, -delta * z1};
    }
    return {};
}

Coefficients tree_coefficients(double xi, double delta, double z1, double z2) {
    if (z2 <= xi) return {0.0, delta};
    return {z1 <= xi ? -delta : delta, -delta};
}

namespace {

RngStream sub_stream(const RngStream& rng, std::uint64_t tag) {
    return RngStream(rng.seed(), derive_seed({rng.stream_id(), tag}));
}

struct Draws {
    std::vector<double> x, eps;
    std::vector<std::vector<double>> z;
};

// z1 (and z2 for the tree scenario) uniform; from there on even-numbered
// variables are uniform and odd-numbered ones standard normal.
Draws draw_columns(const ScenarioConfig& config, const RngStream& rng) {
    if (config.n < 1) throw UnsupportedConfiguration("scenario needs n >= 1");
    if (config.j_noise < (config.scenario == Scenario::tree ? 1 : 0)) {
        throw UnsupportedConfiguration("tree scenario needs j_noise >= 1");
    }
    const auto n = static_cast<std::size_t>(config.n);
    const auto j_total = static_cast<std::size_t>(1 + config.j_noise);
    Draws d;
    RngStream xs = sub_stream(rng, 0);
    RngStream es = sub_stream(rng, 1);
    d.x.resize(n);
    d.eps.resize(n);
    for (auto& v : d.x) v = xs.uniform(-1.0, 1.0);
    for (auto& v : d.eps) v = es.normal();
    d.z.resize(j_total);
    for (std::size_t j = 0; j < j_total; ++j) {
        RngStream zs = sub_stream(rng, 2 + j);
        const std::size_t label = j + 1;
        const bool uniform = label == 1 || label % 2 == 0;
        d.z[j].resize(n);
        for (auto& v : d.z[j]) v = uniform ? zs.uniform(-1.0, 1.0) : zs.normal();
    }
    return d;
}

Dataset assemble(Draws d, const std::vector<Coefficients>& beta) {
    std::vector<double> y(d.x.size());
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = beta[i].intercept + beta[i].slope * d.x[i] + d.eps[i];
    const auto names = split_variable_names(static_cast<int>(d.z.size()));
    std::vector<SplitColumn> z;
    for (std::size_t j = 0; j < d.z.size(); ++j) z.push_back(SplitColumn::numeric(names[j], std::move(d.z[j])));
    return Dataset(std::move(y), std::move(d.x), std::move(z));
}

} // namespace

std::vector<std::string> split_variable_names(int count) {
    std::vector<std::string> names;
    for (int j = 1; j <= count; ++j) names.push_back("z" + std::to_string(j));
    return names;
}

Dataset gen_stump(const ScenarioConfig& config, const RngStream& rng) {
    Draws d = draw_columns(config, rng);
    std::vector<Coefficients> beta(d.x.size());
    for (std::size_t i = 0; i < beta.size(); ++i) {
        beta[i] = stump_coefficients(config.variation, config.xi, config.delta, d.z[0][i]);
    }
    return assemble(std::move(d), beta);
}

Dataset gen_stump_continuous(const ScenarioConfig& config, const RngStream& rng) {
    Draws d = draw_columns(config, rng);
    std::vector<Coefficients> beta(d.x.size());
    for (std::size_t i = 0; i < beta.size(); ++i) {
        beta[i] = stump_continuous_coefficients(config.variation, config.delta, d.z[0][i]);
    }
    return assemble(std::move(d), beta);
}

Dataset gen_tree(const ScenarioConfig& config, const RngStream& rng) {
    ScenarioConfig cfg = config;
    cfg.scenario = Scenario::tree;
    Draws d = draw_columns(cfg, rng);
    std::vector<Coefficients> beta(d.x.size());
    for (std::size_t i = 0; i < beta.size(); ++i) {
        beta[i] = tree_coefficients(config.xi, config.delta, d.z[0][i], d.z[1][i]);
    }
    return assemble(std::move(d), beta);
}

Dataset generate(const ScenarioConfig& config, const RngStream& rng) {
    switch (config.scenario) {
    case Scenario::stump: return gen_stump(config, rng);
    case Scenario::tree: return gen_tree(config, rng);
    case Scenario::stump_continuous: return gen_stump_continuous(config, rng);
    }
    throw UnsupportedConfiguration("unknown scenario");
}

std::vector<int> true_partition(const ScenarioConfig& config, const Dataset& data) {
    std::vector<int> labels(data.n(), 0);
    const auto& z1 = data.z(0).values;
    switch (config.scenario) {
    case Scenario::stump:
        for (std::size_t i = 0; i < labels.size(); ++i) labels[i] = z1[i] <= config.xi ? 0 : 1;
        break;
    case Scenario::tree: {
        const auto& z2 = data.z(1).values;
        for (std::size_t i = 0; i < labels.size(); ++i) {
            labels[i] = z2[i] <= config.xi ? 0 : (z1[i] <= config.xi ? 1 : 2);
        }
        break;
    }
    case Scenario::stump_continuous: break;
    }
    return labels;
}

double adjusted_rand_index(std::span<const int> a, std::span<const int> b) {
    if (a.size() != b.size()) throw DataError("adjusted_rand_index: label vectors differ in length");
    if (a.size() < 2) throw InsufficientData("adjusted_rand_index needs at least 2 observations");
    auto comb2 = [](double v) { return v * (v - 1.0) / 2.0; };
    std::map<std::pair<int, int>, double> joint;
    std::map<int, double> ca, cb;
    for (std::size_t i = 0; i < a.size(); ++i) {
        joint[{a[i], b[i]}] += 1.0;
        ca[a[i]] += 1.0;
        cb[b[i]] += 1.0;
    }
    double index = 0.0, sa = 0.0, sb = 0.0;
    for (const auto& [k, v] : joint) index += comb2(v);
    for (const auto& [k, v] : ca) sa += comb2(v);
    for (const auto& [k, v] : cb) sb += comb2(v);
    const double expected = sa * sb / comb2(static_cast<double>(a.size()));
    const double max_index = 0.5 * (sa + sb);
    if (max_index == expected) return index == max_index ? 1.0 : 0.0;
    return (index - expected) / (max_index - expected);
}

// ---------------------------------------------------------------------------
// Study runner

NamedStrategy named_strategy(std::string_view name) {
    return {std::string(name), strategy_from_name(name)};
}

std::uint64_t cell_seed(std::uint64_t seed, Scenario scenario, Variation variation, std::size_t xi_index,
                        std::size_t delta_index, int rep) noexcept {
    return derive_seed({seed, static_cast<std::uint64_t>(scenario), static_cast<std::uint64_t>(variation),
                        xi_index, delta_index, static_cast<std::uint64_t>(rep)});
}

ReplicationRecord run_replication(const ScenarioConfig& scenario, const NamedStrategy& strategy,
                                  const GrowControl& control, Pruning pruning, int folds,
                                  std::uint64_t data_seed) {
    const Dataset data = generate(scenario, RngStream(data_seed, 0));
    ReplicationRecord rec;
    rec.scenario = scenario.scenario;
    rec.strategy = strategy.name;
    rec.variation = scenario.scenario == Scenario::tree ? Variation::both : scenario.variation;
    rec.xi = scenario.xi;
    rec.delta = scenario.delta;

    StrategyConfig cfg = strategy.config;
    cfg.alpha = control.alpha;
    if (control.min_segment > 0) cfg.min_segment = control.min_segment;

    Selection sel;
    if (scenario.scenario != Scenario::tree) {
        const LinearFit fit = fit_ols(data.y(), data.x());
        sel = select_variable(cfg, fit, data);
        rec.leaves = sel.chosen ? 2 : 1;
    } else {
        TreeNode tree;
        if (pruning == Pruning::pre) {
            GrowControl c = control;
            c.prepruning = true;
            tree = grow(data, cfg, c);
        } else {
            CvOptions opt;
            opt.folds = folds;
            tree = cv_prune(data, cfg, control, opt, RngStream(data_seed, 1)).tree;
        }
        std::vector<TestOutcome> root = tree.outcomes;
        if (root.empty()) {
            for (const auto& col : data.z()) root.push_back(TestOutcome::degenerate(col.name));
        }
        sel = select_from_outcomes(std::move(root), cfg.alpha);
        const auto fitted = partition_labels(tree, data);
        const auto truth = true_partition(scenario, data);
        rec.ari = adjusted_rand_index(fitted, truth);
        rec.leaves = count_leaves(tree);
    }
    for (const auto& o : sel.outcomes) rec.p_values.push_back(o.p_value);
    rec.argmin = sel.argmin;
    rec.chosen = sel.chosen;
    return rec;
}

std::vector<ReplicationRecord> run_study(const StudyConfig& config) {
    if (config.strategies.empty()) throw UnsupportedConfiguration("study needs at least one strategy");
    if (config.replications < 1) throw UnsupportedConfiguration("study needs at least one replication");
    for (const double xi : config.xis) {
        if (!(xi > -1.0 && xi < 1.0)) throw UnsupportedConfiguration("xi must lie in (-1, 1)");
    }
    for (const double d : config.deltas) {
        if (!(d >= 0.0) || !std::isfinite(d)) throw UnsupportedConfiguration("delta must be nonnegative");
    }

    struct Task {
        std::size_t xi, delta, strategy;
        int rep;
    };
    std::vector<Task> tasks;
    for (std::size_t a = 0; a < config.xis.size(); ++a)
        for (std::size_t b = 0; b < config.deltas.size(); ++b)
            for (std::size_t s = 0; s < config.strategies.size(); ++s)
                for (int r = 0; r < config.replications; ++r) tasks.push_back({a, b, s, r});

    std::vector<ReplicationRecord> records(tasks.size());
    parallel_for(tasks.size(), config.threads, [&](std::size_t i) {
        const Task& t = tasks[i];
        ScenarioConfig sc;
        sc.scenario = config.scenario;
        sc.variation = config.variation;
        sc.xi = config.xis[t.xi];
        sc.delta = config.deltas[t.delta];
        sc.n = config.n;
        sc.replications = config.replications;
        sc.j_noise = config.j_noise;
        const std::uint64_t seed = cell_seed(config.seed, config.scenario, config.variation, t.xi, t.delta, t.rep);
        records[i] = run_replication(sc, config.strategies[t.strategy], config.control, config.pruning,
                                     config.folds, seed);
        records[i].rep = t.rep;
    });
    return records;
}

std::vector<CellSummary> summarize(const std::vector<ReplicationRecord>& records, double alpha) {
    std::vector<CellSummary> cells;
    std::map<std::tuple<double, double, std::string, int, int>, std::size_t> index;
    std::vector<double> ari_sum;
    std::vector<int> ari_count;
    for (const auto& r : records) {
        const auto key = std::make_tuple(r.xi, r.delta, r.strategy, static_cast<int>(r.scenario),
                                         static_cast<int>(r.variation));
        auto it = index.find(key);
        if (it == index.end()) {
            CellSummary c;
            c.scenario = r.scenario;
            c.strategy = r.strategy;
            c.variation = r.variation;
            c.xi = r.xi;
            c.delta = r.delta;
            it = index.emplace(key, cells.size()).first;
            cells.push_back(c);
            ari_sum.push_back(0.0);
            ari_count.push_back(0);
        }
        CellSummary& c = cells[it->second];
        ++c.replications;
        const bool z1_min = r.argmin && *r.argmin == 0;
        const double p1 = r.p_values.empty() ? 1.0 : r.p_values.front();
        const double pmin = r.argmin ? r.p_values[*r.argmin] : 1.0;
        c.argmin_probability += z1_min ? 1.0 : 0.0;
        c.selection_probability += (z1_min && p1 < alpha) ? 1.0 : 0.0;
        c.rejection_rate += pmin < alpha ? 1.0 : 0.0;
        c.mean_p += p1;
        c.mean_leaves += static_cast<double>(r.leaves);
        if (r.ari) {
            ari_sum[it->second] += *r.ari;
            ++ari_count[it->second];
        }
    }
    for (std::size_t i = 0; i < cells.size(); ++i) {
        auto& c = cells[i];
        const auto m = static_cast<double>(c.replications);
        c.argmin_probability /= m;
        c.selection_probability /= m;
        c.rejection_rate /= m;
        c.mean_p /= m;
        c.mean_leaves /= m;
        if (ari_count[i] > 0) c.mean_ari = ari_sum[i] / ari_count[i];
    }
    return cells;
}

namespace {

std::string num(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

} // namespace

std::string long_csv(const std::vector<ReplicationRecord>& records, const std::vector<std::string>& variables) {
    std::string out = "scenario,strategy,variation,xi,delta,rep,variable,p_value,chosen,ari,leaves\n";
    for (const auto& r : records) {
        const std::string chosen = r.chosen ? variables.at(*r.chosen) : "";
        const std::string ari = r.ari ? num(*r.ari) : "";
        for (std::size_t j = 0; j < r.p_values.size(); ++j) {
            out += std::string(to_string(r.scenario)) + "," + r.strategy + "," +
                   std::string(to_string(r.variation)) + "," + num(r.xi) + "," + num(r.delta) + "," +
                   std::to_string(r.rep) + "," + variables.at(j) + "," + num(r.p_values[j]) + "," + chosen +
                   "," + ari + "," + std::to_string(r.leaves) + "\n";
        }
    }
    return out;
}

std::string aggregate_csv(const std::vector<CellSummary>& cells) {
    std::string out =
        "scenario,strategy,variation,xi,delta,replications,selection_probability,argmin_probability,"
        "rejection_rate,mean_p,mean_ari,mean_leaves\n";
    for (const auto& c : cells) {
        out += std::string(to_string(c.scenario)) + "," + c.strategy + "," + std::string(to_string(c.variation)) +
               "," + num(c.xi) + "," + num(c.delta) + "," + std::to_string(c.replications) + "," +
               num(c.selection_probability) + "," + num(c.argmin_probability) + "," + num(c.rejection_rate) +
               "," + num(c.mean_p) + "," + (c.mean_ari ? num(*c.mean_ari) : "") + "," + num(c.mean_leaves) +
               "\n";
    }
    return out;
}

} // namespace urp
