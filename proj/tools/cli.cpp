#include "cli.hpp"

#include "urp/dataset.hpp"
#include "urp/errors.hpp"
#include "urp/inference.hpp"
#include "urp/prune.hpp"
#include "urp/sim.hpp"
#include "urp/tree.hpp"
#include "urp/tree_json.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>

namespace urp::cli {
namespace {

struct Common {
    std::string strategy = "ctree";
    double alpha = 0.05;
    int min_node_size = 20;
    int min_segment = 0;
    int max_depth = 5;
    bool no_preprune = false;
    int threads = 1;
    std::optional<std::uint64_t> seed;
};

std::uint64_t default_seed() {
    if (const char* env = std::getenv("URP_SEED")) {
        std::uint64_t v = 0;
        const char* end = env + std::char_traits<char>::length(env);
        const auto res = std::from_chars(env, end, v);
        if (res.ec == std::errc() && res.ptr == end) return v;
    }
    return 1;
}

void add_growth_flags(CLI::App* cmd, Common& c) {
    cmd->add_option("--strategy", c.strategy, "Strategy name or scores|residuals:dich|raw:lin|cat|max")
        ->capture_default_str();
    cmd->add_option("--alpha", c.alpha, "Significance level")->capture_default_str()->check(CLI::Range(0.0, 1.0));
    cmd->add_option("--min-node-size", c.min_node_size, "Minimum observations per child")->capture_default_str();
    cmd->add_option("--min-segment", c.min_segment, "Minimum segment for max-type tests (0: default)")
        ->capture_default_str();
    cmd->add_option("--max-depth", c.max_depth, "Maximum tree depth")->capture_default_str();
    cmd->add_flag("--no-preprune", c.no_preprune, "Grow without the significance stop");
}

GrowControl control_of(const Common& c) {
    GrowControl g;
    g.alpha = c.alpha;
    g.min_node_size = c.min_node_size;
    g.min_segment = c.min_segment;
    g.max_depth = c.max_depth;
    g.prepruning = !c.no_preprune;
    return g;
}

std::string fmt(double v, int precision = 4) {
    std::ostringstream s;
    s << std::setprecision(precision) << v;
    return s.str();
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (const char ch : s) {
        if (ch == ',') {
            if (!cur.empty()) out.push_back(cur);
            cur.clear();
        } else {
            cur += ch;
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw DataError("cannot write '" + path + "'");
    f << text;
    if (!f) throw DataError("write to '" + path + "' failed");
}

// fit ------------------------------------------------------------------------

struct FitArgs {
    Common common;
    std::string input;
    std::string response;
    std::string regressor;
    std::vector<std::string> split;
    std::vector<std::string> categorical;
    std::string out = "tree.json";
};

int cmd_fit(const FitArgs& a, std::ostream& out) {
    const StrategyConfig strategy = strategy_from_name(a.common.strategy);
    CsvSchema schema;
    schema.response = a.response;
    schema.regressor = a.regressor;
    schema.split = a.split;
    schema.categorical = a.categorical;
    const Dataset data = load_csv(a.input, schema);
    const GrowControl control = control_of(a.common);
    TreeNode root = grow(data, strategy, control);
    const TreeModel model = make_model(data, schema, strategy, control, std::move(root));
    save_model(a.out, model);
    out << "strategy " << a.common.strategy << " (" << strategy_triple(strategy) << "), n = " << data.n()
        << ", leaves = " << count_leaves(model.root) << ", depth = " << tree_depth(model.root) << "\n";
    out << format_tree(model.root);
    out << "tree written to " << a.out << "\n";
    return 0;
}

// simulate -------------------------------------------------------------------

struct SimulateArgs {
    Common common;
    std::string scenario = "stump";
    std::string variation = "both";
    std::vector<double> xis = {0.0};
    std::vector<double> deltas = {0.0};
    int n = 250;
    int reps = 100;
    int j_noise = 9;
    std::string strategies = "ctree,mob,guide,guide_scores";
    std::string pruning = "pre";
    int folds = 10;
    std::string out = "sim_long.csv";
    std::string aggregate = "sim_aggregate.csv";
};

int cmd_simulate(const SimulateArgs& a, std::ostream& out) {
    StudyConfig cfg;
    cfg.scenario = scenario_from_string(a.scenario);
    cfg.variation = variation_from_string(a.variation);
    cfg.xis = a.xis;
    cfg.deltas = a.deltas;
    cfg.n = a.n;
    cfg.replications = a.reps;
    cfg.j_noise = a.j_noise;
    for (const auto& name : split_list(a.strategies)) cfg.strategies.push_back(named_strategy(name));
    cfg.control = control_of(a.common);
    cfg.pruning = pruning_from_string(a.pruning);
    cfg.folds = a.folds;
    cfg.seed = a.common.seed.value_or(default_seed());
    cfg.threads = a.common.threads;
    if (cfg.n < 10) throw UnsupportedConfiguration("--n must be at least 10");
    if (cfg.j_noise < 1) throw UnsupportedConfiguration("--j-noise must be at least 1");

    const auto records = run_study(cfg);
    const auto cells = summarize(records, cfg.control.alpha);
    write_text(a.out, long_csv(records, split_variable_names(1 + cfg.j_noise)));
    write_text(a.aggregate, aggregate_csv(cells));

    out << std::left << std::setw(14) << "strategy" << std::setw(8) << "xi" << std::setw(8) << "delta"
        << std::setw(10) << "select" << std::setw(10) << "reject" << std::setw(10) << "mean_p" << std::setw(10)
        << "mean_ari"
        << "leaves\n";
    for (const auto& c : cells) {
        out << std::left << std::setw(14) << c.strategy << std::setw(8) << fmt(c.xi) << std::setw(8)
            << fmt(c.delta) << std::setw(10) << fmt(c.selection_probability, 3) << std::setw(10)
            << fmt(c.rejection_rate, 3) << std::setw(10) << fmt(c.mean_p, 3) << std::setw(10)
            << (c.mean_ari ? fmt(*c.mean_ari, 3) : "-") << fmt(c.mean_leaves, 3) << "\n";
    }
    out << "wrote " << a.out << " and " << a.aggregate << "\n";
    return 0;
}

// prune ----------------------------------------------------------------------

struct PruneArgs {
    std::string tree;
    std::string input;
    std::string method = "cc";
    int folds = 10;
    bool one_se = false;
    std::optional<std::uint64_t> seed;
    int threads = 1;
    std::string out = "pruned.json";
    std::string path_out;
};

int cmd_prune(const PruneArgs& a, std::ostream& out) {
    TreeModel model = load_model(a.tree);
    const Dataset data = load_csv(a.input, model.schema());
    check_schema(model, data);
    const std::size_t before = count_leaves(model.root);

    if (a.method == "aic" || a.method == "bic") {
        model.root = ic_prune(model.root, a.method == "aic" ? InfoCriterion::aic : InfoCriterion::bic);
        renumber(model.root);
    } else if (a.method == "cc") {
        if (data.n() != model.root.n_node) {
            throw DataError("data has " + std::to_string(data.n()) + " rows but the tree was grown on " +
                            std::to_string(model.root.n_node));
        }
        CvOptions opt;
        opt.folds = a.folds;
        opt.one_se = a.one_se;
        opt.threads = a.threads;
        PruneResult res =
            cv_prune_tree(model.root, data, model.strategy, model.control, opt, RngStream(a.seed.value_or(default_seed()), 0));
        for (const auto& w : res.warnings) out << "warning: " << w << "\n";
        model.root = std::move(res.tree);
        renumber(model.root);
        std::string table = "alpha,leaves,cv_loss,cv_se\n";
        for (const auto& e : res.alpha_path) {
            table += fmt(e.alpha, 17) + "," + std::to_string(e.leaves) + "," + fmt(e.cv_loss, 17) + "," +
                     fmt(e.cv_se, 17) + "\n";
        }
        if (!a.path_out.empty()) write_text(a.path_out, table);
        out << "alpha path:\n" << table << "chosen alpha " << fmt(res.chosen_alpha, 6) << " ("
            << res.usable_folds << " usable folds)\n";
    } else {
        throw UnsupportedConfiguration("unknown method '" + a.method + "' (cc, aic, bic)");
    }
    save_model(a.out, model);
    out << "pruned " << before << " -> " << count_leaves(model.root) << " leaves\n";
    out << format_tree(model.root);
    out << "tree written to " << a.out << "\n";
    return 0;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Model-based recursive partitioning with linear node models"};
    app.name(args.empty() ? "urp" : args.front());
    app.require_subcommand(1);

    FitArgs fit;
    auto* fit_cmd = app.add_subcommand("fit", "Grow a tree on a CSV file");
    fit_cmd->add_option("input", fit.input, "CSV file")->required();
    fit_cmd->add_option("--response", fit.response, "Response column")->required();
    fit_cmd->add_option("--regressor", fit.regressor, "Regressor column")->required();
    fit_cmd->add_option("--split", fit.split, "Split variable columns")->required()->delimiter(',');
    fit_cmd->add_option("--categorical", fit.categorical, "Split columns read as categorical")->delimiter(',');
    fit_cmd->add_option("--out", fit.out, "Tree JSON output")->capture_default_str();
    add_growth_flags(fit_cmd, fit.common);

    SimulateArgs sim;
    auto* sim_cmd = app.add_subcommand("simulate", "Run a simulation study");
    sim_cmd->add_option("--scenario", sim.scenario, "stump, tree or stump_continuous")->capture_default_str();
    sim_cmd->add_option("--variation", sim.variation, "intercept, slope or both")->capture_default_str();
    sim_cmd->add_option("--xi", sim.xis, "Split points")->delimiter(',');
    sim_cmd->add_option("--delta", sim.deltas, "Effect sizes")->delimiter(',');
    sim_cmd->add_option("--n", sim.n, "Observations per dataset")->capture_default_str();
    sim_cmd->add_option("--reps", sim.reps, "Replications per cell")->capture_default_str();
    sim_cmd->add_option("--j-noise", sim.j_noise, "Additional split variables")->capture_default_str();
    sim_cmd->add_option("--strategies", sim.strategies, "Comma-separated strategy names")->capture_default_str();
    sim_cmd->add_option("--pruning", sim.pruning, "pre or post")->capture_default_str();
    sim_cmd->add_option("--folds", sim.folds, "Cross-validation folds for post-pruning")->capture_default_str();
    sim_cmd->add_option("--seed", sim.common.seed, "Seed (default: URP_SEED or 1)");
    sim_cmd->add_option("--threads", sim.common.threads, "Worker threads")->capture_default_str();
    sim_cmd->add_option("--out", sim.out, "Long-format CSV")->capture_default_str();
    sim_cmd->add_option("--aggregate", sim.aggregate, "Aggregated CSV")->capture_default_str();
    sim_cmd->add_option("--alpha", sim.common.alpha, "Significance level")
        ->capture_default_str()
        ->check(CLI::Range(0.0, 1.0));
    sim_cmd->add_option("--min-node-size", sim.common.min_node_size, "Minimum observations per child")
        ->capture_default_str();
    sim_cmd->add_option("--min-segment", sim.common.min_segment, "Minimum segment for max-type tests")
        ->capture_default_str();
    sim_cmd->add_option("--max-depth", sim.common.max_depth, "Maximum tree depth")->capture_default_str();

    PruneArgs prune;
    auto* prune_cmd = app.add_subcommand("prune", "Prune a fitted tree");
    prune_cmd->add_option("tree", prune.tree, "Tree JSON")->required();
    prune_cmd->add_option("input", prune.input, "CSV the tree was grown on")->required();
    prune_cmd->add_option("--method", prune.method, "cc, aic or bic")
        ->capture_default_str()
        ->check(CLI::IsMember({"cc", "aic", "bic"}));
    prune_cmd->add_option("--folds", prune.folds, "Cross-validation folds")->capture_default_str();
    prune_cmd->add_flag("--one-se", prune.one_se, "Use the one-standard-error rule");
    prune_cmd->add_option("--seed", prune.seed, "Seed (default: URP_SEED or 1)");
    prune_cmd->add_option("--threads", prune.threads, "Worker threads")->capture_default_str();
    prune_cmd->add_option("--out", prune.out, "Pruned tree JSON")->capture_default_str();
    prune_cmd->add_option("--path-out", prune.path_out, "Alpha path CSV");

    std::vector<std::string> rest(args.size() > 1 ? args.begin() + 1 : args.end(), args.end());
    std::reverse(rest.begin(), rest.end());
    try {
        app.parse(rest);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err) == 0 ? 0 : 2;
    }

    try {
        if (fit_cmd->parsed()) return cmd_fit(fit, out);
        if (sim_cmd->parsed()) return cmd_simulate(sim, out);
        if (prune_cmd->parsed()) return cmd_prune(prune, out);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}

} // namespace urp::cli
