#include "urp/inference.hpp"

#include "urp/errors.hpp"
#include "urp/special.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <sstream>

namespace urp {

int resolve_min_segment(int requested, std::size_t n) noexcept {
    if (requested > 0) return requested;
    const auto tenth = static_cast<int>(std::ceil(0.1 * static_cast<double>(n)));
    return std::max(10, tenth);
}

namespace {

std::string lowercase(std::string_view s) {
    std::string out(s);
    for (char& c : out) {
        c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        if (c == '+' || c == '-') c = '_';
    }
    return out;
}

const std::map<std::string, StrategyConfig>& named_strategies() {
    static const std::map<std::string, StrategyConfig> table = {
        {"ctree", {true, false, SplitMode::lin}},
        {"mob", {true, false, SplitMode::max}},
        {"guide", {false, true, SplitMode::cat}},
        {"guide_scores", {true, true, SplitMode::cat}},
        {"ctree_max", {true, false, SplitMode::max}},
        {"ctree_cat", {true, false, SplitMode::cat}},
        {"ctree_dich", {true, true, SplitMode::lin}},
        {"mob_cat", {true, false, SplitMode::cat}},
        {"mob_dich", {true, true, SplitMode::max}},
    };
    return table;
}

} // namespace

std::vector<std::string> strategy_names() {
    std::vector<std::string> names;
    for (const auto& [name, cfg] : named_strategies()) names.push_back(name);
    return names;
}

StrategyConfig strategy_from_name(std::string_view name) {
    const std::string key = lowercase(name);
    const auto& table = named_strategies();
    if (const auto it = table.find(key); it != table.end()) return it->second;

    // Explicit triple, e.g. "scores:raw:max".
    std::vector<std::string> parts;
    std::stringstream ss(key);
    for (std::string part; std::getline(ss, part, ':');) parts.push_back(part);
    if (parts.size() == 3) {
        StrategyConfig cfg;
        bool ok = true;
        if (parts[0] == "scores") cfg.use_scores = true;
        else if (parts[0] == "residuals") cfg.use_scores = false;
        else ok = false;
        if (parts[1] == "dich") cfg.dichotomize = true;
        else if (parts[1] == "raw") cfg.dichotomize = false;
        else ok = false;
        if (parts[2] == "lin") cfg.split_mode = SplitMode::lin;
        else if (parts[2] == "cat") cfg.split_mode = SplitMode::cat;
        else if (parts[2] == "max") cfg.split_mode = SplitMode::max;
        else ok = false;
        if (ok) return cfg;
    }

    std::string valid;
    for (const auto& n : strategy_names()) valid += (valid.empty() ? "" : ", ") + n;
    throw UnsupportedConfiguration("unknown strategy '" + std::string(name) + "'; valid strategies: " +
                                   valid + " (or residuals|scores:dich|raw:lin|cat|max)");
}

std::string strategy_triple(const StrategyConfig& config) {
    std::string s = config.use_scores ? "scores" : "residuals";
    s += config.dichotomize ? ":dich:" : ":raw:";
    s += to_string(config.split_mode);
    return s;
}

std::string_view engine_name(const StrategyConfig& config) {
    switch (config.split_mode) {
    case SplitMode::lin: return "conditional-inference";
    case SplitMode::max: return "fluctuation";
    case SplitMode::cat: return config.dichotomize ? "chi-square" : "anova-quadratic";
    }
    return "?";
}

std::string_view to_string(LimitLaw law) noexcept {
    switch (law) {
    case LimitLaw::chi2: return "chi2";
    case LimitLaw::normal: return "normal";
    case LimitLaw::suplm: return "suplm";
    case LimitLaw::degenerate: return "degenerate";
    }
    return "?";
}

TestOutcome TestOutcome::degenerate(std::string variable) {
    TestOutcome out;
    out.variable = std::move(variable);
    return out;
}

// ---------------------------------------------------------------------------

Eigen::VectorXd linear_statistic(const Eigen::MatrixXd& h, const Eigen::MatrixXd& g) {
    if (h.rows() != g.rows()) throw DataError("linear_statistic: row counts differ");
    const Eigen::MatrixXd t = g.transpose() * h; // P x Q
    return Eigen::Map<const Eigen::VectorXd>(t.data(), t.size());
}

Eigen::VectorXd linear_statistic(const GofMatrix& gof, const SplitTransform& g) {
    return linear_statistic(gof.values, g.design);
}

ConditionalMoments conditional_moments(const Eigen::MatrixXd& h, const Eigen::MatrixXd& g) {
    if (h.rows() != g.rows()) throw DataError("conditional_moments: row counts differ");
    const auto n = static_cast<double>(h.rows());
    if (h.rows() < 2) throw InsufficientData("conditional_moments needs at least 2 observations");
    const Eigen::Index p = g.cols();
    const Eigen::Index q = h.cols();

    const Eigen::VectorXd gsum = g.colwise().sum().transpose();
    const Eigen::VectorXd hbar = h.colwise().mean().transpose();
    const Eigen::MatrixXd hc = h.rowwise() - hbar.transpose();
    const Eigen::MatrixXd vh = (hc.transpose() * hc) / n;
    const Eigen::MatrixXd gg = g.transpose() * g;
    const Eigen::MatrixXd gsum_outer = gsum * gsum.transpose();

    ConditionalMoments m;
    const Eigen::MatrixXd mu = gsum * hbar.transpose();
    m.mu = Eigen::Map<const Eigen::VectorXd>(mu.data(), mu.size());
    m.sigma.resize(p * q, p * q);
    for (Eigen::Index a = 0; a < q; ++a) {
        for (Eigen::Index b = 0; b < q; ++b) {
            m.sigma.block(a * p, b * p, p, p) =
                vh(a, b) * (n / (n - 1.0) * gg - 1.0 / (n - 1.0) * gsum_outer);
        }
    }
    m.sigma = 0.5 * (m.sigma + m.sigma.transpose());
    return m;
}

ConditionalMoments conditional_moments(const GofMatrix& gof, const SplitTransform& g) {
    return conditional_moments(gof.values, g.design);
}

PseudoInverse symmetric_pinv(const Eigen::MatrixXd& a) {
    PseudoInverse out;
    out.inverse = Eigen::MatrixXd::Zero(a.rows(), a.cols());
    if (a.size() == 0) return out;
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(a);
    const Eigen::VectorXd& lambda = eig.eigenvalues();
    const double lmax = lambda.maxCoeff();
    if (!(lmax > 0.0) || !std::isfinite(lmax)) return out;
    const double tol = static_cast<double>(a.rows()) * lmax * 1e-12;
    Eigen::VectorXd inv = Eigen::VectorXd::Zero(lambda.size());
    for (Eigen::Index i = 0; i < lambda.size(); ++i) {
        if (lambda(i) > tol) {
            inv(i) = 1.0 / lambda(i);
            ++out.rank;
        }
    }
    out.inverse = eig.eigenvectors() * inv.asDiagonal() * eig.eigenvectors().transpose();
    return out;
}

TestOutcome c_quad(const Eigen::VectorXd& t, const ConditionalMoments& m) {
    const PseudoInverse pinv = symmetric_pinv(m.sigma);
    TestOutcome out;
    if (pinv.rank == 0) return out;
    const Eigen::VectorXd d = t - m.mu;
    out.statistic = std::max(0.0, d.dot(pinv.inverse * d));
    out.df = pinv.rank;
    out.law = LimitLaw::chi2;
    out.p_value = special::chi2_sf(out.statistic, pinv.rank);
    return out;
}

TestOutcome c_max(const Eigen::VectorXd& t, const ConditionalMoments& m) {
    if (t.size() != 1 || m.sigma.size() != 1) {
        throw UnsupportedConfiguration("c_max is only supported for a scalar linear statistic");
    }
    TestOutcome out;
    const double var = m.sigma(0, 0);
    if (!(var > 0.0)) return out;
    out.statistic = std::fabs(t(0) - m.mu(0)) / std::sqrt(var);
    out.law = LimitLaw::normal;
    out.p_value = special::normal_two_sided(out.statistic);
    return out;
}

// ---------------------------------------------------------------------------

ChiSquare chisq_contingency(const Eigen::MatrixXd& observed) {
    if (observed.rows() != 2) throw DataError("chisq_contingency expects a 2 x P table");
    std::vector<Eigen::Index> cols;
    for (Eigen::Index c = 0; c < observed.cols(); ++c) {
        if (observed.col(c).sum() > 0.0) cols.push_back(c);
    }
    ChiSquare out;
    if (cols.size() < 2) return out;
    const double r0 = observed.row(0).sum();
    const double r1 = observed.row(1).sum();
    if (!(r0 > 0.0) || !(r1 > 0.0)) return out;
    const double total = r0 + r1;
    for (const Eigen::Index c : cols) {
        const double colsum = observed.col(c).sum();
        for (int l = 0; l < 2; ++l) {
            const double expected = (l == 0 ? r0 : r1) * colsum / total;
            const double d = observed(l, c) - expected;
            out.statistic += d * d / expected;
        }
    }
    out.df = static_cast<int>(cols.size()) - 1;
    return out;
}

TestOutcome chisq_statistic(const GofMatrix& gof, const SplitTransform& g) {
    if (gof.rows() != g.design.rows()) throw DataError("chisq_statistic: row counts differ");
    std::vector<Eigen::Index> bin(static_cast<std::size_t>(g.design.rows()));
    for (Eigen::Index i = 0; i < g.design.rows(); ++i) {
        g.design.row(i).maxCoeff(&bin[static_cast<std::size_t>(i)]);
    }
    TestOutcome out;
    int df = 0;
    double stat = 0.0;
    for (Eigen::Index k = 0; k < gof.k(); ++k) {
        Eigen::MatrixXd table = Eigen::MatrixXd::Zero(2, g.p());
        for (Eigen::Index i = 0; i < gof.rows(); ++i) {
            const int sign_class = gof.values(i, k) >= 0.5 ? 1 : 0;
            table(sign_class, bin[static_cast<std::size_t>(i)]) += 1.0;
        }
        const ChiSquare cs = chisq_contingency(table);
        stat += cs.statistic;
        df += cs.df;
    }
    if (df == 0) return out;
    out.statistic = stat;
    out.df = df;
    out.law = LimitLaw::chi2;
    out.p_value = special::chi2_sf(stat, df);
    return out;
}

// ---------------------------------------------------------------------------

TestOutcome run_strategy(const StrategyConfig& config, const LinearFit& fit, const SplitColumn& col) {
    if (col.size() != fit.n()) throw DataError("run_strategy: column length differs from node size");
    const std::size_t n = fit.n();
    const int min_segment = resolve_min_segment(config.min_segment, n);
    const GofMatrix gof = make_gof(fit, config.use_scores, config.dichotomize);
    const SplitMode mode = col.is_numeric() ? config.split_mode : SplitMode::cat;

    TestOutcome out;
    try {
        switch (mode) {
        case SplitMode::lin: {
            const SplitTransform g = make_split_transform(col, mode, min_segment);
            const Eigen::VectorXd t = linear_statistic(gof, g);
            const ConditionalMoments m = conditional_moments(gof, g);
            out = t.size() == 1 ? c_max(t, m) : c_quad(t, m);
            break;
        }
        case SplitMode::cat: {
            const SplitTransform g = make_split_transform(col, mode, min_segment);
            if (config.dichotomize) {
                out = chisq_statistic(gof, g);
            } else {
                out = c_quad(linear_statistic(gof, g), conditional_moments(gof, g));
            }
            break;
        }
        case SplitMode::max: {
            const SupLmResult r = suplm_statistic(gof, col, min_segment);
            out.statistic = r.statistic;
            out.law = LimitLaw::suplm;
            out.df = r.rank;
            out.trim_from = static_cast<double>(min_segment) / static_cast<double>(n);
            out.trim_to = 1.0 - out.trim_from;
            out.p_value = suplm_pvalue(r.statistic, r.rank, min_segment, n);
            break;
        }
        }
    } catch (const DegenerateColumn&) {
        out = TestOutcome{};
    } catch (const InsufficientData&) {
        out = TestOutcome{};
    }
    out.variable = col.name;
    out.p_value = std::clamp(out.p_value, 0.0, 1.0);
    return out;
}

Selection select_from_outcomes(std::vector<TestOutcome> outcomes, double alpha) {
    Selection sel;
    sel.outcomes = std::move(outcomes);
    for (std::size_t j = 0; j < sel.outcomes.size(); ++j) {
        const auto& o = sel.outcomes[j];
        if (o.is_degenerate()) continue;
        if (!sel.argmin || o.p_value < sel.outcomes[*sel.argmin].p_value) sel.argmin = j;
    }
    if (sel.argmin && sel.outcomes[*sel.argmin].p_value < alpha) sel.chosen = sel.argmin;
    return sel;
}

Selection select_variable(const StrategyConfig& config, const LinearFit& fit, const Dataset& data) {
    std::vector<TestOutcome> outcomes;
    outcomes.reserve(data.num_split());
    for (const auto& col : data.z()) outcomes.push_back(run_strategy(config, fit, col));
    return select_from_outcomes(std::move(outcomes), config.alpha);
}

} // namespace urp
