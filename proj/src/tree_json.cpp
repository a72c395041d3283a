#include "urp/tree_json.hpp"

#include "urp/errors.hpp"

#include <fstream>
#include <sstream>

namespace urp {

using json = nlohmann::ordered_json;

namespace {

constexpr const char* kFormat = "urp-tree/1";

std::string kind_name(ColumnKind kind) {
    return kind == ColumnKind::numeric ? "numeric" : "categorical";
}

ColumnKind kind_from(const std::string& s) {
    if (s == "numeric") return ColumnKind::numeric;
    if (s == "categorical") return ColumnKind::categorical;
    throw DataError("unknown column kind '" + s + "'");
}

LimitLaw law_from(const std::string& s) {
    for (const LimitLaw law : {LimitLaw::chi2, LimitLaw::normal, LimitLaw::suplm, LimitLaw::degenerate}) {
        if (to_string(law) == s) return law;
    }
    throw DataError("unknown limit law '" + s + "'");
}

json outcome_json(const TestOutcome& o) {
    json j;
    j["variable"] = o.variable;
    j["p_value"] = o.p_value;
    j["statistic"] = o.statistic;
    j["law"] = std::string(to_string(o.law));
    if (o.df) j["df"] = *o.df;
    if (o.law == LimitLaw::suplm) {
        j["trim_from"] = o.trim_from;
        j["trim_to"] = o.trim_to;
    }
    return j;
}

TestOutcome outcome_from(const json& j) {
    TestOutcome o;
    o.variable = j.at("variable").get<std::string>();
    o.p_value = j.at("p_value").get<double>();
    o.statistic = j.at("statistic").get<double>();
    o.law = law_from(j.at("law").get<std::string>());
    if (j.contains("df")) o.df = j.at("df").get<int>();
    if (j.contains("trim_from")) o.trim_from = j.at("trim_from").get<double>();
    if (j.contains("trim_to")) o.trim_to = j.at("trim_to").get<double>();
    return o;
}

TreeNode node_from(const json& j, const std::vector<ColumnInfo>& columns) {
    TreeNode node;
    node.id = j.at("id").get<int>();
    node.depth = j.at("depth").get<int>();
    node.n_node = j.at("n").get<std::size_t>();
    node.intercept = j.at("intercept").get<double>();
    node.slope = j.at("slope").get<double>();
    node.rss = j.at("rss").get<double>();
    node.model_degenerate = j.value("model_degenerate", false);
    for (const auto& t : j.at("tests")) node.outcomes.push_back(outcome_from(t));
    const auto& sj = j.at("split");
    if (!sj.is_null()) {
        Split s;
        s.name = sj.at("variable").get<std::string>();
        s.kind = kind_from(sj.at("kind").get<std::string>());
        bool found = false;
        for (std::size_t c = 0; c < columns.size(); ++c) {
            if (columns[c].name == s.name) {
                s.variable = c;
                found = true;
            }
        }
        if (!found) throw DataError("split on undeclared variable '" + s.name + "'");
        if (s.kind == ColumnKind::numeric) {
            s.point = sj.at("point").get<double>();
        } else {
            s.left_levels = sj.at("left_levels").get<std::vector<std::string>>();
            s.right_levels = sj.at("right_levels").get<std::vector<std::string>>();
            s.unseen_left = sj.at("unseen_left").get<bool>();
        }
        node.split = std::move(s);
        const auto& ch = j.at("children");
        if (ch.size() != 2) throw DataError("split node must have exactly two children");
        for (const auto& c : ch) node.children.push_back(node_from(c, columns));
    } else if (j.contains("children") && !j.at("children").empty()) {
        throw DataError("leaf node must not have children");
    }
    return node;
}

} // namespace

CsvSchema TreeModel::schema() const {
    CsvSchema s;
    s.response = response;
    s.regressor = regressor;
    for (const auto& c : split_variables) {
        s.split.push_back(c.name);
        if (c.kind == ColumnKind::categorical) s.categorical.push_back(c.name);
    }
    return s;
}

TreeModel make_model(const Dataset& data, const CsvSchema& schema, const StrategyConfig& strategy,
                     const GrowControl& control, TreeNode root) {
    TreeModel m;
    m.response = schema.response;
    m.regressor = schema.regressor;
    for (const auto& col : data.z()) m.split_variables.push_back({col.name, col.kind, col.levels});
    m.strategy = strategy;
    m.control = control;
    m.root = std::move(root);
    return m;
}

void check_schema(const TreeModel& model, const Dataset& data) {
    if (data.num_split() != model.split_variables.size()) {
        throw DataError("data has " + std::to_string(data.num_split()) + " split variables, tree expects " +
                        std::to_string(model.split_variables.size()));
    }
    for (std::size_t j = 0; j < model.split_variables.size(); ++j) {
        const auto& info = model.split_variables[j];
        if (data.z(j).name != info.name || data.z(j).kind != info.kind) {
            throw DataError("split variable '" + info.name + "' does not match the data schema");
        }
    }
}

json to_json(const TreeNode& node) {
    json j;
    j["id"] = node.id;
    j["depth"] = node.depth;
    j["n"] = node.n_node;
    j["intercept"] = node.intercept;
    j["slope"] = node.slope;
    j["rss"] = node.rss;
    if (node.model_degenerate) j["model_degenerate"] = true;
    j["tests"] = json::array();
    for (const auto& o : node.outcomes) j["tests"].push_back(outcome_json(o));
    if (node.split) {
        const Split& s = *node.split;
        json sj;
        sj["variable"] = s.name;
        sj["kind"] = kind_name(s.kind);
        if (s.kind == ColumnKind::numeric) {
            sj["point"] = s.point;
        } else {
            sj["left_levels"] = s.left_levels;
            sj["right_levels"] = s.right_levels;
            sj["unseen_left"] = s.unseen_left;
        }
        j["split"] = sj;
    } else {
        j["split"] = nullptr;
    }
    j["children"] = json::array();
    for (const auto& c : node.children) j["children"].push_back(to_json(c));
    return j;
}

json to_json(const TreeModel& model) {
    json doc;
    doc["format"] = kFormat;
    doc["response"] = model.response;
    doc["regressor"] = model.regressor;
    doc["split_variables"] = json::array();
    for (const auto& c : model.split_variables) {
        json cj;
        cj["name"] = c.name;
        cj["kind"] = kind_name(c.kind);
        if (c.kind == ColumnKind::categorical) cj["levels"] = c.levels;
        doc["split_variables"].push_back(cj);
    }
    json st;
    st["use_scores"] = model.strategy.use_scores;
    st["dichotomize"] = model.strategy.dichotomize;
    st["split_mode"] = std::string(to_string(model.strategy.split_mode));
    st["alpha"] = model.strategy.alpha;
    st["min_segment"] = model.strategy.min_segment;
    doc["strategy"] = st;
    json ct;
    ct["alpha"] = model.control.alpha;
    ct["min_node_size"] = model.control.min_node_size;
    ct["min_segment"] = model.control.min_segment;
    ct["max_depth"] = model.control.max_depth;
    ct["prepruning"] = model.control.prepruning;
    doc["control"] = ct;
    doc["root"] = to_json(model.root);
    return doc;
}

TreeModel model_from_json(const json& doc) {
    try {
        if (doc.value("format", std::string{}) != kFormat) {
            throw DataError("not a tree document (expected format '" + std::string(kFormat) + "')");
        }
        TreeModel m;
        m.response = doc.at("response").get<std::string>();
        m.regressor = doc.at("regressor").get<std::string>();
        for (const auto& cj : doc.at("split_variables")) {
            ColumnInfo c;
            c.name = cj.at("name").get<std::string>();
            c.kind = kind_from(cj.at("kind").get<std::string>());
            if (cj.contains("levels")) c.levels = cj.at("levels").get<std::vector<std::string>>();
            m.split_variables.push_back(std::move(c));
        }
        const auto& st = doc.at("strategy");
        m.strategy.use_scores = st.at("use_scores").get<bool>();
        m.strategy.dichotomize = st.at("dichotomize").get<bool>();
        m.strategy.split_mode = split_mode_from_string(st.at("split_mode").get<std::string>());
        m.strategy.alpha = st.at("alpha").get<double>();
        m.strategy.min_segment = st.at("min_segment").get<int>();
        const auto& ct = doc.at("control");
        m.control.alpha = ct.at("alpha").get<double>();
        m.control.min_node_size = ct.at("min_node_size").get<int>();
        m.control.min_segment = ct.at("min_segment").get<int>();
        m.control.max_depth = ct.at("max_depth").get<int>();
        m.control.prepruning = ct.at("prepruning").get<bool>();
        m.root = node_from(doc.at("root"), m.split_variables);
        return m;
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("malformed tree document: ") + e.what());
    }
}

std::string dump_model(const TreeModel& model) {
    return to_json(model).dump(2) + "\n";
}

void save_model(const std::filesystem::path& path, const TreeModel& model) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write file '" + path.string() + "'");
    out << dump_model(model);
}

TreeModel load_model(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open file '" + path.string() + "'");
    json doc;
    try {
        doc = json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw DataError("cannot parse '" + path.string() + "': " + e.what());
    }
    return model_from_json(doc);
}

} // namespace urp
