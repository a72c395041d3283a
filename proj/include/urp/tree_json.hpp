#pragma once

#include "urp/dataset.hpp"
#include "urp/inference.hpp"
#include "urp/tree.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace urp {

struct ColumnInfo {
    std::string name;
    ColumnKind kind = ColumnKind::numeric;
    std::vector<std::string> levels;
};

/// A tree together with the schema and settings it was grown with; the unit
/// of serialization.
struct TreeModel {
    std::string response;
    std::string regressor;
    std::vector<ColumnInfo> split_variables;
    StrategyConfig strategy;
    GrowControl control;
    TreeNode root;

    /// Schema for reading the data this model was grown on.
    CsvSchema schema() const;
};

TreeModel make_model(const Dataset& data, const CsvSchema& schema, const StrategyConfig& strategy,
                     const GrowControl& control, TreeNode root);

/// Throws DataError when the data lacks a split variable of the model or
/// has it with a different kind.
void check_schema(const TreeModel& model, const Dataset& data);

nlohmann::ordered_json to_json(const TreeModel& model);
nlohmann::ordered_json to_json(const TreeNode& node);
TreeModel model_from_json(const nlohmann::ordered_json& doc);

std::string dump_model(const TreeModel& model);
void save_model(const std::filesystem::path& path, const TreeModel& model);
TreeModel load_model(const std::filesystem::path& path);

} // namespace urp
