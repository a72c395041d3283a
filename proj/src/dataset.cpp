#include "urp/dataset.hpp"

#include "urp/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <unordered_map>

namespace urp {

SplitColumn SplitColumn::numeric(std::string name, std::vector<double> values) {
    for (const double v : values) {
        if (!std::isfinite(v)) throw DataError("column '" + name + "' has a non-finite value");
    }
    SplitColumn col;
    col.name = std::move(name);
    col.kind = ColumnKind::numeric;
    col.values = std::move(values);
    return col;
}

SplitColumn SplitColumn::categorical(std::string name, std::vector<int> codes,
                                     std::vector<std::string> levels) {
    if (levels.size() < 2) {
        throw DataError("categorical column '" + name + "' needs at least two levels");
    }
    const int nlev = static_cast<int>(levels.size());
    for (const int c : codes) {
        if (c < 0 || c >= nlev) {
            throw DataError("categorical column '" + name + "' has an out-of-range level index");
        }
    }
    SplitColumn col;
    col.name = std::move(name);
    col.kind = ColumnKind::categorical;
    col.codes = std::move(codes);
    col.levels = std::move(levels);
    return col;
}

std::size_t SplitColumn::size() const noexcept {
    return kind == ColumnKind::numeric ? values.size() : codes.size();
}

SplitColumn SplitColumn::subset(const std::vector<std::size_t>& rows) const {
    SplitColumn out;
    out.name = name;
    out.kind = kind;
    out.levels = levels;
    if (kind == ColumnKind::numeric) {
        out.values.reserve(rows.size());
        for (const auto r : rows) out.values.push_back(values.at(r));
    } else {
        out.codes.reserve(rows.size());
        for (const auto r : rows) out.codes.push_back(codes.at(r));
    }
    return out;
}

Dataset::Dataset(std::vector<double> y, std::vector<double> x, std::vector<SplitColumn> z)
    : y_(std::move(y)), x_(std::move(x)), z_(std::move(z)) {
    if (y_.empty()) throw DataError("dataset must contain at least one observation");
    if (x_.size() != y_.size()) throw DataError("regressor length differs from response length");
    for (const auto& col : z_) {
        if (col.size() != y_.size()) {
            throw DataError("split column '" + col.name + "' length differs from response length");
        }
    }
}

std::size_t Dataset::split_index(const std::string& name) const {
    for (std::size_t j = 0; j < z_.size(); ++j) {
        if (z_[j].name == name) return j;
    }
    throw DataError("unknown split variable '" + name + "'");
}

Dataset Dataset::subset(const std::vector<std::size_t>& rows) const {
    std::vector<double> y, x;
    y.reserve(rows.size());
    x.reserve(rows.size());
    for (const auto r : rows) {
        y.push_back(y_.at(r));
        x.push_back(x_.at(r));
    }
    std::vector<SplitColumn> z;
    z.reserve(z_.size());
    for (const auto& col : z_) z.push_back(col.subset(rows));
    return Dataset(std::move(y), std::move(x), std::move(z));
}

// ---------------------------------------------------------------------------
// CSV

std::vector<std::vector<std::string>> parse_csv_records(const std::string& text) {
    std::vector<std::vector<std::string>> records;
    std::vector<std::string> record;
    std::string field;
    bool in_quotes = false;
    bool field_started = false;
    std::size_t i = 0;
    if (text.size() >= 3 && text.compare(0, 3, "\xEF\xBB\xBF") == 0) i = 3;

    auto end_field = [&] {
        record.push_back(std::move(field));
        field.clear();
        field_started = false;
    };
    auto end_record = [&] {
        end_field();
        records.push_back(std::move(record));
        record.clear();
    };

    for (; i < text.size(); ++i) {
        const char c = text[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field.push_back('"');
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                field.push_back(c);
            }
            continue;
        }
        switch (c) {
        case '"':
            if (!field.empty()) throw DataError("malformed CSV: quote inside unquoted field");
            in_quotes = true;
            field_started = true;
            break;
        case ',':
            end_field();
            break;
        case '\r':
            if (i + 1 < text.size() && text[i + 1] == '\n') ++i;
            end_record();
            break;
        case '\n':
            end_record();
            break;
        default:
            field.push_back(c);
            field_started = true;
        }
    }
    if (in_quotes) throw DataError("malformed CSV: unterminated quoted field");
    if (field_started || !field.empty() || !record.empty()) end_record();
    return records;
}

namespace {

double parse_number(const std::string& token, const std::string& column, std::size_t row) {
    std::string_view sv(token);
    while (!sv.empty() && (sv.front() == ' ' || sv.front() == '\t')) sv.remove_prefix(1);
    while (!sv.empty() && (sv.back() == ' ' || sv.back() == '\t')) sv.remove_suffix(1);
    if (!sv.empty() && sv.front() == '+') sv.remove_prefix(1);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(sv.data(), sv.data() + sv.size(), value);
    if (sv.empty() || ec != std::errc() || ptr != sv.data() + sv.size() || !std::isfinite(value)) {
        throw DataError("non-numeric value '" + token + "' in column '" + column + "' at row " +
                        std::to_string(row + 1));
    }
    return value;
}

std::string format_number(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

std::string quote_field(const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string out = "\"";
    for (const char c : s) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

} // namespace

Dataset parse_csv(const std::string& text, const CsvSchema& schema) {
    if (schema.response.empty() || schema.regressor.empty()) {
        throw DataError("schema must name a response and a regressor");
    }
    if (schema.split.empty()) throw DataError("schema must name at least one split variable");

    const auto records = parse_csv_records(text);
    if (records.empty()) throw DataError("CSV has no header row");
    const auto& header = records.front();
    std::unordered_map<std::string, std::size_t> index;
    for (std::size_t c = 0; c < header.size(); ++c) index.emplace(header[c], c);
    auto column_of = [&](const std::string& name) {
        const auto it = index.find(name);
        if (it == index.end()) throw DataError("unknown column name '" + name + "'");
        return it->second;
    };

    const std::size_t n = records.size() - 1;
    if (n == 0) throw DataError("CSV has no data rows");
    for (std::size_t r = 1; r < records.size(); ++r) {
        if (records[r].size() != header.size()) {
            throw DataError("row " + std::to_string(r) + " has " + std::to_string(records[r].size()) +
                            " fields, header has " + std::to_string(header.size()));
        }
    }

    auto cell = [&](std::size_t row, std::size_t col, const std::string& name) -> const std::string& {
        const std::string& s = records[row + 1][col];
        if (s.find_first_not_of(" \t") == std::string::npos) {
            throw DataError("missing value in column '" + name + "' at row " + std::to_string(row + 1));
        }
        return s;
    };
    auto numeric_column = [&](const std::string& name) {
        const std::size_t c = column_of(name);
        std::vector<double> v(n);
        for (std::size_t r = 0; r < n; ++r) v[r] = parse_number(cell(r, c, name), name, r);
        return v;
    };

    std::vector<double> y = numeric_column(schema.response);
    std::vector<double> x = numeric_column(schema.regressor);
    std::vector<SplitColumn> z;
    for (const auto& name : schema.split) {
        const bool is_cat = std::find(schema.categorical.begin(), schema.categorical.end(), name) !=
                            schema.categorical.end();
        if (!is_cat) {
            z.push_back(SplitColumn::numeric(name, numeric_column(name)));
            continue;
        }
        const std::size_t c = column_of(name);
        std::vector<std::string> levels;
        std::unordered_map<std::string, int> code_of;
        std::vector<int> codes(n);
        for (std::size_t r = 0; r < n; ++r) {
            const std::string& s = cell(r, c, name);
            auto [it, inserted] = code_of.emplace(s, static_cast<int>(levels.size()));
            if (inserted) levels.push_back(s);
            codes[r] = it->second;
        }
        z.push_back(SplitColumn::categorical(name, std::move(codes), std::move(levels)));
    }
    for (const auto& name : schema.categorical) {
        if (std::find(schema.split.begin(), schema.split.end(), name) == schema.split.end()) {
            throw DataError("categorical column '" + name + "' is not a split variable");
        }
    }
    return Dataset(std::move(y), std::move(x), std::move(z));
}

Dataset load_csv(const std::filesystem::path& path, const CsvSchema& schema) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open file '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_csv(buf.str(), schema);
}

std::string format_csv(const Dataset& data, const CsvSchema& schema) {
    std::string out = quote_field(schema.response) + "," + quote_field(schema.regressor);
    for (const auto& col : data.z()) out += "," + quote_field(col.name);
    out += "\n";
    for (std::size_t i = 0; i < data.n(); ++i) {
        out += format_number(data.y()[i]) + "," + format_number(data.x()[i]);
        for (const auto& col : data.z()) {
            out += ",";
            out += col.is_numeric() ? format_number(col.values[i])
                                    : quote_field(col.levels[static_cast<std::size_t>(col.codes[i])]);
        }
        out += "\n";
    }
    return out;
}

void write_csv(const std::filesystem::path& path, const Dataset& data, const CsvSchema& schema) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write file '" + path.string() + "'");
    out << format_csv(data, schema);
}

// ---------------------------------------------------------------------------
// Ordering and quantiles

std::vector<std::size_t> order_permutation(const std::vector<double>& values) {
    std::vector<std::size_t> perm(values.size());
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::stable_sort(perm.begin(), perm.end(),
                     [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    return perm;
}

std::vector<std::size_t> order_permutation(const SplitColumn& col) {
    if (!col.is_numeric()) {
        throw DataError("order_permutation requires a numeric column ('" + col.name + "')");
    }
    return order_permutation(col.values);
}

double quantile_sorted(const std::vector<double>& sorted, double p) {
    if (sorted.empty()) throw InsufficientData("quantile of an empty sample");
    const double h = static_cast<double>(sorted.size() - 1) * p;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    if (lo + 1 >= sorted.size()) return sorted.back();
    const double frac = h - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

Quartiles empirical_quartiles(std::vector<double> values) {
    if (values.size() < 4) throw InsufficientData("quartiles need at least 4 observations");
    std::sort(values.begin(), values.end());
    return {quantile_sorted(values, 0.25), quantile_sorted(values, 0.5), quantile_sorted(values, 0.75)};
}

Quartiles empirical_quartiles(const SplitColumn& col) {
    if (!col.is_numeric()) {
        throw DataError("empirical_quartiles requires a numeric column ('" + col.name + "')");
    }
    return empirical_quartiles(col.values);
}

} // namespace urp
