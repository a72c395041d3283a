#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace urp {

enum class ColumnKind { numeric, categorical };

/// One candidate split variable. Numeric columns carry finite reals in
/// `values`; categorical columns carry level indices in `codes` plus the
/// level labels.
struct SplitColumn {
    std::string name;
    ColumnKind kind = ColumnKind::numeric;
    std::vector<double> values;
    std::vector<int> codes;
    std::vector<std::string> levels;

    static SplitColumn numeric(std::string name, std::vector<double> values);
    static SplitColumn categorical(std::string name, std::vector<int> codes,
                                   std::vector<std::string> levels);

    std::size_t size() const noexcept;
    bool is_numeric() const noexcept { return kind == ColumnKind::numeric; }

    /// Column restricted to the given rows (levels are kept intact).
    SplitColumn subset(const std::vector<std::size_t>& rows) const;
};

/// Response, regressor and split variables for n observations. Immutable
/// after construction; the constructor enforces equal column lengths.
class Dataset {
public:
    Dataset(std::vector<double> y, std::vector<double> x, std::vector<SplitColumn> z);

    const std::vector<double>& y() const noexcept { return y_; }
    const std::vector<double>& x() const noexcept { return x_; }
    const std::vector<SplitColumn>& z() const noexcept { return z_; }
    const SplitColumn& z(std::size_t j) const { return z_.at(j); }

    std::size_t n() const noexcept { return y_.size(); }
    std::size_t num_split() const noexcept { return z_.size(); }

    /// Index of the split variable with the given name; throws DataError.
    std::size_t split_index(const std::string& name) const;

    Dataset subset(const std::vector<std::size_t>& rows) const;

private:
    std::vector<double> y_;
    std::vector<double> x_;
    std::vector<SplitColumn> z_;
};

/// Which CSV columns play which role.
struct CsvSchema {
    std::string response;
    std::string regressor;
    std::vector<std::string> split;
    /// Split columns listed here are read as categorical; levels are coded
    /// in order of first appearance.
    std::vector<std::string> categorical;
};

/// Reads an RFC-4180 CSV file with a header row.
Dataset load_csv(const std::filesystem::path& path, const CsvSchema& schema);
Dataset parse_csv(const std::string& text, const CsvSchema& schema);

/// Writes response, regressor and split columns (numbers with 17
/// significant digits, categorical columns as their level labels).
void write_csv(const std::filesystem::path& path, const Dataset& data, const CsvSchema& schema);
std::string format_csv(const Dataset& data, const CsvSchema& schema);

/// Splits one CSV document into records of fields.
std::vector<std::vector<std::string>> parse_csv_records(const std::string& text);

/// Stable ascending sort order of a numeric column.
std::vector<std::size_t> order_permutation(const SplitColumn& col);
std::vector<std::size_t> order_permutation(const std::vector<double>& values);

struct Quartiles {
    double q1 = 0.0;
    double q2 = 0.0;
    double q3 = 0.0;
};

/// Linear-interpolation (type 7) quantile of already sorted values.
double quantile_sorted(const std::vector<double>& sorted, double p);

/// 25%, 50% and 75% type-7 empirical quantiles; requires n >= 4.
Quartiles empirical_quartiles(const SplitColumn& col);
Quartiles empirical_quartiles(std::vector<double> values);

} // namespace urp
