#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <json.hpp>

namespace xda {

enum class ColumnKind { Dimension, Measure };

const char* to_string(ColumnKind kind);

/// Numeric range covered by one bin of a discretized measure.
struct BinRange {
    double lo = 0.0;
    double hi = 0.0;
};

/// One named column. Dimensions are dictionary encoded: `categories()` holds
/// the active domain in canonical order and `codes()` indexes into it.
class Column {
public:
    static Column dimension(std::string name, std::vector<std::string> categories,
                            std::vector<std::uint32_t> codes);
    /// Builds a dimension from raw strings; categories are sorted lexicographically.
    static Column dimension_from_values(std::string name, const std::vector<std::string>& values);
    static Column measure(std::string name, std::vector<double> values);
    /// Categorical column of equal-frequency bins; categories follow bin order.
    static Column binned(std::string name, std::vector<std::string> labels,
                         std::vector<BinRange> ranges, std::vector<std::uint32_t> codes);

    const std::string& name() const { return name_; }
    ColumnKind kind() const { return kind_; }
    bool is_dimension() const { return kind_ == ColumnKind::Dimension; }
    bool is_measure() const { return kind_ == ColumnKind::Measure; }
    std::size_t size() const;

    const std::vector<std::string>& categories() const { return categories_; }
    std::size_t cardinality() const { return categories_.size(); }
    std::span<const std::uint32_t> codes() const { return codes_; }
    std::span<const double> values() const { return values_; }
    /// Bin ranges parallel to `categories()`; empty unless the column came from discretize().
    const std::vector<BinRange>& bins() const { return bins_; }
    bool is_binned() const { return !bins_.empty(); }

    std::optional<std::uint32_t> code_of(std::string_view value) const;
    /// String form of row `row` (category label or formatted number).
    std::string value_string(std::size_t row) const;

    Column take(std::span<const std::size_t> rows) const;
    Column renamed(std::string name) const;

private:
    std::string name_;
    ColumnKind kind_ = ColumnKind::Dimension;
    std::vector<std::string> categories_;
    std::vector<std::uint32_t> codes_;
    std::vector<double> values_;
    std::vector<BinRange> bins_;
};

/// Immutable columnar table of dimensions and measures.
class Dataset {
public:
    Dataset() = default;
    explicit Dataset(std::vector<Column> columns);

    std::size_t row_count() const { return rows_; }
    std::size_t column_count() const { return columns_.size(); }
    const std::vector<Column>& columns() const { return columns_; }
    const Column& column(std::size_t i) const { return columns_.at(i); }
    const Column& column(std::string_view name) const;
    bool has_column(std::string_view name) const;
    std::size_t column_index(std::string_view name) const;
    std::vector<std::string> column_names() const;

    Dataset take(std::span<const std::size_t> rows) const;
    Dataset with_column(Column column) const;
    /// Copy with `name` replaced by `column` (same position).
    Dataset with_replaced(std::string_view name, Column column) const;
    Dataset without_columns(const std::vector<std::string>& names) const;

    nlohmann::json schema_json() const;

private:
    std::vector<Column> columns_;
    std::unordered_map<std::string, std::size_t> index_;
    std::size_t rows_ = 0;
};

/// Equality assertion `dimension = value`.
struct Filter {
    std::string dimension;
    std::string value;
};

/// Disjunction of filters on one dimension.
struct Predicate {
    std::string dimension;
    std::vector<std::string> values;

    std::size_t size() const { return values.size(); }
};

/// Conjunction of filters on pairwise distinct dimensions.
class Subspace {
public:
    Subspace() = default;
    explicit Subspace(std::vector<Filter> filters);

    const std::vector<Filter>& filters() const { return filters_; }
    bool empty() const { return filters_.empty(); }
    bool constrains(std::string_view dimension) const;
    Subspace with(Filter f) const;

private:
    std::vector<Filter> filters_;
};

enum class Aggregate { Sum, Avg, Count };

const char* to_string(Aggregate agg);
Aggregate parse_aggregate(std::string_view text);

/// Row mask helpers. Values outside the active domain match nothing.
std::vector<bool> match_rows(const Dataset& d, const Filter& f);
std::vector<bool> match_rows(const Dataset& d, const Predicate& p);
std::vector<bool> match_rows(const Dataset& d, const Subspace& s);
std::vector<std::size_t> mask_to_rows(const std::vector<bool>& mask, bool keep = true);

Dataset select(const Dataset& d, const Filter& f);
Dataset select(const Dataset& d, const Predicate& p);
Dataset select(const Dataset& d, const Subspace& s);
/// D - D_P: rows not matching the predicate.
Dataset select_complement(const Dataset& d, const Predicate& p);
Dataset select_complement(const Dataset& d, const Subspace& s);

double aggregate(const Dataset& d, std::string_view measure, Aggregate agg);

/// Appends `<measure>_bin`, an equal-frequency discretization of `measure`.
Dataset discretize(const Dataset& d, std::string_view measure, std::size_t bins);
/// The binned column alone, named `name`.
Column discretize_column(const Column& measure, std::size_t bins, std::string name);
/// Every measure replaced (same name, same position) by its binned version.
Dataset discretize_measures(const Dataset& d, std::size_t bins);

struct CsvOptions {
    std::map<std::string, ColumnKind> kind_hints;
};

Dataset load_csv(const std::string& path, const CsvOptions& options = {});
Dataset parse_csv(std::string_view text, const CsvOptions& options = {});
std::string to_csv(const Dataset& d);
void write_csv(const Dataset& d, const std::string& path);

}  // namespace xda
