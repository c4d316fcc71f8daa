#include "xda/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>

#include "xda/error.hpp"

namespace xda {

const char* to_string(ColumnKind kind) {
    return kind == ColumnKind::Dimension ? "dimension" : "measure";
}

Column Column::dimension(std::string name, std::vector<std::string> categories,
                         std::vector<std::uint32_t> codes) {
    for (auto c : codes)
        if (c >= categories.size()) throw DataError("code out of range in column " + name);
    Column col;
    col.name_ = std::move(name);
    col.kind_ = ColumnKind::Dimension;
    col.categories_ = std::move(categories);
    col.codes_ = std::move(codes);
    return col;
}

Column Column::dimension_from_values(std::string name, const std::vector<std::string>& values) {
    std::set<std::string> uniq(values.begin(), values.end());
    std::vector<std::string> cats(uniq.begin(), uniq.end());
    std::unordered_map<std::string, std::uint32_t> lookup;
    for (std::uint32_t i = 0; i < cats.size(); ++i) lookup.emplace(cats[i], i);
    std::vector<std::uint32_t> codes;
    codes.reserve(values.size());
    for (const auto& v : values) codes.push_back(lookup.at(v));
    return dimension(std::move(name), std::move(cats), std::move(codes));
}

Column Column::measure(std::string name, std::vector<double> values) {
    Column col;
    col.name_ = std::move(name);
    col.kind_ = ColumnKind::Measure;
    col.values_ = std::move(values);
    return col;
}

Column Column::binned(std::string name, std::vector<std::string> labels,
                      std::vector<BinRange> ranges, std::vector<std::uint32_t> codes) {
    if (labels.size() != ranges.size()) throw DataError("bin labels and ranges differ in size");
    Column col = dimension(std::move(name), std::move(labels), std::move(codes));
    col.bins_ = std::move(ranges);
    return col;
}

std::size_t Column::size() const {
    return is_dimension() ? codes_.size() : values_.size();
}

std::optional<std::uint32_t> Column::code_of(std::string_view value) const {
    for (std::uint32_t i = 0; i < categories_.size(); ++i)
        if (categories_[i] == value) return i;
    return std::nullopt;
}

namespace {

std::string format_number(double v) {
    std::ostringstream os;
    os.precision(15);
    os << v;
    return os.str();
}

}  // namespace

std::string Column::value_string(std::size_t row) const {
    if (is_dimension()) return categories_.at(codes_.at(row));
    return format_number(values_.at(row));
}

Column Column::take(std::span<const std::size_t> rows) const {
    Column out;
    out.name_ = name_;
    out.kind_ = kind_;
    out.categories_ = categories_;
    out.bins_ = bins_;
    if (is_dimension()) {
        out.codes_.reserve(rows.size());
        for (auto r : rows) out.codes_.push_back(codes_[r]);
    } else {
        out.values_.reserve(rows.size());
        for (auto r : rows) out.values_.push_back(values_[r]);
    }
    return out;
}

Column Column::renamed(std::string name) const {
    Column out = *this;
    out.name_ = std::move(name);
    return out;
}

Dataset::Dataset(std::vector<Column> columns) : columns_(std::move(columns)) {
    rows_ = columns_.empty() ? 0 : columns_.front().size();
    for (std::size_t i = 0; i < columns_.size(); ++i) {
        if (columns_[i].size() != rows_)
            throw DataError("column " + columns_[i].name() + " has a different length");
        if (!index_.emplace(columns_[i].name(), i).second)
            throw DataError("duplicate column name: " + columns_[i].name());
    }
}

const Column& Dataset::column(std::string_view name) const {
    return columns_[column_index(name)];
}

bool Dataset::has_column(std::string_view name) const {
    return index_.count(std::string(name)) > 0;
}

std::size_t Dataset::column_index(std::string_view name) const {
    auto it = index_.find(std::string(name));
    if (it == index_.end()) throw UnknownColumnError("unknown column: " + std::string(name));
    return it->second;
}

std::vector<std::string> Dataset::column_names() const {
    std::vector<std::string> out;
    for (const auto& c : columns_) out.push_back(c.name());
    return out;
}

Dataset Dataset::take(std::span<const std::size_t> rows) const {
    std::vector<Column> cols;
    cols.reserve(columns_.size());
    for (const auto& c : columns_) cols.push_back(c.take(rows));
    Dataset out(std::move(cols));
    out.rows_ = rows.size();
    return out;
}

Dataset Dataset::with_column(Column column) const {
    auto cols = columns_;
    cols.push_back(std::move(column));
    return Dataset(std::move(cols));
}

Dataset Dataset::with_replaced(std::string_view name, Column column) const {
    auto cols = columns_;
    cols[column_index(name)] = std::move(column);
    return Dataset(std::move(cols));
}

Dataset Dataset::without_columns(const std::vector<std::string>& names) const {
    std::vector<Column> cols;
    for (const auto& c : columns_)
        if (std::find(names.begin(), names.end(), c.name()) == names.end()) cols.push_back(c);
    return Dataset(std::move(cols));
}

nlohmann::json Dataset::schema_json() const {
    nlohmann::json cols = nlohmann::json::array();
    for (const auto& c : columns_) cols.push_back({{"name", c.name()}, {"kind", to_string(c.kind())}});
    return {{"columns", cols}, {"rows", rows_}};
}

Subspace::Subspace(std::vector<Filter> filters) : filters_(std::move(filters)) {
    std::set<std::string> seen;
    for (const auto& f : filters_)
        if (!seen.insert(f.dimension).second)
            throw DataError("subspace has two filters on dimension " + f.dimension);
}

bool Subspace::constrains(std::string_view dimension) const {
    return std::any_of(filters_.begin(), filters_.end(),
                       [&](const Filter& f) { return f.dimension == dimension; });
}

Subspace Subspace::with(Filter f) const {
    auto fs = filters_;
    fs.push_back(std::move(f));
    return Subspace(std::move(fs));
}

const char* to_string(Aggregate agg) {
    switch (agg) {
        case Aggregate::Sum: return "SUM";
        case Aggregate::Avg: return "AVG";
        case Aggregate::Count: return "COUNT";
    }
    return "?";
}

Aggregate parse_aggregate(std::string_view text) {
    std::string t(text);
    std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) { return std::tolower(c); });
    if (t == "sum") return Aggregate::Sum;
    if (t == "avg" || t == "mean") return Aggregate::Avg;
    if (t == "count") return Aggregate::Count;
    throw DataError("unknown aggregate: " + std::string(text));
}

namespace {

const Column& categorical(const Dataset& d, std::string_view dim) {
    const Column& c = d.column(dim);
    if (!c.is_dimension()) throw DataError("column " + std::string(dim) + " is not categorical");
    return c;
}

}  // namespace

std::vector<bool> match_rows(const Dataset& d, const Filter& f) {
    return match_rows(d, Predicate{f.dimension, {f.value}});
}

std::vector<bool> match_rows(const Dataset& d, const Predicate& p) {
    const Column& c = categorical(d, p.dimension);
    std::vector<bool> wanted(c.cardinality(), false);
    for (const auto& v : p.values)
        if (auto code = c.code_of(v)) wanted[*code] = true;
    std::vector<bool> mask(d.row_count());
    auto codes = c.codes();
    for (std::size_t r = 0; r < mask.size(); ++r) mask[r] = wanted[codes[r]];
    return mask;
}

std::vector<bool> match_rows(const Dataset& d, const Subspace& s) {
    std::vector<bool> mask(d.row_count(), true);
    for (const auto& f : s.filters()) {
        auto m = match_rows(d, f);
        for (std::size_t r = 0; r < mask.size(); ++r) mask[r] = mask[r] && m[r];
    }
    return mask;
}

std::vector<std::size_t> mask_to_rows(const std::vector<bool>& mask, bool keep) {
    std::vector<std::size_t> rows;
    for (std::size_t r = 0; r < mask.size(); ++r)
        if (mask[r] == keep) rows.push_back(r);
    return rows;
}

Dataset select(const Dataset& d, const Filter& f) { return d.take(mask_to_rows(match_rows(d, f))); }
Dataset select(const Dataset& d, const Predicate& p) { return d.take(mask_to_rows(match_rows(d, p))); }
Dataset select(const Dataset& d, const Subspace& s) { return d.take(mask_to_rows(match_rows(d, s))); }

Dataset select_complement(const Dataset& d, const Predicate& p) {
    return d.take(mask_to_rows(match_rows(d, p), false));
}

Dataset select_complement(const Dataset& d, const Subspace& s) {
    return d.take(mask_to_rows(match_rows(d, s), false));
}

double aggregate(const Dataset& d, std::string_view measure, Aggregate agg) {
    if (agg == Aggregate::Count) return static_cast<double>(d.row_count());
    const Column& c = d.column(measure);
    if (!c.is_measure()) throw DataError("column " + std::string(measure) + " is not a measure");
    auto vals = c.values();
    double sum = std::accumulate(vals.begin(), vals.end(), 0.0);
    if (agg == Aggregate::Sum) return sum;
    if (vals.empty()) throw EmptyAggregateError("AVG over an empty selection");
    return sum / static_cast<double>(vals.size());
}

Column discretize_column(const Column& measure, std::size_t bins, std::string name) {
    if (!measure.is_measure()) throw DataError("column " + measure.name() + " is not a measure");
    if (bins < 2) throw DataError("discretize needs at least 2 bins");
    auto vals = measure.values();
    std::vector<double> sorted(vals.begin(), vals.end());
    std::sort(sorted.begin(), sorted.end());
    const std::size_t n = sorted.size();

    // Upper cut points; value v falls in the first bin whose cut is >= v.
    std::vector<double> cuts;
    for (std::size_t b = 1; b < bins && n > 0; ++b) {
        double cut = sorted[(b * n) / bins - ((b * n) / bins > 0 ? 1 : 0)];
        if (cuts.empty() || cut > cuts.back()) cuts.push_back(cut);
    }
    if (n > 0 && !cuts.empty() && cuts.back() >= sorted.back()) cuts.pop_back();

    const std::size_t k = cuts.size() + 1;
    std::vector<std::uint32_t> codes(n);
    for (std::size_t r = 0; r < n; ++r) {
        auto it = std::lower_bound(cuts.begin(), cuts.end(), vals[r]);
        codes[r] = static_cast<std::uint32_t>(it - cuts.begin());
    }
    std::vector<BinRange> ranges(k, BinRange{std::numeric_limits<double>::infinity(),
                                             -std::numeric_limits<double>::infinity()});
    for (std::size_t r = 0; r < n; ++r) {
        auto& br = ranges[codes[r]];
        br.lo = std::min(br.lo, vals[r]);
        br.hi = std::max(br.hi, vals[r]);
    }
    std::vector<std::string> labels;
    for (std::size_t b = 0; b < k; ++b) {
        if (ranges[b].lo > ranges[b].hi) ranges[b] = {0.0, 0.0};
        labels.push_back("[" + format_number(ranges[b].lo) + ", " + format_number(ranges[b].hi) + "]");
    }
    // Labels could coincide only for empty bins, which equal-frequency cuts never produce.
    return Column::binned(std::move(name), std::move(labels), std::move(ranges), std::move(codes));
}

Dataset discretize(const Dataset& d, std::string_view measure, std::size_t bins) {
    return d.with_column(discretize_column(d.column(measure), bins, std::string(measure) + "_bin"));
}

Dataset discretize_measures(const Dataset& d, std::size_t bins) {
    std::vector<Column> cols;
    for (const auto& c : d.columns())
        cols.push_back(c.is_measure() ? discretize_column(c, bins, c.name()) : c);
    return Dataset(std::move(cols));
}

}  // namespace xda
