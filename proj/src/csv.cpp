#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include "xda/dataset.hpp"
#include "xda/error.hpp"

namespace xda {

namespace {

std::vector<std::vector<std::string>> split_records(std::string_view text) {
    std::vector<std::vector<std::string>> records;
    std::vector<std::string> row;
    std::string field;
    bool quoted = false;
    bool any = false;
    for (std::size_t i = 0; i < text.size(); ++i) {
        char c = text[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field += c;
            }
            continue;
        }
        switch (c) {
            case '"': quoted = true; any = true; break;
            case ',':
                row.push_back(std::move(field));
                field.clear();
                any = true;
                break;
            case '\r': break;
            case '\n':
                if (any || !field.empty()) {
                    row.push_back(std::move(field));
                    records.push_back(std::move(row));
                }
                row.clear();
                field.clear();
                any = false;
                break;
            default: field += c; any = true;
        }
    }
    if (quoted) throw DataError("unterminated quoted field");
    if (any || !field.empty()) {
        row.push_back(std::move(field));
        records.push_back(std::move(row));
    }
    return records;
}

std::string trim(std::string s) {
    auto b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return {};
    auto e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
}

bool parse_double(const std::string& s, double& out) {
    if (s.empty()) return false;
    const char* first = s.data();
    if (*first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), out);
    return ec == std::errc() && ptr == s.data() + s.size();
}

std::string quote(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + '"';
}

}  // namespace

Dataset parse_csv(std::string_view text, const CsvOptions& options) {
    if (text.size() >= 3 && text.substr(0, 3) == "\xEF\xBB\xBF") text.remove_prefix(3);
    auto records = split_records(text);
    if (records.empty()) throw DataError("CSV has no header row");
    std::vector<std::string> header;
    for (auto& h : records.front()) header.push_back(trim(h));
    std::set<std::string> seen;
    for (const auto& h : header)
        if (!seen.insert(h).second) throw DataError("duplicate header: " + h);
    for (const auto& [name, kind] : options.kind_hints)
        if (!seen.count(name)) throw UnknownColumnError("hint for unknown column: " + name);

    const std::size_t w = header.size();
    std::vector<std::vector<std::string>> cells(w);
    for (std::size_t r = 1; r < records.size(); ++r) {
        auto& rec = records[r];
        if (rec.size() != w)
            throw DataError("row " + std::to_string(r) + " has " + std::to_string(rec.size()) +
                            " fields, expected " + std::to_string(w));
        bool missing = false;
        for (auto& f : rec) {
            f = trim(f);
            if (f.empty()) missing = true;
        }
        if (missing) continue;
        for (std::size_t c = 0; c < w; ++c) cells[c].push_back(std::move(rec[c]));
    }
    if (w == 0 || cells.front().empty()) throw DataError("CSV has no complete data rows");

    std::vector<Column> cols;
    for (std::size_t c = 0; c < w; ++c) {
        std::vector<double> nums(cells[c].size());
        bool numeric = true;
        for (std::size_t r = 0; r < nums.size() && numeric; ++r) numeric = parse_double(cells[c][r], nums[r]);
        ColumnKind kind = numeric ? ColumnKind::Measure : ColumnKind::Dimension;
        if (auto it = options.kind_hints.find(header[c]); it != options.kind_hints.end()) kind = it->second;
        if (kind == ColumnKind::Measure) {
            if (!numeric) throw DataError("column " + header[c] + " is not numeric");
            cols.push_back(Column::measure(header[c], std::move(nums)));
        } else {
            cols.push_back(Column::dimension_from_values(header[c], cells[c]));
        }
    }
    return Dataset(std::move(cols));
}

Dataset load_csv(const std::string& path, const CsvOptions& options) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot read file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_csv(ss.str(), options);
}

std::string to_csv(const Dataset& d) {
    std::ostringstream os;
    const auto& cols = d.columns();
    for (std::size_t c = 0; c < cols.size(); ++c) os << (c ? "," : "") << quote(cols[c].name());
    os << '\n';
    for (std::size_t r = 0; r < d.row_count(); ++r) {
        for (std::size_t c = 0; c < cols.size(); ++c) os << (c ? "," : "") << quote(cols[c].value_string(r));
        os << '\n';
    }
    return os.str();
}

void write_csv(const Dataset& d, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write file: " + path);
    out << to_csv(d);
}

}  // namespace xda
