#include "cpf/table.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

namespace cpf {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

std::vector<std::string> split(const std::string& line, char delim) {
    std::vector<std::string> out;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, delim)) out.push_back(trim(cell));
    if (!line.empty() && line.back() == delim) out.emplace_back();
    return out;
}

bool parse_finite_double(const std::string& s, double& out) {
    if (s.empty()) return false;
    const char* begin = s.c_str();
    char* end = nullptr;
    errno = 0;
    double v = std::strtod(begin, &end);
    if (end != begin + s.size() || errno == ERANGE) return false;
    if (!std::isfinite(v)) return false;
    out = v;
    return true;
}

}  // namespace

Schema parse_schema_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("invalid schema JSON: ") + e.what());
    }
    Schema schema;
    if (!j.contains("columns") || !j["columns"].is_array())
        throw DataError("schema JSON must contain a \"columns\" array");
    for (const auto& c : j["columns"]) {
        Column col;
        col.name = c.at("name").get<std::string>();
        std::string kind = c.at("kind").get<std::string>();
        if (kind == "numeric")
            col.kind = ColumnKind::Numeric;
        else if (kind == "categorical")
            col.kind = ColumnKind::Categorical;
        else
            throw DataError("schema column \"" + col.name + "\": unknown kind \"" + kind + "\"");
        schema.columns.push_back(std::move(col));
    }
    if (j.contains("label") && !j["label"].is_null())
        schema.label_column = j["label"].get<std::string>();
    return schema;
}

RawTable build_table(const std::vector<std::string>& header,
                     const std::vector<std::vector<std::string>>& rows,
                     const LoadOptions& options) {
    const std::size_t ncols = header.size();
    if (ncols == 0) throw DataError("empty header row");
    {
        std::set<std::string> names(header.begin(), header.end());
        if (names.size() != ncols) throw DataError("duplicate column names in header");
    }

    auto is_missing = [&](const std::string& cell) {
        if (cell.empty()) return true;
        for (const auto& m : options.missing_markers)
            if (cell == m) return true;
        return false;
    };

    // Drop rows with missing values.
    RawTable table;
    table.n_input_rows = rows.size();
    std::vector<std::size_t> kept;
    kept.reserve(rows.size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r].size() != ncols)
            throw DataError("row " + std::to_string(r + 1) + " has " + std::to_string(rows[r].size()) +
                            " cells, expected " + std::to_string(ncols));
        bool missing = false;
        for (const auto& cell : rows[r])
            if (is_missing(cell)) { missing = true; break; }
        if (!missing) kept.push_back(r);
    }
    table.dropped_rows = rows.size() - kept.size();
    if (kept.empty()) throw DataError("zero rows after cleaning");

    // Resolve column kinds: from the user schema when given, else inferred.
    std::vector<ColumnKind> kinds(ncols);
    std::optional<std::string> label = options.label_column;
    if (options.schema) {
        const Schema& s = *options.schema;
        std::unordered_map<std::string, ColumnKind> by_name;
        for (const auto& c : s.columns) by_name[c.name] = c.kind;
        if (!label && s.label_column) label = s.label_column;
        for (std::size_t c = 0; c < ncols; ++c) {
            auto it = by_name.find(header[c]);
            if (it == by_name.end()) {
                if (label && header[c] == *label) {
                    kinds[c] = ColumnKind::Categorical;  // unused, column is the label
                    continue;
                }
                throw DataError("column \"" + header[c] + "\" not described by the schema");
            }
            kinds[c] = it->second;
        }
    } else {
        for (std::size_t c = 0; c < ncols; ++c) {
            bool all_numeric = true;
            double tmp;
            for (std::size_t r : kept) {
                if (!parse_finite_double(rows[r][c], tmp)) { all_numeric = false; break; }
            }
            kinds[c] = all_numeric ? ColumnKind::Numeric : ColumnKind::Categorical;
        }
    }

    int label_col = -1;
    if (label) {
        for (std::size_t c = 0; c < ncols; ++c)
            if (header[c] == *label) { label_col = static_cast<int>(c); break; }
        if (label_col < 0) throw DataError("label column \"" + *label + "\" not found");
        table.schema.label_column = *label;
    }

    // Drop single-valued feature columns.
    std::vector<bool> keep_col(ncols, true);
    for (std::size_t c = 0; c < ncols; ++c) {
        if (static_cast<int>(c) == label_col) continue;
        const std::string& first = rows[kept[0]][c];
        bool constant = true;
        for (std::size_t r : kept)
            if (rows[r][c] != first) { constant = false; break; }
        if (constant) {
            keep_col[c] = false;
            table.dropped_columns.push_back(header[c]);
        }
    }

    for (std::size_t c = 0; c < ncols; ++c) {
        if (static_cast<int>(c) == label_col || !keep_col[c]) continue;
        Column col{header[c], kinds[c]};
        table.column_slot.push_back(kinds[c] == ColumnKind::Numeric ? table.numeric.size()
                                                                    : table.categorical.size());
        if (kinds[c] == ColumnKind::Numeric) {
            std::vector<double> vals;
            vals.reserve(kept.size());
            for (std::size_t r : kept) {
                double v;
                if (!parse_finite_double(rows[r][c], v))
                    throw DataError("column \"" + header[c] + "\": value \"" + rows[r][c] +
                                    "\" is not numeric");
                vals.push_back(v);
            }
            table.numeric.push_back(std::move(vals));
        } else {
            std::vector<std::string> vals;
            vals.reserve(kept.size());
            for (std::size_t r : kept) vals.push_back(rows[r][c]);
            table.categorical.push_back(std::move(vals));
        }
        table.schema.columns.push_back(std::move(col));
    }
    if (table.schema.columns.empty())
        throw DataError("zero feature columns after cleaning");

    if (label_col >= 0) {
        std::unordered_map<std::string, int> ids;
        for (std::size_t r : kept) {
            const std::string& v = rows[r][static_cast<std::size_t>(label_col)];
            auto [it, inserted] = ids.emplace(v, static_cast<int>(table.truth_names.size()));
            if (inserted) table.truth_names.push_back(v);
            table.truth.push_back(it->second);
        }
    }

    table.n_rows = kept.size();
    table.source_row = std::move(kept);
    return table;
}

RawTable load_table(const std::string& path, const LoadOptions& options) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open \"" + path + "\"");
    std::string line;
    if (!std::getline(in, line)) throw DataError("\"" + path + "\" is empty");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::vector<std::string> header = split(line, options.delimiter);

    std::vector<std::vector<std::string>> rows;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        rows.push_back(split(line, options.delimiter));
    }
    if (rows.empty()) throw DataError("zero rows after cleaning");
    return build_table(header, rows, options);
}

}  // namespace cpf
