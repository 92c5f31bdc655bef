#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "cpf/common.hpp"

namespace cpf {

enum class ColumnKind { Numeric, Categorical };

struct Column {
    std::string name;
    ColumnKind kind;
};

/// Column layout of an input table. The label column, when present, is kept
/// out of `columns` and never becomes a feature.
struct Schema {
    std::vector<Column> columns;
    std::optional<std::string> label_column;
};

/// A cleaned, typed table: rows with missing values dropped, single-valued
/// columns removed, label column split off as dense integer ids.
struct RawTable {
    Schema schema;  // feature columns, in file order
    std::size_t n_rows = 0;
    std::size_t n_input_rows = 0;   // data rows in the file (header excluded)
    std::size_t dropped_rows = 0;   // rows removed for missing values
    std::vector<std::string> dropped_columns;  // single-valued columns removed

    // Per feature column, in schema order but split by kind. column_slot[c]
    // is the index into `numeric` or `categorical` for schema column c.
    std::vector<std::size_t> column_slot;
    std::vector<std::vector<double>> numeric;
    std::vector<std::vector<std::string>> categorical;

    std::vector<std::size_t> source_row;  // retained row -> 0-based data row in file

    std::vector<int> truth;                 // dense label ids, empty when no label column
    std::vector<std::string> truth_names;   // id -> original label value

    std::size_t p_numeric() const { return numeric.size(); }
    std::size_t p_categorical() const { return categorical.size(); }
};

struct LoadOptions {
    char delimiter = ',';
    // Column kinds; empty => auto-infer (numeric iff every value parses as a
    // finite number). Names must match the header exactly.
    std::optional<Schema> schema;
    // Overrides / sets the label column by name.
    std::optional<std::string> label_column;
    // Cells equal to one of these (after trimming) count as missing. The
    // empty string is always treated as missing.
    std::vector<std::string> missing_markers = {"?"};
};

/// Reads a delimiter-separated UTF-8 file with a header row, drops rows with
/// missing values and single-valued columns, and types every column.
/// Throws DataError for unreadable files, schema/data mismatches, and tables
/// with zero rows or zero feature columns after cleaning.
RawTable load_table(const std::string& path, const LoadOptions& options = {});

/// Same as load_table but parses already-split lines; used by the loader and
/// by tests that build tables in memory.
RawTable build_table(const std::vector<std::string>& header,
                     const std::vector<std::vector<std::string>>& rows,
                     const LoadOptions& options = {});

/// Parses the JSON schema sidecar:
/// {"columns":[{"name":...,"kind":"numeric"|"categorical"},...],"label":...}
Schema parse_schema_json(const std::string& text);

}  // namespace cpf
