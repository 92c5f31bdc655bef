#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "cpf/table.hpp"

using cpf::build_table;
using cpf::ColumnKind;
using cpf::DataError;
using cpf::LoadOptions;

namespace {

std::filesystem::path write_temp(const std::string& name, const std::string& content) {
    auto path = std::filesystem::temp_directory_path() / name;
    std::ofstream out(path);
    out << content;
    return path;
}

}  // namespace

TEST_CASE("rows with missing values are dropped and counted") {
    auto table = build_table({"a", "b"},
                             {{"1", "x"}, {"2", ""}, {"3", "y"}, {"4", "z"}});
    CHECK(table.n_rows == 3);
    CHECK(table.dropped_rows == 1);
    CHECK(table.n_input_rows == 4);
    CHECK(table.source_row == std::vector<std::size_t>{0, 2, 3});
}

TEST_CASE("question mark counts as missing by default") {
    auto table = build_table({"a"}, {{"1"}, {"?"}, {"3"}});
    CHECK(table.n_rows == 2);
    CHECK(table.dropped_rows == 1);
}

TEST_CASE("single-valued columns are removed and counted") {
    auto table = build_table({"a", "b", "c"},
                             {{"1", "same", "u"}, {"2", "same", "v"}, {"3", "same", "w"}});
    CHECK(table.schema.columns.size() == 2);
    CHECK(table.dropped_columns == std::vector<std::string>{"b"});
    CHECK(table.p_numeric() == 1);
    CHECK(table.p_categorical() == 1);
}

TEST_CASE("header-only file is a zero-rows error") {
    auto path = write_temp("cpf_header_only.csv", "a,b,c\n");
    CHECK_THROWS_AS(cpf::load_table(path.string()), DataError);
    std::filesystem::remove(path);
}

TEST_CASE("kind inference: numeric iff every value parses as a finite number") {
    auto table = build_table({"a", "b", "c"},
                             {{"1", "1", "1.5e3"}, {"2", "x", "-2"}, {"3.5", "3", "nan"}});
    CHECK(table.schema.columns[0].kind == ColumnKind::Numeric);
    CHECK(table.schema.columns[1].kind == ColumnKind::Categorical);
    CHECK(table.schema.columns[2].kind == ColumnKind::Categorical);  // "nan" is not finite
}

TEST_CASE("label column is split off and densified in first-appearance order") {
    LoadOptions options;
    options.label_column = "cls";
    auto table = build_table({"x", "cls"},
                             {{"1", "pos"}, {"2", "neg"}, {"3", "pos"}}, options);
    CHECK(table.schema.columns.size() == 1);
    CHECK(table.truth == std::vector<int>{0, 1, 0});
    CHECK(table.truth_names == std::vector<std::string>{"pos", "neg"});
}

TEST_CASE("schema sidecar overrides kind inference") {
    LoadOptions options;
    options.schema = cpf::parse_schema_json(
        R"({"columns":[{"name":"a","kind":"categorical"},{"name":"b","kind":"numeric"}]})");
    auto table = build_table({"a", "b"}, {{"1", "2"}, {"2", "4"}}, options);
    CHECK(table.schema.columns[0].kind == ColumnKind::Categorical);
    CHECK(table.schema.columns[1].kind == ColumnKind::Numeric);
}

TEST_CASE("schema with label field excludes the label column") {
    LoadOptions options;
    options.schema = cpf::parse_schema_json(
        R"({"columns":[{"name":"a","kind":"numeric"}],"label":"y"})");
    auto table = build_table({"a", "y"}, {{"1", "p"}, {"2", "q"}}, options);
    CHECK(table.schema.columns.size() == 1);
    CHECK(table.truth_names == std::vector<std::string>{"p", "q"});
}

TEST_CASE("malformed inputs raise DataError") {
    CHECK_THROWS_AS(build_table({"a", "a"}, {{"1", "2"}}), DataError);           // dup names
    CHECK_THROWS_AS(build_table({"a", "b"}, {{"1"}}), DataError);                // short row
    CHECK_THROWS_AS(build_table({"a"}, {{""}, {"?"}}), DataError);               // all dropped
    CHECK_THROWS_AS(cpf::load_table("/nonexistent/cpf.csv"), DataError);        // unreadable
    LoadOptions options;
    options.label_column = "missing";
    CHECK_THROWS_AS(build_table({"a"}, {{"1"}, {"2"}}, options), DataError);     // bad label
    options = {};
    options.schema = cpf::parse_schema_json(R"({"columns":[{"name":"z","kind":"numeric"}]})");
    CHECK_THROWS_AS(build_table({"a"}, {{"1"}, {"2"}}, options), DataError);     // schema mismatch
}

TEST_CASE("load_table parses a real file with CRLF endings and a custom delimiter") {
    auto path = write_temp("cpf_crlf.csv", "a;b\r\n1;x\r\n2;y\r\n");
    LoadOptions options;
    options.delimiter = ';';
    auto table = cpf::load_table(path.string(), options);
    CHECK(table.n_rows == 2);
    CHECK(table.schema.columns[0].kind == ColumnKind::Numeric);
    CHECK(table.schema.columns[1].kind == ColumnKind::Categorical);
    std::filesystem::remove(path);
}
