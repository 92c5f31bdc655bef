#include "cpf/encoding.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <unordered_map>

#include <json.hpp>

#include "cpf/common.hpp"

namespace cpf {

namespace {

// Mean/std over the central 98%: floor(n/100) values trimmed from each end.
// Trimming affects only the statistics; every value is still transformed.
NumericEncoding trimmed_stats(const std::string& name, const std::vector<double>& values) {
    std::vector<double> sorted(values);
    std::sort(sorted.begin(), sorted.end());
    const std::size_t n = sorted.size();
    const std::size_t cut = n / 100;
    const std::size_t lo = cut, hi = n - cut;

    auto moments = [&](std::size_t a, std::size_t b) {
        double mean = 0.0;
        for (std::size_t i = a; i < b; ++i) mean += sorted[i];
        mean /= static_cast<double>(b - a);
        double var = 0.0;
        for (std::size_t i = a; i < b; ++i) {
            double d = sorted[i] - mean;
            var += d * d;
        }
        var /= static_cast<double>(b - a);
        return std::pair<double, double>(mean, std::sqrt(var));
    };

    auto [mean, stddev] = moments(lo, hi);
    if (stddev <= 0.0) {
        // The central 98% is constant (heavy point mass). Fall back to the
        // untrimmed std so the feature stays usable.
        std::tie(mean, stddev) = moments(0, n);
        if (stddev <= 0.0)
            throw DataError("numeric column \"" + name + "\" has zero variance");
    }
    return NumericEncoding{name, mean, stddev};
}

}  // namespace

double compute_rho(const std::vector<double>& weights, const std::vector<double>& proportions) {
    double denom = 0.0;
    const std::size_t m = weights.size();
    for (std::size_t q = 0; q < m; ++q)
        for (std::size_t r = 0; r < m; ++r)
            if (r != q) denom += (weights[q] + weights[r]) * proportions[q] * proportions[r];
    if (!(denom > 0.0)) throw DataError("degenerate category distribution (rho undefined)");
    return 2.0 / denom;
}

EncodingModel fit_encoding(const RawTable& table, WeightScheme scheme) {
    EncodingModel model;
    model.schema = table.schema;
    model.scheme = scheme;

    for (const auto& col : table.categorical) {
        CategoricalEncoding enc;
        std::map<std::string, std::size_t> counts;
        for (const auto& v : col) ++counts[v];
        if (counts.size() < 2)
            throw DataError("categorical column with a single category (drop it upstream)");
        const double n = static_cast<double>(col.size());
        for (const auto& [cat, cnt] : counts) {
            enc.categories.push_back(cat);
            enc.proportions.push_back(static_cast<double>(cnt) / n);
        }
        if (scheme == WeightScheme::W1) {
            enc.weights = enc.proportions;
        } else {
            double total = 0.0;
            for (double p : enc.proportions) total += -std::log(p);
            enc.weights.reserve(enc.proportions.size());
            for (double p : enc.proportions) enc.weights.push_back(-std::log(p) / total);
        }
        enc.rho = compute_rho(enc.weights, enc.proportions);
        model.categorical.push_back(std::move(enc));
    }
    for (std::size_t j = 0; j < table.numeric.size(); ++j) {
        std::string name;
        for (std::size_t c = 0; c < table.schema.columns.size(); ++c)
            if (table.schema.columns[c].kind == ColumnKind::Numeric && table.column_slot[c] == j)
                name = table.schema.columns[c].name;
        model.numeric.push_back(trimmed_stats(name, table.numeric[j]));
    }
    // Attach names to categorical encodings as well.
    for (std::size_t c = 0; c < table.schema.columns.size(); ++c)
        if (table.schema.columns[c].kind == ColumnKind::Categorical)
            model.categorical[table.column_slot[c]].name = table.schema.columns[c].name;
    return model;
}

MixedDataset encode(const RawTable& table, const EncodingModel& model) {
    if (table.schema.columns.size() != model.schema.columns.size())
        throw DataError("table does not match the fitted model's schema");
    for (std::size_t c = 0; c < table.schema.columns.size(); ++c) {
        const auto& a = table.schema.columns[c];
        const auto& b = model.schema.columns[c];
        if (a.name != b.name || a.kind != b.kind)
            throw DataError("table column \"" + a.name + "\" does not match the fitted model");
    }

    MixedDataset data;
    data.model = model;
    data.n = table.n_rows;
    data.p_num = table.numeric.size();
    data.p_cat = table.categorical.size();
    data.truth = table.truth;

    data.numeric.resize(data.n * data.p_num);
    for (std::size_t j = 0; j < data.p_num; ++j) {
        const auto& enc = model.numeric[j];
        const auto& col = table.numeric[j];
        for (std::size_t i = 0; i < data.n; ++i)
            data.numeric[i * data.p_num + j] = (col[i] - enc.mean) / enc.stddev;
    }

    data.categorical.resize(data.n * data.p_cat);
    for (std::size_t j = 0; j < data.p_cat; ++j) {
        const auto& enc = model.categorical[j];
        std::unordered_map<std::string, int32_t> index;
        for (std::size_t q = 0; q < enc.categories.size(); ++q)
            index.emplace(enc.categories[q], static_cast<int32_t>(q));
        const auto& col = table.categorical[j];
        for (std::size_t i = 0; i < data.n; ++i) {
            auto it = index.find(col[i]);
            if (it == index.end())
                throw DataError("unseen category \"" + col[i] + "\" in column \"" + enc.name + "\"");
            data.categorical[i * data.p_cat + j] = it->second;
        }
    }

    data.cat_term.reserve(data.p_cat);
    for (const auto& enc : model.categorical) {
        std::vector<double> t(enc.weights.size());
        for (std::size_t q = 0; q < t.size(); ++q) t[q] = enc.rho * enc.weights[q];
        data.cat_term.push_back(std::move(t));
    }
    return data;
}

MixedDataset fit_encode(const RawTable& table, WeightScheme scheme) {
    return encode(table, fit_encoding(table, scheme));
}

std::string EncodingModel::to_json() const {
    nlohmann::json j;
    j["scheme"] = to_string(scheme);
    j["columns"] = nlohmann::json::array();
    for (const auto& c : schema.columns)
        j["columns"].push_back({{"name", c.name},
                                {"kind", c.kind == ColumnKind::Numeric ? "numeric" : "categorical"}});
    if (schema.label_column) j["label"] = *schema.label_column;
    j["categorical"] = nlohmann::json::array();
    for (const auto& enc : categorical)
        j["categorical"].push_back({{"name", enc.name},
                                    {"categories", enc.categories},
                                    {"proportions", enc.proportions},
                                    {"weights", enc.weights},
                                    {"rho", enc.rho}});
    j["numeric"] = nlohmann::json::array();
    for (const auto& enc : numeric)
        j["numeric"].push_back({{"name", enc.name}, {"mean", enc.mean}, {"std", enc.stddev}});
    return j.dump(2);
}

EncodingModel EncodingModel::from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("invalid model JSON: ") + e.what());
    }
    EncodingModel model;
    std::string scheme = j.at("scheme").get<std::string>();
    if (scheme == "w1")
        model.scheme = WeightScheme::W1;
    else if (scheme == "w2")
        model.scheme = WeightScheme::W2;
    else
        throw DataError("unknown weighting scheme \"" + scheme + "\"");
    for (const auto& c : j.at("columns")) {
        Column col;
        col.name = c.at("name").get<std::string>();
        col.kind = c.at("kind").get<std::string>() == "numeric" ? ColumnKind::Numeric
                                                                : ColumnKind::Categorical;
        model.schema.columns.push_back(std::move(col));
    }
    if (j.contains("label")) model.schema.label_column = j["label"].get<std::string>();
    for (const auto& c : j.at("categorical")) {
        CategoricalEncoding enc;
        enc.name = c.at("name").get<std::string>();
        enc.categories = c.at("categories").get<std::vector<std::string>>();
        enc.proportions = c.at("proportions").get<std::vector<double>>();
        enc.weights = c.at("weights").get<std::vector<double>>();
        enc.rho = c.at("rho").get<double>();
        model.categorical.push_back(std::move(enc));
    }
    for (const auto& c : j.at("numeric")) {
        NumericEncoding enc;
        enc.name = c.at("name").get<std::string>();
        enc.mean = c.at("mean").get<double>();
        enc.stddev = c.at("std").get<double>();
        model.numeric.push_back(std::move(enc));
    }
    return model;
}

}  // namespace cpf
