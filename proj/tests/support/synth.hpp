#pragma once

// Seeded generators for tables and datasets used across the test suites.

#include <random>
#include <string>
#include <vector>

#include "cpf/encoding.hpp"
#include "cpf/table.hpp"

namespace testsupport {

struct TableData {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

inline std::string num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

/// Random mixed table: p_num numeric columns (standard normal) and one
/// categorical column per entry of cat_sizes, with skewed category draws.
inline TableData random_mixed_table(std::mt19937_64& rng, std::size_t n, std::size_t p_num,
                                    const std::vector<int>& cat_sizes) {
    TableData table;
    for (std::size_t j = 0; j < p_num; ++j) table.header.push_back("x" + std::to_string(j));
    for (std::size_t j = 0; j < cat_sizes.size(); ++j)
        table.header.push_back("c" + std::to_string(j));

    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    // Skewed category proportions, fixed per column.
    std::vector<std::vector<double>> cumulative;
    for (int size : cat_sizes) {
        std::vector<double> weights(static_cast<std::size_t>(size));
        double total = 0.0;
        for (auto& w : weights) {
            w = 0.2 + unif(rng);
            total += w;
        }
        double acc = 0.0;
        for (auto& w : weights) {
            acc += w / total;
            w = acc;
        }
        cumulative.push_back(weights);
    }
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<std::string> row;
        for (std::size_t j = 0; j < p_num; ++j) row.push_back(num(gauss(rng)));
        for (std::size_t j = 0; j < cat_sizes.size(); ++j) {
            double u = unif(rng);
            int q = 0;
            while (u > cumulative[j][static_cast<std::size_t>(q)]) ++q;
            row.push_back("v" + std::to_string(q));
        }
        table.rows.push_back(std::move(row));
    }
    // Guarantee every category appears at least once so the dictionary has
    // the expected size.
    for (std::size_t j = 0; j < cat_sizes.size(); ++j)
        for (int q = 0; q < cat_sizes[j]; ++q)
            if (table.rows.size() > static_cast<std::size_t>(q))
                table.rows[static_cast<std::size_t>(q)][p_num + j] = "v" + std::to_string(q);
    return table;
}

inline cpf::MixedDataset random_mixed_dataset(std::mt19937_64& rng, std::size_t n,
                                              std::size_t p_num, const std::vector<int>& cat_sizes,
                                              cpf::WeightScheme scheme = cpf::WeightScheme::W1) {
    TableData table = random_mixed_table(rng, n, p_num, cat_sizes);
    return cpf::fit_encode(cpf::build_table(table.header, table.rows, {}), scheme);
}

/// Dataset built directly from raw numeric coordinates (no categorical
/// attributes, identity standardization): the coordinates are the encoded
/// values, which keeps hand-computed distances exact.
inline cpf::MixedDataset numeric_dataset(const std::vector<std::vector<double>>& points) {
    cpf::MixedDataset data;
    data.n = points.size();
    data.p_num = points.empty() ? 0 : points[0].size();
    data.p_cat = 0;
    data.numeric.reserve(data.n * data.p_num);
    for (const auto& row : points)
        for (double v : row) data.numeric.push_back(v);
    for (std::size_t j = 0; j < data.p_num; ++j) {
        cpf::NumericEncoding enc;
        enc.name = "x" + std::to_string(j);
        data.model.numeric.push_back(enc);
        data.model.schema.columns.push_back({enc.name, cpf::ColumnKind::Numeric});
    }
    return data;
}

/// Two isotropic 2-D Gaussian clouds with different spreads, as raw table
/// rows plus ground-truth labels. Used by the density-imbalance scenarios.
struct LabeledTable {
    TableData table;
    std::vector<int> truth;
};

inline LabeledTable two_gaussians(std::mt19937_64& rng, std::size_t n_dense, double sigma_dense,
                                  std::size_t n_sparse, double sigma_sparse, double dx,
                                  double dy) {
    LabeledTable out;
    out.table.header = {"x0", "x1"};
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (std::size_t i = 0; i < n_dense; ++i) {
        out.table.rows.push_back({num(gauss(rng) * sigma_dense), num(gauss(rng) * sigma_dense)});
        out.truth.push_back(0);
    }
    for (std::size_t i = 0; i < n_sparse; ++i) {
        out.table.rows.push_back(
            {num(dx + gauss(rng) * sigma_sparse), num(dy + gauss(rng) * sigma_sparse)});
        out.truth.push_back(1);
    }
    return out;
}

}  // namespace testsupport
