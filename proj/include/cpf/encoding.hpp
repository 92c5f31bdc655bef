#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cpf/table.hpp"

namespace cpf {

enum class WeightScheme { W1, W2 };

inline const char* to_string(WeightScheme s) { return s == WeightScheme::W1 ? "w1" : "w2"; }

/// Per categorical attribute: category dictionary, empirical proportions,
/// category weights and the variance-balancing feature weight rho.
struct CategoricalEncoding {
    std::string name;
    std::vector<std::string> categories;  // sorted lexicographically
    std::vector<double> proportions;      // sums to 1
    std::vector<double> weights;          // strictly positive
    double rho = 0.0;
};

/// Per numeric attribute: mean/std over the central 98% of values.
struct NumericEncoding {
    std::string name;
    double mean = 0.0;
    double stddev = 1.0;
};

struct EncodingModel {
    Schema schema;
    WeightScheme scheme = WeightScheme::W1;
    std::vector<CategoricalEncoding> categorical;
    std::vector<NumericEncoding> numeric;

    std::string to_json() const;
    static EncodingModel from_json(const std::string& text);
};

/// Encoded dataset: standardized numeric features plus category indices,
/// stored row-major. cat_term caches rho_j * w^j_q so the metric's closed
/// form is a table lookup.
struct MixedDataset {
    std::size_t n = 0;
    std::size_t p_num = 0;
    std::size_t p_cat = 0;
    std::vector<double> numeric;       // n x p_num
    std::vector<int32_t> categorical;  // n x p_cat
    EncodingModel model;
    std::vector<int> truth;            // empty when no labels

    std::vector<std::vector<double>> cat_term;  // per attr: rho * w[q]

    const double* numeric_row(std::size_t i) const { return numeric.data() + i * p_num; }
    const int32_t* categorical_row(std::size_t i) const { return categorical.data() + i * p_cat; }
};

/// rho = 2 / sum_{q != q'} (w_q + w_q') p_q p_q', the weight that equates a
/// categorical attribute's expected squared-distance contribution with a
/// unit-variance numeric feature's.
double compute_rho(const std::vector<double>& weights, const std::vector<double>& proportions);

/// Computes category dictionaries, proportions, W1/W2 weights, rho weights
/// and 98%-trimmed numeric statistics from a cleaned table.
EncodingModel fit_encoding(const RawTable& table, WeightScheme scheme);

/// Applies a fitted model: standardizes numeric columns and maps categories
/// to indices. Throws DataError on schema mismatch or unseen categories.
MixedDataset encode(const RawTable& table, const EncodingModel& model);

/// fit_encoding + encode in one step.
MixedDataset fit_encode(const RawTable& table, WeightScheme scheme);

}  // namespace cpf
