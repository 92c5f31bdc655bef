#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "cpf/encoding.hpp"

namespace cpf {

/// Squared mixed distance between rows i and j.
///
/// The categorical part uses the closed form of the one-hot expression: an
/// attribute contributes rho * (w[q_i] + w[q_j]) when the categories differ
/// and 0 when they match.
inline double squared_distance(const MixedDataset& data, std::size_t i, std::size_t j) {
    double d2 = 0.0;
    const double* zi = data.numeric_row(i);
    const double* zj = data.numeric_row(j);
    for (std::size_t f = 0; f < data.p_num; ++f) {
        double d = zi[f] - zj[f];
        d2 += d * d;
    }
    const int32_t* bi = data.categorical_row(i);
    const int32_t* bj = data.categorical_row(j);
    for (std::size_t f = 0; f < data.p_cat; ++f) {
        if (bi[f] != bj[f]) {
            const auto& term = data.cat_term[f];
            d2 += term[bi[f]] + term[bj[f]];
        }
    }
    return d2;
}

inline double distance(const MixedDataset& data, std::size_t i, std::size_t j) {
    return std::sqrt(squared_distance(data, i, j));
}

/// Cluster prototype: numeric mean plus per-attribute category proportions
/// (the mean of the one-hot encodings).
struct Prototype {
    std::vector<double> numeric;
    std::vector<std::vector<double>> categorical;
};

Prototype cluster_prototype(std::span<const int> members, const MixedDataset& data);

/// Dimension of the weighted one-hot embedding in which the mixed distance
/// is plain Euclidean.
std::size_t embedding_dim(const MixedDataset& data);

/// Materializes the embedding for row i into out[0 .. embedding_dim).
/// Numeric features map to themselves; categorical attribute j places
/// sqrt(rho_j * w^j_q) at the coordinate of its category.
void embed_point(const MixedDataset& data, std::size_t i, double* out);

/// Full n x embedding_dim matrix, row-major.
std::vector<double> embed_all(const MixedDataset& data);

}  // namespace cpf
