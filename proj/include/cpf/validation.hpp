#pragma once

#include <span>
#include <vector>

#include "cpf/common.hpp"

namespace cpf {

/// Pair-count contingency table between predicted clusters and true classes.
struct ContingencyTable {
    std::size_t rows = 0, cols = 0;  // predicted clusters x true classes
    std::vector<std::size_t> counts;  // rows x cols
    std::vector<std::size_t> row_sums, col_sums;
    std::size_t n = 0;

    std::size_t at(std::size_t i, std::size_t j) const { return counts[i * cols + j]; }

    static ContingencyTable from_labels(std::span<const int> pred, std::span<const int> truth);
};

/// How points the pipeline labeled -1 enter the indices: kept as one
/// predicted cluster of their own (default; penalizes over-aggressive
/// outlier removal) or dropped from both label vectors.
enum class OutlierPolicy { OwnCluster, Exclude };

struct ExternalIndices {
    double ari = 0.0;
    double nmi = 0.0;
    double purity = 0.0;
    double f1 = 0.0;
    double ca = 0.0;
};

/// Adjusted Rand Index, Normalized Mutual Information (natural-log
/// entropies, geometric-mean normalization), Purity, pairwise F1 and
/// Clustering Accuracy (optimal cluster-to-class matching).
ExternalIndices external_indices(std::span<const int> pred, std::span<const int> truth,
                                 OutlierPolicy policy = OutlierPolicy::OwnCluster);

/// Maximum-weight one-to-one matching value of a rectangular score matrix
/// (rows x cols, row-major); unmatched rows/columns score zero.
double max_assignment(const std::vector<double>& scores, std::size_t rows, std::size_t cols);

}  // namespace cpf
