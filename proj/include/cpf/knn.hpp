#pragma once

#include <cstdint>
#include <vector>

#include "cpf/encoding.hpp"

namespace cpf {

struct Neighbor {
    int index;
    double dist;
};

/// Exact backends: Brute below 10^4 points, KdTree above (over the weighted
/// one-hot embedding, in which the mixed distance is Euclidean). RpForest is
/// the pluggable approximate backend; it requires a seed and trades recall
/// for speed on very large inputs.
enum class KnnBackend { Auto, Brute, KdTree, RpForest };

struct KnnOptions {
    KnnBackend backend = KnnBackend::Auto;
    int threads = 0;          // 0 = available parallelism
    std::uint64_t seed = 0;   // RpForest only
    int rp_trees = 8;
    int rp_leaf = 48;
};

/// k nearest neighbors of every point under the mixed metric, ascending by
/// (distance, index). Throws DataError unless 1 <= k < n.
std::vector<std::vector<Neighbor>> knn_search(const MixedDataset& data, int k,
                                              const KnnOptions& options = {});

/// Exact kd-tree over a row-major point matrix. Splits on the widest
/// dimension at the median; queries use a bounded max-heap on
/// (squared distance, index), so ties break toward the smaller index
/// exactly like a full sort would.
class KdTree {
public:
    KdTree(const double* points, std::size_t n, std::size_t dim);

    /// k nearest rows to `query`, excluding row `exclude` (-1 for none).
    void query(const double* query, int k, int exclude, std::vector<Neighbor>& out) const;

private:
    struct Node {
        int left = -1, right = -1;
        int begin = 0, end = 0;  // leaf range into perm_
        int split_dim = -1;
        double split_val = 0.0;
    };

    struct SearchCtx;
    int build(int begin, int end);
    void search(int node_id, double bound_d2, SearchCtx& ctx) const;
    const double* row(int i) const { return points_ + static_cast<std::size_t>(i) * dim_; }

    const double* points_;
    std::size_t n_, dim_;
    std::vector<int> perm_;
    std::vector<Node> nodes_;
    int root_;
};

}  // namespace cpf
