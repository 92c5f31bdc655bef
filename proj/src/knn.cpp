#include "cpf/knn.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <random>

#include "cpf/common.hpp"
#include "cpf/metric.hpp"

namespace cpf {

namespace {

constexpr std::size_t kBruteThreshold = 10000;
constexpr int kLeafSize = 24;

using HeapEntry = std::pair<double, int>;  // (squared distance, index)

// Bounded max-heap keeping the k smallest (d2, index) pairs.
class BoundedHeap {
public:
    explicit BoundedHeap(int k) : k_(static_cast<std::size_t>(k)) {}

    void offer(double d2, int index) {
        if (heap_.size() < k_) {
            heap_.emplace(d2, index);
        } else if (HeapEntry(d2, index) < heap_.top()) {
            heap_.pop();
            heap_.emplace(d2, index);
        }
    }

    bool full() const { return heap_.size() >= k_; }
    double worst_d2() const { return heap_.top().first; }

    // Drains into `out`, ascending by (distance, index).
    void drain(std::vector<Neighbor>& out) {
        out.resize(heap_.size());
        for (std::size_t i = heap_.size(); i-- > 0;) {
            out[i] = Neighbor{heap_.top().second, std::sqrt(heap_.top().first)};
            heap_.pop();
        }
    }

private:
    std::size_t k_;
    std::priority_queue<HeapEntry> heap_;
};

std::vector<Neighbor> brute_query(const MixedDataset& data, std::size_t i, int k) {
    BoundedHeap heap(k);
    for (std::size_t j = 0; j < data.n; ++j) {
        if (j == i) continue;
        heap.offer(squared_distance(data, i, j), static_cast<int>(j));
    }
    std::vector<Neighbor> out;
    heap.drain(out);
    return out;
}

}  // namespace

KdTree::KdTree(const double* points, std::size_t n, std::size_t dim)
    : points_(points), n_(n), dim_(dim) {
    perm_.resize(n_);
    for (std::size_t i = 0; i < n_; ++i) perm_[i] = static_cast<int>(i);
    nodes_.reserve(n_ / kLeafSize * 2 + 2);
    root_ = build(0, static_cast<int>(n_));
}

int KdTree::build(int begin, int end) {
    Node node;
    node.begin = begin;
    node.end = end;
    if (end - begin <= kLeafSize) {
        nodes_.push_back(node);
        return static_cast<int>(nodes_.size()) - 1;
    }
    // Split on the widest dimension.
    int dim = 0;
    double best_spread = -1.0;
    for (std::size_t d = 0; d < dim_; ++d) {
        double lo = row(perm_[begin])[d], hi = lo;
        for (int t = begin + 1; t < end; ++t) {
            double v = row(perm_[t])[d];
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        if (hi - lo > best_spread) {
            best_spread = hi - lo;
            dim = static_cast<int>(d);
        }
    }
    if (best_spread <= 0.0) {
        // All points coincide; keep one flat leaf.
        nodes_.push_back(node);
        return static_cast<int>(nodes_.size()) - 1;
    }
    int mid = begin + (end - begin) / 2;
    std::nth_element(perm_.begin() + begin, perm_.begin() + mid, perm_.begin() + end,
                     [&](int a, int b) {
                         double va = row(a)[dim], vb = row(b)[dim];
                         return va < vb || (va == vb && a < b);
                     });
    node.split_dim = dim;
    node.split_val = row(perm_[mid])[dim];
    int self = static_cast<int>(nodes_.size());
    nodes_.push_back(node);
    int left = build(begin, mid);
    int right = build(mid, end);
    nodes_[self].left = left;
    nodes_[self].right = right;
    return self;
}

// Recursive search with an incremental box-distance bound: `offsets` holds
// the per-dimension distance from the query to the current node's region,
// `bound_d2` their squared sum. Pruning skips a subtree only when the bound
// strictly exceeds the current worst kept distance, so equal-distance
// candidates with smaller indices are never lost.
struct KdTree::SearchCtx {
    const double* query;
    int exclude;
    BoundedHeap& heap;
    std::vector<double>& offsets;
};

void KdTree::search(int node_id, double bound_d2, SearchCtx& ctx) const {
    if (ctx.heap.full() && bound_d2 > ctx.heap.worst_d2()) return;
    const Node& node = nodes_[static_cast<std::size_t>(node_id)];
    if (node.split_dim < 0) {
        for (int t = node.begin; t < node.end; ++t) {
            int p = perm_[static_cast<std::size_t>(t)];
            if (p == ctx.exclude) continue;
            double d2 = 0.0;
            const double* r = row(p);
            for (std::size_t d = 0; d < dim_; ++d) {
                double diff = ctx.query[d] - r[d];
                d2 += diff * diff;
            }
            ctx.heap.offer(d2, p);
        }
        return;
    }
    const double diff = ctx.query[node.split_dim] - node.split_val;
    const int near = diff < 0.0 ? node.left : node.right;
    const int far = diff < 0.0 ? node.right : node.left;
    search(near, bound_d2, ctx);
    // Nested regions guarantee |diff| is at least the previous offset along
    // this dimension, so replacing it keeps the bound exact.
    double& off = ctx.offsets[static_cast<std::size_t>(node.split_dim)];
    const double old_off = off;
    const double far_bound = bound_d2 - old_off * old_off + diff * diff;
    off = diff < 0.0 ? -diff : diff;
    search(far, far_bound, ctx);
    off = old_off;
}

void KdTree::query(const double* query, int k, int exclude, std::vector<Neighbor>& out) const {
    BoundedHeap heap(k);
    std::vector<double> offsets(dim_, 0.0);
    SearchCtx ctx{query, exclude, heap, offsets};
    search(root_, 0.0, ctx);
    heap.drain(out);
}

namespace {

// Random-projection forest for approximate all-kNN. Each tree recursively
// splits at the median projection onto a seeded random direction; candidate
// neighbors are the union of a point's leaf cohabitants across trees.
class RpForest {
public:
    RpForest(const std::vector<double>& embedded, std::size_t n, std::size_t dim, int trees,
             int leaf, std::uint64_t seed)
        : points_(embedded), n_(n), dim_(dim), leaf_(std::max(leaf, 2)) {
        trees_.resize(static_cast<std::size_t>(trees));
        for (int t = 0; t < trees; ++t) {
            auto& tree = trees_[static_cast<std::size_t>(t)];
            tree.perm.resize(n_);
            for (std::size_t i = 0; i < n_; ++i) tree.perm[i] = static_cast<int>(i);
            tree.range_of.resize(n_);
            std::mt19937_64 rng(seed * 0x9e3779b97f4a7c15ULL + static_cast<std::uint64_t>(t) + 1);
            split(tree, 0, static_cast<int>(n_), rng, 0);
        }
    }

    void candidates(int i, std::vector<int>& out) const {
        out.clear();
        for (const auto& tree : trees_) {
            auto [b, e] = tree.ranges[tree.range_of[static_cast<std::size_t>(i)]];
            for (int t = b; t < e; ++t)
                if (tree.perm[static_cast<std::size_t>(t)] != i)
                    out.push_back(tree.perm[static_cast<std::size_t>(t)]);
        }
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
    }

private:
    struct Tree {
        std::vector<int> perm;
        std::vector<std::pair<int, int>> ranges;  // leaf ranges into perm
        std::vector<int> range_of;                // point -> leaf range id
    };

    void split(Tree& tree, int begin, int end, std::mt19937_64& rng, int depth) {
        if (end - begin <= leaf_ || depth > 48) {
            int id = static_cast<int>(tree.ranges.size());
            tree.ranges.emplace_back(begin, end);
            for (int t = begin; t < end; ++t)
                tree.range_of[static_cast<std::size_t>(tree.perm[static_cast<std::size_t>(t)])] = id;
            return;
        }
        std::normal_distribution<double> gauss(0.0, 1.0);
        std::vector<double> dir(dim_);
        for (auto& v : dir) v = gauss(rng);
        std::vector<double> proj(static_cast<std::size_t>(end - begin));
        for (int t = begin; t < end; ++t) {
            const double* r = points_.data() + static_cast<std::size_t>(tree.perm[static_cast<std::size_t>(t)]) * dim_;
            double s = 0.0;
            for (std::size_t d = 0; d < dim_; ++d) s += dir[d] * r[d];
            proj[static_cast<std::size_t>(t - begin)] = s;
        }
        int mid = begin + (end - begin) / 2;
        std::vector<int> order(static_cast<std::size_t>(end - begin));
        for (std::size_t t = 0; t < order.size(); ++t) order[t] = static_cast<int>(t);
        std::nth_element(order.begin(), order.begin() + (mid - begin), order.end(),
                         [&](int a, int b) {
                             return proj[static_cast<std::size_t>(a)] < proj[static_cast<std::size_t>(b)] ||
                                    (proj[static_cast<std::size_t>(a)] == proj[static_cast<std::size_t>(b)] &&
                                     tree.perm[static_cast<std::size_t>(begin + a)] < tree.perm[static_cast<std::size_t>(begin + b)]);
                         });
        std::vector<int> reordered(order.size());
        for (std::size_t t = 0; t < order.size(); ++t)
            reordered[t] = tree.perm[static_cast<std::size_t>(begin) + static_cast<std::size_t>(order[t])];
        std::copy(reordered.begin(), reordered.end(), tree.perm.begin() + begin);
        split(tree, begin, mid, rng, depth + 1);
        split(tree, mid, end, rng, depth + 1);
    }

    const std::vector<double>& points_;
    std::size_t n_, dim_;
    int leaf_;
    std::vector<Tree> trees_;
};

}  // namespace

std::vector<std::vector<Neighbor>> knn_search(const MixedDataset& data, int k,
                                              const KnnOptions& options) {
    const std::size_t n = data.n;
    if (n < 2) throw DataError("need at least 2 points");
    if (k < 1 || static_cast<std::size_t>(k) >= n) throw DataError("k must be < n");

    KnnBackend backend = options.backend;
    if (backend == KnnBackend::Auto)
        backend = n <= kBruteThreshold ? KnnBackend::Brute : KnnBackend::KdTree;

    std::vector<std::vector<Neighbor>> lists(n);
    if (backend == KnnBackend::Brute) {
        parallel_for(n, options.threads,
                     [&](std::size_t i) { lists[i] = brute_query(data, i, k); });
        return lists;
    }

    const std::size_t dim = embedding_dim(data);
    std::vector<double> embedded = embed_all(data);

    if (backend == KnnBackend::KdTree) {
        KdTree tree(embedded.data(), n, dim);
        parallel_for(n, options.threads, [&](std::size_t i) {
            tree.query(embedded.data() + i * dim, k, static_cast<int>(i), lists[i]);
            // Report closed-form distances so every consumer sees the same
            // arithmetic as the brute backend.
            std::vector<std::pair<double, int>> refined(lists[i].size());
            for (std::size_t t = 0; t < lists[i].size(); ++t)
                refined[t] = {squared_distance(data, i,
                                               static_cast<std::size_t>(lists[i][t].index)),
                              lists[i][t].index};
            std::sort(refined.begin(), refined.end());
            for (std::size_t t = 0; t < lists[i].size(); ++t)
                lists[i][t] = Neighbor{refined[t].second, std::sqrt(refined[t].first)};
        });
        return lists;
    }

    // RpForest: leaves must hold at least k+1 points so every query can
    // produce k neighbors.
    RpForest forest(embedded, n, dim, options.rp_trees, std::max(options.rp_leaf, k + 1),
                    options.seed);
    parallel_for(n, options.threads, [&](std::size_t i) {
        std::vector<int> cand;
        forest.candidates(static_cast<int>(i), cand);
        BoundedHeap heap(k);
        for (int j : cand) heap.offer(squared_distance(data, i, static_cast<std::size_t>(j)), j);
        heap.drain(lists[i]);
    });
    return lists;
}

}  // namespace cpf
