#include "cpf/neighbors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "cpf/common.hpp"
#include "cpf/metric.hpp"

namespace cpf {

std::size_t NeighborGraph::edge_count() const {
    std::size_t deg = 0;
    for (const auto& a : adjacency) deg += a.size();
    return deg / 2;
}

NeighborGraph build_mutual_graph(std::vector<std::vector<Neighbor>> knn_lists) {
    const std::size_t n = knn_lists.size();
    NeighborGraph graph;
    graph.k = n == 0 ? 0 : static_cast<int>(knn_lists[0].size());
    graph.adjacency.assign(n, {});

    // Sorted index sets make the mutuality check a binary search.
    std::vector<std::vector<int>> sorted_ids(n);
    for (std::size_t i = 0; i < n; ++i) {
        sorted_ids[i].reserve(knn_lists[i].size());
        for (const auto& nb : knn_lists[i]) sorted_ids[i].push_back(nb.index);
        std::sort(sorted_ids[i].begin(), sorted_ids[i].end());
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (const auto& nb : knn_lists[i]) {
            const std::size_t j = static_cast<std::size_t>(nb.index);
            if (j <= i) continue;  // each pair once, from the smaller index
            if (std::binary_search(sorted_ids[j].begin(), sorted_ids[j].end(),
                                   static_cast<int>(i))) {
                graph.adjacency[i].push_back(Neighbor{static_cast<int>(j), nb.dist});
                graph.adjacency[j].push_back(Neighbor{static_cast<int>(i), nb.dist});
            }
        }
    }
    for (auto& adj : graph.adjacency)
        std::sort(adj.begin(), adj.end(),
                  [](const Neighbor& a, const Neighbor& b) { return a.index < b.index; });
    graph.knn = std::move(knn_lists);
    return graph;
}

ComponentPartition components(const NeighborGraph& graph) {
    const std::size_t n = graph.size();
    ComponentPartition part;
    part.component_of.assign(n, ComponentPartition::kOutlier);

    std::vector<int> stack;
    for (std::size_t i = 0; i < n; ++i) {
        if (graph.adjacency[i].empty()) {
            part.outliers.push_back(static_cast<int>(i));
            continue;
        }
        if (part.component_of[i] != ComponentPartition::kOutlier) continue;
        const int id = static_cast<int>(part.components.size());
        part.components.emplace_back();
        stack.push_back(static_cast<int>(i));
        part.component_of[i] = id;
        while (!stack.empty()) {
            int v = stack.back();
            stack.pop_back();
            part.components[static_cast<std::size_t>(id)].push_back(v);
            for (const auto& nb : graph.adjacency[static_cast<std::size_t>(v)]) {
                if (part.component_of[static_cast<std::size_t>(nb.index)] ==
                    ComponentPartition::kOutlier) {
                    part.component_of[static_cast<std::size_t>(nb.index)] = id;
                    stack.push_back(nb.index);
                }
            }
        }
    }
    for (auto& members : part.components) std::sort(members.begin(), members.end());
    return part;
}

std::string dump_edges_csv(const NeighborGraph& graph) {
    std::ostringstream out;
    out << "i,j,distance\n";
    for (std::size_t i = 0; i < graph.size(); ++i)
        for (const auto& nb : graph.adjacency[i])
            if (nb.index > static_cast<int>(i))
                out << i << ',' << nb.index << ',' << format_double(nb.dist) << '\n';
    return out.str();
}

namespace {
constexpr std::size_t kComponentTreeThreshold = 2048;
}

ComponentIndex::ComponentIndex(const MixedDataset& data, std::vector<int> members)
    : data_(data), members_(std::move(members)) {
    cache_.resize(members_.size());
    complete_.assign(members_.size(), 0);
    use_tree_ = members_.size() > kComponentTreeThreshold;
    if (use_tree_) {
        dim_ = embedding_dim(data_);
        embedded_.resize(members_.size() * dim_);
        for (std::size_t t = 0; t < members_.size(); ++t)
            embed_point(data_, static_cast<std::size_t>(members_[t]), embedded_.data() + t * dim_);
        tree_ = std::make_unique<KdTree>(embedded_.data(), members_.size(), dim_);
    }
}

double ComponentIndex::dist(int a, int b) const {
    return distance(data_, static_cast<std::size_t>(members_[static_cast<std::size_t>(a)]),
                    static_cast<std::size_t>(members_[static_cast<std::size_t>(b)]));
}

void ComponentIndex::extend(int local, int k) {
    const std::size_t m = members_.size();
    auto& list = cache_[static_cast<std::size_t>(local)];
    if (complete_[static_cast<std::size_t>(local)] || static_cast<int>(list.size()) >= k) return;

    if (!use_tree_) {
        // Small component: compute the full sorted list once.
        const std::size_t gi = static_cast<std::size_t>(members_[static_cast<std::size_t>(local)]);
        std::vector<std::pair<double, int>> all;
        all.reserve(m - 1);
        for (std::size_t t = 0; t < m; ++t) {
            if (static_cast<int>(t) == local) continue;
            all.emplace_back(squared_distance(data_, gi, static_cast<std::size_t>(members_[t])),
                             static_cast<int>(t));
        }
        std::sort(all.begin(), all.end());
        list.resize(all.size());
        for (std::size_t t = 0; t < all.size(); ++t)
            list[t] = Neighbor{all[t].second, std::sqrt(all[t].first)};
        complete_[static_cast<std::size_t>(local)] = 1;
        return;
    }

    // Tree path: grow geometrically so per-point re-queries stay amortized
    // even when callers raise k one step at a time.
    int request = std::max({k, static_cast<int>(list.size()) * 2, 8});
    request = std::min<int>(request, static_cast<int>(m) - 1);
    tree_->query(embedded_.data() + static_cast<std::size_t>(local) * dim_, request, local, list);
    // Report closed-form distances, matching the brute path's arithmetic.
    const std::size_t gi = static_cast<std::size_t>(members_[static_cast<std::size_t>(local)]);
    std::vector<std::pair<double, int>> refined(list.size());
    for (std::size_t t = 0; t < list.size(); ++t)
        refined[t] = {squared_distance(
                          data_, gi,
                          static_cast<std::size_t>(members_[static_cast<std::size_t>(list[t].index)])),
                      list[t].index};
    std::sort(refined.begin(), refined.end());
    for (std::size_t t = 0; t < list.size(); ++t)
        list[t] = Neighbor{refined[t].second, std::sqrt(refined[t].first)};
    if (list.size() == m - 1) complete_[static_cast<std::size_t>(local)] = 1;
}

const std::vector<Neighbor>& ComponentIndex::neighbors(int local, int k) {
    k = std::min<int>(k, static_cast<int>(members_.size()) - 1);
    extend(local, k);
    return cache_[static_cast<std::size_t>(local)];
}

}  // namespace cpf
