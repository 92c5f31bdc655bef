#pragma once

#include <memory>
#include <string>
#include <vector>

#include "cpf/knn.hpp"

namespace cpf {

/// Undirected, unweighted mutual k-NN graph. adjacency[i] holds the mutual
/// neighbors of i sorted by index, each with its cached distance.
struct NeighborGraph {
    int k = 0;
    std::vector<std::vector<Neighbor>> knn;        // directed lists, ascending (dist, index)
    std::vector<std::vector<Neighbor>> adjacency;  // mutual edges, ascending index

    std::size_t size() const { return adjacency.size(); }
    std::size_t edge_count() const;
};

/// Edge {i,j} present iff each endpoint is among the other's k nearest
/// neighbors; no self loops.
NeighborGraph build_mutual_graph(std::vector<std::vector<Neighbor>> knn_lists);

/// Connected components of the mutual graph. Degree-zero vertices form the
/// outlier set O1; components are ordered by smallest member index.
struct ComponentPartition {
    static constexpr int kOutlier = -1;
    std::vector<int> component_of;          // kOutlier for O1 members
    std::vector<std::vector<int>> components;  // members ascending
    std::vector<int> outliers;              // O1, ascending
};

ComponentPartition components(const NeighborGraph& graph);

/// Edge list CSV (i, j, distance), one undirected edge per line, for
/// debugging. i < j, sorted.
std::string dump_edges_csv(const NeighborGraph& graph);

/// Lazy exact nearest-neighbor lists restricted to one component (the
/// density and center-selection stages re-search neighbors inside the
/// component). Lists grow on demand and are cached; ordering matches the
/// global search: ascending (distance, index), ties by index.
class ComponentIndex {
public:
    ComponentIndex(const MixedDataset& data, std::vector<int> members);

    std::size_t size() const { return members_.size(); }
    const std::vector<int>& members() const { return members_; }
    int global(int local) const { return members_[static_cast<std::size_t>(local)]; }

    /// In-component neighbors of local point i (self excluded), as local
    /// indices. The returned list holds at least min(k, size()-1) entries;
    /// callers use the prefix they asked for.
    const std::vector<Neighbor>& neighbors(int local, int k);

    /// Distance between two local points.
    double dist(int a, int b) const;

private:
    void extend(int local, int k);

    const MixedDataset& data_;
    std::vector<int> members_;
    // Concurrent queries for distinct `local` values are safe: each touches
    // only its own cache slot.
    std::vector<std::vector<Neighbor>> cache_;  // local indices
    std::vector<char> complete_;                // cache_[i] holds all size()-1 neighbors
    // Tree path for large components.
    bool use_tree_ = false;
    std::size_t dim_ = 0;
    std::vector<double> embedded_;
    std::unique_ptr<KdTree> tree_;
};

}  // namespace cpf
