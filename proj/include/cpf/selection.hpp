#pragma once

#include <limits>
#include <vector>

#include "cpf/neighbors.hpp"
#include "cpf/peaks.hpp"

namespace cpf {

/// Undirected weighted edge in component-local indexing, a < b.
struct WeightedEdge {
    int a, b;
    double w;
};

constexpr double kInfiniteConductance = std::numeric_limits<double>::infinity();

/// Edges of the base mutual graph restricted to the given members (local
/// indexing follows their order), with weights exp(-d) from the cached
/// adjacency distances. Edges to points outside the member list are
/// dropped, which restricts the graph correctly when decision-graph
/// outliers have been removed from a component.
std::vector<WeightedEdge> component_edges(const NeighborGraph& graph,
                                          const std::vector<int>& members);

/// Conductance of the cut (S, complement): crossing weight over the smaller
/// side's volume, where a side's volume counts every edge incident to it
/// (internal edges twice, once per endpoint). Returns +inf when the smaller
/// side has zero volume, so degenerate cuts never win an argmin.
double cut_conductance(const std::vector<WeightedEdge>& edges, const std::vector<char>& in_s);

/// Conductance of every cluster-vs-rest cut of a labeled partition in one
/// pass over the edges. labels[i] in [0, nclusters) for active points, -1
/// for points outside the partition (their edges must already be filtered).
std::vector<double> partition_conductances(const std::vector<WeightedEdge>& edges,
                                           const std::vector<int>& labels, int nclusters);

/// Incrementally grows the mutual k-NN graph of one component: step() raises
/// k by one and appends the newly mutual edges. Edge sets are monotone in k.
class MutualGraphBuilder {
public:
    explicit MutualGraphBuilder(ComponentIndex& index) : index_(index) {}

    int k() const { return k_; }
    bool complete() const { return k_ >= static_cast<int>(index_.size()) - 1; }
    const std::vector<WeightedEdge>& edges() const { return edges_; }

    /// Raises k by one; returns the range [first_new, edges().size()) of
    /// edges added by this step.
    std::size_t step();

private:
    ComponentIndex& index_;
    int k_ = 0;
    std::vector<WeightedEdge> edges_;
};

/// Smallest k such that the induced subgraphs of the mutual k-NN graph of
/// the component on side 0 and side 1 are both connected (singletons count
/// as connected). side_of[i] is 0 or 1. The builder is left at k = k_tilde
/// so the caller can evaluate conductance there and at k_tilde + 1.
int minimal_connectivity_k(MutualGraphBuilder& builder, const std::vector<char>& side_of);

/// Decision record for one component's center selection.
struct CutTrace {
    std::vector<int> candidates;   // local indices, gamma-descending
    std::vector<double> phis;      // phis[t] = Phi_{t+2}
    int beta_star = 1;
    int k_tilde = 0;
    int k_hat = 0;
    double phi_at_k_tilde = 0.0;
    double phi_at_k_hat = 0.0;
    bool gate_evaluated = false;
    bool gate_passed = false;
};

struct SelectionResult {
    std::vector<int> centers;  // prefix of the candidate list
    CutTrace trace;
};

/// Full center selection: x_(1) is always kept; a second center must pass
/// the connectivity gate (conductance not increasing from k_tilde to
/// k_tilde+1); further centers are ranked by the argmin of the max-cut
/// conductance over the base graph. Ties in the argmin prefer fewer
/// clusters.
SelectionResult select_centers(ComponentIndex& index, const PeakStats& stats,
                               const std::vector<int>& candidates,
                               const std::vector<WeightedEdge>& base_edges, int beta);

}  // namespace cpf
