#include "cpf/selection.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "cpf/common.hpp"

namespace cpf {

std::vector<WeightedEdge> component_edges(const NeighborGraph& graph,
                                          const std::vector<int>& members) {
    std::vector<int> local_of(graph.size(), -1);
    for (std::size_t t = 0; t < members.size(); ++t)
        local_of[static_cast<std::size_t>(members[t])] = static_cast<int>(t);

    std::vector<WeightedEdge> edges;
    for (std::size_t t = 0; t < members.size(); ++t) {
        const int la = static_cast<int>(t);
        for (const auto& nb : graph.adjacency[static_cast<std::size_t>(members[t])]) {
            if (nb.index < members[t]) continue;  // each edge once
            int lb = local_of[static_cast<std::size_t>(nb.index)];
            if (lb < 0) continue;  // endpoint outside the member list
            edges.push_back(WeightedEdge{la, lb, std::exp(-nb.dist)});
        }
    }
    return edges;
}

double cut_conductance(const std::vector<WeightedEdge>& edges, const std::vector<char>& in_s) {
    double crossing = 0.0, vol_s = 0.0, vol_rest = 0.0;
    for (const auto& e : edges) {
        bool sa = in_s[static_cast<std::size_t>(e.a)] != 0;
        bool sb = in_s[static_cast<std::size_t>(e.b)] != 0;
        if (sa != sb) {
            crossing += e.w;
            vol_s += e.w;
            vol_rest += e.w;
        } else if (sa) {
            vol_s += 2.0 * e.w;
        } else {
            vol_rest += 2.0 * e.w;
        }
    }
    double denom = std::min(vol_s, vol_rest);
    if (denom <= 0.0) return kInfiniteConductance;
    return crossing / denom;
}

std::vector<double> partition_conductances(const std::vector<WeightedEdge>& edges,
                                           const std::vector<int>& labels, int nclusters) {
    std::vector<double> crossing(static_cast<std::size_t>(nclusters), 0.0);
    std::vector<double> volume(static_cast<std::size_t>(nclusters), 0.0);
    double total = 0.0;
    for (const auto& e : edges) {
        int la = labels[static_cast<std::size_t>(e.a)];
        int lb = labels[static_cast<std::size_t>(e.b)];
        total += 2.0 * e.w;
        if (la >= 0) volume[static_cast<std::size_t>(la)] += e.w;
        if (lb >= 0) volume[static_cast<std::size_t>(lb)] += e.w;
        if (la != lb) {
            if (la >= 0) crossing[static_cast<std::size_t>(la)] += e.w;
            if (lb >= 0) crossing[static_cast<std::size_t>(lb)] += e.w;
        }
    }
    std::vector<double> phi(static_cast<std::size_t>(nclusters));
    for (int t = 0; t < nclusters; ++t) {
        double denom = std::min(volume[static_cast<std::size_t>(t)],
                                total - volume[static_cast<std::size_t>(t)]);
        phi[static_cast<std::size_t>(t)] =
            denom <= 0.0 ? kInfiniteConductance : crossing[static_cast<std::size_t>(t)] / denom;
    }
    return phi;
}

std::size_t MutualGraphBuilder::step() {
    const int m = static_cast<int>(index_.size());
    const std::size_t first_new = edges_.size();
    if (complete()) return first_new;
    ++k_;
    for (int i = 0; i < m; ++i) {
        const auto& list_i = index_.neighbors(i, k_);
        if (static_cast<int>(list_i.size()) < k_) continue;
        const Neighbor nb = list_i[static_cast<std::size_t>(k_ - 1)];
        const int j = nb.index;
        // Rank of i in j's first k_ neighbors; the edge becomes mutual at
        // max(rank_i(j), rank_j(i)) = k_, counted once.
        const auto& list_j = index_.neighbors(j, k_);
        const int upto = std::min<int>(k_, static_cast<int>(list_j.size()));
        for (int r = 0; r < upto; ++r) {
            if (list_j[static_cast<std::size_t>(r)].index != i) continue;
            if (r == k_ - 1 && i > j) break;  // both at rank k_: let the smaller index add it
            edges_.push_back(WeightedEdge{std::min(i, j), std::max(i, j), std::exp(-nb.dist)});
            break;
        }
    }
    return first_new;
}

namespace {

// Union-find over one side of a tentative 2-way split.
class SideConnectivity {
public:
    SideConnectivity(const std::vector<char>& side_of, char side) : parent_(side_of.size()) {
        std::iota(parent_.begin(), parent_.end(), 0);
        for (std::size_t i = 0; i < side_of.size(); ++i)
            if (side_of[i] == side) ++pieces_;
    }

    bool connected() const { return pieces_ <= 1; }

    void join(int a, int b) {
        int ra = find(a), rb = find(b);
        if (ra == rb) return;
        parent_[static_cast<std::size_t>(ra)] = rb;
        --pieces_;
    }

private:
    int find(int x) {
        while (parent_[static_cast<std::size_t>(x)] != x) {
            parent_[static_cast<std::size_t>(x)] =
                parent_[static_cast<std::size_t>(parent_[static_cast<std::size_t>(x)])];
            x = parent_[static_cast<std::size_t>(x)];
        }
        return x;
    }

    std::vector<int> parent_;
    int pieces_ = 0;
};

}  // namespace

int minimal_connectivity_k(MutualGraphBuilder& builder, const std::vector<char>& side_of) {
    SideConnectivity side0(side_of, 0), side1(side_of, 1);
    auto feed = [&](std::size_t from) {
        const auto& edges = builder.edges();
        for (std::size_t t = from; t < edges.size(); ++t) {
            const auto& e = edges[t];
            if (side_of[static_cast<std::size_t>(e.a)] != side_of[static_cast<std::size_t>(e.b)])
                continue;
            if (side_of[static_cast<std::size_t>(e.a)] == 0)
                side0.join(e.a, e.b);
            else
                side1.join(e.a, e.b);
        }
    };
    feed(0);  // edges already in the builder (k may have been advanced before)
    while (builder.k() < 1 || !(side0.connected() && side1.connected())) {
        std::size_t first_new = builder.step();
        feed(first_new);
        if (builder.complete() && !(side0.connected() && side1.connected())) {
            // Mutual (m-1)-NN on the component is complete, so this is
            // unreachable; guard against an endless loop all the same.
            break;
        }
    }
    return builder.k();
}

SelectionResult select_centers(ComponentIndex& index, const PeakStats& stats,
                               const std::vector<int>& candidates,
                               const std::vector<WeightedEdge>& base_edges, int beta) {
    SelectionResult result;
    result.trace.candidates = candidates;
    if (candidates.empty()) throw DataError("select_centers: no candidates");
    result.centers = {candidates[0]};
    result.trace.beta_star = 1;

    if (candidates.size() < 2 || index.size() < 3 || beta < 2) return result;

    // j = 2 gate: split with the top two candidates, then test whether the
    // cut's conductance grows when the neighborhood k is raised past the
    // minimal value at which both sides are internally connected.
    std::vector<int> labels2 = assign(stats, {candidates[0], candidates[1]});
    std::vector<char> side_of(labels2.size(), 0);
    for (std::size_t i = 0; i < labels2.size(); ++i) side_of[i] = labels2[i] == 1 ? 1 : 0;

    MutualGraphBuilder builder(index);
    const int k_tilde = minimal_connectivity_k(builder, side_of);
    const double phi_tilde = cut_conductance(builder.edges(), side_of);
    builder.step();
    const double phi_hat = cut_conductance(builder.edges(), side_of);

    result.trace.gate_evaluated = true;
    result.trace.k_tilde = k_tilde;
    result.trace.k_hat = builder.k();
    result.trace.phi_at_k_tilde = phi_tilde;
    result.trace.phi_at_k_hat = phi_hat;
    // Phi at k_tilde is 1 exactly when the smaller side has no internal
    // edges (a singleton: every incident edge crosses), and +inf when that
    // side is isolated outright. Neither is a cut between two modes, so the
    // second center is rejected. For proper cuts, equality counts as "not
    // increasing".
    if (!(phi_tilde < 1.0) || phi_hat > phi_tilde) {
        result.trace.gate_passed = false;
        return result;
    }
    result.trace.gate_passed = true;

    const int j_max = std::min<int>(beta, static_cast<int>(candidates.size()));
    result.trace.phis.push_back(cut_conductance(base_edges, side_of));
    std::vector<int> centers(candidates.begin(), candidates.begin() + 2);
    for (int j = 3; j <= j_max; ++j) {
        centers.push_back(candidates[static_cast<std::size_t>(j - 1)]);
        std::vector<int> labels = assign(stats, centers);
        std::vector<double> phis = partition_conductances(base_edges, labels, j);
        result.trace.phis.push_back(*std::max_element(phis.begin(), phis.end()));
    }

    int best_j = 2;
    double best_phi = result.trace.phis[0];
    for (std::size_t t = 1; t < result.trace.phis.size(); ++t) {
        if (result.trace.phis[t] < best_phi) {
            best_phi = result.trace.phis[t];
            best_j = static_cast<int>(t) + 2;
        }
    }
    result.trace.beta_star = best_j;
    result.centers.assign(candidates.begin(), candidates.begin() + best_j);
    return result;
}

}  // namespace cpf
