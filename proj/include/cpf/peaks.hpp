#pragma once

#include <vector>

#include "cpf/neighbors.hpp"

namespace cpf {

/// Per-point peak statistics inside one component, in local indexing
/// (positions into ComponentIndex::members(), which is sorted by global
/// index, so local order and global order agree).
struct PeakStats {
    std::vector<double> phi;     // local density
    std::vector<double> omega;   // distance to the big brother
    std::vector<double> gamma;   // phi * omega
    std::vector<int> big_brother;    // local index; -1 marks the density maximum
    std::vector<int> density_order;  // locals, densest first

    /// Strict density order: larger phi wins, ties go to the smaller index.
    bool denser(int a, int b) const {
        return phi[static_cast<std::size_t>(a)] > phi[static_cast<std::size_t>(b)] ||
               (phi[static_cast<std::size_t>(a)] == phi[static_cast<std::size_t>(b)] && a < b);
    }
};

/// phi_i = sum of exp(-d) over the K_eff nearest in-component neighbors,
/// K_eff = min(K, |C|-1, K_cap).
std::vector<double> local_density(ComponentIndex& index, int K, int K_cap, int threads = 1);

/// For every point: the nearest in-component point of strictly higher
/// (tie-broken) density and the distance to it. The density maximum instead
/// gets the maximal distance to any component point and big_brother -1.
/// The fast path scans the point's global k-NN list; points without an
/// in-list candidate fall back to a scan over the whole component.
struct BigBrotherResult {
    std::vector<double> omega;
    std::vector<int> big_brother;
    std::size_t broad_searches = 0;  // fallback count, for diagnostics
};
BigBrotherResult big_brothers(ComponentIndex& index, const std::vector<double>& phi,
                              const NeighborGraph& graph, int threads = 1);

/// Assembles PeakStats (gamma products and the density order).
PeakStats make_peak_stats(std::vector<double> phi, BigBrotherResult brothers);

/// The min(beta, |C|) points of highest gamma, descending, ties by
/// ascending index. The head of the list is always the density maximum.
std::vector<int> candidate_centers(const PeakStats& stats, int beta);

/// Labels every point: center t seeds cluster t, every other point inherits
/// its big brother's label in descending density order.
std::vector<int> assign(const PeakStats& stats, const std::vector<int>& centers);

}  // namespace cpf
