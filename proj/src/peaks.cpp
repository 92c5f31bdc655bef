#include "cpf/peaks.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>

#include "cpf/common.hpp"
#include "cpf/metric.hpp"

namespace cpf {

std::vector<double> local_density(ComponentIndex& index, int K, int K_cap, int threads) {
    const std::size_t m = index.size();
    std::vector<double> phi(m, 0.0);
    if (m < 2) return phi;
    const int k_eff = std::min({K, static_cast<int>(m) - 1, K_cap});
    if (k_eff < 1) return phi;
    parallel_for(m, threads, [&](std::size_t i) {
        const auto& nbrs = index.neighbors(static_cast<int>(i), k_eff);
        double sum = 0.0;
        for (int t = 0; t < k_eff; ++t) sum += std::exp(-nbrs[static_cast<std::size_t>(t)].dist);
        phi[i] = sum;
    });
    return phi;
}

BigBrotherResult big_brothers(ComponentIndex& index, const std::vector<double>& phi,
                              const NeighborGraph& graph, int threads) {
    const std::size_t m = index.size();
    BigBrotherResult out;
    out.omega.assign(m, 0.0);
    out.big_brother.assign(m, -1);
    if (m == 0) return out;

    auto denser = [&](int a, int b) {
        return phi[static_cast<std::size_t>(a)] > phi[static_cast<std::size_t>(b)] ||
               (phi[static_cast<std::size_t>(a)] == phi[static_cast<std::size_t>(b)] && a < b);
    };

    int top = 0;
    for (std::size_t i = 1; i < m; ++i)
        if (denser(static_cast<int>(i), top)) top = static_cast<int>(i);

    // Local position of every global point in this component, for the fast
    // path over the global k-NN lists.
    std::vector<int> local_of(graph.size(), -1);
    for (std::size_t t = 0; t < m; ++t)
        local_of[static_cast<std::size_t>(index.global(static_cast<int>(t)))] =
            static_cast<int>(t);

    std::atomic<std::size_t> broad{0};
    parallel_for(m, threads, [&](std::size_t i) {
        const int li = static_cast<int>(i);
        if (li == top) {
            double far = 0.0;
            for (std::size_t t = 0; t < m; ++t)
                if (t != i) far = std::max(far, index.dist(li, static_cast<int>(t)));
            out.omega[i] = far;
            out.big_brother[i] = -1;
            return;
        }
        // Fast path: the global k-NN list is sorted by (distance, index), so
        // the first in-component entry of higher density is the nearest one
        // overall.
        const auto& list = graph.knn[static_cast<std::size_t>(index.global(li))];
        for (const auto& nb : list) {
            int lj = local_of[static_cast<std::size_t>(nb.index)];
            if (lj < 0 || !denser(lj, li)) continue;
            out.omega[i] = nb.dist;
            out.big_brother[i] = lj;
            return;
        }
        // Broad search over the whole component.
        broad.fetch_add(1, std::memory_order_relaxed);
        int best = -1;
        double best_d = 0.0;
        for (std::size_t t = 0; t < m; ++t) {
            int lj = static_cast<int>(t);
            if (lj == li || !denser(lj, li)) continue;
            double d = index.dist(li, lj);
            if (best < 0 || d < best_d || (d == best_d && lj < best)) {
                best = lj;
                best_d = d;
            }
        }
        out.omega[i] = best_d;
        out.big_brother[i] = best;
    });
    out.broad_searches = broad.load();
    return out;
}

PeakStats make_peak_stats(std::vector<double> phi, BigBrotherResult brothers) {
    PeakStats stats;
    stats.phi = std::move(phi);
    stats.omega = std::move(brothers.omega);
    stats.big_brother = std::move(brothers.big_brother);
    const std::size_t m = stats.phi.size();
    stats.gamma.resize(m);
    for (std::size_t i = 0; i < m; ++i) stats.gamma[i] = stats.phi[i] * stats.omega[i];
    stats.density_order.resize(m);
    for (std::size_t i = 0; i < m; ++i) stats.density_order[i] = static_cast<int>(i);
    std::sort(stats.density_order.begin(), stats.density_order.end(), [&](int a, int b) {
        if (stats.phi[static_cast<std::size_t>(a)] != stats.phi[static_cast<std::size_t>(b)])
            return stats.phi[static_cast<std::size_t>(a)] > stats.phi[static_cast<std::size_t>(b)];
        return a < b;
    });
    return stats;
}

std::vector<int> candidate_centers(const PeakStats& stats, int beta) {
    std::vector<int> order = stats.density_order;
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (stats.gamma[static_cast<std::size_t>(a)] != stats.gamma[static_cast<std::size_t>(b)])
            return stats.gamma[static_cast<std::size_t>(a)] > stats.gamma[static_cast<std::size_t>(b)];
        return a < b;
    });
    // gamma = 0 means the point coincides with a denser one (omega = 0); a
    // duplicate can never seed a second cluster. The head stays regardless.
    std::size_t keep = 1;
    while (keep < order.size() && stats.gamma[static_cast<std::size_t>(order[keep])] > 0.0)
        ++keep;
    order.resize(std::min(keep, static_cast<std::size_t>(beta)));
    return order;
}

std::vector<int> assign(const PeakStats& stats, const std::vector<int>& centers) {
    std::vector<int> label(stats.phi.size(), -1);
    for (std::size_t t = 0; t < centers.size(); ++t)
        label[static_cast<std::size_t>(centers[t])] = static_cast<int>(t);
    for (int i : stats.density_order) {
        if (label[static_cast<std::size_t>(i)] >= 0) continue;
        int bb = stats.big_brother[static_cast<std::size_t>(i)];
        label[static_cast<std::size_t>(i)] = bb >= 0 ? label[static_cast<std::size_t>(bb)] : -1;
    }
    return label;
}

}  // namespace cpf
