#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cpf/encoding.hpp"
#include "cpf/selection.hpp"
#include "cpf/table.hpp"
#include "cpf/validation.hpp"

namespace cpf {

struct CpfParams {
    int k = 10;        // mutual-graph neighbors
    int K = 0;         // density neighbors; 0 = ceil(sqrt(n))
    int K_cap = 100;   // upper limit on K
    int beta = 50;     // candidate-center budget
    WeightScheme scheme = WeightScheme::W1;
    // Decision-graph outlier thresholds (off unless set): a point is dropped
    // when its omega lies above the omega-quantile and its phi below the
    // phi-quantile; a missing side of the pair is no constraint.
    std::optional<double> omega_quantile;
    std::optional<double> phi_quantile;
    KnnBackend backend = KnnBackend::Auto;
    std::uint64_t seed = 0;  // approximate backend only
    int threads = 0;         // 0 = available parallelism

    int effective_K(std::size_t n) const;
};

struct ComponentSummary {
    int id = 0;
    std::size_t size = 0;
    std::vector<int> centers;  // global point indices
    CutTrace trace;            // candidates as global point indices
    std::size_t o2_removed = 0;
    std::size_t broad_searches = 0;
};

struct StageTimings {
    double knn_ms = 0.0;
    double graph_ms = 0.0;
    double components_ms = 0.0;
    double peaks_ms = 0.0;  // density, big brothers, selection, assignment
    double total_ms = 0.0;
};

struct ClusteringResult {
    std::vector<int> labels;  // per dataset row; -1 = outlier
    int n_clusters = 0;
    std::size_t outliers_o1 = 0;
    std::size_t outliers_o2 = 0;
    std::vector<ComponentSummary> components;
    StageTimings timings;
};

/// End-to-end CPF: mutual k-NN graph, components, per-component peak
/// statistics, conductance-guided center selection and assignment. Cluster
/// ids are globally unique, assigned in component order; outliers get -1.
/// Deterministic for fixed params and seed, for any thread count.
ClusteringResult cluster(const MixedDataset& data, const CpfParams& params);

/// Same, but with precomputed k-NN lists whose length is at least params.k;
/// the lists' prefixes are used. Backbone of the parameter sweep.
ClusteringResult cluster_with_lists(const MixedDataset& data, const CpfParams& params,
                                    const std::vector<std::vector<Neighbor>>& knn_lists);

/// One decision-graph row per non-outlier point (outlier thresholds are not
/// applied: the decision graph is what one would choose them from).
struct DecisionGraphRow {
    int component;
    int index;  // global point index
    double phi, omega, gamma;
};
std::vector<DecisionGraphRow> decision_graph(const MixedDataset& data, const CpfParams& params);

struct SweepRow {
    int k = 0;
    int K = 0;
    int clusters = 0;
    std::size_t outliers = 0;
    ExternalIndices indices;
};

struct SweepResult {
    std::vector<SweepRow> rows;  // grid order: k outer (as given), K inner
    // Argmax row per index, in {ari, nmi, purity, f1, ca} order.
    SweepRow best_ari, best_nmi, best_purity, best_f1, best_ca;
};

/// Runs cluster() over the (k, K) grid against ground truth. k-NN lists are
/// computed once at max(ks) and sliced, and in-component neighbor caches are
/// reused across the K loop.
SweepResult sweep(const MixedDataset& data, const std::vector<int>& ks,
                  const std::vector<int>& Ks, const CpfParams& base,
                  std::span<const int> truth, OutlierPolicy policy = OutlierPolicy::OwnCluster);

/// Versioned JSON report: parameters, cluster sizes, per-component
/// conductance traces and stage timings.
std::string report_json(const ClusteringResult& result, const CpfParams& params,
                        const RawTable& table);

}  // namespace cpf
