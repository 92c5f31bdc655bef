#include "cpf/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <optional>

#include <json.hpp>

#include "cpf/metric.hpp"
#include "cpf/peaks.hpp"

namespace cpf {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

// Nearest-rank quantile on a copy of the values.
double quantile(std::vector<double> values, double q) {
    std::sort(values.begin(), values.end());
    q = std::clamp(q, 0.0, 1.0);
    std::size_t idx = static_cast<std::size_t>(q * static_cast<double>(values.size() - 1));
    return values[idx];
}

struct ComponentOutcome {
    std::vector<int> active;  // global ids that were assigned
    std::vector<int> labels;  // per active point, 0-based within the component
    ComponentSummary summary;
};

ComponentOutcome process_component(const MixedDataset& data, const NeighborGraph& graph,
                                   const std::vector<int>& members, int id,
                                   const CpfParams& params, int K) {
    ComponentOutcome out;
    out.summary.id = id;
    out.summary.size = members.size();

    ComponentIndex full_index(data, members);
    std::vector<double> phi = local_density(full_index, K, params.K_cap, params.threads);
    BigBrotherResult brothers = big_brothers(full_index, phi, graph, params.threads);
    out.summary.broad_searches = brothers.broad_searches;

    ComponentIndex* index = &full_index;
    std::optional<ComponentIndex> trimmed_index;
    std::vector<int> active_members = members;
    if (params.omega_quantile || params.phi_quantile) {
        const double omega_thr =
            params.omega_quantile ? quantile(brothers.omega, *params.omega_quantile) : 0.0;
        const double phi_thr = params.phi_quantile ? quantile(phi, *params.phi_quantile) : 0.0;
        std::vector<int> kept;
        kept.reserve(members.size());
        std::vector<double> phi_kept;
        phi_kept.reserve(members.size());
        for (std::size_t i = 0; i < members.size(); ++i) {
            bool omega_hit = !params.omega_quantile || brothers.omega[i] > omega_thr;
            bool phi_hit = !params.phi_quantile || phi[i] < phi_thr;
            if (!(omega_hit && phi_hit)) {
                kept.push_back(members[i]);
                phi_kept.push_back(phi[i]);
            }
        }
        out.summary.o2_removed = members.size() - kept.size();
        if (out.summary.o2_removed > 0) {
            if (kept.empty()) {
                // Unreachable with quantile thresholds (the extreme points
                // always survive), but keep the accounting consistent.
                out.summary.trace.beta_star = 0;
                out.active.clear();
                return out;
            }
            // Re-index the surviving points; densities carry over, big
            // brothers are recomputed among survivors only.
            active_members = std::move(kept);
            trimmed_index.emplace(data, active_members);
            index = &*trimmed_index;
            phi = std::move(phi_kept);
            brothers = big_brothers(*index, phi, graph, params.threads);
        }
    }

    PeakStats stats = make_peak_stats(std::move(phi), std::move(brothers));
    std::vector<int> candidates = candidate_centers(stats, params.beta);
    std::vector<WeightedEdge> base_edges = component_edges(graph, active_members);
    SelectionResult selection =
        select_centers(*index, stats, candidates, base_edges, params.beta);

    out.labels = assign(stats, selection.centers);
    out.active = active_members;
    out.summary.trace = selection.trace;
    for (int& c : out.summary.trace.candidates) c = index->global(c);
    out.summary.centers.reserve(selection.centers.size());
    for (int c : selection.centers) out.summary.centers.push_back(index->global(c));
    return out;
}

}  // namespace

int CpfParams::effective_K(std::size_t n) const {
    if (K > 0) return K;
    return static_cast<int>(std::ceil(std::sqrt(static_cast<double>(n))));
}

ClusteringResult cluster_with_lists(const MixedDataset& data, const CpfParams& params,
                                    const std::vector<std::vector<Neighbor>>& knn_lists) {
    const auto t_total = Clock::now();
    ClusteringResult result;
    if (data.n < 2) throw DataError("need at least 2 points");
    if (params.k < 1 || static_cast<std::size_t>(params.k) >= data.n)
        throw DataError("k must be < n");
    if (params.beta < 1) throw DataError("beta must be >= 1");

    // Slice the lists down to k (they may come from a larger search).
    auto t0 = Clock::now();
    std::vector<std::vector<Neighbor>> sliced(knn_lists.size());
    for (std::size_t i = 0; i < knn_lists.size(); ++i) {
        if (knn_lists[i].size() < static_cast<std::size_t>(params.k))
            throw DataError("precomputed neighbor lists are shorter than k");
        sliced[i].assign(knn_lists[i].begin(), knn_lists[i].begin() + params.k);
    }
    NeighborGraph graph = build_mutual_graph(std::move(sliced));
    result.timings.graph_ms = ms_since(t0);

    t0 = Clock::now();
    ComponentPartition partition = components(graph);
    result.timings.components_ms = ms_since(t0);
    result.outliers_o1 = partition.outliers.size();

    t0 = Clock::now();
    result.labels.assign(data.n, -1);
    const int K = params.effective_K(data.n);
    int next_id = 0;
    for (std::size_t c = 0; c < partition.components.size(); ++c) {
        ComponentOutcome outcome = process_component(data, graph, partition.components[c],
                                                     static_cast<int>(c), params, K);
        result.outliers_o2 += outcome.summary.o2_removed;
        for (std::size_t t = 0; t < outcome.active.size(); ++t)
            result.labels[static_cast<std::size_t>(outcome.active[t])] =
                next_id + outcome.labels[t];
        next_id += static_cast<int>(outcome.summary.centers.size());
        result.components.push_back(std::move(outcome.summary));
    }
    result.n_clusters = next_id;
    result.timings.peaks_ms = ms_since(t0);
    result.timings.total_ms = ms_since(t_total);
    return result;
}

ClusteringResult cluster(const MixedDataset& data, const CpfParams& params) {
    const auto t_total = Clock::now();
    KnnOptions knn_options;
    knn_options.backend = params.backend;
    knn_options.threads = params.threads;
    knn_options.seed = params.seed;

    auto t0 = Clock::now();
    std::vector<std::vector<Neighbor>> lists = knn_search(data, params.k, knn_options);
    double knn_ms = ms_since(t0);

    ClusteringResult result = cluster_with_lists(data, params, lists);
    result.timings.knn_ms = knn_ms;
    result.timings.total_ms = ms_since(t_total);
    return result;
}

std::vector<DecisionGraphRow> decision_graph(const MixedDataset& data, const CpfParams& params) {
    KnnOptions knn_options;
    knn_options.backend = params.backend;
    knn_options.threads = params.threads;
    knn_options.seed = params.seed;
    NeighborGraph graph = build_mutual_graph(knn_search(data, params.k, knn_options));
    ComponentPartition partition = components(graph);
    const int K = params.effective_K(data.n);

    std::vector<DecisionGraphRow> rows;
    for (std::size_t c = 0; c < partition.components.size(); ++c) {
        ComponentIndex index(data, partition.components[c]);
        std::vector<double> phi = local_density(index, K, params.K_cap, params.threads);
        BigBrotherResult brothers = big_brothers(index, phi, graph, params.threads);
        for (std::size_t i = 0; i < index.size(); ++i)
            rows.push_back(DecisionGraphRow{static_cast<int>(c), index.global(static_cast<int>(i)),
                                            phi[i], brothers.omega[i],
                                            phi[i] * brothers.omega[i]});
    }
    return rows;
}

SweepResult sweep(const MixedDataset& data, const std::vector<int>& ks,
                  const std::vector<int>& Ks, const CpfParams& base,
                  std::span<const int> truth, OutlierPolicy policy) {
    if (truth.size() != data.n) throw DataError("truth labels must cover every row");
    if (ks.empty() || Ks.empty()) throw DataError("empty sweep grid");
    const int k_max = *std::max_element(ks.begin(), ks.end());
    if (k_max < 1 || static_cast<std::size_t>(k_max) >= data.n) throw DataError("k must be < n");

    KnnOptions knn_options;
    knn_options.backend = base.backend;
    knn_options.threads = base.threads;
    knn_options.seed = base.seed;
    const std::vector<std::vector<Neighbor>> lists = knn_search(data, k_max, knn_options);

    SweepResult result;
    bool first = true;
    for (int k : ks) {
        CpfParams params = base;
        params.k = k;
        for (int K : Ks) {
            params.K = K;
            ClusteringResult clustering = cluster_with_lists(data, params, lists);
            SweepRow row;
            row.k = k;
            row.K = K;
            row.clusters = clustering.n_clusters;
            row.outliers = clustering.outliers_o1 + clustering.outliers_o2;
            row.indices = external_indices(clustering.labels, truth, policy);
            result.rows.push_back(row);
            if (first) {
                result.best_ari = result.best_nmi = result.best_purity = result.best_f1 =
                    result.best_ca = row;
                first = false;
            } else {
                if (row.indices.ari > result.best_ari.indices.ari) result.best_ari = row;
                if (row.indices.nmi > result.best_nmi.indices.nmi) result.best_nmi = row;
                if (row.indices.purity > result.best_purity.indices.purity)
                    result.best_purity = row;
                if (row.indices.f1 > result.best_f1.indices.f1) result.best_f1 = row;
                if (row.indices.ca > result.best_ca.indices.ca) result.best_ca = row;
            }
        }
    }
    return result;
}

std::string report_json(const ClusteringResult& result, const CpfParams& params,
                        const RawTable& table) {
    nlohmann::json j;
    j["schema"] = 1;
    j["params"] = {
        {"k", params.k},
        {"K", params.effective_K(table.n_rows)},
        {"K_cap", params.K_cap},
        {"beta", params.beta},
        {"weights", to_string(params.scheme)},
        {"threads", params.threads},
        {"seed", params.seed},
    };
    if (params.omega_quantile) j["params"]["omega_quantile"] = *params.omega_quantile;
    if (params.phi_quantile) j["params"]["phi_quantile"] = *params.phi_quantile;

    j["input"] = {
        {"rows", table.n_input_rows},
        {"rows_used", table.n_rows},
        {"rows_dropped", table.dropped_rows},
        {"columns_dropped", table.dropped_columns},
        {"numeric_features", table.p_numeric()},
        {"categorical_features", table.p_categorical()},
    };

    j["clusters"] = result.n_clusters;
    j["outliers_o1"] = result.outliers_o1;
    j["outliers_o2"] = result.outliers_o2;

    std::vector<std::size_t> sizes(static_cast<std::size_t>(std::max(result.n_clusters, 0)), 0);
    for (int label : result.labels)
        if (label >= 0) ++sizes[static_cast<std::size_t>(label)];
    j["cluster_sizes"] = sizes;

    j["components"] = nlohmann::json::array();
    for (const auto& comp : result.components) {
        nlohmann::json c;
        c["id"] = comp.id;
        c["size"] = comp.size;
        c["centers"] = comp.centers;
        c["beta_star"] = comp.trace.beta_star;
        c["candidates"] = comp.trace.candidates;
        c["o2_removed"] = comp.o2_removed;
        c["broad_searches"] = comp.broad_searches;
        if (comp.trace.gate_evaluated) {
            c["k_tilde"] = comp.trace.k_tilde;
            c["k_hat"] = comp.trace.k_hat;
            c["phi_at_k_tilde"] = comp.trace.phi_at_k_tilde;
            c["phi_at_k_hat"] = comp.trace.phi_at_k_hat;
            c["gate_passed"] = comp.trace.gate_passed;
        }
        nlohmann::json phis = nlohmann::json::array();
        for (std::size_t t = 0; t < comp.trace.phis.size(); ++t) {
            double v = comp.trace.phis[t];
            phis.push_back(std::isfinite(v) ? nlohmann::json(v) : nlohmann::json("inf"));
        }
        c["phi"] = phis;
        j["components"].push_back(std::move(c));
    }

    j["timings_ms"] = {
        {"knn", result.timings.knn_ms},
        {"graph", result.timings.graph_ms},
        {"components", result.timings.components_ms},
        {"peaks", result.timings.peaks_ms},
        {"total", result.timings.total_ms},
    };
    return j.dump(2);
}

}  // namespace cpf
