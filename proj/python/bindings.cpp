#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "cpf/pipeline.hpp"

namespace py = pybind11;

namespace {

struct LoadedInput {
    cpf::RawTable table;
    cpf::MixedDataset data;
};

cpf::WeightScheme parse_scheme(const std::string& weights) {
    if (weights == "w1") return cpf::WeightScheme::W1;
    if (weights == "w2") return cpf::WeightScheme::W2;
    throw cpf::DataError("weights must be \"w1\" or \"w2\"");
}

cpf::KnnBackend parse_backend(const std::string& backend) {
    if (backend == "auto") return cpf::KnnBackend::Auto;
    if (backend == "brute") return cpf::KnnBackend::Brute;
    if (backend == "kdtree") return cpf::KnnBackend::KdTree;
    if (backend == "approx") return cpf::KnnBackend::RpForest;
    throw cpf::DataError("backend must be auto, brute, kdtree or approx");
}

LoadedInput load_input(const std::string& input, const std::string& schema_path,
                       const std::string& truth_col, const std::string& delimiter,
                       cpf::WeightScheme scheme) {
    cpf::LoadOptions options;
    if (delimiter == "tab" || delimiter == "\\t")
        options.delimiter = '\t';
    else if (!delimiter.empty())
        options.delimiter = delimiter[0];
    if (!schema_path.empty()) {
        std::ifstream in(schema_path);
        if (!in) throw cpf::DataError("cannot open schema \"" + schema_path + "\"");
        std::stringstream buf;
        buf << in.rdbuf();
        options.schema = cpf::parse_schema_json(buf.str());
    }
    if (!truth_col.empty()) options.label_column = truth_col;
    LoadedInput loaded;
    loaded.table = cpf::load_table(input, options);
    loaded.data = cpf::fit_encode(loaded.table, scheme);
    return loaded;
}

cpf::CpfParams make_params(int k, int K, int k_cap, int beta, cpf::WeightScheme scheme,
                           double omega_quantile, double phi_quantile,
                           const std::string& backend, std::uint64_t seed, int threads) {
    cpf::CpfParams params;
    params.k = k;
    params.K = K;
    params.K_cap = k_cap;
    params.beta = beta;
    params.scheme = scheme;
    if (omega_quantile >= 0.0) params.omega_quantile = omega_quantile;
    if (phi_quantile >= 0.0) params.phi_quantile = phi_quantile;
    params.backend = parse_backend(backend);
    params.seed = seed;
    params.threads = threads;
    return params;
}

py::dict indices_dict(const cpf::ExternalIndices& ix) {
    py::dict out;
    out["ari"] = ix.ari;
    out["nmi"] = ix.nmi;
    out["purity"] = ix.purity;
    out["f1"] = ix.f1;
    out["ca"] = ix.ca;
    return out;
}

}  // namespace

PYBIND11_MODULE(_cpf, m) {
    m.doc() = "Component-based peak-finding clustering for mixed-attribute data";
    m.attr("__version__") = "0.1.0";

    m.def(
        "cluster_file",
        [](const std::string& input, const std::string& schema, const std::string& truth_col,
           const std::string& delimiter, int k, int K, int k_cap, int beta,
           const std::string& weights, double omega_quantile, double phi_quantile,
           const std::string& backend, std::uint64_t seed, int threads) {
            auto scheme = parse_scheme(weights);
            LoadedInput loaded = load_input(input, schema, truth_col, delimiter, scheme);
            cpf::CpfParams params = make_params(k, K, k_cap, beta, scheme, omega_quantile,
                                                phi_quantile, backend, seed, threads);
            cpf::ClusteringResult result;
            {
                py::gil_scoped_release release;
                result = cpf::cluster(loaded.data, params);
            }
            // One label per input row; dropped rows stay -1.
            std::vector<int> per_row(loaded.table.n_input_rows, -1);
            for (std::size_t i = 0; i < loaded.table.source_row.size(); ++i)
                per_row[loaded.table.source_row[i]] = result.labels[i];
            py::dict out;
            out["labels"] = per_row;
            out["used_rows"] = loaded.table.source_row;
            out["truth"] = loaded.table.truth;
            out["report_json"] = cpf::report_json(result, params, loaded.table);
            return out;
        },
        py::arg("input"), py::kw_only(), py::arg("schema") = "", py::arg("truth_col") = "",
        py::arg("delimiter") = ",", py::arg("k") = 10, py::arg("K") = 0, py::arg("k_cap") = 100,
        py::arg("beta") = 50, py::arg("weights") = "w1", py::arg("omega_quantile") = -1.0,
        py::arg("phi_quantile") = -1.0, py::arg("backend") = "auto", py::arg("seed") = 0,
        py::arg("threads") = 0,
        "Cluster a delimited text file; returns labels per input row plus the JSON report.");

    m.def(
        "evaluate",
        [](const std::vector<int>& pred, const std::vector<int>& truth, bool exclude_outliers) {
            auto policy = exclude_outliers ? cpf::OutlierPolicy::Exclude
                                           : cpf::OutlierPolicy::OwnCluster;
            return indices_dict(cpf::external_indices(pred, truth, policy));
        },
        py::arg("pred"), py::arg("truth"), py::kw_only(), py::arg("exclude_outliers") = false,
        "External validation indices (ARI, NMI, purity, pairwise F1, clustering accuracy).");

    m.def(
        "sweep_file",
        [](const std::string& input, const std::vector<int>& ks, const std::vector<int>& Ks,
           const std::string& truth_col, const std::string& schema, const std::string& delimiter,
           const std::string& weights, int k_cap, int beta, const std::string& backend,
           std::uint64_t seed, int threads, bool exclude_outliers) {
            auto scheme = parse_scheme(weights);
            if (truth_col.empty()) throw cpf::DataError("sweep requires truth_col");
            LoadedInput loaded = load_input(input, schema, truth_col, delimiter, scheme);
            if (loaded.table.truth.empty())
                throw cpf::DataError("no labels found in column \"" + truth_col + "\"");
            cpf::CpfParams base = make_params(1, 0, k_cap, beta, scheme, -1.0, -1.0, backend,
                                              seed, threads);
            auto policy = exclude_outliers ? cpf::OutlierPolicy::Exclude
                                           : cpf::OutlierPolicy::OwnCluster;
            cpf::SweepResult result;
            {
                py::gil_scoped_release release;
                result = cpf::sweep(loaded.data, ks, Ks, base, loaded.table.truth, policy);
            }
            py::list rows;
            for (const auto& row : result.rows) {
                py::dict r;
                r["k"] = row.k;
                r["K"] = row.K;
                r["clusters"] = row.clusters;
                r["outliers"] = row.outliers;
                r["indices"] = indices_dict(row.indices);
                rows.append(r);
            }
            py::dict best;
            auto best_entry = [](const cpf::SweepRow& row) {
                py::dict b;
                b["k"] = row.k;
                b["K"] = row.K;
                b["indices"] = indices_dict(row.indices);
                return b;
            };
            best["ari"] = best_entry(result.best_ari);
            best["nmi"] = best_entry(result.best_nmi);
            best["purity"] = best_entry(result.best_purity);
            best["f1"] = best_entry(result.best_f1);
            best["ca"] = best_entry(result.best_ca);
            py::dict out;
            out["rows"] = rows;
            out["best"] = best;
            return out;
        },
        py::arg("input"), py::arg("ks"), py::arg("Ks"), py::kw_only(), py::arg("truth_col"),
        py::arg("schema") = "", py::arg("delimiter") = ",", py::arg("weights") = "w1",
        py::arg("k_cap") = 100, py::arg("beta") = 50, py::arg("backend") = "auto",
        py::arg("seed") = 0, py::arg("threads") = 0, py::arg("exclude_outliers") = false,
        "Grid-search k and K against a ground-truth column.");

    m.def(
        "decision_graph_file",
        [](const std::string& input, const std::string& schema, const std::string& truth_col,
           const std::string& delimiter, int k, int K, int k_cap, const std::string& weights,
           const std::string& backend, std::uint64_t seed, int threads) {
            auto scheme = parse_scheme(weights);
            LoadedInput loaded = load_input(input, schema, truth_col, delimiter, scheme);
            cpf::CpfParams params = make_params(k, K, k_cap, 50, scheme, -1.0, -1.0, backend,
                                                seed, threads);
            std::vector<cpf::DecisionGraphRow> rows;
            {
                py::gil_scoped_release release;
                rows = cpf::decision_graph(loaded.data, params);
            }
            py::list out;
            for (const auto& row : rows)
                out.append(py::make_tuple(row.component, row.index, row.phi, row.omega,
                                          row.gamma));
            return out;
        },
        py::arg("input"), py::kw_only(), py::arg("schema") = "", py::arg("truth_col") = "",
        py::arg("delimiter") = ",", py::arg("k") = 10, py::arg("K") = 0, py::arg("k_cap") = 100,
        py::arg("weights") = "w1", py::arg("backend") = "auto", py::arg("seed") = 0,
        py::arg("threads") = 0,
        "Per-point (component, index, phi, omega, gamma) decision-graph rows.");

    py::register_exception<cpf::DataError>(m, "DataError", PyExc_ValueError);
}
