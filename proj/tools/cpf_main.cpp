#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "cpf/pipeline.hpp"

namespace {

struct CommonArgs {
    std::string input;
    std::string schema_path;
    std::string truth_col;
    std::string delimiter = ",";
    cpf::CpfParams params;
    std::string weights = "w1";
    std::string backend = "auto";
    double omega_quantile = -1.0;
    double phi_quantile = -1.0;
};

void add_data_options(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--input", args.input, "Input CSV file with a header row")->required();
    cmd->add_option("--schema", args.schema_path, "JSON schema sidecar");
    cmd->add_option("--truth-col", args.truth_col, "Label column name (excluded from features)");
    cmd->add_option("--delimiter", args.delimiter, "Field delimiter (single character or 'tab')");
    cmd->add_option("--weights", args.weights, "Category weighting scheme")
        ->check(CLI::IsMember({"w1", "w2"}));
}

void add_param_options(CLI::App* cmd, CommonArgs& args, bool with_k_and_K = true) {
    if (with_k_and_K) {
        cmd->add_option("--k", args.params.k, "Mutual k-NN graph neighbor count");
        cmd->add_option("--K", args.params.K, "Density neighbor count (0 = ceil(sqrt(n)))");
    }
    cmd->add_option("--k-cap", args.params.K_cap, "Upper limit on K");
    cmd->add_option("--beta", args.params.beta, "Candidate-center budget per component");
    cmd->add_option("--omega-quantile", args.omega_quantile,
                    "Mark points with omega above this quantile as outliers (with --phi-quantile)");
    cmd->add_option("--phi-quantile", args.phi_quantile,
                    "Mark points with phi below this quantile as outliers (with --omega-quantile)");
    cmd->add_option("--threads", args.params.threads, "Worker threads (0 = all)")
        ->envname("CPF_THREADS");
    cmd->add_option("--seed", args.params.seed, "Seed for the approximate k-NN backend");
    cmd->add_option("--backend", args.backend, "k-NN backend")
        ->check(CLI::IsMember({"auto", "brute", "kdtree", "approx"}));
}

cpf::LoadOptions make_load_options(const CommonArgs& args) {
    cpf::LoadOptions options;
    if (args.delimiter == "tab" || args.delimiter == "\\t")
        options.delimiter = '\t';
    else if (!args.delimiter.empty())
        options.delimiter = args.delimiter[0];
    if (!args.schema_path.empty()) {
        std::ifstream in(args.schema_path);
        if (!in) throw cpf::DataError("cannot open schema \"" + args.schema_path + "\"");
        std::stringstream buf;
        buf << in.rdbuf();
        options.schema = cpf::parse_schema_json(buf.str());
    }
    if (!args.truth_col.empty()) options.label_column = args.truth_col;
    return options;
}

void finalize_params(CommonArgs& args) {
    args.params.scheme = args.weights == "w2" ? cpf::WeightScheme::W2 : cpf::WeightScheme::W1;
    if (args.backend == "brute") args.params.backend = cpf::KnnBackend::Brute;
    else if (args.backend == "kdtree") args.params.backend = cpf::KnnBackend::KdTree;
    else if (args.backend == "approx") args.params.backend = cpf::KnnBackend::RpForest;
    else args.params.backend = cpf::KnnBackend::Auto;
    if (args.omega_quantile >= 0.0) args.params.omega_quantile = args.omega_quantile;
    if (args.phi_quantile >= 0.0) args.params.phi_quantile = args.phi_quantile;
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw cpf::DataError("cannot write \"" + path + "\"");
    out << content;
    if (content.empty() || content.back() != '\n') out << '\n';
}

std::vector<int> read_label_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw cpf::DataError("cannot open \"" + path + "\"");
    std::vector<int> labels;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        try {
            labels.push_back(std::stoi(line));
        } catch (const std::exception&) {
            throw cpf::DataError("\"" + path + "\": bad label line \"" + line + "\"");
        }
    }
    if (labels.empty()) throw cpf::DataError("\"" + path + "\": no labels");
    return labels;
}

// Expands labels over retained rows to one entry per input row (-1 for
// dropped rows).
std::vector<int> per_input_row(const std::vector<int>& labels, const cpf::RawTable& table) {
    std::vector<int> out(table.n_input_rows, -1);
    for (std::size_t i = 0; i < table.source_row.size(); ++i)
        out[table.source_row[i]] = labels[i];
    return out;
}

std::string indices_json(const cpf::ExternalIndices& ix) {
    nlohmann::json j{{"ari", ix.ari}, {"nmi", ix.nmi}, {"purity", ix.purity},
                     {"f1", ix.f1},   {"ca", ix.ca}};
    return j.dump(2);
}

// Inclusive range grammar: "start:end[:step]" or a single value.
std::vector<int> parse_range(const std::string& text) {
    std::vector<int> parts;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ':')) {
        try {
            parts.push_back(std::stoi(tok));
        } catch (const std::exception&) {
            throw cpf::DataError("bad range \"" + text + "\"");
        }
    }
    std::vector<int> values;
    if (parts.size() == 1) {
        values.push_back(parts[0]);
    } else if (parts.size() == 2 || parts.size() == 3) {
        int step = parts.size() == 3 ? parts[2] : 1;
        if (step < 1 || parts[1] < parts[0])
            throw cpf::DataError("bad range \"" + text + "\"");
        for (int v = parts[0]; v <= parts[1]; v += step) values.push_back(v);
    } else {
        throw cpf::DataError("bad range \"" + text + "\"");
    }
    return values;
}

std::string sweep_row_csv(const cpf::SweepRow& row) {
    std::ostringstream line;
    line << row.k << ',' << row.K << ',' << row.clusters << ',' << row.outliers << ','
         << cpf::format_double(row.indices.ari) << ',' << cpf::format_double(row.indices.nmi)
         << ',' << cpf::format_double(row.indices.purity) << ','
         << cpf::format_double(row.indices.f1) << ',' << cpf::format_double(row.indices.ca);
    return line.str();
}

int run_cluster(CommonArgs& args, const std::string& out_path, const std::string& report_path) {
    finalize_params(args);
    cpf::RawTable table = cpf::load_table(args.input, make_load_options(args));
    cpf::MixedDataset data = cpf::fit_encode(table, args.params.scheme);
    cpf::ClusteringResult result = cpf::cluster(data, args.params);

    std::vector<int> rows = per_input_row(result.labels, table);
    std::ostringstream labels_csv;
    for (int v : rows) labels_csv << v << '\n';
    write_file(out_path, labels_csv.str());

    std::ostringstream rowmap;
    rowmap << "dataset_index,input_row\n";
    for (std::size_t i = 0; i < table.source_row.size(); ++i)
        rowmap << i << ',' << table.source_row[i] << '\n';
    write_file(out_path + ".rowmap.csv", rowmap.str());

    if (!report_path.empty())
        write_file(report_path, cpf::report_json(result, args.params, table));

    std::cerr << "clusters: " << result.n_clusters << ", outliers: "
              << result.outliers_o1 + result.outliers_o2 << " (of " << table.n_rows
              << " rows)\n";
    return 0;
}

int run_sweep(CommonArgs& args, const std::string& k_range, const std::string& K_range,
              bool exclude_outliers, const std::string& out_path,
              const std::string& report_path) {
    finalize_params(args);
    if (args.truth_col.empty()) throw cpf::DataError("sweep requires --truth-col");
    cpf::RawTable table = cpf::load_table(args.input, make_load_options(args));
    if (table.truth.empty()) throw cpf::DataError("no labels found in column \"" + args.truth_col + "\"");
    cpf::MixedDataset data = cpf::fit_encode(table, args.params.scheme);

    std::vector<int> ks = parse_range(k_range);
    std::vector<int> Ks = parse_range(K_range);
    cpf::OutlierPolicy policy =
        exclude_outliers ? cpf::OutlierPolicy::Exclude : cpf::OutlierPolicy::OwnCluster;
    cpf::SweepResult result = cpf::sweep(data, ks, Ks, args.params, table.truth, policy);

    std::ostringstream csv;
    csv << "k,K,clusters,outliers,ari,nmi,purity,f1,ca\n";
    for (const auto& row : result.rows) csv << sweep_row_csv(row) << '\n';
    write_file(out_path, csv.str());

    nlohmann::json best;
    auto best_entry = [](const cpf::SweepRow& row, double value) {
        return nlohmann::json{{"k", row.k}, {"K", row.K}, {"value", value}};
    };
    best["ari"] = best_entry(result.best_ari, result.best_ari.indices.ari);
    best["nmi"] = best_entry(result.best_nmi, result.best_nmi.indices.nmi);
    best["purity"] = best_entry(result.best_purity, result.best_purity.indices.purity);
    best["f1"] = best_entry(result.best_f1, result.best_f1.indices.f1);
    best["ca"] = best_entry(result.best_ca, result.best_ca.indices.ca);
    if (!report_path.empty()) {
        nlohmann::json report{{"schema", 1}, {"grid_rows", result.rows.size()}, {"best", best}};
        write_file(report_path, report.dump(2));
    }
    std::cout << best.dump(2) << '\n';
    return 0;
}

int run_evaluate(CommonArgs& args, const std::string& pred_path, const std::string& truth_path,
                 bool exclude_outliers, const std::string& out_path) {
    std::vector<int> pred = read_label_file(pred_path);
    std::vector<int> truth;
    if (!truth_path.empty()) {
        truth = read_label_file(truth_path);
    } else {
        if (args.input.empty() || args.truth_col.empty())
            throw cpf::DataError("evaluate needs --truth or --input with --truth-col");
        cpf::RawTable table = cpf::load_table(args.input, make_load_options(args));
        if (table.truth.empty())
            throw cpf::DataError("no labels found in column \"" + args.truth_col + "\"");
        if (pred.size() == table.n_input_rows) {
            std::vector<int> selected;
            selected.reserve(table.n_rows);
            for (std::size_t r : table.source_row) selected.push_back(pred[r]);
            pred = std::move(selected);
        } else if (pred.size() != table.n_rows) {
            throw cpf::DataError("prediction file covers neither all input rows nor all used rows");
        }
        truth = table.truth;
    }
    cpf::ExternalIndices ix = cpf::external_indices(
        pred, truth, exclude_outliers ? cpf::OutlierPolicy::Exclude : cpf::OutlierPolicy::OwnCluster);
    std::string json = indices_json(ix);
    if (!out_path.empty())
        write_file(out_path, json);
    else
        std::cout << json << '\n';
    return 0;
}

int run_decision_graph(CommonArgs& args, int component, const std::string& out_path) {
    finalize_params(args);
    args.params.omega_quantile.reset();  // the decision graph is pre-outlier by definition
    args.params.phi_quantile.reset();
    cpf::RawTable table = cpf::load_table(args.input, make_load_options(args));
    cpf::MixedDataset data = cpf::fit_encode(table, args.params.scheme);
    std::vector<cpf::DecisionGraphRow> rows = cpf::decision_graph(data, args.params);

    std::ostringstream csv;
    csv << "component,index,phi,omega,gamma\n";
    for (const auto& row : rows) {
        if (component >= 0 && row.component != component) continue;
        csv << row.component << ',' << row.index << ',' << cpf::format_double(row.phi) << ','
            << cpf::format_double(row.omega) << ',' << cpf::format_double(row.gamma) << '\n';
    }
    if (!out_path.empty())
        write_file(out_path, csv.str());
    else
        std::cout << csv.str();
    return 0;
}

int run_components(CommonArgs& args, const std::string& out_path, const std::string& graph_out) {
    finalize_params(args);
    cpf::RawTable table = cpf::load_table(args.input, make_load_options(args));
    cpf::MixedDataset data = cpf::fit_encode(table, args.params.scheme);

    cpf::KnnOptions knn_options;
    knn_options.backend = args.params.backend;
    knn_options.threads = args.params.threads;
    knn_options.seed = args.params.seed;
    cpf::NeighborGraph graph =
        cpf::build_mutual_graph(cpf::knn_search(data, args.params.k, knn_options));
    cpf::ComponentPartition partition = cpf::components(graph);

    std::ostringstream csv;
    csv << "index,component_id\n";
    for (std::size_t i = 0; i < partition.component_of.size(); ++i)
        csv << i << ',' << partition.component_of[i] << '\n';
    if (!out_path.empty())
        write_file(out_path, csv.str());
    else
        std::cout << csv.str();
    if (!graph_out.empty()) write_file(graph_out, cpf::dump_edges_csv(graph));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"CPF: component-based peak-finding clustering for mixed-attribute data"};
    app.require_subcommand(1);

    CommonArgs args;
    std::string out_path, report_path, pred_path, truth_path, k_range, K_range, graph_out;
    bool exclude_outliers = false;
    int component = -1;

    CLI::App* cluster = app.add_subcommand("cluster", "Cluster a dataset and write labels");
    add_data_options(cluster, args);
    add_param_options(cluster, args);
    cluster->add_option("--out", out_path, "Labels output file")->required();
    cluster->add_option("--report", report_path, "JSON report output file");

    CLI::App* sweep = app.add_subcommand("sweep", "Grid-search k and K against ground truth");
    add_data_options(sweep, args);
    add_param_options(sweep, args, /*with_k_and_K=*/false);
    sweep->add_option("--k", k_range, "k range start:end[:step]")->required();
    sweep->add_option("--K", K_range, "K range start:end[:step]")->required();
    sweep->add_flag("--exclude-outliers", exclude_outliers,
                    "Drop points labeled -1 instead of scoring them as one cluster");
    sweep->add_option("--out", out_path, "Results CSV output file")->required();
    sweep->add_option("--report", report_path, "JSON report output file");

    CLI::App* evaluate = app.add_subcommand("evaluate", "External validation indices");
    evaluate->add_option("--pred", pred_path, "Predicted labels file (one integer per line)")
        ->required();
    evaluate->add_option("--truth", truth_path, "True labels file (one integer per line)");
    evaluate->add_option("--input", args.input, "Input CSV (with --truth-col)");
    evaluate->add_option("--schema", args.schema_path, "JSON schema sidecar");
    evaluate->add_option("--truth-col", args.truth_col, "Label column in --input");
    evaluate->add_option("--delimiter", args.delimiter, "Field delimiter");
    evaluate->add_flag("--exclude-outliers", exclude_outliers,
                       "Drop points labeled -1 instead of scoring them as one cluster");
    evaluate->add_option("--out", out_path, "Write the JSON result here instead of stdout");

    CLI::App* decision = app.add_subcommand("decision-graph",
                                            "Per-point (phi, omega, gamma) per component");
    add_data_options(decision, args);
    add_param_options(decision, args);
    decision->add_option("--component", component, "Only this component id");
    decision->add_option("--out", out_path, "CSV output file (default stdout)");

    CLI::App* comps = app.add_subcommand("components", "Mutual-graph component id per point");
    add_data_options(comps, args);
    add_param_options(comps, args);
    comps->add_option("--out", out_path, "CSV output file (default stdout)");
    comps->add_option("--graph-out", graph_out, "Also dump the edge list (i, j, distance)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (app.got_subcommand(cluster)) return run_cluster(args, out_path, report_path);
        if (app.got_subcommand(sweep))
            return run_sweep(args, k_range, K_range, exclude_outliers, out_path, report_path);
        if (app.got_subcommand(evaluate))
            return run_evaluate(args, pred_path, truth_path, exclude_outliers, out_path);
        if (app.got_subcommand(decision)) return run_decision_graph(args, component, out_path);
        if (app.got_subcommand(comps)) return run_components(args, out_path, graph_out);
    } catch (const cpf::DataError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
    return 0;
}
