#include "cpf/validation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>

namespace cpf {

namespace {

std::vector<int> densify(std::span<const int> labels) {
    std::unordered_map<int, int> ids;
    std::vector<int> out;
    out.reserve(labels.size());
    for (int v : labels) {
        auto [it, inserted] = ids.emplace(v, static_cast<int>(ids.size()));
        out.push_back(it->second);
    }
    return out;
}

double comb2(double x) { return x < 2.0 ? 0.0 : x * (x - 1.0) / 2.0; }

}  // namespace

ContingencyTable ContingencyTable::from_labels(std::span<const int> pred,
                                               std::span<const int> truth) {
    if (pred.size() != truth.size()) throw DataError("label vectors differ in length");
    std::vector<int> p = densify(pred);
    std::vector<int> t = densify(truth);
    ContingencyTable table;
    table.n = p.size();
    table.rows = p.empty() ? 0 : static_cast<std::size_t>(*std::max_element(p.begin(), p.end())) + 1;
    table.cols = t.empty() ? 0 : static_cast<std::size_t>(*std::max_element(t.begin(), t.end())) + 1;
    table.counts.assign(table.rows * table.cols, 0);
    table.row_sums.assign(table.rows, 0);
    table.col_sums.assign(table.cols, 0);
    for (std::size_t i = 0; i < p.size(); ++i) {
        std::size_t r = static_cast<std::size_t>(p[i]);
        std::size_t c = static_cast<std::size_t>(t[i]);
        ++table.counts[r * table.cols + c];
        ++table.row_sums[r];
        ++table.col_sums[c];
    }
    return table;
}

double max_assignment(const std::vector<double>& scores, std::size_t rows, std::size_t cols) {
    // Hungarian algorithm on a square min-cost matrix; costs are negated
    // scores, padding is zero.
    const std::size_t n = std::max(rows, cols);
    if (n == 0) return 0.0;
    auto cost = [&](std::size_t i, std::size_t j) -> double {
        if (i < rows && j < cols) return -scores[i * cols + j];
        return 0.0;
    };
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
    std::vector<std::size_t> match(n + 1, 0);  // match[j] = row assigned to column j (1-based)
    for (std::size_t i = 1; i <= n; ++i) {
        match[0] = i;
        std::size_t j0 = 0;
        std::vector<double> minv(n + 1, inf);
        std::vector<char> used(n + 1, 0);
        std::vector<std::size_t> way(n + 1, 0);
        do {
            used[j0] = 1;
            std::size_t i0 = match[j0], j1 = 0;
            double delta = inf;
            for (std::size_t j = 1; j <= n; ++j) {
                if (used[j]) continue;
                double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (std::size_t j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[match[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (match[j0] != 0);
        do {
            std::size_t j1 = way[j0];
            match[j0] = match[j1];
            j0 = j1;
        } while (j0 != 0);
    }
    double total = 0.0;
    for (std::size_t j = 1; j <= n; ++j) {
        std::size_t i = match[j];
        if (i >= 1 && i - 1 < rows && j - 1 < cols) total += scores[(i - 1) * cols + (j - 1)];
    }
    return total;
}

ExternalIndices external_indices(std::span<const int> pred, std::span<const int> truth,
                                 OutlierPolicy policy) {
    if (pred.size() != truth.size()) throw DataError("label vectors differ in length");
    std::vector<int> p, t;
    p.reserve(pred.size());
    t.reserve(truth.size());
    for (std::size_t i = 0; i < pred.size(); ++i) {
        if (policy == OutlierPolicy::Exclude && pred[i] < 0) continue;
        p.push_back(pred[i]);
        t.push_back(truth[i]);
    }
    if (p.size() < 2) throw DataError("need at least 2 points after the outlier policy");

    ContingencyTable table = ContingencyTable::from_labels(p, t);
    const double n = static_cast<double>(table.n);

    // ARI.
    double sum_cells = 0.0;
    for (std::size_t r = 0; r < table.rows; ++r)
        for (std::size_t c = 0; c < table.cols; ++c)
            sum_cells += comb2(static_cast<double>(table.at(r, c)));
    double sum_rows = 0.0, sum_cols = 0.0;
    for (std::size_t r = 0; r < table.rows; ++r) sum_rows += comb2(static_cast<double>(table.row_sums[r]));
    for (std::size_t c = 0; c < table.cols; ++c) sum_cols += comb2(static_cast<double>(table.col_sums[c]));
    const double expected = sum_rows * sum_cols / comb2(n);
    const double max_index = 0.5 * (sum_rows + sum_cols);
    ExternalIndices out;
    out.ari = (max_index - expected) == 0.0 ? 1.0 : (sum_cells - expected) / (max_index - expected);

    // NMI with natural-log entropies and geometric-mean normalization.
    double mi = 0.0, h_pred = 0.0, h_true = 0.0;
    for (std::size_t r = 0; r < table.rows; ++r) {
        double a = static_cast<double>(table.row_sums[r]);
        if (a > 0.0) h_pred -= a / n * std::log(a / n);
    }
    for (std::size_t c = 0; c < table.cols; ++c) {
        double b = static_cast<double>(table.col_sums[c]);
        if (b > 0.0) h_true -= b / n * std::log(b / n);
    }
    for (std::size_t r = 0; r < table.rows; ++r) {
        for (std::size_t c = 0; c < table.cols; ++c) {
            double nij = static_cast<double>(table.at(r, c));
            if (nij == 0.0) continue;
            mi += nij / n *
                  std::log(nij * n /
                           (static_cast<double>(table.row_sums[r]) *
                            static_cast<double>(table.col_sums[c])));
        }
    }
    out.nmi = (h_pred <= 0.0 || h_true <= 0.0) ? 0.0 : mi / std::sqrt(h_pred * h_true);

    // Purity: dominant class share per predicted cluster.
    double dominant = 0.0;
    for (std::size_t r = 0; r < table.rows; ++r) {
        std::size_t best = 0;
        for (std::size_t c = 0; c < table.cols; ++c) best = std::max(best, table.at(r, c));
        dominant += static_cast<double>(best);
    }
    out.purity = dominant / n;

    // Pairwise F1 over co-clustered pairs.
    const double tp = sum_cells;
    const double pred_pairs = sum_rows, true_pairs = sum_cols;
    const double precision = pred_pairs > 0.0 ? tp / pred_pairs : 0.0;
    const double recall = true_pairs > 0.0 ? tp / true_pairs : 0.0;
    out.f1 = (precision + recall) > 0.0 ? 2.0 * precision * recall / (precision + recall) : 0.0;

    // Clustering accuracy via optimal cluster-to-class matching.
    std::vector<double> scores(table.rows * table.cols);
    for (std::size_t i = 0; i < scores.size(); ++i) scores[i] = static_cast<double>(table.counts[i]);
    out.ca = max_assignment(scores, table.rows, table.cols) / n;
    return out;
}

}  // namespace cpf
