#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>

#include "cpf/neighbors.hpp"
#include "support/oracles.hpp"
#include "support/synth.hpp"

using testsupport::brute_knn;
using testsupport::numeric_dataset;
using testsupport::random_mixed_dataset;

namespace {

bool lists_equal(const std::vector<std::vector<cpf::Neighbor>>& a,
                 const std::vector<std::vector<cpf::Neighbor>>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i].size() != b[i].size()) return false;
        for (std::size_t t = 0; t < a[i].size(); ++t)
            if (a[i][t].index != b[i][t].index || a[i][t].dist != b[i][t].dist) return false;
    }
    return true;
}

std::set<std::pair<int, int>> edge_set(const cpf::NeighborGraph& graph) {
    std::set<std::pair<int, int>> edges;
    for (std::size_t i = 0; i < graph.size(); ++i)
        for (const auto& nb : graph.adjacency[i])
            edges.emplace(std::min<int>(static_cast<int>(i), nb.index),
                          std::max<int>(static_cast<int>(i), nb.index));
    return edges;
}

}  // namespace

TEST_CASE("collinear points 0, 1, 3 with k = 1") {
    auto data = numeric_dataset({{0.0}, {1.0}, {3.0}});
    auto lists = cpf::knn_search(data, 1);
    CHECK(lists[0][0].index == 1);
    CHECK(lists[1][0].index == 0);
    CHECK(lists[2][0].index == 1);

    auto graph = cpf::build_mutual_graph(lists);
    CHECK(edge_set(graph) == std::set<std::pair<int, int>>{{0, 1}});
    CHECK(graph.adjacency[2].empty());

    auto partition = cpf::components(graph);
    REQUIRE(partition.components.size() == 1);
    CHECK(partition.components[0] == std::vector<int>{0, 1});
    CHECK(partition.outliers == std::vector<int>{2});
    CHECK(partition.component_of[2] == cpf::ComponentPartition::kOutlier);
}

TEST_CASE("k = n-1 yields complete lists and a complete mutual graph") {
    std::mt19937_64 rng(37);
    auto data = random_mixed_dataset(rng, 12, 2, {2});
    auto lists = cpf::knn_search(data, 11);
    for (const auto& list : lists) CHECK(list.size() == 11);
    auto graph = cpf::build_mutual_graph(lists);
    CHECK(graph.edge_count() == 12 * 11 / 2);
    auto partition = cpf::components(graph);
    CHECK(partition.components.size() == 1);
    CHECK(partition.outliers.empty());
}

TEST_CASE("coincident points are mutual nearest neighbors at distance zero") {
    auto data = numeric_dataset({{1.0}, {1.0}, {9.0}, {9.0}});
    auto lists = cpf::knn_search(data, 1);
    CHECK(lists[0][0].index == 1);
    CHECK(lists[0][0].dist == 0.0);
    CHECK(lists[1][0].index == 0);
    auto graph = cpf::build_mutual_graph(lists);
    CHECK(edge_set(graph) == std::set<std::pair<int, int>>{{0, 1}, {2, 3}});
}

TEST_CASE("k out of range throws") {
    auto data = numeric_dataset({{0.0}, {1.0}});
    CHECK_THROWS_WITH_AS(cpf::knn_search(data, 2), "k must be < n", cpf::DataError);
    CHECK_THROWS_AS(cpf::knn_search(data, 0), cpf::DataError);
}

TEST_CASE("brute backend matches the full-sort oracle exactly") {
    std::mt19937_64 rng(41);
    for (int rep = 0; rep < 10; ++rep) {
        std::size_t n = 20 + static_cast<std::size_t>(rep) * 18;
        auto data = random_mixed_dataset(rng, n, 2, {3, 2});
        int k = 1 + rep % 7;
        CHECK(lists_equal(cpf::knn_search(data, k), brute_knn(data, k)));
    }
}

TEST_CASE("kd-tree backend matches brute force, including lattice ties") {
    std::mt19937_64 rng(43);
    // Dyadic lattice coordinates make distance ties exact, so the (distance,
    // index) tie-break must agree between backends.
    std::uniform_int_distribution<int> lattice(-8, 8);
    std::vector<std::vector<double>> points;
    for (int i = 0; i < 300; ++i)
        points.push_back({lattice(rng) / 4.0, lattice(rng) / 4.0});
    auto data = numeric_dataset(points);

    cpf::KnnOptions tree_options;
    tree_options.backend = cpf::KnnBackend::KdTree;
    for (int k : {1, 3, 10}) {
        auto expected = brute_knn(data, k);
        CHECK(lists_equal(cpf::knn_search(data, k, tree_options), expected));
    }

    auto mixed = random_mixed_dataset(rng, 250, 3, {4});
    for (int k : {2, 7}) {
        CHECK(lists_equal(cpf::knn_search(mixed, k, tree_options), brute_knn(mixed, k)));
    }
}

TEST_CASE("approximate backend is seeded, deterministic, and finds most neighbors") {
    std::mt19937_64 rng(47);
    std::normal_distribution<double> gauss(0.0, 0.4);
    std::vector<std::vector<double>> points;
    for (int c = 0; c < 5; ++c)
        for (int i = 0; i < 80; ++i)
            points.push_back({c * 4.0 + gauss(rng), (c % 2) * 4.0 + gauss(rng)});
    auto data = numeric_dataset(points);

    cpf::KnnOptions approx;
    approx.backend = cpf::KnnBackend::RpForest;
    approx.seed = 99;
    const int k = 10;
    auto lists = cpf::knn_search(data, k, approx);
    auto again = cpf::knn_search(data, k, approx);
    CHECK(lists_equal(lists, again));

    auto exact = brute_knn(data, k);
    std::size_t hits = 0, total = 0;
    for (std::size_t i = 0; i < data.n; ++i) {
        std::set<int> truth;
        for (const auto& nb : exact[i]) truth.insert(nb.index);
        for (const auto& nb : lists[i]) hits += truth.count(nb.index);
        total += static_cast<std::size_t>(k);
        CHECK(lists[i].size() == static_cast<std::size_t>(k));
    }
    CHECK(static_cast<double>(hits) / static_cast<double>(total) >= 0.6);
}

TEST_CASE("graph invariants: symmetry, mutuality, sorted lists") {
    std::mt19937_64 rng(53);
    auto data = random_mixed_dataset(rng, 120, 2, {3});
    auto graph = cpf::build_mutual_graph(cpf::knn_search(data, 6));

    for (std::size_t i = 0; i < graph.size(); ++i) {
        const auto& list = graph.knn[i];
        for (std::size_t t = 1; t < list.size(); ++t) {
            bool ascending = list[t - 1].dist < list[t].dist ||
                             (list[t - 1].dist == list[t].dist &&
                              list[t - 1].index < list[t].index);
            CHECK(ascending);
        }
        for (const auto& nb : graph.adjacency[i]) {
            const auto& back = graph.adjacency[static_cast<std::size_t>(nb.index)];
            bool symmetric = std::any_of(back.begin(), back.end(), [&](const cpf::Neighbor& b) {
                return b.index == static_cast<int>(i);
            });
            CHECK(symmetric);
            auto in_knn = [&](std::size_t a, int b) {
                return std::any_of(graph.knn[a].begin(), graph.knn[a].end(),
                                   [&](const cpf::Neighbor& x) { return x.index == b; });
            };
            CHECK(in_knn(i, nb.index));
            CHECK(in_knn(static_cast<std::size_t>(nb.index), static_cast<int>(i)));
        }
    }
}

TEST_CASE("edges and components are monotone in k") {
    std::mt19937_64 rng(59);
    auto data = random_mixed_dataset(rng, 100, 2, {2});
    auto lists = cpf::knn_search(data, 9);
    std::set<std::pair<int, int>> previous;
    for (int k = 1; k <= 9; ++k) {
        std::vector<std::vector<cpf::Neighbor>> sliced(lists.size());
        for (std::size_t i = 0; i < lists.size(); ++i)
            sliced[i].assign(lists[i].begin(), lists[i].begin() + k);
        auto edges = edge_set(cpf::build_mutual_graph(sliced));
        CHECK(std::includes(edges.begin(), edges.end(), previous.begin(), previous.end()));
        previous = std::move(edges);
    }
}

TEST_CASE("outliers plus component members cover every point") {
    std::mt19937_64 rng(61);
    auto data = random_mixed_dataset(rng, 150, 2, {3});
    auto graph = cpf::build_mutual_graph(cpf::knn_search(data, 3));
    auto partition = cpf::components(graph);
    std::size_t covered = partition.outliers.size();
    for (const auto& members : partition.components) {
        CHECK(members.size() >= 2);
        covered += members.size();
    }
    CHECK(covered == data.n);
}

TEST_CASE("edge dump lists each edge once with its distance") {
    auto data = numeric_dataset({{0.0}, {1.0}, {3.0}});
    auto graph = cpf::build_mutual_graph(cpf::knn_search(data, 1));
    CHECK(cpf::dump_edges_csv(graph) == "i,j,distance\n0,1,1\n");
}

TEST_CASE("component index matches brute-force in-component lists on both paths") {
    std::mt19937_64 rng(67);
    auto data = random_mixed_dataset(rng, 80, 2, {3});
    std::vector<int> members;
    for (int i = 0; i < 80; i += 2) members.push_back(i);  // synthetic "component"

    cpf::ComponentIndex index(data, members);
    for (int local = 0; local < static_cast<int>(members.size()); ++local) {
        std::vector<std::pair<double, int>> all;
        for (std::size_t t = 0; t < members.size(); ++t) {
            if (static_cast<int>(t) == local) continue;
            all.emplace_back(cpf::squared_distance(data,
                                                   static_cast<std::size_t>(members[static_cast<std::size_t>(local)]),
                                                   static_cast<std::size_t>(members[t])),
                             static_cast<int>(t));
        }
        std::sort(all.begin(), all.end());
        const auto& got = index.neighbors(local, 7);
        for (int t = 0; t < 7; ++t) {
            CHECK(got[static_cast<std::size_t>(t)].index == all[static_cast<std::size_t>(t)].second);
        }
    }
}

TEST_CASE("component index tree path matches direct computation on large member sets") {
    // Above the internal threshold the index switches to a kd-tree over the
    // weighted one-hot embedding; results must match the closed-form brute
    // path bit for bit after distance refinement.
    std::mt19937_64 rng(211);
    auto data = random_mixed_dataset(rng, 2500, 3, {3});
    std::vector<int> members(2500);
    for (int i = 0; i < 2500; ++i) members[static_cast<std::size_t>(i)] = i;
    cpf::ComponentIndex index(data, members);

    std::uniform_int_distribution<int> pick(0, 2499);
    for (int rep = 0; rep < 12; ++rep) {
        int local = pick(rng);
        // Grow the cache in stages; prefixes must stay consistent.
        const auto& small = index.neighbors(local, 3);
        std::vector<cpf::Neighbor> first3(small.begin(), small.begin() + 3);
        const auto& grown = index.neighbors(local, 25);
        for (int t = 0; t < 3; ++t) {
            CHECK(grown[static_cast<std::size_t>(t)].index == first3[static_cast<std::size_t>(t)].index);
            CHECK(grown[static_cast<std::size_t>(t)].dist == first3[static_cast<std::size_t>(t)].dist);
        }

        std::vector<std::pair<double, int>> all;
        for (int t = 0; t < 2500; ++t) {
            if (t == local) continue;
            all.emplace_back(cpf::squared_distance(data, static_cast<std::size_t>(local),
                                                   static_cast<std::size_t>(t)),
                             t);
        }
        std::sort(all.begin(), all.end());
        for (int t = 0; t < 25; ++t) {
            CHECK(grown[static_cast<std::size_t>(t)].index == all[static_cast<std::size_t>(t)].second);
            CHECK(grown[static_cast<std::size_t>(t)].dist ==
                  std::sqrt(all[static_cast<std::size_t>(t)].first));
        }
    }
}
