#pragma once

#include <Eigen/Dense>

#include <vector>

#include "siis/graph.hpp"
#include "siis/rng.hpp"
#include "siis/solver.hpp"
#include "siis/spectral.hpp"

namespace siis::testing {

/// Graph assembled directly from an explicit edge list (bypasses KNN).
inline Graph graph_from_edges(int n, std::vector<Edge> edges) {
    for (Edge& e : edges) {
        if (e.i > e.j) std::swap(e.i, e.j);
    }
    std::sort(edges.begin(), edges.end(),
              [](const Edge& a, const Edge& b) { return std::pair(a.i, a.j) < std::pair(b.i, b.j); });
    Graph g;
    g.edge_list = std::move(edges);
    g.degrees = Eigen::VectorXd::Zero(n);
    std::vector<Eigen::Triplet<double>> trips;
    for (const Edge& e : g.edge_list) {
        trips.emplace_back(e.i, e.j, e.weight);
        trips.emplace_back(e.j, e.i, e.weight);
        g.degrees[e.i] += e.weight;
        g.degrees[e.j] += e.weight;
    }
    g.adjacency.resize(n, n);
    g.adjacency.setFromTriplets(trips.begin(), trips.end());
    g.kernel_width = 1.0;
    g.neighbors = 1;
    return g;
}

inline Graph chain_graph(int n, double weight = 1.0) {
    std::vector<Edge> edges;
    for (int i = 0; i + 1 < n; ++i) edges.push_back({i, i + 1, weight});
    return graph_from_edges(n, edges);
}

/// Two k-cliques joined by one bridge edge.
inline Graph two_cliques(int clique_size, double bridge_weight) {
    std::vector<Edge> edges;
    const int n = 2 * clique_size;
    for (int block = 0; block < 2; ++block) {
        const int base = block * clique_size;
        for (int i = 0; i < clique_size; ++i)
            for (int j = i + 1; j < clique_size; ++j)
                edges.push_back({base + i, base + j, 1.0});
    }
    edges.push_back({clique_size - 1, clique_size, bridge_weight});
    return graph_from_edges(n, edges);
}

inline Dataset random_dataset(int n, int d, int l, std::uint64_t seed) {
    Rng rng(seed);
    Dataset data;
    data.features.resize(n, d);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < d; ++j) data.features(i, j) = rng.normal();
    data.given_labels.resize(static_cast<std::size_t>(l));
    for (int i = 0; i < l; ++i)
        data.given_labels[static_cast<std::size_t>(i)] = 1 + static_cast<int>(rng.below(2));
    return data;
}

inline Eigen::MatrixXd one_hot(const std::vector<int>& labels, int c) {
    Eigen::MatrixXd y = Eigen::MatrixXd::Zero(static_cast<int>(labels.size()), c);
    for (std::size_t i = 0; i < labels.size(); ++i) y(static_cast<int>(i), labels[i] - 1) = 1.0;
    return y;
}

inline int dense_rank(const Eigen::MatrixXd& m) {
    return static_cast<int>(Eigen::FullPivLU<Eigen::MatrixXd>(m).rank());
}

/// Random small problem instance on a random KNN graph; labels random.
struct TinyInstance {
    Graph graph;
    SpMat lap;
    DifferenceOperator diff;
    SpectralBasis basis;
    Eigen::MatrixXd y;
    ProblemInstance inst;
};

inline TinyInstance tiny_instance(int n, int l, int c, int m, std::uint64_t seed) {
    TinyInstance t;
    Dataset data = random_dataset(n, 2, l, seed);
    t.graph = build_knn_graph(data, 3, 1.0);
    t.lap = laplacian(t.graph);
    t.diff = difference_operator(t.graph);
    t.basis = smallest_eigenpairs(t.lap, m);
    Rng rng(fanout_seed(seed, 0xFEED));
    std::vector<int> labels(static_cast<std::size_t>(l));
    for (int i = 0; i < l; ++i) labels[static_cast<std::size_t>(i)] = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(c)));
    t.y = one_hot(labels, c);
    t.inst = ProblemInstance::assemble(t.diff.P, t.basis, t.y);
    return t;
}

} // namespace siis::testing
