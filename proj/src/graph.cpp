#include "siis/graph.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace siis {

void Dataset::validate() const {
    const int n = total_count();
    const int l = labeled_count();
    if (n < 1) throw InvalidParameterError("dataset: no examples");
    if (dimension() < 1) throw InvalidParameterError("dataset: feature dimension must be >= 1");
    if (l < 1) throw InvalidParameterError("dataset: at least one labeled example required");
    if (l > n) throw InvalidParameterError("dataset: labeled count exceeds total count");
    if (!features.allFinite())
        throw InvalidParameterError("dataset: features contain NaN or Inf");
    for (int label : given_labels) {
        if (label < 1)
            throw InvalidLabelError("dataset: class ids are 1-based, got " + std::to_string(label));
    }
}

namespace {

// Squared distances from a block of query rows to all points, via the
// expansion |x-y|^2 = |x|^2 + |y|^2 - 2<x,y>. Used for neighbor selection
// only; final edge weights recompute the distance pairwise so that W is
// exactly symmetric.
Eigen::MatrixXd block_sq_distances(const Eigen::MatrixXd& x, int row0, int rows,
                                   const Eigen::VectorXd& sq_norms) {
    Eigen::MatrixXd d2 = -2.0 * (x.middleRows(row0, rows) * x.transpose());
    d2.colwise() += sq_norms.segment(row0, rows);
    d2.rowwise() += sq_norms.transpose();
    return d2.cwiseMax(0.0);
}

} // namespace

Graph build_knn_graph(const Dataset& data, int k, double xi) {
    data.validate();
    const int n = data.total_count();
    if (k < 1) throw InvalidParameterError("build_knn_graph: K must be >= 1");
    if (k >= n)
        throw InvalidParameterError("build_knn_graph: K = " + std::to_string(k) +
                                    " must be < n = " + std::to_string(n));
    if (!(xi > 0.0)) throw InvalidParameterError("build_knn_graph: xi must be positive");

    const Eigen::MatrixXd& x = data.features;
    const Eigen::VectorXd sq_norms = x.rowwise().squaredNorm();

    std::vector<std::pair<int, int>> directed;
    directed.reserve(static_cast<std::size_t>(n) * static_cast<std::size_t>(k));

    const int block = 256;
    std::vector<std::pair<double, int>> cand(static_cast<std::size_t>(n));
    for (int row0 = 0; row0 < n; row0 += block) {
        const int rows = std::min(block, n - row0);
        const Eigen::MatrixXd d2 = block_sq_distances(x, row0, rows, sq_norms);
        for (int r = 0; r < rows; ++r) {
            const int i = row0 + r;
            cand.clear();
            for (int j = 0; j < n; ++j) {
                if (j == i) continue;
                cand.emplace_back(d2(r, j), j);
            }
            // ties break toward the smaller vertex index
            std::partial_sort(cand.begin(), cand.begin() + k, cand.end());
            for (int t = 0; t < k; ++t) {
                const int j = cand[static_cast<std::size_t>(t)].second;
                directed.emplace_back(std::min(i, j), std::max(i, j));
            }
        }
    }

    std::sort(directed.begin(), directed.end());
    directed.erase(std::unique(directed.begin(), directed.end()), directed.end());

    Graph g;
    g.kernel_width = xi;
    g.neighbors = k;
    g.edge_list.reserve(directed.size());
    const double denom = 2.0 * xi * xi;
    for (const auto& [i, j] : directed) {
        const double d2 = (x.row(i) - x.row(j)).squaredNorm();
        g.edge_list.push_back(Edge{i, j, std::exp(-d2 / denom)});
    }

    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(2 * g.edge_list.size());
    g.degrees = Eigen::VectorXd::Zero(n);
    for (const Edge& e : g.edge_list) {
        trips.emplace_back(e.i, e.j, e.weight);
        trips.emplace_back(e.j, e.i, e.weight);
        g.degrees[e.i] += e.weight;
        g.degrees[e.j] += e.weight;
    }
    g.adjacency.resize(n, n);
    g.adjacency.setFromTriplets(trips.begin(), trips.end());
    return g;
}

SpMat laplacian(const Graph& g) {
    const int n = g.order();
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(2 * g.edge_list.size() + static_cast<std::size_t>(n));
    for (const Edge& e : g.edge_list) {
        trips.emplace_back(e.i, e.j, -e.weight);
        trips.emplace_back(e.j, e.i, -e.weight);
    }
    for (int i = 0; i < n; ++i) trips.emplace_back(i, i, g.degrees[i]);
    SpMat l(n, n);
    l.setFromTriplets(trips.begin(), trips.end());
    return l;
}

DifferenceOperator difference_operator(const Graph& g) {
    if (g.edge_list.empty())
        throw DegenerateGraphError("difference_operator: graph has no edges");
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(2 * g.edge_list.size());
    for (int k = 0; k < g.edge_count(); ++k) {
        const Edge& e = g.edge_list[static_cast<std::size_t>(k)];
        trips.emplace_back(k, e.i, e.weight);
        trips.emplace_back(k, e.j, -e.weight);
    }
    DifferenceOperator op;
    op.P.resize(g.edge_count(), g.order());
    op.P.setFromTriplets(trips.begin(), trips.end());
    return op;
}

namespace {

struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(int n) : parent(static_cast<std::size_t>(n)) {
        std::iota(parent.begin(), parent.end(), 0);
    }
    int find(int a) {
        while (parent[static_cast<std::size_t>(a)] != a) {
            parent[static_cast<std::size_t>(a)] =
                parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(a)])];
            a = parent[static_cast<std::size_t>(a)];
        }
        return a;
    }
    void unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a != b) parent[static_cast<std::size_t>(std::max(a, b))] = std::min(a, b);
    }
};

} // namespace

Components connected_components(const Graph& g) {
    const int n = g.order();
    UnionFind uf(n);
    for (const Edge& e : g.edge_list) uf.unite(e.i, e.j);

    Components comps;
    comps.vertex_component.assign(static_cast<std::size_t>(n), -1);
    for (int v = 0; v < n; ++v) {
        const int root = uf.find(v);
        if (comps.vertex_component[static_cast<std::size_t>(root)] < 0)
            comps.vertex_component[static_cast<std::size_t>(root)] = comps.count++;
        comps.vertex_component[static_cast<std::size_t>(v)] =
            comps.vertex_component[static_cast<std::size_t>(root)];
    }
    return comps;
}

LabelIndicator label_indicator(const Dataset& data, int class_count) {
    data.validate();
    if (class_count < 1) throw InvalidParameterError("label_indicator: class count must be >= 1");
    const int n = data.total_count();
    const int l = data.labeled_count();

    LabelIndicator ind;
    ind.Y = Eigen::MatrixXd::Zero(l, class_count);
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(static_cast<std::size_t>(l));
    for (int i = 0; i < l; ++i) {
        const int label = data.given_labels[static_cast<std::size_t>(i)];
        if (label < 1 || label > class_count)
            throw InvalidLabelError("label_indicator: label " + std::to_string(label) +
                                    " outside 1.." + std::to_string(class_count));
        ind.Y(i, label - 1) = 1.0;
        trips.emplace_back(i, i, 1.0);
    }
    ind.J.resize(l, n);
    ind.J.setFromTriplets(trips.begin(), trips.end());
    return ind;
}

} // namespace siis
