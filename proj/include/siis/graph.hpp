#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <vector>

#include "siis/errors.hpp"

namespace siis {

using SpMat = Eigen::SparseMatrix<double>;

/// Feature matrix plus the partially observed labels.
///
/// Labeled examples occupy the first labeled_count() rows; class ids are
/// 1-based (values in 1..c). Everything downstream relies on that ordering.
struct Dataset {
    Eigen::MatrixXd features;      // n x d
    std::vector<int> given_labels; // length l

    int total_count() const { return static_cast<int>(features.rows()); }
    int labeled_count() const { return static_cast<int>(given_labels.size()); }
    int dimension() const { return static_cast<int>(features.cols()); }

    /// Throws InvalidParameterError on shape/label/finite violations.
    void validate() const;
};

struct Edge {
    int i = 0; // smaller endpoint
    int j = 0; // larger endpoint
    double weight = 0.0;
};

/// KNN similarity graph. The adjacency is exactly symmetric by construction
/// (each undirected edge weight is computed once), and edge_list is sorted
/// lexicographically by (i, j) so every derived operator sees the same
/// deterministic edge order.
struct Graph {
    SpMat adjacency;             // W, n x n
    std::vector<Edge> edge_list; // i < j
    Eigen::VectorXd degrees;     // D_ii = sum_j W_ij
    double kernel_width = 0.0;   // Gaussian xi
    int neighbors = 0;           // K

    int order() const { return static_cast<int>(adjacency.rows()); }
    int edge_count() const { return static_cast<int>(edge_list.size()); }
};

/// Edge-by-vertex difference operator: row k carries +w at the smaller
/// endpoint of edge k and -w at the larger endpoint, matching edge_list.
struct DifferenceOperator {
    SpMat P; // |E| x n
};

/// Selector of the labeled block plus the one-hot label matrix.
struct LabelIndicator {
    SpMat J;          // l x n, J_ii = 1 for i < l
    Eigen::MatrixXd Y; // l x c, one-hot rows
};

struct Components {
    int count = 0;
    std::vector<int> vertex_component; // per-vertex component id, 0-based
};

/// Builds the KNN graph with Gaussian edge weights exp(-d^2 / (2 xi^2)).
/// An edge (i, j) exists iff i is among j's k nearest Euclidean neighbors
/// or vice versa (union symmetrization). Distance ties break toward the
/// smaller vertex index.
Graph build_knn_graph(const Dataset& data, int k, double xi);

/// L = D - W, symmetric, rows sum to zero.
SpMat laplacian(const Graph& g);

/// Throws DegenerateGraphError when the graph has no edges.
DifferenceOperator difference_operator(const Graph& g);

Components connected_components(const Graph& g);

/// Builds J (first-l selector) and one-hot Y from the dataset's labels.
/// Throws InvalidLabelError if any given label exceeds class_count.
LabelIndicator label_indicator(const Dataset& data, int class_count);

} // namespace siis
