#include <doctest.h>

#include <Eigen/Dense>

#include "siis/graph.hpp"
#include "test_support.hpp"

using namespace siis;
using namespace siis::testing;

TEST_CASE("knn: two identical points produce a single weight-1 edge") {
    Dataset data;
    data.features.resize(2, 2);
    data.features << 1.0, 2.0, 1.0, 2.0;
    data.given_labels = {1};
    const Graph g = build_knn_graph(data, 1, 0.7);
    REQUIRE(g.edge_count() == 1);
    CHECK(g.edge_list[0].i == 0);
    CHECK(g.edge_list[0].j == 1);
    CHECK(g.edge_list[0].weight == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("knn: three collinear points, K=1, xi=1") {
    Dataset data;
    data.features.resize(3, 1);
    data.features << 0.0, 1.0, 2.0;
    data.given_labels = {1};
    const Graph g = build_knn_graph(data, 1, 1.0);
    // union symmetrization: the middle point is selected by both ends
    REQUIRE(g.edge_count() == 2);
    CHECK(g.edge_list[0].i == 0);
    CHECK(g.edge_list[0].j == 1);
    CHECK(g.edge_list[1].i == 1);
    CHECK(g.edge_list[1].j == 2);
    const double expected = std::exp(-0.5); // exp(-1 / (2*1^2)) = 0.6065...
    CHECK(g.edge_list[0].weight == doctest::Approx(expected).epsilon(1e-15));
    CHECK(g.edge_list[1].weight == doctest::Approx(expected).epsilon(1e-15));
}

TEST_CASE("knn: K >= n rejected, bad xi rejected") {
    Dataset data = random_dataset(5, 2, 1, 42);
    CHECK_THROWS_AS(build_knn_graph(data, 5, 1.0), InvalidParameterError);
    CHECK_THROWS_AS(build_knn_graph(data, 0, 1.0), InvalidParameterError);
    CHECK_THROWS_AS(build_knn_graph(data, 2, 0.0), InvalidParameterError);
    CHECK_THROWS_AS(build_knn_graph(data, 2, -1.0), InvalidParameterError);
}

TEST_CASE("knn: adjacency is exactly symmetric and weights lie in (0, 1]") {
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        const Dataset data = random_dataset(40, 3, 4, seed);
        const Graph g = build_knn_graph(data, 5, 0.8);
        const SpMat diff = SpMat(g.adjacency.transpose()) - g.adjacency;
        CHECK(Eigen::MatrixXd(diff).cwiseAbs().maxCoeff() == 0.0);
        for (const Edge& e : g.edge_list) {
            CHECK(e.weight > 0.0);
            CHECK(e.weight <= 1.0);
            CHECK(e.i < e.j);
        }
        CHECK(Eigen::MatrixXd(g.adjacency).diagonal().cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("knn: edge enumeration is deterministic") {
    const Dataset data = random_dataset(30, 4, 3, 7);
    const Graph a = build_knn_graph(data, 4, 0.5);
    const Graph b = build_knn_graph(data, 4, 0.5);
    REQUIRE(a.edge_count() == b.edge_count());
    for (int k = 0; k < a.edge_count(); ++k) {
        CHECK(a.edge_list[k].i == b.edge_list[k].i);
        CHECK(a.edge_list[k].j == b.edge_list[k].j);
        CHECK(a.edge_list[k].weight == b.edge_list[k].weight);
    }
}

TEST_CASE("laplacian: single unit edge gives [[1,-1],[-1,1]]") {
    const Graph g = graph_from_edges(2, {{0, 1, 1.0}});
    const Eigen::MatrixXd l = Eigen::MatrixXd(laplacian(g));
    Eigen::MatrixXd expected(2, 2);
    expected << 1, -1, -1, 1;
    CHECK((l - expected).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("laplacian: rows sum to zero and L is PSD") {
    const Dataset data = random_dataset(8, 2, 1, 99);
    const Graph g = build_knn_graph(data, 3, 1.0);
    const SpMat l = laplacian(g);
    const Eigen::VectorXd row_sums = l * Eigen::VectorXd::Ones(8);
    CHECK(row_sums.cwiseAbs().maxCoeff() <= 1e-12);
    // dense eigensolver oracle
    const Eigen::VectorXd evals =
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(Eigen::MatrixXd(l)).eigenvalues();
    CHECK(evals.minCoeff() >= -1e-10);
}

TEST_CASE("difference operator: single-edge row layout") {
    const double w = 0.37;
    const Graph g = graph_from_edges(3, {{0, 1, w}});
    const DifferenceOperator op = difference_operator(g);
    REQUIRE(op.P.rows() == 1);
    REQUIRE(op.P.cols() == 3);
    const Eigen::MatrixXd p(op.P);
    CHECK(p(0, 0) == w);
    CHECK(p(0, 1) == -w);
    CHECK(p(0, 2) == 0.0);
}

TEST_CASE("difference operator: annihilates constants, PtP matches reweighted Laplacian") {
    const Dataset data = random_dataset(20, 3, 2, 5);
    const Graph g = build_knn_graph(data, 4, 0.9);
    const DifferenceOperator op = difference_operator(g);
    CHECK((op.P * Eigen::VectorXd::Ones(20)).cwiseAbs().maxCoeff() <= 1e-14);

    // P^T P equals the Laplacian of the graph reweighted by W_ij^2
    std::vector<Edge> squared = g.edge_list;
    for (Edge& e : squared) e.weight *= e.weight;
    const SpMat expected = laplacian(graph_from_edges(20, squared));
    const Eigen::MatrixXd actual = Eigen::MatrixXd(SpMat(op.P.transpose()) * op.P);
    CHECK((actual - Eigen::MatrixXd(expected)).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("difference operator: empty edge set is degenerate") {
    const Graph g = graph_from_edges(4, {});
    CHECK_THROWS_AS(difference_operator(g), DegenerateGraphError);
}

TEST_CASE("difference operator: connected 10-chain has rank 9") {
    const Graph g = chain_graph(10);
    const DifferenceOperator op = difference_operator(g);
    CHECK(dense_rank(Eigen::MatrixXd(op.P)) == 9);
}

TEST_CASE("connected components: chain, disjoint edges, isolated vertices") {
    CHECK(connected_components(chain_graph(6)).count == 1);

    const Graph two = graph_from_edges(4, {{0, 1, 1.0}, {2, 3, 1.0}});
    const Components comps = connected_components(two);
    CHECK(comps.count == 2);
    CHECK(comps.vertex_component[0] == comps.vertex_component[1]);
    CHECK(comps.vertex_component[2] == comps.vertex_component[3]);
    CHECK(comps.vertex_component[0] != comps.vertex_component[2]);

    CHECK(connected_components(graph_from_edges(5, {})).count == 5);
}

TEST_CASE("label indicator: one-hot layout and selector behavior") {
    Dataset data = random_dataset(5, 2, 2, 11);
    data.given_labels = {1, 3};
    const LabelIndicator ind = label_indicator(data, 3);
    Eigen::MatrixXd expected(2, 3);
    expected << 1, 0, 0, 0, 0, 1;
    CHECK((ind.Y - expected).cwiseAbs().maxCoeff() == 0.0);
    CHECK(ind.Y.rowwise().sum().isApproxToConstant(1.0));

    Eigen::VectorXd v(5);
    v << 10, 20, 30, 40, 50;
    const Eigen::VectorXd selected = ind.J * v;
    REQUIRE(selected.size() == 2);
    CHECK(selected[0] == 10);
    CHECK(selected[1] == 20);
    CHECK(dense_rank(Eigen::MatrixXd(ind.J)) == 2);
}

TEST_CASE("label indicator: out-of-range label rejected") {
    Dataset data = random_dataset(4, 2, 2, 3);
    data.given_labels = {1, 4};
    CHECK_THROWS_AS(label_indicator(data, 3), InvalidLabelError);
    data.given_labels = {1, 0};
    CHECK_THROWS_AS(label_indicator(data, 3), InvalidLabelError);
}

TEST_CASE("property: rank(P) = n - #components on random graphs") {
    for (std::uint64_t seed = 1; seed <= 8; ++seed) {
        Rng rng(seed);
        const int n = 6 + static_cast<int>(rng.below(24)); // n <= 30
        std::vector<Edge> edges;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j)
                if (rng.uniform() < 0.12) edges.push_back({i, j, 0.1 + rng.uniform()});
        const Graph g = graph_from_edges(n, edges);
        if (g.edge_count() == 0) continue;
        const DifferenceOperator op = difference_operator(g);
        const int components = connected_components(g).count;
        CHECK(dense_rank(Eigen::MatrixXd(op.P)) == n - components);
    }
}

TEST_CASE("property: [P; J] has full column rank on connected graphs") {
    for (std::uint64_t seed = 1; seed <= 6; ++seed) {
        Rng rng(seed);
        const int n = 5 + static_cast<int>(rng.below(25));
        const int l = 1 + static_cast<int>(rng.below(3));
        Dataset data = random_dataset(n, 2, l, seed * 31);
        for (int& label : data.given_labels) label = 1; // keep labels in range
        const Graph g = build_knn_graph(data, 3, 1.0);
        if (connected_components(g).count != 1) continue;
        const DifferenceOperator op = difference_operator(g);
        Eigen::MatrixXd stack(op.P.rows() + l, n);
        stack.topRows(op.P.rows()) = Eigen::MatrixXd(op.P);
        stack.bottomRows(l) = Eigen::MatrixXd(label_indicator(data, 2).J);
        CHECK(dense_rank(stack) == n);
    }
}

TEST_CASE("dataset validation") {
    Dataset data = random_dataset(4, 2, 2, 17);
    CHECK_NOTHROW(data.validate());
    data.features(1, 1) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(data.validate(), InvalidParameterError);

    Dataset empty_labels = random_dataset(4, 2, 2, 17);
    empty_labels.given_labels.clear();
    CHECK_THROWS_AS(empty_labels.validate(), InvalidParameterError);

    Dataset too_many = random_dataset(4, 2, 2, 17);
    too_many.given_labels = {1, 1, 1, 1, 1};
    CHECK_THROWS_AS(too_many.validate(), InvalidParameterError);
}
