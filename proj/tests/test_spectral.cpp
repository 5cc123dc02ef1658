#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "siis/spectral.hpp"
#include "test_support.hpp"

using namespace siis;
using namespace siis::testing;

namespace {

void check_basis(const SpMat& l, const SpectralBasis& basis) {
    const Eigen::MatrixXd& u = basis.eigenvectors;
    const Eigen::MatrixXd gram = u.transpose() * u;
    CHECK((gram - Eigen::MatrixXd::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff() <=
          1e-8);
    for (int i = 0; i < basis.size(); ++i) {
        const double lambda = basis.eigenvalues[i];
        CHECK(lambda >= 0.0);
        if (i > 0) CHECK(lambda >= basis.eigenvalues[i - 1]);
        const double resid = (l * u.col(i) - lambda * u.col(i)).norm();
        CHECK(resid <= 1e-6 * std::max(1.0, lambda));
    }
}

int sign_changes(const Eigen::VectorXd& v) {
    const double floor = 1e-8 * v.cwiseAbs().maxCoeff();
    int changes = 0;
    double last = 0.0;
    for (int i = 0; i < v.size(); ++i) {
        if (std::abs(v[i]) <= floor) continue;
        if (last != 0.0 && v[i] * last < 0.0) ++changes;
        last = v[i];
    }
    return changes;
}

} // namespace

TEST_CASE("connected graph: lambda_1 = 0 with the constant eigenvector") {
    const Graph g = chain_graph(12, 0.8);
    const SpMat l = laplacian(g);
    const SpectralBasis basis = smallest_eigenpairs(l, 1);
    CHECK(basis.eigenvalues[0] <= 1e-8);
    const double expected = 1.0 / std::sqrt(12.0);
    // sign convention makes the constant column positive
    for (int i = 0; i < 12; ++i)
        CHECK(basis.eigenvectors(i, 0) == doctest::Approx(expected).epsilon(1e-8));
}

TEST_CASE("10-node path: closed-form spectrum 2 - 2 cos(k pi / 10)") {
    const SpMat l = laplacian(chain_graph(10));
    const SpectralBasis basis = smallest_eigenpairs(l, 10);
    for (int k = 0; k < 10; ++k) {
        const double expected = 2.0 - 2.0 * std::cos(k * 3.141592653589793 / 10.0);
        CHECK(basis.eigenvalues[k] == doctest::Approx(expected).epsilon(1e-10));
    }
    check_basis(l, basis);
}

TEST_CASE("path eigenvectors grow more rugged: sign changes nondecreasing") {
    const SpMat l = laplacian(chain_graph(10));
    const SpectralBasis basis = smallest_eigenpairs(l, 10);
    int last = 0;
    for (int k = 0; k < basis.size(); ++k) {
        const int changes = sign_changes(basis.eigenvectors.col(k));
        CHECK(changes >= last);
        last = changes;
    }
}

TEST_CASE("two components: double zero eigenvalue, span holds both indicators") {
    const Graph g = graph_from_edges(7, {{0, 1, 1.0}, {1, 2, 1.0}, {2, 3, 0.5},
                                         {4, 5, 1.0}, {5, 6, 1.0}});
    const SpMat l = laplacian(g);
    const SpectralBasis basis = smallest_eigenpairs(l, 2);
    CHECK(basis.eigenvalues[0] <= 1e-10);
    CHECK(basis.eigenvalues[1] <= 1e-10);

    const Eigen::MatrixXd& u = basis.eigenvectors;
    for (const std::pair<int, int> range : {std::pair{0, 4}, std::pair{4, 7}}) {
        Eigen::VectorXd indicator = Eigen::VectorXd::Zero(7);
        for (int i = range.first; i < range.second; ++i) indicator[i] = 1.0;
        indicator.normalize();
        const Eigen::VectorXd out_of_span = indicator - u * (u.transpose() * indicator);
        CHECK(out_of_span.norm() <= 1e-6);
    }
}

TEST_CASE("iterative and dense paths agree to 1e-6 on eigenvalues") {
    for (std::uint64_t seed : {4u, 9u}) {
        const Dataset data = random_dataset(60, 3, 2, seed);
        const Graph g = build_knn_graph(data, 4, 1.0);
        const SpMat l = laplacian(g);
        const int m = 8;
        const SpectralBasis dense = smallest_eigenpairs(l, m);
        EigsOptions iterative;
        iterative.force_iterative = true;
        const SpectralBasis iter = smallest_eigenpairs(l, m, iterative);
        for (int k = 0; k < m; ++k)
            CHECK(iter.eigenvalues[k] == doctest::Approx(dense.eigenvalues[k]).epsilon(1e-6));
        check_basis(l, iter);
        check_basis(l, dense);
    }
}

TEST_CASE("iterative path handles eigenvalue multiplicity via restarts") {
    // two identical components force a doubly degenerate zero eigenvalue
    std::vector<Edge> edges;
    for (int block = 0; block < 2; ++block) {
        const int base = 20 * block;
        for (int i = 0; i + 1 < 20; ++i) edges.push_back({base + i, base + i + 1, 1.0});
    }
    const SpMat l = laplacian(graph_from_edges(40, edges));
    EigsOptions opts;
    opts.force_iterative = true;
    const SpectralBasis basis = smallest_eigenpairs(l, 4, opts);
    CHECK(basis.eigenvalues[0] <= 1e-8);
    CHECK(basis.eigenvalues[1] <= 1e-8);
    check_basis(l, basis);
}

TEST_CASE("iterative path is deterministic for a fixed seed") {
    const Dataset data = random_dataset(50, 2, 2, 21);
    const SpMat l = laplacian(build_knn_graph(data, 4, 1.0));
    EigsOptions opts;
    opts.force_iterative = true;
    opts.seed = 777;
    const SpectralBasis a = smallest_eigenpairs(l, 5, opts);
    const SpectralBasis b = smallest_eigenpairs(l, 5, opts);
    CHECK((a.eigenvalues - b.eigenvalues).cwiseAbs().maxCoeff() == 0.0);
    CHECK((a.eigenvectors - b.eigenvectors).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("parameter validation") {
    const SpMat l = laplacian(chain_graph(5));
    CHECK_THROWS_AS(smallest_eigenpairs(l, 0), InvalidParameterError);
    CHECK_THROWS_AS(smallest_eigenpairs(l, 6), InvalidParameterError);
    SpMat rect(3, 5);
    CHECK_THROWS_AS(smallest_eigenpairs(rect, 1), InvalidParameterError);
}
