#include "siis/spectral.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "siis/rng.hpp"

namespace siis {

namespace {

// Flip each column so its largest-magnitude entry (first occurrence) is
// positive, for reproducible traces across solver paths.
void fix_signs(Eigen::MatrixXd& u) {
    for (int c = 0; c < u.cols(); ++c) {
        int arg = 0;
        double best = -1.0;
        for (int r = 0; r < u.rows(); ++r) {
            const double a = std::abs(u(r, c));
            if (a > best) {
                best = a;
                arg = r;
            }
        }
        if (u(arg, c) < 0.0) u.col(c) = -u.col(c);
    }
}

// Eigenvalues of a PSD Laplacian may come out as tiny negatives; clamp
// anything above -1e-10 to zero and reject worse.
void clamp_eigenvalues(Eigen::VectorXd& vals) {
    for (int i = 0; i < vals.size(); ++i) {
        if (vals[i] < 0.0) {
            if (vals[i] < -1e-10)
                throw EigensolverError("smallest_eigenpairs: matrix is not PSD, eigenvalue " +
                                       std::to_string(vals[i]));
            vals[i] = 0.0;
        }
    }
}

SpectralBasis dense_path(const SpMat& l, int m) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es{Eigen::MatrixXd(l)};
    if (es.info() != Eigen::Success)
        throw EigensolverError("smallest_eigenpairs: dense eigensolver failed");
    SpectralBasis basis;
    basis.eigenvalues = es.eigenvalues().head(m);
    basis.eigenvectors = es.eigenvectors().leftCols(m);
    clamp_eigenvalues(basis.eigenvalues);
    fix_signs(basis.eigenvectors);
    return basis;
}

struct RitzPair {
    double lambda = 0.0;
    Eigen::VectorXd vector;
    double residual = 0.0;
};

// Shift-invert Lanczos with full reorthogonalization. One Krylov chain per
// restart, started orthogonal to already-converged vectors; each chain
// harvests the extreme Ritz pairs that pass the residual test. Restarting
// with fresh random vectors resolves eigenvalue multiplicities that a
// single Krylov space cannot.
SpectralBasis iterative_path(const SpMat& l, int m, const EigsOptions& opts) {
    const int n = static_cast<int>(l.rows());
    const double shift = 1e-6 * std::max(1.0, Eigen::VectorXd(l.diagonal()).maxCoeff());

    SpMat shifted = l;
    for (int i = 0; i < n; ++i) shifted.coeffRef(i, i) += shift;
    Eigen::SimplicialLLT<SpMat> op(shifted);
    if (op.info() != Eigen::Success)
        throw EigensolverError("smallest_eigenpairs: factorization of shifted Laplacian failed");

    Rng rng(opts.seed);
    Eigen::MatrixXd converged(n, 0);
    Eigen::VectorXd converged_vals(0);

    int budget = std::max(100, 30 * m);
    const int max_restarts = 30;
    double worst_residual = 0.0;

    for (int restart = 0; restart < max_restarts && converged.cols() < m && budget > 0; ++restart) {
        const int missing = m - static_cast<int>(converged.cols());
        const int ncv = std::min(n - static_cast<int>(converged.cols()),
                                 std::max(2 * missing + 20, 40) * (restart + 1));
        if (ncv < 1) break;

        Eigen::VectorXd v(n);
        for (int i = 0; i < n; ++i) v[i] = rng.normal();
        if (converged.cols() > 0) v -= converged * (converged.transpose() * v);
        v.normalize();

        Eigen::MatrixXd basis(n, ncv);
        std::vector<double> alpha, beta;
        int steps = 0;
        basis.col(0) = v;
        for (int j = 0; j < ncv && budget > 0; ++j, --budget) {
            Eigen::VectorXd w = op.solve(basis.col(j));
            steps = j + 1;
            const double a = basis.col(j).dot(w);
            alpha.push_back(a);
            // deflate converged directions and fully reorthogonalize, twice
            for (int pass = 0; pass < 2; ++pass) {
                if (converged.cols() > 0) w -= converged * (converged.transpose() * w);
                w -= basis.leftCols(j + 1) * (basis.leftCols(j + 1).transpose() * w);
            }
            const double b = w.norm();
            if (j + 1 < ncv) {
                if (b < 1e-13) break; // invariant subspace exhausted
                beta.push_back(b);
                basis.col(j + 1) = w / b;
            }
        }
        if (steps == 0) continue;

        Eigen::MatrixXd tri = Eigen::MatrixXd::Zero(steps, steps);
        for (int i = 0; i < steps; ++i) tri(i, i) = alpha[static_cast<std::size_t>(i)];
        for (int i = 0; i + 1 < steps; ++i) {
            tri(i, i + 1) = beta[static_cast<std::size_t>(i)];
            tri(i + 1, i) = beta[static_cast<std::size_t>(i)];
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tes(tri);

        // Largest theta of the inverted operator = smallest lambda of L.
        // Accept a contiguous run from the extreme end so no interior pair
        // is skipped over an unconverged one.
        std::vector<RitzPair> accepted;
        for (int t = steps - 1; t >= 0 && static_cast<int>(accepted.size()) < missing; --t) {
            const double theta = tes.eigenvalues()[t];
            if (theta <= 0.0) break;
            RitzPair pair;
            pair.vector = basis.leftCols(steps) * tes.eigenvectors().col(t);
            if (converged.cols() > 0)
                pair.vector -= converged * (converged.transpose() * pair.vector);
            const double nrm = pair.vector.norm();
            if (nrm < 0.5) break; // collapsed onto the converged set
            pair.vector /= nrm;
            pair.lambda = 1.0 / theta - shift;
            pair.residual = (l * pair.vector - pair.lambda * pair.vector).norm();
            worst_residual = std::max(worst_residual, pair.residual);
            if (pair.residual > opts.residual_tol * std::max(1.0, std::abs(pair.lambda))) break;
            accepted.push_back(std::move(pair));
        }
        for (const RitzPair& pair : accepted) {
            converged.conservativeResize(Eigen::NoChange, converged.cols() + 1);
            converged.col(converged.cols() - 1) = pair.vector;
            converged_vals.conservativeResize(converged_vals.size() + 1);
            converged_vals[converged_vals.size() - 1] = pair.lambda;
        }
    }

    if (converged.cols() < m) {
        std::ostringstream msg;
        msg << "smallest_eigenpairs: " << converged.cols() << "/" << m
            << " eigenpairs converged before the iteration budget ran out "
            << "(worst residual " << worst_residual << ", tol " << opts.residual_tol << ")";
        throw EigensolverError(msg.str());
    }

    std::vector<int> order(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) order[static_cast<std::size_t>(i)] = i;
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return converged_vals[a] < converged_vals[b]; });

    SpectralBasis out;
    out.eigenvalues.resize(m);
    out.eigenvectors.resize(n, m);
    for (int i = 0; i < m; ++i) {
        out.eigenvalues[i] = converged_vals[order[static_cast<std::size_t>(i)]];
        out.eigenvectors.col(i) = converged.col(order[static_cast<std::size_t>(i)]);
    }
    clamp_eigenvalues(out.eigenvalues);
    fix_signs(out.eigenvectors);
    return out;
}

} // namespace

SpectralBasis smallest_eigenpairs(const SpMat& laplacian_matrix, int m, const EigsOptions& opts) {
    const int n = static_cast<int>(laplacian_matrix.rows());
    if (laplacian_matrix.cols() != n)
        throw InvalidParameterError("smallest_eigenpairs: matrix must be square");
    if (m < 1 || m > n)
        throw InvalidParameterError("smallest_eigenpairs: m = " + std::to_string(m) +
                                    " outside 1..n = " + std::to_string(n));
    if (n <= opts.dense_cutoff && !opts.force_iterative) return dense_path(laplacian_matrix, m);
    return iterative_path(laplacian_matrix, m, opts);
}

} // namespace siis
