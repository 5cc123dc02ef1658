#pragma once

#include <Eigen/Core>
#include <cstdint>

#include "siis/graph.hpp"

namespace siis {

/// The m smallest Laplacian eigenpairs: the smooth eigenbase.
/// eigenvalues are ascending and nonnegative; eigenvector columns are
/// orthonormal and sign-fixed (largest-magnitude entry positive).
struct SpectralBasis {
    Eigen::VectorXd eigenvalues;  // m, ascending
    Eigen::MatrixXd eigenvectors; // n x m

    int size() const { return static_cast<int>(eigenvalues.size()); }
};

struct EigsOptions {
    double residual_tol = 1e-8;    // acceptance residual per eigenpair
    int dense_cutoff = 200;        // use a dense solver at or below this order
    std::uint64_t seed = 0x5115u;  // start-vector seed for the iterative path
    bool force_iterative = false;  // test hook: skip the dense fallback
};

/// Computes the m smallest eigenvalues/eigenvectors of the (sparse, PSD)
/// Laplacian. Dense path below the cutoff; otherwise shift-invert Lanczos
/// with full reorthogonalization and deflated random restarts, deterministic
/// for a fixed seed. Throws EigensolverError with residual diagnostics when
/// the iteration budget is exhausted before m pairs converge.
SpectralBasis smallest_eigenpairs(const SpMat& laplacian_matrix, int m,
                                  const EigsOptions& opts = {});

} // namespace siis
