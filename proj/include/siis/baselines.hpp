#pragma once

#include <Eigen/Core>

#include <string>
#include <vector>

#include "siis/solver.hpp"

namespace siis {

/// Output of one ablation method. Accuracy fields are filled by the
/// experiment harness (the methods themselves never see ground truth).
struct BaselineResult {
    Eigen::MatrixXd soft_labels;  // n x c
    std::vector<int> predictions; // 1-based class ids
    std::string method;
    std::vector<TraceEntry> trace; // empty for the direct (non-iterative) solver
    bool converged = true;
    std::string warning; // empty when clean
    double accuracy_labeled = -1.0;
    double accuracy_unlabeled = -1.0;
};

/// Gaussian fields / harmonic functions: labels clamped on the labeled set,
/// harmonic interpolation elsewhere. Throws NumericalError when an
/// unlabeled island makes the interior block singular.
BaselineResult gfhf(const SpMat& laplacian_matrix, const Eigen::MatrixXd& one_hot_labels,
                    const std::vector<int>& labeled_indices);

/// Laplacian smoother with a robust row-sparse fidelity:
/// min tr(F^T L F) + alpha |JF - Y|_{2,1}, labeled set = first l rows.
BaselineResult l2_l1_fidelity(const SpMat& laplacian_matrix, const Eigen::MatrixXd& one_hot_labels,
                              double alpha, const SolverConfig& schedule = {});

/// Trend filtering without the eigenbase restriction:
/// min |PF|_{2,1} + alpha |JF - Y|_{2,1} over the full vertex function F.
BaselineResult gtf_only(const SpMat& difference_op, const Eigen::MatrixXd& one_hot_labels,
                        double alpha, const SolverConfig& schedule = {});

} // namespace siis
