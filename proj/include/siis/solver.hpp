#pragma once

#include <Eigen/Core>

#include <vector>

#include "siis/graph.hpp"
#include "siis/spectral.hpp"

namespace siis {

/// ADMM parameters. The penalty schedule values are the published defaults;
/// alpha (fidelity weight) and beta (spectral weight) are problem-dependent.
struct SolverConfig {
    double alpha = 1.0;
    double beta = 1.0;
    double mu0 = 1.0;
    double mu_max = 1e10;
    double rho = 1.2;
    double epsilon = 1e-4;
    int max_iter = 100;

    void validate() const;
};

/// One classification problem, assembled once and immutable afterwards.
/// Many solves (e.g. a parameter sweep) may share a single instance.
struct ProblemInstance {
    Eigen::MatrixXd basis;         // U, n x m
    Eigen::VectorXd sigma;         // m smallest Laplacian eigenvalues
    Eigen::MatrixXd edge_diff;     // PU, |E| x m
    Eigen::MatrixXd labeled_rows;  // JU, l x m (top rows of U)
    Eigen::MatrixXd labels;        // Y, l x c one-hot
    Eigen::MatrixXd gram_edges;    // U^T P^T P U, m x m
    Eigen::MatrixXd gram_labels;   // U^T J^T J U, m x m

    int n() const { return static_cast<int>(basis.rows()); }
    int m() const { return static_cast<int>(basis.cols()); }
    int l() const { return static_cast<int>(labels.rows()); }
    int c() const { return static_cast<int>(labels.cols()); }
    int edges() const { return static_cast<int>(edge_diff.rows()); }

    static ProblemInstance assemble(const SpMat& difference_op, const SpectralBasis& spectral,
                                    const Eigen::MatrixXd& one_hot_labels);

    /// Same geometry, different labels (noise levels share one assembly).
    ProblemInstance with_labels(Eigen::MatrixXd new_labels) const;
};

struct TraceEntry {
    int iter = 0;           // 1-based iteration counter
    double rel_change = 0;  // max-abs-entry change of A, relative when possible
    double objective = 0;   // model objective at the new A
    double mu = 0;          // penalty used during this iteration
};

/// ADMM iterates for one solve.
struct SolverState {
    Eigen::MatrixXd A;   // m x c coefficients
    Eigen::MatrixXd Q;   // |E| x c auxiliary (~ PUA)
    Eigen::MatrixXd B;   // l x c auxiliary (~ JUA - Y)
    Eigen::MatrixXd L1;  // |E| x c multiplier
    Eigen::MatrixXd L2;  // l x c multiplier
    double mu = 1.0;
    int iter = 0;
    std::vector<TraceEntry> trace;

    /// Algorithm start point: A = 0, multipliers all-ones, mu = mu0.
    static SolverState initial(const ProblemInstance& inst, const SolverConfig& cfg);
};

struct SoftLabels {
    Eigen::MatrixXd F; // n x c, F = U A
};

struct SolveResult {
    Eigen::MatrixXd A;
    SoftLabels labels;
    std::vector<TraceEntry> trace;
    bool converged = false;
    int iterations = 0;
    // constraint violations |Q - PUA|_F and |B - JUA + Y|_F at termination
    double feasibility_edges = 0.0;
    double feasibility_labels = 0.0;
};

/// Row-wise l2,1 proximal map: rows with norm <= tau vanish, the rest
/// shrink by (norm - tau) / norm.
Eigen::MatrixXd row_shrink(const Eigen::MatrixXd& x, double tau);

Eigen::MatrixXd update_Q(const SolverState& state, const ProblemInstance& inst);
Eigen::MatrixXd update_B(const SolverState& state, const ProblemInstance& inst,
                         const SolverConfig& cfg);
Eigen::MatrixXd update_A(const SolverState& state, const ProblemInstance& inst,
                         const SolverConfig& cfg);

/// One full ADMM sweep: Q, B, A updates in order, then multipliers,
/// then the penalty, then the trace entry.
SolverState step(SolverState state, const ProblemInstance& inst, const SolverConfig& cfg);

/// Runs ADMM until the relative change of A falls to epsilon or max_iter is
/// reached. Non-convergence at max_iter is reported, not thrown.
SolveResult solve(const ProblemInstance& inst, const SolverConfig& cfg);

/// Per-row argmax; ties break toward the smallest class index. 1-based ids.
std::vector<int> classify(const SoftLabels& labels);
std::vector<int> classify(const Eigen::MatrixXd& soft);

/// Model objective |PUA|_{2,1} + alpha |JUA - Y|_{2,1} + beta tr(A^T Sigma A).
double objective(const Eigen::MatrixXd& coeffs, const ProblemInstance& inst,
                 const SolverConfig& cfg);

/// Sum of row-wise Euclidean norms.
double l21_norm(const Eigen::MatrixXd& h);

} // namespace siis
