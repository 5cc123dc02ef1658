#include "siis/solver.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace siis {

void SolverConfig::validate() const {
    if (!(alpha > 0.0)) throw InvalidParameterError("solver config: alpha must be positive");
    if (!(beta > 0.0)) throw InvalidParameterError("solver config: beta must be positive");
    if (!(mu0 > 0.0)) throw InvalidParameterError("solver config: mu0 must be positive");
    if (!(mu_max >= mu0)) throw InvalidParameterError("solver config: mu_max must be >= mu0");
    if (!(rho > 1.0)) throw InvalidParameterError("solver config: rho must be > 1");
    if (!(epsilon > 0.0)) throw InvalidParameterError("solver config: epsilon must be positive");
    if (max_iter < 1) throw InvalidParameterError("solver config: max_iter must be >= 1");
}

ProblemInstance ProblemInstance::assemble(const SpMat& difference_op,
                                          const SpectralBasis& spectral,
                                          const Eigen::MatrixXd& one_hot_labels) {
    ProblemInstance inst;
    inst.basis = spectral.eigenvectors;
    inst.sigma = spectral.eigenvalues;
    const int l = static_cast<int>(one_hot_labels.rows());
    if (l < 1 || l > inst.n())
        throw InvalidParameterError("instance: label rows must be within 1..n");
    if (difference_op.cols() != inst.n())
        throw InvalidParameterError("instance: difference operator width mismatch");
    inst.edge_diff = difference_op * inst.basis;
    inst.labeled_rows = inst.basis.topRows(l);
    inst.labels = one_hot_labels;
    inst.gram_edges = inst.edge_diff.transpose() * inst.edge_diff;
    inst.gram_labels = inst.labeled_rows.transpose() * inst.labeled_rows;
    return inst;
}

ProblemInstance ProblemInstance::with_labels(Eigen::MatrixXd new_labels) const {
    if (new_labels.rows() != labels.rows())
        throw InvalidParameterError("with_labels: labeled count cannot change");
    ProblemInstance inst = *this;
    inst.labels = std::move(new_labels);
    return inst;
}

SolverState SolverState::initial(const ProblemInstance& inst, const SolverConfig& cfg) {
    SolverState s;
    s.A = Eigen::MatrixXd::Zero(inst.m(), inst.c());
    s.Q = Eigen::MatrixXd::Zero(inst.edges(), inst.c());
    s.B = Eigen::MatrixXd::Zero(inst.l(), inst.c());
    // all-one multipliers, straight from the published algorithm
    s.L1 = Eigen::MatrixXd::Ones(inst.edges(), inst.c());
    s.L2 = Eigen::MatrixXd::Ones(inst.l(), inst.c());
    s.mu = cfg.mu0;
    return s;
}

double l21_norm(const Eigen::MatrixXd& h) { return h.rowwise().norm().sum(); }

Eigen::MatrixXd row_shrink(const Eigen::MatrixXd& x, double tau) {
    if (tau < 0.0) throw InvalidParameterError("row_shrink: tau must be nonnegative");
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(x.rows(), x.cols());
    for (int i = 0; i < x.rows(); ++i) {
        const double norm = x.row(i).norm();
        if (norm > tau) out.row(i) = ((norm - tau) / norm) * x.row(i);
    }
    return out;
}

Eigen::MatrixXd update_Q(const SolverState& state, const ProblemInstance& inst) {
    const Eigen::MatrixXd n_mat = inst.edge_diff * state.A - state.L1 / state.mu;
    return row_shrink(n_mat, 1.0 / state.mu);
}

Eigen::MatrixXd update_B(const SolverState& state, const ProblemInstance& inst,
                         const SolverConfig& cfg) {
    const Eigen::MatrixXd m_mat =
        inst.labeled_rows * state.A - inst.labels - state.L2 / state.mu;
    return row_shrink(m_mat, cfg.alpha / state.mu);
}

Eigen::MatrixXd update_A(const SolverState& state, const ProblemInstance& inst,
                         const SolverConfig& cfg) {
    Eigen::MatrixXd system = state.mu * (inst.gram_edges + inst.gram_labels);
    system.diagonal() += 2.0 * cfg.beta * inst.sigma;

    const Eigen::MatrixXd rhs = inst.edge_diff.transpose() * (state.L1 + state.mu * state.Q) +
                                inst.labeled_rows.transpose() *
                                    (state.L2 + state.mu * (state.B + inst.labels));

    // m is small, so an eigendecomposition doubles as the SPD factorization
    // and supplies the condition estimate the contract requires.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(system);
    if (es.info() != Eigen::Success)
        throw NumericalError("update_A: factorization of the m x m system failed");
    const double lo = es.eigenvalues().minCoeff();
    const double hi = es.eigenvalues().maxCoeff();
    if (!(lo > 0.0) || hi / lo > 1e12) {
        std::ostringstream msg;
        msg << "update_A: system is singular or ill-conditioned (eigenvalue range [" << lo << ", "
            << hi << "], mu = " << state.mu << ")";
        throw NumericalError(msg.str());
    }

    const auto apply_inverse = [&](const Eigen::MatrixXd& b) -> Eigen::MatrixXd {
        return es.eigenvectors() *
               (es.eigenvalues().cwiseInverse().asDiagonal() * (es.eigenvectors().transpose() * b));
    };

    Eigen::MatrixXd a = apply_inverse(rhs);
    const double rhs_norm = rhs.norm();
    for (int refine = 0; refine < 2; ++refine) {
        const Eigen::MatrixXd resid = rhs - system * a;
        if (resid.norm() <= 1e-8 * std::max(rhs_norm, 1e-300)) break;
        a += apply_inverse(resid);
    }
    if ((rhs - system * a).norm() > 1e-8 * std::max(rhs_norm, 1e-300))
        throw NumericalError("update_A: linear solve residual above tolerance");
    return a;
}

SolverState step(SolverState state, const ProblemInstance& inst, const SolverConfig& cfg) {
    state.Q = update_Q(state, inst);
    state.B = update_B(state, inst, cfg);

    const Eigen::MatrixXd previous = state.A;
    state.A = update_A(state, inst, cfg);

    const Eigen::MatrixXd pua = inst.edge_diff * state.A;
    const Eigen::MatrixXd jua = inst.labeled_rows * state.A;
    state.L1 += state.mu * (state.Q - pua);
    state.L2 += state.mu * (state.B - jua + inst.labels);

    TraceEntry entry;
    entry.mu = state.mu;
    state.mu = std::min(cfg.rho * state.mu, cfg.mu_max);
    state.iter += 1;
    entry.iter = state.iter;

    const double denom = previous.cwiseAbs().maxCoeff();
    const double change = (state.A - previous).cwiseAbs().maxCoeff();
    entry.rel_change = denom > 0.0 ? change / denom : change;
    entry.objective = objective(state.A, inst, cfg);
    state.trace.push_back(entry);
    return state;
}

SolveResult solve(const ProblemInstance& inst, const SolverConfig& cfg) {
    cfg.validate();
    SolverState state = SolverState::initial(inst, cfg);
    bool converged = false;
    while (state.iter < cfg.max_iter) {
        state = step(std::move(state), inst, cfg);
        if (state.trace.back().rel_change <= cfg.epsilon) {
            converged = true;
            break;
        }
    }
    SolveResult result;
    result.labels.F = inst.basis * state.A;
    result.feasibility_edges = (state.Q - inst.edge_diff * state.A).norm();
    result.feasibility_labels = (state.B - inst.labeled_rows * state.A + inst.labels).norm();
    result.A = std::move(state.A);
    result.trace = std::move(state.trace);
    result.converged = converged;
    result.iterations = state.iter;
    return result;
}

std::vector<int> classify(const Eigen::MatrixXd& soft) {
    if (!soft.allFinite()) throw NumericalError("classify: soft labels contain NaN or Inf");
    std::vector<int> out(static_cast<std::size_t>(soft.rows()));
    for (int i = 0; i < soft.rows(); ++i) {
        int arg = 0;
        for (int j = 1; j < soft.cols(); ++j)
            if (soft(i, j) > soft(i, arg)) arg = j;
        out[static_cast<std::size_t>(i)] = arg + 1;
    }
    return out;
}

std::vector<int> classify(const SoftLabels& labels) { return classify(labels.F); }

double objective(const Eigen::MatrixXd& coeffs, const ProblemInstance& inst,
                 const SolverConfig& cfg) {
    const double gtf = l21_norm(inst.edge_diff * coeffs);
    const double fidelity = l21_norm(inst.labeled_rows * coeffs - inst.labels);
    const double spectral = (inst.sigma.asDiagonal() * coeffs).cwiseProduct(coeffs).sum();
    return gtf + cfg.alpha * fidelity + cfg.beta * spectral;
}

} // namespace siis
