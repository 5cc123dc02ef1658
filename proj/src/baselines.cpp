#include "siis/baselines.hpp"

#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace siis {

namespace {

double rel_change_inf(const Eigen::MatrixXd& now, const Eigen::MatrixXd& before) {
    const double denom = before.cwiseAbs().maxCoeff();
    const double change = (now - before).cwiseAbs().maxCoeff();
    return denom > 0.0 ? change / denom : change;
}

void check_solve_residual(const SpMat& system, const Eigen::MatrixXd& x,
                          const Eigen::MatrixXd& rhs, const char* who) {
    const double resid = (system * x - rhs).norm();
    if (!x.allFinite() || resid > 1e-6 * std::max(1.0, rhs.norm()))
        throw NumericalError(std::string(who) + ": linear system is singular or badly conditioned");
}

// Components of the vertex set under the edge pattern of P; used to flag
// underdetermined systems before factorizing. P is |E| x n with two
// endpoints per edge row.
bool has_unlabeled_component(const SpMat& p, int n, int l) {
    std::vector<int> parent(static_cast<std::size_t>(n));
    std::iota(parent.begin(), parent.end(), 0);
    const auto find = [&](int a) {
        while (parent[static_cast<std::size_t>(a)] != a) {
            parent[static_cast<std::size_t>(a)] =
                parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(a)])];
            a = parent[static_cast<std::size_t>(a)];
        }
        return a;
    };
    std::vector<std::pair<int, int>> endpoint(static_cast<std::size_t>(p.rows()), {-1, -1});
    for (int col = 0; col < p.outerSize(); ++col) {
        for (SpMat::InnerIterator it(p, col); it; ++it) {
            auto& e = endpoint[static_cast<std::size_t>(it.row())];
            (e.first < 0 ? e.first : e.second) = static_cast<int>(it.col());
        }
    }
    for (const auto& [a, b] : endpoint) {
        if (a < 0 || b < 0) continue;
        const int ra = find(a);
        const int rb = find(b);
        if (ra != rb) parent[static_cast<std::size_t>(std::max(ra, rb))] = std::min(ra, rb);
    }
    std::vector<bool> labeled_root(static_cast<std::size_t>(n), false);
    for (int i = 0; i < l; ++i) labeled_root[static_cast<std::size_t>(find(i))] = true;
    for (int v = 0; v < n; ++v)
        if (!labeled_root[static_cast<std::size_t>(find(v))]) return true;
    return false;
}

} // namespace

BaselineResult gfhf(const SpMat& laplacian_matrix, const Eigen::MatrixXd& one_hot_labels,
                    const std::vector<int>& labeled_indices) {
    const int n = static_cast<int>(laplacian_matrix.rows());
    const int l = static_cast<int>(labeled_indices.size());
    const int c = static_cast<int>(one_hot_labels.cols());
    if (l != static_cast<int>(one_hot_labels.rows()))
        throw InvalidParameterError("gfhf: labeled index count must match label rows");

    std::vector<int> position(static_cast<std::size_t>(n), -1); // -1 labeled, else unlabeled slot
    std::vector<int> labeled_slot(static_cast<std::size_t>(n), -1);
    for (int i = 0; i < l; ++i) {
        const int v = labeled_indices[static_cast<std::size_t>(i)];
        if (v < 0 || v >= n) throw InvalidParameterError("gfhf: labeled index out of range");
        labeled_slot[static_cast<std::size_t>(v)] = i;
    }
    int u = 0;
    for (int v = 0; v < n; ++v)
        if (labeled_slot[static_cast<std::size_t>(v)] < 0) position[static_cast<std::size_t>(v)] = u++;

    BaselineResult result;
    result.method = "gfhf";
    result.soft_labels = Eigen::MatrixXd::Zero(n, c);
    for (int v = 0; v < n; ++v) {
        const int slot = labeled_slot[static_cast<std::size_t>(v)];
        if (slot >= 0) result.soft_labels.row(v) = one_hot_labels.row(slot);
    }

    if (u > 0) {
        std::vector<Eigen::Triplet<double>> trips;
        Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(u, c);
        for (int col = 0; col < laplacian_matrix.outerSize(); ++col) {
            for (SpMat::InnerIterator it(laplacian_matrix, col); it; ++it) {
                const int r = static_cast<int>(it.row());
                const int cc = static_cast<int>(it.col());
                const int ru = position[static_cast<std::size_t>(r)];
                if (ru < 0) continue;
                const int cu = position[static_cast<std::size_t>(cc)];
                if (cu >= 0) {
                    trips.emplace_back(ru, cu, it.value());
                } else {
                    // L_UL block moves to the right-hand side: rhs = -L_UL Y
                    rhs.row(ru) -=
                        it.value() * one_hot_labels.row(labeled_slot[static_cast<std::size_t>(cc)]);
                }
            }
        }
        SpMat interior(u, u);
        interior.setFromTriplets(trips.begin(), trips.end());
        Eigen::SimplicialLDLT<SpMat> ldlt(interior);
        if (ldlt.info() != Eigen::Success)
            throw NumericalError("gfhf: unlabeled Laplacian block could not be factorized");
        const Eigen::MatrixXd fu = ldlt.solve(rhs);
        check_solve_residual(interior, fu, rhs, "gfhf (disconnected unlabeled island?)");
        for (int v = 0; v < n; ++v) {
            const int slot = position[static_cast<std::size_t>(v)];
            if (slot >= 0) result.soft_labels.row(v) = fu.row(slot);
        }
    }

    result.predictions = classify(result.soft_labels);
    return result;
}

BaselineResult l2_l1_fidelity(const SpMat& laplacian_matrix, const Eigen::MatrixXd& one_hot_labels,
                              double alpha, const SolverConfig& schedule) {
    if (!(alpha > 0.0)) throw InvalidParameterError("l2_l1_fidelity: alpha must be positive");
    const int n = static_cast<int>(laplacian_matrix.rows());
    const int l = static_cast<int>(one_hot_labels.rows());
    const int c = static_cast<int>(one_hot_labels.cols());
    if (l < 1 || l > n) throw InvalidParameterError("l2_l1_fidelity: bad labeled count");

    BaselineResult result;
    result.method = "l2l1";

    Eigen::MatrixXd f = Eigen::MatrixXd::Zero(n, c);
    Eigen::MatrixXd b = Eigen::MatrixXd::Zero(l, c);
    Eigen::MatrixXd lambda = Eigen::MatrixXd::Ones(l, c);
    double mu = schedule.mu0;

    // J^T J is the first-l diagonal; the system 2L + mu J^T J changes with
    // mu, so it is refactorized whenever mu does (every iteration).
    SpMat base = 2.0 * laplacian_matrix;
    Eigen::SimplicialLDLT<SpMat> ldlt;
    result.converged = false;
    for (int it = 0; it < schedule.max_iter; ++it) {
        const Eigen::MatrixXd m_mat = f.topRows(l) - one_hot_labels - lambda / mu;
        b = row_shrink(m_mat, alpha / mu);

        SpMat system = base;
        for (int i = 0; i < l; ++i) system.coeffRef(i, i) += mu;
        ldlt.compute(system);
        if (ldlt.info() != Eigen::Success)
            throw NumericalError("l2_l1_fidelity: system factorization failed");
        Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(n, c);
        rhs.topRows(l) = lambda + mu * (b + one_hot_labels);
        const Eigen::MatrixXd previous = std::move(f);
        f = ldlt.solve(rhs);
        check_solve_residual(system, f, rhs, "l2_l1_fidelity");

        lambda += mu * (b - f.topRows(l) + one_hot_labels);

        TraceEntry entry;
        entry.iter = it + 1;
        entry.mu = mu;
        entry.rel_change = rel_change_inf(f, previous);
        entry.objective = (laplacian_matrix * f).cwiseProduct(f).sum() +
                          alpha * l21_norm(f.topRows(l) - one_hot_labels);
        result.trace.push_back(entry);
        mu = std::min(schedule.rho * mu, schedule.mu_max);
        if (entry.rel_change <= schedule.epsilon) {
            result.converged = true;
            break;
        }
    }

    result.soft_labels = std::move(f);
    result.predictions = classify(result.soft_labels);
    return result;
}

BaselineResult gtf_only(const SpMat& difference_op, const Eigen::MatrixXd& one_hot_labels,
                        double alpha, const SolverConfig& schedule) {
    if (!(alpha > 0.0)) throw InvalidParameterError("gtf_only: alpha must be positive");
    const int n = static_cast<int>(difference_op.cols());
    const int edges = static_cast<int>(difference_op.rows());
    const int l = static_cast<int>(one_hot_labels.rows());
    const int c = static_cast<int>(one_hot_labels.cols());
    if (l < 1 || l > n) throw InvalidParameterError("gtf_only: bad labeled count");

    BaselineResult result;
    result.method = "gtf";
    if (has_unlabeled_component(difference_op, n, l))
        result.warning = "gtf_only: graph component without a labeled vertex, solution underdetermined";

    // P^T P + J^T J is mu-independent: factorize once per solve.
    SpMat system = SpMat(difference_op.transpose()) * difference_op;
    for (int i = 0; i < l; ++i) system.coeffRef(i, i) += 1.0;
    Eigen::SimplicialLDLT<SpMat> ldlt(system);
    if (ldlt.info() != Eigen::Success)
        throw NumericalError("gtf_only: system factorization failed");

    Eigen::MatrixXd f = Eigen::MatrixXd::Zero(n, c);
    Eigen::MatrixXd q = Eigen::MatrixXd::Zero(edges, c);
    Eigen::MatrixXd b = Eigen::MatrixXd::Zero(l, c);
    Eigen::MatrixXd lambda1 = Eigen::MatrixXd::Ones(edges, c);
    Eigen::MatrixXd lambda2 = Eigen::MatrixXd::Ones(l, c);
    double mu = schedule.mu0;

    result.converged = false;
    for (int it = 0; it < schedule.max_iter; ++it) {
        q = row_shrink(difference_op * f - lambda1 / mu, 1.0 / mu);
        b = row_shrink(f.topRows(l) - one_hot_labels - lambda2 / mu, alpha / mu);

        Eigen::MatrixXd rhs = difference_op.transpose() * (lambda1 / mu + q);
        rhs.topRows(l) += lambda2 / mu + b + one_hot_labels;
        const Eigen::MatrixXd previous = std::move(f);
        f = ldlt.solve(rhs);
        check_solve_residual(system, f, rhs, "gtf_only");

        lambda1 += mu * (q - difference_op * f);
        lambda2 += mu * (b - f.topRows(l) + one_hot_labels);

        TraceEntry entry;
        entry.iter = it + 1;
        entry.mu = mu;
        entry.rel_change = rel_change_inf(f, previous);
        entry.objective =
            l21_norm(difference_op * f) + alpha * l21_norm(f.topRows(l) - one_hot_labels);
        result.trace.push_back(entry);
        mu = std::min(schedule.rho * mu, schedule.mu_max);
        if (entry.rel_change <= schedule.epsilon) {
            result.converged = true;
            break;
        }
    }

    result.soft_labels = std::move(f);
    result.predictions = classify(result.soft_labels);
    return result;
}

} // namespace siis
