#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <string>
#include <vector>

#include "siis/baselines.hpp"
#include "siis/graph.hpp"
#include "siis/solver.hpp"

namespace siis {

struct NoiseSpec {
    double rate = 0.0; // fraction of labeled examples to corrupt, in [0, 1)
    std::uint64_t seed = 0;
};

struct GroundTruth {
    std::vector<int> true_labels; // length n, 1-based
    std::vector<int> flipped;     // example indices whose given label was corrupted
};

struct SyntheticDataset {
    Dataset data;
    GroundTruth truth;
    int classes = 2;
};

struct MoonParams {
    int n = 640;
    double noise_std = 0.15;
    int labeled_per_class = 3;
    int flipped_per_class = 1;
    // two-half-circle geometry, exposed so figures can be matched; the
    // default scale keeps the moons separated at the default noise_std
    double radius = 1.5;
    double x_offset = 1.5;
    double y_offset = 0.75;
};

/// Two interleaved half-moons, n/2 points each, Gaussian coordinate noise.
/// Labeled examples are moved to the front; flipped_per_class of each
/// class's labeled examples get a wrong given label.
SyntheticDataset make_double_moon(const MoonParams& params, std::uint64_t seed);

struct BlobParams {
    int n = 500;
    int classes = 4;
    int dim = 2;
    double center_radius = 4.0;
    double cluster_std = 0.5;
    int labeled_per_class = 5;
};

/// Isotropic Gaussian blobs with centers on a circle. No label flips.
SyntheticDataset make_blobs(const BlobParams& params, std::uint64_t seed);

struct NoiseResult {
    Eigen::MatrixXd labels;   // one-hot, same shape as input
    std::vector<int> flipped; // row indices, ascending
};

/// Corrupts exactly floor(rate * l) uniformly chosen rows of a one-hot label
/// matrix, switching each to a uniformly random different class.
NoiseResult inject_label_noise(const Eigen::MatrixXd& one_hot, double rate, int class_count,
                               std::uint64_t seed);

struct EvalEntry {
    double accuracy_labeled = 0.0;
    double accuracy_unlabeled = 0.0;
    double correction_rate = 0.0; // 0 by convention when nothing was flipped
};

/// Accuracies against the TRUE labels, split at labeled_count, plus the
/// fraction of flipped examples whose prediction recovered the truth.
EvalEntry evaluate(const std::vector<int>& predictions, const std::vector<int>& true_labels,
                   int labeled_count, const std::vector<int>& flipped);

struct OracleResult {
    Eigen::MatrixXd coeffs;
    double objective = 0.0;
    bool converged = false;
};

/// Independent verification oracle for the convex model: plain subgradient
/// descent with step c0/sqrt(t), best-iterate tracking, and random restarts
/// that also vary c0 over a log grid. Intended for tiny instances; shares no
/// code path with the ADMM solver. `budget` is the total iteration count
/// split across restarts.
OracleResult oracle_solve(const ProblemInstance& inst, double alpha, double beta,
                          long budget = 1000000, int restarts = 5,
                          std::uint64_t seed = 0x0bacce5eULL);

struct RunRecord {
    std::string method;
    double noise_rate = 0.0;
    int run = 0;
    double accuracy_labeled = 0.0;
    double accuracy_unlabeled = 0.0;
    double correction_rate = 0.0;
    int iterations = 0;
    double seconds = 0.0;
    std::uint64_t seed = 0; // noise seed of the repetition
};

struct MethodSummary {
    std::string method;
    double noise_rate = 0.0;
    double mean_accuracy_labeled = 0.0, std_accuracy_labeled = 0.0;
    double mean_accuracy_unlabeled = 0.0, std_accuracy_unlabeled = 0.0;
    double mean_correction_rate = 0.0, std_correction_rate = 0.0;
};

struct ExperimentReport {
    std::vector<RunRecord> runs;          // method-major, then level, then run
    std::vector<MethodSummary> summaries; // one per (method, level)
    std::vector<std::vector<TraceEntry>> traces; // parallel to runs when kept
    double wall_clock_seconds = 0.0;
    std::uint64_t seed = 0;
};

struct ExperimentConfig {
    std::vector<std::string> methods{"siis", "gfhf", "l2l1", "gtf"};
    std::vector<double> noise_levels{0.0, 0.2, 0.4, 0.6};
    int repetitions = 10;
    std::uint64_t seed = 1;
    int k = 10;
    double xi = 1.0;
    int m = 30;
    SolverConfig solver{};
    int threads = 1;
    bool keep_traces = false;
};

/// The multi-run protocol: one shared graph/eigenbase per dataset, a
/// cross-product of methods x noise levels x repetitions, and per-repetition
/// noise seeds shared across methods so comparisons are paired.
ExperimentReport run_experiment(const SyntheticDataset& dataset, const ExperimentConfig& config);

} // namespace siis
