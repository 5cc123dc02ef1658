#pragma once

#include <map>
#include <string>
#include <vector>

#include "siis/bench.hpp"
#include "siis/graph.hpp"
#include "siis/solver.hpp"
#include "siis/spectral.hpp"

namespace siis::io {

/// Dataset CSV: header line, feature columns, optional final column named
/// "label" (empty cell = unlabeled). Rows are reordered labeled-first on
/// load (stable), matching the Dataset invariant; row_order, when given,
/// receives the original file row index of each loaded row.
Dataset load_dataset_csv(const std::string& path, std::vector<int>* row_order = nullptr);
void save_dataset_csv(const std::string& path, const Dataset& data);

/// Sparse "index:value" text format for high-dimensional data, one example
/// per line: an optional leading integer label followed by 1-based
/// index:value pairs. Lines whose first token contains ':' are unlabeled.
Dataset load_dataset_sparse(const std::string& path, std::vector<int>* row_order = nullptr);

/// Ground-truth sidecar: header "true_label,flipped", one row per example,
/// aligned with the dataset rows.
void save_ground_truth(const std::string& path, const GroundTruth& truth);
GroundTruth load_ground_truth(const std::string& path);

/// Edge list "i j weight", 1-based vertex ids, one line per edge.
void save_edge_list(const std::string& path, const Graph& g);

/// Spectrum CSV of (k, lambda_k), and an optional dense dump of U.
void save_spectrum(const std::string& path, const SpectralBasis& basis);
void save_basis_matrix(const std::string& path, const SpectralBasis& basis);

/// Convergence trace CSV: iter, relative_change, objective, mu.
void save_trace(const std::string& path, const std::vector<TraceEntry>& trace);

/// Predictions CSV: example, label (1-based).
void save_predictions(const std::string& path, const std::vector<int>& predictions);

/// Experiment report: per-run CSV and a JSON summary with mean +/- std.
void save_report_csv(const std::string& path, const ExperimentReport& report);
void save_report_json(const std::string& path, const ExperimentReport& report);

/// key=value configuration file ('#' comments allowed).
std::map<std::string, std::string> load_config(const std::string& path);

/// Writes via a temporary file in the same directory, then renames.
void atomic_write(const std::string& path, const std::string& contents);

std::string format_double(double v);

} // namespace siis::io
