#include "siis/io.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace siis::io {

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, sep)) out.push_back(field);
    if (!line.empty() && line.back() == sep) out.emplace_back();
    return out;
}

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

double parse_double(const std::string& s, const std::string& context) {
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw IoError("could not parse number '" + s + "' in " + context);
    }
}

int parse_int(const std::string& s, const std::string& context) {
    try {
        std::size_t used = 0;
        const int v = std::stoi(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw IoError("could not parse integer '" + s + "' in " + context);
    }
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "' for reading");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Stable labeled-first reordering shared by the two loaders.
Dataset arrange(const Eigen::MatrixXd& rows, const std::vector<int>& labels_or_zero,
                std::vector<int>* row_order) {
    const int n = static_cast<int>(rows.rows());
    std::vector<int> order;
    order.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        if (labels_or_zero[static_cast<std::size_t>(i)] > 0) order.push_back(i);
    const int l = static_cast<int>(order.size());
    for (int i = 0; i < n; ++i)
        if (labels_or_zero[static_cast<std::size_t>(i)] <= 0) order.push_back(i);

    Dataset data;
    data.features.resize(n, rows.cols());
    data.given_labels.reserve(static_cast<std::size_t>(l));
    for (int pos = 0; pos < n; ++pos) {
        const int src = order[static_cast<std::size_t>(pos)];
        data.features.row(pos) = rows.row(src);
        if (pos < l) data.given_labels.push_back(labels_or_zero[static_cast<std::size_t>(src)]);
    }
    if (row_order) *row_order = std::move(order);
    return data;
}

} // namespace

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void atomic_write(const std::string& path, const std::string& contents) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    if (target.has_parent_path()) {
        std::error_code ec;
        fs::create_directories(target.parent_path(), ec);
    }
    const fs::path tmp = target.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open '" + tmp.string() + "' for writing");
        out << contents;
        if (!out) throw IoError("short write to '" + tmp.string() + "'");
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) throw IoError("cannot rename '" + tmp.string() + "' to '" + path + "'");
}

Dataset load_dataset_csv(const std::string& path, std::vector<int>* row_order) {
    std::istringstream in(read_file(path));
    std::string line;
    if (!std::getline(in, line)) throw IoError("dataset '" + path + "' is empty");
    const std::vector<std::string> header = split(trim(line), ',');
    if (header.empty()) throw IoError("dataset '" + path + "' has an empty header");
    const bool has_label = trim(header.back()) == "label";
    const int d = static_cast<int>(header.size()) - (has_label ? 1 : 0);
    if (d < 1) throw IoError("dataset '" + path + "' has no feature columns");

    std::vector<std::vector<double>> rows;
    std::vector<int> labels;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty()) continue;
        const std::vector<std::string> fields = split(t, ',');
        if (static_cast<int>(fields.size()) != static_cast<int>(header.size()))
            throw IoError("dataset '" + path + "' line " + std::to_string(lineno) +
                          ": expected " + std::to_string(header.size()) + " fields");
        std::vector<double> row(static_cast<std::size_t>(d));
        for (int j = 0; j < d; ++j)
            row[static_cast<std::size_t>(j)] =
                parse_double(trim(fields[static_cast<std::size_t>(j)]),
                             path + " line " + std::to_string(lineno));
        rows.push_back(std::move(row));
        if (has_label) {
            const std::string cell = trim(fields.back());
            labels.push_back(cell.empty() ? 0 : parse_int(cell, path + " line " + std::to_string(lineno)));
        } else {
            labels.push_back(0);
        }
    }
    if (rows.empty()) throw IoError("dataset '" + path + "' has no data rows");

    Eigen::MatrixXd features(static_cast<int>(rows.size()), d);
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (int j = 0; j < d; ++j) features(static_cast<int>(i), j) = rows[i][static_cast<std::size_t>(j)];
    return arrange(features, labels, row_order);
}

void save_dataset_csv(const std::string& path, const Dataset& data) {
    std::ostringstream out;
    for (int j = 0; j < data.dimension(); ++j) out << "x" << j << ",";
    out << "label\n";
    for (int i = 0; i < data.total_count(); ++i) {
        for (int j = 0; j < data.dimension(); ++j) out << format_double(data.features(i, j)) << ",";
        if (i < data.labeled_count()) out << data.given_labels[static_cast<std::size_t>(i)];
        out << "\n";
    }
    atomic_write(path, out.str());
}

Dataset load_dataset_sparse(const std::string& path, std::vector<int>* row_order) {
    std::istringstream in(read_file(path));
    std::string line;
    std::vector<std::map<int, double>> rows;
    std::vector<int> labels;
    int max_index = 0;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        std::istringstream ls(t);
        std::string token;
        std::map<int, double> row;
        int label = 0;
        bool first = true;
        while (ls >> token) {
            const auto colon = token.find(':');
            if (colon == std::string::npos) {
                if (!first)
                    throw IoError("sparse dataset '" + path + "' line " + std::to_string(lineno) +
                                  ": stray token '" + token + "'");
                label = parse_int(token, path + " line " + std::to_string(lineno));
            } else {
                const int idx = parse_int(token.substr(0, colon),
                                          path + " line " + std::to_string(lineno));
                if (idx < 1)
                    throw IoError("sparse dataset '" + path + "': indices are 1-based");
                row[idx] = parse_double(token.substr(colon + 1),
                                        path + " line " + std::to_string(lineno));
                max_index = std::max(max_index, idx);
            }
            first = false;
        }
        rows.push_back(std::move(row));
        labels.push_back(label);
    }
    if (rows.empty()) throw IoError("sparse dataset '" + path + "' has no rows");
    if (max_index == 0) throw IoError("sparse dataset '" + path + "' has no features");

    Eigen::MatrixXd features = Eigen::MatrixXd::Zero(static_cast<int>(rows.size()), max_index);
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (const auto& [idx, val] : rows[i]) features(static_cast<int>(i), idx - 1) = val;
    return arrange(features, labels, row_order);
}

void save_ground_truth(const std::string& path, const GroundTruth& truth) {
    std::vector<char> flipped(truth.true_labels.size(), 0);
    for (int idx : truth.flipped) flipped.at(static_cast<std::size_t>(idx)) = 1;
    std::ostringstream out;
    out << "true_label,flipped\n";
    for (std::size_t i = 0; i < truth.true_labels.size(); ++i)
        out << truth.true_labels[i] << "," << static_cast<int>(flipped[i]) << "\n";
    atomic_write(path, out.str());
}

GroundTruth load_ground_truth(const std::string& path) {
    std::istringstream in(read_file(path));
    std::string line;
    if (!std::getline(in, line) || trim(line) != "true_label,flipped")
        throw IoError("ground truth '" + path + "': bad header");
    GroundTruth truth;
    int row = 0;
    while (std::getline(in, line)) {
        const std::string t = trim(line);
        if (t.empty()) continue;
        const auto fields = split(t, ',');
        if (fields.size() != 2) throw IoError("ground truth '" + path + "': bad row");
        truth.true_labels.push_back(parse_int(trim(fields[0]), path));
        if (parse_int(trim(fields[1]), path) != 0) truth.flipped.push_back(row);
        ++row;
    }
    return truth;
}

void save_edge_list(const std::string& path, const Graph& g) {
    std::ostringstream out;
    for (const Edge& e : g.edge_list)
        out << (e.i + 1) << " " << (e.j + 1) << " " << format_double(e.weight) << "\n";
    atomic_write(path, out.str());
}

void save_spectrum(const std::string& path, const SpectralBasis& basis) {
    std::ostringstream out;
    out << "k,lambda\n";
    for (int k = 0; k < basis.size(); ++k)
        out << (k + 1) << "," << format_double(basis.eigenvalues[k]) << "\n";
    atomic_write(path, out.str());
}

void save_basis_matrix(const std::string& path, const SpectralBasis& basis) {
    std::ostringstream out;
    for (int i = 0; i < basis.eigenvectors.rows(); ++i) {
        for (int j = 0; j < basis.eigenvectors.cols(); ++j) {
            if (j) out << ",";
            out << format_double(basis.eigenvectors(i, j));
        }
        out << "\n";
    }
    atomic_write(path, out.str());
}

void save_trace(const std::string& path, const std::vector<TraceEntry>& trace) {
    std::ostringstream out;
    out << "iter,relative_change,objective,mu\n";
    for (const TraceEntry& e : trace)
        out << e.iter << "," << format_double(e.rel_change) << "," << format_double(e.objective)
            << "," << format_double(e.mu) << "\n";
    atomic_write(path, out.str());
}

void save_predictions(const std::string& path, const std::vector<int>& predictions) {
    std::ostringstream out;
    out << "example,label\n";
    for (std::size_t i = 0; i < predictions.size(); ++i)
        out << (i + 1) << "," << predictions[i] << "\n";
    atomic_write(path, out.str());
}

void save_report_csv(const std::string& path, const ExperimentReport& report) {
    std::ostringstream out;
    out << "method,noise_rate,run,acc_L,acc_U,correction_rate,iters,seconds\n";
    char buf[64];
    for (const RunRecord& r : report.runs) {
        std::snprintf(buf, sizeof(buf), "%.6f,%.6f,%.6f", r.accuracy_labeled,
                      r.accuracy_unlabeled, r.correction_rate);
        out << r.method << "," << format_double(r.noise_rate) << "," << r.run << "," << buf << ","
            << r.iterations << ",";
        std::snprintf(buf, sizeof(buf), "%.3f", r.seconds);
        out << buf << "\n";
    }
    atomic_write(path, out.str());
}

void save_report_json(const std::string& path, const ExperimentReport& report) {
    nlohmann::json j;
    j["seed"] = report.seed;
    j["wall_clock_seconds"] = report.wall_clock_seconds;
    j["summaries"] = nlohmann::json::array();
    for (const MethodSummary& s : report.summaries) {
        j["summaries"].push_back({
            {"method", s.method},
            {"noise_rate", s.noise_rate},
            {"acc_L", {{"mean", s.mean_accuracy_labeled}, {"std", s.std_accuracy_labeled}}},
            {"acc_U", {{"mean", s.mean_accuracy_unlabeled}, {"std", s.std_accuracy_unlabeled}}},
            {"correction_rate",
             {{"mean", s.mean_correction_rate}, {"std", s.std_correction_rate}}},
        });
    }
    atomic_write(path, j.dump(2) + "\n");
}

std::map<std::string, std::string> load_config(const std::string& path) {
    std::istringstream in(read_file(path));
    std::map<std::string, std::string> out;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            throw IoError("config '" + path + "' line " + std::to_string(lineno) +
                          ": expected key=value");
        out[trim(t.substr(0, eq))] = trim(t.substr(eq + 1));
    }
    return out;
}

} // namespace siis::io
