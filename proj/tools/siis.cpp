// Command-line front end: dataset generation, single solves, the experiment
// matrix, parameter sweeps, and spectrum export.
//
// Exit codes: 0 success, 2 validation error, 3 numerical failure, 4 I/O.

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "siis/bench.hpp"
#include "siis/io.hpp"
#include "siis/rng.hpp"

namespace {

using namespace siis;

struct Options {
    std::string dataset;
    std::string truth_path;
    std::string generate; // "moon" or "blobs"
    int n = 640;
    double noise_std = 0.15;
    int labeled_per_class = 3;
    int flipped_per_class = 1;
    int classes = 4; // blobs
    double blob_std = 0.5;
    double blob_radius = 4.0;
    int k = 10;
    double xi = 1.0;
    int m = 30;
    double alpha = 100.0;
    double beta = 10.0;
    std::string noise = "0,0.2,0.4,0.6";
    std::string methods = "siis,gfhf,l2l1,gtf";
    int runs = 10;
    std::uint64_t seed = 1;
    std::string out = "out";
    std::string config_path;
    std::string alpha_grid = "1,10,100,1000";
    std::string beta_grid = "1,10,100,1000";
    bool dump_vectors = false;
    double mu0 = 1.0, mu_max = 1e10, rho = 1.2, epsilon = 1e-4;
    int max_iter = 100;
};

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream ss(s);
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

std::vector<double> parse_double_list(const std::string& s, const std::string& what) {
    std::vector<double> out;
    for (const std::string& item : split_list(s)) {
        try {
            out.push_back(std::stod(item));
        } catch (const std::exception&) {
            throw InvalidParameterError("could not parse " + what + " entry '" + item + "'");
        }
    }
    if (out.empty()) throw InvalidParameterError(what + " must not be empty");
    return out;
}

int env_threads() {
    const char* env = std::getenv("SIIS_THREADS");
    if (!env) return 1;
    const int v = std::atoi(env);
    return v > 0 ? v : 1;
}

SolverConfig solver_config(const Options& o) {
    SolverConfig cfg;
    cfg.alpha = o.alpha;
    cfg.beta = o.beta;
    cfg.mu0 = o.mu0;
    cfg.mu_max = o.mu_max;
    cfg.rho = o.rho;
    cfg.epsilon = o.epsilon;
    cfg.max_iter = o.max_iter;
    cfg.validate();
    return cfg;
}

SyntheticDataset load_or_generate(const Options& o) {
    if (!o.generate.empty() && !o.dataset.empty())
        throw InvalidParameterError("give either --dataset or --generate, not both");
    if (o.generate == "moon") {
        MoonParams p;
        p.n = o.n;
        p.noise_std = o.noise_std;
        p.labeled_per_class = o.labeled_per_class;
        p.flipped_per_class = o.flipped_per_class;
        return make_double_moon(p, o.seed);
    }
    if (o.generate == "blobs") {
        BlobParams p;
        p.n = o.n;
        p.classes = o.classes;
        p.cluster_std = o.blob_std;
        p.center_radius = o.blob_radius;
        p.labeled_per_class = o.labeled_per_class;
        return make_blobs(p, o.seed);
    }
    if (!o.generate.empty())
        throw InvalidParameterError("unknown generator '" + o.generate + "' (moon or blobs)");
    if (o.dataset.empty())
        throw InvalidParameterError("one of --dataset or --generate is required");

    std::vector<int> order;
    SyntheticDataset sd;
    const bool csv = o.dataset.size() >= 4 && o.dataset.substr(o.dataset.size() - 4) == ".csv";
    sd.data = csv ? io::load_dataset_csv(o.dataset, &order)
                  : io::load_dataset_sparse(o.dataset, &order);

    std::string truth_file = o.truth_path;
    if (truth_file.empty()) {
        const std::string candidate =
            csv ? o.dataset.substr(0, o.dataset.size() - 4) + ".truth.csv"
                : o.dataset + ".truth.csv";
        if (std::filesystem::exists(candidate)) truth_file = candidate;
    }
    int classes = 0;
    for (int label : sd.data.given_labels) classes = std::max(classes, label);
    if (!truth_file.empty()) {
        GroundTruth raw = io::load_ground_truth(truth_file);
        if (raw.true_labels.size() != static_cast<std::size_t>(sd.data.total_count()))
            throw IoError("ground truth '" + truth_file + "' row count does not match dataset");
        // remap through the loader's labeled-first permutation
        std::vector<char> was_flipped(raw.true_labels.size(), 0);
        for (int idx : raw.flipped) was_flipped.at(static_cast<std::size_t>(idx)) = 1;
        sd.truth.true_labels.resize(raw.true_labels.size());
        for (std::size_t pos = 0; pos < order.size(); ++pos) {
            const auto src = static_cast<std::size_t>(order[pos]);
            sd.truth.true_labels[pos] = raw.true_labels[src];
            if (was_flipped[src]) sd.truth.flipped.push_back(static_cast<int>(pos));
        }
        for (int label : sd.truth.true_labels) classes = std::max(classes, label);
    }
    sd.classes = classes;
    return sd;
}

void warn_if_disconnected(const Graph& graph) {
    const Components comps = connected_components(graph);
    if (comps.count > 1)
        std::cerr << "warning: graph has " << comps.count
                  << " connected components; convergence guarantees assume a connected graph\n";
}

std::string rate_tag(double rate) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", rate);
    return buf;
}

int cmd_generate(const Options& o) {
    const SyntheticDataset sd = load_or_generate(o);
    io::save_dataset_csv(o.out + "/dataset.csv", sd.data);
    io::save_ground_truth(o.out + "/truth.csv", sd.truth);
    std::cout << "wrote " << o.out << "/dataset.csv (" << sd.data.total_count() << " examples, "
              << sd.data.labeled_count() << " labeled, " << sd.truth.flipped.size()
              << " flipped)\n";
    return 0;
}

int cmd_train(const Options& o) {
    const SyntheticDataset sd = load_or_generate(o);
    const Graph graph = build_knn_graph(sd.data, o.k, o.xi);
    warn_if_disconnected(graph);
    const SpMat lap = laplacian(graph);
    const SpectralBasis basis = smallest_eigenpairs(lap, o.m);
    const DifferenceOperator diff = difference_operator(graph);

    int classes = sd.classes;
    for (int label : sd.data.given_labels) classes = std::max(classes, label);
    const LabelIndicator ind = label_indicator(sd.data, classes);
    const ProblemInstance inst = ProblemInstance::assemble(diff.P, basis, ind.Y);
    const SolveResult result = solve(inst, solver_config(o));
    const std::vector<int> predictions = classify(result.labels);

    io::save_predictions(o.out + "/predictions.csv", predictions);
    io::save_trace(o.out + "/trace.csv", result.trace);
    std::cout << "solved in " << result.iterations << " iterations ("
              << (result.converged ? "converged" : "max_iter reached") << ")\n";
    if (!sd.truth.true_labels.empty()) {
        const EvalEntry eval = evaluate(predictions, sd.truth.true_labels,
                                        sd.data.labeled_count(), sd.truth.flipped);
        std::cout << "accuracy_labeled=" << eval.accuracy_labeled
                  << " accuracy_unlabeled=" << eval.accuracy_unlabeled
                  << " correction_rate=" << eval.correction_rate << "\n";
    }
    return 0;
}

int cmd_bench(const Options& o) {
    const SyntheticDataset sd = load_or_generate(o);
    if (sd.truth.true_labels.empty())
        throw InvalidParameterError("bench requires ground truth (generate or provide a sidecar)");

    ExperimentConfig ec;
    ec.methods = split_list(o.methods);
    ec.noise_levels = parse_double_list(o.noise, "--noise");
    ec.repetitions = o.runs;
    ec.seed = o.seed;
    ec.k = o.k;
    ec.xi = o.xi;
    ec.m = o.m;
    ec.solver = solver_config(o);
    ec.threads = env_threads();
    ec.keep_traces = true;

    const ExperimentReport report = run_experiment(sd, ec);
    io::save_report_csv(o.out + "/report.csv", report);
    io::save_report_json(o.out + "/summary.json", report);
    for (std::size_t i = 0; i < report.runs.size(); ++i) {
        if (report.traces[i].empty()) continue;
        const RunRecord& r = report.runs[i];
        io::save_trace(o.out + "/trace_" + r.method + "_noise" + rate_tag(r.noise_rate) + "_run" +
                           std::to_string(r.run) + ".csv",
                       report.traces[i]);
    }
    for (const MethodSummary& s : report.summaries)
        std::cout << s.method << " noise=" << s.noise_rate
                  << " acc_U=" << s.mean_accuracy_unlabeled << "+/-" << s.std_accuracy_unlabeled
                  << " acc_L=" << s.mean_accuracy_labeled << "+/-" << s.std_accuracy_labeled
                  << " correction=" << s.mean_correction_rate << "\n";
    return 0;
}

int cmd_sweep(const Options& o) {
    const SyntheticDataset sd = load_or_generate(o);
    if (sd.truth.true_labels.empty())
        throw InvalidParameterError("sweep requires ground truth (generate or provide a sidecar)");
    const std::vector<double> alphas = parse_double_list(o.alpha_grid, "--alpha-grid");
    const std::vector<double> betas = parse_double_list(o.beta_grid, "--beta-grid");
    const std::vector<double> noise = parse_double_list(o.noise, "--noise");
    if (noise.size() != 1)
        throw InvalidParameterError("sweep expects exactly one --noise level");

    std::ostringstream csv;
    csv << "alpha,beta,noise_rate,runs,acc_L,acc_U,correction_rate\n";
    for (double a : alphas) {
        for (double b : betas) {
            Options point = o;
            point.alpha = a;
            point.beta = b;
            ExperimentConfig ec;
            ec.methods = {"siis"};
            ec.noise_levels = noise;
            ec.repetitions = o.runs;
            ec.seed = o.seed;
            ec.k = o.k;
            ec.xi = o.xi;
            ec.m = o.m;
            ec.solver = solver_config(point);
            ec.threads = env_threads();
            const ExperimentReport report = run_experiment(sd, ec);
            const MethodSummary& s = report.summaries.front();
            char buf[96];
            std::snprintf(buf, sizeof(buf), "%.6f,%.6f,%.6f", s.mean_accuracy_labeled,
                          s.mean_accuracy_unlabeled, s.mean_correction_rate);
            csv << io::format_double(a) << "," << io::format_double(b) << "," << rate_tag(noise[0])
                << "," << o.runs << "," << buf << "\n";
            std::cout << "alpha=" << a << " beta=" << b
                      << " acc_U=" << s.mean_accuracy_unlabeled << "\n";
        }
    }
    io::atomic_write(o.out + "/sweep.csv", csv.str());
    return 0;
}

int cmd_spectrum(const Options& o) {
    const SyntheticDataset sd = load_or_generate(o);
    const Graph graph = build_knn_graph(sd.data, o.k, o.xi);
    warn_if_disconnected(graph);
    const SpectralBasis basis = smallest_eigenpairs(laplacian(graph), o.m);
    io::save_spectrum(o.out + "/spectrum.csv", basis);
    if (o.dump_vectors) io::save_basis_matrix(o.out + "/basis.csv", basis);
    std::cout << "wrote " << o.out << "/spectrum.csv (" << basis.size() << " eigenvalues)\n";
    return 0;
}

void add_common_options(CLI::App* cmd, Options& o) {
    cmd->add_option("--dataset", o.dataset, "dataset file (.csv or sparse index:value)");
    cmd->add_option("--truth", o.truth_path, "ground-truth sidecar path");
    cmd->add_option("--generate", o.generate, "synthetic dataset: moon or blobs");
    cmd->add_option("--n", o.n, "generated dataset size");
    cmd->add_option("--noise-std", o.noise_std, "moon coordinate noise std");
    cmd->add_option("--labeled-per-class", o.labeled_per_class, "labeled examples per class");
    cmd->add_option("--flipped-per-class", o.flipped_per_class, "wrong labels per class (moon)");
    cmd->add_option("--classes", o.classes, "class count (blobs)");
    cmd->add_option("--blob-std", o.blob_std, "blob cluster std");
    cmd->add_option("--blob-radius", o.blob_radius, "blob center circle radius");
    cmd->add_option("--k", o.k, "KNN neighbor count");
    cmd->add_option("--xi", o.xi, "Gaussian kernel width");
    cmd->add_option("--m", o.m, "number of preserved eigenvectors");
    cmd->add_option("--alpha", o.alpha, "fidelity weight");
    cmd->add_option("--beta", o.beta, "spectral weight");
    cmd->add_option("--noise", o.noise, "label-noise rates, comma separated");
    cmd->add_option("--methods", o.methods, "methods: siis,gfhf,l2l1,gtf");
    cmd->add_option("--runs", o.runs, "repetitions per configuration");
    cmd->add_option("--seed", o.seed, "root seed; all randomness fans out from it");
    cmd->add_option("--out", o.out, "output directory");
    cmd->add_option("--config", o.config_path, "key=value config file");
    cmd->add_option("--alpha-grid", o.alpha_grid, "sweep grid for alpha");
    cmd->add_option("--beta-grid", o.beta_grid, "sweep grid for beta");
    cmd->add_flag("--dump-vectors", o.dump_vectors, "also export the eigenvector matrix");
    cmd->add_option("--mu0", o.mu0, "initial ADMM penalty");
    cmd->add_option("--mu-max", o.mu_max, "penalty cap");
    cmd->add_option("--rho", o.rho, "penalty growth factor");
    cmd->add_option("--epsilon", o.epsilon, "relative-change stopping tolerance");
    cmd->add_option("--max-iter", o.max_iter, "ADMM iteration cap");
}

// Config-file values fill in only where the command line left defaults:
// flags override config, config overrides built-in defaults.
void apply_config_file(CLI::App* cmd, Options& o) {
    if (o.config_path.empty()) return;
    const auto kv = io::load_config(o.config_path);
    const auto set_if_unset = [&](const char* flag, const char* key, auto& field) {
        const auto it = kv.find(key);
        if (it == kv.end() || cmd->count(flag) > 0) return;
        std::istringstream ss(it->second);
        ss >> field;
        if (ss.fail()) throw IoError("config: bad value for '" + std::string(key) + "'");
    };
    set_if_unset("--alpha", "alpha", o.alpha);
    set_if_unset("--beta", "beta", o.beta);
    set_if_unset("--k", "k", o.k);
    set_if_unset("--xi", "xi", o.xi);
    set_if_unset("--m", "m", o.m);
    set_if_unset("--seed", "seed", o.seed);
    set_if_unset("--runs", "runs", o.runs);
    set_if_unset("--noise", "noise", o.noise);
    set_if_unset("--methods", "methods", o.methods);
    set_if_unset("--out", "out", o.out);
    set_if_unset("--mu0", "mu0", o.mu0);
    set_if_unset("--mu-max", "mu_max", o.mu_max);
    set_if_unset("--rho", "rho", o.rho);
    set_if_unset("--epsilon", "epsilon", o.epsilon);
    set_if_unset("--max-iter", "max_iter", o.max_iter);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"SIIS: graph-based semi-supervised classification robust to label noise"};
    app.require_subcommand(1);

    Options o;
    CLI::App* generate = app.add_subcommand("generate", "materialize a synthetic dataset");
    CLI::App* train = app.add_subcommand("train", "run the full pipeline once");
    CLI::App* bench = app.add_subcommand("bench", "methods x noise levels x repetitions");
    CLI::App* sweep = app.add_subcommand("sweep", "alpha/beta grid search");
    CLI::App* spectrum = app.add_subcommand("spectrum", "export Laplacian eigenvalues");
    for (CLI::App* cmd : {generate, train, bench, sweep, spectrum}) add_common_options(cmd, o);

    try {
        app.parse(argc, argv);
        CLI::App* active = app.get_subcommands().front();
        apply_config_file(active, o);
        if (active == generate) return cmd_generate(o);
        if (active == train) return cmd_train(o);
        if (active == bench) return cmd_bench(o);
        if (active == sweep) return cmd_sweep(o);
        return cmd_spectrum(o);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const InvalidParameterError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 2;
    } catch (const NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 3;
    } catch (const IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return 4;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
