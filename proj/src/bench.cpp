#include "siis/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <numeric>
#include <thread>

#include "siis/rng.hpp"

namespace siis {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

// Moves the chosen labeled examples to the front (ascending original order,
// then the rest ascending) and rewires the ground truth accordingly.
SyntheticDataset arrange_labeled_first(Eigen::MatrixXd points, std::vector<int> true_labels,
                                       std::vector<int> labeled, std::vector<int> given_of_labeled,
                                       std::vector<int> flipped_within_labeled, int classes) {
    const int n = static_cast<int>(points.rows());
    const int l = static_cast<int>(labeled.size());

    std::vector<int> order(labeled.begin(), labeled.end());
    std::vector<char> is_labeled(static_cast<std::size_t>(n), 0);
    for (int v : labeled) is_labeled[static_cast<std::size_t>(v)] = 1;
    for (int v = 0; v < n; ++v)
        if (!is_labeled[static_cast<std::size_t>(v)]) order.push_back(v);

    SyntheticDataset out;
    out.classes = classes;
    out.data.features.resize(n, points.cols());
    out.truth.true_labels.resize(static_cast<std::size_t>(n));
    for (int pos = 0; pos < n; ++pos) {
        const int src = order[static_cast<std::size_t>(pos)];
        out.data.features.row(pos) = points.row(src);
        out.truth.true_labels[static_cast<std::size_t>(pos)] =
            true_labels[static_cast<std::size_t>(src)];
    }
    out.data.given_labels.assign(given_of_labeled.begin(), given_of_labeled.end());
    out.truth.flipped = std::move(flipped_within_labeled); // already positions 0..l-1
    std::sort(out.truth.flipped.begin(), out.truth.flipped.end());
    (void)l;
    return out;
}

} // namespace

SyntheticDataset make_double_moon(const MoonParams& params, std::uint64_t seed) {
    if (params.n < 4 || params.n % 2 != 0)
        throw InvalidParameterError("make_double_moon: n must be even and >= 4");
    if (params.labeled_per_class < 1 || 2 * params.labeled_per_class > params.n)
        throw InvalidParameterError("make_double_moon: bad labeled_per_class");
    if (params.flipped_per_class < 0 || params.flipped_per_class > params.labeled_per_class)
        throw InvalidParameterError("make_double_moon: bad flipped_per_class");
    if (params.noise_std < 0.0)
        throw InvalidParameterError("make_double_moon: noise_std must be nonnegative");

    const int half = params.n / 2;
    Rng rng(seed);

    Eigen::MatrixXd points(params.n, 2);
    std::vector<int> truth(static_cast<std::size_t>(params.n));
    for (int i = 0; i < half; ++i) {
        const double t = half > 1 ? kPi * i / (half - 1) : 0.0;
        points(i, 0) = params.radius * std::cos(t) + params.noise_std * rng.normal();
        points(i, 1) = params.radius * std::sin(t) + params.noise_std * rng.normal();
        truth[static_cast<std::size_t>(i)] = 1;
        const int j = half + i;
        points(j, 0) = params.x_offset - params.radius * std::cos(t) + params.noise_std * rng.normal();
        points(j, 1) = params.y_offset - params.radius * std::sin(t) + params.noise_std * rng.normal();
        truth[static_cast<std::size_t>(j)] = 2;
    }

    std::vector<int> labeled;
    std::vector<int> flipped_slots;
    for (int cls = 0; cls < 2; ++cls) {
        std::vector<int> chosen = rng.sample_without_replacement(half, params.labeled_per_class);
        std::sort(chosen.begin(), chosen.end());
        for (int& v : chosen) v += cls * half;
        const int base = static_cast<int>(labeled.size());
        labeled.insert(labeled.end(), chosen.begin(), chosen.end());
        std::vector<int> flips =
            rng.sample_without_replacement(params.labeled_per_class, params.flipped_per_class);
        for (int f : flips) flipped_slots.push_back(base + f);
    }

    std::vector<int> given(labeled.size());
    for (std::size_t i = 0; i < labeled.size(); ++i)
        given[i] = truth[static_cast<std::size_t>(labeled[i])];
    for (int slot : flipped_slots) given[static_cast<std::size_t>(slot)] = 3 - given[static_cast<std::size_t>(slot)];

    return arrange_labeled_first(std::move(points), std::move(truth), std::move(labeled),
                                 std::move(given), std::move(flipped_slots), 2);
}

SyntheticDataset make_blobs(const BlobParams& params, std::uint64_t seed) {
    if (params.classes < 1 || params.n < params.classes)
        throw InvalidParameterError("make_blobs: need at least one point per class");
    if (params.dim < 2) throw InvalidParameterError("make_blobs: dim must be >= 2");
    if (params.labeled_per_class < 1 ||
        params.labeled_per_class > params.n / params.classes)
        throw InvalidParameterError("make_blobs: bad labeled_per_class");

    Rng rng(seed);
    Eigen::MatrixXd points(params.n, params.dim);
    std::vector<int> truth(static_cast<std::size_t>(params.n));

    std::vector<int> class_start;
    int assigned = 0;
    for (int cls = 0; cls < params.classes; ++cls) {
        class_start.push_back(assigned);
        const int count = params.n / params.classes + (cls < params.n % params.classes ? 1 : 0);
        const double angle = 2.0 * kPi * cls / params.classes;
        for (int i = 0; i < count; ++i) {
            const int row = assigned + i;
            points(row, 0) = params.center_radius * std::cos(angle);
            points(row, 1) = params.center_radius * std::sin(angle);
            for (int d = 2; d < params.dim; ++d) points(row, d) = 0.0;
            for (int d = 0; d < params.dim; ++d) points(row, d) += params.cluster_std * rng.normal();
            truth[static_cast<std::size_t>(row)] = cls + 1;
        }
        assigned += count;
    }
    class_start.push_back(assigned);

    std::vector<int> labeled;
    for (int cls = 0; cls < params.classes; ++cls) {
        const int count = class_start[static_cast<std::size_t>(cls) + 1] -
                          class_start[static_cast<std::size_t>(cls)];
        std::vector<int> chosen = rng.sample_without_replacement(count, params.labeled_per_class);
        std::sort(chosen.begin(), chosen.end());
        for (int v : chosen) labeled.push_back(class_start[static_cast<std::size_t>(cls)] + v);
    }
    std::vector<int> given(labeled.size());
    for (std::size_t i = 0; i < labeled.size(); ++i)
        given[i] = truth[static_cast<std::size_t>(labeled[i])];

    return arrange_labeled_first(std::move(points), std::move(truth), std::move(labeled),
                                 std::move(given), {}, params.classes);
}

NoiseResult inject_label_noise(const Eigen::MatrixXd& one_hot, double rate, int class_count,
                               std::uint64_t seed) {
    const int l = static_cast<int>(one_hot.rows());
    if (class_count != static_cast<int>(one_hot.cols()))
        throw InvalidParameterError("inject_label_noise: class count mismatch");
    if (!(rate >= 0.0 && rate < 1.0))
        throw InvalidParameterError("inject_label_noise: rate must be in [0, 1)");
    for (int i = 0; i < l; ++i) {
        int ones = 0;
        for (int j = 0; j < class_count; ++j) {
            const double v = one_hot(i, j);
            if (v == 1.0) ++ones;
            else if (v != 0.0) throw InvalidParameterError("inject_label_noise: labels must be one-hot");
        }
        if (ones != 1) throw InvalidParameterError("inject_label_noise: labels must be one-hot");
    }

    const int flips = static_cast<int>(std::floor(rate * l));
    NoiseResult out;
    out.labels = one_hot;
    if (flips == 0) return out;
    if (class_count < 2)
        throw InvalidParameterError("inject_label_noise: cannot flip labels with a single class");

    Rng rng(seed);
    out.flipped = rng.sample_without_replacement(l, flips);
    std::sort(out.flipped.begin(), out.flipped.end());
    for (int row : out.flipped) {
        int current = 0;
        one_hot.row(row).maxCoeff(&current);
        // uniform over the c-1 wrong classes
        int wrong = static_cast<int>(rng.below(static_cast<std::uint64_t>(class_count - 1)));
        if (wrong >= current) ++wrong;
        out.labels.row(row).setZero();
        out.labels(row, wrong) = 1.0;
    }
    return out;
}

EvalEntry evaluate(const std::vector<int>& predictions, const std::vector<int>& true_labels,
                   int labeled_count, const std::vector<int>& flipped) {
    const int n = static_cast<int>(true_labels.size());
    if (static_cast<int>(predictions.size()) != n)
        throw InvalidParameterError("evaluate: prediction length mismatch");
    if (labeled_count < 0 || labeled_count > n)
        throw InvalidParameterError("evaluate: bad labeled count");

    EvalEntry entry;
    int hits_l = 0, hits_u = 0;
    for (int i = 0; i < n; ++i) {
        const bool hit = predictions[static_cast<std::size_t>(i)] ==
                         true_labels[static_cast<std::size_t>(i)];
        (i < labeled_count ? hits_l : hits_u) += hit ? 1 : 0;
    }
    entry.accuracy_labeled = labeled_count > 0 ? static_cast<double>(hits_l) / labeled_count : 1.0;
    const int u = n - labeled_count;
    entry.accuracy_unlabeled = u > 0 ? static_cast<double>(hits_u) / u : 1.0;

    int corrected = 0;
    for (int idx : flipped) {
        if (idx < 0 || idx >= n) throw InvalidParameterError("evaluate: flipped index out of range");
        if (predictions[static_cast<std::size_t>(idx)] == true_labels[static_cast<std::size_t>(idx)])
            ++corrected;
    }
    entry.correction_rate =
        flipped.empty() ? 0.0 : static_cast<double>(corrected) / static_cast<double>(flipped.size());
    return entry;
}

namespace {

// Objective value and one subgradient of the convex model, evaluated without
// any of the solver's machinery.
double subgradient_eval(const ProblemInstance& inst, double alpha, double beta,
                        const Eigen::MatrixXd& a, Eigen::MatrixXd& grad) {
    double value = 0.0;
    grad = 2.0 * beta * (inst.sigma.asDiagonal() * a);
    value += beta * (inst.sigma.asDiagonal() * a).cwiseProduct(a).sum();

    const Eigen::MatrixXd edge_vals = inst.edge_diff * a;
    Eigen::MatrixXd dir = Eigen::MatrixXd::Zero(edge_vals.rows(), edge_vals.cols());
    for (int i = 0; i < edge_vals.rows(); ++i) {
        const double norm = edge_vals.row(i).norm();
        value += norm;
        if (norm > 1e-18) dir.row(i) = edge_vals.row(i) / norm;
    }
    grad += inst.edge_diff.transpose() * dir;

    const Eigen::MatrixXd fid = inst.labeled_rows * a - inst.labels;
    Eigen::MatrixXd fdir = Eigen::MatrixXd::Zero(fid.rows(), fid.cols());
    for (int i = 0; i < fid.rows(); ++i) {
        const double norm = fid.row(i).norm();
        value += alpha * norm;
        if (norm > 1e-18) fdir.row(i) = fid.row(i) / norm;
    }
    grad += alpha * (inst.labeled_rows.transpose() * fdir);
    return value;
}

} // namespace

OracleResult oracle_solve(const ProblemInstance& inst, double alpha, double beta, long budget,
                          int restarts, std::uint64_t seed) {
    if (restarts < 1) throw InvalidParameterError("oracle_solve: restarts must be >= 1");
    if (budget < restarts) throw InvalidParameterError("oracle_solve: budget too small");

    // step scale grid; restart 0 starts at zero, the rest at random points
    const double c0_grid[] = {0.01, 0.1, 1.0, 10.0, 100.0};
    const long per_restart = budget / restarts;

    OracleResult best;
    best.coeffs = Eigen::MatrixXd::Zero(inst.m(), inst.c());
    Eigen::MatrixXd grad;
    best.objective = subgradient_eval(inst, alpha, beta, best.coeffs, grad);

    double best_at_midpoint = best.objective;
    for (int r = 0; r < restarts; ++r) {
        Rng rng(fanout_seed(seed, static_cast<std::uint64_t>(r)));
        Eigen::MatrixXd a = Eigen::MatrixXd::Zero(inst.m(), inst.c());
        if (r > 0)
            for (int i = 0; i < a.size(); ++i) a.data()[i] = rng.normal();
        const double c0 = c0_grid[r % 5];

        for (long t = 1; t <= per_restart; ++t) {
            const double value = subgradient_eval(inst, alpha, beta, a, grad);
            if (value < best.objective) {
                best.objective = value;
                best.coeffs = a;
            }
            if (r == restarts - 1 && t == per_restart / 2) best_at_midpoint = best.objective;
            const double gnorm = grad.norm();
            if (gnorm < 1e-15) break; // smooth stationary point, also global here
            a -= (c0 / std::sqrt(static_cast<double>(t))) * (grad / gnorm);
        }
    }
    best.converged =
        best_at_midpoint - best.objective <= 1e-7 * (1.0 + std::abs(best.objective));
    return best;
}

namespace {

double sample_std(const std::vector<double>& xs, double mean) {
    if (xs.size() < 2) return 0.0;
    double acc = 0.0;
    for (double x : xs) acc += (x - mean) * (x - mean);
    return std::sqrt(acc / static_cast<double>(xs.size() - 1));
}

} // namespace

ExperimentReport run_experiment(const SyntheticDataset& dataset, const ExperimentConfig& config) {
    const auto t_start = std::chrono::steady_clock::now();
    dataset.data.validate();
    for (const std::string& m : config.methods)
        if (m != "siis" && m != "gfhf" && m != "l2l1" && m != "gtf")
            throw InvalidParameterError("run_experiment: unknown method '" + m + "'");
    if (config.repetitions < 1)
        throw InvalidParameterError("run_experiment: repetitions must be >= 1");
    for (double rate : config.noise_levels)
        if (!(rate >= 0.0 && rate < 1.0))
            throw InvalidParameterError("run_experiment: noise level outside [0, 1)");

    const int l = dataset.data.labeled_count();
    const int c = dataset.classes;

    // shared, immutable problem geometry
    const Graph graph = build_knn_graph(dataset.data, config.k, config.xi);
    const SpMat lap = laplacian(graph);
    const DifferenceOperator diff = difference_operator(graph);
    const SpectralBasis basis = smallest_eigenpairs(lap, config.m);

    Eigen::MatrixXd y_true = Eigen::MatrixXd::Zero(l, c);
    for (int i = 0; i < l; ++i)
        y_true(i, dataset.truth.true_labels[static_cast<std::size_t>(i)] - 1) = 1.0;
    const ProblemInstance base_instance = ProblemInstance::assemble(diff.P, basis, y_true);

    std::vector<int> labeled_idx(static_cast<std::size_t>(l));
    for (int i = 0; i < l; ++i) labeled_idx[static_cast<std::size_t>(i)] = i;

    const std::size_t levels = config.noise_levels.size();
    const std::size_t methods = config.methods.size();
    const std::size_t reps = static_cast<std::size_t>(config.repetitions);

    ExperimentReport report;
    report.seed = config.seed;
    report.runs.resize(methods * levels * reps);
    if (config.keep_traces) report.traces.resize(report.runs.size());

    const auto slot_of = [&](std::size_t mi, std::size_t li, std::size_t ri) {
        return (mi * levels + li) * reps + ri;
    };

    const auto run_task = [&](std::size_t li, std::size_t ri) {
        const double rate = config.noise_levels[li];
        const std::uint64_t noise_seed = fanout_seed(config.seed, li, ri);
        const NoiseResult noisy = inject_label_noise(y_true, rate, c, noise_seed);

        for (std::size_t mi = 0; mi < methods; ++mi) {
            const std::string& method = config.methods[mi];
            const auto t0 = std::chrono::steady_clock::now();
            std::vector<int> predictions;
            int iterations = 0;
            std::vector<TraceEntry> trace;
            if (method == "siis") {
                const ProblemInstance inst = base_instance.with_labels(noisy.labels);
                SolveResult res = solve(inst, config.solver);
                predictions = classify(res.labels);
                iterations = res.iterations;
                trace = std::move(res.trace);
            } else if (method == "gfhf") {
                BaselineResult res = gfhf(lap, noisy.labels, labeled_idx);
                predictions = std::move(res.predictions);
            } else if (method == "l2l1") {
                BaselineResult res =
                    l2_l1_fidelity(lap, noisy.labels, config.solver.alpha, config.solver);
                predictions = std::move(res.predictions);
                iterations = static_cast<int>(res.trace.size());
                trace = std::move(res.trace);
            } else {
                BaselineResult res =
                    gtf_only(diff.P, noisy.labels, config.solver.alpha, config.solver);
                predictions = std::move(res.predictions);
                iterations = static_cast<int>(res.trace.size());
                trace = std::move(res.trace);
            }
            const EvalEntry eval =
                evaluate(predictions, dataset.truth.true_labels, l, noisy.flipped);
            const auto t1 = std::chrono::steady_clock::now();

            RunRecord& rec = report.runs[slot_of(mi, li, ri)];
            rec.method = method;
            rec.noise_rate = rate;
            rec.run = static_cast<int>(ri);
            rec.accuracy_labeled = eval.accuracy_labeled;
            rec.accuracy_unlabeled = eval.accuracy_unlabeled;
            rec.correction_rate = eval.correction_rate;
            rec.iterations = iterations;
            rec.seconds = std::chrono::duration<double>(t1 - t0).count();
            rec.seed = noise_seed;
            if (config.keep_traces) report.traces[slot_of(mi, li, ri)] = std::move(trace);
        }
    };

    const std::size_t tasks = levels * reps;
    const int threads = std::max(1, std::min<int>(config.threads, static_cast<int>(tasks)));
    if (threads == 1) {
        for (std::size_t t = 0; t < tasks; ++t) run_task(t / reps, t % reps);
    } else {
        std::atomic<std::size_t> cursor{0};
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(threads));
        for (int w = 0; w < threads; ++w)
            pool.emplace_back([&] {
                for (std::size_t t = cursor.fetch_add(1); t < tasks; t = cursor.fetch_add(1))
                    run_task(t / reps, t % reps);
            });
        for (std::thread& th : pool) th.join();
    }

    for (std::size_t mi = 0; mi < methods; ++mi) {
        for (std::size_t li = 0; li < levels; ++li) {
            std::vector<double> al, au, cr;
            for (std::size_t ri = 0; ri < reps; ++ri) {
                const RunRecord& rec = report.runs[slot_of(mi, li, ri)];
                al.push_back(rec.accuracy_labeled);
                au.push_back(rec.accuracy_unlabeled);
                cr.push_back(rec.correction_rate);
            }
            MethodSummary s;
            s.method = config.methods[mi];
            s.noise_rate = config.noise_levels[li];
            s.mean_accuracy_labeled = std::accumulate(al.begin(), al.end(), 0.0) / al.size();
            s.mean_accuracy_unlabeled = std::accumulate(au.begin(), au.end(), 0.0) / au.size();
            s.mean_correction_rate = std::accumulate(cr.begin(), cr.end(), 0.0) / cr.size();
            s.std_accuracy_labeled = sample_std(al, s.mean_accuracy_labeled);
            s.std_accuracy_unlabeled = sample_std(au, s.mean_accuracy_unlabeled);
            s.std_correction_rate = sample_std(cr, s.mean_correction_rate);
            report.summaries.push_back(s);
        }
    }
    report.wall_clock_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    return report;
}

} // namespace siis
