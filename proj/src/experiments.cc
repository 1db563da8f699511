#include "gcpose/experiments.h"

#include "gcpose/geometry.h"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <thread>

namespace gcpose {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double quantile_sorted(const std::vector<double> &v, double q) {
    const double pos = q * static_cast<double>(v.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

std::string format_value(double x) {
    if (std::isnan(x)) {
        return "nan";
    }
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.10g", x);
    return buf;
}

std::string setting_label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", v);
    return buf;
}

template <typename Get>
std::vector<double> collect(const std::vector<TrialRecord> &trials, Get get) {
    std::vector<double> out;
    for (const TrialRecord &t : trials) {
        if (t.solved) {
            out.push_back(get(t));
        }
    }
    return out;
}

// One setting of a minimal-solver sweep. Trial seeds do not depend on the setting, so every
// setting sees the same scenes and the same normalized noise draws.
ErrorStats minimal_sweep_setting(const ExperimentOptions &opt, double value,
                                 const ScenarioConfig &scenario, const SolverOptions &solver) {
    ErrorStats stats;
    stats.setting = setting_label(value);
    stats.value = value;
    stats.trials = run_trials(opt.trials, opt.threads, [&](int trial) {
        ScenarioConfig cfg = scenario;
        cfg.seed = trial_seed(opt.scenario.seed, 0, static_cast<std::uint64_t>(trial));
        const SyntheticInstance inst = generate_instance(cfg);
        const std::span<const Correspondence, 4> four(inst.correspondences.data(), 4);
        const auto start = std::chrono::steady_clock::now();
        const SolverOutput out = four_point_solve(four, inst.rig, inst.noisy_prior, solver);
        const auto stop = std::chrono::steady_clock::now();
        TrialRecord rec = score_best_candidate(out, inst.true_pose);
        if (opt.record_timing) {
            rec.runtime_ns = std::chrono::duration_cast<std::chrono::nanoseconds>(stop - start).count();
        }
        return rec;
    });
    return stats;
}

ScenarioConfig minimal_scenario(const ExperimentOptions &opt) {
    ScenarioConfig cfg = opt.scenario;
    cfg.num_points = 4;
    cfg.outlier_ratio = 0.0;
    return cfg;
}

}  // namespace

Quantiles summarize(std::vector<double> values) {
    values.erase(std::remove_if(values.begin(), values.end(), [](double x) { return !std::isfinite(x); }),
                 values.end());
    Quantiles q;
    q.count = values.size();
    if (values.empty()) {
        q.mean = q.median = q.q25 = q.q75 = q.q90 = q.max = kNaN;
        return q;
    }
    std::sort(values.begin(), values.end());
    // Summing the sorted values keeps the mean independent of trial order.
    q.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
    q.median = quantile_sorted(values, 0.5);
    q.q25 = quantile_sorted(values, 0.25);
    q.q75 = quantile_sorted(values, 0.75);
    q.q90 = quantile_sorted(values, 0.90);
    q.max = values.back();
    return q;
}

std::size_t ErrorStats::failures() const {
    return static_cast<std::size_t>(
        std::count_if(trials.begin(), trials.end(), [](const TrialRecord &t) { return !t.solved; }));
}

std::vector<double> ErrorStats::rotation_errors_deg() const {
    return collect(trials, [](const TrialRecord &t) { return t.rot_err_deg; });
}

std::vector<double> ErrorStats::translation_errors_deg() const {
    return collect(trials, [](const TrialRecord &t) { return t.trans_dir_err_deg; });
}

std::vector<double> ErrorStats::recalls() const {
    std::vector<double> out;
    for (const TrialRecord &t : trials) {
        out.push_back(t.solved ? t.inlier_recall : 0.0);
    }
    return out;
}

double ErrorStats::full_recall_rate() const {
    if (trials.empty()) {
        return kNaN;
    }
    const auto full = std::count_if(trials.begin(), trials.end(),
                                    [](const TrialRecord &t) { return t.solved && t.inlier_recall == 1.0; });
    return static_cast<double>(full) / static_cast<double>(trials.size());
}

std::vector<TrialRecord> run_trials(int trials, int threads, const std::function<TrialRecord(int)> &fn) {
    std::vector<TrialRecord> out(static_cast<std::size_t>(std::max(0, trials)));
    const int workers = std::max(1, std::min(threads, trials));
    if (workers == 1) {
        for (int i = 0; i < trials; ++i) {
            out[i] = fn(i);
        }
        return out;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    std::exception_ptr error;
    std::atomic<bool> failed{false};
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            (void)w;
            for (int i = next++; i < trials && !failed; i = next++) {
                try {
                    out[i] = fn(i);
                } catch (...) {
                    if (!failed.exchange(true)) {
                        error = std::current_exception();
                    }
                }
            }
        });
    }
    for (std::thread &t : pool) {
        t.join();
    }
    if (error) {
        std::rethrow_exception(error);
    }
    return out;
}

std::uint64_t trial_seed(std::uint64_t master, std::uint64_t setting, std::uint64_t trial) {
    Rng rng = derive_rng(master, (setting << 32) ^ trial);
    return rng();
}

TrialRecord score_best_candidate(const SolverOutput &out, const RelativePose &truth) {
    TrialRecord rec;
    rec.inlier_recall = rec.inlier_precision = kNaN;
    rec.rot_err_deg = rec.trans_dir_err_deg = kNaN;
    double best = std::numeric_limits<double>::infinity();
    for (const PoseCandidate &cand : out.candidates) {
        const double err = rotation_error(truth.rotation, cand.pose.rotation);
        if (err < best) {
            best = err;
            rec.solved = true;
            rec.rot_err_deg = rad2deg(err);
            const auto terr = translation_direction_error(truth.translation, cand.pose.translation);
            rec.trans_dir_err_deg = terr ? rad2deg(*terr) : kNaN;
        }
    }
    return rec;
}

std::vector<ErrorStats> run_pixel_noise_sweep(const ExperimentOptions &opt, const std::vector<double> &levels_px) {
    std::vector<ErrorStats> results;
    for (std::size_t s = 0; s < levels_px.size(); ++s) {
        ScenarioConfig cfg = minimal_scenario(opt);
        cfg.pixel_noise_stdv = levels_px[s];
        results.push_back(minimal_sweep_setting(opt, levels_px[s], cfg, opt.solver));
    }
    return results;
}

std::vector<ErrorStats> run_attitude_noise_sweep(const ExperimentOptions &opt,
                                                 const std::vector<double> &levels_deg) {
    std::vector<ErrorStats> results;
    for (std::size_t s = 0; s < levels_deg.size(); ++s) {
        ScenarioConfig cfg = minimal_scenario(opt);
        cfg.attitude_noise_stdv = levels_deg[s];
        results.push_back(minimal_sweep_setting(opt, levels_deg[s], cfg, opt.solver));
    }
    return results;
}

std::vector<ErrorStats> run_rotation_sweep(const ExperimentOptions &opt, const std::vector<double> &angles_deg) {
    double max_angle = 0.0;
    for (double a : angles_deg) {
        max_angle = std::max(max_angle, a);
    }
    SolverOptions solver = opt.solver;
    solver.root_bound = std::max(solver.root_bound, 1.5 * deg2rad(max_angle));

    std::vector<ErrorStats> results;
    for (std::size_t s = 0; s < angles_deg.size(); ++s) {
        ScenarioConfig cfg = minimal_scenario(opt);
        cfg.yaw_deg = angles_deg[s];
        results.push_back(minimal_sweep_setting(opt, angles_deg[s], cfg, solver));
    }
    return results;
}

std::vector<ErrorStats> run_ransac_experiments(const ExperimentOptions &opt, const RansacExperimentParams &params) {
    std::vector<ErrorStats> results;
    for (std::size_t s = 0; s < params.outlier_ratios.size(); ++s) {
        const double ratio = params.outlier_ratios[s];
        RansacConfig rc;
        rc.inlier_threshold = params.inlier_threshold;
        rc.sampling = params.sampling;
        rc.solver = opt.solver;
        rc.confidence = params.confidence;
        rc.iterations = params.mode == RansacMode::kFixedIterations
                            ? params.iterations
                            : iteration_count(params.confidence, 1.0 - ratio, 4).count;

        ErrorStats stats;
        stats.setting = setting_label(ratio);
        stats.value = ratio;
        stats.iterations = *rc.iterations;
        stats.trials = run_trials(opt.trials, opt.threads, [&](int trial) {
            ScenarioConfig cfg = opt.scenario;
            cfg.outlier_ratio = ratio;
            cfg.seed = trial_seed(opt.scenario.seed, 0, static_cast<std::uint64_t>(trial));
            const SyntheticInstance inst = generate_instance(cfg);
            RansacConfig run = rc;
            run.seed = cfg.seed;
            const auto start = std::chrono::steady_clock::now();
            const RansacResult res = ransac_estimate(inst.correspondences, inst.rig, inst.noisy_prior, run);
            const auto stop = std::chrono::steady_clock::now();

            TrialRecord rec;
            rec.rot_err_deg = rec.trans_dir_err_deg = kNaN;
            rec.inlier_recall = rec.inlier_precision = kNaN;
            if (res.success) {
                rec.solved = true;
                rec.rot_err_deg = rad2deg(rotation_error(inst.true_pose.rotation, res.best_pose.rotation));
                const auto terr = translation_direction_error(inst.true_pose.translation, res.best_pose.translation);
                rec.trans_dir_err_deg = terr ? rad2deg(*terr) : kNaN;
                int truth = 0, selected = 0, hit = 0;
                for (std::size_t i = 0; i < inst.inlier_truth.size(); ++i) {
                    truth += inst.inlier_truth[i];
                    selected += res.inlier_mask[i];
                    hit += inst.inlier_truth[i] && res.inlier_mask[i];
                }
                rec.inlier_recall = truth ? static_cast<double>(hit) / truth : kNaN;
                rec.inlier_precision = selected ? static_cast<double>(hit) / selected : kNaN;
            }
            if (opt.record_timing) {
                rec.runtime_ns = std::chrono::duration_cast<std::chrono::nanoseconds>(stop - start).count();
            }
            return rec;
        });
        results.push_back(std::move(stats));
    }
    return results;
}

TimingStats run_timing_bench(int trials, std::uint64_t seed, const ScenarioConfig &scenario) {
    ScenarioConfig cfg = scenario;
    cfg.num_points = 4;
    cfg.outlier_ratio = 0.0;
    std::vector<SyntheticInstance> instances;
    instances.reserve(static_cast<std::size_t>(trials));
    for (int i = 0; i < trials; ++i) {
        cfg.seed = trial_seed(seed, 0, static_cast<std::uint64_t>(i));
        instances.push_back(generate_instance(cfg));
    }

    TimingStats stats;
    // Warm-up pass.
    for (const SyntheticInstance &inst : instances) {
        const SolverOutput out = four_point_solve(std::span<const Correspondence, 4>(inst.correspondences.data(), 4),
                                                  inst.rig, inst.noisy_prior);
        stats.zero_candidate += out.candidates.empty();
    }

    stats.samples_ns.reserve(instances.size());
    std::size_t sink = 0;
    double per_candidate_sum = 0.0;
    std::size_t with_candidates = 0;
    const auto total_start = std::chrono::steady_clock::now();
    for (const SyntheticInstance &inst : instances) {
        const auto start = std::chrono::steady_clock::now();
        const SolverOutput out = four_point_solve(std::span<const Correspondence, 4>(inst.correspondences.data(), 4),
                                                  inst.rig, inst.noisy_prior);
        const auto stop = std::chrono::steady_clock::now();
        sink += out.candidates.size();
        const double ns =
            static_cast<double>(std::chrono::duration_cast<std::chrono::nanoseconds>(stop - start).count());
        stats.samples_ns.push_back(ns);
        if (!out.candidates.empty()) {
            per_candidate_sum += ns / static_cast<double>(out.candidates.size());
            ++with_candidates;
        }
    }
    const auto total_stop = std::chrono::steady_clock::now();
    (void)sink;

    stats.solves = instances.size();
    const Quantiles q = summarize(stats.samples_ns);
    stats.mean_ns = q.mean;
    stats.median_ns = q.median;
    stats.max_ns = q.max;
    std::vector<double> sorted = stats.samples_ns;
    std::sort(sorted.begin(), sorted.end());
    stats.p99_ns = sorted.empty() ? kNaN : quantile_sorted(sorted, 0.99);
    const double seconds = std::chrono::duration<double>(total_stop - total_start).count();
    stats.per_candidate_ns = with_candidates > 0 ? per_candidate_sum / static_cast<double>(with_candidates) : kNaN;
    stats.solves_per_second = seconds > 0.0 ? static_cast<double>(stats.solves) / seconds : kNaN;
    return stats;
}

void write_trials_csv(std::ostream &out, const std::vector<ErrorStats> &results) {
    out << "setting,trial,rot_err_deg,trans_dir_err_deg,inlier_recall,inlier_precision,runtime_ns\n";
    for (const ErrorStats &s : results) {
        for (std::size_t i = 0; i < s.trials.size(); ++i) {
            const TrialRecord &t = s.trials[i];
            out << s.setting << ',' << i << ',' << format_value(t.rot_err_deg) << ','
                << format_value(t.trans_dir_err_deg) << ',' << format_value(t.inlier_recall) << ','
                << format_value(t.inlier_precision) << ',' << t.runtime_ns << '\n';
        }
    }
}

void write_summary_csv(std::ostream &out, const std::vector<ErrorStats> &results) {
    out << "setting,trials,failures,iterations,"
           "rot_err_deg_mean,rot_err_deg_median,rot_err_deg_q25,rot_err_deg_q75,rot_err_deg_q90,rot_err_deg_max,"
           "trans_dir_err_deg_mean,trans_dir_err_deg_median,trans_dir_err_deg_q25,trans_dir_err_deg_q75,"
           "trans_dir_err_deg_q90,trans_dir_err_deg_max,inlier_recall_mean,full_recall_rate,inlier_precision_mean\n";
    for (const ErrorStats &s : results) {
        const Quantiles r = summarize(s.rotation_errors_deg());
        const Quantiles t = summarize(s.translation_errors_deg());
        std::vector<double> precision;
        for (const TrialRecord &tr : s.trials) {
            precision.push_back(tr.inlier_precision);
        }
        const bool has_recall = std::any_of(s.trials.begin(), s.trials.end(),
                                            [](const TrialRecord &tr) { return std::isfinite(tr.inlier_recall); });
        const double recall_mean = has_recall ? summarize(s.recalls()).mean : kNaN;
        const double full_rate = has_recall ? s.full_recall_rate() : kNaN;
        out << s.setting << ',' << s.trials.size() << ',' << s.failures() << ',' << s.iterations;
        for (const Quantiles *q : {&r, &t}) {
            out << ',' << format_value(q->mean) << ',' << format_value(q->median) << ',' << format_value(q->q25)
                << ',' << format_value(q->q75) << ',' << format_value(q->q90) << ',' << format_value(q->max);
        }
        out << ',' << format_value(recall_mean) << ',' << format_value(full_rate) << ','
            << format_value(summarize(precision).mean) << '\n';
    }
}

void write_timing_csv(std::ostream &out, const TimingStats &stats) {
    out << "solves,zero_candidate,mean_ns,median_ns,p99_ns,max_ns,solves_per_second,per_candidate_ns\n";
    out << stats.solves << ',' << stats.zero_candidate << ',' << format_value(stats.mean_ns) << ','
        << format_value(stats.median_ns) << ',' << format_value(stats.p99_ns) << ',' << format_value(stats.max_ns)
        << ',' << format_value(stats.solves_per_second) << ',' << format_value(stats.per_candidate_ns) << '\n';
}

}  // namespace gcpose
