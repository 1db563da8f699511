#ifndef GCPOSE_EXPERIMENTS_H_
#define GCPOSE_EXPERIMENTS_H_

#include "gcpose/four_point.h"
#include "gcpose/ransac.h"
#include "gcpose/synthetic.h"

#include <cstdint>
#include <functional>
#include <ostream>
#include <string>
#include <vector>

namespace gcpose {

// One row of the per-trial CSV. Angles in degrees; NaN where not applicable.
struct TrialRecord {
    bool solved = false;
    double rot_err_deg = 0.0;
    double trans_dir_err_deg = 0.0;
    double inlier_recall = 0.0;
    double inlier_precision = 0.0;
    long runtime_ns = 0;
};

struct Quantiles {
    std::size_t count = 0;
    double mean = 0.0;
    double median = 0.0;
    double q25 = 0.0;
    double q75 = 0.0;
    double q90 = 0.0;
    double max = 0.0;
};

// Linear-interpolation quantiles of the finite values; all-NaN when there are none.
Quantiles summarize(std::vector<double> values);

// Per-setting errors of one experiment.
struct ErrorStats {
    std::string setting;   // printable setting value, e.g. "2" (px) or "0.7" (outlier ratio)
    double value = 0.0;
    long iterations = 0;   // RANSAC iterations per run, 0 for minimal-solver sweeps
    std::vector<TrialRecord> trials;

    std::size_t failures() const;
    std::vector<double> rotation_errors_deg() const;   // solved trials only
    std::vector<double> translation_errors_deg() const;
    std::vector<double> recalls() const;
    double full_recall_rate() const;  // fraction of trials with recall == 1
};

struct ExperimentOptions {
    ScenarioConfig scenario;
    int trials = 1000;
    int threads = 1;
    bool record_timing = false;  // runtime_ns stays 0 otherwise, keeping CSVs reproducible
    SolverOptions solver;
};

// Runs fn(trial) for trial in [0, trials) on up to `threads` threads. Results are stored
// by index, so the output does not depend on scheduling.
std::vector<TrialRecord> run_trials(int trials, int threads, const std::function<TrialRecord(int)> &fn);

// Scenario seed of trial `trial` in setting `setting` of a master seed.
std::uint64_t trial_seed(std::uint64_t master, std::uint64_t setting, std::uint64_t trial);

// Candidate of a solver output closest to the ground truth rotation, scored as a TrialRecord.
TrialRecord score_best_candidate(const SolverOutput &out, const RelativePose &truth);

// Minimal-solver sweeps on inlier-only 4-point instances.
std::vector<ErrorStats> run_pixel_noise_sweep(const ExperimentOptions &opt, const std::vector<double> &levels_px);
std::vector<ErrorStats> run_attitude_noise_sweep(const ExperimentOptions &opt,
                                                 const std::vector<double> &levels_deg);
std::vector<ErrorStats> run_rotation_sweep(const ExperimentOptions &opt, const std::vector<double> &angles_deg);

enum class RansacMode { kFixedConfidence, kFixedIterations };

struct RansacExperimentParams {
    RansacMode mode = RansacMode::kFixedIterations;
    std::vector<double> outlier_ratios{0.5, 0.6, 0.7, 0.8, 0.9};
    long iterations = 500;       // fixed-iterations mode
    double confidence = 0.9999;  // fixed-confidence mode, with w = 1 - outlier ratio
    double inlier_threshold = 1.745329251994e-3;
    SamplingRule sampling = SamplingRule::cross_camera();
};

std::vector<ErrorStats> run_ransac_experiments(const ExperimentOptions &opt, const RansacExperimentParams &params);

struct TimingStats {
    std::size_t solves = 0;
    std::size_t zero_candidate = 0;  // instances without any candidate
    double mean_ns = 0.0;
    double median_ns = 0.0;
    double p99_ns = 0.0;
    double max_ns = 0.0;
    double solves_per_second = 0.0;
    double per_candidate_ns = 0.0;   // mean of latency / candidates over solves with candidates
    std::vector<double> samples_ns;  // per-solve latency of the timed loop
};

TimingStats run_timing_bench(int trials, std::uint64_t seed, const ScenarioConfig &scenario = {});

// setting,trial,rot_err_deg,trans_dir_err_deg,inlier_recall,inlier_precision,runtime_ns
void write_trials_csv(std::ostream &out, const std::vector<ErrorStats> &results);
void write_summary_csv(std::ostream &out, const std::vector<ErrorStats> &results);
void write_timing_csv(std::ostream &out, const TimingStats &stats);

}  // namespace gcpose

#endif  // GCPOSE_EXPERIMENTS_H_
