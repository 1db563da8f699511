// Command-line front end: single-instance solving and the synthetic experiment drivers.
//
// Exit codes: 0 success, 1 I/O or internal error, 2 parse error, 3 precondition error,
// 4 no solution.

#include "gcpose/experiments.h"
#include "gcpose/four_point.h"
#include "gcpose/geometry.h"
#include "gcpose/io.h"
#include "gcpose/ransac.h"
#include "gcpose/synthetic.h"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

using namespace gcpose;

enum ExitCode { kOk = 0, kIoError = 1, kParseError = 2, kPreconditionError = 3, kNoSolution = 4 };

class PreconditionError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct Options {
    std::string config_path;
    std::string out_dir;
    std::optional<std::uint64_t> seed;
    std::optional<int> threads;
    std::optional<int> trials;
    std::optional<long> iterations;
    std::optional<double> confidence;
    std::optional<double> threshold_deg;
    std::optional<double> root_bound_deg;
    std::optional<int> min_cameras;
    std::optional<int> min_per_camera;
    bool single_camera = false;
    std::vector<double> levels;
    std::string mode = "fixed-iterations";
    bool record_timing = false;

    // solve / ransac
    std::string rig_path;
    std::string matches_path;
    double roll0_deg = 0.0, pitch0_deg = 0.0, roll1_deg = 0.0, pitch1_deg = 0.0;
};

// Settings after merging subcommand defaults, the config file and flags (in that order).
struct Settings {
    ScenarioConfig scenario;
    int trials = 1000;
    int threads = 1;
    std::vector<double> levels;
    long iterations = 500;
    double confidence = 0.9999;
    double threshold_deg = 0.1;
    double root_bound_deg = rad2deg(kDefaultRootBound);
    SamplingRule sampling = SamplingRule::cross_camera();
    bool iterations_set = false;
};

void apply_config_file(const std::string &path, Settings &s) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open config " + path);
    }
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error &e) {
        throw ParseError("config " + path + ": " + e.what());
    }
    if (!j.is_object()) {
        throw ParseError("config " + path + ": expected a JSON object");
    }
    ScenarioConfig &c = s.scenario;
    for (const auto &[key, value] : j.items()) {
        try {
            if (key == "num_cameras") c.num_cameras = value.get<int>();
            else if (key == "baseline") c.baseline = value.get<double>();
            else if (key == "num_points") c.num_points = value.get<int>();
            else if (key == "rotation_max_deg") c.rotation_max_deg = value.get<double>();
            else if (key == "yaw_deg") c.yaw_deg = value.is_null() ? std::nullopt : std::optional<double>(value.get<double>());
            else if (key == "tilt_max_deg") c.tilt_max_deg = value.get<double>();
            else if (key == "tilt_change_deg") c.tilt_change_deg = value.get<double>();
            else if (key == "translation_norm") c.translation_norm = value.get<double>();
            else if (key == "pixel_noise_stdv") c.pixel_noise_stdv = value.get<double>();
            else if (key == "attitude_noise_stdv") c.attitude_noise_stdv = value.get<double>();
            else if (key == "outlier_ratio") c.outlier_ratio = value.get<double>();
            else if (key == "outlier_model") c.outlier_model = outlier_model_from_string(value.get<std::string>());
            else if (key == "object_yaw_min_deg") c.object_yaw_min_deg = value.get<double>();
            else if (key == "object_yaw_max_deg") c.object_yaw_max_deg = value.get<double>();
            else if (key == "focal") c.focal = value.get<double>();
            else if (key == "image_width") c.image_width = value.get<int>();
            else if (key == "image_height") c.image_height = value.get<int>();
            else if (key == "depth_min") c.depth_min = value.get<double>();
            else if (key == "depth_max") c.depth_max = value.get<double>();
            else if (key == "seed") c.seed = value.get<std::uint64_t>();
            else if (key == "trials") s.trials = value.get<int>();
            else if (key == "threads") s.threads = value.get<int>();
            else if (key == "levels") s.levels = value.get<std::vector<double>>();
            else if (key == "iterations") { s.iterations = value.get<long>(); s.iterations_set = true; }
            else if (key == "confidence") s.confidence = value.get<double>();
            else if (key == "threshold_deg") s.threshold_deg = value.get<double>();
            else if (key == "root_bound_deg") s.root_bound_deg = value.get<double>();
            else if (key == "min_cameras") s.sampling.min_cameras = value.get<int>();
            else if (key == "min_per_camera") s.sampling.min_per_camera = value.get<int>();
            else throw ParseError("config " + path + ": unknown key \"" + key + "\"");
        } catch (const nlohmann::json::exception &e) {
            throw ParseError("config " + path + ": bad value for \"" + key + "\": " + e.what());
        } catch (const std::invalid_argument &e) {
            throw ParseError("config " + path + ": " + e.what());
        }
    }
}

Settings resolve(const std::string &command, const Options &o) {
    Settings s;
    ScenarioConfig &c = s.scenario;
    if (command == "sweep-pixel-noise") {
        c.yaw_deg = 1.0;
        s.levels = {0, 1, 2, 3, 4, 5};
    } else if (command == "sweep-attitude-noise") {
        c.yaw_deg = 1.0;
        s.levels = {0, 0.1, 0.2, 0.3, 0.4, 0.5};
    } else if (command == "sweep-rotation") {
        s.levels = {0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    } else if (command == "ransac-outliers") {
        s.trials = 100;
        c.pixel_noise_stdv = 1.0;
        c.attitude_noise_stdv = 0.5;
        c.num_points = 100;
        s.levels = o.mode == "fixed-confidence" ? std::vector<double>{0.5} : std::vector<double>{0.5, 0.6, 0.7, 0.8, 0.9};
    } else if (command == "bench-timing") {
        s.trials = 10000;
    }

    if (!o.config_path.empty()) {
        apply_config_file(o.config_path, s);
    }
    if (o.seed) c.seed = *o.seed;
    if (o.threads) s.threads = *o.threads;
    if (o.trials) s.trials = *o.trials;
    if (o.iterations) { s.iterations = *o.iterations; s.iterations_set = true; }
    if (o.confidence) s.confidence = *o.confidence;
    if (o.threshold_deg) s.threshold_deg = *o.threshold_deg;
    if (o.root_bound_deg) s.root_bound_deg = *o.root_bound_deg;
    if (o.min_cameras) s.sampling.min_cameras = *o.min_cameras;
    if (o.min_per_camera) s.sampling.min_per_camera = *o.min_per_camera;
    if (o.single_camera) s.sampling = SamplingRule::one_camera();
    if (!o.levels.empty()) s.levels = o.levels;

    if (s.trials < 1 || s.threads < 1) {
        throw PreconditionError("--trials and --threads must be positive");
    }
    c.validate();
    return s;
}

std::ofstream open_output(const std::filesystem::path &path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write " + path.string());
    }
    return out;
}

void write_results(const Options &o, const std::vector<ErrorStats> &results) {
    if (o.out_dir.empty()) {
        write_summary_csv(std::cout, results);
        return;
    }
    std::error_code ec;
    std::filesystem::create_directories(o.out_dir, ec);
    if (ec) {
        throw std::runtime_error("cannot create output directory " + o.out_dir + ": " + ec.message());
    }
    std::ofstream trials = open_output(std::filesystem::path(o.out_dir) / "trials.csv");
    write_trials_csv(trials, results);
    std::ofstream summary = open_output(std::filesystem::path(o.out_dir) / "summary.csv");
    write_summary_csv(summary, results);
    if (!trials || !summary) {
        throw std::runtime_error("failed writing results to " + o.out_dir);
    }
}

std::string fmt(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

void print_pose(std::ostream &os, const RelativePose &pose) {
    os << "R";
    for (int k = 0; k < 9; ++k) {
        os << ' ' << fmt(pose.rotation(k / 3, k % 3));
    }
    os << "\nt " << fmt(pose.translation.x()) << ' ' << fmt(pose.translation.y()) << ' '
       << fmt(pose.translation.z()) << '\n';
}

struct Inputs {
    RigCalibration rig;
    std::vector<Correspondence> matches;
    AttitudePrior prior;
};

Inputs load_inputs(const Options &o) {
    RigCalibration rig = read_rig_file(o.rig_path);
    std::vector<Correspondence> matches = read_correspondences_file(o.matches_path);
    for (std::size_t i = 0; i < matches.size(); ++i) {
        if (!rig.valid_index(matches[i].camera0) || !rig.valid_index(matches[i].camera1)) {
            throw PreconditionError("correspondence " + std::to_string(i + 1) + " references a camera outside the rig");
        }
    }
    const AttitudePrior prior =
        attitude_from_angles(deg2rad(o.roll0_deg), deg2rad(o.pitch0_deg), deg2rad(o.roll1_deg), deg2rad(o.pitch1_deg));
    return Inputs{std::move(rig), std::move(matches), prior};
}

int cmd_solve(const Options &o) {
    const Inputs in = load_inputs(o);
    if (in.matches.size() < 4) {
        throw PreconditionError("need 4 correspondences for the minimal solver, got " +
                                std::to_string(in.matches.size()));
    }
    if (in.matches.size() > 4) {
        std::cerr << "note: " << in.matches.size()
                  << " correspondences given; solving with the first 4 (use `ransac` for robust estimation)\n";
    }
    SolverOptions solver;
    if (o.root_bound_deg) {
        solver.root_bound = deg2rad(*o.root_bound_deg);
    }
    const SolverOutput out =
        four_point_solve(std::span<const Correspondence, 4>(in.matches.data(), 4), in.rig, in.prior, solver);
    std::cout << "candidates " << out.candidates.size() << '\n';
    for (std::size_t i = 0; i < out.candidates.size(); ++i) {
        const PoseCandidate &c = out.candidates[i];
        std::cout << "candidate " << i << '\n'
                  << "yaw_rad " << fmt(c.yaw) << '\n'
                  << "conditioning " << fmt(c.conditioning) << '\n'
                  << "degenerate " << (c.degenerate ? 1 : 0) << '\n';
        print_pose(std::cout, c.pose);
    }
    return out.candidates.empty() ? kNoSolution : kOk;
}

int cmd_ransac(const std::string &command, const Options &o) {
    const Settings s = resolve(command, o);
    const Inputs in = load_inputs(o);
    RansacConfig rc;
    rc.confidence = s.confidence;
    rc.inlier_threshold = deg2rad(s.threshold_deg);
    if (s.iterations_set) {
        rc.iterations = s.iterations;
    }
    rc.sampling = s.sampling;
    rc.solver.root_bound = deg2rad(s.root_bound_deg);
    rc.seed = s.scenario.seed;
    const RansacResult res = ransac_estimate(in.matches, in.rig, in.prior, rc);
    if (!res.success) {
        std::cout << "no solution after " << res.iterations_run << " iterations\n";
        return kNoSolution;
    }
    std::cout << "iterations " << res.iterations_run << '\n'
              << "inliers " << res.best_inlier_count << " / " << in.matches.size() << '\n'
              << "yaw_rad " << fmt(res.best_yaw) << '\n';
    print_pose(std::cout, res.best_pose);
    std::cout << "mask ";
    for (bool b : res.inlier_mask) {
        std::cout << (b ? '1' : '0');
    }
    std::cout << '\n';
    return kOk;
}

int cmd_experiment(const std::string &command, const Options &o) {
    const Settings s = resolve(command, o);
    ExperimentOptions opt;
    opt.scenario = s.scenario;
    opt.trials = s.trials;
    opt.threads = s.threads;
    opt.record_timing = o.record_timing;
    opt.solver.root_bound = deg2rad(s.root_bound_deg);

    if (command == "bench-timing") {
        const TimingStats t = run_timing_bench(s.trials, s.scenario.seed, s.scenario);
        if (o.out_dir.empty()) {
            write_timing_csv(std::cout, t);
        } else {
            std::filesystem::create_directories(o.out_dir);
            std::ofstream out = open_output(std::filesystem::path(o.out_dir) / "timing.csv");
            write_timing_csv(out, t);
        }
        return kOk;
    }

    std::vector<ErrorStats> results;
    if (command == "sweep-pixel-noise") {
        results = run_pixel_noise_sweep(opt, s.levels);
    } else if (command == "sweep-attitude-noise") {
        results = run_attitude_noise_sweep(opt, s.levels);
    } else if (command == "sweep-rotation") {
        results = run_rotation_sweep(opt, s.levels);
    } else {
        RansacExperimentParams p;
        if (o.mode == "fixed-confidence") {
            p.mode = RansacMode::kFixedConfidence;
        } else if (o.mode == "fixed-iterations") {
            p.mode = RansacMode::kFixedIterations;
        } else {
            throw ParseError("unknown --mode \"" + o.mode + "\"");
        }
        p.outlier_ratios = s.levels;
        p.iterations = s.iterations;
        p.confidence = s.confidence;
        p.inlier_threshold = deg2rad(s.threshold_deg);
        p.sampling = s.sampling;
        results = run_ransac_experiments(opt, p);
    }
    write_results(o, results);
    return kOk;
}

void add_common(CLI::App *sub, Options &o) {
    sub->add_option("--config", o.config_path, "JSON file with flat overrides");
    sub->add_option("--out", o.out_dir, "Output directory for CSV files");
    sub->add_option("--seed", o.seed, "Master seed");
    sub->add_option("--threads", o.threads, "Maximum worker threads");
    sub->add_option("--trials", o.trials, "Trials per setting");
    sub->add_option("--iterations", o.iterations, "Fixed RANSAC iteration count");
    sub->add_option("--confidence", o.confidence, "RANSAC confidence p");
    sub->add_option("--threshold-deg", o.threshold_deg, "Inlier threshold in degrees");
    sub->add_option("--root-bound-deg", o.root_bound_deg, "Largest accepted |yaw| root in degrees");
}

void add_inputs(CLI::App *sub, Options &o) {
    sub->add_option("--rig", o.rig_path, "Rig calibration JSON")->required();
    sub->add_option("--matches", o.matches_path, "Correspondences, JSON lines")->required();
    sub->add_option("--roll0-deg", o.roll0_deg, "Frame-0 roll");
    sub->add_option("--pitch0-deg", o.pitch0_deg, "Frame-0 pitch");
    sub->add_option("--roll1-deg", o.roll1_deg, "Frame-1 roll");
    sub->add_option("--pitch1-deg", o.pitch1_deg, "Frame-1 pitch");
}

void add_sampling(CLI::App *sub, Options &o) {
    sub->add_option("--min-cameras", o.min_cameras, "Cameras that must each contribute to a sample");
    sub->add_option("--min-per-camera", o.min_per_camera, "Points each of those cameras contributes");
    sub->add_flag("--single-camera", o.single_camera, "Draw all four points from one camera");
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"Four-point relative pose for multi-camera rigs with a known vertical direction"};
    app.require_subcommand(1, 1);
    Options o;

    CLI::App *solve = app.add_subcommand("solve", "Minimal solve on the first four correspondences");
    add_inputs(solve, o);
    solve->add_option("--root-bound-deg", o.root_bound_deg, "Largest accepted |yaw| root in degrees");

    CLI::App *ransac = app.add_subcommand("ransac", "Robust estimate over all correspondences");
    add_inputs(ransac, o);
    add_common(ransac, o);
    add_sampling(ransac, o);

    for (const char *name : {"sweep-pixel-noise", "sweep-attitude-noise", "sweep-rotation"}) {
        CLI::App *sub = app.add_subcommand(name, "Minimal-solver accuracy sweep");
        add_common(sub, o);
        sub->add_option("--levels", o.levels, "Setting values");
        sub->add_flag("--record-timing", o.record_timing, "Fill the runtime_ns column");
    }
    CLI::App *outliers = app.add_subcommand("ransac-outliers", "RANSAC sweep over outlier ratios");
    add_common(outliers, o);
    add_sampling(outliers, o);
    outliers->add_option("--ratios", o.levels, "Outlier ratios");
    outliers->add_option("--mode", o.mode, "fixed-iterations or fixed-confidence");
    outliers->add_flag("--record-timing", o.record_timing, "Fill the runtime_ns column");

    CLI::App *bench = app.add_subcommand("bench-timing", "Latency of the minimal solver");
    add_common(bench, o);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kParseError;
    }

    const std::string command = app.get_subcommands().front()->get_name();
    try {
        if (command == "solve") {
            return cmd_solve(o);
        }
        if (command == "ransac") {
            return cmd_ransac(command, o);
        }
        return cmd_experiment(command, o);
    } catch (const ParseError &e) {
        std::cerr << "parse error: " << e.what() << '\n';
        return kParseError;
    } catch (const PreconditionError &e) {
        std::cerr << "precondition error: " << e.what() << '\n';
        return kPreconditionError;
    } catch (const InsufficientCameraDiversity &e) {
        std::cerr << "precondition error: " << e.what() << '\n';
        return kPreconditionError;
    } catch (const std::invalid_argument &e) {
        std::cerr << "precondition error: " << e.what() << '\n';
        return kPreconditionError;
    } catch (const std::out_of_range &e) {
        std::cerr << "precondition error: " << e.what() << '\n';
        return kPreconditionError;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << '\n';
        return kIoError;
    }
}
