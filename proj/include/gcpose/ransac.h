#ifndef GCPOSE_RANSAC_H_
#define GCPOSE_RANSAC_H_

#include "gcpose/four_point.h"
#include "gcpose/types.h"

#include <array>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

namespace gcpose {

struct IterationPlan {
    long count = 0;
    bool capped = false;
};

inline constexpr long kDefaultIterationCap = 100000;

// k = ceil(ln(1 - p) / ln(1 - w^n)), clamped to [1, cap].
IterationPlan iteration_count(double confidence, double inlier_ratio, int sample_size, long cap = kDefaultIterationCap);

struct ResidualResult {
    double angle = 0.0;     // rad
    bool fallback = false;  // near-parallel rays, epipolar-plane angle used instead
};

// Angular reprojection residual of a correspondence under a pose. The frame-1 ray is moved
// into frame-0 rig coordinates and both rays are triangulated to the midpoint of their common
// perpendicular; the residual is the larger of the two angles between an observed ray and
// the direction from its camera center to that midpoint.
ResidualResult residual_angle(const RelativePose &pose, const Correspondence &c, const RigCalibration &rig);

// Which 4-subsets count as valid minimal samples. A sample is valid when at least
// `min_cameras` distinct cameras each contribute `min_per_camera` or more of its points.
// `single_camera` instead requires all four points to come from one camera.
struct SamplingRule {
    int min_cameras = 2;
    int min_per_camera = 1;
    bool single_camera = false;

    static SamplingRule cross_camera() { return {}; }
    static SamplingRule distinct_cameras(int n) { return {n, 1, false}; }
    static SamplingRule unconstrained() { return {1, 1, false}; }
    static SamplingRule one_camera() { return {1, 1, true}; }

    bool accepts(std::span<const int> sample_cameras) const;
};

class InsufficientCameraDiversity : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

using Rng = std::mt19937_64;

// Independent generator for stream `index` of a master seed.
Rng derive_rng(std::uint64_t seed, std::uint64_t index);

// Four distinct indices into `camera_of` (camera index per correspondence) that satisfy
// `rule`, drawn uniformly over all valid 4-subsets by rejection sampling. Throws
// InsufficientCameraDiversity when no valid subset exists.
std::array<int, 4> preemptive_sample(std::span<const int> camera_of, const SamplingRule &rule, Rng &rng);

struct RansacConfig {
    double confidence = 0.9999;
    double inlier_threshold = 1.745329251994e-3;  // rad, 0.1 deg
    std::optional<long> iterations;               // fixed count; adaptive when empty
    long max_iterations = kDefaultIterationCap;
    SamplingRule sampling = SamplingRule::cross_camera();
    SolverOptions solver;
    std::uint64_t seed = 0;

    void validate() const;
};

struct RansacResult {
    bool success = false;  // false when no sample produced a candidate
    RelativePose best_pose;
    double best_yaw = 0.0;
    std::vector<bool> inlier_mask;
    long iterations_run = 0;
    int best_inlier_count = 0;
    double best_residual_sum = 0.0;
    long hypotheses_scored = 0;
    bool iteration_cap_hit = false;
};

// Hypothesize-and-verify over preemptive samples. Every candidate of every sample is scored;
// the pose with the most inliers wins, ties go to the smaller summed inlier residual and then
// to the earlier hypothesis. Iteration i draws from derive_rng(seed, i), so the result depends
// only on the inputs and the seed.
RansacResult ransac_estimate(std::span<const Correspondence> correspondences, const RigCalibration &rig,
                             const AttitudePrior &prior, const RansacConfig &config);

}  // namespace gcpose

#endif  // GCPOSE_RANSAC_H_
