#include "gcpose/ransac.h"

#include "gcpose/geometry.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

namespace gcpose {

IterationPlan iteration_count(double confidence, double inlier_ratio, int sample_size, long cap) {
    if (!(confidence > 0.0 && confidence < 1.0)) {
        throw std::invalid_argument("confidence must lie in (0, 1)");
    }
    if (!(inlier_ratio > 0.0 && inlier_ratio <= 1.0)) {
        throw std::invalid_argument("inlier ratio must lie in (0, 1]");
    }
    if (sample_size < 1 || cap < 1) {
        throw std::invalid_argument("sample size and iteration cap must be positive");
    }
    const double all_inlier = std::pow(inlier_ratio, sample_size);
    if (all_inlier >= 1.0) {
        return {1, false};
    }
    const double denom = std::log1p(-all_inlier);
    if (denom == 0.0) {
        return {cap, true};
    }
    const double k = std::ceil(std::log1p(-confidence) / denom);
    if (!(k < static_cast<double>(cap))) {
        return {cap, k > static_cast<double>(cap)};
    }
    return {std::max(1L, static_cast<long>(k)), false};
}

namespace {

double angle_between(const Vec3 &a, const Vec3 &b) { return std::atan2(a.cross(b).norm(), a.dot(b)); }

}  // namespace

ResidualResult residual_angle(const RelativePose &pose, const Correspondence &c, const RigCalibration &rig) {
    const CameraExtrinsics &cam0 = rig.camera(c.camera0);
    const CameraExtrinsics &cam1 = rig.camera(c.camera1);

    const Vec3 o0 = cam0.offset;
    const Vec3 d0 = (cam0.rotation * c.bearing0).normalized();
    // Frame-1 ray in frame-0 rig coordinates: X0 = R^T (X1 - t).
    const Vec3 o1 = pose.rotation.transpose() * (cam1.offset - pose.translation);
    const Vec3 d1 = (pose.rotation.transpose() * (cam1.rotation * c.bearing1)).normalized();

    const Vec3 w = o0 - o1;
    const double b = d0.dot(d1);
    const double denom = 1.0 - b * b;
    if (denom < 1e-12) {
        // Angle between the frame-1 ray and the plane spanned by ray 0 and the frame-1 center.
        const Vec3 normal = d0.cross(o1 - o0);
        const double nn = normal.norm();
        if (nn == 0.0) {
            return {angle_between(d0, d1), true};
        }
        return {std::asin(std::min(1.0, std::abs(normal.dot(d1)) / nn)), true};
    }
    const double dw0 = d0.dot(w), dw1 = d1.dot(w);
    const double s = (b * dw1 - dw0) / denom;
    const double u = (dw1 - b * dw0) / denom;
    const Vec3 midpoint = 0.5 * ((o0 + s * d0) + (o1 + u * d1));
    const double e0 = angle_between(d0, midpoint - o0);
    const double e1 = angle_between(d1, midpoint - o1);
    return {std::max(e0, e1), false};
}

bool SamplingRule::accepts(std::span<const int> sample_cameras) const {
    std::map<int, int> count;
    for (int cam : sample_cameras) {
        ++count[cam];
    }
    if (single_camera) {
        return count.size() == 1;
    }
    int qualifying = 0;
    for (const auto &[cam, n] : count) {
        if (n >= min_per_camera) {
            ++qualifying;
        }
    }
    return qualifying >= min_cameras;
}

Rng derive_rng(std::uint64_t seed, std::uint64_t index) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
    return Rng(seq);
}

namespace {

void check_sampling_feasible(std::span<const int> camera_of, const SamplingRule &rule) {
    if (camera_of.size() < 4) {
        throw std::invalid_argument("need at least 4 correspondences, got " + std::to_string(camera_of.size()));
    }
    if (rule.min_cameras < 1 || rule.min_per_camera < 1 || rule.min_cameras * rule.min_per_camera > 4) {
        throw std::invalid_argument("sampling rule cannot be met by a 4-point sample");
    }
    std::map<int, int> count;
    for (int cam : camera_of) {
        ++count[cam];
    }
    int qualifying = 0;
    for (const auto &[cam, n] : count) {
        if (rule.single_camera ? n >= 4 : n >= rule.min_per_camera) {
            ++qualifying;
        }
    }
    if (qualifying < (rule.single_camera ? 1 : rule.min_cameras)) {
        throw InsufficientCameraDiversity("insufficient camera diversity: " + std::to_string(count.size()) +
                                          " camera(s) cannot satisfy the sampling rule");
    }
}

}  // namespace

std::array<int, 4> preemptive_sample(std::span<const int> camera_of, const SamplingRule &rule, Rng &rng) {
    check_sampling_feasible(camera_of, rule);
    std::uniform_int_distribution<int> pick(0, static_cast<int>(camera_of.size()) - 1);
    constexpr long kMaxAttempts = 10'000'000;
    for (long attempt = 0; attempt < kMaxAttempts; ++attempt) {
        std::array<int, 4> sample{};
        for (int k = 0; k < 4; ++k) {
            int idx = 0;
            do {
                idx = pick(rng);
            } while (std::find(sample.begin(), sample.begin() + k, idx) != sample.begin() + k);
            sample[k] = idx;
        }
        const std::array<int, 4> cams{camera_of[sample[0]], camera_of[sample[1]], camera_of[sample[2]],
                                      camera_of[sample[3]]};
        if (rule.accepts(cams)) {
            return sample;
        }
    }
    throw std::runtime_error("preemptive_sample: rejection sampling did not find a valid sample");
}

void RansacConfig::validate() const {
    if (!(confidence > 0.0 && confidence < 1.0)) {
        throw std::invalid_argument("confidence must lie in (0, 1)");
    }
    if (!(inlier_threshold > 0.0)) {
        throw std::invalid_argument("inlier threshold must be positive");
    }
    if (sampling.min_cameras < 1) {
        throw std::invalid_argument("min_distinct_cameras must be >= 1");
    }
    if (iterations && *iterations < 1) {
        throw std::invalid_argument("fixed iteration count must be positive");
    }
    if (max_iterations < 1) {
        throw std::invalid_argument("iteration cap must be positive");
    }
}

RansacResult ransac_estimate(std::span<const Correspondence> correspondences, const RigCalibration &rig,
                             const AttitudePrior &prior, const RansacConfig &config) {
    config.validate();
    const std::size_t n = correspondences.size();
    std::vector<int> camera_of(n);
    for (std::size_t i = 0; i < n; ++i) {
        camera_of[i] = correspondences[i].camera0;
    }
    check_sampling_feasible(camera_of, config.sampling);

    RansacResult result;
    result.inlier_mask.assign(n, false);

    long budget = config.iterations ? *config.iterations : config.max_iterations;
    std::vector<double> residuals(n);
    long it = 0;
    for (; it < budget; ++it) {
        Rng rng = derive_rng(config.seed, static_cast<std::uint64_t>(it));
        const std::array<int, 4> idx = preemptive_sample(camera_of, config.sampling, rng);
        const std::array<Correspondence, 4> sample{correspondences[idx[0]], correspondences[idx[1]],
                                                   correspondences[idx[2]], correspondences[idx[3]]};
        const SolverOutput out = four_point_solve(sample, rig, prior, config.solver);

        bool improved = false;
        for (const PoseCandidate &cand : out.candidates) {
            ++result.hypotheses_scored;
            int inliers = 0;
            double sum = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                residuals[i] = residual_angle(cand.pose, correspondences[i], rig).angle;
                if (residuals[i] < config.inlier_threshold) {
                    ++inliers;
                    sum += residuals[i];
                }
            }
            const bool better = !result.success || inliers > result.best_inlier_count ||
                                (inliers == result.best_inlier_count && sum < result.best_residual_sum);
            if (better) {
                result.success = true;
                result.best_pose = cand.pose;
                result.best_yaw = cand.yaw;
                result.best_inlier_count = inliers;
                result.best_residual_sum = sum;
                for (std::size_t i = 0; i < n; ++i) {
                    result.inlier_mask[i] = residuals[i] < config.inlier_threshold;
                }
                improved = true;
            }
        }

        if (improved && !config.iterations && result.best_inlier_count > 0) {
            const double w = static_cast<double>(result.best_inlier_count) / static_cast<double>(n);
            const IterationPlan plan = iteration_count(config.confidence, w, 4, config.max_iterations);
            budget = plan.count;
        }
    }
    result.iterations_run = it;
    result.iteration_cap_hit = !config.iterations && budget >= config.max_iterations;
    return result;
}

}  // namespace gcpose
