#include "gcpose/synthetic.h"

#include "gcpose/geometry.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace gcpose {

std::string to_string(OutlierModel m) {
    return m == OutlierModel::kRigidMotion ? "rigid-independent-motion" : "uniform-mismatch";
}

OutlierModel outlier_model_from_string(const std::string &s) {
    if (s == "uniform-mismatch") {
        return OutlierModel::kUniformMismatch;
    }
    if (s == "rigid-independent-motion") {
        return OutlierModel::kRigidMotion;
    }
    throw std::invalid_argument("unknown outlier model \"" + s + "\"");
}

void ScenarioConfig::validate() const {
    auto require = [](bool ok, const char *msg) {
        if (!ok) {
            throw std::invalid_argument(msg);
        }
    };
    require(num_cameras >= 1, "num_cameras must be >= 1");
    require(num_points >= 0, "num_points must be >= 0");
    require(baseline >= 0.0 && rotation_max_deg >= 0.0 && tilt_max_deg >= 0.0 && tilt_change_deg >= 0.0 &&
                translation_norm >= 0.0,
            "scenario magnitudes must be nonnegative");
    require(!yaw_deg || *yaw_deg >= 0.0, "yaw_deg must be nonnegative");
    require(pixel_noise_stdv >= 0.0 && attitude_noise_stdv >= 0.0, "noise levels must be nonnegative");
    require(outlier_ratio >= 0.0 && outlier_ratio < 1.0, "outlier_ratio must lie in [0, 1)");
    require(object_yaw_min_deg >= 0.0 && object_yaw_max_deg >= object_yaw_min_deg, "bad object yaw range");
    require(focal > 0.0 && image_width > 0 && image_height > 0, "bad intrinsics");
    require(depth_min > 0.0 && depth_max >= depth_min, "bad depth range");
}

bool Pinhole::project(const Vec3 &p_cam, double &x, double &y) const {
    if (p_cam.z() <= 1e-6) {
        return false;
    }
    x = focal * p_cam.x() / p_cam.z() + cx();
    y = focal * p_cam.y() / p_cam.z() + cy();
    return x >= 0.0 && x <= width && y >= 0.0 && y <= height;
}

RigCalibration make_ring_rig(int num_cameras, double baseline) {
    if (num_cameras < 1) {
        throw std::invalid_argument("rig needs at least one camera");
    }
    std::vector<CameraExtrinsics> cams;
    for (int k = 0; k < num_cameras; ++k) {
        const double a = std::numbers::pi / 2.0 + 2.0 * std::numbers::pi * k / num_cameras;
        const Vec3 forward(std::cos(a), std::sin(a), 0.0);
        const Vec3 right(std::sin(a), -std::cos(a), 0.0);
        const Vec3 down(0.0, 0.0, -1.0);
        CameraExtrinsics cam;
        cam.rotation.col(0) = right;
        cam.rotation.col(1) = down;
        cam.rotation.col(2) = forward;
        cam.offset = 0.5 * baseline * forward;
        cams.push_back(cam);
    }
    return RigCalibration(std::move(cams));
}

namespace {

constexpr int kMaxAttempts = 10000;

double uniform(Rng &rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

double gaussian(Rng &rng, double stdv) {
    // Always consume a draw so stream positions do not depend on the noise level.
    const double z = std::normal_distribution<double>(0.0, 1.0)(rng);
    return stdv * z;
}

Vec3 random_unit(Rng &rng) {
    std::normal_distribution<double> n(0.0, 1.0);
    Vec3 v;
    do {
        v = Vec3(n(rng), n(rng), n(rng));
    } while (v.norm() < 1e-9);
    return v.normalized();
}

struct Motion {
    Mat3 R;
    Vec3 t;
};

struct Observation {
    Vec3 bearing0;
    Vec3 bearing1;
};

// A visible scene point of camera `cam` under `motion`, with pixel noise from `noise`.
std::optional<Observation> observe_point(const RigCalibration &rig, int cam, const Pinhole &K, const Motion &motion,
                                         const ScenarioConfig &cfg, Rng &geo, Rng &noise) {
    const CameraExtrinsics &c = rig.camera(cam);
    for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
        const double x0 = uniform(geo, 0.0, K.width);
        const double y0 = uniform(geo, 0.0, K.height);
        const double depth = uniform(geo, cfg.depth_min, cfg.depth_max);
        const Vec3 p_cam0 = depth * Vec3((x0 - K.cx()) / K.focal, (y0 - K.cy()) / K.focal, 1.0);
        const Vec3 p_rig1 = motion.R * (c.rotation * p_cam0 + c.offset) + motion.t;
        const Vec3 p_cam1 = c.rotation.transpose() * (p_rig1 - c.offset);
        double x1 = 0.0, y1 = 0.0;
        if (!K.project(p_cam1, x1, y1)) {
            continue;
        }
        const double n0x = gaussian(noise, cfg.pixel_noise_stdv), n0y = gaussian(noise, cfg.pixel_noise_stdv);
        const double n1x = gaussian(noise, cfg.pixel_noise_stdv), n1y = gaussian(noise, cfg.pixel_noise_stdv);
        return Observation{K.bearing(x0 + n0x, y0 + n0y), K.bearing(x1 + n1x, y1 + n1y)};
    }
    return std::nullopt;
}

}  // namespace

SyntheticInstance generate_instance(const ScenarioConfig &cfg, Rng &rng) {
    cfg.validate();
    const std::uint64_t base = rng();
    Rng geo = derive_rng(base, 0);
    Rng pix = derive_rng(base, 1);
    Rng att = derive_rng(base, 2);
    Rng out = derive_rng(base, 3);

    SyntheticInstance inst;
    inst.rig = make_ring_rig(cfg.num_cameras, cfg.baseline);
    const Pinhole K{cfg.focal, cfg.image_width, cfg.image_height};

    // Rig attitudes W_k = Yaw_k * Pitch_k * Roll_k (rig -> gravity-aligned world).
    const double tilt = deg2rad(cfg.tilt_max_deg), dtilt = deg2rad(cfg.tilt_change_deg);
    const double roll0 = uniform(geo, -tilt, tilt), pitch0 = uniform(geo, -tilt, tilt);
    const double yaw0 = uniform(geo, -std::numbers::pi, std::numbers::pi);
    const double roll1 = roll0 + uniform(geo, -dtilt, dtilt), pitch1 = pitch0 + uniform(geo, -dtilt, dtilt);
    const Mat3 Pr0 = roll_pitch_rotation(roll0, pitch0), Pr1 = roll_pitch_rotation(roll1, pitch1);

    double delta = 0.0;
    if (cfg.yaw_deg) {
        delta = (uniform(geo, 0.0, 1.0) < 0.5 ? -1.0 : 1.0) * deg2rad(*cfg.yaw_deg);
    } else {
        const double max_rot = deg2rad(cfg.rotation_max_deg);
        bool found = false;
        for (int attempt = 0; attempt < kMaxAttempts && !found; ++attempt) {
            delta = uniform(geo, -max_rot, max_rot);
            found = rotation_error(Mat3::Identity(), Pr1.transpose() * yaw_rotation(delta) * Pr0) <= max_rot;
        }
        if (!found) {
            throw InfeasibleScenario("rotation_max is too small for the configured tilt change");
        }
    }
    const Mat3 W0 = yaw_rotation(yaw0) * Pr0;
    const Mat3 W1 = yaw_rotation(yaw0 - delta) * Pr1;
    const Vec3 displacement = cfg.translation_norm * random_unit(geo);

    inst.true_yaw = delta;
    inst.true_pose.rotation = W1.transpose() * W0;
    inst.true_pose.translation = -(W1.transpose() * displacement);
    inst.true_prior = AttitudePrior{Pr0, Pr1};

    const double att_noise = deg2rad(cfg.attitude_noise_stdv);
    const double nr0 = gaussian(att, att_noise), np0 = gaussian(att, att_noise);
    const double nr1 = gaussian(att, att_noise), np1 = gaussian(att, att_noise);
    inst.noisy_prior = attitude_from_angles(roll0 + nr0, pitch0 + np0, roll1 + nr1, pitch1 + np1);

    // Outlier labels.
    const int n = cfg.num_points;
    std::vector<int> camera_of(n);
    for (int j = 0; j < n; ++j) {
        camera_of[j] = j % cfg.num_cameras;
    }
    std::vector<bool> is_outlier(n, false);
    auto mark = [&](std::vector<int> pool, int count) {
        std::shuffle(pool.begin(), pool.end(), out);
        for (int k = 0; k < count; ++k) {
            is_outlier[pool[k]] = true;
        }
    };
    auto outlier_count = [&](int total) { return static_cast<int>(std::ceil(total * cfg.outlier_ratio - 1e-9)); };
    if (cfg.outlier_model == OutlierModel::kUniformMismatch) {
        std::vector<int> all(n);
        std::iota(all.begin(), all.end(), 0);
        mark(all, outlier_count(n));
    } else {
        for (int cam = 0; cam < cfg.num_cameras; ++cam) {
            std::vector<int> pool;
            for (int j = cam; j < n; j += cfg.num_cameras) {
                pool.push_back(j);
            }
            mark(pool, outlier_count(static_cast<int>(pool.size())));
        }
    }

    // One independently moving object per camera, compatible with the roll/pitch prior.
    std::vector<Motion> object_motion;
    for (int cam = 0; cam < cfg.num_cameras; ++cam) {
        const double sign = uniform(out, 0.0, 1.0) < 0.5 ? -1.0 : 1.0;
        const double extra = sign * deg2rad(uniform(out, cfg.object_yaw_min_deg, cfg.object_yaw_max_deg));
        Motion m;
        m.R = Pr1.transpose() * yaw_rotation(delta + extra) * Pr0;
        m.t = inst.true_pose.translation + uniform(out, 0.5, 2.0) * random_unit(out);
        object_motion.push_back(m);
    }

    const Motion rig_motion{inst.true_pose.rotation, inst.true_pose.translation};
    inst.correspondences.reserve(n);
    inst.inlier_truth.reserve(n);
    for (int j = 0; j < n; ++j) {
        const int cam = camera_of[j];
        Correspondence c;
        c.camera0 = c.camera1 = cam;
        if (!is_outlier[j]) {
            const auto obs = observe_point(inst.rig, cam, K, rig_motion, cfg, geo, pix);
            if (!obs) {
                throw InfeasibleScenario("no scene point is visible in camera " + std::to_string(cam) +
                                         " in both frames");
            }
            c.bearing0 = obs->bearing0;
            c.bearing1 = obs->bearing1;
        } else {
            bool placed = false;
            for (int attempt = 0; attempt < kMaxAttempts && !placed; ++attempt) {
                if (cfg.outlier_model == OutlierModel::kUniformMismatch) {
                    c.bearing0 = K.bearing(uniform(out, 0.0, K.width), uniform(out, 0.0, K.height));
                    c.bearing1 = K.bearing(uniform(out, 0.0, K.width), uniform(out, 0.0, K.height));
                } else {
                    const auto obs = observe_point(inst.rig, cam, K, object_motion[cam], cfg, out, out);
                    if (!obs) {
                        break;
                    }
                    c.bearing0 = obs->bearing0;
                    c.bearing1 = obs->bearing1;
                }
                placed = residual_angle(inst.true_pose, c, inst.rig).angle >= cfg.outlier_min_residual;
            }
            if (!placed) {
                throw InfeasibleScenario("could not place an outlier in camera " + std::to_string(cam));
            }
        }
        inst.correspondences.push_back(c);
        inst.inlier_truth.push_back(!is_outlier[j]);
    }
    return inst;
}

SyntheticInstance generate_instance(const ScenarioConfig &cfg) {
    Rng rng = derive_rng(cfg.seed, 0);
    return generate_instance(cfg, rng);
}

}  // namespace gcpose
