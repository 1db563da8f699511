#include "gcpose/synthetic.h"

#include "gcpose/geometry.h"

#include <gtest/gtest.h>

#include <cmath>

namespace gcpose {
namespace {

ScenarioConfig base_config() {
    ScenarioConfig cfg;
    cfg.num_points = 200;
    cfg.yaw_deg = 2.0;
    cfg.seed = 17;
    return cfg;
}

TEST(RingRig, CentersAndViewingDirections) {
    const RigCalibration rig = make_ring_rig(4, 2.0);
    ASSERT_EQ(rig.size(), 4u);
    for (int k = 0; k < 4; ++k) {
        const CameraExtrinsics &c = rig.camera(k);
        EXPECT_NEAR(c.offset.norm(), 1.0, 1e-15);
        const Vec3 axis = c.rotation * Vec3::UnitZ();
        EXPECT_NEAR(axis.dot(c.offset.normalized()), 1.0, 1e-15);
        EXPECT_NEAR(axis.z(), 0.0, 1e-15);
    }
    EXPECT_THROW(make_ring_rig(0, 1.0), std::invalid_argument);
}

TEST(Synthetic, NoiseFreeInliersAreExact) {
    const SyntheticInstance inst = generate_instance(base_config());
    ASSERT_EQ(inst.correspondences.size(), 200u);
    for (const Correspondence &c : inst.correspondences) {
        EXPECT_LE(residual_angle(inst.true_pose, c, inst.rig).angle, 1e-10);
        EXPECT_NEAR(c.bearing0.norm(), 1.0, 1e-14);
        EXPECT_NEAR(c.bearing1.norm(), 1.0, 1e-14);
    }
}

TEST(Synthetic, TrueYawMatchesPose) {
    for (double yaw : {0.0, 1.0, 7.5}) {
        ScenarioConfig cfg = base_config();
        cfg.yaw_deg = yaw;
        const SyntheticInstance inst = generate_instance(cfg);
        EXPECT_NEAR(std::abs(inst.true_yaw), deg2rad(yaw), 1e-15);
        const Mat3 Y = inst.true_prior.frame1 * inst.true_pose.rotation * inst.true_prior.frame0.transpose();
        EXPECT_NEAR((Y - yaw_rotation(inst.true_yaw)).norm(), 0.0, 1e-12);
        EXPECT_NEAR(inst.true_pose.translation.norm(), cfg.translation_norm, 1e-12);
    }
}

TEST(Synthetic, RandomRotationRespectsBound) {
    ScenarioConfig cfg = base_config();
    cfg.yaw_deg.reset();
    cfg.rotation_max_deg = 3.0;
    for (std::uint64_t s = 0; s < 50; ++s) {
        cfg.seed = s;
        const SyntheticInstance inst = generate_instance(cfg);
        EXPECT_LE(rad2deg(rotation_error(Mat3::Identity(), inst.true_pose.rotation)), 3.0 + 1e-9);
    }
}

// Pixel offset between a noisy and a clean bearing.
Eigen::Vector2d pixel_offset(const Vec3 &noisy, const Vec3 &clean, double focal) {
    return focal * Eigen::Vector2d(noisy.x() / noisy.z() - clean.x() / clean.z(),
                                   noisy.y() / noisy.z() - clean.y() / clean.z());
}

TEST(Synthetic, PixelNoiseHasConfiguredSpread) {
    ScenarioConfig cfg = base_config();
    cfg.num_points = 2000;
    const SyntheticInstance clean = generate_instance(cfg);
    cfg.pixel_noise_stdv = 1.0;
    const SyntheticInstance noisy = generate_instance(cfg);
    double sum = 0.0, sum_sq = 0.0;
    int n = 0;
    for (std::size_t j = 0; j < clean.correspondences.size(); ++j) {
        for (int frame = 0; frame < 2; ++frame) {
            const Vec3 &a = frame ? noisy.correspondences[j].bearing1 : noisy.correspondences[j].bearing0;
            const Vec3 &b = frame ? clean.correspondences[j].bearing1 : clean.correspondences[j].bearing0;
            const Eigen::Vector2d d = pixel_offset(a, b, cfg.focal);
            sum += d.x() + d.y();
            sum_sq += d.squaredNorm();
            n += 2;
        }
    }
    EXPECT_NEAR(sum / n, 0.0, 0.05);
    EXPECT_NEAR(std::sqrt(sum_sq / n), 1.0, 0.05);
}

TEST(Synthetic, NoiseLevelsDoNotChangeGeometry) {
    ScenarioConfig cfg = base_config();
    const SyntheticInstance a = generate_instance(cfg);
    cfg.pixel_noise_stdv = 3.0;
    cfg.attitude_noise_stdv = 0.5;
    const SyntheticInstance b = generate_instance(cfg);
    EXPECT_EQ(a.true_pose.rotation, b.true_pose.rotation);
    EXPECT_EQ(a.true_pose.translation, b.true_pose.translation);
    EXPECT_EQ(a.true_prior.frame0, b.true_prior.frame0);
    EXPECT_EQ(a.true_prior.frame1, b.true_prior.frame1);
    EXPECT_EQ(a.noisy_prior.frame0, a.true_prior.frame0);
    EXPECT_GT(rotation_error(b.noisy_prior.frame0, b.true_prior.frame0), 0.0);
    EXPECT_EQ(euler_zyx(b.noisy_prior.frame0).yaw, 0.0);
}

TEST(Synthetic, Deterministic) {
    ScenarioConfig cfg = base_config();
    cfg.pixel_noise_stdv = 1.0;
    cfg.attitude_noise_stdv = 0.2;
    cfg.outlier_ratio = 0.3;
    const SyntheticInstance a = generate_instance(cfg);
    const SyntheticInstance b = generate_instance(cfg);
    ASSERT_EQ(a.correspondences.size(), b.correspondences.size());
    for (std::size_t j = 0; j < a.correspondences.size(); ++j) {
        EXPECT_EQ(a.correspondences[j].bearing0, b.correspondences[j].bearing0);
        EXPECT_EQ(a.correspondences[j].bearing1, b.correspondences[j].bearing1);
    }
    EXPECT_EQ(a.inlier_truth, b.inlier_truth);
    cfg.seed += 1;
    const SyntheticInstance c = generate_instance(cfg);
    EXPECT_NE(a.correspondences[0].bearing0, c.correspondences[0].bearing0);
}

TEST(Synthetic, UniformMismatchOutliers) {
    for (int n : {100, 101, 7}) {
        ScenarioConfig cfg = base_config();
        cfg.num_points = n;
        cfg.outlier_ratio = 0.5;
        const SyntheticInstance inst = generate_instance(cfg);
        const long outliers = std::count(inst.inlier_truth.begin(), inst.inlier_truth.end(), false);
        EXPECT_EQ(outliers, (n + 1) / 2);
        for (std::size_t j = 0; j < inst.correspondences.size(); ++j) {
            const double r = residual_angle(inst.true_pose, inst.correspondences[j], inst.rig).angle;
            if (inst.inlier_truth[j]) {
                EXPECT_LE(r, 1e-10);
            } else {
                EXPECT_GE(r, cfg.outlier_min_residual);
            }
        }
    }
}

TEST(Synthetic, RigidMotionOutliersPerCamera) {
    ScenarioConfig cfg = base_config();
    cfg.num_points = 200;
    cfg.outlier_ratio = 0.8;
    cfg.outlier_model = OutlierModel::kRigidMotion;
    const SyntheticInstance inst = generate_instance(cfg);
    std::array<int, 2> outliers{0, 0};
    for (std::size_t j = 0; j < inst.correspondences.size(); ++j) {
        const Correspondence &c = inst.correspondences[j];
        EXPECT_EQ(c.camera0, c.camera1);
        if (!inst.inlier_truth[j]) {
            ++outliers[c.camera0];
            EXPECT_GE(residual_angle(inst.true_pose, c, inst.rig).angle, cfg.outlier_min_residual);
        }
    }
    EXPECT_EQ(outliers[0], 80);
    EXPECT_EQ(outliers[1], 80);
}

TEST(Synthetic, OutlierModelNames) {
    for (OutlierModel m : {OutlierModel::kUniformMismatch, OutlierModel::kRigidMotion}) {
        EXPECT_EQ(outlier_model_from_string(to_string(m)), m);
    }
    EXPECT_THROW(outlier_model_from_string("bogus"), std::invalid_argument);
}

TEST(Synthetic, InvalidAndInfeasibleScenarios) {
    ScenarioConfig cfg = base_config();
    cfg.outlier_ratio = 1.0;
    EXPECT_THROW(generate_instance(cfg), std::invalid_argument);
    cfg = base_config();
    cfg.pixel_noise_stdv = -1.0;
    EXPECT_THROW(generate_instance(cfg), std::invalid_argument);

    cfg = base_config();
    cfg.yaw_deg.reset();
    cfg.rotation_max_deg = 0.01;
    cfg.tilt_change_deg = 2.0;
    EXPECT_THROW(generate_instance(cfg), InfeasibleScenario);

    cfg = base_config();
    cfg.translation_norm = 1000.0;
    EXPECT_THROW(generate_instance(cfg), InfeasibleScenario);
}

}  // namespace
}  // namespace gcpose
