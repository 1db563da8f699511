#include "gcpose/geometry.h"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace gcpose {

RigCalibration::RigCalibration(std::vector<CameraExtrinsics> cameras) : cameras_(std::move(cameras)) {
    if (cameras_.empty()) {
        throw std::invalid_argument("rig calibration needs at least one camera");
    }
    for (std::size_t i = 0; i < cameras_.size(); ++i) {
        if (!is_rotation(cameras_[i].rotation)) {
            throw std::invalid_argument("camera " + std::to_string(i) + ": rotation is not orthonormal with det +1");
        }
        if (!cameras_[i].offset.allFinite()) {
            throw std::invalid_argument("camera " + std::to_string(i) + ": offset is not finite");
        }
    }
}

const CameraExtrinsics &RigCalibration::camera(int index) const {
    if (!valid_index(index)) {
        throw std::out_of_range("camera index " + std::to_string(index) + " outside rig of " +
                                std::to_string(cameras_.size()) + " cameras");
    }
    return cameras_[static_cast<std::size_t>(index)];
}

Mat3 skew(const Vec3 &v) {
    Mat3 S;
    S << 0.0, -v.z(), v.y(),
         v.z(), 0.0, -v.x(),
         -v.y(), v.x(), 0.0;
    return S;
}

bool is_rotation(const Mat3 &R, double tol) {
    if (!R.allFinite()) {
        return false;
    }
    const double ortho = (R.transpose() * R - Mat3::Identity()).norm();
    return ortho <= tol && std::abs(R.determinant() - 1.0) <= tol;
}

PlueckerLine pluecker_from_bearing(const RigCalibration &rig, int camera_index, const Vec3 &bearing) {
    const CameraExtrinsics &cam = rig.camera(camera_index);
    if (!bearing.allFinite() || std::abs(bearing.norm() - 1.0) > kUnitTolerance) {
        throw std::invalid_argument("bearing vector is not unit-norm");
    }
    PlueckerLine line;
    line.direction = cam.rotation * bearing;
    line.moment = cam.offset.cross(line.direction);
    return line;
}

Mat3 rotation_x(double angle) {
    const double c = std::cos(angle), s = std::sin(angle);
    Mat3 R;
    R << 1.0, 0.0, 0.0,
         0.0, c, -s,
         0.0, s, c;
    return R;
}

Mat3 rotation_y(double angle) {
    const double c = std::cos(angle), s = std::sin(angle);
    Mat3 R;
    R << c, 0.0, s,
         0.0, 1.0, 0.0,
         -s, 0.0, c;
    return R;
}

Mat3 yaw_rotation(double r_y) {
    if (r_y == 0.0) {
        return Mat3::Identity();
    }
    const Mat3 K = skew(Vec3(0.0, 0.0, r_y));
    const double a = std::abs(r_y);
    return Mat3::Identity() + (std::sin(a) / a) * K + ((1.0 - std::cos(a)) / (r_y * r_y)) * K * K;
}

Mat3 roll_pitch_rotation(double roll, double pitch) { return rotation_y(pitch) * rotation_x(roll); }

EulerZYX euler_zyx(const Mat3 &R) {
    EulerZYX e;
    e.yaw = std::atan2(R(1, 0), R(0, 0));
    e.pitch = std::atan2(-R(2, 0), std::hypot(R(2, 1), R(2, 2)));
    e.roll = std::atan2(R(2, 1), R(2, 2));
    return e;
}

AttitudePrior attitude_from_angles(double roll0, double pitch0, double roll1, double pitch1) {
    if (!std::isfinite(roll0) || !std::isfinite(pitch0) || !std::isfinite(roll1) || !std::isfinite(pitch1)) {
        throw std::invalid_argument("roll/pitch angles must be finite");
    }
    return AttitudePrior{roll_pitch_rotation(roll0, pitch0), roll_pitch_rotation(roll1, pitch1)};
}

AttitudePrior make_attitude_prior(const Mat3 &frame0, const Mat3 &frame1) {
    for (const Mat3 *R : {&frame0, &frame1}) {
        if (!is_rotation(*R)) {
            throw std::invalid_argument("attitude prior is not a rotation");
        }
        if (std::abs(euler_zyx(*R).yaw) > 1e-9) {
            throw std::invalid_argument("attitude prior has a yaw component");
        }
    }
    return AttitudePrior{frame0, frame1};
}

RelativePose compose_final_pose(const AttitudePrior &prior, double r_y, const Vec3 &t_tilde) {
    RelativePose pose;
    pose.rotation = prior.frame1.transpose() * yaw_rotation(r_y) * prior.frame0;
    pose.translation = prior.frame1.transpose() * t_tilde;
    return pose;
}

double generalized_epipolar_residual(const PlueckerLine &l0, const PlueckerLine &l1, const RelativePose &pose) {
    const Vec3 Ru = pose.rotation * l0.direction;
    const Vec3 Rm = pose.rotation * l0.moment;
    return l1.direction.dot(pose.translation.cross(Ru) + Rm) + l1.moment.dot(Ru);
}

double rotation_error(const Mat3 &R_gt, const Mat3 &R_est) {
    constexpr double tol = 1e-9;
    if (!is_rotation(R_gt, tol) || !is_rotation(R_est, tol)) {
        throw std::invalid_argument("rotation_error: argument is not a rotation");
    }
    // |R_gt - R_est|_F = 2 sqrt(2) sin(theta / 2), cos^2(theta / 2) = (trace + 1) / 4.
    const double half_sin = (R_gt - R_est).norm() / (2.0 * std::numbers::sqrt2);
    const double trace = (R_gt.transpose() * R_est).trace();
    const double half_cos = std::sqrt(std::max(0.0, (trace + 1.0) / 4.0));
    return 2.0 * std::atan2(half_sin, half_cos);
}

std::optional<double> translation_direction_error(const Vec3 &t_gt, const Vec3 &t_est) {
    const double n_gt = t_gt.norm(), n_est = t_est.norm();
    if (!(n_gt > 0.0) || !(n_est > 0.0) || !std::isfinite(n_gt) || !std::isfinite(n_est)) {
        return std::nullopt;
    }
    const Vec3 a = t_gt / n_gt, b = t_est / n_est;
    return std::atan2(a.cross(b).norm(), a.dot(b));
}

double deg2rad(double deg) { return deg * std::numbers::pi / 180.0; }
double rad2deg(double rad) { return rad * 180.0 / std::numbers::pi; }

}  // namespace gcpose
