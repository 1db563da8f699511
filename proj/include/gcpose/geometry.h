#ifndef GCPOSE_GEOMETRY_H_
#define GCPOSE_GEOMETRY_H_

#include "gcpose/types.h"

#include <optional>

namespace gcpose {

// Tolerances used when validating user-supplied rotations and unit vectors.
inline constexpr double kRotationTolerance = 1e-12;
inline constexpr double kUnitTolerance = 1e-12;

Mat3 skew(const Vec3 &v);

bool is_rotation(const Mat3 &R, double tol = kRotationTolerance);

// Ray of `bearing` seen by camera `camera_index`, expressed in the rig frame.
// Throws std::out_of_range for a bad camera index and std::invalid_argument for a
// bearing that is not unit-norm (it is never renormalized).
PlueckerLine pluecker_from_bearing(const RigCalibration &rig, int camera_index, const Vec3 &bearing);

// Elementary rotations about the rig axes.
Mat3 rotation_x(double angle);
Mat3 rotation_y(double angle);

// Exact rotation about z by r_y, written in the Rodrigues form |r_y| * [e_z]x.
Mat3 yaw_rotation(double r_y);

// R_p(pitch) * R_r(roll) in the Z-Y-X convention.
Mat3 roll_pitch_rotation(double roll, double pitch);

// Z-Y-X Euler angles of R = R_z(yaw) R_y(pitch) R_x(roll).
struct EulerZYX {
    double yaw = 0.0;
    double pitch = 0.0;
    double roll = 0.0;
};
EulerZYX euler_zyx(const Mat3 &R);

AttitudePrior attitude_from_angles(double roll0, double pitch0, double roll1, double pitch1);

// Builds a prior from already-computed roll/pitch matrices (for example from a vanishing
// point). Throws std::invalid_argument if either matrix is not a rotation or carries yaw.
AttitudePrior make_attitude_prior(const Mat3 &frame0, const Mat3 &frame1);

// R = frame1^T * Yaw(r_y) * frame0, t = frame1^T * t_tilde.
RelativePose compose_final_pose(const AttitudePrior &prior, double r_y, const Vec3 &t_tilde);

// Value of the generalized epipolar constraint l1^T [[t]x R, R; R, 0] l0 where l0 is the
// frame-0 line and l1 the frame-1 line. Zero iff the two rays intersect under the pose.
double generalized_epipolar_residual(const PlueckerLine &l0, const PlueckerLine &l1, const RelativePose &pose);

// Angle of R_gt^T R_est in [0, pi]. Evaluated through the chordal distance, which equals
// arccos((trace(R_gt^T R_est) - 1) / 2) but keeps full precision near zero.
double rotation_error(const Mat3 &R_gt, const Mat3 &R_est);

// Angle between two translation directions in [0, pi]. Empty if either vector is zero.
std::optional<double> translation_direction_error(const Vec3 &t_gt, const Vec3 &t_est);

double deg2rad(double deg);
double rad2deg(double rad);

}  // namespace gcpose

#endif  // GCPOSE_GEOMETRY_H_
