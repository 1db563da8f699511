#ifndef GCPOSE_FOUR_POINT_H_
#define GCPOSE_FOUR_POINT_H_

#include "gcpose/quartic.h"
#include "gcpose/types.h"

#include <array>
#include <span>
#include <vector>

namespace gcpose {

// Rotate direction and moment of a line by R (block-diagonal warp).
PlueckerLine warp_line(const PlueckerLine &l, const Mat3 &R);

// Coefficients of
//   a1 + a2 tx + a3 ty + a4 tz + a5 r + a6 tx r + a7 ty r + a8 tz r = 0,
// the first-order (Yaw(r) ~ I + r [e_z]x) generalized epipolar constraint between a
// warped frame-0 line and a warped frame-1 line. Stored zero-based: a[0] is a1.
struct CoefficientRow {
    std::array<double, 8> a{};

    double evaluate(const Vec3 &t_tilde, double r_y) const {
        return a[0] + a[1] * t_tilde.x() + a[2] * t_tilde.y() + a[3] * t_tilde.z() +
               r_y * (a[4] + a[5] * t_tilde.x() + a[6] * t_tilde.y() + a[7] * t_tilde.z());
    }
};

CoefficientRow coefficient_row(const PlueckerLine &l0_warped, const PlueckerLine &l1_warped);

// det M(r_y) with M(r_y) rows [a2 + a6 r, a3 + a7 r, a4 + a8 r, a1 + a5 r].
QuarticPolynomial build_quartic(std::span<const CoefficientRow, 4> rows);

inline constexpr double kDegenerateConditioning = 1e-10;

struct TranslationEstimate {
    Vec3 t_tilde = Vec3::Zero();
    double conditioning = 0.0;  // smallest singular value of the 4x3 system
    bool degenerate = false;    // conditioning < kDegenerateConditioning
    // Right singular vector of the smallest singular value. When the scale is unobservable
    // (e.g. all rays from one camera) this is the translation direction, up to sign.
    Vec3 null_direction = Vec3::Zero();
};

// Least-squares solution of [a2 + a6 r, a3 + a7 r, a4 + a8 r] t = -(a1 + a5 r) over four rows.
TranslationEstimate recover_translation(std::span<const CoefficientRow, 4> rows, double r_y);

struct PoseCandidate {
    RelativePose pose;
    double yaw = 0.0;
    double conditioning = 0.0;
    bool degenerate = false;
    double quartic_residual = 0.0;  // |det M(r_y)| relative to the largest quartic coefficient
};

struct SolverOutput {
    std::vector<PoseCandidate> candidates;  // at most 4, best ranked first
};

struct SolverOptions {
    double imag_tolerance = kDefaultImagTolerance;
    double root_bound = kDefaultRootBound;  // rad; raise it for rotations beyond ~15 deg
};

// Relative pose from four correspondences given the roll/pitch prior of both frames.
// An empty candidate list means no real yaw root was found inside the root bound.
SolverOutput four_point_solve(std::span<const Correspondence, 4> correspondences, const RigCalibration &rig,
                              const AttitudePrior &prior, const SolverOptions &options = {});

}  // namespace gcpose

#endif  // GCPOSE_FOUR_POINT_H_
