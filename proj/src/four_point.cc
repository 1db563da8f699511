#include "gcpose/four_point.h"

#include "gcpose/geometry.h"

#include <Eigen/QR>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>

namespace gcpose {

PlueckerLine warp_line(const PlueckerLine &l, const Mat3 &R) { return PlueckerLine{R * l.direction, R * l.moment}; }

CoefficientRow coefficient_row(const PlueckerLine &l0_warped, const PlueckerLine &l1_warped) {
    const Vec3 &u = l0_warped.direction;
    const Vec3 &m = l0_warped.moment;
    const Vec3 &v = l1_warped.direction;
    const Vec3 &n = l1_warped.moment;

    CoefficientRow row;
    row.a[0] = v.dot(m) + n.dot(u);
    // t . (u x v) from v^T [t]x u
    row.a[1] = v.z() * u.y() - v.y() * u.z();
    row.a[2] = v.x() * u.z() - v.z() * u.x();
    row.a[3] = v.y() * u.x() - v.x() * u.y();
    // v^T [e_z]x m + n^T [e_z]x u
    row.a[4] = v.y() * m.x() - n.x() * u.y() + n.y() * u.x() - v.x() * m.y();
    // t . (([e_z]x u) x v)
    row.a[5] = v.z() * u.x();
    row.a[6] = v.z() * u.y();
    row.a[7] = -v.x() * u.x() - v.y() * u.y();
    return row;
}

namespace {

// Row i of M(r) is base_i + r * slope_i.
struct LinearRow {
    std::array<double, 4> base;
    std::array<double, 4> slope;
};

LinearRow linear_row(const CoefficientRow &row) {
    return {{row.a[1], row.a[2], row.a[3], row.a[0]}, {row.a[5], row.a[6], row.a[7], row.a[4]}};
}

// 2x2 minor of rows (p, q), columns (j, k) as a quadratic in r, lowest power first.
std::array<double, 3> minor2(const LinearRow &p, const LinearRow &q, int j, int k) {
    return {p.base[j] * q.base[k] - p.base[k] * q.base[j],
            p.base[j] * q.slope[k] + p.slope[j] * q.base[k] - p.base[k] * q.slope[j] - p.slope[k] * q.base[j],
            p.slope[j] * q.slope[k] - p.slope[k] * q.slope[j]};
}

// A few Newton steps on the quartic; a step is kept only when it lowers |p|.
double polish_root(const QuarticPolynomial &poly, double r) {
    double value = std::abs(poly.evaluate(r));
    for (int it = 0; it < 3 && value > 0.0; ++it) {
        const auto &c = poly.c;
        const double deriv = ((4.0 * c[0] * r + 3.0 * c[1]) * r + 2.0 * c[2]) * r + c[3];
        if (deriv == 0.0) {
            break;
        }
        const double next = r - poly.evaluate(r) / deriv;
        const double next_value = std::abs(poly.evaluate(next));
        if (!(next_value < value)) {
            break;
        }
        r = next;
        value = next_value;
    }
    return r;
}

// Correspondences whose rays meet in front of both cameras under `pose`.
int count_in_front(const RelativePose &pose, std::span<const Correspondence, 4> correspondences,
                   const RigCalibration &rig) {
    int count = 0;
    for (const Correspondence &c : correspondences) {
        const CameraExtrinsics &cam0 = rig.camera(c.camera0);
        const CameraExtrinsics &cam1 = rig.camera(c.camera1);
        const Vec3 d0 = cam0.rotation * c.bearing0;
        const Vec3 d1 = pose.rotation.transpose() * (cam1.rotation * c.bearing1);
        const Vec3 o1 = pose.rotation.transpose() * (cam1.offset - pose.translation);
        const Vec3 w = cam0.offset - o1;
        const double b = d0.dot(d1), d = d0.dot(w), e = d1.dot(w);
        const double den = 1.0 - b * b;
        if (den <= 1e-12) {
            continue;
        }
        count += (b * e - d) / den > 0.0 && (e - b * d) / den > 0.0;
    }
    return count;
}

}  // namespace

QuarticPolynomial build_quartic(std::span<const CoefficientRow, 4> rows) {
    const LinearRow r0 = linear_row(rows[0]), r1 = linear_row(rows[1]);
    const LinearRow r2 = linear_row(rows[2]), r3 = linear_row(rows[3]);

    // Laplace expansion along the row pair (0, 1).
    constexpr int pairs[6][4] = {{0, 1, 2, 3}, {0, 2, 1, 3}, {0, 3, 1, 2}, {1, 2, 0, 3}, {1, 3, 0, 2}, {2, 3, 0, 1}};
    std::array<double, 5> ascending{};
    for (const auto &pc : pairs) {
        const double sign = ((1 + pc[0] + pc[1]) % 2 == 0) ? 1.0 : -1.0;
        const auto top = minor2(r0, r1, pc[0], pc[1]);
        const auto bottom = minor2(r2, r3, pc[2], pc[3]);
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) {
                ascending[i + j] += sign * top[i] * bottom[j];
            }
        }
    }
    QuarticPolynomial poly;
    for (int i = 0; i < 5; ++i) {
        poly.c[4 - i] = ascending[i];
    }
    return poly;
}

// GCC misreads the fixed-size JacobiSVD storage as uninitialized.
#if defined(__GNUC__) && !defined(__clang__)
#pragma GCC diagnostic push
#pragma GCC diagnostic ignored "-Wmaybe-uninitialized"
#endif
TranslationEstimate recover_translation(std::span<const CoefficientRow, 4> rows, double r_y) {
    Eigen::Matrix<double, 4, 3> M;
    Eigen::Vector4d b;
    for (int j = 0; j < 4; ++j) {
        const auto &a = rows[j].a;
        M(j, 0) = a[1] + r_y * a[5];
        M(j, 1) = a[2] + r_y * a[6];
        M(j, 2) = a[3] + r_y * a[7];
        b(j) = -(a[0] + r_y * a[4]);
    }
    TranslationEstimate est;
    est.t_tilde = M.householderQr().solve(b);
    const Eigen::JacobiSVD<Eigen::Matrix<double, 4, 3>> svd(M, Eigen::ComputeFullV);
    est.conditioning = svd.singularValues()(2);
    est.null_direction = svd.matrixV().col(2);
    est.degenerate = est.conditioning < kDegenerateConditioning;
    return est;
}
#if defined(__GNUC__) && !defined(__clang__)
#pragma GCC diagnostic pop
#endif

SolverOutput four_point_solve(std::span<const Correspondence, 4> correspondences, const RigCalibration &rig,
                              const AttitudePrior &prior, const SolverOptions &options) {
    std::array<CoefficientRow, 4> rows;
    for (std::size_t i = 0; i < 4; ++i) {
        const Correspondence &c = correspondences[i];
        const PlueckerLine l0 = warp_line(pluecker_from_bearing(rig, c.camera0, c.bearing0), prior.frame0);
        const PlueckerLine l1 = warp_line(pluecker_from_bearing(rig, c.camera1, c.bearing1), prior.frame1);
        rows[i] = coefficient_row(l0, l1);
    }

    const QuarticPolynomial poly = build_quartic(rows);
    const std::vector<Complex> roots = solve_polynomial(poly);
    const std::vector<double> yaws = real_roots_filtered(roots, options.imag_tolerance, options.root_bound);

    double poly_scale = 0.0;
    for (double c : poly.c) {
        poly_scale = std::max(poly_scale, std::abs(c));
    }

    SolverOutput out;
    out.candidates.reserve(yaws.size());
    for (double root : yaws) {
        const double r_y = polish_root(poly, root);
        const TranslationEstimate t = recover_translation(rows, r_y);
        PoseCandidate cand;
        if (t.degenerate) {
            // Only the direction is known; take the sign that puts more points in front.
            const RelativePose plus = compose_final_pose(prior, r_y, t.null_direction);
            const RelativePose minus = compose_final_pose(prior, r_y, -t.null_direction);
            cand.pose = count_in_front(minus, correspondences, rig) > count_in_front(plus, correspondences, rig) ? minus
                                                                                                               : plus;
        } else {
            cand.pose = compose_final_pose(prior, r_y, t.t_tilde);
        }
        cand.yaw = r_y;
        cand.conditioning = t.conditioning;
        cand.degenerate = t.degenerate;
        cand.quartic_residual = poly_scale > 0.0 ? std::abs(poly.evaluate(r_y)) / poly_scale : 0.0;
        out.candidates.push_back(cand);
    }
    std::stable_sort(out.candidates.begin(), out.candidates.end(), [](const PoseCandidate &x, const PoseCandidate &y) {
        if (x.quartic_residual != y.quartic_residual) {
            return x.quartic_residual < y.quartic_residual;
        }
        return x.conditioning > y.conditioning;
    });
    return out;
}

}  // namespace gcpose
