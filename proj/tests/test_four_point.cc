#include "gcpose/four_point.h"

#include "gcpose/ransac.h"
#include "gcpose/synthetic.h"
#include "oracles.h"

#include <gtest/gtest.h>

#include <numbers>

namespace gcpose {
namespace {

struct MinimalInstance {
    RigCalibration rig = make_ring_rig(2, 1.0);
    AttitudePrior prior;
    RelativePose pose;
    std::array<Correspondence, 4> matches;
};

// Two points per camera of a two-camera ring rig, observed exactly.
MinimalInstance make_minimal(double yaw, const Vec3 &t_tilde, const AttitudePrior &prior, std::uint64_t seed,
                             std::array<int, 4> cams = {0, 0, 1, 1}) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> lateral(-2.0, 2.0), depth(5.0, 30.0);
    MinimalInstance inst;
    inst.prior = prior;
    inst.pose = compose_final_pose(prior, yaw, t_tilde);
    for (int i = 0; i < 4; ++i) {
        const Vec3 X = oracle::point_in_front(inst.rig, cams[i], lateral(rng), 0.3 * lateral(rng), depth(rng));
        inst.matches[i] = oracle::observe(inst.rig, cams[i], inst.pose, X);
    }
    return inst;
}

std::array<CoefficientRow, 4> rows_of(const MinimalInstance &inst) {
    std::array<CoefficientRow, 4> rows;
    for (int i = 0; i < 4; ++i) {
        const Correspondence &c = inst.matches[i];
        rows[i] = coefficient_row(warp_line(pluecker_from_bearing(inst.rig, c.camera0, c.bearing0), inst.prior.frame0),
                                  warp_line(pluecker_from_bearing(inst.rig, c.camera1, c.bearing1), inst.prior.frame1));
    }
    return rows;
}

double best_rotation_error(const SolverOutput &out, const RelativePose &truth) {
    double best = std::numeric_limits<double>::infinity();
    for (const PoseCandidate &c : out.candidates) {
        best = std::min(best, rotation_error(truth.rotation, c.pose.rotation));
    }
    return best;
}

TEST(WarpLine, Examples) {
    const PlueckerLine l{Vec3(1, 0, 0), Vec3::Zero()};
    const PlueckerLine same = warp_line(l, Mat3::Identity());
    EXPECT_EQ(same.direction, l.direction);
    EXPECT_EQ(same.moment, l.moment);
    const PlueckerLine turned = warp_line(l, yaw_rotation(std::numbers::pi / 2));
    EXPECT_NEAR((turned.direction - Vec3(0, 1, 0)).norm(), 0.0, 1e-15);
    EXPECT_EQ(turned.moment, Vec3::Zero());

    std::mt19937_64 rng(21);
    for (int i = 0; i < 1000; ++i) {
        const PlueckerLine a = oracle::random_line(rng);
        const PlueckerLine b = warp_line(a, oracle::random_rotation(rng));
        EXPECT_NEAR(a.direction.dot(a.moment), b.direction.dot(b.moment), 1e-14);
    }
}

TEST(CoefficientRow, SelfMatchedLine) {
    const PlueckerLine l{Vec3(0, 0, 1), Vec3(0, -1, 0)};
    EXPECT_EQ(coefficient_row(l, l).a[0], 0.0);
}

TEST(CoefficientRow, MatchesDirectConstraint) {
    std::mt19937_64 rng(22);
    std::uniform_real_distribution<double> u(-2.0, 2.0), r(-0.3, 0.3);
    for (int i = 0; i < 500; ++i) {
        const PlueckerLine l0 = oracle::random_line(rng), l1 = oracle::random_line(rng);
        const CoefficientRow row = coefficient_row(l0, l1);
        for (int k = 0; k < 20; ++k) {
            const Vec3 t(u(rng), u(rng), u(rng));
            const double ry = r(rng);
            const double direct = oracle::first_order_constraint(l0, l1, t, ry);
            const double scale = std::max(1.0, std::abs(direct));
            ASSERT_NEAR(row.evaluate(t, ry), direct, 1e-12 * scale);
        }
    }
}

TEST(CoefficientRow, CentralCameraReducesToYawTerms) {
    std::mt19937_64 rng(23);
    for (int i = 0; i < 100; ++i) {
        const PlueckerLine l0{oracle::random_unit(rng), Vec3::Zero()};
        const PlueckerLine l1{oracle::random_unit(rng), Vec3::Zero()};
        const CoefficientRow row = coefficient_row(l0, l1);
        const double ry = 0.05;
        EXPECT_NEAR(row.evaluate(Vec3::Zero(), ry), row.a[0] + row.a[4] * ry, 1e-15);
        EXPECT_EQ(row.a[0], 0.0);
        EXPECT_EQ(row.a[4], 0.0);
        EXPECT_NEAR(oracle::first_order_constraint(l0, l1, Vec3::Zero(), ry), 0.0, 1e-15);
    }
}

TEST(BuildQuartic, ZeroYawIsARoot) {
    const MinimalInstance inst = make_minimal(0.0, Vec3(0.8, 0.3, -0.1), attitude_from_angles(0.03, -0.02, 0.031, -0.018), 1);
    const auto rows = rows_of(inst);
    const QuarticPolynomial p = build_quartic(rows);
    const double scale = *std::max_element(p.c.begin(), p.c.end(), [](double a, double b) { return std::abs(a) < std::abs(b); });
    EXPECT_LE(std::abs(p.c[4]), 1e-10 * std::abs(scale));
}

TEST(BuildQuartic, MatchesNumericDeterminant) {
    std::mt19937_64 rng(24);
    std::uniform_real_distribution<double> r(-1.0, 1.0);
    for (int i = 0; i < 1000; ++i) {
        std::array<CoefficientRow, 4> rows{oracle::random_row(rng), oracle::random_row(rng), oracle::random_row(rng),
                                           oracle::random_row(rng)};
        const QuarticPolynomial p = build_quartic(rows);
        double scale = 0.0;
        for (double c : p.c) {
            scale = std::max(scale, std::abs(c));
        }
        for (int k = 0; k < 5; ++k) {
            const double x = r(rng);
            ASSERT_NEAR(p.evaluate(x), oracle::system_matrix(rows, x).determinant(), 1e-10 * scale);
        }
        const auto c = oracle::interpolated_det_coefficients(rows);
        for (int k = 0; k < 5; ++k) {
            ASSERT_NEAR(p.c[k], c[k], 1e-10 * scale);
        }
    }
}

TEST(BuildQuartic, HomogeneousOfDegreeFour) {
    std::mt19937_64 rng(25);
    std::array<CoefficientRow, 4> rows{oracle::random_row(rng), oracle::random_row(rng), oracle::random_row(rng),
                                       oracle::random_row(rng)};
    const QuarticPolynomial p = build_quartic(rows);
    const double s = 1.7;
    for (auto &row : rows) {
        for (double &a : row.a) {
            a *= s;
        }
    }
    const QuarticPolynomial q = build_quartic(rows);
    for (int k = 0; k < 5; ++k) {
        EXPECT_NEAR(q.c[k], std::pow(s, 4) * p.c[k], 1e-12 * std::abs(q.c[k]) + 1e-15);
    }
}

TEST(RecoverTranslation, MetricScaleWithTwoCameras) {
    // Scale is observable once the rig rotates; here only through the roll/pitch change.
    const MinimalInstance inst = make_minimal(0.0, Vec3(1, 0, 0), attitude_from_angles(0.05, -0.03, 0.054, -0.027), 2);
    const auto rows = rows_of(inst);
    const TranslationEstimate est = recover_translation(rows, 0.0);
    EXPECT_NEAR((est.t_tilde - Vec3(1, 0, 0)).norm(), 0.0, 1e-9);
    EXPECT_FALSE(est.degenerate);

    auto scaled = rows;
    const std::array<double, 4> factors{0.5, 3.0, 1.2, 7.5};
    for (int i = 0; i < 4; ++i) {
        for (double &a : scaled[i].a) {
            a *= factors[i];
        }
    }
    EXPECT_NEAR((recover_translation(scaled, 0.0).t_tilde - est.t_tilde).norm(), 0.0, 1e-12);
}

TEST(RecoverTranslation, PureTranslationLosesScale) {
    // R = I: every row has a zero right-hand side, so t is a null vector of the system.
    const MinimalInstance inst = make_minimal(0.0, Vec3(1, 0, 0), AttitudePrior{}, 2);
    const TranslationEstimate est = recover_translation(rows_of(inst), 0.0);
    EXPECT_TRUE(est.degenerate);
    EXPECT_NEAR(std::abs(est.null_direction.x()), 1.0, 1e-9);
}

TEST(RecoverTranslation, SingleCameraLosesScale) {
    const Vec3 t(0.6, -0.2, 0.5);
    const MinimalInstance inst = make_minimal(0.0, t, AttitudePrior{}, 3, {0, 0, 0, 0});
    const auto rows = rows_of(inst);
    const TranslationEstimate est = recover_translation(rows, 0.0);
    EXPECT_LT(est.conditioning, 1e-10);
    EXPECT_TRUE(est.degenerate);
    EXPECT_NEAR(std::abs(est.null_direction.dot(t.normalized())), 1.0, 1e-9);
}

TEST(FourPointSolve, ExactAtZeroYaw) {
    const MinimalInstance inst = make_minimal(0.0, Vec3(1, 0, 0), AttitudePrior{}, 4);
    const SolverOutput out = four_point_solve(inst.matches, inst.rig, inst.prior);
    // Pure translation also admits a second, pure-rotation solution; the exact one must be present.
    ASSERT_FALSE(out.candidates.empty());
    bool found = false;
    for (const PoseCandidate &c : out.candidates) {
        found |= rotation_error(inst.pose.rotation, c.pose.rotation) <= 1e-9 &&
                 *translation_direction_error(inst.pose.translation, c.pose.translation) <= 1e-8 &&
                 std::abs(c.yaw) <= 1e-10;
    }
    EXPECT_TRUE(found);
}

TEST(FourPointSolve, SmallYawBiasAndDegradation) {
    const AttitudePrior prior = attitude_from_angles(0.02, -0.03, 0.022, -0.027);
    const Vec3 t = Vec3(0.3, 0.9, 0.1).normalized();
    const MinimalInstance one = make_minimal(deg2rad(1.0), t, prior, 5);
    const MinimalInstance ten = make_minimal(deg2rad(10.0), t, prior, 5);
    const double e1 = best_rotation_error(four_point_solve(one.matches, one.rig, one.prior), one.pose);
    const double e10 = best_rotation_error(four_point_solve(ten.matches, ten.rig, ten.prior), ten.pose);
    EXPECT_LE(rad2deg(e1), 0.05);
    EXPECT_GT(e10, e1);
}

TEST(FourPointSolve, InputsAreConsistentWithZeroYawCandidate) {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const MinimalInstance inst = make_minimal(0.0, Vec3(0.2, 1.0, -0.1), attitude_from_angles(0.05, 0.02, 0.05, 0.021), seed);
        const SolverOutput out = four_point_solve(inst.matches, inst.rig, inst.prior);
        double best = std::numeric_limits<double>::infinity();
        for (const PoseCandidate &c : out.candidates) {
            double worst = 0.0;
            for (const Correspondence &m : inst.matches) {
                worst = std::max(worst, residual_angle(c.pose, m, inst.rig).angle);
            }
            best = std::min(best, worst);
        }
        EXPECT_LE(best, 1e-8) << "seed " << seed;
    }
}

TEST(FourPointSolve, CandidatesSolveTheLinearizedSystem) {
    for (double deg : {1.0, 5.0, 15.0}) {
        const MinimalInstance inst = make_minimal(deg2rad(deg), Vec3(0.2, 1.0, -0.1), attitude_from_angles(0.02, 0.0, 0.021, 0.003), 9);
        SolverOptions opt;
        opt.root_bound = deg2rad(20.0);
        const SolverOutput out = four_point_solve(inst.matches, inst.rig, inst.prior, opt);
        ASSERT_FALSE(out.candidates.empty());
        const auto rows = rows_of(inst);
        for (const PoseCandidate &c : out.candidates) {
            const Vec3 t_tilde = inst.prior.frame1 * c.pose.translation;
            for (const CoefficientRow &row : rows) {
                double scale = 0.0;
                for (double a : row.a) {
                    scale = std::max(scale, std::abs(a));
                }
                EXPECT_NEAR(row.evaluate(t_tilde, c.yaw), 0.0, 1e-9 * scale * (1.0 + t_tilde.norm()));
            }
        }
    }
}

TEST(FourPointSolve, PureRotation) {
    const MinimalInstance inst = make_minimal(deg2rad(0.5), Vec3::Zero(), attitude_from_angles(0.01, 0.02, 0.012, 0.018), 6);
    const SolverOutput out = four_point_solve(inst.matches, inst.rig, inst.prior);
    ASSERT_FALSE(out.candidates.empty());
    EXPECT_LE(rad2deg(best_rotation_error(out, inst.pose)), 0.05);
}

TEST(FourPointSolve, PlanarScene) {
    // All four points on the road plane z = -1.5 m.
    RigCalibration rig = make_ring_rig(2, 1.0);
    const AttitudePrior prior = attitude_from_angles(0.01, -0.01, 0.011, -0.012);
    const RelativePose pose = compose_final_pose(prior, deg2rad(0.8), Vec3(0.1, 1.0, 0.0));
    std::array<Correspondence, 4> matches{
        oracle::observe(rig, 0, pose, Vec3(-2.0, 8.0, -1.5)), oracle::observe(rig, 0, pose, Vec3(3.0, 15.0, -1.5)),
        oracle::observe(rig, 1, pose, Vec3(1.0, -9.0, -1.5)), oracle::observe(rig, 1, pose, Vec3(-2.5, -20.0, -1.5))};
    const SolverOutput out = four_point_solve(matches, rig, prior);
    ASSERT_FALSE(out.candidates.empty());
    EXPECT_LE(rad2deg(best_rotation_error(out, pose)), 0.05);
}

TEST(FourPointSolve, CandidatesAreRankedAndBounded) {
    const MinimalInstance inst = make_minimal(deg2rad(2.0), Vec3(0.5, 0.5, 0.1), AttitudePrior{}, 8);
    const SolverOutput out = four_point_solve(inst.matches, inst.rig, inst.prior);
    ASSERT_LE(out.candidates.size(), 4u);
    for (std::size_t i = 1; i < out.candidates.size(); ++i) {
        EXPECT_LE(out.candidates[i - 1].quartic_residual, out.candidates[i].quartic_residual);
    }
    for (const PoseCandidate &c : out.candidates) {
        EXPECT_LT(std::abs(c.yaw), kDefaultRootBound);
        EXPECT_TRUE(is_rotation(c.pose.rotation, 1e-12));
    }
}

}  // namespace
}  // namespace gcpose
