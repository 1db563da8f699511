#ifndef GCPOSE_SYNTHETIC_H_
#define GCPOSE_SYNTHETIC_H_

#include "gcpose/ransac.h"
#include "gcpose/types.h"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace gcpose {

enum class OutlierModel {
    kUniformMismatch,  // frame-1 observation replaced by a random pixel of the same camera
    kRigidMotion,      // each camera sees its own rigid object moving independently of the rig
};

std::string to_string(OutlierModel m);
OutlierModel outlier_model_from_string(const std::string &s);

// Synthetic road-scene setup: a ring of outward-facing pinhole cameras, points in each
// camera's frustum, a small rig motion and a noisy roll/pitch prior.
struct ScenarioConfig {
    int num_cameras = 2;
    double baseline = 1.0;  // m, distance between opposite camera centers
    int num_points = 100;   // assigned to cameras round-robin

    double rotation_max_deg = 5.0;    // bound on the relative rotation angle when yaw is random
    std::optional<double> yaw_deg;    // fixed relative yaw magnitude (random sign)
    double tilt_max_deg = 5.0;        // absolute roll/pitch of frame 0 drawn from [-tilt_max, tilt_max]
    double tilt_change_deg = 0.25;    // roll/pitch change between frames, per axis
    double translation_norm = 1.0;    // m

    double pixel_noise_stdv = 0.0;    // px, per image coordinate, both frames
    double attitude_noise_stdv = 0.0; // deg, on each roll/pitch angle of the prior

    double outlier_ratio = 0.0;
    OutlierModel outlier_model = OutlierModel::kUniformMismatch;
    double outlier_min_residual = 1.745329251994e-3;  // rad; outliers below this are redrawn
    double object_yaw_min_deg = 2.0;  // extra yaw of an independently moving object
    double object_yaw_max_deg = 6.0;

    double focal = 718.0;  // px
    int image_width = 1241;
    int image_height = 376;
    double depth_min = 5.0;   // m
    double depth_max = 50.0;  // m

    std::uint64_t seed = 0;

    void validate() const;
};

struct SyntheticInstance {
    RigCalibration rig{std::vector<CameraExtrinsics>{CameraExtrinsics{}}};
    RelativePose true_pose;
    double true_yaw = 0.0;  // relative yaw between the prior-compensated frames, rad
    AttitudePrior true_prior;
    AttitudePrior noisy_prior;
    std::vector<Correspondence> correspondences;
    std::vector<bool> inlier_truth;
};

class InfeasibleScenario : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct Pinhole {
    double focal = 718.0;
    int width = 1241;
    int height = 376;

    double cx() const { return 0.5 * width; }
    double cy() const { return 0.5 * height; }
    Vec3 bearing(double x, double y) const { return Vec3((x - cx()) / focal, (y - cy()) / focal, 1.0).normalized(); }
    // False when the point is behind the camera or projects outside the image.
    bool project(const Vec3 &p_cam, double &x, double &y) const;
};

// Cameras on a circle of diameter `baseline` in the horizontal rig plane, each looking
// radially outward (camera z along the radius, camera y pointing down the rig z axis).
RigCalibration make_ring_rig(int num_cameras, double baseline);

// Deterministic in the seed drawn from `rng`: geometry, pixel noise, attitude noise and
// outliers each use their own stream, so changing one noise level leaves the rest unchanged.
SyntheticInstance generate_instance(const ScenarioConfig &cfg, Rng &rng);
SyntheticInstance generate_instance(const ScenarioConfig &cfg);

}  // namespace gcpose

#endif  // GCPOSE_SYNTHETIC_H_
