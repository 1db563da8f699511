#ifndef GCPOSE_TYPES_H_
#define GCPOSE_TYPES_H_

#include <Eigen/Dense>

#include <cstddef>
#include <vector>

namespace gcpose {

using Vec3 = Eigen::Vector3d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat3 = Eigen::Matrix3d;

// Camera-to-rig extrinsics of one camera of the rig.
struct CameraExtrinsics {
    Mat3 rotation = Mat3::Identity();  // camera frame -> rig frame
    Vec3 offset = Vec3::Zero();        // camera center in the rig frame, meters
};

// Immutable multi-camera rig calibration. Construction validates that every
// rotation is orthonormal with det +1 (1e-12) and that there is at least one camera.
class RigCalibration {
  public:
    explicit RigCalibration(std::vector<CameraExtrinsics> cameras);

    std::size_t size() const { return cameras_.size(); }
    const CameraExtrinsics &camera(int index) const;
    bool valid_index(int index) const { return index >= 0 && static_cast<std::size_t>(index) < cameras_.size(); }
    const std::vector<CameraExtrinsics> &cameras() const { return cameras_; }

  private:
    std::vector<CameraExtrinsics> cameras_;
};

// A ray in the rig frame as a Pluecker line: unit direction u and moment m = p x u.
struct PlueckerLine {
    Vec3 direction = Vec3::UnitZ();
    Vec3 moment = Vec3::Zero();

    Vec6 vector() const {
        Vec6 l;
        l << direction, moment;
        return l;
    }
};

// A match between a ray observed in frame 0 and a ray observed in frame 1.
// Bearings are unit vectors in the respective camera frame.
struct Correspondence {
    int camera0 = 0;
    int camera1 = 0;
    Vec3 bearing0 = Vec3::UnitZ();
    Vec3 bearing1 = Vec3::UnitZ();
};

// Roll/pitch part (R_p * R_r) of the rig attitude for both frames. Each matrix maps
// rig coordinates into a gravity-aligned frame that has no yaw.
struct AttitudePrior {
    Mat3 frame0 = Mat3::Identity();
    Mat3 frame1 = Mat3::Identity();
};

// Rigid motion of the rig between the two frames. A point with rig coordinates X0 in
// frame 0 has rig coordinates X1 = rotation * X0 + translation in frame 1.
struct RelativePose {
    Mat3 rotation = Mat3::Identity();
    Vec3 translation = Vec3::Zero();
};

}  // namespace gcpose

#endif  // GCPOSE_TYPES_H_
