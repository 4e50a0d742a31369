#pragma once

#include <string>
#include <vector>

#include "armbench/types.hpp"

namespace arm {

/// Joint screw axis in the base frame at the zero configuration, stored in
/// (omega; v) order. Task-space 6-vectors elsewhere are [linear; angular];
/// kinematics reorders when building Jacobian columns.
struct ScrewAxis {
  Vec3 omega{0.0, 0.0, 0.0};
  Vec3 v{0.0, 0.0, 0.0};

  Vec6 vector() const {
    Vec6 s;
    s << omega, v;
    return s;
  }
};

/// Inertial parameters of one link. Link frame i coincides with the base
/// frame at the zero configuration, so `com` is the home-pose center of mass
/// in base coordinates and `inertia` is taken about the com with base-aligned
/// axes at home.
struct LinkInertia {
  double mass = 0.0;
  Vec3 com{0.0, 0.0, 0.0};
  Mat3 inertia = Mat3::Zero();
};

/// Per-joint position, velocity and torque bounds.
struct JointLimits {
  VecX q_min, q_max;
  VecX qd_min, qd_max;
  VecX tau_min, tau_max;
};

/// Immutable description of the manipulator: screw axes, home pose of the
/// end-effector frame, link inertial parameters, limits and gravity.
struct RobotModel {
  int n = 0;
  std::vector<ScrewAxis> axes;
  Pose home;
  std::vector<LinkInertia> links;
  JointLimits limits;
  Vec3 gravity{0.0, 0.0, -9.81};
};

/// Loads and validates a model file; throws ParseError on malformed input and
/// ValidationError naming the first violated invariant.
RobotModel load_model(const std::string& path);

/// Writes the documented key/value model format; load_model(write_model(m))
/// reproduces m field-for-field.
void write_model(const RobotModel& model, const std::string& path);

/// Builds a model from an already-parsed key/value file (no validation).
RobotModel model_from_kv(const class KvFile& kv);
class KvFile model_to_kv(const RobotModel& model);

/// Returns one human-readable message per violated invariant; empty iff the
/// model is valid. Violations are data, not errors.
std::vector<std::string> validate_model(const RobotModel& model);

}  // namespace arm
