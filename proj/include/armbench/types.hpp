#pragma once

#include <Eigen/Dense>
#include <Eigen/Geometry>
#include <stdexcept>
#include <string>

namespace arm {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat6 = Eigen::Matrix<double, 6, 6>;
using VecX = Eigen::VectorXd;
using MatX = Eigen::MatrixXd;

/// 6xn task Jacobian, rows ordered [linear; angular].
using Jacobian = Eigen::Matrix<double, 6, Eigen::Dynamic>;

/// Task-space force, ordered [force; torque] to match the twist convention.
using Wrench = Vec6;

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SingularityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline Mat3 skew(const Vec3& v) {
  Mat3 m;
  m << 0.0, -v.z(), v.y(), v.z(), 0.0, -v.x(), -v.y(), v.x(), 0.0;
  return m;
}

/// Rigid-body configuration as unit quaternion (canonical sign w >= 0) plus translation.
struct Pose {
  Eigen::Quaterniond rotation{1.0, 0.0, 0.0, 0.0};
  Vec3 translation{0.0, 0.0, 0.0};

  Pose() = default;
  Pose(const Eigen::Quaterniond& rot, const Vec3& trans)
      : rotation(rot), translation(trans) {
    canonicalize();
  }

  static Pose identity() { return Pose{}; }

  static Pose from_matrix(const Eigen::Matrix4d& T) {
    return Pose(Eigen::Quaterniond(Mat3(T.topLeftCorner<3, 3>())),
                Vec3(T.topRightCorner<3, 1>()));
  }

  Mat3 rotation_matrix() const { return rotation.toRotationMatrix(); }

  Eigen::Matrix4d matrix() const {
    Eigen::Matrix4d T = Eigen::Matrix4d::Identity();
    T.topLeftCorner<3, 3>() = rotation_matrix();
    T.topRightCorner<3, 1>() = translation;
    return T;
  }

  Pose operator*(const Pose& rhs) const {
    return Pose(rotation * rhs.rotation,
                translation + rotation * rhs.translation);
  }

  Vec3 operator*(const Vec3& point) const {
    return translation + rotation * point;
  }

  Pose inverse() const {
    const Eigen::Quaterniond inv = rotation.conjugate();
    return Pose(inv, inv * (-translation));
  }

  /// Flip to the w >= 0 representative; renormalize once drift exceeds 1e-9.
  void canonicalize() {
    if (std::abs(rotation.norm() - 1.0) > 1e-9) rotation.normalize();
    if (rotation.w() < 0.0) rotation.coeffs() = -rotation.coeffs();
  }
};

/// Task-space velocity, [linear; angular] when packed as a 6-vector.
struct Twist {
  Vec3 linear{0.0, 0.0, 0.0};
  Vec3 angular{0.0, 0.0, 0.0};

  Vec6 vector() const {
    Vec6 v;
    v << linear, angular;
    return v;
  }

  static Twist from_vector(const Vec6& v) {
    return Twist{v.head<3>(), v.tail<3>()};
  }
};

/// Generalized joint coordinates and velocities.
struct JointState {
  VecX q;
  VecX qd;

  JointState() = default;
  JointState(VecX q_in, VecX qd_in) : q(std::move(q_in)), qd(std::move(qd_in)) {}

  static JointState zero(int n) {
    return JointState(VecX::Zero(n), VecX::Zero(n));
  }
};

/// Shortest-path axis-angle vector of a unit quaternion (norm <= pi).
inline Vec3 quaternion_log(const Eigen::Quaterniond& q_in) {
  Eigen::Quaterniond q = q_in;
  if (q.w() < 0.0) q.coeffs() = -q.coeffs();
  const double vec_norm = q.vec().norm();
  if (vec_norm < 1e-14) return 2.0 * q.vec();
  const double angle = 2.0 * std::atan2(vec_norm, q.w());
  return (angle / vec_norm) * q.vec();
}

}  // namespace arm
