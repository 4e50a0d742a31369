#include "armbench/kinematics.hpp"

#include <cmath>

namespace arm {

namespace {

Mat3 rodrigues(const Vec3& omega, double theta) {
  const Mat3 w = skew(omega);
  return Mat3::Identity() + std::sin(theta) * w + (1.0 - std::cos(theta)) * (w * w);
}

// Adjoint of a pose acting on (omega; v) spatial twists.
Mat6 adjoint(const Pose& T) {
  const Mat3 R = T.rotation_matrix();
  Mat6 ad = Mat6::Zero();
  ad.topLeftCorner<3, 3>() = R;
  ad.bottomLeftCorner<3, 3>() = skew(T.translation) * R;
  ad.bottomRightCorner<3, 3>() = R;
  return ad;
}

// Lie bracket [a, b] on (omega; v) twists.
Vec6 ad_twist(const Vec6& a, const Vec6& b) {
  const Vec3 wa = a.head<3>(), va = a.tail<3>();
  const Vec3 wb = b.head<3>(), vb = b.tail<3>();
  Vec6 out;
  out << wa.cross(wb), wa.cross(vb) + va.cross(wb);
  return out;
}

}  // namespace

Pose exp_screw(const ScrewAxis& axis, double theta) {
  const double wn = axis.omega.norm();
  if (wn < 1e-12) {
    return Pose(Eigen::Quaterniond::Identity(), axis.v * theta);
  }
  const Mat3 w = skew(axis.omega);
  const Mat3 R = rodrigues(axis.omega, theta);
  const Vec3 p = (Mat3::Identity() * theta + (1.0 - std::cos(theta)) * w +
                  (theta - std::sin(theta)) * (w * w)) *
                 axis.v;
  return Pose(Eigen::Quaterniond(R), p);
}

Pose forward_kinematics(const RobotModel& model, const VecX& q) {
  Pose T;
  for (int i = 0; i < model.n; ++i) {
    T = T * exp_screw(model.axes[i], q[i]);
  }
  return T * model.home;
}

Jacobian space_jacobian(const RobotModel& model, const VecX& q) {
  Jacobian J(6, model.n);
  Pose T;  // product of exponentials up to joint i-1
  for (int i = 0; i < model.n; ++i) {
    const Vec6 col = adjoint(T) * model.axes[i].vector();
    J.col(i).tail<3>() = col.head<3>();
    J.col(i).head<3>() = col.tail<3>();  // point velocity fixed up below
    T = T * exp_screw(model.axes[i], q[i]);
  }
  const Vec3 p_ee = (T * model.home).translation;
  for (int i = 0; i < model.n; ++i) {
    // Spatial linear part is the velocity of the body point at the origin;
    // shift it to the end-effector origin.
    J.col(i).head<3>() += J.col(i).tail<3>().cross(p_ee);
  }
  return J;
}

Vec6 jacobian_dot_qdot(const RobotModel& model, const VecX& q, const VecX& qd) {
  // Spatial columns S_i = Ad_{T_{i-1}} s_i obey d/dt S_i = [V_{i-1}, S_i]
  // with V_k the spatial twist of the subchain 1..k.
  Pose T;
  Vec6 chain_twist = Vec6::Zero();
  Vec6 dsum = Vec6::Zero();        // sum_i qd_i d/dt S_i, (omega; v) order
  Vec6 spatial_sum = Vec6::Zero(); // J_spatial * qd
  for (int i = 0; i < model.n; ++i) {
    const Vec6 col = adjoint(T) * model.axes[i].vector();
    dsum += qd[i] * ad_twist(chain_twist, col);
    spatial_sum += qd[i] * col;
    chain_twist += qd[i] * col;
    T = T * exp_screw(model.axes[i], q[i]);
  }
  const Vec3 p_ee = (T * model.home).translation;
  const Vec3 w_tot = spatial_sum.head<3>();
  const Vec3 p_dot = spatial_sum.tail<3>() + w_tot.cross(p_ee);

  // Columns of the task Jacobian are (v_i + w_i x p; w_i); differentiate and
  // contract with qd.
  Vec6 out;
  out.tail<3>() = dsum.head<3>();
  out.head<3>() = dsum.tail<3>() + dsum.head<3>().cross(p_ee) + w_tot.cross(p_dot);
  return out;
}

double manipulability(const Jacobian& J) {
  const Mat6 JJt = J * J.transpose();
  return std::sqrt(std::max(0.0, JJt.determinant()));
}

double joint_manipulability(const Jacobian& J, int i) {
  return J.col(i).norm();
}

}  // namespace arm
