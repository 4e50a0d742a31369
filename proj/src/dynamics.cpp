#include "armbench/dynamics.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <vector>

#include "armbench/kinematics.hpp"

namespace arm {

namespace {

// Spatial algebra in (omega; v) twist ordering. Link frame i coincides with
// the base frame at q = 0, so the joint screw expressed in its own link frame
// is the model's space-frame axis and all inter-link home transforms are
// identity.

Mat6 adjoint(const Pose& T) {
  const Mat3 R = T.rotation_matrix();
  Mat6 ad = Mat6::Zero();
  ad.topLeftCorner<3, 3>() = R;
  ad.bottomLeftCorner<3, 3>() = skew(T.translation) * R;
  ad.bottomRightCorner<3, 3>() = R;
  return ad;
}

Mat6 ad_matrix(const Vec6& twist) {
  const Mat3 w = skew(twist.head<3>());
  Mat6 ad = Mat6::Zero();
  ad.topLeftCorner<3, 3>() = w;
  ad.bottomLeftCorner<3, 3>() = skew(twist.tail<3>());
  ad.bottomRightCorner<3, 3>() = w;
  return ad;
}

// Spatial inertia about the link frame origin.
Mat6 spatial_inertia(const LinkInertia& link) {
  const Mat3 c = skew(link.com);
  Mat6 G = Mat6::Zero();
  G.topLeftCorner<3, 3>() = link.inertia - link.mass * c * c;
  G.topRightCorner<3, 3>() = link.mass * c;
  G.bottomLeftCorner<3, 3>() = -link.mass * c;
  G.bottomRightCorner<3, 3>() = link.mass * Mat3::Identity();
  return G;
}

struct ChainTransforms {
  // ad_step[i] = Ad(T_{i, i-1}) = Ad(exp(-[s_i] q_i))
  std::vector<Mat6> ad_step;
};

ChainTransforms chain_transforms(const RobotModel& model, const VecX& q) {
  ChainTransforms chain;
  chain.ad_step.reserve(model.n);
  for (int i = 0; i < model.n; ++i) {
    chain.ad_step.push_back(adjoint(exp_screw(model.axes[i], -q[i])));
  }
  return chain;
}

VecX rnea(const RobotModel& model, const VecX& q, const VecX& qd, const VecX& qdd,
          const Vec3& gravity) {
  const int n = model.n;
  const ChainTransforms chain = chain_transforms(model, q);

  std::vector<Vec6> V(n), Vdot(n);
  Vec6 V_prev = Vec6::Zero();
  Vec6 Vdot_prev = Vec6::Zero();
  Vdot_prev.tail<3>() = -gravity;  // fictitious base acceleration
  for (int i = 0; i < n; ++i) {
    const Vec6 s = model.axes[i].vector();
    V[i] = chain.ad_step[i] * V_prev + s * qd[i];
    Vdot[i] = chain.ad_step[i] * Vdot_prev + ad_matrix(V[i]) * s * qd[i] + s * qdd[i];
    V_prev = V[i];
    Vdot_prev = Vdot[i];
  }

  VecX tau(n);
  Vec6 F = Vec6::Zero();
  for (int i = n - 1; i >= 0; --i) {
    const Mat6 G = spatial_inertia(model.links[i]);
    Vec6 Fi = G * Vdot[i] - ad_matrix(V[i]).transpose() * (G * V[i]);
    if (i < n - 1) Fi += chain.ad_step[i + 1].transpose() * F;
    tau[i] = model.axes[i].vector().dot(Fi);
    F = Fi;
  }
  return tau;
}

}  // namespace

VecX inverse_dynamics(const RobotModel& model, const VecX& q, const VecX& qd, const VecX& qdd) {
  return rnea(model, q, qd, qdd, model.gravity);
}

MatX mass_matrix(const RobotModel& model, const VecX& q) {
  const int n = model.n;
  const ChainTransforms chain = chain_transforms(model, q);

  // Composite spatial inertias, accumulated tip to base.
  std::vector<Mat6> Gc(n);
  for (int i = 0; i < n; ++i) Gc[i] = spatial_inertia(model.links[i]);
  for (int i = n - 1; i >= 1; --i) {
    Gc[i - 1] += chain.ad_step[i].transpose() * Gc[i] * chain.ad_step[i];
  }

  MatX M = MatX::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    const Vec6 si = model.axes[i].vector();
    M(i, i) = si.dot(Gc[i] * si);
    Vec6 F = Gc[i] * si;
    for (int j = i; j >= 1; --j) {
      F = chain.ad_step[j].transpose() * F;
      M(i, j - 1) = M(j - 1, i) = model.axes[j - 1].vector().dot(F);
    }
  }
  return M;
}

VecX bias_forces(const RobotModel& model, const VecX& q, const VecX& qd) {
  return rnea(model, q, qd, VecX::Zero(model.n), model.gravity);
}

VecX gravity_forces(const RobotModel& model, const VecX& q) {
  return rnea(model, q, VecX::Zero(model.n), VecX::Zero(model.n), model.gravity);
}

JointDynamicsTerms dynamics_terms(const RobotModel& model, const VecX& q, const VecX& qd) {
  JointDynamicsTerms terms;
  terms.mass_matrix = mass_matrix(model, q);
  terms.bias = bias_forces(model, q, qd);
  terms.gravity = gravity_forces(model, q);
  return terms;
}

VecX forward_dynamics(const RobotModel& model, const VecX& q, const VecX& qd, const VecX& tau) {
  const MatX M = mass_matrix(model, q);
  const VecX rhs = tau - bias_forces(model, q, qd);
  return M.llt().solve(rhs);
}

TaskInertia task_space_inertia(const MatX& M, const Jacobian& J, double damping) {
  const Mat6 W = J * M.llt().solve(MatX(J.transpose())) + damping * Mat6::Identity();
  Eigen::SelfAdjointEigenSolver<Mat6> eig(0.5 * (W + W.transpose()));
  const Vec6 d = eig.eigenvalues();
  if (d.minCoeff() < 1e-12) {
    throw SingularityError("task_space_inertia: J M^-1 J^T singular (min eigenvalue " +
                           std::to_string(d.minCoeff()) + ")");
  }
  const Mat6 P = eig.eigenvectors();
  TaskInertia out;
  out.lambda = P * d.cwiseInverse().asDiagonal() * P.transpose();
  out.lambda_sqrt = P * d.cwiseInverse().cwiseSqrt().asDiagonal() * P.transpose();
  return out;
}

Mat6 critical_damping(const Mat6& lambda_sqrt, const Vec6& k_des_diag) {
  const Vec6 k_sqrt = k_des_diag.cwiseSqrt();
  return lambda_sqrt * k_sqrt.asDiagonal() + k_sqrt.asDiagonal() * lambda_sqrt;
}

}  // namespace arm
