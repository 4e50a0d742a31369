#pragma once

#include "armbench/robot_model.hpp"
#include "armbench/types.hpp"

namespace arm {

/// One-pass bundle of the joint-space dynamics terms at a state.
struct JointDynamicsTerms {
  MatX mass_matrix;  // n x n symmetric positive-definite
  VecX bias;         // C(q,qd) qd + G(q)
  VecX gravity;      // G(q) alone
};

/// Task-space inertia and its symmetric positive-semidefinite square root,
/// lambda_sqrt * lambda_sqrt = lambda.
struct TaskInertia {
  Mat6 lambda;
  Mat6 lambda_sqrt;
};

/// Recursive Newton-Euler: tau = M(q) qdd + C(q,qd) qd + G(q), no external wrench.
VecX inverse_dynamics(const RobotModel& model, const VecX& q, const VecX& qd, const VecX& qdd);

/// Composite-rigid-body mass matrix M(q).
MatX mass_matrix(const RobotModel& model, const VecX& q);

/// C(q,qd) qd + G(q).
VecX bias_forces(const RobotModel& model, const VecX& q, const VecX& qd);

/// G(q) alone.
VecX gravity_forces(const RobotModel& model, const VecX& q);

JointDynamicsTerms dynamics_terms(const RobotModel& model, const VecX& q, const VecX& qd);

/// qdd = M(q)^-1 (tau - bias), solved by Cholesky.
VecX forward_dynamics(const RobotModel& model, const VecX& q, const VecX& qd, const VecX& tau);

/// lambda = (J M^-1 J^T + damping I)^-1 with the square root from the
/// symmetric eigendecomposition P D^{1/2} P^T. Throws SingularityError when
/// the damped J M^-1 J^T has an eigenvalue below 1e-12.
TaskInertia task_space_inertia(const MatX& M, const Jacobian& J, double damping = 1e-6);

/// D = lambda_sqrt K^{1/2} + K^{1/2} lambda_sqrt for diagonal stiffness K
/// (element-wise square root), yielding a critically damped closed loop.
Mat6 critical_damping(const Mat6& lambda_sqrt, const Vec6& k_des_diag);

}  // namespace arm
