#include "armbench/controllers.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <limits>

namespace arm {

Vec6 pose_error(const Pose& current, const Pose& desired) {
  Vec6 err;
  err.head<3>() = desired.translation - current.translation;
  err.tail<3>() = quaternion_log(desired.rotation * current.rotation.conjugate());
  return err;
}

Twist derive_desired_twist(const Pose& prev, const Pose& curr, double dt) {
  Twist t;
  t.linear = (curr.translation - prev.translation) / dt;
  t.angular = quaternion_log(curr.rotation * prev.rotation.conjugate()) / dt;
  return t;
}

Wrench impedance_wrench(const Vec6& k_des_diag, const Mat6& d_des, const Pose& pose,
                        const Twist& twist, const ControlTarget& target) {
  const Vec6 err = pose_error(pose, target.pose_des);
  const Vec6 vel_err = target.twist_des.vector() - twist.vector();
  return k_des_diag.cwiseProduct(err) + d_des * vel_err;
}

VecX nullspace_feedback(const VecX& k_n_diag, const VecX& d_n_diag,
                        const VecX& q_null_target, const JointState& state) {
  return k_n_diag.cwiseProduct(q_null_target - state.q) - d_n_diag.cwiseProduct(state.qd);
}

ControlCommand dls_ik_step(const RobotModel& model, const JointState& state,
                           const ControlTarget& target, const DLSParams& params) {
  const Jacobian J = space_jacobian(model, state.q);
  const Pose pose = forward_kinematics(model, state.q);
  const double k_fb = std::min(1.0 / params.dt, params.feedback_gain);
  const Vec6 xdot_cmd = target.twist_des.vector() + k_fb * pose_error(pose, target.pose_des);

  Mat6 JJt = J * J.transpose();
  if (params.damped_branch && manipulability(J) <= params.epsilon) {
    JJt += params.damping_lambda * Mat6::Identity();
  }
  const VecX qd_des = J.transpose() * JJt.ldlt().solve(xdot_cmd);

  ControlCommand cmd;
  cmd.kind = CommandKind::position;
  cmd.q_des = state.q + qd_des * params.dt;
  cmd.qd_des = qd_des;
  return cmd;
}

ControlCommand id_step(const RobotModel& model, const JointState& state,
                       const ControlTarget& target, const DLSParams& params,
                       const VecX& qd_des_prev) {
  ControlCommand cmd = dls_ik_step(model, state, target, params);
  const VecX qdd_des = (cmd.qd_des - qd_des_prev) / params.dt;
  cmd.kind = CommandKind::torque;
  cmd.tau_des = inverse_dynamics(model, state.q, state.qd, qdd_des);
  cmd.q_des.resize(0);
  return cmd;
}

QPControllerParams QPControllerParams::defaults(int n) {
  QPControllerParams p;
  p.k_des_diag << 80.0, 80.0, 80.0, 5.0, 5.0, 5.0;
  p.w_track_diag = Vec6::Constant(15.0);
  p.s_diag = VecX::Zero(n);
  if (n >= 2) {
    p.s_diag[0] = 1.0;
    p.s_diag[1] = 1.0;
  }
  p.w_joint_diag = VecX::Ones(n);
  p.k_n_diag = VecX::Constant(n, 40.0);
  p.d_n_diag = VecX::Constant(n, 2.0 * std::sqrt(40.0));
  return p;
}

NullspaceAdaptation dynamic_nullspace_update(const Jacobian& J, const QPControllerParams& params,
                                             const JointState& state, const VecX& prev_s_diag,
                                             const VecX& prev_q_null_target) {
  const int n = static_cast<int>(J.cols());
  NullspaceAdaptation out;
  out.s_diag = VecX::Zero(n);
  out.q_null_target = params.q_null_target.size() == n ? params.q_null_target : VecX(state.q);

  for (int i = 0; i < n; ++i) {
    const double mi = joint_manipulability(J, i);
    const bool was_locked = prev_s_diag.size() == n && prev_s_diag[i] > 0.5;
    bool locked;
    if (was_locked && params.unlock_hysteresis) {
      locked = !(mi > params.unlock_factor * params.lambda_threshold);
    } else {
      locked = mi <= params.lambda_threshold;
    }
    if (locked) {
      out.s_diag[i] = 1.0;
      out.q_null_target[i] =
          was_locked && prev_q_null_target.size() == n ? prev_q_null_target[i] : state.q[i];
      ++out.locked_count;
    }
  }
  const double scale = std::pow(1.0 + out.locked_count, -params.weight_reduction_exponent);
  out.w_joint_diag_eff = params.w_joint_diag * scale;
  return out;
}

QPProblem build_qp(const RobotModel& model, const JointState& state, const ControlTarget& target,
                   const QPControllerParams& params, const JointDynamicsTerms& dyn,
                   const TaskInertia& task_inertia) {
  const int n = model.n;
  const Jacobian J = space_jacobian(model, state.q);
  const Vec6 jdot_qdot = jacobian_dot_qdot(model, state.q, state.qd);
  const Pose pose = forward_kinematics(model, state.q);
  const Twist twist = Twist::from_vector(J * state.qd);

  const Mat6 d_des = critical_damping(task_inertia.lambda_sqrt, params.k_des_diag);
  const Wrench f_des = impedance_wrench(params.k_des_diag, d_des, pose, twist, target);
  const Vec6 lambda_inv_f = task_inertia.lambda.llt().solve(f_des);

  // e_track = J qdd + (Jdot qd - lambda^-1 f); e_joint = S (qdd - qdd_fb).
  const Vec6 track_residual = jdot_qdot - lambda_inv_f;
  const VecX qdd_fb =
      nullspace_feedback(params.k_n_diag, params.d_n_diag, params.q_null_target, state);
  const VecX sel_w = params.s_diag.cwiseProduct(params.w_joint_diag).cwiseProduct(params.s_diag);

  QPProblem qp;
  qp.P = 2.0 * (J.transpose() * params.w_track_diag.asDiagonal() * J + MatX(sel_w.asDiagonal()));
  qp.c = 2.0 * (J.transpose() * params.w_track_diag.cwiseProduct(track_residual) -
                sel_w.cwiseProduct(qdd_fb));

  const double dt = params.dt;
  qp.A = MatX::Zero(3 * n, n);
  qp.l = VecX(3 * n);
  qp.u = VecX(3 * n);
  qp.A.topRows(n) = 0.5 * dt * dt * MatX::Identity(n, n);
  qp.l.head(n) = model.limits.q_min - state.qd * dt - state.q;
  qp.u.head(n) = model.limits.q_max - state.qd * dt - state.q;
  qp.A.block(n, 0, n, n) = dt * MatX::Identity(n, n);
  qp.l.segment(n, n) = model.limits.qd_min - state.qd;
  qp.u.segment(n, n) = model.limits.qd_max - state.qd;
  qp.A.bottomRows(n) = dyn.mass_matrix;
  qp.l.tail(n) = model.limits.tau_min - dyn.bias;
  qp.u.tail(n) = model.limits.tau_max - dyn.bias;
  return qp;
}

DlsIkController::DlsIkController(RobotModel model, DLSParams params)
    : model_(std::move(model)), params_(params) {}

ControlCommand DlsIkController::step(const JointState& state, const ControlTarget& target) {
  diag_ = ControllerDiagnostics{};
  diag_.hessian_min_eig = std::numeric_limits<double>::quiet_NaN();
  return dls_ik_step(model_, state, target, params_);
}

InverseDynamicsController::InverseDynamicsController(RobotModel model, DLSParams params)
    : model_(std::move(model)), params_(params), qd_des_prev_(VecX::Zero(model_.n)) {}

void InverseDynamicsController::reset() { qd_des_prev_.setZero(); }

ControlCommand InverseDynamicsController::step(const JointState& state, const ControlTarget& target) {
  diag_ = ControllerDiagnostics{};
  diag_.hessian_min_eig = std::numeric_limits<double>::quiet_NaN();
  ControlCommand cmd = id_step(model_, state, target, params_, qd_des_prev_);
  qd_des_prev_ = cmd.qd_des;
  return cmd;
}

QpComplianceController::QpComplianceController(RobotModel model, QPControllerParams params,
                                               QPSettings solver_settings)
    : model_(std::move(model)),
      params_(std::move(params)),
      solver_(solver_settings),
      capture_null_target_(params_.q_null_target.size() != model_.n) {}

void QpComplianceController::reset() {
  solver_.reset();
  s_state_.resize(0);
  q_null_state_.resize(0);
  captured_ = false;
}

ControlCommand QpComplianceController::step(const JointState& state, const ControlTarget& target) {
  diag_ = ControllerDiagnostics{};
  if (capture_null_target_ && !captured_) {
    params_.q_null_target = state.q;
    captured_ = true;
  }

  const Jacobian J = space_jacobian(model_, state.q);
  const JointDynamicsTerms dyn = dynamics_terms(model_, state.q, state.qd);
  const TaskInertia ti = task_space_inertia(dyn.mass_matrix, J, params_.lambda_damping);

  QPControllerParams eff = params_;
  if (params_.nullspace_mode == NullspaceMode::dynamic) {
    const NullspaceAdaptation adapt =
        dynamic_nullspace_update(J, params_, state, s_state_, q_null_state_);
    eff.s_diag = adapt.s_diag;
    eff.q_null_target = adapt.q_null_target;
    eff.w_joint_diag = adapt.w_joint_diag_eff;
    s_state_ = adapt.s_diag;
    q_null_state_ = adapt.q_null_target;
  }
  diag_.lock_mask = eff.s_diag;

  const QPProblem qp = build_qp(model_, state, target, eff, dyn, ti);
  {
    Eigen::SelfAdjointEigenSolver<MatX> eig(qp.P, Eigen::EigenvaluesOnly);
    diag_.hessian_min_eig = eig.eigenvalues().minCoeff();
  }

  const QPSolution sol = solver_.solve(qp);
  diag_.used_solver = true;
  diag_.solver_iterations = sol.iterations;
  diag_.solver_status = sol.status;

  ControlCommand cmd;
  cmd.kind = CommandKind::torque;
  if (sol.status == QPStatus::solved) {
    cmd.tau_des = dyn.mass_matrix * sol.x + dyn.bias;
    cmd.qd_des = state.qd + sol.x * params_.dt;
  } else {
    diag_.gravity_fallback = true;
    cmd.tau_des = dyn.gravity;
    cmd.qd_des = state.qd;
  }
  return cmd;
}

}  // namespace arm
