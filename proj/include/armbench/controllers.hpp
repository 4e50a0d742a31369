#pragma once

#include <string_view>

#include "armbench/dynamics.hpp"
#include "armbench/kinematics.hpp"
#include "armbench/qp_solver.hpp"
#include "armbench/robot_model.hpp"
#include "armbench/types.hpp"

namespace arm {

struct ControlTarget {
  Pose pose_des;
  Twist twist_des;
};

enum class CommandKind { position, torque };

struct ControlCommand {
  CommandKind kind = CommandKind::position;
  VecX q_des;    // position kind
  VecX tau_des;  // torque kind, raw (the plant applies the clamp)
  VecX qd_des;   // commanded joint velocity, kept for logging on both kinds
};

/// [desired - current translation; shortest-path axis*angle of the relative
/// rotation], rotational norm <= pi, expressed in the base frame.
Vec6 pose_error(const Pose& current, const Pose& desired);

/// Twist that moves prev to curr over dt: linear displacement / dt and
/// shortest-path axis-angle of the relative rotation / dt.
Twist derive_desired_twist(const Pose& prev, const Pose& curr, double dt);

/// f = K (x_des - x) + D (xd_des - xd) with diagonal stiffness K and the
/// critically damped D from the current task inertia.
Wrench impedance_wrench(const Vec6& k_des_diag, const Mat6& d_des, const Pose& pose,
                        const Twist& twist, const ControlTarget& target);

/// PD acceleration toward a static joint posture: K (q_t - q) - D qd.
VecX nullspace_feedback(const VecX& k_n_diag, const VecX& d_n_diag,
                        const VecX& q_null_target, const JointState& state);

struct DLSParams {
  double damping_lambda = 0.01;
  double epsilon = 0.005;      // manipulability threshold for the damped branch
  double dt = 0.001;
  double feedback_gain = 10.0; // task pose feedback, 1/s (1/dt capped at 10)
  bool damped_branch = true;   // false exposes the raw pseudo-inverse
};

/// Velocity-level inverse kinematics with damped least squares near
/// singularities, integrated to a position command.
ControlCommand dls_ik_step(const RobotModel& model, const JointState& state,
                           const ControlTarget& target, const DLSParams& params);

/// Torque command from the IK scheme: differentiate the desired joint
/// velocity against the previous tick's value and convert through the
/// equation of motion. No constraint handling.
ControlCommand id_step(const RobotModel& model, const JointState& state,
                       const ControlTarget& target, const DLSParams& params,
                       const VecX& qd_des_prev);

enum class NullspaceMode { fixed, dynamic };

struct QPControllerParams {
  Vec6 k_des_diag;
  Vec6 w_track_diag;
  VecX s_diag;        // 0/1 joint selection
  VecX w_joint_diag;
  VecX k_n_diag;
  VecX d_n_diag;
  VecX q_null_target;  // empty: captured from the first controller step
  double dt = 0.001;
  NullspaceMode nullspace_mode = NullspaceMode::fixed;
  // Column manipulability floors at 1 for revolute joints, so the lock
  // threshold sits just above it: locked when the linear contribution of the
  // column drops below ~3 cm of lever.
  double lambda_threshold = 1.0005;
  double weight_reduction_exponent = 1.0;
  bool unlock_hysteresis = false;  // unlock only above unlock_factor * threshold
  double unlock_factor = 1.5;
  double lambda_damping = 1e-6;    // task-inertia regularization

  static QPControllerParams defaults(int n);
};

/// Result of the per-tick nullspace adaptation.
struct NullspaceAdaptation {
  VecX s_diag;
  VecX q_null_target;
  VecX w_joint_diag_eff;
  int locked_count = 0;
};

/// Locks joint i (S_ii = 1) while its column manipulability is at or below
/// the threshold, freezing its target at the angle it had when it locked,
/// and scales the joint weight down by (1 + locked)^-exponent.
/// prev_s_diag / prev_q_null_target carry the lock state across ticks and may
/// be empty on the first call.
NullspaceAdaptation dynamic_nullspace_update(const Jacobian& J, const QPControllerParams& params,
                                             const JointState& state, const VecX& prev_s_diag,
                                             const VecX& prev_q_null_target);

/// Assembles the compliance QP over joint accelerations: impedance tracking
/// plus selected-joint posture objective, subject to position, velocity and
/// torque rows. params carries the effective S / weights / nullspace target.
QPProblem build_qp(const RobotModel& model, const JointState& state, const ControlTarget& target,
                   const QPControllerParams& params, const JointDynamicsTerms& dyn,
                   const TaskInertia& task_inertia);

struct ControllerDiagnostics {
  int solver_iterations = 0;
  QPStatus solver_status = QPStatus::solved;
  bool used_solver = false;
  bool gravity_fallback = false;
  VecX lock_mask;             // empty when the controller has no lock notion
  double hessian_min_eig = 0; // pre-repair, NaN when no QP was built
};

/// Common stepping interface for the three controllers. Instances hold
/// per-tick memory and are single-owner.
class Controller {
 public:
  virtual ~Controller() = default;
  virtual ControlCommand step(const JointState& state, const ControlTarget& target) = 0;
  virtual void reset() {}
  virtual std::string_view name() const = 0;
  const ControllerDiagnostics& diagnostics() const { return diag_; }

 protected:
  ControllerDiagnostics diag_;
};

class DlsIkController final : public Controller {
 public:
  DlsIkController(RobotModel model, DLSParams params);
  ControlCommand step(const JointState& state, const ControlTarget& target) override;
  std::string_view name() const override { return "ik"; }

 private:
  RobotModel model_;
  DLSParams params_;
};

class InverseDynamicsController final : public Controller {
 public:
  InverseDynamicsController(RobotModel model, DLSParams params);
  ControlCommand step(const JointState& state, const ControlTarget& target) override;
  void reset() override;
  std::string_view name() const override { return "id"; }

 private:
  RobotModel model_;
  DLSParams params_;
  VecX qd_des_prev_;
};

class QpComplianceController final : public Controller {
 public:
  QpComplianceController(RobotModel model, QPControllerParams params, QPSettings solver_settings = {});
  ControlCommand step(const JointState& state, const ControlTarget& target) override;
  void reset() override;
  std::string_view name() const override { return "qp"; }
  const QPControllerParams& params() const { return params_; }

 private:
  RobotModel model_;
  QPControllerParams params_;
  QPSolver solver_;
  VecX s_state_;
  VecX q_null_state_;
  bool capture_null_target_;  // no configured target: capture q at the first step
  bool captured_ = false;
};

}  // namespace arm
