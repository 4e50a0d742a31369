#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "armbench/controllers.hpp"
#include "armbench/trajectory.hpp"

namespace arm {

struct IntegrateResult {
  JointState state;
  bool diverged = false;  // pre-clamp velocity norm exceeded 1e3 rad/s
};

/// Semi-implicit Euler plant step. Joint positions are hard-clamped to the
/// model limits with the joint velocity zeroed on contact.
IntegrateResult integrate_step(const RobotModel& model, const JointState& state, const VecX& tau,
                               double dt);

struct ServoGains {
  VecX kp;
  VecX kd;
  static ServoGains defaults(int n) {
    return {VecX::Constant(n, 2000.0), VecX::Constant(n, 2.0)};
  }
};

/// Joint PD plus gravity torque driving position commands on the torque
/// plant, before the limit clamp.
VecX position_servo_raw(const RobotModel& model, const JointState& state, const VecX& q_des,
                        const ServoGains& gains);

/// position_servo_raw clamped to the model torque limits.
VecX position_servo(const RobotModel& model, const JointState& state, const VecX& q_des,
                    const ServoGains& gains);

struct RunTick {
  double t = 0.0;
  VecX q, qd;
  VecX qd_cmd;       // commanded joint velocity (controller output)
  VecX tau_raw;      // controller / servo torque before the limit clamp
  VecX tau_clamped;  // torque actually applied to the plant
  Pose pose_actual;
  Pose pose_des;
  int solver_iterations = 0;
  int solver_status = -1;  // -1 none, else QPStatus
  double manipulability = 0.0;
  std::uint32_t lock_mask = 0;
  double hessian_min_eig = 0.0;  // NaN when no QP was assembled
};

struct RunLog {
  int n = 0;
  double dt = 0.0;
  bool unstable = false;
  std::vector<RunTick> ticks;
};

/// Runs one controller against one reference trajectory at the control
/// period dt. One controller step and one plant step per tick; deterministic
/// for identical inputs. On plant blow-up the loop aborts and the partial
/// log is flagged unstable.
RunLog run_experiment(const RobotModel& model, Controller& controller,
                      const Trajectory& trajectory, double dt, double duration_s,
                      const JointState& initial_state, const ServoGains& servo_gains);

/// Aggregate tracking/effort metrics over the ticks with t0 <= t <= t1:
/// mean Cartesian position error, mean orientation error from the Z-Y-X
/// Euler decomposition of the relative rotation, and the per-joint averages
/// of |commanded velocity| and |raw torque|. Samples with the Euler pitch
/// within 0.01 rad of +-pi/2 are counted in gimbal_flags.
struct MetricsReport {
  double e_p = 0.0;    // m
  double e_phi = 0.0;  // rad
  double V = 0.0;      // rad/s
  double T = 0.0;      // N*m
  double window_t0 = 0.0;
  double window_t1 = 0.0;
  int ticks = 0;
  int gimbal_flags = 0;
};

MetricsReport compute_metrics(const RunLog& log, double t0, double t1);

/// Intrinsic Z-Y-X Euler angles (yaw, pitch, roll) of a rotation matrix.
Vec3 euler_zyx(const Mat3& R);

void write_runlog(const RunLog& log, const std::string& path);
RunLog read_runlog(const std::string& path);

void write_metrics(const std::vector<MetricsReport>& reports, const std::string& path);

}  // namespace arm
