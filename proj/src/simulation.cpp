#include "armbench/simulation.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "armbench/dynamics.hpp"
#include "armbench/kinematics.hpp"
#include "armbench/kv_file.hpp"

namespace arm {

IntegrateResult integrate_step(const RobotModel& model, const JointState& state, const VecX& tau,
                               double dt) {
  IntegrateResult out;
  const VecX qdd = forward_dynamics(model, state.q, state.qd, tau);
  VecX qd_new = state.qd + qdd * dt;
  out.diverged = !qd_new.allFinite() || qd_new.norm() > 1e3;
  VecX q_new = state.q + qd_new * dt;
  for (int i = 0; i < model.n; ++i) {
    if (q_new[i] < model.limits.q_min[i]) {
      q_new[i] = model.limits.q_min[i];
      qd_new[i] = 0.0;
    } else if (q_new[i] > model.limits.q_max[i]) {
      q_new[i] = model.limits.q_max[i];
      qd_new[i] = 0.0;
    }
  }
  out.state = JointState(std::move(q_new), std::move(qd_new));
  return out;
}

VecX position_servo_raw(const RobotModel& model, const JointState& state, const VecX& q_des,
                        const ServoGains& gains) {
  return gains.kp.cwiseProduct(q_des - state.q) - gains.kd.cwiseProduct(state.qd) +
         gravity_forces(model, state.q);
}

VecX position_servo(const RobotModel& model, const JointState& state, const VecX& q_des,
                    const ServoGains& gains) {
  return position_servo_raw(model, state, q_des, gains)
      .cwiseMax(model.limits.tau_min)
      .cwiseMin(model.limits.tau_max);
}

RunLog run_experiment(const RobotModel& model, Controller& controller,
                      const Trajectory& trajectory, double dt, double duration_s,
                      const JointState& initial_state, const ServoGains& servo_gains) {
  RunLog log;
  log.n = model.n;
  log.dt = dt;
  if (trajectory.empty()) return log;

  const long ticks = std::lround(duration_s / dt);
  log.ticks.reserve(ticks);
  JointState state = initial_state;
  controller.reset();

  for (long k = 0; k < ticks; ++k) {
    const double t = static_cast<double>(k) * dt;
    const ControlTarget target = resample_hold(trajectory, t);
    const ControlCommand cmd = controller.step(state, target);

    VecX tau_raw;
    if (cmd.kind == CommandKind::position) {
      tau_raw = position_servo_raw(model, state, cmd.q_des, servo_gains);
    } else {
      tau_raw = cmd.tau_des;
    }
    const VecX tau_clamped = tau_raw.cwiseMax(model.limits.tau_min).cwiseMin(model.limits.tau_max);

    const ControllerDiagnostics& diag = controller.diagnostics();
    RunTick tick;
    tick.t = t;
    tick.q = state.q;
    tick.qd = state.qd;
    tick.qd_cmd = cmd.qd_des;
    tick.tau_raw = tau_raw;
    tick.tau_clamped = tau_clamped;
    tick.pose_actual = forward_kinematics(model, state.q);
    tick.pose_des = target.pose_des;
    tick.solver_iterations = diag.used_solver ? diag.solver_iterations : 0;
    tick.solver_status = diag.used_solver ? static_cast<int>(diag.solver_status) : -1;
    tick.manipulability = manipulability(space_jacobian(model, state.q));
    tick.lock_mask = 0;
    for (int i = 0; i < diag.lock_mask.size() && i < 32; ++i) {
      if (diag.lock_mask[i] > 0.5) tick.lock_mask |= (1u << i);
    }
    tick.hessian_min_eig = diag.hessian_min_eig;
    log.ticks.push_back(std::move(tick));

    const IntegrateResult step = integrate_step(model, state, tau_clamped, dt);
    state = step.state;
    if (step.diverged) {
      log.unstable = true;
      break;
    }
  }
  return log;
}

Vec3 euler_zyx(const Mat3& R) {
  const double pitch = std::asin(std::clamp(-R(2, 0), -1.0, 1.0));
  double yaw, roll;
  if (std::abs(std::cos(pitch)) > 1e-12) {
    yaw = std::atan2(R(1, 0), R(0, 0));
    roll = std::atan2(R(2, 1), R(2, 2));
  } else {
    yaw = std::atan2(-R(0, 1), R(1, 1));  // convention: fold the lost DoF into yaw
    roll = 0.0;
  }
  return Vec3(yaw, pitch, roll);
}

MetricsReport compute_metrics(const RunLog& log, double t0, double t1) {
  MetricsReport report;
  report.window_t0 = t0;
  report.window_t1 = t1;
  double sum_ep = 0.0, sum_ephi = 0.0, sum_v = 0.0, sum_t = 0.0;
  for (const RunTick& tick : log.ticks) {
    if (tick.t < t0 - 1e-12 || tick.t > t1 + 1e-12) continue;
    ++report.ticks;
    sum_ep += (tick.pose_des.translation - tick.pose_actual.translation).norm();
    const Mat3 rel = tick.pose_des.rotation_matrix().transpose() * tick.pose_actual.rotation_matrix();
    const Vec3 ypr = euler_zyx(rel);
    if (std::abs(ypr[1]) > M_PI / 2.0 - 0.01) ++report.gimbal_flags;
    sum_ephi += ypr.norm();
    sum_v += tick.qd_cmd.cwiseAbs().sum() / static_cast<double>(log.n);
    sum_t += tick.tau_raw.cwiseAbs().sum() / static_cast<double>(log.n);
  }
  if (report.ticks == 0) {
    throw std::invalid_argument("compute_metrics: no ticks in window");
  }
  const double n = static_cast<double>(report.ticks);
  report.e_p = sum_ep / n;
  report.e_phi = sum_ephi / n;
  report.V = sum_v / n;
  report.T = sum_t / n;
  return report;
}

namespace {

void write_vec(std::ostream& out, const VecX& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) out << ',' << format_double(v[i]);
}

void write_pose(std::ostream& out, const Pose& p) {
  out << ',' << format_double(p.translation.x()) << ',' << format_double(p.translation.y()) << ','
      << format_double(p.translation.z()) << ',' << format_double(p.rotation.w()) << ','
      << format_double(p.rotation.x()) << ',' << format_double(p.rotation.y()) << ','
      << format_double(p.rotation.z());
}

}  // namespace

void write_runlog(const RunLog& log, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write runlog: " + path);
  out << "# n=" << log.n << " dt=" << format_double(log.dt) << " unstable=" << (log.unstable ? 1 : 0)
      << '\n';
  out << "t";
  const auto joint_cols = [&](const char* stem) {
    for (int i = 0; i < log.n; ++i) out << ',' << stem << i;
  };
  joint_cols("q");
  joint_cols("qd");
  joint_cols("qd_cmd");
  joint_cols("tau_raw");
  joint_cols("tau_clamped");
  out << ",px,py,pz,qw,qx,qy,qz";
  out << ",des_px,des_py,des_pz,des_qw,des_qx,des_qy,des_qz";
  out << ",solver_iterations,solver_status,manipulability,lock_mask,hessian_min_eig\n";
  for (const RunTick& tick : log.ticks) {
    out << format_double(tick.t);
    write_vec(out, tick.q);
    write_vec(out, tick.qd);
    write_vec(out, tick.qd_cmd);
    write_vec(out, tick.tau_raw);
    write_vec(out, tick.tau_clamped);
    write_pose(out, tick.pose_actual);
    write_pose(out, tick.pose_des);
    out << ',' << tick.solver_iterations << ',' << tick.solver_status << ','
        << format_double(tick.manipulability) << ',' << tick.lock_mask << ','
        << format_double(tick.hessian_min_eig) << '\n';
  }
}

RunLog read_runlog(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open runlog: " + path);
  std::string line;
  if (!std::getline(in, line) || line.rfind("# n=", 0) != 0) {
    throw ParseError(path + ": missing runlog preamble");
  }
  RunLog log;
  {
    std::istringstream meta(line.substr(2));
    std::string token;
    while (meta >> token) {
      const auto eq = token.find('=');
      if (eq == std::string::npos) continue;
      const std::string key = token.substr(0, eq);
      const std::string value = token.substr(eq + 1);
      if (key == "n") log.n = std::stoi(value);
      if (key == "dt") log.dt = std::stod(value);
      if (key == "unstable") log.unstable = value == "1";
    }
  }
  if (log.n <= 0) throw ParseError(path + ": bad joint count in preamble");
  if (!std::getline(in, line)) throw ParseError(path + ": missing header");

  const int n = log.n;
  const int expected = 1 + 5 * n + 14 + 5;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::vector<double> v;
    std::string cell;
    while (std::getline(row, cell, ',')) v.push_back(std::stod(cell));
    if (static_cast<int>(v.size()) != expected) {
      throw ParseError(path + ": row has " + std::to_string(v.size()) + " fields, expected " +
                       std::to_string(expected));
    }
    RunTick tick;
    int at = 0;
    tick.t = v[at++];
    const auto take_vec = [&](VecX& dst) {
      dst = Eigen::Map<const VecX>(v.data() + at, n);
      at += n;
    };
    take_vec(tick.q);
    take_vec(tick.qd);
    take_vec(tick.qd_cmd);
    take_vec(tick.tau_raw);
    take_vec(tick.tau_clamped);
    const auto take_pose = [&](Pose& dst) {
      dst = Pose(Eigen::Quaterniond(v[at + 3], v[at + 4], v[at + 5], v[at + 6]),
                 Vec3(v[at], v[at + 1], v[at + 2]));
      at += 7;
    };
    take_pose(tick.pose_actual);
    take_pose(tick.pose_des);
    tick.solver_iterations = static_cast<int>(v[at++]);
    tick.solver_status = static_cast<int>(v[at++]);
    tick.manipulability = v[at++];
    tick.lock_mask = static_cast<std::uint32_t>(v[at++]);
    tick.hessian_min_eig = v[at++];
    log.ticks.push_back(std::move(tick));
  }
  return log;
}

void write_metrics(const std::vector<MetricsReport>& reports, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write metrics: " + path);
  out << "window_t0,window_t1,ticks,e_p,e_phi,V,T,gimbal_flags\n";
  for (const MetricsReport& r : reports) {
    out << format_double(r.window_t0) << ',' << format_double(r.window_t1) << ',' << r.ticks << ','
        << format_double(r.e_p) << ',' << format_double(r.e_phi) << ',' << format_double(r.V) << ','
        << format_double(r.T) << ',' << r.gimbal_flags << '\n';
  }
}

}  // namespace arm
