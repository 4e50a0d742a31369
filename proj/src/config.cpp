#include "armbench/config.hpp"

#include <algorithm>
#include <set>

#include "armbench/robot_model.hpp"

namespace arm {

namespace {

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys = {
      "model", "controller", "dt_s", "duration_s", "initial_q_rad", "seed", "metric_windows_s",
      "out_dir", "workers",
      "trajectory.kind", "trajectory.file", "trajectory.rate_hz", "trajectory.center_pos_m",
      "trajectory.center_quat_wxyz", "trajectory.amplitude_m", "trajectory.frequency_hz",
      "trajectory.phase_rad", "trajectory.plane_u", "trajectory.plane_v",
      "trajectory.rot_amplitude_rad", "trajectory.rot_axis", "trajectory.rot_frequency_hz",
      "trajectory.step_time_s",
      "ik.damping_lambda", "ik.epsilon", "ik.feedback_gain_per_s", "ik.damped", "ik.dt_s",
      "qp.k_des_trans_n_per_m", "qp.k_des_rot_nm_per_rad", "qp.w_track", "qp.w_joint", "qp.s_diag",
      "qp.k_n", "qp.d_n", "qp.q_null_target_rad", "qp.nullspace_mode", "qp.lambda_threshold",
      "qp.weight_reduction_exponent", "qp.unlock_hysteresis", "qp.lambda_damping",
      "servo.kp_nm_per_rad", "servo.kd_nms_per_rad",
      "solver.eps_abs", "solver.eps_rel", "solver.max_iter", "solver.rho", "solver.sigma",
      "solver.alpha",
      "compare.controllers",
  };
  return keys;
}

bool is_known_key(const std::string& key) {
  return known_keys().count(key) > 0 || key.rfind("sweep.", 0) == 0;
}

std::vector<std::string> split_words(const std::string& s) {
  std::vector<std::string> out;
  std::string token;
  for (char c : s) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      if (!token.empty()) out.push_back(token), token.clear();
    } else {
      token += c;
    }
  }
  if (!token.empty()) out.push_back(token);
  return out;
}

void check_controller_name(const std::string& name) {
  static const std::set<std::string> names = {"ik", "id", "qp", "ik-undamped", "qp-fixed",
                                              "qp-dynamic"};
  if (!names.count(name)) {
    throw ParseError("controller: unknown controller name `" + name +
                     "` (expected ik, id, qp, ik-undamped, qp-fixed or qp-dynamic)");
  }
}

Vec3 vec3_or(const KvFile& kv, const std::string& key, const Vec3& fallback) {
  if (!kv.has(key)) return fallback;
  const VecX v = kv.get_vector(key);
  if (v.size() != 3) throw ParseError("key " + key + ": expected 3 values");
  return v.head<3>();
}

}  // namespace

ExperimentConfig config_from_kv(const KvFile& kv) {
  for (const auto& key : kv.keys()) {
    if (!is_known_key(key)) throw ParseError("config: unknown key `" + key + "`");
  }

  ExperimentConfig c;
  c.model_path = kv.get_string_or("model", c.model_path);
  c.controller = kv.get_string_or("controller", c.controller);
  check_controller_name(c.controller);
  c.dt_s = kv.get_scalar_or("dt_s", c.dt_s);
  if (!(c.dt_s > 0.0)) throw ParseError("dt_s: must be > 0");
  c.duration_s = kv.get_scalar_or("duration_s", c.duration_s);
  if (!(c.duration_s >= 0.0)) throw ParseError("duration_s: must be >= 0");
  if (kv.has("initial_q_rad")) c.initial_q_rad = kv.get_vector("initial_q_rad");
  c.seed = static_cast<unsigned>(kv.get_scalar_or("seed", 0.0));
  if (kv.has("metric_windows_s")) {
    const VecX w = kv.get_vector("metric_windows_s");
    if (w.size() % 2 != 0) throw ParseError("metric_windows_s: expected t0 t1 pairs");
    for (Eigen::Index i = 0; i < w.size(); i += 2) {
      if (!(w[i] < w[i + 1])) throw ParseError("metric_windows_s: window t0 must be < t1");
      c.metric_windows_s.emplace_back(w[i], w[i + 1]);
    }
  }
  c.out_dir = kv.get_string_or("out_dir", c.out_dir);
  c.workers = static_cast<int>(kv.get_scalar_or("workers", 0.0));

  c.trajectory.kind = kv.get_string_or("trajectory.kind", c.trajectory.kind);
  if (c.trajectory.kind == "file") {
    c.trajectory.file = kv.get_string_or("trajectory.file", "");
    if (c.trajectory.file.empty()) throw ParseError("trajectory.file: required for kind `file`");
  } else {
    (void)synth_kind_from_string(c.trajectory.kind);  // validates the name
  }
  c.trajectory.rate_hz = kv.get_scalar_or("trajectory.rate_hz", c.trajectory.rate_hz);
  if (!(c.trajectory.rate_hz > 0.0)) throw ParseError("trajectory.rate_hz: must be > 0");
  SynthParams& synth = c.trajectory.synth;
  synth.center.translation = vec3_or(kv, "trajectory.center_pos_m", synth.center.translation);
  if (kv.has("trajectory.center_quat_wxyz")) {
    const VecX q = kv.get_vector("trajectory.center_quat_wxyz");
    if (q.size() != 4) throw ParseError("trajectory.center_quat_wxyz: expected 4 values");
    synth.center.rotation = Eigen::Quaterniond(q[0], q[1], q[2], q[3]);
    synth.center.canonicalize();
  }
  synth.amplitude = vec3_or(kv, "trajectory.amplitude_m", synth.amplitude);
  synth.frequency_hz = vec3_or(kv, "trajectory.frequency_hz", synth.frequency_hz);
  synth.phase_rad = vec3_or(kv, "trajectory.phase_rad", synth.phase_rad);
  synth.plane_u = vec3_or(kv, "trajectory.plane_u", synth.plane_u);
  synth.plane_v = vec3_or(kv, "trajectory.plane_v", synth.plane_v);
  synth.rot_amplitude_rad = kv.get_scalar_or("trajectory.rot_amplitude_rad", 0.0);
  synth.rot_axis = vec3_or(kv, "trajectory.rot_axis", synth.rot_axis);
  synth.rot_frequency_hz = kv.get_scalar_or("trajectory.rot_frequency_hz", 0.0);
  synth.step_time_s = kv.get_scalar_or("trajectory.step_time_s", synth.step_time_s);

  c.ik_params.damping_lambda = kv.get_scalar_or("ik.damping_lambda", c.ik_params.damping_lambda);
  c.ik_params.epsilon = kv.get_scalar_or("ik.epsilon", c.ik_params.epsilon);
  c.ik_params.feedback_gain = kv.get_scalar_or("ik.feedback_gain_per_s", c.ik_params.feedback_gain);
  c.ik_params.damped_branch = kv.get_scalar_or("ik.damped", 1.0) != 0.0;
  c.ik_params.dt = kv.get_scalar_or("ik.dt_s", c.dt_s);
  if (!(c.ik_params.damping_lambda > 0.0) || !(c.ik_params.epsilon > 0.0)) {
    throw ParseError("ik: damping_lambda and epsilon must be > 0");
  }

  c.qp_k_des_trans_n_per_m = kv.get_scalar_or("qp.k_des_trans_n_per_m", c.qp_k_des_trans_n_per_m);
  c.qp_k_des_rot_nm_per_rad = kv.get_scalar_or("qp.k_des_rot_nm_per_rad", c.qp_k_des_rot_nm_per_rad);
  c.qp_w_track = kv.get_scalar_or("qp.w_track", c.qp_w_track);
  c.qp_w_joint = kv.get_scalar_or("qp.w_joint", c.qp_w_joint);
  if (kv.has("qp.s_diag")) c.qp_s_diag = kv.get_vector("qp.s_diag");
  for (Eigen::Index i = 0; i < c.qp_s_diag.size(); ++i) {
    if (c.qp_s_diag[i] != 0.0 && c.qp_s_diag[i] != 1.0) {
      throw ParseError("qp.s_diag: entries must be 0 or 1");
    }
  }
  c.qp_k_n = kv.get_scalar_or("qp.k_n", c.qp_k_n);
  c.qp_d_n = kv.get_scalar_or("qp.d_n", c.qp_d_n);
  if (kv.has("qp.q_null_target_rad")) c.qp_q_null_target_rad = kv.get_vector("qp.q_null_target_rad");
  c.qp_nullspace_mode = kv.get_string_or("qp.nullspace_mode", c.qp_nullspace_mode);
  if (c.qp_nullspace_mode != "fixed" && c.qp_nullspace_mode != "dynamic") {
    throw ParseError("qp.nullspace_mode: expected `fixed` or `dynamic`");
  }
  c.qp_lambda_threshold = kv.get_scalar_or("qp.lambda_threshold", c.qp_lambda_threshold);
  if (!(c.qp_lambda_threshold > 0.0)) throw ParseError("qp.lambda_threshold: must be > 0");
  c.qp_weight_reduction_exponent =
      kv.get_scalar_or("qp.weight_reduction_exponent", c.qp_weight_reduction_exponent);
  c.qp_unlock_hysteresis = kv.get_scalar_or("qp.unlock_hysteresis", 0.0) != 0.0;
  c.qp_lambda_damping = kv.get_scalar_or("qp.lambda_damping", c.qp_lambda_damping);

  c.servo_kp_nm_per_rad = kv.get_scalar_or("servo.kp_nm_per_rad", c.servo_kp_nm_per_rad);
  c.servo_kd_nms_per_rad = kv.get_scalar_or("servo.kd_nms_per_rad", c.servo_kd_nms_per_rad);

  c.solver.eps_abs = kv.get_scalar_or("solver.eps_abs", c.solver.eps_abs);
  c.solver.eps_rel = kv.get_scalar_or("solver.eps_rel", c.solver.eps_rel);
  c.solver.max_iter = static_cast<int>(kv.get_scalar_or("solver.max_iter", c.solver.max_iter));
  c.solver.rho = kv.get_scalar_or("solver.rho", c.solver.rho);
  c.solver.sigma = kv.get_scalar_or("solver.sigma", c.solver.sigma);
  c.solver.alpha = kv.get_scalar_or("solver.alpha", c.solver.alpha);

  if (kv.has("compare.controllers")) {
    c.compare_controllers = split_words(kv.get_string("compare.controllers"));
    for (const auto& name : c.compare_controllers) check_controller_name(name);
  }
  for (const auto& key : kv.keys_with_prefix("sweep.")) {
    const std::string param = key.substr(6);
    if (!known_keys().count(param)) {
      throw ParseError("sweep axis `" + key + "`: unknown parameter `" + param + "`");
    }
    const VecX values = kv.get_vector(key);
    c.sweep_axes.emplace_back(param,
                              std::vector<double>(values.data(), values.data() + values.size()));
  }

  c.source_kv = config_to_kv(c);
  return c;
}

ExperimentConfig parse_config(const std::string& path) {
  return config_from_kv(KvFile::parse_file(path));
}

KvFile config_to_kv(const ExperimentConfig& c) {
  KvFile kv;
  kv.set("model", c.model_path);
  kv.set("controller", c.controller);
  kv.set("dt_s", c.dt_s);
  kv.set("duration_s", c.duration_s);
  if (c.initial_q_rad.size()) kv.set("initial_q_rad", c.initial_q_rad);
  kv.set("seed", static_cast<double>(c.seed));
  if (!c.metric_windows_s.empty()) {
    VecX w(2 * c.metric_windows_s.size());
    for (size_t i = 0; i < c.metric_windows_s.size(); ++i) {
      w[2 * i] = c.metric_windows_s[i].first;
      w[2 * i + 1] = c.metric_windows_s[i].second;
    }
    kv.set("metric_windows_s", w);
  }
  kv.set("out_dir", c.out_dir);
  kv.set("workers", static_cast<double>(c.workers));

  kv.set("trajectory.kind", c.trajectory.kind);
  if (!c.trajectory.file.empty()) kv.set("trajectory.file", c.trajectory.file);
  kv.set("trajectory.rate_hz", c.trajectory.rate_hz);
  const SynthParams& synth = c.trajectory.synth;
  kv.set("trajectory.center_pos_m", VecX(synth.center.translation));
  VecX quat(4);
  quat << synth.center.rotation.w(), synth.center.rotation.x(), synth.center.rotation.y(),
      synth.center.rotation.z();
  kv.set("trajectory.center_quat_wxyz", quat);
  kv.set("trajectory.amplitude_m", VecX(synth.amplitude));
  kv.set("trajectory.frequency_hz", VecX(synth.frequency_hz));
  kv.set("trajectory.phase_rad", VecX(synth.phase_rad));
  kv.set("trajectory.plane_u", VecX(synth.plane_u));
  kv.set("trajectory.plane_v", VecX(synth.plane_v));
  kv.set("trajectory.rot_amplitude_rad", synth.rot_amplitude_rad);
  kv.set("trajectory.rot_axis", VecX(synth.rot_axis));
  kv.set("trajectory.rot_frequency_hz", synth.rot_frequency_hz);
  kv.set("trajectory.step_time_s", synth.step_time_s);

  kv.set("ik.damping_lambda", c.ik_params.damping_lambda);
  kv.set("ik.epsilon", c.ik_params.epsilon);
  kv.set("ik.feedback_gain_per_s", c.ik_params.feedback_gain);
  kv.set("ik.damped", c.ik_params.damped_branch ? 1.0 : 0.0);
  kv.set("ik.dt_s", c.ik_params.dt);

  kv.set("qp.k_des_trans_n_per_m", c.qp_k_des_trans_n_per_m);
  kv.set("qp.k_des_rot_nm_per_rad", c.qp_k_des_rot_nm_per_rad);
  kv.set("qp.w_track", c.qp_w_track);
  kv.set("qp.w_joint", c.qp_w_joint);
  if (c.qp_s_diag.size()) kv.set("qp.s_diag", c.qp_s_diag);
  kv.set("qp.k_n", c.qp_k_n);
  kv.set("qp.d_n", c.qp_d_n);
  if (c.qp_q_null_target_rad.size()) kv.set("qp.q_null_target_rad", c.qp_q_null_target_rad);
  kv.set("qp.nullspace_mode", c.qp_nullspace_mode);
  kv.set("qp.lambda_threshold", c.qp_lambda_threshold);
  kv.set("qp.weight_reduction_exponent", c.qp_weight_reduction_exponent);
  kv.set("qp.unlock_hysteresis", c.qp_unlock_hysteresis ? 1.0 : 0.0);
  kv.set("qp.lambda_damping", c.qp_lambda_damping);

  kv.set("servo.kp_nm_per_rad", c.servo_kp_nm_per_rad);
  kv.set("servo.kd_nms_per_rad", c.servo_kd_nms_per_rad);

  kv.set("solver.eps_abs", c.solver.eps_abs);
  kv.set("solver.eps_rel", c.solver.eps_rel);
  kv.set("solver.max_iter", static_cast<double>(c.solver.max_iter));
  kv.set("solver.rho", c.solver.rho);
  kv.set("solver.sigma", c.solver.sigma);
  kv.set("solver.alpha", c.solver.alpha);

  if (!c.compare_controllers.empty()) {
    std::string joined;
    for (const auto& name : c.compare_controllers) {
      if (!joined.empty()) joined += ' ';
      joined += name;
    }
    kv.set("compare.controllers", joined);
  }
  for (const auto& [param, values] : c.sweep_axes) {
    kv.set("sweep." + param,
           VecX(Eigen::Map<const VecX>(values.data(), static_cast<Eigen::Index>(values.size()))));
  }
  return kv;
}

void write_config(const ExperimentConfig& config, const std::string& path) {
  config_to_kv(config).write_file(path);
}

ExperimentConfig config_with_override(const ExperimentConfig& config, const std::string& key,
                                      double value) {
  KvFile kv = config.source_kv;
  kv.set(key, value);
  return config_from_kv(kv);
}

QPControllerParams make_qp_params(const ExperimentConfig& c, int n) {
  QPControllerParams p = QPControllerParams::defaults(n);
  p.k_des_diag.head<3>().setConstant(c.qp_k_des_trans_n_per_m);
  p.k_des_diag.tail<3>().setConstant(c.qp_k_des_rot_nm_per_rad);
  p.w_track_diag.setConstant(c.qp_w_track);
  p.w_joint_diag = VecX::Constant(n, c.qp_w_joint);
  if (c.qp_s_diag.size()) {
    if (c.qp_s_diag.size() != n) throw ParseError("qp.s_diag: length must equal the joint count");
    p.s_diag = c.qp_s_diag;
  }
  p.k_n_diag = VecX::Constant(n, c.qp_k_n);
  p.d_n_diag = VecX::Constant(n, c.qp_d_n);
  if (c.qp_q_null_target_rad.size()) {
    if (c.qp_q_null_target_rad.size() != n) {
      throw ParseError("qp.q_null_target_rad: length must equal the joint count");
    }
    p.q_null_target = c.qp_q_null_target_rad;
  }
  p.dt = c.dt_s;
  p.nullspace_mode =
      c.qp_nullspace_mode == "dynamic" ? NullspaceMode::dynamic : NullspaceMode::fixed;
  p.lambda_threshold = c.qp_lambda_threshold;
  p.weight_reduction_exponent = c.qp_weight_reduction_exponent;
  p.unlock_hysteresis = c.qp_unlock_hysteresis;
  p.lambda_damping = c.qp_lambda_damping;
  return p;
}

std::unique_ptr<Controller> make_controller(const ExperimentConfig& c, const RobotModel& model,
                                            const std::string& name) {
  DLSParams ik = c.ik_params;
  ik.dt = c.dt_s;
  if (name == "ik") return std::make_unique<DlsIkController>(model, ik);
  if (name == "ik-undamped") {
    ik.damped_branch = false;
    return std::make_unique<DlsIkController>(model, ik);
  }
  if (name == "id") return std::make_unique<InverseDynamicsController>(model, ik);
  if (name == "qp" || name == "qp-fixed" || name == "qp-dynamic") {
    QPControllerParams params = make_qp_params(c, model.n);
    if (name == "qp-fixed") params.nullspace_mode = NullspaceMode::fixed;
    if (name == "qp-dynamic") params.nullspace_mode = NullspaceMode::dynamic;
    return std::make_unique<QpComplianceController>(model, params, c.solver);
  }
  throw ParseError("controller: unknown controller name `" + name + "`");
}

Trajectory make_trajectory(const ExperimentConfig& c) {
  if (c.trajectory.kind == "file") return load_trajectory(c.trajectory.file);
  return synth_trajectory(synth_kind_from_string(c.trajectory.kind), c.trajectory.synth,
                          c.duration_s, c.trajectory.rate_hz);
}

ServoGains make_servo_gains(const ExperimentConfig& c, int n) {
  return {VecX::Constant(n, c.servo_kp_nm_per_rad), VecX::Constant(n, c.servo_kd_nms_per_rad)};
}

}  // namespace arm
