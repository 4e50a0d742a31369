#pragma once

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "armbench/controllers.hpp"
#include "armbench/kv_file.hpp"
#include "armbench/simulation.hpp"
#include "armbench/trajectory.hpp"

namespace arm {

struct TrajectoryConfig {
  std::string kind = "circle";  // file | circle | lissajous | step
  std::string file;
  double rate_hz = 100.0;
  SynthParams synth;
};

/// Full description of one experiment: model, controller and its parameters,
/// reference trajectory, timing, metric windows and outputs. Field names in
/// the file carry explicit units (dt_s, k_des_trans_n_per_m, ...).
struct ExperimentConfig {
  std::string model_path = "models/h1_arm_7dof.model";
  std::string controller = "qp";  // ik | id | qp
  double dt_s = 0.001;
  double duration_s = 20.0;
  VecX initial_q_rad;  // empty: zeros
  unsigned seed = 0;
  std::vector<std::pair<double, double>> metric_windows_s;  // empty: [0, duration]
  std::string out_dir = "out";
  int workers = 0;  // 0: hardware concurrency

  TrajectoryConfig trajectory;

  DLSParams ik_params;  // shared by the ik and id controllers

  double qp_k_des_trans_n_per_m = 80.0;
  double qp_k_des_rot_nm_per_rad = 5.0;
  double qp_w_track = 15.0;
  double qp_w_joint = 1.0;
  VecX qp_s_diag;  // empty: 1 1 0 ... 0
  double qp_k_n = 40.0;
  double qp_d_n = 12.649110640673518;
  VecX qp_q_null_target_rad;  // empty: captured at the first step
  std::string qp_nullspace_mode = "fixed";
  double qp_lambda_threshold = 1.0005;
  double qp_weight_reduction_exponent = 1.0;
  bool qp_unlock_hysteresis = false;
  double qp_lambda_damping = 1e-6;

  double servo_kp_nm_per_rad = 2000.0;
  double servo_kd_nms_per_rad = 2.0;

  QPSettings solver;

  std::vector<std::string> compare_controllers;
  std::vector<std::pair<std::string, std::vector<double>>> sweep_axes;

  KvFile source_kv;  // normalized key/value form, kept for sweep overrides
};

ExperimentConfig parse_config(const std::string& path);
ExperimentConfig config_from_kv(const KvFile& kv);
KvFile config_to_kv(const ExperimentConfig& config);
void write_config(const ExperimentConfig& config, const std::string& path);

/// Applies `key = value` on top of an existing config (sweep machinery).
ExperimentConfig config_with_override(const ExperimentConfig& config, const std::string& key,
                                      double value);

QPControllerParams make_qp_params(const ExperimentConfig& config, int n);
std::unique_ptr<Controller> make_controller(const ExperimentConfig& config, const RobotModel& model,
                                            const std::string& name);
Trajectory make_trajectory(const ExperimentConfig& config);
ServoGains make_servo_gains(const ExperimentConfig& config, int n);

}  // namespace arm
