#include "armbench/cli.hpp"

#include <CLI11.hpp>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <thread>

#include "armbench/robot_model.hpp"

namespace arm {

namespace fs = std::filesystem;

namespace {

struct RunOutcome {
  RunLog log;
  std::vector<MetricsReport> metrics;
};

std::vector<std::pair<double, double>> effective_windows(const ExperimentConfig& config) {
  if (!config.metric_windows_s.empty()) return config.metric_windows_s;
  return {{0.0, config.duration_s}};
}

JointState initial_state(const ExperimentConfig& config, const RobotModel& model) {
  JointState state = JointState::zero(model.n);
  if (config.initial_q_rad.size()) {
    if (config.initial_q_rad.size() != model.n) {
      throw ParseError("initial_q_rad: length must equal the model joint count");
    }
    state.q = config.initial_q_rad;
    for (int i = 0; i < model.n; ++i) {
      if (state.q[i] < model.limits.q_min[i] || state.q[i] > model.limits.q_max[i]) {
        throw ParseError("initial_q_rad: joint " + std::to_string(i) + " outside position limits");
      }
    }
  }
  return state;
}

RunOutcome execute(const ExperimentConfig& config, const RobotModel& model,
                   const std::string& controller_name) {
  auto controller = make_controller(config, model, controller_name);
  const Trajectory trajectory = make_trajectory(config);
  RunOutcome outcome;
  outcome.log = run_experiment(model, *controller, trajectory, config.dt_s, config.duration_s,
                               initial_state(config, model), make_servo_gains(config, model.n));
  for (const auto& [t0, t1] : effective_windows(config)) {
    // A run that blew up may not reach the window; report zeros in that case.
    const double t_last = outcome.log.ticks.empty() ? -1.0 : outcome.log.ticks.back().t;
    if (outcome.log.unstable && t_last < t0) {
      MetricsReport r;
      r.window_t0 = t0;
      r.window_t1 = t1;
      outcome.metrics.push_back(r);
    } else {
      outcome.metrics.push_back(compute_metrics(outcome.log, t0, t1));
    }
  }
  return outcome;
}

void validate_windows(const ExperimentConfig& config) {
  for (const auto& [t0, t1] : effective_windows(config)) {
    if (t0 < 0.0 || t1 > config.duration_s + 1e-9) {
      throw ParseError("metric_windows_s: window outside the run duration");
    }
  }
}

std::string sanitize_label(std::string s) {
  for (char& c : s) {
    if (c == '.' || c == '/' || c == ' ') c = '_';
  }
  return s;
}

}  // namespace

int cmd_run(const ExperimentConfig& config) {
  try {
    validate_windows(config);
    const RobotModel model = load_model(config.model_path);
    fs::create_directories(config.out_dir);
    const RunOutcome outcome = execute(config, model, config.controller);
    write_runlog(outcome.log, (fs::path(config.out_dir) / "runlog.csv").string());
    write_metrics(outcome.metrics, (fs::path(config.out_dir) / "metrics.csv").string());
    return outcome.log.unstable ? kExitUnstable : kExitOk;
  } catch (const std::exception& e) {
    std::cerr << "run: " << e.what() << '\n';
    return kExitConfigError;
  }
}

int cmd_compare(const ExperimentConfig& config) {
  try {
    validate_windows(config);
    if (config.compare_controllers.size() < 2 && config.sweep_axes.empty()) {
      throw ParseError("compare.controllers: need at least two controllers (or a sweep axis)");
    }
    const RobotModel model = load_model(config.model_path);
    fs::create_directories(config.out_dir);

    struct Job {
      std::string label;
      std::string controller;
      std::vector<std::pair<std::string, double>> overrides;
    };
    std::vector<Job> jobs;
    std::vector<std::string> controllers = config.compare_controllers;
    if (controllers.empty()) controllers = {config.controller};

    // Cartesian product of the sweep axes, one run each per controller.
    std::vector<std::vector<std::pair<std::string, double>>> combos{{}};
    for (const auto& [param, values] : config.sweep_axes) {
      std::vector<std::vector<std::pair<std::string, double>>> next;
      for (const auto& combo : combos) {
        for (double value : values) {
          auto extended = combo;
          extended.emplace_back(param, value);
          next.push_back(std::move(extended));
        }
      }
      combos = std::move(next);
    }
    for (const auto& name : controllers) {
      for (const auto& combo : combos) {
        Job job;
        job.controller = name;
        job.overrides = combo;
        job.label = name;
        for (const auto& [param, value] : combo) {
          job.label += "_" + sanitize_label(param) + "_" + format_double(value);
        }
        jobs.push_back(std::move(job));
      }
    }

    std::vector<RunOutcome> outcomes(jobs.size());
    std::atomic<size_t> next_job{0};
    const int hw = static_cast<int>(std::thread::hardware_concurrency());
    const int workers = std::max(1, std::min<int>(config.workers > 0 ? config.workers : hw,
                                                  static_cast<int>(jobs.size())));
    std::vector<std::thread> pool;
    std::atomic<bool> failed{false};
    std::string failure_message;
    std::mutex failure_mutex;
    const auto worker = [&]() {
      while (true) {
        const size_t index = next_job.fetch_add(1);
        if (index >= jobs.size() || failed.load()) break;
        try {
          ExperimentConfig run_config = config;
          for (const auto& [param, value] : jobs[index].overrides) {
            run_config = config_with_override(run_config, param, value);
          }
          outcomes[index] = execute(run_config, model, jobs[index].controller);
        } catch (const std::exception& e) {
          std::scoped_lock lock(failure_mutex);
          failed = true;
          failure_message = e.what();
        }
      }
    };
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (failed) throw ParseError(failure_message);

    bool any_unstable = false;
    std::ofstream out(fs::path(config.out_dir) / "comparison.csv");
    out << "label,controller,window_t0,window_t1,e_p,e_phi,V,T,unstable\n";
    for (size_t i = 0; i < jobs.size(); ++i) {
      write_runlog(outcomes[i].log,
                   (fs::path(config.out_dir) / ("runlog_" + jobs[i].label + ".csv")).string());
      any_unstable |= outcomes[i].log.unstable;
      for (const MetricsReport& r : outcomes[i].metrics) {
        out << jobs[i].label << ',' << jobs[i].controller << ',' << format_double(r.window_t0)
            << ',' << format_double(r.window_t1) << ',' << format_double(r.e_p) << ','
            << format_double(r.e_phi) << ',' << format_double(r.V) << ',' << format_double(r.T)
            << ',' << (outcomes[i].log.unstable ? 1 : 0) << '\n';
      }
    }
    return any_unstable ? kExitUnstable : kExitOk;
  } catch (const std::exception& e) {
    std::cerr << "compare: " << e.what() << '\n';
    return kExitConfigError;
  }
}

int cmd_plotdata(const std::vector<std::string>& runlog_paths, const std::string& kind,
                 const std::string& out_path) {
  try {
    if (runlog_paths.empty()) throw ParseError("plotdata: need at least one runlog");
    if (kind != "cartesian" && kind != "joint_pos" && kind != "joint_vel" &&
        kind != "joint_torque") {
      throw ParseError("plotdata: unknown kind `" + kind + "`");
    }
    std::vector<RunLog> logs;
    for (const auto& path : runlog_paths) logs.push_back(read_runlog(path));
    for (const auto& log : logs) {
      if (std::abs(log.dt - logs.front().dt) > 1e-15) {
        throw ParseError("plotdata: runlogs have mismatched tick rates");
      }
    }

    std::ofstream out(out_path);
    if (!out) throw ParseError("plotdata: cannot write " + out_path);
    out << "t,series,value\n";
    for (size_t li = 0; li < logs.size(); ++li) {
      const std::string prefix =
          logs.size() > 1 ? fs::path(runlog_paths[li]).stem().string() + ":" : "";
      const auto emit = [&](double t, const std::string& series, double value) {
        out << format_double(t) << ',' << prefix << series << ',' << format_double(value) << '\n';
      };
      for (const RunTick& tick : logs[li].ticks) {
        if (kind == "cartesian") {
          const Vec3 ypr_actual = euler_zyx(tick.pose_actual.rotation_matrix());
          const Vec3 ypr_des = euler_zyx(tick.pose_des.rotation_matrix());
          const char* axes[3] = {"x", "y", "z"};
          const char* angles[3] = {"yaw", "pitch", "roll"};
          for (int i = 0; i < 3; ++i) {
            emit(tick.t, std::string(axes[i]) + "_actual", tick.pose_actual.translation[i]);
            emit(tick.t, std::string(axes[i]) + "_desired", tick.pose_des.translation[i]);
            emit(tick.t, std::string(angles[i]) + "_actual", ypr_actual[i]);
            emit(tick.t, std::string(angles[i]) + "_desired", ypr_des[i]);
          }
        } else {
          const VecX& column = kind == "joint_pos"   ? tick.q
                               : kind == "joint_vel" ? tick.qd
                                                     : tick.tau_raw;
          for (Eigen::Index i = 0; i < column.size(); ++i) {
            emit(tick.t, (kind == "joint_pos" ? "q" : kind == "joint_vel" ? "qd" : "tau_raw") +
                             std::to_string(i),
                 column[i]);
          }
        }
      }
    }
    return kExitOk;
  } catch (const std::exception& e) {
    std::cerr << "plotdata: " << e.what() << '\n';
    return kExitConfigError;
  }
}

int cmd_validate(const ExperimentConfig& config) {
  try {
    validate_windows(config);
    const RobotModel model = model_from_kv(KvFile::parse_file(config.model_path));
    const auto violations = validate_model(model);
    for (const auto& v : violations) std::cout << "violation: " << v << '\n';
    if (!violations.empty()) return kExitConfigError;
    if (config.trajectory.kind == "file" && !fs::exists(config.trajectory.file)) {
      std::cerr << "validate: trajectory.file does not exist: " << config.trajectory.file << '\n';
      return kExitConfigError;
    }
    std::cout << "ok: model `" << config.model_path << "` with " << model.n
              << " joints, controller `" << config.controller << "`\n";
    return kExitOk;
  } catch (const std::exception& e) {
    std::cerr << "validate: " << e.what() << '\n';
    return kExitConfigError;
  }
}

int cli_main(int argc, const char* const* argv) {
  CLI::App app{"Redundant-manipulator control benchmark: damped-least-squares IK, inverse "
               "dynamics and QP compliance control against reference trajectories"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_override;
  int workers_override = -1;
  long seed_override = -1;

  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "experiment config file")->required();
    sub->add_option("--out", out_override, "output directory (overrides config)");
    sub->add_option("--workers", workers_override, "worker threads for sweeps");
    sub->add_option("--seed", seed_override, "seed recorded with the run");
  };

  CLI::App* run = app.add_subcommand("run", "run one experiment");
  add_common(run);
  CLI::App* compare = app.add_subcommand("compare", "run several controllers / sweep values");
  add_common(compare);
  CLI::App* validate = app.add_subcommand("validate", "validate config and model");
  add_common(validate);

  CLI::App* plotdata = app.add_subcommand("plotdata", "convert runlogs to tidy plot data");
  std::vector<std::string> logs;
  std::string kind = "cartesian";
  std::string plot_out = "plotdata.csv";
  plotdata->add_option("--logs", logs, "runlog csv paths")->required();
  plotdata->add_option("--kind", kind, "cartesian | joint_pos | joint_vel | joint_torque");
  plotdata->add_option("--out", plot_out, "output csv path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitConfigError;
  }

  if (plotdata->parsed()) return cmd_plotdata(logs, kind, plot_out);

  ExperimentConfig config;
  try {
    config = parse_config(config_path);
    if (!out_override.empty()) config.out_dir = out_override;
    if (workers_override >= 0) config.workers = workers_override;
    if (seed_override >= 0) config.seed = static_cast<unsigned>(seed_override);
    config.source_kv = config_to_kv(config);
  } catch (const std::exception& e) {
    std::cerr << "config: " << e.what() << '\n';
    return kExitConfigError;
  }

  if (run->parsed()) return cmd_run(config);
  if (compare->parsed()) return cmd_compare(config);
  return cmd_validate(config);
}

}  // namespace arm
