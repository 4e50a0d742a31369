#include "armbench/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "armbench/kv_file.hpp"

namespace arm {

namespace {
constexpr char kHeader[] = "t,px,py,pz,qw,qx,qy,qz";
}

Trajectory load_trajectory(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open trajectory file: " + path);
  std::string line;
  if (!std::getline(in, line)) throw ParseError(path + ": empty trajectory file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kHeader) {
    throw ParseError(path + ": expected header `" + kHeader + "`, got `" + line + "`");
  }

  Trajectory out;
  Eigen::Vector4d prev_quat = Eigen::Vector4d::Zero();
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream row(line);
    double values[8];
    char comma;
    for (int i = 0; i < 8; ++i) {
      if (!(row >> values[i])) throw ParseError(path + ":" + std::to_string(lineno) + ": bad row");
      if (i < 7 && !(row >> comma && comma == ',')) {
        throw ParseError(path + ":" + std::to_string(lineno) + ": expected 8 comma-separated values");
      }
    }
    Eigen::Vector4d quat(values[4], values[5], values[6], values[7]);
    if (prev_quat.squaredNorm() > 0.0 && prev_quat.dot(quat) < 0.0) quat = -quat;
    prev_quat = quat;

    TrajectorySample sample;
    sample.t = values[0];
    sample.pose = Pose(Eigen::Quaterniond(quat[0], quat[1], quat[2], quat[3]),
                       Vec3(values[1], values[2], values[3]));
    if (!out.empty() && !(sample.t > out.back().t)) {
      throw ParseError(path + ":" + std::to_string(lineno) + ": timestamps not strictly increasing");
    }
    out.push_back(sample);
  }
  if (out.empty()) throw ParseError(path + ": trajectory has no samples");
  return out;
}

void write_trajectory(const Trajectory& trajectory, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write trajectory file: " + path);
  out << kHeader << '\n';
  for (const auto& s : trajectory) {
    out << format_double(s.t) << ',' << format_double(s.pose.translation.x()) << ','
        << format_double(s.pose.translation.y()) << ',' << format_double(s.pose.translation.z())
        << ',' << format_double(s.pose.rotation.w()) << ',' << format_double(s.pose.rotation.x())
        << ',' << format_double(s.pose.rotation.y()) << ',' << format_double(s.pose.rotation.z())
        << '\n';
  }
}

SynthKind synth_kind_from_string(const std::string& name) {
  if (name == "lissajous") return SynthKind::lissajous;
  if (name == "step") return SynthKind::step;
  if (name == "circle") return SynthKind::circle;
  throw ParseError("unknown trajectory kind: " + name);
}

const char* to_string(SynthKind kind) {
  switch (kind) {
    case SynthKind::lissajous: return "lissajous";
    case SynthKind::step: return "step";
    case SynthKind::circle: return "circle";
  }
  return "unknown";
}

Trajectory synth_trajectory(SynthKind kind, const SynthParams& params, double duration_s,
                            double rate_hz) {
  if (!(duration_s > 0.0) || !(rate_hz > 0.0)) {
    throw std::invalid_argument("synth_trajectory: duration and rate must be positive");
  }
  const long count = std::lround(duration_s * rate_hz);
  Trajectory out;
  out.reserve(count);
  constexpr double two_pi = 2.0 * M_PI;
  for (long k = 0; k < count; ++k) {
    const double t = static_cast<double>(k) / rate_hz;
    Vec3 p = params.center.translation;
    switch (kind) {
      case SynthKind::circle: {
        const double angle = two_pi * params.frequency_hz[0] * t + params.phase_rad[0];
        p += params.amplitude[0] * (std::cos(angle) * params.plane_u + std::sin(angle) * params.plane_v);
        break;
      }
      case SynthKind::lissajous:
        for (int axis = 0; axis < 3; ++axis) {
          p[axis] += params.amplitude[axis] *
                     std::sin(two_pi * params.frequency_hz[axis] * t + params.phase_rad[axis]);
        }
        break;
      case SynthKind::step:
        if (t >= params.step_time_s) p += params.amplitude;
        break;
    }
    Eigen::Quaterniond rot = params.center.rotation;
    if (params.rot_amplitude_rad != 0.0) {
      const double angle = params.rot_amplitude_rad * std::sin(two_pi * params.rot_frequency_hz * t);
      rot = rot * Eigen::Quaterniond(Eigen::AngleAxisd(angle, params.rot_axis.normalized()));
    }
    out.push_back({t, Pose(rot, p), std::nullopt});
  }
  return out;
}

ControlTarget resample_hold(const Trajectory& trajectory, double t) {
  if (trajectory.empty()) throw std::invalid_argument("resample_hold: empty trajectory");
  ControlTarget target;
  if (t < trajectory.front().t) {
    target.pose_des = trajectory.front().pose;
    return target;
  }
  const auto it = std::upper_bound(trajectory.begin(), trajectory.end(), t,
                                   [](double value, const TrajectorySample& s) { return value < s.t; });
  const size_t k = static_cast<size_t>(std::distance(trajectory.begin(), it)) - 1;
  target.pose_des = trajectory[k].pose;
  if (trajectory[k].twist) {
    target.twist_des = *trajectory[k].twist;
  } else if (k + 1 < trajectory.size()) {
    target.twist_des = derive_desired_twist(trajectory[k].pose, trajectory[k + 1].pose,
                                            trajectory[k + 1].t - trajectory[k].t);
  }
  return target;
}

}  // namespace arm
