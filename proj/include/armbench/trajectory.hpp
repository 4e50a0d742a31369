#pragma once

#include <optional>
#include <string>
#include <vector>

#include "armbench/controllers.hpp"
#include "armbench/types.hpp"

namespace arm {

/// One timestamped reference pose; twist is optional and derived from
/// neighbouring samples when absent.
struct TrajectorySample {
  double t = 0.0;
  Pose pose;
  std::optional<Twist> twist;
};

using Trajectory = std::vector<TrajectorySample>;

/// CSV header `t,px,py,pz,qw,qx,qy,qz`, one sample per row, SI units.
/// Applies the quaternion continuity filter (sign-flip when the dot product
/// with the previous sample is negative). Throws ParseError on malformed
/// input, empty files, or non-increasing timestamps.
Trajectory load_trajectory(const std::string& path);

void write_trajectory(const Trajectory& trajectory, const std::string& path);

enum class SynthKind { lissajous, step, circle };

SynthKind synth_kind_from_string(const std::string& name);
const char* to_string(SynthKind kind);

struct SynthParams {
  Pose center;
  Vec3 amplitude{0.0, 0.0, 0.0};     // per-axis (lissajous), radius in [0] (circle), offset (step)
  Vec3 frequency_hz{0.0, 0.0, 0.0};  // per-axis (lissajous), [0] used for circle
  Vec3 phase_rad{0.0, 0.0, 0.0};
  Vec3 plane_u{1.0, 0.0, 0.0};  // circle plane, orthonormal pair
  Vec3 plane_v{0.0, 0.0, 1.0};
  double rot_amplitude_rad = 0.0;  // sinusoidal rotation about rot_axis
  Vec3 rot_axis{0.0, 0.0, 1.0};
  double rot_frequency_hz = 0.0;
  double step_time_s = 1.0;  // step kind: time of the offset jump
};

/// Smooth synthetic pose streams standing in for recorded operator motion.
Trajectory synth_trajectory(SynthKind kind, const SynthParams& params, double duration_s,
                            double rate_hz);

/// Zero-order hold: pose of the latest sample at or before t, desired twist
/// from the enclosing sample pair (zero before the first and after the last).
ControlTarget resample_hold(const Trajectory& trajectory, double t);

}  // namespace arm
