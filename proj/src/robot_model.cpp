#include "armbench/robot_model.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

#include "armbench/kv_file.hpp"

namespace arm {

namespace {

std::string joint_key(const char* array, int i, const char* field) {
  return std::string(array) + "[" + std::to_string(i) + "]." + field;
}

Vec3 get_vec3(const KvFile& kv, const std::string& key) {
  const VecX v = kv.get_vector(key);
  if (v.size() != 3) throw ParseError("key " + key + ": expected 3 values, got " + std::to_string(v.size()));
  return v.head<3>();
}

Mat3 get_mat3(const KvFile& kv, const std::string& key) {
  const VecX v = kv.get_vector(key);
  if (v.size() != 9) throw ParseError("key " + key + ": expected 9 values (row-major 3x3), got " + std::to_string(v.size()));
  Mat3 m;
  m << v[0], v[1], v[2], v[3], v[4], v[5], v[6], v[7], v[8];
  return m;
}

VecX get_vec_n(const KvFile& kv, const std::string& key, int n) {
  const VecX v = kv.get_vector(key);
  if (v.size() != n) {
    throw ParseError("key " + key + ": expected " + std::to_string(n) + " values, got " + std::to_string(v.size()));
  }
  return v;
}

}  // namespace

RobotModel model_from_kv(const KvFile& kv) {
  RobotModel model;
  const double n_raw = kv.get_scalar("n");
  model.n = static_cast<int>(n_raw);
  if (model.n <= 0 || n_raw != model.n) throw ParseError("n must be a positive integer");

  model.axes.resize(model.n);
  model.links.resize(model.n);
  for (int i = 0; i < model.n; ++i) {
    model.axes[i].omega = get_vec3(kv, joint_key("axes", i, "omega"));
    model.axes[i].v = get_vec3(kv, joint_key("axes", i, "v"));
    model.links[i].mass = kv.get_scalar(joint_key("links", i, "mass"));
    model.links[i].com = get_vec3(kv, joint_key("links", i, "com"));
    model.links[i].inertia = get_mat3(kv, joint_key("links", i, "inertia"));
  }

  const VecX quat = get_vec_n(kv, "home.rotation", 4);
  model.home = Pose(Eigen::Quaterniond(quat[0], quat[1], quat[2], quat[3]),
                    get_vec3(kv, "home.translation"));

  model.limits.q_min = get_vec_n(kv, "limits.q_min", model.n);
  model.limits.q_max = get_vec_n(kv, "limits.q_max", model.n);
  model.limits.qd_min = get_vec_n(kv, "limits.qd_min", model.n);
  model.limits.qd_max = get_vec_n(kv, "limits.qd_max", model.n);
  model.limits.tau_min = get_vec_n(kv, "limits.tau_min", model.n);
  model.limits.tau_max = get_vec_n(kv, "limits.tau_max", model.n);
  model.gravity = kv.has("gravity") ? get_vec3(kv, "gravity") : Vec3(0.0, 0.0, -9.81);
  return model;
}

KvFile model_to_kv(const RobotModel& model) {
  KvFile kv;
  kv.set("n", static_cast<double>(model.n));
  for (int i = 0; i < model.n; ++i) {
    kv.set(joint_key("axes", i, "omega"), VecX(model.axes[i].omega));
    kv.set(joint_key("axes", i, "v"), VecX(model.axes[i].v));
  }
  VecX quat(4);
  quat << model.home.rotation.w(), model.home.rotation.x(), model.home.rotation.y(), model.home.rotation.z();
  kv.set("home.rotation", quat);
  kv.set("home.translation", VecX(model.home.translation));
  for (int i = 0; i < model.n; ++i) {
    kv.set(joint_key("links", i, "mass"), model.links[i].mass);
    kv.set(joint_key("links", i, "com"), VecX(model.links[i].com));
    VecX inertia(9);
    const Mat3& I = model.links[i].inertia;
    inertia << I(0, 0), I(0, 1), I(0, 2), I(1, 0), I(1, 1), I(1, 2), I(2, 0), I(2, 1), I(2, 2);
    kv.set(joint_key("links", i, "inertia"), inertia);
  }
  kv.set("limits.q_min", model.limits.q_min);
  kv.set("limits.q_max", model.limits.q_max);
  kv.set("limits.qd_min", model.limits.qd_min);
  kv.set("limits.qd_max", model.limits.qd_max);
  kv.set("limits.tau_min", model.limits.tau_min);
  kv.set("limits.tau_max", model.limits.tau_max);
  kv.set("gravity", VecX(model.gravity));
  return kv;
}

RobotModel load_model(const std::string& path) {
  const RobotModel model = model_from_kv(KvFile::parse_file(path));
  const auto violations = validate_model(model);
  if (!violations.empty()) {
    throw ValidationError("model " + path + ": " + violations.front());
  }
  return model;
}

void write_model(const RobotModel& model, const std::string& path) {
  model_to_kv(model).write_file(path);
}

std::vector<std::string> validate_model(const RobotModel& model) {
  std::vector<std::string> out;
  const auto fail = [&out](const std::string& msg) { out.push_back(msg); };

  if (model.n <= 0) {
    fail("joint count n must be positive");
    return out;
  }
  if (static_cast<int>(model.axes.size()) != model.n) fail("axes array length != n");
  if (static_cast<int>(model.links.size()) != model.n) fail("links array length != n");

  for (int i = 0; i < static_cast<int>(model.axes.size()); ++i) {
    const double wn = model.axes[i].omega.norm();
    if (std::abs(wn - 1.0) > 1e-9 && wn > 1e-9) {
      fail("axes[" + std::to_string(i) + "].omega: norm must be 0 or 1, got " + format_double(wn));
    }
    if (wn <= 1e-9 && std::abs(model.axes[i].v.norm() - 1.0) > 1e-9) {
      fail("axes[" + std::to_string(i) + "].v: prismatic axis must have unit v");
    }
  }

  for (int i = 0; i < static_cast<int>(model.links.size()); ++i) {
    const LinkInertia& link = model.links[i];
    const std::string where = "links[" + std::to_string(i) + "]";
    if (!(link.mass > 0.0)) fail(where + ".mass: must be > 0");
    if ((link.inertia - link.inertia.transpose()).cwiseAbs().maxCoeff() > 1e-12) {
      fail(where + ".inertia: not symmetric");
      continue;
    }
    Eigen::SelfAdjointEigenSolver<Mat3> eig(link.inertia);
    const Vec3 moments = eig.eigenvalues();
    if (moments.minCoeff() <= 0.0) {
      fail(where + ".inertia: not positive-definite");
      continue;
    }
    // Principal moments of a rigid body obey the triangle inequality.
    if (moments[0] + moments[1] < moments[2] - 1e-12) {
      fail(where + ".inertia: principal moments violate triangle inequality");
    }
  }

  const auto check_len = [&](const VecX& v, const char* name) {
    if (v.size() != model.n) fail(std::string("limits.") + name + ": length != n");
  };
  check_len(model.limits.q_min, "q_min");
  check_len(model.limits.q_max, "q_max");
  check_len(model.limits.qd_min, "qd_min");
  check_len(model.limits.qd_max, "qd_max");
  check_len(model.limits.tau_min, "tau_min");
  check_len(model.limits.tau_max, "tau_max");
  if (model.limits.q_min.size() == model.n && model.limits.q_max.size() == model.n) {
    for (int i = 0; i < model.n; ++i) {
      if (!(model.limits.q_min[i] < model.limits.q_max[i])) {
        fail("limits: q_min >= q_max on joint " + std::to_string(i));
      }
    }
  }
  if (model.limits.qd_min.size() == model.n && model.limits.qd_max.size() == model.n) {
    for (int i = 0; i < model.n; ++i) {
      if (!(model.limits.qd_min[i] < 0.0 && model.limits.qd_max[i] > 0.0)) {
        fail("limits: velocity bounds must straddle 0 on joint " + std::to_string(i));
      }
    }
  }
  if (model.limits.tau_min.size() == model.n && model.limits.tau_max.size() == model.n) {
    for (int i = 0; i < model.n; ++i) {
      if (!(model.limits.tau_min[i] < 0.0 && model.limits.tau_max[i] > 0.0)) {
        fail("limits: torque bounds must straddle 0 on joint " + std::to_string(i));
      }
    }
  }

  const Mat3 R = model.home.rotation_matrix();
  if ((R * R.transpose() - Mat3::Identity()).cwiseAbs().maxCoeff() > 1e-9 ||
      std::abs(R.determinant() - 1.0) > 1e-9) {
    fail("home.rotation: not a proper rotation");
  }
  return out;
}

}  // namespace arm
