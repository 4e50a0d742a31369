#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>

#include "armbench/kv_file.hpp"
#include "armbench/robot_model.hpp"
#include "support/test_models.hpp"

using namespace arm;

namespace {

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

}  // namespace

TEST_CASE("shipped model loads and validates") {
  const RobotModel model = testing::shipped_model();
  CHECK(model.n == 7);
  CHECK(validate_model(model).empty());

  // Joint 2 is the x-axis shoulder roll through (0, y2, z2): v = (0, z2, -y2).
  CHECK(model.axes[1].omega.isApprox(Vec3(1, 0, 0)));
  CHECK(model.axes[1].v[0] == 0.0);
  CHECK(model.axes[1].v[1] == doctest::Approx(0.0));
  CHECK(model.axes[1].v[2] == doctest::Approx(-0.1));
  CHECK(model.gravity.isApprox(Vec3(0, 0, -9.81)));
}

TEST_CASE("load_model rejects inverted position limits naming the joint") {
  KvFile kv = model_to_kv(testing::shipped_model());
  VecX q_min = kv.get_vector("limits.q_min");
  q_min[3] = 99.0;  // above q_max on joint 3
  kv.set("limits.q_min", q_min);
  const std::string path = temp_path("armbench_bad_limits.model");
  kv.write_file(path);
  CHECK_THROWS_WITH_AS(load_model(path), doctest::Contains("joint 3"), ValidationError);
  std::remove(path.c_str());
}

TEST_CASE("load_model rejects non-unit rotation axes") {
  KvFile kv = model_to_kv(testing::shipped_model());
  kv.set("axes[4].omega", VecX(Vec3(0, 0, 2)));
  const std::string path = temp_path("armbench_bad_axis.model");
  kv.write_file(path);
  CHECK_THROWS_AS(load_model(path), ValidationError);
  std::remove(path.c_str());
}

TEST_CASE("load_model reports malformed files as parse errors") {
  const std::string path = temp_path("armbench_malformed.model");
  {
    std::ofstream out(path);
    out << "this is not a key value line\n";
  }
  CHECK_THROWS_AS(load_model(path), ParseError);
  std::remove(path.c_str());
}

TEST_CASE("validate_model flags exactly one violation per broken field") {
  RobotModel model = testing::shipped_model();
  CHECK(validate_model(model).empty());

  SUBCASE("zero mass names the link") {
    model.links[4].mass = 0.0;
    const auto violations = validate_model(model);
    REQUIRE(violations.size() == 1);
    CHECK(violations[0].find("links[4]") != std::string::npos);
    CHECK(violations[0].find("mass") != std::string::npos);
  }
  SUBCASE("negative inertia eigenvalue names positive-definiteness") {
    model.links[2].inertia = Mat3::Identity() * 0.01;
    model.links[2].inertia(2, 2) = -0.1;
    const auto violations = validate_model(model);
    REQUIRE(violations.size() == 1);
    CHECK(violations[0].find("links[2]") != std::string::npos);
    CHECK(violations[0].find("positive-definite") != std::string::npos);
  }
  SUBCASE("asymmetric inertia") {
    model.links[0].inertia(0, 1) = 1e-3;
    const auto violations = validate_model(model);
    REQUIRE(violations.size() == 1);
    CHECK(violations[0].find("symmetric") != std::string::npos);
  }
  SUBCASE("non-unit home rotation") {
    model.home.rotation.coeffs() *= 1.5;  // bypasses construction canonicalization
    const auto violations = validate_model(model);
    REQUIRE(violations.size() == 1);
    CHECK(violations[0].find("home.rotation") != std::string::npos);
  }
  SUBCASE("velocity bounds must straddle zero") {
    model.limits.qd_min[6] = 0.5;
    REQUIRE(validate_model(model).size() == 1);
  }
}

TEST_CASE("write/load round-trip preserves every field") {
  const RobotModel model = testing::shipped_model();
  const std::string path = temp_path("armbench_roundtrip.model");
  write_model(model, path);
  const RobotModel copy = load_model(path);
  std::remove(path.c_str());

  CHECK(copy.n == model.n);
  for (int i = 0; i < model.n; ++i) {
    CHECK((copy.axes[i].omega - model.axes[i].omega).norm() < 1e-12);
    CHECK((copy.axes[i].v - model.axes[i].v).norm() < 1e-12);
    CHECK(copy.links[i].mass == doctest::Approx(model.links[i].mass).epsilon(1e-12));
    CHECK((copy.links[i].com - model.links[i].com).norm() < 1e-12);
    CHECK((copy.links[i].inertia - model.links[i].inertia).norm() < 1e-12);
  }
  CHECK((copy.home.translation - model.home.translation).norm() < 1e-12);
  CHECK(copy.home.rotation.angularDistance(model.home.rotation) < 1e-12);
  CHECK((copy.limits.q_min - model.limits.q_min).norm() < 1e-12);
  CHECK((copy.limits.tau_max - model.limits.tau_max).norm() < 1e-12);
  CHECK((copy.gravity - model.gravity).norm() < 1e-12);
}
