#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "armbench/kinematics.hpp"
#include "support/oracles.hpp"
#include "support/test_models.hpp"

using namespace arm;

TEST_CASE("exp_screw: identity at theta = 0") {
  const ScrewAxis axis{Vec3(0, 0, 1), Vec3(0.1, -0.2, 0.3)};
  const Pose T = exp_screw(axis, 0.0);
  CHECK(T.translation.norm() == doctest::Approx(0.0));
  CHECK(T.rotation.angularDistance(Eigen::Quaterniond::Identity()) == doctest::Approx(0.0));
}

TEST_CASE("exp_screw: pure z-rotation by pi/2") {
  const ScrewAxis axis{Vec3(0, 0, 1), Vec3::Zero()};
  const Pose T = exp_screw(axis, M_PI / 2.0);
  CHECK(T.rotation.w() == doctest::Approx(std::sqrt(0.5)));
  CHECK(T.rotation.z() == doctest::Approx(std::sqrt(0.5)));
  CHECK(T.rotation.x() == doctest::Approx(0.0));
  CHECK(T.translation.norm() == doctest::Approx(0.0));
}

TEST_CASE("exp_screw matches the 30-term series oracle") {
  const ScrewAxis axis{Vec3(1, 0, 0), Vec3(0, 0.3, -0.2)};
  const Eigen::Matrix4d expected = oracle::series_exp_screw(axis, 0.7);
  const Eigen::Matrix4d actual = exp_screw(axis, 0.7).matrix();
  CHECK((actual - expected).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("exp_screw handles prismatic axes") {
  const ScrewAxis axis{Vec3::Zero(), Vec3(0, 0, 1)};
  const Pose T = exp_screw(axis, 0.25);
  CHECK((T.translation - Vec3(0, 0, 0.25)).norm() < 1e-15);
  CHECK(T.rotation.angularDistance(Eigen::Quaterniond::Identity()) == doctest::Approx(0.0));
}

TEST_CASE("forward_kinematics: q = 0 lands exactly on home") {
  const RobotModel model = testing::shipped_model();
  const Pose T = forward_kinematics(model, VecX::Zero(7));
  CHECK((T.translation - model.home.translation).norm() < 1e-12);
  CHECK(T.rotation.angularDistance(model.home.rotation) < 1e-12);
}

TEST_CASE("forward_kinematics: single-joint motion is one exponential times home") {
  const RobotModel model = testing::shipped_model();
  VecX q = VecX::Zero(7);
  q[0] = 0.6;
  const Pose expected = exp_screw(model.axes[0], 0.6) * model.home;
  const Pose actual = forward_kinematics(model, q);
  CHECK((actual.translation - expected.translation).norm() < 1e-12);
  CHECK(actual.rotation.angularDistance(expected.rotation) < 1e-12);
}

TEST_CASE("forward_kinematics agrees with the series oracle on random q") {
  const RobotModel model = testing::shipped_model();
  std::mt19937 rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    const VecX q = testing::random_q(model, rng);
    const Eigen::Matrix4d expected = oracle::series_forward_kinematics(model, q);
    const Eigen::Matrix4d actual = forward_kinematics(model, q).matrix();
    CHECK((actual - expected).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("space_jacobian: first column at q = 0 is the reordered first axis") {
  const RobotModel model = testing::shipped_model();
  const Jacobian J = space_jacobian(model, VecX::Zero(7));
  const Vec3 omega = model.axes[0].omega;
  const Vec3 v = model.axes[0].v;
  const Vec3 p_ee = model.home.translation;
  CHECK((J.col(0).tail<3>() - omega).norm() < 1e-12);
  CHECK((J.col(0).head<3>() - (v + omega.cross(p_ee))).norm() < 1e-12);
}

TEST_CASE("space_jacobian matches finite differences of forward_kinematics") {
  const RobotModel model = testing::shipped_model();
  std::mt19937 rng(11);
  double max_err = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const VecX q = testing::random_q(model, rng);
    const MatX J = space_jacobian(model, q);
    const MatX J_fd = oracle::finite_difference_jacobian(model, q);
    max_err = std::max(max_err, (J - J_fd).cwiseAbs().maxCoeff());
  }
  CHECK(max_err < 1e-5);
}

TEST_CASE("jacobian_dot_qdot: zero at qdot = 0") {
  const RobotModel model = testing::shipped_model();
  std::mt19937 rng(13);
  const VecX q = testing::random_q(model, rng);
  CHECK(jacobian_dot_qdot(model, q, VecX::Zero(7)).norm() == doctest::Approx(0.0));
}

TEST_CASE("jacobian_dot_qdot matches the directional finite difference") {
  const RobotModel model = testing::shipped_model();
  std::mt19937 rng(17);
  for (int trial = 0; trial < 100; ++trial) {
    const VecX q = testing::random_q(model, rng);
    const VecX qd = testing::random_vec(7, rng);
    const Vec6 expected = oracle::finite_difference_jdot_qdot(model, q, qd);
    const Vec6 actual = jacobian_dot_qdot(model, q, qd);
    CHECK((actual - expected).cwiseAbs().maxCoeff() < 1e-4);
  }
}

TEST_CASE("jacobian_dot_qdot on a single revolute joint: analytic 1-DoF case") {
  // The angular column of a lone revolute joint is configuration-independent,
  // so its Jdot qd component vanishes; the linear part is the centripetal
  // term w x (w x p) qd^2.
  const double r = 0.4;
  const RobotModel pendulum = testing::make_pendulum(1.5, r);
  const VecX q = VecX::Constant(1, 0.8);
  const VecX qd = VecX::Constant(1, 2.0);
  const Vec6 jdqd = jacobian_dot_qdot(pendulum, q, qd);
  CHECK(jdqd.tail<3>().norm() < 1e-12);
  const Vec3 p_ee = forward_kinematics(pendulum, q).translation;
  const Vec3 omega = pendulum.axes[0].omega;
  const Vec3 expected = omega.cross(omega.cross(p_ee)) * qd[0] * qd[0];
  CHECK((jdqd.head<3>() - expected).norm() < 1e-12);
}

TEST_CASE("manipulability: identity block gives 1, rank deficiency gives 0") {
  Jacobian J(6, 7);
  J.setZero();
  J.topLeftCorner<6, 6>().setIdentity();
  CHECK(manipulability(J) == doctest::Approx(1.0));

  // Two identical columns plus only five independent ones: rank 5.
  Jacobian J2(6, 7);
  J2.setZero();
  for (int i = 0; i < 5; ++i) J2(i, i) = 1.0;
  J2.col(5) = J2.col(0);
  J2.col(6) = J2.col(1);
  CHECK(manipulability(J2) < 1e-9);
}

TEST_CASE("manipulability agrees with the SVD singular-value product") {
  std::mt19937 rng(23);
  for (int trial = 0; trial < 50; ++trial) {
    MatX J = MatX::NullaryExpr(6, 7, [&]() {
      return std::normal_distribution<double>(0.0, 1.0)(rng);
    });
    const double expected = oracle::svd_manipulability(J);
    const double actual = manipulability(Jacobian(J));
    CHECK(actual == doctest::Approx(expected).epsilon(1e-8));
  }
}

TEST_CASE("manipulability is invariant under column permutations") {
  std::mt19937 rng(29);
  MatX J = MatX::NullaryExpr(6, 7, [&]() {
    return std::normal_distribution<double>(0.0, 1.0)(rng);
  });
  const double reference = manipulability(Jacobian(J));
  std::vector<int> perm{6, 2, 0, 4, 1, 5, 3};
  MatX Jp(6, 7);
  for (int i = 0; i < 7; ++i) Jp.col(i) = J.col(perm[i]);
  CHECK(manipulability(Jacobian(Jp)) == doctest::Approx(reference).epsilon(1e-10));
}

TEST_CASE("manipulability is zero exactly when a singular value collapses") {
  std::mt19937 rng(31);
  MatX U = MatX::NullaryExpr(6, 6, [&]() {
    return std::normal_distribution<double>(0.0, 1.0)(rng);
  });
  const Eigen::HouseholderQR<MatX> qr(U);
  const MatX Q = qr.householderQ();
  VecX sigma(6);
  sigma << 1.0, 0.8, 0.5, 0.3, 0.2, 1e-12;
  MatX J = Q * sigma.asDiagonal() * MatX::Identity(6, 7);
  CHECK(manipulability(Jacobian(J)) < 1e-9);
  sigma[5] = 0.1;
  J = Q * sigma.asDiagonal() * MatX::Identity(6, 7);
  CHECK(manipulability(Jacobian(J)) > 1e-3);
}

TEST_CASE("joint_manipulability is the column norm") {
  Jacobian J(6, 3);
  J.setZero();
  J.col(1)(0) = 1.0;
  J.col(2)(0) = 3.0;
  J.col(2)(1) = 4.0;
  CHECK(joint_manipulability(J, 0) == doctest::Approx(0.0));
  CHECK(joint_manipulability(J, 1) == doctest::Approx(1.0));
  CHECK(joint_manipulability(J, 2) == doctest::Approx(5.0));
}

TEST_CASE("pose rotations stay unit under long composition chains") {
  std::mt19937 rng(37);
  std::uniform_real_distribution<double> angle(-0.1, 0.1);
  Pose T;
  for (int i = 0; i < 1000000; ++i) {
    const Eigen::Quaterniond dq(Eigen::AngleAxisd(angle(rng), Vec3::UnitZ()));
    T = T * Pose(dq, Vec3::Zero());
  }
  CHECK(std::abs(T.rotation.norm() - 1.0) < 1e-9);
}
