#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "armbench/dynamics.hpp"
#include "armbench/kinematics.hpp"
#include "support/test_models.hpp"

using namespace arm;

TEST_CASE("pendulum statics and mass match the analytic model") {
  const double mass = 1.5, r = 0.4, ixx = 0.01;
  const RobotModel pendulum = testing::make_pendulum(mass, r, ixx);
  const double g = 9.81;

  // Rotating about +x from hanging: gravity torque to hold is m g r sin(q).
  for (double q : {0.0, 0.3, 1.0, -0.7}) {
    const VecX qv = VecX::Constant(1, q);
    const VecX tau = gravity_forces(pendulum, qv);
    CHECK(tau[0] == doctest::Approx(mass * g * r * std::sin(q)).epsilon(1e-10));
  }

  const MatX M = mass_matrix(pendulum, VecX::Zero(1));
  CHECK(M(0, 0) == doctest::Approx(ixx + mass * r * r).epsilon(1e-12));
}

TEST_CASE("statics: inverse dynamics at rest returns gravity torques") {
  const RobotModel model = testing::shipped_model();
  std::mt19937 rng(3);
  const VecX q = testing::random_q(model, rng);
  const VecX zero = VecX::Zero(7);
  CHECK((inverse_dynamics(model, q, zero, zero) - gravity_forces(model, q)).norm() < 1e-12);

  const RobotModel no_g = testing::gravity_free(model);
  CHECK(inverse_dynamics(no_g, q, zero, zero).norm() < 1e-12);
}

TEST_CASE("unit-acceleration probes recover mass matrix columns") {
  const RobotModel model = testing::shipped_model();
  std::mt19937 rng(5);
  for (int trial = 0; trial < 25; ++trial) {
    const VecX q = testing::random_q(model, rng);
    const MatX M = mass_matrix(model, q);
    const VecX g = gravity_forces(model, q);
    for (int j = 0; j < model.n; ++j) {
      VecX ej = VecX::Zero(model.n);
      ej[j] = 1.0;
      const VecX probe = inverse_dynamics(model, q, VecX::Zero(7), ej);
      CHECK((probe - g - M.col(j)).cwiseAbs().maxCoeff() < 1e-9);
    }
  }
}

TEST_CASE("mass matrix is symmetric positive-definite") {
  const RobotModel model = testing::shipped_model();
  std::mt19937 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const MatX M = mass_matrix(model, testing::random_q(model, rng));
    CHECK((M - M.transpose()).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(Eigen::SelfAdjointEigenSolver<MatX>(M).eigenvalues().minCoeff() > 0.0);
  }
}

TEST_CASE("inverse dynamics decomposes into M qdd + bias") {
  const RobotModel model = testing::shipped_model();
  std::mt19937 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const VecX q = testing::random_q(model, rng);
    const VecX qd = testing::random_vec(7, rng);
    const VecX qdd = testing::random_vec(7, rng);
    const VecX tau = inverse_dynamics(model, q, qd, qdd);
    const VecX assembled = mass_matrix(model, q) * qdd + bias_forces(model, q, qd);
    CHECK((tau - assembled).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("bias splits into gravity at rest") {
  const RobotModel model = testing::shipped_model();
  std::mt19937 rng(13);
  const VecX q = testing::random_q(model, rng);
  CHECK((bias_forces(model, q, VecX::Zero(7)) - gravity_forces(model, q)).norm() < 1e-12);
  const RobotModel no_g = testing::gravity_free(model);
  CHECK(bias_forces(no_g, q, VecX::Zero(7)).norm() < 1e-12);
}

TEST_CASE("power balance: qd' (Mdot - 2C) qd = 0") {
  const RobotModel model = testing::gravity_free(testing::shipped_model());
  std::mt19937 rng(17);
  const double h = 1e-6;
  for (int trial = 0; trial < 100; ++trial) {
    const VecX q = testing::random_q(model, rng, 0.2);
    const VecX qd = testing::random_vec(7, rng);
    // C qd = bias with gravity off; Mdot by central differences along qd.
    const VecX c_qd = bias_forces(model, q, qd);
    const MatX Mdot =
        (mass_matrix(model, q + qd * h) - mass_matrix(model, q - qd * h)) / (2.0 * h);
    const double residual = qd.dot(Mdot * qd) - 2.0 * qd.dot(c_qd);
    CHECK(std::abs(residual) < 1e-6);
  }
}

TEST_CASE("forward dynamics: equilibrium torque gives zero acceleration") {
  const RobotModel model = testing::shipped_model();
  std::mt19937 rng(19);
  const VecX q = testing::random_q(model, rng);
  const VecX qd = testing::random_vec(7, rng);
  const VecX qdd = forward_dynamics(model, q, qd, bias_forces(model, q, qd));
  CHECK(qdd.norm() < 1e-9);
}

TEST_CASE("forward and inverse dynamics round-trip") {
  const RobotModel model = testing::shipped_model();
  std::mt19937 rng(23);
  for (int trial = 0; trial < 50; ++trial) {
    const VecX q = testing::random_q(model, rng);
    const VecX qd = testing::random_vec(7, rng);
    const VecX qdd = testing::random_vec(7, rng);
    const VecX back = forward_dynamics(model, q, qd, inverse_dynamics(model, q, qd, qdd));
    CHECK((back - qdd).cwiseAbs().maxCoeff() < 1e-8);
  }
}

TEST_CASE("forward dynamics matches a dense LU solve") {
  const RobotModel model = testing::shipped_model();
  std::mt19937 rng(29);
  for (int trial = 0; trial < 25; ++trial) {
    const VecX q = testing::random_q(model, rng);
    const VecX qd = testing::random_vec(7, rng);
    const VecX tau = testing::random_vec(7, rng, 10.0);
    const VecX expected =
        mass_matrix(model, q).fullPivLu().solve(tau - bias_forces(model, q, qd));
    CHECK((forward_dynamics(model, q, qd, tau) - expected).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("kinetic energy is nearly conserved in free gravity-less motion") {
  const RobotModel model = testing::gravity_free(testing::shipped_model());
  JointState state(VecX::Zero(7), VecX::Constant(7, 0.3));
  const double dt = 1e-4;
  const auto energy = [&](const JointState& s) {
    return 0.5 * s.qd.dot(mass_matrix(model, s.q) * s.qd);
  };
  const double e0 = energy(state);
  for (int k = 0; k < 10000; ++k) {  // 1 s
    const VecX qdd = forward_dynamics(model, state.q, state.qd, VecX::Zero(7));
    state.qd += qdd * dt;
    state.q += state.qd * dt;
  }
  CHECK(std::abs(energy(state) - e0) / e0 < 1e-3);
}

TEST_CASE("task-space inertia: identity case") {
  Jacobian J(6, 7);
  J.setZero();
  J.topLeftCorner<6, 6>().setIdentity();
  const TaskInertia ti = task_space_inertia(MatX::Identity(7, 7), J, 0.0);
  CHECK((ti.lambda - Mat6::Identity()).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((ti.lambda_sqrt - Mat6::Identity()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("task-space inertia: diagonal case") {
  // J M^-1 J' = diag(4,4,4,1,1,1) by choosing M = I and scaling J rows.
  Jacobian J(6, 7);
  J.setZero();
  for (int i = 0; i < 3; ++i) J(i, i) = 2.0;
  for (int i = 3; i < 6; ++i) J(i, i) = 1.0;
  const TaskInertia ti = task_space_inertia(MatX::Identity(7, 7), J, 0.0);
  Vec6 expected_lambda, expected_sqrt;
  expected_lambda << 0.25, 0.25, 0.25, 1, 1, 1;
  expected_sqrt << 0.5, 0.5, 0.5, 1, 1, 1;
  CHECK((ti.lambda - MatX(expected_lambda.asDiagonal())).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((ti.lambda_sqrt - MatX(expected_sqrt.asDiagonal())).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("task-space inertia square root is self-consistent on random states") {
  const RobotModel model = testing::shipped_model();
  std::mt19937 rng(31);
  for (int trial = 0; trial < 100; ++trial) {
    const VecX q = testing::random_q(model, rng);
    const MatX M = mass_matrix(model, q);
    const Jacobian J = space_jacobian(model, q);
    const TaskInertia ti = task_space_inertia(M, J);
    CHECK((ti.lambda_sqrt * ti.lambda_sqrt - ti.lambda).norm() < 1e-8);
    CHECK((ti.lambda - ti.lambda.transpose()).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((ti.lambda_sqrt - ti.lambda_sqrt.transpose()).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("task-space inertia inverts J M^-1 J' when undamped") {
  const RobotModel model = testing::shipped_model();
  std::mt19937 rng(37);
  const VecX q = testing::random_q(model, rng);
  const MatX M = mass_matrix(model, q);
  const Jacobian J = space_jacobian(model, q);
  const Mat6 W = J * M.llt().solve(MatX(J.transpose()));
  const TaskInertia ti = task_space_inertia(M, J, 0.0);
  CHECK((ti.lambda * W - Mat6::Identity()).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("task-space inertia raises on a collapsed Jacobian") {
  Jacobian J(6, 7);
  J.setZero();
  CHECK_THROWS_AS(task_space_inertia(MatX::Identity(7, 7), J, 0.0), SingularityError);
}

TEST_CASE("critical damping: identity and diagonal cases") {
  CHECK((critical_damping(Mat6::Identity(), Vec6::Ones()) - 2.0 * Mat6::Identity()).norm() <
        1e-14);
  // lambda = diag(4) so lambda_sqrt = diag(2); K = diag(9): D = 2*2*3 = 12 on the diagonal.
  const Mat6 d = critical_damping(2.0 * Mat6::Identity(), Vec6::Constant(9.0));
  CHECK((d - 12.0 * Mat6::Identity()).norm() < 1e-12);
}

TEST_CASE("critical damping is symmetric and matches the direct product form") {
  const RobotModel model = testing::shipped_model();
  std::mt19937 rng(41);
  Vec6 k_des;
  k_des << 80, 80, 80, 5, 5, 5;
  for (int trial = 0; trial < 100; ++trial) {
    const VecX q = testing::random_q(model, rng);
    const TaskInertia ti = task_space_inertia(mass_matrix(model, q), space_jacobian(model, q));
    const Mat6 d = critical_damping(ti.lambda_sqrt, k_des);
    CHECK((d - d.transpose()).cwiseAbs().maxCoeff() < 1e-10);
    const Mat6 k_sqrt = k_des.cwiseSqrt().asDiagonal();
    const Mat6 direct = ti.lambda_sqrt * k_sqrt + k_sqrt * ti.lambda_sqrt;
    CHECK((d - direct).cwiseAbs().maxCoeff() < 1e-10);
  }
}
