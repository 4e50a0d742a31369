#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <random>

#include "armbench/qp_solver.hpp"
#include "support/oracles.hpp"

using namespace arm;

namespace {

double kkt_stationarity(const QPProblem& p, const QPSolution& sol) {
  VecX grad = p.P * sol.x + p.c;
  if (p.num_constraints() > 0) grad += p.A.transpose() * sol.y;
  return grad.cwiseAbs().maxCoeff();
}

double constraint_violation(const QPProblem& p, const VecX& x) {
  if (p.num_constraints() == 0) return 0.0;
  const VecX Ax = p.A * x;
  double v = 0.0;
  for (Eigen::Index i = 0; i < Ax.size(); ++i) {
    v = std::max({v, Ax[i] - p.u[i], p.l[i] - Ax[i]});
  }
  return v;
}

}  // namespace

TEST_CASE("unconstrained scalar: minimizer of x^2 - 2x") {
  QPProblem p;
  p.P = MatX::Constant(1, 1, 2.0);
  p.c = VecX::Constant(1, -2.0);
  p.A = MatX(0, 1);
  p.l = VecX(0);
  p.u = VecX(0);
  QPSolver solver;
  const QPSolution sol = solver.solve(p);
  CHECK(sol.status == QPStatus::solved);
  CHECK(sol.x[0] == doctest::Approx(1.0).epsilon(1e-5));
}

TEST_CASE("active bound clamps the scalar minimizer") {
  QPProblem p;
  p.P = MatX::Constant(1, 1, 2.0);
  p.c = VecX::Zero(1);
  p.A = MatX::Constant(1, 1, 1.0);
  p.l = VecX::Constant(1, 1.0);
  p.u = VecX::Constant(1, 2.0);
  QPSolver solver;
  const QPSolution sol = solver.solve(p);
  CHECK(sol.status == QPStatus::solved);
  CHECK(sol.x[0] == doctest::Approx(1.0).epsilon(1e-5));
}

TEST_CASE("matches the active-set enumeration oracle on random box problems") {
  std::mt19937 rng(2024);
  QPSettings settings;
  settings.warm_start = false;
  settings.eps_abs = 1e-9;  // drive x well below the 1e-5 agreement gate
  settings.eps_rel = 1e-9;
  settings.max_iter = 20000;
  int tested = 0;
  int attempts = 0;
  while (tested < 60 && attempts < 600) {
    ++attempts;
    const QPProblem p = oracle::random_box_qp(rng);
    const auto expected = oracle::active_set_solve(p);
    if (!expected) continue;  // enumeration budget exceeded; draw another
    QPSolver solver(settings);
    const QPSolution sol = solver.solve(p);
    REQUIRE(sol.status == QPStatus::solved);
    CHECK((sol.x - *expected).cwiseAbs().maxCoeff() < 1e-5);
    ++tested;
  }
  CHECK(tested == 60);
}

TEST_CASE("solved status implies small KKT residuals and feasibility") {
  std::mt19937 rng(7);
  for (int trial = 0; trial < 40; ++trial) {
    const QPProblem p = oracle::random_box_qp(rng);
    QPSolver solver;
    const QPSolution sol = solver.solve(p);
    REQUIRE(sol.status == QPStatus::solved);
    CHECK(constraint_violation(p, sol.x) < 1e-6 + 1e-4);
    CHECK(kkt_stationarity(p, sol) < 1e-4);
  }
}

TEST_CASE("objective at the solution beats random feasible points") {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const auto objective = [](const QPProblem& p, const VecX& x) {
    return 0.5 * x.dot(p.P * x) + p.c.dot(x);
  };
  for (int trial = 0; trial < 5; ++trial) {
    // Bounds on x itself so feasible points are cheap to draw.
    const int n = 7;
    QPProblem p = oracle::random_box_qp(rng, n, 2 * n);
    p.A.topRows(n) = MatX::Identity(n, n);
    for (int i = 0; i < n; ++i) {
      p.l[i] = -1.0 - unit(rng);
      p.u[i] = 1.0 + unit(rng);
    }
    p.A.bottomRows(n).setZero();
    p.l.tail(n).setConstant(-kInfinity);
    p.u.tail(n).setConstant(kInfinity);
    QPSolver solver;
    const QPSolution sol = solver.solve(p);
    REQUIRE(sol.status == QPStatus::solved);
    const double best = objective(p, sol.x);
    for (int k = 0; k < 1000; ++k) {
      VecX x(n);
      for (int i = 0; i < n; ++i) x[i] = p.l[i] + unit(rng) * (p.u[i] - p.l[i]);
      CHECK(objective(p, x) >= best - 1e-6);
    }
  }
}

TEST_CASE("solution is invariant under positive row scaling") {
  std::mt19937 rng(13);
  std::uniform_real_distribution<double> scale_dist(0.1, 10.0);
  QPSettings settings;  // tight tolerances so x is resolved well below the gate
  settings.eps_abs = 1e-9;
  settings.eps_rel = 1e-9;
  settings.max_iter = 50000;
  for (int trial = 0; trial < 20; ++trial) {
    const QPProblem p = oracle::random_box_qp(rng);
    QPSolver a(settings), b(settings);
    const QPSolution sol_a = a.solve(p);
    QPProblem scaled = p;
    for (Eigen::Index i = 0; i < p.num_constraints(); ++i) {
      const double s = scale_dist(rng);
      scaled.A.row(i) *= s;
      scaled.l[i] *= s;
      scaled.u[i] *= s;
    }
    const QPSolution sol_b = b.solve(scaled);
    REQUIRE(sol_a.status == QPStatus::solved);
    REQUIRE(sol_b.status == QPStatus::solved);
    CHECK((sol_a.x - sol_b.x).cwiseAbs().maxCoeff() < 2e-5);
  }
}

TEST_CASE("warm starting cuts iterations on a drifting problem family") {
  std::mt19937 rng(17);
  std::vector<int> cold_iters, warm_iters;
  for (int family = 0; family < 100; ++family) {
    QPProblem p = oracle::random_box_qp(rng);
    QPSolver warm;
    (void)warm.solve(p);
    // Perturb the Hessian by under 1%, keeping it PD.
    QPProblem p2 = p;
    p2.P *= 1.005;
    p2.c *= 1.002;
    QPSolver cold;
    cold_iters.push_back(cold.solve(p2).iterations);
    warm_iters.push_back(warm.solve(p2).iterations);
  }
  std::nth_element(cold_iters.begin(), cold_iters.begin() + 50, cold_iters.end());
  std::nth_element(warm_iters.begin(), warm_iters.begin() + 50, warm_iters.end());
  CHECK(warm_iters[50] <= cold_iters[50]);
}

TEST_CASE("detects primal infeasibility from contradictory rows") {
  QPProblem p;
  p.P = MatX::Identity(1, 1);
  p.c = VecX::Zero(1);
  p.A = MatX::Ones(2, 1);
  p.l = VecX(2);
  p.u = VecX(2);
  p.l << -kInfinity, 1.0;  // x <= -1 and x >= 1
  p.u << -1.0, kInfinity;
  QPSolver solver;
  const QPSolution sol = solver.solve(p);
  CHECK(sol.status == QPStatus::primal_infeasible);
}

TEST_CASE("psd repair absorbs tiny negative eigenvalues") {
  QPProblem p;
  p.P = MatX::Identity(2, 2);
  p.P(1, 1) = -1e-12;  // numerically violated semidefiniteness
  p.c = VecX::Constant(2, 1.0);
  p.A = MatX::Identity(2, 2);
  p.l = VecX::Constant(2, -1.0);
  p.u = VecX::Constant(2, 1.0);
  QPSolver solver;
  const QPSolution sol = solver.solve(p);
  CHECK(sol.status == QPStatus::solved);
  CHECK(sol.x[0] == doctest::Approx(-1.0).epsilon(1e-4));
  CHECK(sol.x[1] == doctest::Approx(-1.0).epsilon(1e-4));
}

TEST_CASE("rejects inconsistent bounds") {
  QPProblem p;
  p.P = MatX::Identity(1, 1);
  p.c = VecX::Zero(1);
  p.A = MatX::Ones(1, 1);
  p.l = VecX::Constant(1, 2.0);
  p.u = VecX::Constant(1, 1.0);
  QPSolver solver;
  CHECK_THROWS_AS(solver.solve(p), std::invalid_argument);
}
