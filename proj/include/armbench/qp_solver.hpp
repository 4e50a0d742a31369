#pragma once

#include <limits>

#include "armbench/types.hpp"

namespace arm {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Dense convex QP:  min 1/2 x^T P x + c^T x   s.t.  l <= A x <= u.
/// P must be symmetric PSD; l/u entries may be +-infinity.
struct QPProblem {
  MatX P;
  VecX c;
  MatX A;  // m x n, m may be 0
  VecX l;
  VecX u;

  Eigen::Index num_vars() const { return c.size(); }
  Eigen::Index num_constraints() const { return l.size(); }
};

enum class QPStatus { solved, max_iterations, primal_infeasible };

const char* to_string(QPStatus status);

struct QPSolution {
  VecX x;
  VecX y;  // constraint multipliers
  QPStatus status = QPStatus::max_iterations;
  int iterations = 0;
  double primal_residual = kInfinity;
  double dual_residual = kInfinity;
  double objective = 0.0;
};

struct QPSettings {
  double eps_abs = 1e-6;
  double eps_rel = 1e-6;
  int max_iter = 4000;
  double rho = 0.1;
  double sigma = 1e-6;
  double alpha = 1.6;
  bool adaptive_rho = true;
  bool warm_start = true;
  double eps_prim_inf = 1e-5;
  int check_interval = 25;
  double psd_repair_sigma = 1e-8;
};

/// Operator-splitting solver. An instance owns warm-start state carried
/// between calls, so consecutive near-identical problems (a control loop)
/// converge in a few iterations. Single-owner; run one instance per stream.
class QPSolver {
 public:
  explicit QPSolver(QPSettings settings = {});

  const QPSettings& settings() const { return settings_; }

  QPSolution solve(const QPProblem& problem);

  /// Drops warm-start state; the next solve is cold.
  void reset();

 private:
  QPSettings settings_;
  bool have_state_ = false;
  VecX x_, y_, z_;
};

}  // namespace arm
