#include "armbench/qp_solver.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

namespace arm {

namespace {

constexpr double kRhoMin = 1e-6;
constexpr double kRhoMax = 1e6;
constexpr double kRhoEqualityScale = 1e3;
constexpr int kRuizIterations = 10;
constexpr double kMinScale = 1e-4;
constexpr double kMaxScale = 1e4;

double inf_norm(const VecX& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

VecX clamp(const VecX& v, const VecX& lo, const VecX& hi) {
  return v.cwiseMax(lo).cwiseMin(hi);
}

double limit_scale(double s) {
  if (!std::isfinite(s) || s <= 0.0) return 1.0;
  return std::clamp(s, kMinScale, kMaxScale);
}

// Modified Ruiz equilibration of [P A'; A 0] plus a cost scaling, the usual
// conditioning step for operator-splitting QP solvers. Returns diagonal
// scalings d (variables), e (constraints) and the cost factor.
struct Scaling {
  VecX d;
  VecX e;
  double cost = 1.0;
};

Scaling ruiz_equilibrate(MatX& P, VecX& c, MatX& A, VecX& l, VecX& u) {
  const Eigen::Index n = P.rows();
  const Eigen::Index m = A.rows();
  Scaling s;
  s.d = VecX::Ones(n);
  s.e = VecX::Ones(m);

  for (int iter = 0; iter < kRuizIterations; ++iter) {
    VecX delta_d(n), delta_e(m);
    for (Eigen::Index j = 0; j < n; ++j) {
      double col = P.col(j).cwiseAbs().maxCoeff();
      if (m > 0) col = std::max(col, A.col(j).cwiseAbs().maxCoeff());
      delta_d[j] = 1.0 / std::sqrt(limit_scale(col));
    }
    for (Eigen::Index i = 0; i < m; ++i) {
      delta_e[i] = 1.0 / std::sqrt(limit_scale(A.row(i).cwiseAbs().maxCoeff()));
    }
    P = delta_d.asDiagonal() * P * delta_d.asDiagonal();
    c = delta_d.cwiseProduct(c);
    if (m > 0) {
      A = delta_e.asDiagonal() * A * delta_d.asDiagonal();
      l = delta_e.cwiseProduct(l);
      u = delta_e.cwiseProduct(u);
    }
    s.d = s.d.cwiseProduct(delta_d);
    s.e = s.e.cwiseProduct(delta_e);
  }

  // Cost scaling keeps the objective terms near unit magnitude.
  double p_norm = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) p_norm += P.col(j).cwiseAbs().maxCoeff();
  p_norm /= static_cast<double>(n);
  const double cost = 1.0 / limit_scale(std::max(p_norm, inf_norm(c)));
  P *= cost;
  c *= cost;
  s.cost = cost;
  return s;
}

// Certificate of primal infeasibility on the unscaled problem: a dual
// direction dy with A' dy = 0 and u'(dy)_+ + l'(dy)_- < 0; support terms on
// infinite bounds must vanish.
bool is_primal_infeasibility_certificate(const MatX& A, const VecX& l, const VecX& u,
                                         const VecX& dy, double eps) {
  const double norm_dy = inf_norm(dy);
  if (norm_dy < 1e-14) return false;
  if (inf_norm(A.transpose() * dy) > eps * norm_dy) return false;
  double support = 0.0;
  for (Eigen::Index i = 0; i < dy.size(); ++i) {
    const double pos = std::max(dy[i], 0.0);
    const double neg = std::min(dy[i], 0.0);
    if (pos > 0.0) {
      if (u[i] == kInfinity) return false;
      support += u[i] * pos;
    }
    if (neg < 0.0) {
      if (l[i] == -kInfinity) return false;
      support += l[i] * neg;
    }
  }
  return support < -eps * norm_dy;
}

}  // namespace

const char* to_string(QPStatus status) {
  switch (status) {
    case QPStatus::solved: return "solved";
    case QPStatus::max_iterations: return "max_iterations";
    case QPStatus::primal_infeasible: return "primal_infeasible";
  }
  return "unknown";
}

QPSolver::QPSolver(QPSettings settings) : settings_(settings) {}

void QPSolver::reset() { have_state_ = false; }

QPSolution QPSolver::solve(const QPProblem& problem) {
  const Eigen::Index n = problem.num_vars();
  const Eigen::Index m = problem.num_constraints();
  if (problem.P.rows() != n || problem.P.cols() != n || problem.A.rows() != m ||
      (m > 0 && problem.A.cols() != n) || problem.u.size() != m) {
    throw std::invalid_argument("QPSolver: inconsistent problem dimensions");
  }
  for (Eigen::Index i = 0; i < m; ++i) {
    if (problem.l[i] > problem.u[i]) {
      throw std::invalid_argument("QPSolver: l > u on row " + std::to_string(i));
    }
  }

  MatX P = 0.5 * (problem.P + problem.P.transpose());
  {
    Eigen::SelfAdjointEigenSolver<MatX> eig(P, Eigen::EigenvaluesOnly);
    if (eig.eigenvalues().minCoeff() < 0.0) {
      P += settings_.psd_repair_sigma * MatX::Identity(n, n);
    }
  }
  const MatX P_orig = P;

  VecX c = problem.c;
  MatX A = problem.A;
  VecX l = problem.l;
  VecX u = problem.u;
  const Scaling scaling = ruiz_equilibrate(P, c, A, l, u);

  // Warm state is kept in unscaled coordinates; map it into the scaled frame.
  VecX x, y, z;
  if (settings_.warm_start && have_state_ && x_.size() == n && y_.size() == m) {
    x = x_.cwiseQuotient(scaling.d);
    y = scaling.cost * y_.cwiseQuotient(scaling.e);
    z = m > 0 ? VecX(clamp(z_.cwiseProduct(scaling.e), l, u)) : VecX(0);
  } else {
    x = VecX::Zero(n);
    y = VecX::Zero(m);
    z = m > 0 ? VecX(clamp(A * x, l, u)) : VecX(0);
  }
  have_state_ = true;

  double rho_bar = settings_.rho;
  VecX rho(m), rho_inv(m);
  const auto refresh_rho = [&](double bar) {
    rho_bar = std::clamp(bar, kRhoMin, kRhoMax);
    for (Eigen::Index i = 0; i < m; ++i) {
      const bool equality = (u[i] - l[i]) < 1e-12;
      rho[i] = equality ? kRhoEqualityScale * rho_bar : rho_bar;
      rho_inv[i] = 1.0 / rho[i];
    }
  };
  refresh_rho(rho_bar);

  Eigen::LDLT<MatX> kkt;
  const auto factorize = [&]() {
    MatX K = P + settings_.sigma * MatX::Identity(n, n);
    if (m > 0) K += A.transpose() * rho.asDiagonal() * A;
    kkt.compute(K);
  };
  factorize();

  const auto unscale_x = [&](const VecX& xs) { return VecX(scaling.d.cwiseProduct(xs)); };
  const auto unscale_y = [&](const VecX& ys) {
    return VecX(scaling.e.cwiseProduct(ys) / scaling.cost);
  };

  QPSolution sol;
  sol.status = QPStatus::max_iterations;
  int iter = 0;
  while (iter < settings_.max_iter) {
    ++iter;
    VecX rhs = settings_.sigma * x - c;
    if (m > 0) rhs += A.transpose() * (rho.cwiseProduct(z) - y);
    const VecX x_tilde = kkt.solve(rhs);
    const VecX x_next = settings_.alpha * x_tilde + (1.0 - settings_.alpha) * x;

    VecX dy;
    if (m > 0) {
      const VecX z_tilde = A * x_tilde;
      const VecX z_relaxed = settings_.alpha * z_tilde + (1.0 - settings_.alpha) * z;
      const VecX v = z_relaxed + rho_inv.cwiseProduct(y);
      const VecX z_next = clamp(v, l, u);
      const VecX y_next = rho.cwiseProduct(v - z_next);  // = y + rho (z_relaxed - z_next)
      dy = y_next - y;
      y = y_next;
      z = z_next;
    }
    x = x_next;

    if (iter % settings_.check_interval == 0 || iter == settings_.max_iter) {
      // Residuals and tolerances are evaluated on the original problem.
      const VecX xu = unscale_x(x);
      const VecX yu = unscale_y(y);
      const VecX zu = m > 0 ? VecX(z.cwiseQuotient(scaling.e)) : VecX(0);
      const VecX Ax = m > 0 ? VecX(problem.A * xu) : VecX(0);
      const VecX Px = P_orig * xu;
      const VecX Aty = m > 0 ? VecX(problem.A.transpose() * yu) : VecX::Zero(n);

      const double r_prim = m > 0 ? inf_norm(Ax - zu) : 0.0;
      const double r_dual = inf_norm(Px + problem.c + Aty);
      const double scale_prim = std::max({inf_norm(Ax), inf_norm(zu), 1e-10});
      const double scale_dual =
          std::max({inf_norm(Px), inf_norm(Aty), inf_norm(problem.c), 1e-10});
      const double eps_prim = settings_.eps_abs + settings_.eps_rel * scale_prim;
      const double eps_dual = settings_.eps_abs + settings_.eps_rel * scale_dual;

      sol.primal_residual = r_prim;
      sol.dual_residual = r_dual;
      if (r_prim <= eps_prim && r_dual <= eps_dual) {
        sol.status = QPStatus::solved;
        break;
      }
      if (m > 0 &&
          is_primal_infeasibility_certificate(problem.A, problem.l, problem.u, unscale_y(dy),
                                              settings_.eps_prim_inf)) {
        sol.status = QPStatus::primal_infeasible;
        break;
      }
      if (settings_.adaptive_rho && m > 0) {
        const double ratio = std::sqrt((r_prim / std::max(scale_prim, 1e-10)) /
                                       std::max(r_dual / std::max(scale_dual, 1e-10), 1e-16));
        if (std::isfinite(ratio) && (ratio > 5.0 || ratio < 0.2)) {
          refresh_rho(rho_bar * ratio);
          factorize();
        }
      }
    }
  }

  x_ = unscale_x(x);
  y_ = unscale_y(y);
  z_ = m > 0 ? VecX(z.cwiseQuotient(scaling.e)) : VecX(0);
  sol.x = x_;
  sol.y = y_;
  sol.iterations = iter;
  sol.objective = 0.5 * x_.dot(P_orig * x_) + problem.c.dot(x_);
  return sol;
}

}  // namespace arm
