#pragma once

#include <Eigen/Dense>

namespace swarmplan {

/// Strictly convex dense QP:
///   minimize 0.5 x'Gx + g0'x
///   subject to Aeq x = beq,  Ain x <= bin.
/// G must be symmetric positive definite.
struct QpProblem {
  Eigen::MatrixXd G;
  Eigen::VectorXd g0;
  Eigen::MatrixXd Aeq;
  Eigen::VectorXd beq;
  Eigen::MatrixXd Ain;
  Eigen::VectorXd bin;
};

enum class QpStatus { Optimal, Infeasible, NumericalFailure };

struct QpSolution {
  QpStatus status = QpStatus::NumericalFailure;
  Eigen::VectorXd x;
  double objective = 0.0;
  Eigen::VectorXd mult_eq;  // signed multipliers of the equality rows
  Eigen::VectorXd mult_in;  // >= 0, nonzero only on active inequality rows
  int iterations = 0;

  bool ok() const { return status == QpStatus::Optimal; }
};

/// Goldfarb-Idnani dual active-set method. Starts from the unconstrained
/// minimizer and adds violated constraints one at a time; no feasible start
/// point is needed and primal infeasibility is detected exactly.
QpSolution solve_qp(const QpProblem& qp);

/// Max violation over all constraints (equalities by |residual|).
double qp_constraint_violation(const QpProblem& qp, const Eigen::VectorXd& x);

/// KKT stationarity residual ||Gx + g0 + Aeq'mu + Ain'lambda||_inf.
double qp_stationarity_residual(const QpProblem& qp, const QpSolution& sol);

}  // namespace swarmplan
