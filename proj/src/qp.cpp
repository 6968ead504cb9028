#include "swarmplan/qp.hpp"

#include <cmath>
#include <limits>
#include <vector>

namespace swarmplan {

using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

constexpr double kEps = 1e-11;
constexpr double kInfty = std::numeric_limits<double>::infinity();

// Active-set bookkeeping: the columns of J span G^{-1} split against the
// active normals, R is the triangular factor of the active-normal subspace.
struct Workspace {
  MatrixXd J;
  MatrixXd R;
  std::vector<int> active;  // equality e stored as -e-1, inequality i as i
  VectorXd u;               // multipliers of active constraints (>= form)
  double r_norm = 1.0;

  int q() const { return static_cast<int>(active.size()); }
};

// Rotates the tail of d into d[q] and keeps J consistent.
void reduce(Workspace& w, VectorXd& d, int n) {
  int q = w.q();
  for (int j = n - 1; j > q; --j) {
    double a = d[j - 1], b = d[j];
    double h = std::hypot(a, b);
    if (h == 0.0) continue;
    double c = a / h, s = b / h;
    d[j - 1] = h;
    d[j] = 0.0;
    for (int i = 0; i < n; ++i) {
      double t1 = w.J(i, j - 1), t2 = w.J(i, j);
      w.J(i, j - 1) = c * t1 + s * t2;
      w.J(i, j) = -s * t1 + c * t2;
    }
  }
}

bool add_constraint(Workspace& w, VectorXd& d, int n) {
  reduce(w, d, n);
  int q = w.q();
  if (std::abs(d[q]) <= kEps * w.r_norm) return false;  // dependent normal
  w.R.conservativeResize(q + 1, q + 1);
  for (int i = 0; i <= q; ++i) w.R(i, q) = d[i];
  for (int i = 0; i < q; ++i) w.R(q, i) = 0.0;
  w.r_norm = std::max(w.r_norm, std::abs(d[q]));
  return true;
}

void delete_constraint(Workspace& w, int pos, int n) {
  int q = w.q();
  w.active.erase(w.active.begin() + pos);
  for (int i = pos; i + 1 < q; ++i) w.u[i] = w.u[i + 1];
  w.u.conservativeResize(q - 1);

  // Drop the column and chase the resulting subdiagonal with Givens
  // rotations, mirroring them onto J.
  MatrixXd cols(q, q - 1);
  int c = 0;
  for (int j = 0; j < q; ++j) {
    if (j == pos) continue;
    cols.col(c++) = w.R.col(j).head(q);
  }
  for (int j = pos; j < q - 1; ++j) {
    double a = cols(j, j), b = cols(j + 1, j);
    double h = std::hypot(a, b);
    if (h == 0.0) continue;
    double cg = a / h, sg = b / h;
    for (int k = j; k < q - 1; ++k) {
      double t1 = cols(j, k), t2 = cols(j + 1, k);
      cols(j, k) = cg * t1 + sg * t2;
      cols(j + 1, k) = -sg * t1 + cg * t2;
    }
    for (int i = 0; i < n; ++i) {
      double t1 = w.J(i, j), t2 = w.J(i, j + 1);
      w.J(i, j) = cg * t1 + sg * t2;
      w.J(i, j + 1) = -sg * t1 + cg * t2;
    }
  }
  w.R = cols.topRows(q - 1).eval();
}

}  // namespace

QpSolution solve_qp(const QpProblem& qp) {
  const int n = static_cast<int>(qp.G.rows());
  const int p = static_cast<int>(qp.Aeq.rows());
  const int m = static_cast<int>(qp.Ain.rows());

  QpSolution sol;
  sol.mult_eq = VectorXd::Zero(p);
  sol.mult_in = VectorXd::Zero(m);

  Eigen::LLT<MatrixXd> llt(qp.G);
  if (llt.info() != Eigen::Success) return sol;  // not PD

  Workspace w;
  w.J = llt.matrixU().solve(MatrixXd::Identity(n, n));  // L^{-T}
  w.u = VectorXd(0);

  VectorXd x = -llt.solve(qp.g0);

  const int max_iter = 100 + 10 * (n + p + m);
  int iter = 0;

  // Directions for a candidate normal np (>= orientation): z is the primal
  // step, r the dual step over the active set.
  auto solve_directions = [&](const VectorXd& np, VectorXd& z, VectorXd& r,
                              VectorXd& d) {
    d = w.J.transpose() * np;
    int q = w.q();
    z = w.J.rightCols(n - q) * d.tail(n - q);
    if (q > 0)
      r = w.R.topLeftCorner(q, q)
              .triangularView<Eigen::Upper>()
              .solve(d.head(q));
    else
      r = VectorXd(0);
  };

  // Phase 1: equalities, added unconditionally (normal = Aeq row).
  for (int e = 0; e < p; ++e) {
    if (++iter > max_iter) return sol;
    VectorXd np = qp.Aeq.row(e).transpose();
    VectorXd z, r, d;
    solve_directions(np, z, r, d);
    double s = np.dot(x) - qp.beq[e];
    double z2 = z.dot(np);
    double scale = std::max(1.0, np.squaredNorm());
    if (std::abs(z2) <= kEps * scale) {
      if (std::abs(s) > 1e-8 * std::sqrt(scale)) {
        sol.status = QpStatus::Infeasible;  // inconsistent equality
        return sol;
      }
      continue;  // dependent but consistent
    }
    double t2 = -s / z2;
    x += t2 * z;
    if (w.q() > 0) w.u.head(w.q()) -= t2 * r;
    w.u.conservativeResize(w.q() + 1);
    w.u[w.q()] = t2;
    if (!add_constraint(w, d, n)) return sol;
    w.active.push_back(-e - 1);
  }

  std::vector<std::uint8_t> in_active(m, 0);

  // Phase 2: dual active-set over the inequalities.
  while (true) {
    if (++iter > max_iter) return sol;

    // Most violated inequality (<= orientation: positive slack is violation).
    VectorXd viol = qp.Ain * x - qp.bin;
    int worst = -1;
    double worst_v = 1e-10;
    for (int i = 0; i < m; ++i) {
      if (in_active[i]) continue;
      double v = viol[i] / (1.0 + std::abs(qp.bin[i]));
      if (v > worst_v) {
        worst_v = v;
        worst = i;
      }
    }
    if (worst < 0) break;  // primal feasible -> optimal

    VectorXd np = -qp.Ain.row(worst).transpose();  // >= orientation
    const double b = -qp.bin[worst];
    double u_plus = 0.0;

    while (true) {
      if (++iter > max_iter) return sol;
      VectorXd z, r, d;
      solve_directions(np, z, r, d);
      double z2 = z.dot(np);

      double t1 = kInfty;
      int blocking = -1;
      for (int k = 0; k < w.q(); ++k) {
        if (w.active[k] < 0) continue;  // equalities never leave
        if (r[k] > kEps && w.u[k] / r[k] < t1) {
          t1 = w.u[k] / r[k];
          blocking = k;
        }
      }
      double s = np.dot(x) - b;
      double t2 = (z2 > kEps * std::max(1.0, np.squaredNorm())) ? -s / z2
                                                                : kInfty;
      double t = std::min(t1, t2);

      if (t >= kInfty) {
        sol.status = QpStatus::Infeasible;
        sol.iterations = iter;
        return sol;
      }

      if (t2 >= kInfty) {
        // Dual-only step: the blocking constraint leaves the active set.
        w.u.head(w.q()) -= t * r;
        u_plus += t;
        int leaving = w.active[blocking];
        delete_constraint(w, blocking, n);
        if (leaving >= 0) in_active[leaving] = 0;
        continue;
      }

      x += t * z;
      if (w.q() > 0) w.u.head(w.q()) -= t * r;
      u_plus += t;

      if (t == t2) {
        w.u.conservativeResize(w.q() + 1);
        w.u[w.q()] = u_plus;
        if (!add_constraint(w, d, n)) return sol;  // numerically degenerate
        w.active.push_back(worst);
        in_active[worst] = 1;
        break;
      }
      int leaving = w.active[blocking];
      delete_constraint(w, blocking, n);
      if (leaving >= 0) in_active[leaving] = 0;
    }
  }

  sol.status = QpStatus::Optimal;
  sol.x = x;
  sol.objective = 0.5 * x.dot(qp.G * x) + qp.g0.dot(x);
  sol.iterations = iter;
  // Sign convention of the checks: G x + g0 + Aeq' mult_eq + Ain' mult_in = 0.
  for (int k = 0; k < w.q(); ++k) {
    int id = w.active[k];
    if (id < 0)
      sol.mult_eq[-id - 1] = -w.u[k];
    else
      sol.mult_in[id] = w.u[k];
  }
  return sol;
}

double qp_constraint_violation(const QpProblem& qp, const VectorXd& x) {
  double v = 0.0;
  if (qp.Aeq.rows() > 0) v = (qp.Aeq * x - qp.beq).cwiseAbs().maxCoeff();
  if (qp.Ain.rows() > 0)
    v = std::max(v, (qp.Ain * x - qp.bin).maxCoeff());
  return std::max(v, 0.0);
}

double qp_stationarity_residual(const QpProblem& qp, const QpSolution& sol) {
  VectorXd g = qp.G * sol.x + qp.g0;
  if (qp.Aeq.rows() > 0) g += qp.Aeq.transpose() * sol.mult_eq;
  if (qp.Ain.rows() > 0) g += qp.Ain.transpose() * sol.mult_in;
  return g.cwiseAbs().maxCoeff();
}

}  // namespace swarmplan
