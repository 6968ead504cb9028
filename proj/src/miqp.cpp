#include "swarmplan/miqp.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <queue>

#include "swarmplan/qp.hpp"

namespace swarmplan {

using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

constexpr double kEpsB = 1e-9;     // binary regularization in the relaxation
constexpr double kIntTol = 1e-6;   // integrality tolerance

Eigen::Matrix<double, 9, 9> system_matrix(double h, const Vec3& drag) {
  Eigen::Matrix<double, 9, 9> A = Eigen::Matrix<double, 9, 9>::Identity();
  for (int i = 0; i < 3; ++i) {
    A(i, 3 + i) = h;                       // p += h v
    A(3 + i, 3 + i) = 1.0 - h * drag[i];   // v += h (a - D v)
    A(3 + i, 6 + i) = h;
  }
  return A;
}

Eigen::Matrix<double, 9, 3> input_matrix(double h) {
  Eigen::Matrix<double, 9, 3> B = Eigen::Matrix<double, 9, 3>::Zero();
  for (int i = 0; i < 3; ++i) B(6 + i, i) = h;  // a += h u
  return B;
}

Eigen::Matrix<double, 9, 1> state_vec(const AgentState& x) {
  Eigen::Matrix<double, 9, 1> v;
  v << x.p, x.v, x.a;
  return v;
}

// Condensed formulation over z = [u_0..u_{N-1} | b]: states are affine in z.
struct Condensed {
  int n;        // horizon
  int nu;       // 3N
  int nb;       // binaries
  int nz;       // nu + nb
  std::vector<MatrixXd> G;                      // G[k]: 9 x nu, k = 1..N
  std::vector<Eigen::Matrix<double, 9, 1>> F;   // F[k] = A^k x0
  MatrixXd H;     // cost: J(z) = z'Hz + 2 q'z + c  (plus eps_b reg on b)
  VectorXd q;
  double c = 0.0;
  MatrixXd Aeq;   // terminal rest rows
  VectorXd beq;
  MatrixXd Ain;   // everything else, b bounds included
  VectorXd bin;
};

Condensed condense(const MiqpProblem& pr) {
  Condensed c;
  const int n = pr.n;
  c.n = n;
  c.nu = 3 * n;
  c.nb = pr.num_binaries();
  c.nz = c.nu + c.nb;

  const auto A = system_matrix(pr.h, pr.limits.drag);
  const auto B = input_matrix(pr.h);
  const auto x0 = state_vec(pr.x0);

  c.G.assign(n + 1, MatrixXd::Zero(9, c.nu));
  c.F.assign(n + 1, Eigen::Matrix<double, 9, 1>::Zero());
  c.F[0] = x0;
  for (int k = 1; k <= n; ++k) {
    c.G[k] = A * c.G[k - 1];
    c.G[k].middleCols(3 * (k - 1), 3) += B;
    c.F[k] = A * c.F[k - 1];
  }

  // Tracking + input cost.
  c.H = MatrixXd::Zero(c.nz, c.nz);
  c.q = VectorXd::Zero(c.nz);
  for (int k = 1; k <= n; ++k) {
    Eigen::Matrix<double, 9, 1> w = pr.weights.r_x;
    if (k == n) w += pr.weights.r_n;
    const auto xr = state_vec(pr.x_ref[k]);
    const MatrixXd WG = w.asDiagonal() * c.G[k];
    c.H.topLeftCorner(c.nu, c.nu) += c.G[k].transpose() * WG;
    const Eigen::Matrix<double, 9, 1> e = c.F[k] - xr;
    c.q.head(c.nu) += WG.transpose() * e;
    c.c += e.dot(w.asDiagonal() * e);
  }
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < 3; ++i)
      c.H(3 * k + i, 3 * k + i) += pr.weights.r_u[i];
  for (int i = 0; i < c.nb; ++i)
    c.H(c.nu + i, c.nu + i) += kEpsB;
  // Constant cost-as-written term of the fixed k = 0 state.
  const auto e0 = state_vec(pr.x0) - state_vec(pr.x_ref[0]);
  c.c += e0.dot(pr.weights.r_x.asDiagonal() * e0);

  // Terminal rest: v_N = a_N = 0.
  c.Aeq = MatrixXd::Zero(6, c.nz);
  c.beq = VectorXd::Zero(6);
  c.Aeq.topLeftCorner(6, c.nu) = c.G[n].bottomRows(6);
  c.beq = -c.F[n].tail(6);

  // Inequalities.
  std::vector<VectorXd> rows;
  std::vector<double> rhs;
  auto add_row = [&](const VectorXd& r, double b) {
    rows.push_back(r);
    rhs.push_back(b);
  };

  const auto& lim = pr.limits;
  for (int k = 1; k <= n; ++k) {
    // acceleration component bounds of x_k
    for (int i = 0; i < 3; ++i) {
      VectorXd up = VectorXd::Zero(c.nz);
      up.head(c.nu) = c.G[k].row(6 + i);
      VectorXd dn = -up;
      double f = c.F[k][6 + i];
      double hi = i == 2 ? lim.a_z_max : (i == 0 ? lim.a_x_max : lim.a_y_max);
      double lo = i == 2 ? lim.a_z_min : -hi;
      add_row(up, hi - f);
      add_row(dn, -(lo - f));
    }
  }
  for (int k = 0; k < n; ++k) {
    for (int i = 0; i < 3; ++i) {
      VectorXd up = VectorXd::Zero(c.nz);
      up[3 * k + i] = 1.0;
      double j = i == 0 ? lim.j_x_max : (i == 1 ? lim.j_y_max : lim.j_z_max);
      add_row(up, j);
      add_row(-up, j);
    }
  }

  // Corridor big-M rows; the last segment group also covers p_N.
  const int nk = static_cast<int>(pr.tasc.corridors.size());
  const int np = pr.polys_per_corridor();
  for (int k = 0; k < nk; ++k) {
    for (int p = 0; p < np; ++p) {
      const int bidx = c.nu + k * np + p;
      const Polyhedron& poly = pr.tasc.corridors[k][p];
      std::vector<int> steps = {k, k + 1};
      if (k == nk - 1 && k + 2 <= n) steps.push_back(k + 2);
      for (int s : steps) {
        for (const auto& hs : poly.rows) {
          VectorXd r = VectorXd::Zero(c.nz);
          double b = hs.offset + pr.big_m;
          if (s == 0) {
            b -= hs.normal.dot(pr.x0.p);
          } else {
            r.head(c.nu) = hs.normal.transpose() * c.G[s].topRows(3);
            b -= hs.normal.dot(c.F[s].head(3));
          }
          r[bidx] = pr.big_m;
          add_row(r, b);
        }
      }
    }
    // at least one polyhedron per segment
    VectorXd r = VectorXd::Zero(c.nz);
    for (int p = 0; p < np; ++p) r[c.nu + k * np + p] = -1.0;
    add_row(r, -1.0);
  }
  for (int i = 0; i < c.nb; ++i) {
    VectorXd r = VectorXd::Zero(c.nz);
    r[c.nu + i] = 1.0;
    add_row(r, 1.0);
    add_row(-r, 0.0);
  }

  c.Ain = MatrixXd::Zero(static_cast<int>(rows.size()), c.nz);
  c.bin = VectorXd::Zero(static_cast<int>(rows.size()));
  for (size_t i = 0; i < rows.size(); ++i) {
    c.Ain.row(static_cast<int>(i)) = rows[i].transpose();
    c.bin[static_cast<int>(i)] = rhs[i];
  }
  return c;
}

// QP with the node's binary fixes appended as equality rows. The big shared
// matrices (G, g0, Ain, bin) are set up once in `base` and only Aeq/beq
// change per node. fix: -1 free, 0/1 pinned.
QpSolution solve_node(QpProblem& base, const Condensed& c,
                      const std::vector<int>& fix) {
  int nfix = 0;
  for (int f : fix)
    if (f >= 0) ++nfix;
  base.Aeq = MatrixXd::Zero(6 + nfix, c.nz);
  base.beq = VectorXd::Zero(6 + nfix);
  base.Aeq.topRows(6) = c.Aeq;
  base.beq.head(6) = c.beq;
  int r = 6;
  for (size_t i = 0; i < fix.size(); ++i) {
    if (fix[i] < 0) continue;
    base.Aeq(r, c.nu + static_cast<int>(i)) = 1.0;
    base.beq[r] = fix[i];
    ++r;
  }
  return solve_qp(base);
}

QpProblem make_base_qp(const Condensed& c) {
  QpProblem qp;
  qp.G = 2.0 * c.H;
  qp.g0 = 2.0 * c.q;
  qp.Ain = c.Ain;
  qp.bin = c.bin;
  return qp;
}

// True (unregularized) cost of a solved node.
double node_cost(const Condensed& c, const VectorXd& z) {
  VectorXd b = z.tail(c.nb);
  double reg = kEpsB * b.squaredNorm();
  return z.dot(c.H * z) + 2.0 * c.q.dot(z) + c.c - reg;
}

Trajectory extract_trajectory(const MiqpProblem& pr, const VectorXd& z) {
  Trajectory t;
  t.h = pr.h;
  t.states.resize(pr.n + 1);
  t.inputs.resize(pr.n);
  t.states[0] = pr.x0;
  for (int k = 0; k < pr.n; ++k) {
    t.inputs[k] = z.segment(3 * k, 3);
    t.states[k + 1] =
        step_dynamics(t.states[k], t.inputs[k], pr.h, pr.limits.drag);
  }
  // Terminal rest is equality-constrained; pin it exactly.
  t.states[pr.n].v.setZero();
  t.states[pr.n].a.setZero();
  return t;
}

// Cheap emptiness presolve: a polyhedron with two near-opposite rows whose
// offsets contradict has no interior.
bool slab_contradiction(const Polyhedron& poly) {
  for (size_t i = 0; i < poly.rows.size(); ++i)
    for (size_t j = i + 1; j < poly.rows.size(); ++j) {
      const auto& a = poly.rows[i];
      const auto& b = poly.rows[j];
      if ((a.normal + b.normal).norm() < 1e-9 &&
          a.offset + b.offset < -1e-12)
        return true;
    }
  return false;
}

}  // namespace

MiqpProblem build_problem(const AgentState& x0, const ReferenceTrajectory& ref,
                          const Tasc& tasc, const DynamicLimits& limits,
                          const CostWeights& weights, double big_m) {
  limits.validate();
  weights.validate();
  MiqpProblem pr;
  pr.n = ref.horizon();
  if (pr.n < 2) throw ConfigError("horizon must be at least 2");
  if (static_cast<int>(tasc.corridors.size()) != pr.n - 1)
    throw ConfigError("tasc must hold N-1 corridors");
  for (const auto& sc : tasc.corridors)
    if (sc.size() != tasc.corridors.front().size())
      throw ConfigError("corridors must share the polyhedron count");
  if (tasc.corridors.front().empty())
    throw ConfigError("corridors must hold at least one polyhedron");
  pr.x0 = x0;
  pr.x_ref.resize(pr.n + 1);
  for (int k = 0; k <= pr.n; ++k)
    pr.x_ref[k] = {ref.positions[k], ref.velocities[k], Vec3::Zero()};
  pr.tasc = tasc;
  pr.limits = limits;
  pr.weights = weights;
  pr.h = ref.h;
  pr.big_m = big_m;
  return pr;
}

SolveResult solve(const MiqpProblem& problem, double budget_s, int max_nodes) {
  const auto t_start = std::chrono::steady_clock::now();
  auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         t_start)
        .count();
  };

  SolveResult res;

  // Presolve: a segment whose polyhedra are all provably empty is a
  // contradiction.
  for (const auto& sc : problem.tasc.corridors) {
    bool any = false;
    for (const auto& poly : sc)
      if (!slab_contradiction(poly)) {
        any = true;
        break;
      }
    if (!any) {
      res.status = SolveStatus::Infeasible;
      return res;
    }
  }

  const Condensed c = condense(problem);
  const int nb = c.nb;
  QpProblem base = make_base_qp(c);

  struct Node {
    std::vector<int> fix;
    double bound;
  };
  auto cmp = [](const Node& a, const Node& b) { return a.bound > b.bound; };
  std::priority_queue<Node, std::vector<Node>, decltype(cmp)> open(cmp);
  open.push({std::vector<int>(nb, -1), -kInf});

  double incumbent_cost = kInf;
  VectorXd incumbent_z;
  std::vector<int> incumbent_b;
  double incumbent_kkt = 0.0;
  bool exhausted = true;

  while (!open.empty()) {
    if (res.nodes >= max_nodes || elapsed() > budget_s) {
      exhausted = false;
      break;
    }
    Node node = open.top();
    open.pop();
    if (node.bound >= incumbent_cost - 1e-12) continue;
    ++res.nodes;

    QpSolution qs = solve_node(base, c, node.fix);
    if (qs.status == QpStatus::Infeasible) continue;
    if (qs.status != QpStatus::Optimal) {
      ++res.qp_failures;
      continue;
    }
    // Valid lower bound: relaxation optimum minus the largest possible
    // regularization mass.
    double bound = qs.objective + c.c - kEpsB * nb;
    if (bound >= incumbent_cost - 1e-12) continue;

    int branch_idx = -1;
    double branch_frac = 0.5 - kIntTol;  // most fractional = closest to 0.5
    bool integral = true;
    for (int i = 0; i < nb; ++i) {
      double b = qs.x[c.nu + i];
      if (std::abs(b - std::round(b)) > kIntTol) {
        integral = false;
        double d = std::abs(b - 0.5);
        if (d < branch_frac) {
          branch_frac = d;
          branch_idx = i;
        }
      }
    }

    if (integral) {
      double cost = node_cost(c, qs.x);
      if (cost < incumbent_cost - 1e-12) {
        incumbent_cost = cost;
        incumbent_z = qs.x;
        incumbent_kkt = qp_stationarity_residual(base, qs);
        incumbent_b.assign(nb, 0);
        for (int i = 0; i < nb; ++i)
          incumbent_b[i] = static_cast<int>(std::round(qs.x[c.nu + i]));
      }
      continue;
    }

    for (int v = 0; v <= 1; ++v) {
      Node child{node.fix, bound};
      child.fix[branch_idx] = v;
      open.push(std::move(child));
    }
  }

  if (incumbent_cost == kInf) {
    res.status = (exhausted && res.qp_failures == 0) ? SolveStatus::Infeasible
                                                     : SolveStatus::Timeout;
    return res;
  }

  res.status = exhausted ? SolveStatus::Optimal : SolveStatus::Incumbent;
  res.cost = incumbent_cost;
  res.binaries = incumbent_b;
  res.traj = extract_trajectory(problem, incumbent_z.head(c.nu));
  res.kkt_residual = incumbent_kkt;
  res.constraint_violation = qp_constraint_violation(base, incumbent_z);
  auto rows = assemble_rows(problem);
  res.constraint_violation = std::max(
      res.constraint_violation, assembled_violation(problem, rows, res));
  return res;
}

std::optional<std::pair<double, Trajectory>> solve_assignment(
    const MiqpProblem& problem, const std::vector<int>& assignment) {
  const Condensed c = condense(problem);
  if (static_cast<int>(assignment.size()) != c.nb)
    throw ConfigError("assignment size mismatch");
  QpSolution qs = solve_node(c, assignment);
  if (qs.status != QpStatus::Optimal) return std::nullopt;
  return std::make_pair(node_cost(c, qs.x),
                        extract_trajectory(problem, qs.x.head(c.nu)));
}

PlanOutcome plan_iteration(const Trajectory& prev,
                           const ReferenceTrajectory& ref, const Tasc& tasc,
                           const DynamicLimits& limits,
                           const CostWeights& weights, double budget_s,
                           double big_m, int max_nodes) {
  PlanOutcome out;
  AgentState x0 = prev.states.size() > 1 ? prev.states[1] : prev.states[0];
  MiqpProblem pr = build_problem(x0, ref, tasc, limits, weights, big_m);
  pr.h = prev.h;
  SolveResult res = solve(pr, budget_s, max_nodes);
  out.status = res.status;
  out.nodes = res.nodes;
  if (res.ok() && res.constraint_violation < 1e-6) {
    out.traj = res.traj;
    out.traj.h = prev.h;
    out.replanned = true;
    out.cost = res.cost;
  } else {
    out.traj = prev.shifted();
    out.replanned = false;
  }
  return out;
}

std::vector<AssembledRow> assemble_rows(const MiqpProblem& pr) {
  // Full variable order: x_1..x_N (9 each) | u_0..u_{N-1} (3 each) | b.
  const int n = pr.n;
  const int xoff = 0, uoff = 9 * n, boff = 12 * n;
  auto xvar = [&](int k, int c) { return xoff + 9 * (k - 1) + c; };  // k>=1
  auto uvar = [&](int k, int c) { return uoff + 3 * k + c; };
  std::vector<AssembledRow> rows;

  const auto A = system_matrix(pr.h, pr.limits.drag);
  const auto B = input_matrix(pr.h);
  const auto x0 = state_vec(pr.x0);

  // dynamics x_{k+1} = A x_k + B u_k
  for (int k = 0; k < n; ++k) {
    for (int r = 0; r < 9; ++r) {
      AssembledRow row;
      row.rel = '=';
      row.terms.push_back({xvar(k + 1, r), 1.0});
      double rhs = 0.0;
      for (int cc = 0; cc < 9; ++cc) {
        if (A(r, cc) == 0.0) continue;
        if (k == 0)
          rhs += A(r, cc) * x0[cc];
        else
          row.terms.push_back({xvar(k, cc), -A(r, cc)});
      }
      for (int cc = 0; cc < 3; ++cc)
        if (B(r, cc) != 0.0) row.terms.push_back({uvar(k, cc), -B(r, cc)});
      row.rhs = rhs;
      rows.push_back(std::move(row));
    }
  }
  // terminal rest
  for (int r = 3; r < 9; ++r) {
    AssembledRow row;
    row.rel = '=';
    row.terms.push_back({xvar(n, r), 1.0});
    row.rhs = 0.0;
    rows.push_back(std::move(row));
  }
  // acceleration bounds, k = 1..N
  for (int k = 1; k <= n; ++k) {
    const double hi[3] = {pr.limits.a_x_max, pr.limits.a_y_max,
                          pr.limits.a_z_max};
    const double lo[3] = {-pr.limits.a_x_max, -pr.limits.a_y_max,
                          pr.limits.a_z_min};
    for (int i = 0; i < 3; ++i) {
      rows.push_back({{{xvar(k, 6 + i), 1.0}}, hi[i], '<'});
      rows.push_back({{{xvar(k, 6 + i), -1.0}}, -lo[i], '<'});
    }
  }
  // jerk bounds, k = 0..N-1
  for (int k = 0; k < n; ++k) {
    const double j[3] = {pr.limits.j_x_max, pr.limits.j_y_max,
                         pr.limits.j_z_max};
    for (int i = 0; i < 3; ++i) {
      rows.push_back({{{uvar(k, i), 1.0}}, j[i], '<'});
      rows.push_back({{{uvar(k, i), -1.0}}, -j[i], '<'});
    }
  }
  // big-M corridor rows + coverage rows
  const int nk = static_cast<int>(pr.tasc.corridors.size());
  const int np = pr.polys_per_corridor();
  for (int k = 0; k < nk; ++k) {
    for (int p = 0; p < np; ++p) {
      const int bvar = boff + k * np + p;
      std::vector<int> steps = {k, k + 1};
      if (k == nk - 1 && k + 2 <= n) steps.push_back(k + 2);
      for (int s : steps) {
        for (const auto& hs : pr.tasc.corridors[k][p].rows) {
          AssembledRow row;
          row.rel = '<';
          double rhs = hs.offset + pr.big_m;
          if (s == 0) {
            rhs -= hs.normal.dot(pr.x0.p);
          } else {
            for (int i = 0; i < 3; ++i)
              if (hs.normal[i] != 0.0)
                row.terms.push_back({xvar(s, i), hs.normal[i]});
          }
          row.terms.push_back({bvar, pr.big_m});
          row.rhs = rhs;
          rows.push_back(std::move(row));
        }
      }
    }
    AssembledRow cov;
    cov.rel = '<';
    for (int p = 0; p < np; ++p) cov.terms.push_back({boff + k * np + p, -1.0});
    cov.rhs = -1.0;
    rows.push_back(std::move(cov));
  }
  // binary bounds
  for (int i = 0; i < pr.num_binaries(); ++i) {
    rows.push_back({{{boff + i, 1.0}}, 1.0, '<'});
    rows.push_back({{{boff + i, -1.0}}, 0.0, '<'});
  }
  return rows;
}

double assembled_violation(const MiqpProblem& pr,
                           const std::vector<AssembledRow>& rows,
                           const SolveResult& result) {
  const int n = pr.n;
  VectorXd full = VectorXd::Zero(12 * n + pr.num_binaries());
  for (int k = 1; k <= n; ++k) {
    full.segment(9 * (k - 1), 9) = state_vec(result.traj.states[k]);
  }
  for (int k = 0; k < n; ++k)
    full.segment(9 * n + 3 * k, 3) = result.traj.inputs[k];
  for (size_t i = 0; i < result.binaries.size(); ++i)
    full[12 * n + static_cast<int>(i)] = result.binaries[i];

  double viol = 0.0;
  for (const auto& row : rows) {
    double v = 0.0;
    for (const auto& [idx, coef] : row.terms) v += coef * full[idx];
    if (row.rel == '=')
      viol = std::max(viol, std::abs(v - row.rhs));
    else
      viol = std::max(viol, v - row.rhs);
  }
  return viol;
}

std::string dump_problem(const MiqpProblem& pr, const SolveResult* result) {
  std::string out;
  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "miqp n=%d vars=%d binaries=%d h=%.9g big_m=%.9g\n", pr.n,
                pr.num_continuous(), pr.num_binaries(), pr.h, pr.big_m);
  out += buf;
  out += "cost diag r_x";
  for (int i = 0; i < 9; ++i) {
    std::snprintf(buf, sizeof(buf), " %.9g", pr.weights.r_x[i]);
    out += buf;
  }
  out += "\ncost diag r_n";
  for (int i = 0; i < 9; ++i) {
    std::snprintf(buf, sizeof(buf), " %.9g", pr.weights.r_n[i]);
    out += buf;
  }
  out += "\ncost diag r_u";
  for (int i = 0; i < 3; ++i) {
    std::snprintf(buf, sizeof(buf), " %.9g", pr.weights.r_u[i]);
    out += buf;
  }
  out += "\n";
  for (int k = 0; k <= pr.n; ++k) {
    const auto x = state_vec(pr.x_ref[k]);
    std::snprintf(buf, sizeof(buf), "ref %d", k);
    out += buf;
    for (int i = 0; i < 9; ++i) {
      std::snprintf(buf, sizeof(buf), " %.9g", x[i]);
      out += buf;
    }
    out += "\n";
  }
  auto rows = assemble_rows(pr);
  std::snprintf(buf, sizeof(buf), "rows %zu\n", rows.size());
  out += buf;
  for (const auto& row : rows) {
    out += "row";
    for (const auto& [idx, coef] : row.terms) {
      std::snprintf(buf, sizeof(buf), " %d:%.9g", idx, coef);
      out += buf;
    }
    std::snprintf(buf, sizeof(buf), " %c %.9g\n", row.rel == '=' ? '=' : '<',
                  row.rhs);
    out += buf;
  }
  if (result && result->ok()) {
    out += "solution";
    for (size_t k = 1; k < result->traj.states.size(); ++k) {
      const auto x = state_vec(result->traj.states[k]);
      for (int i = 0; i < 9; ++i) {
        std::snprintf(buf, sizeof(buf), " %.12g", x[i]);
        out += buf;
      }
    }
    for (const auto& u : result->traj.inputs)
      for (int i = 0; i < 3; ++i) {
        std::snprintf(buf, sizeof(buf), " %.12g", u[i]);
        out += buf;
      }
    for (int b : result->binaries) {
      std::snprintf(buf, sizeof(buf), " %d", b);
      out += buf;
    }
    out += "\n";
    std::snprintf(buf, sizeof(buf), "cost %.12g\n", result->cost);
    out += buf;
  }
  return out;
}

}  // namespace swarmplan
