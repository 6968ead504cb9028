#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "swarmplan/corridor.hpp"
#include "swarmplan/reference.hpp"
#include "swarmplan/trajectory.hpp"

namespace swarmplan {

/// Structural description of one planning MIQP over the horizon N:
/// variables x_1..x_N (9 each), u_0..u_{N-1} (3 each) and one binary per
/// (segment k, polyhedron p) pair; constraints and cost per the MPC
/// formulation. The terminal position p_N is covered by the last segment
/// group so the whole trajectory stays inside the TASC.
struct MiqpProblem {
  int n = 0;  // horizon N
  AgentState x0;
  std::vector<AgentState> x_ref;  // size N+1, [p_ref v_ref 0]
  Tasc tasc;
  DynamicLimits limits;
  CostWeights weights;
  double h = 0.1;
  double big_m = 200.0;

  int polys_per_corridor() const {
    return tasc.corridors.empty()
               ? 0
               : static_cast<int>(tasc.corridors.front().size());
  }
  int num_binaries() const {
    return static_cast<int>(tasc.corridors.size()) * polys_per_corridor();
  }
  int num_continuous() const { return 12 * n; }
};

MiqpProblem build_problem(const AgentState& x0, const ReferenceTrajectory& ref,
                          const Tasc& tasc, const DynamicLimits& limits,
                          const CostWeights& weights, double big_m = 200.0);

enum class SolveStatus { Optimal, Incumbent, Infeasible, Timeout };

struct SolveResult {
  SolveStatus status = SolveStatus::Timeout;
  Trajectory traj;
  std::vector<int> binaries;  // chosen polyhedron per (k,p), row-major in k
  double cost = 0.0;
  int nodes = 0;
  int qp_failures = 0;
  double kkt_residual = 0.0;
  double constraint_violation = 0.0;

  bool ok() const {
    return status == SolveStatus::Optimal || status == SolveStatus::Incumbent;
  }
};

/// Best-first branch-and-bound over the binaries; each node solves the dense
/// QP relaxation (binaries in [0,1]) after condensing the states onto the
/// inputs. budget_s is wall-clock; max_nodes bounds the tree
/// deterministically.
SolveResult solve(const MiqpProblem& problem, double budget_s = kInf,
                  int max_nodes = 4000);

/// QP for one fixed binary assignment (the exhaustive-enumeration path).
/// Returns nullopt when infeasible.
std::optional<std::pair<double, Trajectory>> solve_assignment(
    const MiqpProblem& problem, const std::vector<int>& assignment);

struct PlanOutcome {
  Trajectory traj;
  bool replanned = false;
  SolveStatus status = SolveStatus::Timeout;
  double cost = 0.0;
  int nodes = 0;
};

/// One planning iteration: X_0 = prev.states[1]; on failure the shifted
/// previous trajectory is returned instead.
PlanOutcome plan_iteration(const Trajectory& prev,
                           const ReferenceTrajectory& ref, const Tasc& tasc,
                           const DynamicLimits& limits,
                           const CostWeights& weights, double budget_s = kInf,
                           double big_m = 200.0, int max_nodes = 4000);

/// Generic row view over the full variable vector
/// [x_1..x_N | u_0..u_{N-1} | b], used by audits and the text dump.
struct AssembledRow {
  std::vector<std::pair<int, double>> terms;
  double rhs = 0.0;
  char rel = '<';  // '<' for <=, '=' for equality
};

std::vector<AssembledRow> assemble_rows(const MiqpProblem& problem);

/// Max row violation of the assembled constraints at a solved trajectory.
double assembled_violation(const MiqpProblem& problem,
                           const std::vector<AssembledRow>& rows,
                           const SolveResult& result);

/// Plain-text interchange dump: sizes, cost terms, rows, binaries and (when
/// given) the solution vector.
std::string dump_problem(const MiqpProblem& problem,
                         const SolveResult* result = nullptr);

}  // namespace swarmplan
