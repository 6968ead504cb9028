#pragma once

#include <vector>

#include "swarmplan/geometry.hpp"

namespace swarmplan {

struct AgentState {
  Vec3 p{0, 0, 0};
  Vec3 v{0, 0, 0};
  Vec3 a{0, 0, 0};
};

/// N+1 states on a fixed step h plus the N jerk inputs that generated them.
/// This is the unit agents exchange; stamp is the planning iteration index.
struct Trajectory {
  std::vector<AgentState> states;
  std::vector<Vec3> inputs;
  double h = 0.1;
  long stamp = -1;

  int horizon() const { return static_cast<int>(inputs.size()); }

  /// Trajectory holding position p at rest over the whole horizon.
  static Trajectory rest_at(const Vec3& p, int n, double h, long stamp = -1);

  /// One-step shift: states[1..] plus a repeated terminal rest state; the
  /// standing fallback when planning is skipped or fails.
  Trajectory shifted() const;
};

struct DynamicLimits {
  double a_x_max = 20.0, a_y_max = 20.0;
  double a_z_min = -20.0, a_z_max = 20.0;
  double j_x_max = 30.0, j_y_max = 30.0, j_z_max = 30.0;
  Vec3 drag{0, 0, 0};  // diagonal of D_lin,max, 1/s

  void validate() const;
};

/// Diagonal weights of the tracking cost: state error (9), terminal state
/// error (9), input (3).
struct CostWeights {
  Eigen::Matrix<double, 9, 1> r_x;
  Eigen::Matrix<double, 9, 1> r_n;
  Vec3 r_u{0.01, 0.01, 0.01};

  CostWeights() {
    r_x << 10, 10, 10, 1, 1, 1, 0.01, 0.01, 0.01;
    r_n = 10.0 * r_x;
  }

  void validate() const;
};

/// Euler step of the jerk-driven triple integrator with linear drag:
/// p' = p + h v;  v' = v + h (a - D v);  a' = a + h u.
AgentState step_dynamics(const AgentState& x, const Vec3& u, double h,
                         const Vec3& drag);

/// Max residual of the discrete dynamics over all steps (plus h/stamp checks
/// are left to the caller).
double dynamics_residual(const Trajectory& traj, const Vec3& drag);

}  // namespace swarmplan
