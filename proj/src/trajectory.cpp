#include "swarmplan/trajectory.hpp"

#include <algorithm>

#include "swarmplan/voxel_grid.hpp"

namespace swarmplan {

Trajectory Trajectory::rest_at(const Vec3& p, int n, double h, long stamp) {
  Trajectory t;
  t.h = h;
  t.stamp = stamp;
  t.states.assign(n + 1, AgentState{p, Vec3::Zero(), Vec3::Zero()});
  t.inputs.assign(n, Vec3::Zero());
  return t;
}

Trajectory Trajectory::shifted() const {
  Trajectory t;
  t.h = h;
  t.stamp = stamp;
  t.states.assign(states.begin() + 1, states.end());
  AgentState tail = states.back();
  tail.v.setZero();
  tail.a.setZero();
  t.states.push_back(tail);
  t.inputs.assign(inputs.begin() + 1, inputs.end());
  t.inputs.push_back(Vec3::Zero());
  return t;
}

void DynamicLimits::validate() const {
  if (!(a_z_min < 0.0 && 0.0 < a_z_max))
    throw ConfigError("acceleration z bounds must straddle zero");
  if (a_x_max <= 0 || a_y_max <= 0 || j_x_max <= 0 || j_y_max <= 0 ||
      j_z_max <= 0)
    throw ConfigError("dynamic limits must be positive");
  if (drag.minCoeff() < 0) throw ConfigError("drag must be non-negative");
}

void CostWeights::validate() const {
  if (r_x.minCoeff() < 0 || r_n.minCoeff() < 0)
    throw ConfigError("state weights must be non-negative");
  if (r_u.minCoeff() <= 0)
    throw ConfigError("input weight must be strictly positive");
}

AgentState step_dynamics(const AgentState& x, const Vec3& u, double h,
                         const Vec3& drag) {
  AgentState n;
  n.p = x.p + h * x.v;
  n.v = x.v + h * (x.a - drag.cwiseProduct(x.v));
  n.a = x.a + h * u;
  return n;
}

double dynamics_residual(const Trajectory& traj, const Vec3& drag) {
  double r = 0.0;
  for (size_t k = 0; k + 1 < traj.states.size(); ++k) {
    AgentState pred = step_dynamics(traj.states[k], traj.inputs[k], traj.h, drag);
    const AgentState& got = traj.states[k + 1];
    r = std::max({r, (pred.p - got.p).cwiseAbs().maxCoeff(),
                  (pred.v - got.v).cwiseAbs().maxCoeff(),
                  (pred.a - got.a).cwiseAbs().maxCoeff()});
  }
  return r;
}

}  // namespace swarmplan
