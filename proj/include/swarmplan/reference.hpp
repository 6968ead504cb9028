#pragma once

#include <optional>

#include "swarmplan/global_path.hpp"
#include "swarmplan/trajectory.hpp"

namespace swarmplan {

/// N+1 reference states sampled along the global path at arc spacing
/// v_samp * h; past the final waypoint samples clamp to it.
struct ReferenceTrajectory {
  std::vector<Vec3> positions;   // N+1
  std::vector<Vec3> velocities;  // N+1
  double v_samp = 0.0;
  double h = 0.1;
  bool projected = false;  // p0_ref was off the path and got projected

  Vec3 start_point() const { return positions.front(); }
  int horizon() const { return static_cast<int>(positions.size()) - 1; }
};

/// Speed adaptation over the annotated path: v_samp = min over waypoints of
/// v_min + alpha_i (v_max - v_min), alpha_i = 1 - e^(-s_d d_i)(1 - e^(-s_o o_i)).
double adapt_speed(const GlobalPath& path, double s_d, double s_o, double v_min,
                   double v_max);

/// Arc-length sampling from p0_ref (expected on the path; otherwise projected
/// with the `projected` flag set). Velocities have norm v_samp along the local
/// direction, zero where the clamped tail leaves it undefined, and
/// v_N = v_{N-1}.
ReferenceTrajectory sample_reference(const GlobalPath& path, const Vec3& p0_ref,
                                     double v_samp, int n, double h);

/// Arc distance from the reference start to the 1 cm resample nearest to
/// agent_pos (ties toward the smaller distance).
double path_progress(const ReferenceTrajectory& prev_ref, const Vec3& agent_pos);

/// Start point for the next sampling: unchanged at zero progress, otherwise
/// the previous second reference point.
Vec3 advance_start(const ReferenceTrajectory& prev_ref, double progress);

/// Start point handed to the path planner: reference position i_path_start.
Vec3 path_plan_start(const ReferenceTrajectory& prev_ref, int i_path_start);

/// Reference dump as CSV `k,x,y,z,vx,vy,vz`.
std::string dump_reference_csv(const ReferenceTrajectory& ref);

}  // namespace swarmplan
