#pragma once

#include <optional>
#include <vector>

#include "swarmplan/voxel_grid.hpp"

namespace swarmplan {

/// Ordered waypoint polyline with per-waypoint potential value o_i and
/// cumulative arc length d_i. cum_dist[0] == 0 and is strictly increasing
/// (consecutive duplicate points are never stored).
struct GlobalPath {
  std::vector<Vec3> waypoints;
  std::vector<double> values;
  std::vector<double> cum_dist;
  double cost = 0.0;  // search cost of the producing planner

  bool empty() const { return waypoints.empty(); }
  size_t size() const { return waypoints.size(); }
  double length() const { return cum_dist.empty() ? 0.0 : cum_dist.back(); }
};

/// Voxel mask restricting the DMP search to the JPS path neighborhood.
struct SearchCorridor {
  std::vector<std::uint8_t> mask;
  int count = 0;

  bool contains(int idx) const {
    return idx >= 0 && idx < static_cast<int>(mask.size()) && mask[idx] != 0;
  }
};

/// Move legality on the 26-connected lattice. Diagonal moves are admissible
/// only if the target is Free and at least one axis-by-axis decomposition of
/// the move passes exclusively through Free voxels.
bool is_move_traversable(const VoxelGrid& grid, const Vec3i& from,
                         const Vec3i& delta);

/// Goal itself when inside the grid, otherwise the point where the segment
/// p_curr -> p_goal crosses the grid border, pulled into the border voxel
/// layer. Border voxels are expected to be forced Free before searching.
Vec3 intermediate_goal(const VoxelGrid& grid, const Vec3& p_curr,
                       const Vec3& p_goal);

/// Sets every border voxel of the grid to Free (in place).
void force_border_free(VoxelGrid& grid);

/// Center of the Free voxel nearest to p (while p's own voxel is not Free);
/// nullopt when the grid has no Free voxel at all.
std::optional<Vec3> clamp_to_free(const VoxelGrid& grid, const Vec3& p);

/// Grid-optimal path from start to goal under the restricted-diagonal rule.
/// A* with jump-style dominance pruning of successors; cost-equivalent to a
/// plain A* on the same move set. Waypoints are voxel centers. Values are
/// potentials when the grid carries them, else 0.
std::optional<GlobalPath> jps(const VoxelGrid& grid, const Vec3& start,
                              const Vec3& goal);

/// Plain A* without pruning; used as the independent optimality oracle and as
/// the generic engine behind dmp().
std::optional<GlobalPath> astar(const VoxelGrid& grid, const Vec3& start,
                                const Vec3& goal, double w_pot = 0.0,
                                const SearchCorridor* corridor = nullptr);

/// Union of voxels whose centers lie within d_search of any path-waypoint
/// voxel center.
SearchCorridor build_corridor(const GlobalPath& path, double d_search,
                              const VoxelGrid& grid);

/// Potential-weighted A* restricted to the corridor: edge cost is the edge
/// length plus w_pot * potential(target) voxel-lengths.
std::optional<GlobalPath> dmp(const VoxelGrid& grid_with_potential,
                              const SearchCorridor& corridor, const Vec3& start,
                              const Vec3& goal, double w_pot = 1.0);

/// True iff the voxel traversal a->b meets no Occupied voxel and no voxel
/// with potential > 0. Exact corner crossings block only if every tie
/// ordering is blocked.
bool is_line_clear(const VoxelGrid& grid, const Vec3& a, const Vec3& b);

/// Path shortening: from each free zero-potential waypoint, removes interior
/// waypoints as long as the cut segment stays free and line-clear.
GlobalPath shorten_path(const GlobalPath& path, const VoxelGrid& grid);

/// Builds a GlobalPath from raw points: drops consecutive duplicates, fills
/// values from the grid's potential field (0 outside) and cum_dist.
GlobalPath annotate_path(const std::vector<Vec3>& points,
                         const VoxelGrid& grid);

}  // namespace swarmplan
