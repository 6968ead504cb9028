#pragma once

#include <functional>
#include <vector>

#include "swarmplan/voxel_grid.hpp"

namespace swarmplan {

/// Exact voxel traversal of the segment a->b (both inside the grid).
/// Visits the voxel containing a first. When the segment crosses several grid
/// planes at the same parameter (corner/edge pass), the step axes are applied
/// one at a time in x->y->z order, so the traversal is deterministic and never
/// tunnels through a corner. Visitor returns false to stop the walk.
void walk_voxels(const VoxelGrid& grid, const Vec3& a, const Vec3& b,
                 const std::function<bool(const Vec3i&)>& visit);

/// One traversal step: the voxel the segment lands in after a crossing, plus
/// the tie-order alternatives when the crossing went through a corner/edge.
/// tie_paths is empty for plain face crossings; otherwise each entry lists the
/// intermediate voxels of one axis ordering (the landing voxel excluded).
struct StepGroup {
  Vec3i landing;
  std::vector<std::vector<Vec3i>> tie_paths;
};

/// Expanded traversal reporting corner alternatives instead of picking one.
/// Used for lenient line-of-sight tests: a corner pass blocks the segment only
/// if every tie ordering runs through a blocked intermediate voxel.
std::vector<StepGroup> walk_voxels_grouped(const VoxelGrid& grid, const Vec3& a,
                                           const Vec3& b);

}  // namespace swarmplan
