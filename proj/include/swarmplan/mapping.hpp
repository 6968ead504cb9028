#pragma once

#include "swarmplan/voxel_grid.hpp"

namespace swarmplan {

/// Measurement grid: all Unknown except voxels holding at least one cloud
/// point, which become Occupied. Points outside the grid extent are ignored.
/// The grid is centered on agent_pos (dims odd per axis).
VoxelGrid build_measurement_grid(const PointCloud& cloud, const Vec3& agent_pos,
                                 const Vec3i& dims, double voxel_size);

/// Frees Unknown voxels along every center-voxel-to-border-voxel ray until the
/// first Occupied voxel on that ray; everything behind it is left untouched.
VoxelGrid raycast_free(const VoxelGrid& grid);

/// Unknown voxels of meas take the state of the world-aligned voxel of last
/// (Unknown when outside last's extent); Free/Occupied measurements win.
VoxelGrid merge(const VoxelGrid& meas, const VoxelGrid& last);

/// Rewrites Unknown cells to Free / Occupied respectively.
VoxelGrid view_free_unknown(const VoxelGrid& grid);
VoxelGrid view_occupy_unknown(const VoxelGrid& grid);

/// Every Free voxel whose center lies within r_agent of an Occupied voxel
/// center becomes Occupied. Unknown voxels are left as they are.
VoxelGrid inflate_obstacles(const VoxelGrid& grid, double r_agent);

/// Potential field: 100 on Occupied voxels, 100*(1 - d/d_pot_max)^4 within
/// d_pot_max of the nearest occupied voxel center, 0 beyond. Only Occupied
/// voxels act as obstacles; apply view_occupy_unknown first when unknown space
/// should repel.
VoxelGrid compute_potential(const VoxelGrid& grid, double d_pot_max);

}  // namespace swarmplan
