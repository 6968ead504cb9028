#include "swarmplan/mapping.hpp"

#include <algorithm>
#include <cmath>

#include "swarmplan/raycast.hpp"

namespace swarmplan {

VoxelGrid build_measurement_grid(const PointCloud& cloud, const Vec3& agent_pos,
                                 const Vec3i& dims, double voxel_size) {
  VoxelGrid grid =
      VoxelGrid::centered_on(agent_pos, dims, voxel_size, VoxelState::Unknown);
  for (const Vec3& p : cloud.points) {
    Vec3i v = grid.world_to_voxel(p);
    if (grid.in_bounds(v)) grid.at(v) = VoxelState::Occupied;
  }
  return grid;
}

VoxelGrid raycast_free(const VoxelGrid& grid) {
  VoxelGrid out = grid;
  const Vec3i c = grid.center_voxel();
  const Vec3 from = grid.voxel_center(c);
  const Vec3i d = grid.dims();
  auto cast = [&](const Vec3i& target) {
    walk_voxels(grid, from, grid.voxel_center(target), [&](const Vec3i& v) {
      if (grid.at(v) == VoxelState::Occupied) return false;
      out.at(v) = VoxelState::Free;
      return true;
    });
  };
  for (int z = 0; z < d.z(); ++z)
    for (int y = 0; y < d.y(); ++y)
      for (int x = 0; x < d.x(); ++x)
        if (x == 0 || y == 0 || z == 0 || x == d.x() - 1 || y == d.y() - 1 ||
            z == d.z() - 1)
          cast({x, y, z});
  return out;
}

VoxelGrid merge(const VoxelGrid& meas, const VoxelGrid& last) {
  if (std::abs(meas.voxel_size() - last.voxel_size()) > 1e-12)
    throw ConfigError("merge: voxel_size mismatch");
  VoxelGrid out = meas;
  // Lattice-aligned origins make the overlap a pure integer index shift.
  Vec3 shift_f = (meas.origin() - last.origin()) / meas.voxel_size();
  Vec3i shift(static_cast<int>(std::lround(shift_f.x())),
              static_cast<int>(std::lround(shift_f.y())),
              static_cast<int>(std::lround(shift_f.z())));
  const Vec3i d = meas.dims();
  for (int z = 0; z < d.z(); ++z)
    for (int y = 0; y < d.y(); ++y)
      for (int x = 0; x < d.x(); ++x) {
        Vec3i v(x, y, z);
        if (out.at(v) != VoxelState::Unknown) continue;
        Vec3i w = v + shift;
        if (last.in_bounds(w)) out.at(v) = last.at(w);
      }
  return out;
}

VoxelGrid view_free_unknown(const VoxelGrid& grid) {
  VoxelGrid out = grid;
  for (auto& c : out.cells())
    if (c == VoxelState::Unknown) c = VoxelState::Free;
  return out;
}

VoxelGrid view_occupy_unknown(const VoxelGrid& grid) {
  VoxelGrid out = grid;
  for (auto& c : out.cells())
    if (c == VoxelState::Unknown) c = VoxelState::Occupied;
  return out;
}

namespace {

// Neighborhood offsets with center-to-center distance <= radius, (0,0,0)
// excluded, plus the distance in meters.
std::vector<std::pair<Vec3i, double>> ball_offsets(double radius, double vox) {
  std::vector<std::pair<Vec3i, double>> offs;
  int r = static_cast<int>(std::floor(radius / vox + 1e-9));
  for (int dz = -r; dz <= r; ++dz)
    for (int dy = -r; dy <= r; ++dy)
      for (int dx = -r; dx <= r; ++dx) {
        if (dx == 0 && dy == 0 && dz == 0) continue;
        double dist = vox * std::sqrt(double(dx * dx + dy * dy + dz * dz));
        if (dist <= radius + 1e-12) offs.push_back({{dx, dy, dz}, dist});
      }
  return offs;
}

}  // namespace

VoxelGrid inflate_obstacles(const VoxelGrid& grid, double r_agent) {
  VoxelGrid out = grid;
  auto offs = ball_offsets(r_agent, grid.voxel_size());
  if (offs.empty()) return out;
  const Vec3i d = grid.dims();
  for (int z = 0; z < d.z(); ++z)
    for (int y = 0; y < d.y(); ++y)
      for (int x = 0; x < d.x(); ++x) {
        Vec3i v(x, y, z);
        if (grid.at(v) != VoxelState::Occupied) continue;
        for (const auto& [off, dist] : offs) {
          Vec3i w = v + off;
          if (out.in_bounds(w) && out.at(w) == VoxelState::Free)
            out.at(w) = VoxelState::Occupied;
        }
      }
  return out;
}

VoxelGrid compute_potential(const VoxelGrid& grid, double d_pot_max) {
  if (d_pot_max <= 0.0) throw ConfigError("d_pot_max must be positive");
  VoxelGrid out = grid;
  out.potential().assign(grid.size(), 0.0f);

  // Offsets sorted by distance; per voxel, probe outward and stop at the
  // first occupied neighbor (exact nearest within the truncation radius).
  auto offs = ball_offsets(d_pot_max, grid.voxel_size());
  std::sort(offs.begin(), offs.end(),
            [](const auto& a, const auto& b) { return a.second < b.second; });

  bool any_occupied = false;
  for (auto c : grid.cells())
    if (c == VoxelState::Occupied) {
      any_occupied = true;
      break;
    }

  const Vec3i d = grid.dims();
  for (int z = 0; z < d.z(); ++z)
    for (int y = 0; y < d.y(); ++y)
      for (int x = 0; x < d.x(); ++x) {
        Vec3i v(x, y, z);
        int i = out.index(v);
        if (grid.at(v) == VoxelState::Occupied) {
          out.potential()[i] = 100.0f;
          continue;
        }
        if (!any_occupied) continue;
        for (const auto& [off, dist] : offs) {
          if (dist >= d_pot_max) break;
          Vec3i w = v + off;
          if (grid.in_bounds(w) && grid.at(w) == VoxelState::Occupied) {
            double s = 1.0 - dist / d_pot_max;
            out.potential()[i] = static_cast<float>(100.0 * s * s * s * s);
            break;
          }
        }
      }
  return out;
}

}  // namespace swarmplan
