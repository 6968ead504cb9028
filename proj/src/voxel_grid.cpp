#include "swarmplan/voxel_grid.hpp"

#include <cmath>
#include <cstdio>

namespace swarmplan {

VoxelGrid::VoxelGrid(const Vec3& origin, const Vec3i& dims, double voxel_size,
                     VoxelState fill)
    : origin_(origin), dims_(dims), voxel_size_(voxel_size) {
  if (dims.minCoeff() <= 0) throw ConfigError("grid dims must be positive");
  if (voxel_size <= 0.0) throw ConfigError("voxel_size must be positive");
  cells_.assign(static_cast<size_t>(dims.x()) * dims.y() * dims.z(), fill);
}

VoxelGrid VoxelGrid::centered_on(const Vec3& agent_pos, const Vec3i& dims,
                                 double voxel_size, VoxelState fill) {
  if (dims.x() % 2 == 0 || dims.y() % 2 == 0 || dims.z() % 2 == 0)
    throw ConfigError("grid dims must be odd so a center voxel exists");
  // The agent's voxel on the absolute lattice becomes the center voxel; the
  // resulting origin is automatically a multiple of voxel_size per axis.
  Vec3 origin;
  for (int a = 0; a < 3; ++a) {
    double cell = std::floor(agent_pos[a] / voxel_size);
    origin[a] = (cell - dims[a] / 2) * voxel_size;
  }
  return VoxelGrid(origin, dims, voxel_size, fill);
}

std::string VoxelGrid::dump_states() const {
  char head[128];
  std::snprintf(head, sizeof(head), "%d %d %d %.9g %.9g %.9g %.9g\n", dims_.x(),
                dims_.y(), dims_.z(), origin_.x(), origin_.y(), origin_.z(),
                voxel_size_);
  std::string out(head);
  out.reserve(out.size() + cells_.size() + 1);
  for (VoxelState s : cells_) {
    switch (s) {
      case VoxelState::Free: out += 'F'; break;
      case VoxelState::Occupied: out += 'O'; break;
      case VoxelState::Unknown: out += 'U'; break;
    }
  }
  out += '\n';
  return out;
}

std::string VoxelGrid::dump_potential_csv() const {
  std::string out;
  char buf[32];
  for (int z = 0; z < dims_.z(); ++z) {
    for (int y = 0; y < dims_.y(); ++y) {
      for (int x = 0; x < dims_.x(); ++x) {
        std::snprintf(buf, sizeof(buf), x + 1 == dims_.x() ? "%.4g" : "%.4g,",
                      potential_.empty() ? 0.0 : potential_[index({x, y, z})]);
        out += buf;
      }
      out += '\n';
    }
    if (z + 1 < dims_.z()) out += "#\n";
  }
  return out;
}

bool segment_aabb_clip(const Vec3& a, const Vec3& b, const Aabb& box,
                       double& t_enter, double& t_exit) {
  double t0 = 0.0, t1 = 1.0;
  Vec3 d = b - a;
  for (int ax = 0; ax < 3; ++ax) {
    if (std::abs(d[ax]) < 1e-300) {
      if (a[ax] < box.lo[ax] || a[ax] > box.hi[ax]) return false;
      continue;
    }
    double u0 = (box.lo[ax] - a[ax]) / d[ax];
    double u1 = (box.hi[ax] - a[ax]) / d[ax];
    if (u0 > u1) std::swap(u0, u1);
    t0 = std::max(t0, u0);
    t1 = std::min(t1, u1);
    if (t0 > t1) return false;
  }
  t_enter = t0;
  t_exit = t1;
  return true;
}

}  // namespace swarmplan
