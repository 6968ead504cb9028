#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "swarmplan/geometry.hpp"

namespace swarmplan {

/// Raised on parameter/config contract violations (bad dims, mismatched
/// voxel sizes, non-positive distances, ...).
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

enum class VoxelState : std::uint8_t { Free = 0, Occupied = 1, Unknown = 2 };

/// Dense tri-state voxel lattice sliding with its owning agent. The origin is
/// the min corner of the box; every origin coordinate is an integer multiple
/// of voxel_size so grids from different instants align voxel-to-voxel.
class VoxelGrid {
 public:
  VoxelGrid() = default;
  VoxelGrid(const Vec3& origin, const Vec3i& dims, double voxel_size,
            VoxelState fill = VoxelState::Unknown);

  /// Grid whose center voxel contains agent_pos (dims must be odd per axis).
  static VoxelGrid centered_on(const Vec3& agent_pos, const Vec3i& dims,
                               double voxel_size,
                               VoxelState fill = VoxelState::Unknown);

  const Vec3& origin() const { return origin_; }
  const Vec3i& dims() const { return dims_; }
  double voxel_size() const { return voxel_size_; }
  int size() const { return static_cast<int>(cells_.size()); }
  Vec3i center_voxel() const { return dims_ / 2; }

  bool in_bounds(const Vec3i& v) const {
    return v.x() >= 0 && v.x() < dims_.x() && v.y() >= 0 && v.y() < dims_.y() &&
           v.z() >= 0 && v.z() < dims_.z();
  }

  int index(const Vec3i& v) const {
    return v.x() + dims_.x() * (v.y() + dims_.y() * v.z());
  }
  Vec3i unindex(int i) const {
    int x = i % dims_.x();
    int r = i / dims_.x();
    return {x, r % dims_.y(), r / dims_.y()};
  }

  Vec3i world_to_voxel(const Vec3& p) const {
    Vec3 q = (p - origin_) / voxel_size_;
    return {static_cast<int>(std::floor(q.x())),
            static_cast<int>(std::floor(q.y())),
            static_cast<int>(std::floor(q.z()))};
  }

  Vec3 voxel_center(const Vec3i& v) const {
    return origin_ + voxel_size_ * (v.cast<double>() + Vec3(0.5, 0.5, 0.5));
  }

  Aabb world_box() const {
    return {origin_, origin_ + voxel_size_ * dims_.cast<double>()};
  }
  Aabb voxel_box(const Vec3i& v) const {
    Vec3 lo = origin_ + voxel_size_ * v.cast<double>();
    return {lo, lo + Vec3::Constant(voxel_size_)};
  }

  bool contains_point(const Vec3& p) const { return world_box().contains(p); }

  VoxelState at(const Vec3i& v) const { return cells_[index(v)]; }
  VoxelState& at(const Vec3i& v) { return cells_[index(v)]; }
  VoxelState at(int i) const { return cells_[i]; }
  VoxelState& at(int i) { return cells_[i]; }

  /// State lookup that treats out-of-grid voxels as Unknown.
  VoxelState state_or_unknown(const Vec3i& v) const {
    return in_bounds(v) ? at(v) : VoxelState::Unknown;
  }

  bool is_border(const Vec3i& v) const {
    return v.x() == 0 || v.y() == 0 || v.z() == 0 || v.x() == dims_.x() - 1 ||
           v.y() == dims_.y() - 1 || v.z() == dims_.z() - 1;
  }

  const std::vector<VoxelState>& cells() const { return cells_; }
  std::vector<VoxelState>& cells() { return cells_; }

  bool has_potential() const { return !potential_.empty(); }
  const std::vector<float>& potential() const { return potential_; }
  std::vector<float>& potential() { return potential_; }
  float potential_at(const Vec3i& v) const {
    return potential_.empty() ? 0.0f : potential_[index(v)];
  }

  /// Debug dump: header `nx ny nz ox oy oz voxel_size`, then one state char
  /// per voxel ('F','O','U') in x-fastest order.
  std::string dump_states() const;
  /// Potential values as CSV, one x-row per line, z-slices separated by '#'.
  std::string dump_potential_csv() const;

 private:
  Vec3 origin_{0, 0, 0};
  Vec3i dims_{0, 0, 0};
  double voxel_size_ = 0.0;
  std::vector<VoxelState> cells_;
  std::vector<float> potential_;
};

/// Sensor snapshot: hit points in world coordinates plus the sensor origin.
struct PointCloud {
  std::vector<Vec3> points;
  Vec3 sensor_origin{0, 0, 0};
};

}  // namespace swarmplan
