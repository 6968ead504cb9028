#pragma once

#include <Eigen/Dense>
#include <limits>

namespace swarmplan {

using Vec3 = Eigen::Vector3d;
using Vec3i = Eigen::Vector3i;

constexpr double kInf = std::numeric_limits<double>::infinity();

/// Axis-aligned box, min/max corners in world coordinates.
struct Aabb {
  Vec3 lo{0, 0, 0};
  Vec3 hi{0, 0, 0};

  bool contains(const Vec3& p) const {
    return p.x() >= lo.x() && p.x() <= hi.x() && p.y() >= lo.y() &&
           p.y() <= hi.y() && p.z() >= lo.z() && p.z() <= hi.z();
  }

  Vec3 clamp(const Vec3& p) const {
    return p.cwiseMax(lo).cwiseMin(hi);
  }

  Vec3 center() const { return 0.5 * (lo + hi); }
  Vec3 extent() const { return hi - lo; }

  // Distance from p to the box surface; negative depth when p is inside.
  double surface_distance(const Vec3& p) const {
    Vec3 d = (lo - p).cwiseMax(p - hi);
    if (d.maxCoeff() <= 0.0) return d.maxCoeff();  // inside
    return d.cwiseMax(0.0).norm();
  }
};

/// Entry/exit parameters of segment a + t*(b-a), t in [0,1], against a box.
/// Returns false when the segment misses the box entirely.
bool segment_aabb_clip(const Vec3& a, const Vec3& b, const Aabb& box,
                       double& t_enter, double& t_exit);

}  // namespace swarmplan
