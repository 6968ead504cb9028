#include "swarmplan/raycast.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace swarmplan {

namespace {

struct Stepper {
  Vec3i v;
  Vec3i end;
  std::array<int, 3> step{};
  std::array<double, 3> t_max{};
  std::array<double, 3> t_delta{};

  Stepper(const VoxelGrid& grid, const Vec3& a, const Vec3& b) {
    v = grid.world_to_voxel(a);
    end = grid.world_to_voxel(b);
    const Vec3 d = b - a;
    const double vox = grid.voxel_size();
    for (int ax = 0; ax < 3; ++ax) {
      if (d[ax] > 0.0) {
        step[ax] = 1;
        double plane = grid.origin()[ax] + (v[ax] + 1) * vox;
        t_max[ax] = (plane - a[ax]) / d[ax];
        t_delta[ax] = vox / d[ax];
      } else if (d[ax] < 0.0) {
        step[ax] = -1;
        double plane = grid.origin()[ax] + v[ax] * vox;
        t_max[ax] = (plane - a[ax]) / d[ax];
        t_delta[ax] = vox / -d[ax];
      } else {
        step[ax] = 0;
        t_max[ax] = kInf;
        t_delta[ax] = kInf;
      }
    }
  }

  // Axes crossing at the next parameter, x->y->z order. Empty when done.
  std::vector<int> next_axes() const {
    double tm = std::min({t_max[0], t_max[1], t_max[2]});
    if (tm > 1.0 + 1e-12 || tm == kInf) return {};
    std::vector<int> axes;
    for (int ax = 0; ax < 3; ++ax)
      if (t_max[ax] - tm <= 1e-12 * std::max(1.0, std::abs(tm))) axes.push_back(ax);
    return axes;
  }

  void advance(int ax) {
    v[ax] += step[ax];
    t_max[ax] += t_delta[ax];
  }
};

}  // namespace

void walk_voxels(const VoxelGrid& grid, const Vec3& a, const Vec3& b,
                 const std::function<bool(const Vec3i&)>& visit) {
  Stepper s(grid, a, b);
  if (!grid.in_bounds(s.v)) return;
  if (!visit(s.v)) return;
  while (s.v != s.end) {
    auto axes = s.next_axes();
    if (axes.empty()) return;
    for (int ax : axes) {
      s.advance(ax);
      if (!grid.in_bounds(s.v)) return;
      if (!visit(s.v)) return;
      if (s.v == s.end) return;
    }
  }
}

std::vector<StepGroup> walk_voxels_grouped(const VoxelGrid& grid, const Vec3& a,
                                           const Vec3& b) {
  std::vector<StepGroup> groups;
  Stepper s(grid, a, b);
  if (!grid.in_bounds(s.v)) return groups;
  groups.push_back({s.v, {}});
  while (s.v != s.end) {
    auto axes = s.next_axes();
    if (axes.empty()) break;
    StepGroup g;
    if (axes.size() == 1) {
      s.advance(axes[0]);
      g.landing = s.v;
    } else {
      // Corner/edge pass: enumerate every ordering of the tied axes. The
      // landing voxel is the same for all of them.
      std::vector<int> order = axes;
      std::sort(order.begin(), order.end());
      do {
        Vec3i w = s.v;
        std::vector<Vec3i> path;
        for (size_t i = 0; i + 1 < order.size(); ++i) {
          w[order[i]] += s.step[order[i]];
          path.push_back(w);
        }
        g.tie_paths.push_back(std::move(path));
      } while (std::next_permutation(order.begin(), order.end()));
      for (int ax : axes) s.advance(ax);
      g.landing = s.v;
    }
    if (!grid.in_bounds(g.landing)) break;
    groups.push_back(std::move(g));
  }
  return groups;
}

}  // namespace swarmplan
