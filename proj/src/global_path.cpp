#include "swarmplan/global_path.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

#include "swarmplan/raycast.hpp"

namespace swarmplan {

namespace {

struct Move {
  Vec3i d;
  double len;  // in voxel lengths
};

const std::vector<Move>& moves26() {
  static const std::vector<Move> moves = [] {
    std::vector<Move> m;
    for (int dz = -1; dz <= 1; ++dz)
      for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx) {
          if (dx == 0 && dy == 0 && dz == 0) continue;
          m.push_back({{dx, dy, dz},
                       std::sqrt(double(dx * dx + dy * dy + dz * dz))});
        }
    return m;
  }();
  return moves;
}

bool is_free(const VoxelGrid& g, const Vec3i& v) {
  return g.in_bounds(v) && g.at(v) == VoxelState::Free;
}

// Admissible 26-connected distance in voxel lengths.
double octile3(const Vec3i& a, const Vec3i& b) {
  int d[3] = {std::abs(a.x() - b.x()), std::abs(a.y() - b.y()),
              std::abs(a.z() - b.z())};
  std::sort(d, d + 3);  // d[0] <= d[1] <= d[2]
  constexpr double s2 = 1.4142135623730951, s3 = 1.7320508075688772;
  return s3 * d[0] + s2 * (d[1] - d[0]) + (d[2] - d[1]);
}

struct OpenEntry {
  double f;
  double g;
  int idx;
  bool operator>(const OpenEntry& o) const {
    if (f != o.f) return f > o.f;
    return idx > o.idx;  // deterministic tie-break
  }
};

// Shared best-first search. prune_with_parent enables the jump-style
// dominance rule; corridor (optional) restricts expansions; w_pot adds
// potential costs per entered voxel.
std::optional<GlobalPath> grid_search(const VoxelGrid& grid, const Vec3& start,
                                      const Vec3& goal, bool prune_with_parent,
                                      double w_pot,
                                      const SearchCorridor* corridor) {
  const Vec3i sv = grid.world_to_voxel(start);
  const Vec3i gv = grid.world_to_voxel(goal);
  if (!is_free(grid, sv) || !is_free(grid, gv)) return std::nullopt;
  if (corridor &&
      (!corridor->contains(grid.index(sv)) || !corridor->contains(grid.index(gv))))
    return std::nullopt;

  const double vox = grid.voxel_size();
  const int n = grid.size();
  std::vector<double> gval(n, kInf);
  std::vector<int> parent(n, -1);
  std::vector<std::uint8_t> closed(n, 0);

  std::priority_queue<OpenEntry, std::vector<OpenEntry>, std::greater<>> open;
  const int sidx = grid.index(sv);
  const int gidx = grid.index(gv);
  // Potential is charged per entered voxel; the start voxel is a fixed
  // offset and not charged.
  gval[sidx] = 0.0;
  open.push({vox * octile3(sv, gv), 0.0, sidx});

  while (!open.empty()) {
    OpenEntry e = open.top();
    open.pop();
    if (closed[e.idx]) continue;
    closed[e.idx] = 1;
    if (e.idx == gidx) break;
    const Vec3i v = grid.unindex(e.idx);
    const Vec3i pv = parent[e.idx] >= 0 ? grid.unindex(parent[e.idx]) : v;
    const bool has_parent = parent[e.idx] >= 0;

    for (const Move& m : moves26()) {
      const Vec3i w = v + m.d;
      if (!grid.in_bounds(w)) continue;
      const int widx = grid.index(w);
      if (closed[widx]) continue;
      if (corridor && !corridor->contains(widx)) continue;
      if (!is_move_traversable(grid, v, m.d)) continue;

      if (prune_with_parent && has_parent) {
        // Dominated successor: reachable from the grandparent by a single
        // no-costlier traversable move, so it was already generated there.
        const Vec3i dm = w - pv;
        if (dm.cwiseAbs().maxCoeff() <= 1) {
          if (dm.isZero()) continue;
          const double dml = std::sqrt(double(dm.squaredNorm()));
          const double pml = std::sqrt(double((v - pv).squaredNorm()));
          if (dml <= pml + m.len + 1e-12 && is_move_traversable(grid, pv, dm))
            continue;
        }
      }

      double step = vox * m.len + w_pot * vox * grid.potential_at(w);
      double ng = e.g + step;
      if (ng < gval[widx] - 1e-15) {
        gval[widx] = ng;
        parent[widx] = e.idx;
        open.push({ng + vox * octile3(w, gv), ng, widx});
      }
    }
  }

  if (!closed[gidx]) return std::nullopt;

  GlobalPath path;
  std::vector<int> chain;
  for (int i = gidx; i >= 0; i = parent[i]) chain.push_back(i);
  std::reverse(chain.begin(), chain.end());
  path.waypoints.reserve(chain.size());
  for (int i : chain) {
    Vec3i v = grid.unindex(i);
    path.waypoints.push_back(grid.voxel_center(v));
    path.values.push_back(grid.potential_at(v));
  }
  path.cum_dist.resize(chain.size(), 0.0);
  for (size_t i = 1; i < chain.size(); ++i)
    path.cum_dist[i] =
        path.cum_dist[i - 1] +
        (path.waypoints[i] - path.waypoints[i - 1]).norm();
  path.cost = gval[gidx];
  return path;
}

}  // namespace

bool is_move_traversable(const VoxelGrid& grid, const Vec3i& from,
                         const Vec3i& delta) {
  const Vec3i to = from + delta;
  if (!is_free(grid, to)) return false;
  int axes[3], na = 0;
  for (int a = 0; a < 3; ++a)
    if (delta[a] != 0) axes[na++] = a;
  if (na <= 1) return true;
  auto step = [&](const Vec3i& v, int a) {
    Vec3i w = v;
    w[a] += delta[a];
    return w;
  };
  if (na == 2) {
    return is_free(grid, step(from, axes[0])) ||
           is_free(grid, step(from, axes[1]));
  }
  // 3-axis diagonal: some ordering of the unit steps stays in free space.
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      if (i == j) continue;
      Vec3i a = step(from, axes[i]);
      if (is_free(grid, a) && is_free(grid, step(a, axes[j]))) return true;
    }
  return false;
}

Vec3 intermediate_goal(const VoxelGrid& grid, const Vec3& p_curr,
                       const Vec3& p_goal) {
  const Aabb box = grid.world_box();
  if (box.contains(p_goal)) return p_goal;
  double t0, t1;
  Vec3 crossing = p_goal;
  if (segment_aabb_clip(p_curr, p_goal, box, t0, t1))
    crossing = p_curr + t1 * (p_goal - p_curr);
  // Pull the border point half a voxel inward so it sits inside the border
  // voxel layer rather than on the outer face.
  Aabb inner{box.lo + Vec3::Constant(0.5 * grid.voxel_size()),
             box.hi - Vec3::Constant(0.5 * grid.voxel_size())};
  return inner.clamp(crossing);
}

void force_border_free(VoxelGrid& grid) {
  const Vec3i d = grid.dims();
  for (int z = 0; z < d.z(); ++z)
    for (int y = 0; y < d.y(); ++y)
      for (int x = 0; x < d.x(); ++x)
        if (x == 0 || y == 0 || z == 0 || x == d.x() - 1 || y == d.y() - 1 ||
            z == d.z() - 1)
          grid.at({x, y, z}) = VoxelState::Free;
}

std::optional<Vec3> clamp_to_free(const VoxelGrid& grid, const Vec3& p) {
  Vec3i c = grid.world_to_voxel(p);
  c = c.cwiseMax(Vec3i::Zero()).cwiseMin(grid.dims() - Vec3i::Ones());
  if (grid.at(c) == VoxelState::Free) return grid.voxel_center(c);
  const int rmax = grid.dims().maxCoeff();
  double best_d = kInf;
  Vec3i best;
  for (int r = 1; r < rmax; ++r) {
    // Chebyshev ring r; keep searching one extra ring after a hit since the
    // Euclidean-nearest voxel may sit on the next ring.
    for (int dz = -r; dz <= r; ++dz)
      for (int dy = -r; dy <= r; ++dy)
        for (int dx = -r; dx <= r; ++dx) {
          if (std::max({std::abs(dx), std::abs(dy), std::abs(dz)}) != r)
            continue;
          Vec3i v = c + Vec3i(dx, dy, dz);
          if (!grid.in_bounds(v) || grid.at(v) != VoxelState::Free) continue;
          double d = (grid.voxel_center(v) - p).norm();
          if (d < best_d) {
            best_d = d;
            best = v;
          }
        }
    if (best_d < kInf && grid.voxel_size() * r > best_d) break;
  }
  if (best_d == kInf) return std::nullopt;
  return grid.voxel_center(best);
}

std::optional<GlobalPath> jps(const VoxelGrid& grid, const Vec3& start,
                              const Vec3& goal) {
  return grid_search(grid, start, goal, /*prune_with_parent=*/true, 0.0,
                     nullptr);
}

std::optional<GlobalPath> astar(const VoxelGrid& grid, const Vec3& start,
                                const Vec3& goal, double w_pot,
                                const SearchCorridor* corridor) {
  return grid_search(grid, start, goal, /*prune_with_parent=*/false, w_pot,
                     corridor);
}

SearchCorridor build_corridor(const GlobalPath& path, double d_search,
                              const VoxelGrid& grid) {
  SearchCorridor sc;
  sc.mask.assign(grid.size(), 0);
  const double vox = grid.voxel_size();
  const int r = static_cast<int>(std::floor(d_search / vox + 1e-9));
  std::vector<Vec3i> offs;
  for (int dz = -r; dz <= r; ++dz)
    for (int dy = -r; dy <= r; ++dy)
      for (int dx = -r; dx <= r; ++dx)
        if (vox * std::sqrt(double(dx * dx + dy * dy + dz * dz)) <=
            d_search + 1e-12)
          offs.push_back({dx, dy, dz});
  for (const Vec3& wp : path.waypoints) {
    const Vec3i v = grid.world_to_voxel(wp);
    for (const Vec3i& off : offs) {
      Vec3i w = v + off;
      if (!grid.in_bounds(w)) continue;
      auto& m = sc.mask[grid.index(w)];
      if (!m) {
        m = 1;
        ++sc.count;
      }
    }
  }
  return sc;
}

std::optional<GlobalPath> dmp(const VoxelGrid& grid_with_potential,
                              const SearchCorridor& corridor, const Vec3& start,
                              const Vec3& goal, double w_pot) {
  return grid_search(grid_with_potential, start, goal,
                     /*prune_with_parent=*/false, w_pot, &corridor);
}

bool is_line_clear(const VoxelGrid& grid, const Vec3& a, const Vec3& b) {
  if (!grid.contains_point(a) || !grid.contains_point(b)) return false;
  auto blocked = [&](const Vec3i& v) {
    return !grid.in_bounds(v) || grid.at(v) == VoxelState::Occupied ||
           grid.potential_at(v) > 0.0f;
  };
  for (const StepGroup& g : walk_voxels_grouped(grid, a, b)) {
    if (blocked(g.landing)) return false;
    if (g.tie_paths.empty()) continue;
    bool any_order_clear = false;
    for (const auto& path : g.tie_paths) {
      bool clear = true;
      for (const Vec3i& v : path)
        if (blocked(v)) {
          clear = false;
          break;
        }
      if (clear) {
        any_order_clear = true;
        break;
      }
    }
    if (!any_order_clear) return false;
  }
  return true;
}

GlobalPath shorten_path(const GlobalPath& path, const VoxelGrid& grid) {
  std::vector<Vec3> pts = path.waypoints;
  std::vector<double> vals = path.values;

  auto waypoint_free = [&](size_t i) {
    Vec3i v = grid.world_to_voxel(pts[i]);
    return grid.in_bounds(v) && grid.at(v) == VoxelState::Free &&
           grid.potential_at(v) <= 0.0f;
  };

  size_t i = 0;
  while (i + 1 < pts.size()) {
    if (waypoint_free(i)) {
      size_t i_end = i;
      size_t j = i + 1;
      while (j < pts.size()) {
        bool line_clear = is_line_clear(grid, pts[i], pts[j]);
        if (waypoint_free(j) && line_clear) {
          i_end = j;
          ++j;
        } else {
          break;
        }
      }
      if (i_end > i + 1) {
        pts.erase(pts.begin() + i + 1, pts.begin() + i_end);
        vals.erase(vals.begin() + i + 1, vals.begin() + i_end);
      }
    }
    ++i;
  }

  GlobalPath out;
  out.waypoints = std::move(pts);
  out.values = std::move(vals);
  out.cum_dist.resize(out.waypoints.size(), 0.0);
  for (size_t k = 1; k < out.waypoints.size(); ++k)
    out.cum_dist[k] = out.cum_dist[k - 1] +
                      (out.waypoints[k] - out.waypoints[k - 1]).norm();
  out.cost = path.cost;
  return out;
}

GlobalPath annotate_path(const std::vector<Vec3>& points,
                         const VoxelGrid& grid) {
  GlobalPath out;
  for (const Vec3& p : points) {
    if (!out.waypoints.empty() && (p - out.waypoints.back()).norm() < 1e-12)
      continue;
    out.waypoints.push_back(p);
    Vec3i v = grid.world_to_voxel(p);
    out.values.push_back(grid.in_bounds(v) ? grid.potential_at(v) : 0.0);
  }
  out.cum_dist.resize(out.waypoints.size(), 0.0);
  for (size_t k = 1; k < out.waypoints.size(); ++k)
    out.cum_dist[k] = out.cum_dist[k - 1] +
                      (out.waypoints[k] - out.waypoints[k - 1]).norm();
  return out;
}

}  // namespace swarmplan
