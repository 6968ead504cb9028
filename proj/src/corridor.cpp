#include "swarmplan/corridor.hpp"

#include <algorithm>
#include <cmath>

namespace swarmplan {

namespace {

// Inclusive voxel index ranges of a cuboid, per axis.
struct Cuboid {
  Vec3i lo, hi;
};

bool layer_free(const VoxelGrid& g, const Cuboid& c, int axis, int layer) {
  Vec3i lo = c.lo, hi = c.hi;
  lo[axis] = hi[axis] = layer;
  if (layer < 0 || layer >= g.dims()[axis]) return false;
  for (int z = lo.z(); z <= hi.z(); ++z)
    for (int y = lo.y(); y <= hi.y(); ++y)
      for (int x = lo.x(); x <= hi.x(); ++x)
        if (g.at({x, y, z}) != VoxelState::Free) return false;
  return true;
}

bool occupied_or_outside(const VoxelGrid& g, const Vec3i& v) {
  return !g.in_bounds(v) || g.at(v) == VoxelState::Occupied;
}

}  // namespace

Polyhedron inflate_polyhedron(const VoxelGrid& grid_occ, const Vec3& seed) {
  const Vec3i sv = grid_occ.world_to_voxel(seed);
  if (!grid_occ.in_bounds(sv)) throw InvalidSeed("seed outside grid");
  if (grid_occ.at(sv) != VoxelState::Free)
    throw InvalidSeed("seed voxel is not Free");

  // Restricted axes (both direct neighbors non-free) grow last.
  bool restricted[3];
  for (int a = 0; a < 3; ++a) {
    Vec3i up = sv, dn = sv;
    up[a] += 1;
    dn[a] -= 1;
    restricted[a] = occupied_or_outside(grid_occ, up) &&
                    occupied_or_outside(grid_occ, dn);
  }
  std::vector<int> faces;  // face id: axis*2 + (0: +dir, 1: -dir)
  for (int a = 0; a < 3; ++a)
    if (!restricted[a]) {
      faces.push_back(a * 2);
      faces.push_back(a * 2 + 1);
    }
  for (int a = 0; a < 3; ++a)
    if (restricted[a]) {
      faces.push_back(a * 2);
      faces.push_back(a * 2 + 1);
    }

  Cuboid c{sv, sv};
  std::vector<bool> done(6, false);
  size_t stalled = 0;
  size_t fi = 0;
  while (stalled < faces.size()) {
    int f = faces[fi % faces.size()];
    ++fi;
    int axis = f / 2;
    bool positive = (f % 2) == 0;
    if (done[f]) {
      ++stalled;
      continue;
    }
    int layer = positive ? c.hi[axis] + 1 : c.lo[axis] - 1;
    if (layer_free(grid_occ, c, axis, layer)) {
      if (positive)
        c.hi[axis] = layer;
      else
        c.lo[axis] = layer;
      stalled = 0;
    } else {
      done[f] = true;
      ++stalled;
    }
  }

  const double vox = grid_occ.voxel_size();
  const Vec3 lo = grid_occ.origin() + vox * c.lo.cast<double>();
  const Vec3 hi = grid_occ.origin() + vox * (c.hi + Vec3i::Ones()).cast<double>();
  Polyhedron poly;
  for (int a = 0; a < 3; ++a) {
    Vec3 n = Vec3::Zero();
    n[a] = 1.0;
    poly.rows.push_back({n, hi[a]});
    poly.rows.push_back({-n, -lo[a]});
  }
  return poly;
}

std::vector<Polyhedron> build_safe_corridor(const VoxelGrid& grid_occ,
                                            const GlobalPath& path,
                                            const Vec3& p_curr, int p_hor) {
  if (p_hor < 1) throw ConfigError("p_hor must be >= 1");
  std::vector<Polyhedron> polys;
  polys.push_back(inflate_polyhedron(grid_occ, p_curr));
  if (path.empty()) return polys;

  auto inside_any = [&](const Vec3& p) {
    for (const auto& poly : polys)
      if (poly.contains(p)) return true;
    return false;
  };

  const double step = grid_occ.voxel_size() / 10.0;
  for (size_t i = 0; i + 1 < path.waypoints.size() &&
                     static_cast<int>(polys.size()) < p_hor;
       ++i) {
    const Vec3 a = path.waypoints[i];
    const Vec3 b = path.waypoints[i + 1];
    const double len = (b - a).norm();
    const int nsteps = std::max(1, static_cast<int>(std::ceil(len / step)));
    for (int s = 0; s <= nsteps; ++s) {
      Vec3 p = a + (static_cast<double>(s) / nsteps) * (b - a);
      if (!grid_occ.contains_point(p)) return polys;  // corridor ends at grid
      if (inside_any(p)) continue;
      try {
        polys.push_back(inflate_polyhedron(grid_occ, p));
      } catch (const InvalidSeed&) {
        // Walk ran into non-free (e.g. unknown) space; the corridor ends at
        // the known-free boundary.
        return polys;
      }
      if (static_cast<int>(polys.size()) >= p_hor) return polys;
    }
  }
  return polys;
}

double ellipsoid_support(const Vec3& v_unit, double a, double c) {
  const double hx = v_unit.x(), hy = v_unit.y(), hz = v_unit.z();
  return 1.0 / std::sqrt((hx * hx + hy * hy) / (a * a) + (hz * hz) / (c * c));
}

Hyperplane separating_hyperplane(const Vec3& p_plan, const Vec3& p_other,
                                 double r_agent, double z_offset) {
  const Vec3 d = p_plan - p_other;
  const double n = d.norm();
  if (n < 1e-12)
    throw DegenerateGeometry("coincident agent positions");
  Hyperplane h;
  h.normal = d / n;
  const double d_offset =
      ellipsoid_support(h.normal, r_agent, r_agent + z_offset);
  h.point = 0.5 * (p_plan + p_other) + d_offset * h.normal;
  return h;
}

Tasc build_tasc(const std::vector<Polyhedron>& sc_raw,
                const Trajectory& traj_self,
                const std::vector<Trajectory>& trajs_others, double r_agent,
                double z_offset, double skip_range) {
  const int n = traj_self.horizon();
  Tasc tasc;
  tasc.corridors.reserve(std::max(0, n - 1));
  for (int k = 0; k + 1 < n; ++k) {
    std::vector<Polyhedron> sc = sc_raw;
    for (const Trajectory& other : trajs_others) {
      const Vec3& p_plan = traj_self.states[k + 1].p;
      const Vec3& p_other = other.states[k + 1].p;
      if ((p_other - p_plan).norm() > skip_range) continue;
      Hyperplane h = separating_hyperplane(p_plan, p_other, r_agent, z_offset);
      for (auto& poly : sc) poly.rows.push_back(h.as_halfspace());
    }
    tasc.corridors.push_back(std::move(sc));
  }
  return tasc;
}

std::string dump_polyhedra_csv(const std::vector<Polyhedron>& polys) {
  std::string out;
  char buf[128];
  for (size_t i = 0; i < polys.size(); ++i) {
    if (i) out += "#\n";
    for (const auto& r : polys[i].rows) {
      std::snprintf(buf, sizeof(buf), "%.9g,%.9g,%.9g,%.9g\n", r.normal.x(),
                    r.normal.y(), r.normal.z(), r.offset);
      out += buf;
    }
  }
  return out;
}

}  // namespace swarmplan
