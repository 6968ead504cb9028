#pragma once

#include <optional>
#include <stdexcept>
#include <vector>

#include "swarmplan/global_path.hpp"
#include "swarmplan/trajectory.hpp"
#include "swarmplan/voxel_grid.hpp"

namespace swarmplan {

struct InvalidSeed : std::runtime_error {
  explicit InvalidSeed(const std::string& msg) : std::runtime_error(msg) {}
};

struct DegenerateGeometry : std::runtime_error {
  explicit DegenerateGeometry(const std::string& msg)
      : std::runtime_error(msg) {}
};

/// Convex region in halfspace form: normal . p <= offset per row.
struct Polyhedron {
  struct Halfspace {
    Vec3 normal;  // unit length
    double offset;
  };
  std::vector<Halfspace> rows;

  bool contains(const Vec3& p, double tol = 1e-9) const {
    for (const auto& h : rows)
      if (h.normal.dot(p) > h.offset + tol) return false;
    return true;
  }
};

/// Separating plane between two agents: passes through `point`, feasible side
/// of the planning agent is normal . (p - point) >= 0.
struct Hyperplane {
  Vec3 point;
  Vec3 normal;  // unit, from the other agent toward the planning agent

  Polyhedron::Halfspace as_halfspace() const {
    return {-normal, -normal.dot(point)};
  }
};

/// N-1 time-local safe corridors; corridors[k] constrains the trajectory
/// segment (p_k, p_{k+1}).
struct Tasc {
  std::vector<std::vector<Polyhedron>> corridors;
};

/// Axis-aligned cuboid grown greedily from the seed voxel one face layer at a
/// time, stopping each face when the next layer holds a non-Free voxel. When
/// the seed is restricted along an axis (both direct neighbors occupied), the
/// unrestricted axes grow first. Throws InvalidSeed when the seed voxel is
/// not Free.
Polyhedron inflate_polyhedron(const VoxelGrid& grid_occ, const Vec3& seed);

/// Corridor of at most p_hor polyhedra along the path: seed at p_curr, walk
/// the path at voxel_size/10 steps, seed a new polyhedron whenever the walk
/// point leaves all existing ones.
std::vector<Polyhedron> build_safe_corridor(const VoxelGrid& grid_occ,
                                            const GlobalPath& path,
                                            const Vec3& p_curr, int p_hor);

/// Ellipsoid support radius along v (semi-axes a horizontal, c vertical).
double ellipsoid_support(const Vec3& v_unit, double a, double c);

/// Midpoint plane pushed toward the planning agent by the ellipsoid support
/// distance; throws DegenerateGeometry for coincident points.
Hyperplane separating_hyperplane(const Vec3& p_plan, const Vec3& p_other,
                                 double r_agent, double z_offset);

/// SC_k = sc_raw plus, per other agent, the hyperplane built from the two
/// agents' step-(k+1) positions of their previous trajectories, appended to
/// every polyhedron. Pairs farther apart than skip_range add no hyperplane.
Tasc build_tasc(const std::vector<Polyhedron>& sc_raw,
                const Trajectory& traj_self,
                const std::vector<Trajectory>& trajs_others, double r_agent,
                double z_offset, double skip_range = kInf);

/// Halfspace rows as CSV lines `nx,ny,nz,c`, polyhedra separated by '#'.
std::string dump_polyhedra_csv(const std::vector<Polyhedron>& polys);

}  // namespace swarmplan
