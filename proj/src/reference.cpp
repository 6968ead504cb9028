#include "swarmplan/reference.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace swarmplan {

namespace {

// Point on the polyline at arc position s (clamped to [0, length]).
Vec3 point_at_arc(const GlobalPath& path, double s) {
  if (path.waypoints.size() == 1 || s <= 0.0) return path.waypoints.front();
  if (s >= path.length()) return path.waypoints.back();
  auto it = std::upper_bound(path.cum_dist.begin(), path.cum_dist.end(), s);
  size_t i = std::distance(path.cum_dist.begin(), it);  // first cum > s, >= 1
  double seg = path.cum_dist[i] - path.cum_dist[i - 1];
  double t = (s - path.cum_dist[i - 1]) / seg;
  return path.waypoints[i - 1] +
         t * (path.waypoints[i] - path.waypoints[i - 1]);
}

// Arc position of the closest point of the polyline to p, and its distance.
std::pair<double, double> project_to_path(const GlobalPath& path,
                                          const Vec3& p) {
  double best_s = 0.0, best_d = kInf;
  for (size_t i = 0; i + 1 < path.waypoints.size(); ++i) {
    const Vec3& a = path.waypoints[i];
    const Vec3& b = path.waypoints[i + 1];
    const Vec3 ab = b - a;
    double len2 = ab.squaredNorm();
    double t = len2 > 0 ? std::clamp((p - a).dot(ab) / len2, 0.0, 1.0) : 0.0;
    Vec3 q = a + t * ab;
    double d = (q - p).norm();
    if (d < best_d - 1e-15) {
      best_d = d;
      best_s = path.cum_dist[i] + t * std::sqrt(len2);
    }
  }
  if (path.waypoints.size() == 1) best_d = (path.waypoints[0] - p).norm();
  return {best_s, best_d};
}

}  // namespace

double adapt_speed(const GlobalPath& path, double s_d, double s_o, double v_min,
                   double v_max) {
  if (v_min > v_max) throw ConfigError("v_samp_min must be <= v_samp_max");
  double v_samp = v_max;
  for (size_t i = 0; i < path.size(); ++i) {
    double o_i = path.values[i];
    double d_i = path.cum_dist[i];
    double alpha = 1.0 - std::exp(-s_d * d_i) * (1.0 - std::exp(-s_o * o_i));
    v_samp = std::min(v_samp, v_min + alpha * (v_max - v_min));
  }
  return v_samp;
}

ReferenceTrajectory sample_reference(const GlobalPath& path, const Vec3& p0_ref,
                                     double v_samp, int n, double h) {
  if (path.empty()) throw ConfigError("sample_reference: empty path");
  ReferenceTrajectory ref;
  ref.v_samp = v_samp;
  ref.h = h;

  auto [s0, dist] = project_to_path(path, p0_ref);
  ref.projected = dist > 1e-6;

  ref.positions.resize(n + 1);
  for (int k = 0; k <= n; ++k)
    ref.positions[k] = point_at_arc(path, s0 + k * v_samp * h);

  ref.velocities.resize(n + 1, Vec3::Zero());
  for (int k = 0; k < n; ++k) {
    Vec3 dir = ref.positions[k + 1] - ref.positions[k];
    double len = dir.norm();
    if (len > 1e-12) ref.velocities[k] = (v_samp / len) * dir;
  }
  ref.velocities[n] = ref.velocities[n - 1 >= 0 ? n - 1 : 0];
  return ref;
}

double path_progress(const ReferenceTrajectory& prev_ref,
                     const Vec3& agent_pos) {
  constexpr double kStep = 0.01;
  // Resample the reference polyline at 1 cm and pick the nearest sample.
  double total = 0.0;
  std::vector<double> cum(prev_ref.positions.size(), 0.0);
  for (size_t i = 1; i < prev_ref.positions.size(); ++i) {
    total += (prev_ref.positions[i] - prev_ref.positions[i - 1]).norm();
    cum[i] = total;
  }
  int nsamp = static_cast<int>(std::floor(total / kStep)) + 1;
  double best_d = kInf, best_s = 0.0;
  size_t seg = 1;
  for (int i = 0; i < nsamp + 1; ++i) {
    double s = std::min(total, i * kStep);
    while (seg + 1 < cum.size() && cum[seg] < s) ++seg;
    Vec3 p;
    if (prev_ref.positions.size() == 1 || total == 0.0) {
      p = prev_ref.positions.front();
    } else {
      double seglen = cum[seg] - cum[seg - 1];
      double t = seglen > 0 ? (s - cum[seg - 1]) / seglen : 0.0;
      p = prev_ref.positions[seg - 1] +
          t * (prev_ref.positions[seg] - prev_ref.positions[seg - 1]);
    }
    double d = (p - agent_pos).norm();
    if (d < best_d - 1e-15) {  // ties keep the smaller arc distance
      best_d = d;
      best_s = s;
    }
    if (total == 0.0) break;
  }
  return best_s;
}

Vec3 advance_start(const ReferenceTrajectory& prev_ref, double progress) {
  if (progress < 0.01 - 1e-12) return prev_ref.positions.front();
  return prev_ref.positions.size() > 1 ? prev_ref.positions[1]
                                       : prev_ref.positions.front();
}

Vec3 path_plan_start(const ReferenceTrajectory& prev_ref, int i_path_start) {
  if (i_path_start < 0 ||
      i_path_start >= static_cast<int>(prev_ref.positions.size()))
    throw ConfigError("i_path_start out of range");
  return prev_ref.positions[i_path_start];
}

std::string dump_reference_csv(const ReferenceTrajectory& ref) {
  std::string out = "k,x,y,z,vx,vy,vz\n";
  char buf[160];
  for (size_t k = 0; k < ref.positions.size(); ++k) {
    std::snprintf(buf, sizeof(buf), "%zu,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f\n", k,
                  ref.positions[k].x(), ref.positions[k].y(),
                  ref.positions[k].z(), ref.velocities[k].x(),
                  ref.velocities[k].y(), ref.velocities[k].z());
    out += buf;
  }
  return out;
}

}  // namespace swarmplan
