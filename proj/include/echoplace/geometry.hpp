#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

namespace echoplace {

struct Vec3 {
  double x = 0.0, y = 0.0, z = 0.0;

  Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  Vec3 operator/(double s) const { return {x / s, y / s, z / s}; }
  Vec3& operator+=(const Vec3& o) { x += o.x; y += o.y; z += o.z; return *this; }
  double operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }
  double& operator[](int i) { return i == 0 ? x : (i == 1 ? y : z); }
};

inline Vec3 operator*(double s, const Vec3& v) { return v * s; }
inline double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double norm(const Vec3& v) { return std::sqrt(dot(v, v)); }
inline Vec3 normalized(const Vec3& v) { return v / norm(v); }

struct Aabb {
  Vec3 min, max;

  bool contains(const Vec3& p, double eps = 0.0) const {
    return p.x >= min.x - eps && p.x <= max.x + eps && p.y >= min.y - eps &&
           p.y <= max.y + eps && p.z >= min.z - eps && p.z <= max.z + eps;
  }
  Vec3 extent() const { return max - min; }
  Vec3 center() const { return (min + max) * 0.5; }
  double volume() const {
    Vec3 e = extent();
    return e.x * e.y * e.z;
  }
  bool empty() const { return max.x < min.x || max.y < min.y || max.z < min.z; }
};

// Planar triangle with a material reference, the mesh primitive.
struct Triangle {
  Vec3 a, b, c;
  int material = 0;

  Vec3 normal() const { return normalized(cross(b - a, c - a)); }
  double area() const { return 0.5 * norm(cross(b - a, c - a)); }
  Vec3 centroid() const { return (a + b + c) / 3.0; }
};

struct Plane {
  Vec3 n;     // unit normal
  double d;   // n.p = d on the plane

  double signed_distance(const Vec3& p) const { return dot(n, p) - d; }
  Vec3 reflect(const Vec3& p) const { return p - 2.0 * signed_distance(p) * n; }
};

inline Plane plane_of(const Triangle& t) {
  Vec3 n = t.normal();
  return {n, dot(n, t.a)};
}

struct RayHit {
  double t = 0.0;   // distance along the (unit) ray direction
  int triangle = -1;
  Vec3 point;
};

// Moller-Trumbore, two-sided. Returns distance along dir if hit in (tmin, tmax).
std::optional<double> ray_triangle(const Vec3& origin, const Vec3& dir, const Triangle& tri,
                                   double tmin = 1e-9, double tmax = 1e30);

// Closest triangle hit over a mesh; brute force (desk-scale meshes).
std::optional<RayHit> ray_mesh(const Vec3& origin, const Vec3& dir,
                               const std::vector<Triangle>& mesh, double tmin = 1e-6,
                               double tmax = 1e30);

// True if any triangle blocks the open segment (a, b), excluding an optional triangle index.
bool segment_occluded(const Vec3& a, const Vec3& b, const std::vector<Triangle>& mesh,
                      int skip_triangle = -1, double eps = 1e-6);

// Separating-axis triangle/box overlap test (Akenine-Moller).
bool triangle_aabb_overlap(const Triangle& tri, const Aabb& box);

// Exact test that `inner` is covered by the union of `cover` boxes.
bool box_in_union(const Aabb& inner, const std::vector<Aabb>& cover, double eps = 1e-9);

// Point containment in a union of boxes.
bool point_in_union(const Vec3& p, const std::vector<Aabb>& boxes, double eps = 0.0);

// Intersections of the segment p -> p+dir*len with a sphere; returns entry/exit distances.
std::optional<std::pair<double, double>> segment_sphere(const Vec3& p, const Vec3& dir,
                                                        double len, const Vec3& center,
                                                        double radius);

}  // namespace echoplace

// Inline definitions for the small hot-path primitives.
namespace echoplace {

inline std::optional<double> ray_triangle(const Vec3& origin, const Vec3& dir,
                                          const Triangle& tri, double tmin, double tmax) {
  const Vec3 e1 = tri.b - tri.a;
  const Vec3 e2 = tri.c - tri.a;
  const Vec3 p = cross(dir, e2);
  const double det = dot(e1, p);
  if (std::fabs(det) < 1e-14) return std::nullopt;
  const double inv = 1.0 / det;
  const Vec3 s = origin - tri.a;
  const double u = dot(s, p) * inv;
  if (u < -1e-12 || u > 1.0 + 1e-12) return std::nullopt;
  const Vec3 q = cross(s, e1);
  const double v = dot(dir, q) * inv;
  if (v < -1e-12 || u + v > 1.0 + 1e-12) return std::nullopt;
  const double t = dot(e2, q) * inv;
  if (t <= tmin || t >= tmax) return std::nullopt;
  return t;
}

inline std::optional<RayHit> ray_mesh(const Vec3& origin, const Vec3& dir,
                                      const std::vector<Triangle>& mesh, double tmin,
                                      double tmax) {
  std::optional<RayHit> best;
  for (size_t i = 0; i < mesh.size(); ++i) {
    if (auto t = ray_triangle(origin, dir, mesh[i], tmin, tmax)) {
      if (!best || *t < best->t) best = RayHit{*t, static_cast<int>(i), origin + dir * (*t)};
    }
  }
  return best;
}

inline bool segment_occluded(const Vec3& a, const Vec3& b, const std::vector<Triangle>& mesh,
                             int skip_triangle, double eps) {
  const Vec3 d = b - a;
  const double len = norm(d);
  if (len < eps) return false;
  const Vec3 dir = d / len;
  for (size_t i = 0; i < mesh.size(); ++i) {
    if (static_cast<int>(i) == skip_triangle) continue;
    if (ray_triangle(a, dir, mesh[i], eps, len - eps)) return true;
  }
  return false;
}

inline std::optional<std::pair<double, double>> segment_sphere(const Vec3& p, const Vec3& dir,
                                                               double len, const Vec3& center,
                                                               double radius) {
  const Vec3 m = p - center;
  const double b = dot(m, dir);
  const double c = dot(m, m) - radius * radius;
  const double disc = b * b - c;
  if (disc < 0.0) return std::nullopt;
  const double sq = std::sqrt(disc);
  double t0 = -b - sq;
  double t1 = -b + sq;
  if (t1 <= 0.0 || t0 >= len) return std::nullopt;
  return std::make_pair(std::max(t0, 0.0), std::min(t1, len));
}

inline bool point_in_union(const Vec3& p, const std::vector<Aabb>& boxes, double eps) {
  for (const auto& b : boxes)
    if (b.contains(p, eps)) return true;
  return false;
}

}  // namespace echoplace
