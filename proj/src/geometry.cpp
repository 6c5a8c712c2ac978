#include "echoplace/geometry.hpp"

#include <algorithm>

namespace echoplace {

namespace {

bool axis_separates(const Vec3& axis, const Vec3& v0, const Vec3& v1, const Vec3& v2,
                    const Vec3& half) {
  const double p0 = dot(axis, v0);
  const double p1 = dot(axis, v1);
  const double p2 = dot(axis, v2);
  const double r = half.x * std::fabs(axis.x) + half.y * std::fabs(axis.y) +
                   half.z * std::fabs(axis.z);
  const double mn = std::min({p0, p1, p2});
  const double mx = std::max({p0, p1, p2});
  return mn > r || mx < -r;
}

}  // namespace

bool triangle_aabb_overlap(const Triangle& tri, const Aabb& box) {
  const Vec3 c = box.center();
  const Vec3 half = box.extent() * 0.5;
  const Vec3 v0 = tri.a - c, v1 = tri.b - c, v2 = tri.c - c;

  // Box face normals.
  for (int i = 0; i < 3; ++i) {
    const double mn = std::min({v0[i], v1[i], v2[i]});
    const double mx = std::max({v0[i], v1[i], v2[i]});
    if (mn > half[i] || mx < -half[i]) return false;
  }

  // Triangle plane.
  const Vec3 e0 = v1 - v0, e1 = v2 - v1, e2 = v0 - v2;
  const Vec3 n = cross(e0, e1);
  if (axis_separates(n, v0, v1, v2, half)) return false;

  // Nine cross-product axes.
  const Vec3 axes[3] = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
  for (const Vec3& a : axes)
    for (const Vec3& e : {e0, e1, e2}) {
      const Vec3 ax = cross(a, e);
      if (dot(ax, ax) < 1e-24) continue;
      if (axis_separates(ax, v0, v1, v2, half)) return false;
    }
  return true;
}

namespace {

Aabb intersect_boxes(const Aabb& a, const Aabb& b) {
  return {{std::max(a.min.x, b.min.x), std::max(a.min.y, b.min.y), std::max(a.min.z, b.min.z)},
          {std::min(a.max.x, b.max.x), std::min(a.max.y, b.max.y), std::min(a.max.z, b.max.z)}};
}

bool degenerate(const Aabb& b, double eps) {
  return b.max.x < b.min.x - eps || b.max.y < b.min.y - eps || b.max.z < b.min.z - eps;
}

// Subtract `cut` from `from`, appending the (up to 6) remaining slabs.
void subtract_box(const Aabb& from, const Aabb& cut, std::vector<Aabb>& out, double eps) {
  Aabb rest = from;
  for (int axis = 0; axis < 3; ++axis) {
    if (cut.min[axis] > rest.min[axis] + eps) {
      Aabb below = rest;
      below.max[axis] = std::min(rest.max[axis], cut.min[axis]);
      out.push_back(below);
      rest.min[axis] = cut.min[axis];
    }
    if (cut.max[axis] < rest.max[axis] - eps) {
      Aabb above = rest;
      above.min[axis] = std::max(rest.min[axis], cut.max[axis]);
      out.push_back(above);
      rest.max[axis] = cut.max[axis];
    }
  }
}

}  // namespace

bool box_in_union(const Aabb& inner, const std::vector<Aabb>& cover, double eps) {
  std::vector<Aabb> pending{inner};
  for (const Aabb& c : cover) {
    std::vector<Aabb> next;
    for (const Aabb& p : pending) {
      const Aabb isect = intersect_boxes(p, c);
      if (degenerate(isect, eps)) {
        next.push_back(p);
        continue;
      }
      subtract_box(p, isect, next, eps);
    }
    pending = std::move(next);
    if (pending.empty()) return true;
  }
  // Leftover slivers below tolerance count as covered.
  for (const Aabb& p : pending) {
    const Vec3 e = p.extent();
    if (std::max({e.x, e.y, e.z, 0.0}) > eps) return false;
  }
  return true;
}

}  // namespace echoplace
