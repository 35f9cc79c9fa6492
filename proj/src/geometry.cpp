#include "pgram/geometry.hpp"

#include <algorithm>
#include <string>

namespace pgram {

namespace {

void dedupe_vertices(std::vector<Point2>& pts, double tol) {
  std::vector<Point2> out;
  out.reserve(pts.size());
  for (const Point2& p : pts) {
    if (out.empty() || norm(p - out.back()) > tol) {
      out.push_back(p);
    }
  }
  while (out.size() > 1 && norm(out.front() - out.back()) <= tol) {
    out.pop_back();
  }
  pts.swap(out);
}

ConvexPolygon ccw(const ConvexPolygon& poly) {
  ConvexPolygon out = poly;
  if (signed_area(out) < 0.0) {
    std::reverse(out.vertices.begin(), out.vertices.end());
  }
  return out;
}

}  // namespace

double Parallelogram::area() const {
  // Shoelace over the 4 stored vertices.
  double twice = 0.0;
  for (int i = 0; i < 4; ++i) {
    twice += cross(vertices[i], vertices[(i + 1) % 4]);
  }
  return 0.5 * std::abs(twice);
}

Parallelogram reconstruct_parallelogram(const Triangle25& tri, double eps_area) {
  if (tri.area() < eps_area) {
    throw DegenerateTriangle("triangle area " + std::to_string(tri.area()) +
                             " px^2 below threshold " + std::to_string(eps_area));
  }
  const Point2 p3 = 2.0 * tri.p0 - tri.p1;
  const Point2 p4 = 2.0 * tri.p0 - tri.p2;
  return Parallelogram{{tri.p1, tri.p2, p3, p4}, tri.p0};
}

Triangle25 triangle_from_parallelogram(const Parallelogram& par) {
  return Triangle25{par.center, par.vertices[0], par.vertices[1]};
}

bool parallelogram_invariant_holds(const Parallelogram& par, double tol) {
  for (const Point2& v : par.vertices) {
    if (!is_finite(v)) return false;
  }
  if (!is_finite(par.center)) return false;
  const Point2 expect_p3 = 2.0 * par.center - par.vertices[0];
  const Point2 expect_p4 = 2.0 * par.center - par.vertices[1];
  return norm(par.vertices[2] - expect_p3) <= tol && norm(par.vertices[3] - expect_p4) <= tol;
}

double signed_area(const ConvexPolygon& poly) {
  const auto& v = poly.vertices;
  if (v.size() < 3) return 0.0;
  double twice = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    twice += cross(v[i], v[(i + 1) % v.size()]);
  }
  return 0.5 * twice;
}

double shoelace_area(const ConvexPolygon& poly) { return std::abs(signed_area(poly)); }

ConvexPolygon to_polygon(const Parallelogram& par) {
  ConvexPolygon poly;
  poly.vertices.assign(par.vertices.begin(), par.vertices.end());
  return ccw(poly);
}

ConvexPolygon convex_intersection(const ConvexPolygon& a, const ConvexPolygon& b) {
  if (a.vertices.size() < 3 || b.vertices.size() < 3) return {};
  const ConvexPolygon clip = ccw(b);
  std::vector<Point2> out = ccw(a).vertices;

  for (std::size_t i = 0; i < clip.vertices.size() && !out.empty(); ++i) {
    const Point2 c1 = clip.vertices[i];
    const Point2 c2 = clip.vertices[(i + 1) % clip.vertices.size()];
    const Vec2 edge = c2 - c1;

    std::vector<Point2> input;
    input.swap(out);
    for (std::size_t j = 0; j < input.size(); ++j) {
      const Point2 s = input[j];
      const Point2 e = input[(j + 1) % input.size()];
      // Left of (or on) the clip edge counts as inside; CCW clip polygon.
      const double ds = cross(edge, s - c1);
      const double de = cross(edge, e - c1);
      if (ds >= 0.0) out.push_back(s);
      if ((ds >= 0.0) != (de >= 0.0)) {
        const double t = ds / (ds - de);
        out.push_back(s + t * (e - s));
      }
    }
  }

  dedupe_vertices(out, kVertexTol);
  return {std::move(out)};
}

double exact_iou(const Parallelogram& a, const Parallelogram& b) {
  const double area_a = a.area();
  const double area_b = b.area();
  const double inter = shoelace_area(convex_intersection(to_polygon(a), to_polygon(b)));
  const double uni = area_a + area_b - inter;
  if (uni < kEpsArea) return 0.0;
  return std::clamp(inter / uni, 0.0, 1.0);
}

Rect aabb(const Parallelogram& par) {
  Rect r{par.vertices[0], par.vertices[0]};
  for (const Point2& v : par.vertices) {
    r.min.x = std::min(r.min.x, v.x);
    r.min.y = std::min(r.min.y, v.y);
    r.max.x = std::max(r.max.x, v.x);
    r.max.y = std::max(r.max.y, v.y);
  }
  return r;
}

double aabb_iou(const Rect& a, const Rect& b) {
  const double iw = std::min(a.max.x, b.max.x) - std::max(a.min.x, b.min.x);
  const double ih = std::min(a.max.y, b.max.y) - std::max(a.min.y, b.min.y);
  if (iw <= 0.0 || ih <= 0.0) return 0.0;
  const double inter = iw * ih;
  const double uni = a.area() + b.area() - inter;
  if (uni < kEpsArea) return 0.0;
  return std::clamp(inter / uni, 0.0, 1.0);
}

bool point_in_triangle(const Point2& p, const Triangle25& tri) {
  const double d0 = cross(tri.p1 - tri.p0, p - tri.p0);
  const double d1 = cross(tri.p2 - tri.p1, p - tri.p1);
  const double d2 = cross(tri.p0 - tri.p2, p - tri.p2);
  const bool has_neg = d0 < 0.0 || d1 < 0.0 || d2 < 0.0;
  const bool has_pos = d0 > 0.0 || d1 > 0.0 || d2 > 0.0;
  return !(has_neg && has_pos);
}

double point_segment_distance(const Point2& p, const Point2& a, const Point2& b) {
  const Vec2 ab = b - a;
  const double len2 = squared_norm(ab);
  if (len2 == 0.0) return norm(p - a);
  const double t = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
  return norm(p - (a + t * ab));
}

double distance_to_triangle(const Point2& p, const Triangle25& tri) {
  if (point_in_triangle(p, tri)) return 0.0;
  const double d0 = point_segment_distance(p, tri.p0, tri.p1);
  const double d1 = point_segment_distance(p, tri.p1, tri.p2);
  const double d2 = point_segment_distance(p, tri.p2, tri.p0);
  return std::min({d0, d1, d2});
}

}  // namespace pgram
