#pragma once

// 2D geometry for ground-plane footprints.
//
// A vehicle footprint is a parallelogram in image space, represented either
// by its full vertex list or by the triangle (center, two front corners)
// that generates it by point reflection. Everything here is plain value
// types and pure functions; coordinates are unconstrained pixels (footprints
// may extend outside the image).

#include <array>
#include <cmath>
#include <vector>

#include "pgram/error.hpp"

namespace pgram {

constexpr double kEpsArea = 1e-9;    // px^2, degeneracy threshold
constexpr double kVertexTol = 1e-9;  // px, vertex de-duplication tolerance

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};
using Vec2 = Point2;

inline Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
inline Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
inline Point2 operator*(double s, Point2 p) { return {s * p.x, s * p.y}; }
inline double dot(Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point2 a, Point2 b) { return a.x * b.y - a.y * b.x; }
inline double squared_norm(Point2 p) { return p.x * p.x + p.y * p.y; }
inline double norm(Point2 p) { return std::sqrt(squared_norm(p)); }
inline bool is_finite(Point2 p) { return std::isfinite(p.x) && std::isfinite(p.y); }

struct DegenerateTriangle : Error {
  using Error::Error;
};

// Center p0 plus the two front corners p1, p2. The (p1, p2) pair carries no
// canonical order; every consumer must be invariant to swapping them.
struct Triangle25 {
  Point2 p0, p1, p2;

  double area() const { return 0.5 * std::abs(cross(p1 - p0, p2 - p0)); }
  bool degenerate(double eps_area = kEpsArea) const { return !(area() >= eps_area); }
};

// Vertices in boundary order (p1, p2, p3, p4) with p3 = 2*center - p1 and
// p4 = 2*center - p2; the center is stored redundantly so consumers never
// recompute it.
struct Parallelogram {
  std::array<Point2, 4> vertices{};
  Point2 center;

  double area() const;
};

struct Rect {
  Point2 min, max;

  double area() const { return (max.x - min.x) * (max.y - min.y); }
};

// Counter-clockwise vertex list; empty encodes a null intersection.
struct ConvexPolygon {
  std::vector<Point2> vertices;
};

// Mirrors p1 and p2 across p0 to produce the missing corners. Throws
// DegenerateTriangle when the triangle area falls below eps_area; callers
// that want to keep collapsed footprints pass eps_area = 0.
Parallelogram reconstruct_parallelogram(const Triangle25& tri, double eps_area = kEpsArea);

// Inverse of reconstruct_parallelogram: returns (center, vertices[0],
// vertices[1]). Which adjacent vertex pair comes back is unspecified by
// contract; only the vertex set is meaningful.
Triangle25 triangle_from_parallelogram(const Parallelogram& par);

// True when the stored vertices, in order, satisfy the reflection invariant
// within tol pixels and all coordinates are finite. Any vertex order that
// passes is automatically a simple (non self-intersecting) quadrilateral.
bool parallelogram_invariant_holds(const Parallelogram& par, double tol);

// Absolute polygon area; 0 for fewer than 3 vertices.
double shoelace_area(const ConvexPolygon& poly);

// Positive for counter-clockwise vertex order.
double signed_area(const ConvexPolygon& poly);

// The parallelogram boundary as a CCW polygon.
ConvexPolygon to_polygon(const Parallelogram& par);

// Sutherland-Hodgman clipping of a against b. Both inputs must be convex;
// orientation is normalized internally. Numerically repeated output
// vertices are merged within kVertexTol.
ConvexPolygon convex_intersection(const ConvexPolygon& a, const ConvexPolygon& b);

// area(a CAP b) / area(a CUP b); 0 when the union area is below kEpsArea.
double exact_iou(const Parallelogram& a, const Parallelogram& b);

// Axis-aligned bounding rectangle over the 4 vertices.
Rect aabb(const Parallelogram& par);

double aabb_iou(const Rect& a, const Rect& b);

// Closed-region test: boundary points count as inside.
bool point_in_triangle(const Point2& p, const Triangle25& tri);

// 0 when p is inside or on the boundary, else the minimum Euclidean
// distance to the three edges.
double distance_to_triangle(const Point2& p, const Triangle25& tri);

double point_segment_distance(const Point2& p, const Point2& a, const Point2& b);

}  // namespace pgram
