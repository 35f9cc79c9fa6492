#pragma once

// Anchor-free label assignment over a feature-map grid. Every grid cell
// center is an anchor; an anchor is active for a ground-truth triangle when
// it lies inside the triangle or within a tolerance eta of it, giving the
// one-to-many assignment that NMS later collapses.

#include <cstddef>
#include <vector>

#include "pgram/error.hpp"
#include "pgram/geometry.hpp"

namespace pgram {

struct AnchorGrid {
  int width = 0;    // cells
  int height = 0;   // cells
  double stride = 0.0;         // px per cell
  double origin_offset = 0.0;  // px, anchors sit at cell centers

  int size() const { return width * height; }
  bool contains(int anchor_index) const { return anchor_index >= 0 && anchor_index < size(); }

  // Row-major: index = row * width + col.
  Point2 anchor_position(int anchor_index) const {
    const int col = anchor_index % width;
    const int row = anchor_index / width;
    return {col * stride + origin_offset, row * stride + origin_offset};
  }
};

// Maximum distance outside a ground-truth triangle at which an anchor still
// receives that triangle as a regression target.
struct ToleranceEta {
  double eta = 0.0;  // px, in input-image pixels
};

// Conventional default: scale the tolerance with the feature stride.
inline ToleranceEta default_eta(double stride) { return {1.5 * stride}; }

struct Assignment {
  int anchor_index = 0;
  int gt_index = 0;
};

// Offset targets whose decode reproduces the ground-truth triangle exactly.
struct TrainingTarget {
  int anchor_index = 0;
  int gt_index = 0;
  Vec2 v1, v2, v3;  // p0 - a, p1 - a, p2 - a
};

// Grid covering ceil(dim / stride) cells per axis, anchors at
// ((i + 0.5) * stride, (j + 0.5) * stride). Throws InvalidConfig for
// non-positive inputs.
AnchorGrid build_anchor_grid(double image_w, double image_h, double stride);

// Anchor a is active for gt T iff distance_to_triangle(a, T) <= eta. An
// anchor inside several triangles goes to the nearest one (then the lowest
// gt index); one gt keeps all its anchors. Output sorted by
// (gt_index, anchor_index).
std::vector<Assignment> assign_anchors(const AnchorGrid& grid,
                                       const std::vector<Triangle25>& gts,
                                       ToleranceEta tol);

std::vector<TrainingTarget> build_training_targets(const std::vector<Assignment>& assignments,
                                                   const AnchorGrid& grid,
                                                   const std::vector<Triangle25>& gts);

}  // namespace pgram
