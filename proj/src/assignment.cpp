#include "pgram/assignment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace pgram {

AnchorGrid build_anchor_grid(double image_w, double image_h, double stride) {
  if (!(image_w > 0.0) || !(image_h > 0.0) || !(stride > 0.0)) {
    throw InvalidConfig("anchor grid requires positive image dimensions and stride");
  }
  AnchorGrid grid;
  grid.width = static_cast<int>(std::ceil(image_w / stride));
  grid.height = static_cast<int>(std::ceil(image_h / stride));
  grid.stride = stride;
  grid.origin_offset = 0.5 * stride;
  return grid;
}

std::vector<Assignment> assign_anchors(const AnchorGrid& grid,
                                       const std::vector<Triangle25>& gts,
                                       ToleranceEta tol) {
  std::vector<Assignment> out;
  if (gts.empty()) return out;

  for (int a = 0; a < grid.size(); ++a) {
    const Point2 anchor = grid.anchor_position(a);
    int best_gt = -1;
    double best_dist = std::numeric_limits<double>::infinity();
    for (std::size_t g = 0; g < gts.size(); ++g) {
      const double d = distance_to_triangle(anchor, gts[g]);
      if (d <= tol.eta && d < best_dist) {
        best_dist = d;
        best_gt = static_cast<int>(g);
      }
    }
    if (best_gt >= 0) {
      out.push_back({a, best_gt});
    }
  }

  std::sort(out.begin(), out.end(), [](const Assignment& a, const Assignment& b) {
    if (a.gt_index != b.gt_index) return a.gt_index < b.gt_index;
    return a.anchor_index < b.anchor_index;
  });
  return out;
}

std::vector<TrainingTarget> build_training_targets(const std::vector<Assignment>& assignments,
                                                   const AnchorGrid& grid,
                                                   const std::vector<Triangle25>& gts) {
  std::vector<TrainingTarget> targets;
  targets.reserve(assignments.size());
  for (const Assignment& asg : assignments) {
    const Point2 a = grid.anchor_position(asg.anchor_index);
    const Triangle25& t = gts.at(static_cast<std::size_t>(asg.gt_index));
    targets.push_back({asg.anchor_index, asg.gt_index, t.p0 - a, t.p1 - a, t.p2 - a});
  }
  return targets;
}

}  // namespace pgram
