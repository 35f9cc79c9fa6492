#pragma once

// Regression loss for triangle predictions: MSE on the center point plus
// Chamfer distance on the unordered front-vertex pair, and its analytic
// gradient. The ordered-MSE baseline (which penalizes vertex swaps) is kept
// for stability comparisons.

#include <span>

#include "pgram/error.hpp"
#include "pgram/geometry.hpp"

namespace pgram {

struct EmptySet : Error {
  using Error::Error;
};

struct RegressionLossValue {
  double total = 0.0;       // center_mse + chamfer, unweighted
  double center_mse = 0.0;
  double chamfer = 0.0;
};

// Partial derivatives of the loss w.r.t. the six predicted coordinates.
struct LossGradient {
  Vec2 d_p0, d_p1, d_p2;
};

// Symmetric Chamfer distance between point sets:
//   (1/|P|) sum_p min_q |p-q|^2 + (1/|Q|) sum_q min_p |q-p|^2.
// Throws EmptySet when either set is empty.
double chamfer_distance(std::span<const Point2> pred, std::span<const Point2> gt);

// Squared Euclidean distance, summed over coordinates (no 1/2, no averaging).
inline double center_mse(Point2 p0, Point2 gt_p0) { return squared_norm(p0 - gt_p0); }

// coord_scale multiplies all coordinates before the loss is computed; 1.0
// keeps the loss in absolute pixels.
RegressionLossValue regression_loss(const Triangle25& pred, const Triangle25& gt,
                                    double coord_scale = 1.0);

// Analytic gradient of regression_loss w.r.t. pred. At Chamfer ties
// (a predicted vertex equidistant to both ground-truth vertices) the
// gradient is routed through the cheaper bijective pairing, identity
// pairing on a full tie, yielding a deterministic subgradient.
LossGradient regression_loss_grad(const Triangle25& pred, const Triangle25& gt,
                                  double coord_scale = 1.0);

// Fixed-order baseline: |p0-g0|^2 + |p1-g1|^2 + |p2-g2|^2. Penalizes a
// (p1, p2) swap even though the resulting parallelogram is identical.
double ordered_mse_loss(const Triangle25& pred, const Triangle25& gt, double coord_scale = 1.0);

LossGradient ordered_mse_grad(const Triangle25& pred, const Triangle25& gt,
                              double coord_scale = 1.0);

// True when every nearest-neighbor decision inside the Chamfer term is
// separated by more than margin pixels. Gradient checks require tie-free
// samples.
bool chamfer_tie_free(const Triangle25& pred, const Triangle25& gt, double margin);

}  // namespace pgram
