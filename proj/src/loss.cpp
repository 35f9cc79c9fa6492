#include "pgram/loss.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace pgram {

double chamfer_distance(std::span<const Point2> pred, std::span<const Point2> gt) {
  if (pred.empty() || gt.empty()) {
    throw EmptySet("chamfer_distance requires non-empty point sets");
  }
  auto min_sq = [](Point2 p, std::span<const Point2> set) {
    double best = std::numeric_limits<double>::infinity();
    for (const Point2& q : set) best = std::min(best, squared_norm(p - q));
    return best;
  };
  double forward = 0.0;
  for (const Point2& p : pred) forward += min_sq(p, gt);
  double backward = 0.0;
  for (const Point2& q : gt) backward += min_sq(q, pred);
  return forward / static_cast<double>(pred.size()) + backward / static_cast<double>(gt.size());
}

namespace {

struct ScaledPair {
  Triangle25 pred, gt;
};

ScaledPair scaled(const Triangle25& pred, const Triangle25& gt, double s) {
  return {Triangle25{s * pred.p0, s * pred.p1, s * pred.p2},
          Triangle25{s * gt.p0, s * gt.p1, s * gt.p2}};
}

}  // namespace

RegressionLossValue regression_loss(const Triangle25& pred, const Triangle25& gt,
                                    double coord_scale) {
  const auto [p, g] = scaled(pred, gt, coord_scale);
  const Point2 pv[] = {p.p1, p.p2};
  const Point2 gv[] = {g.p1, g.p2};
  RegressionLossValue v;
  v.center_mse = center_mse(p.p0, g.p0);
  v.chamfer = chamfer_distance(pv, gv);
  v.total = v.center_mse + v.chamfer;
  return v;
}

LossGradient regression_loss_grad(const Triangle25& pred, const Triangle25& gt,
                                  double coord_scale) {
  const auto [p, g] = scaled(pred, gt, coord_scale);

  LossGradient grad;
  grad.d_p0 = 2.0 * (p.p0 - g.p0);

  const double d11 = squared_norm(p.p1 - g.p1);
  const double d12 = squared_norm(p.p1 - g.p2);
  const double d21 = squared_norm(p.p2 - g.p1);
  const double d22 = squared_norm(p.p2 - g.p2);

  // Tie-break: prefer the bijective pairing with lower total cost, identity
  // pairing when both are equal.
  const bool prefer_identity = d11 + d22 <= d12 + d21;
  const Point2 q_for_p1 = d11 < d12 ? g.p1 : d12 < d11 ? g.p2 : prefer_identity ? g.p1 : g.p2;
  const Point2 q_for_p2 = d22 < d21 ? g.p2 : d21 < d22 ? g.p1 : prefer_identity ? g.p2 : g.p1;
  const bool g1_to_p1 = d11 < d21 || (d11 == d21 && prefer_identity);
  const bool g2_to_p1 = d12 < d22 || (d12 == d22 && !prefer_identity);

  // Forward term (1/|P|) * 2 * (p_i - argmin_q) with |P| = 2.
  grad.d_p1 = p.p1 - q_for_p1;
  grad.d_p2 = p.p2 - q_for_p2;
  // Backward term: each ground-truth vertex pulls on its nearest prediction.
  if (g1_to_p1) {
    grad.d_p1 = grad.d_p1 + (p.p1 - g.p1);
  } else {
    grad.d_p2 = grad.d_p2 + (p.p2 - g.p1);
  }
  if (g2_to_p1) {
    grad.d_p1 = grad.d_p1 + (p.p1 - g.p2);
  } else {
    grad.d_p2 = grad.d_p2 + (p.p2 - g.p2);
  }

  // Chain rule back to unscaled pixel coordinates.
  grad.d_p0 = coord_scale * grad.d_p0;
  grad.d_p1 = coord_scale * grad.d_p1;
  grad.d_p2 = coord_scale * grad.d_p2;
  return grad;
}

double ordered_mse_loss(const Triangle25& pred, const Triangle25& gt, double coord_scale) {
  const auto [p, g] = scaled(pred, gt, coord_scale);
  return squared_norm(p.p0 - g.p0) + squared_norm(p.p1 - g.p1) + squared_norm(p.p2 - g.p2);
}

LossGradient ordered_mse_grad(const Triangle25& pred, const Triangle25& gt, double coord_scale) {
  const auto [p, g] = scaled(pred, gt, coord_scale);
  LossGradient grad;
  grad.d_p0 = 2.0 * coord_scale * (p.p0 - g.p0);
  grad.d_p1 = 2.0 * coord_scale * (p.p1 - g.p1);
  grad.d_p2 = 2.0 * coord_scale * (p.p2 - g.p2);
  return grad;
}

bool chamfer_tie_free(const Triangle25& pred, const Triangle25& gt, double margin) {
  const double d11 = norm(pred.p1 - gt.p1);
  const double d12 = norm(pred.p1 - gt.p2);
  const double d21 = norm(pred.p2 - gt.p1);
  const double d22 = norm(pred.p2 - gt.p2);
  return std::abs(d11 - d12) > margin && std::abs(d21 - d22) > margin &&
         std::abs(d11 - d21) > margin && std::abs(d12 - d22) > margin;
}

}  // namespace pgram
