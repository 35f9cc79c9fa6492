#include "pgram/toytrain.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "pgram/rng.hpp"

namespace pgram {

namespace {

Triangle25 decode_entry(const OffsetEntry& e, const AnchorGrid& grid) {
  const Point2 a = grid.anchor_position(e.anchor_index);
  return Triangle25{a + e.v1, a + e.v2, a + e.v3};
}

Triangle25 maybe_flipped(const Triangle25& t, bool flip) {
  return flip ? Triangle25{t.p0, t.p2, t.p1} : t;
}

// Mean distance between corresponding vertices, front pair matched by the
// cheaper bijective pairing so vertex order does not penalize.
double vertex_error(const Triangle25& pred, const Triangle25& gt) {
  const double direct = norm(pred.p1 - gt.p1) + norm(pred.p2 - gt.p2);
  const double swapped = norm(pred.p1 - gt.p2) + norm(pred.p2 - gt.p1);
  return (norm(pred.p0 - gt.p0) + std::min(direct, swapped)) / 3.0;
}

}  // namespace

TrainResult train_offsets(const std::vector<GroundTruthLabel>& labels, const AnchorGrid& grid,
                          ToleranceEta eta, const TrainConfig& cfg) {
  if (!(cfg.lr >= 0.0) || cfg.steps < 0 || cfg.flip_prob < 0.0 || cfg.flip_prob > 1.0) {
    throw InvalidConfig("train config requires lr >= 0, steps >= 0, flip_prob in [0,1]");
  }

  std::vector<Triangle25> gt_tris;
  gt_tris.reserve(labels.size());
  for (const GroundTruthLabel& label : labels) {
    gt_tris.push_back(triangle_from_parallelogram(label.footprint));
  }

  const auto assignments = assign_anchors(grid, gt_tris, eta);
  std::vector<std::size_t> anchors_per_gt(labels.size(), 0);
  for (const Assignment& a : assignments) ++anchors_per_gt[static_cast<std::size_t>(a.gt_index)];
  for (std::size_t g = 0; g < anchors_per_gt.size(); ++g) {
    if (anchors_per_gt[g] == 0) {
      throw NoActiveAnchors("label " + std::to_string(g) +
                            " has no active anchor; increase eta or shrink the stride");
    }
  }

  TrainResult result;
  result.table.entries.reserve(assignments.size());
  for (const Assignment& a : assignments) {
    result.table.entries.push_back({a.anchor_index, a.gt_index, {}, {}, {}});
  }

  Rng rng(cfg.seed);
  std::vector<bool> flips(labels.size(), false);
  result.trace.loss_per_step.reserve(static_cast<std::size_t>(cfg.steps));

  for (int step = 0; step < cfg.steps; ++step) {
    for (std::size_t g = 0; g < labels.size(); ++g) flips[g] = rng.bernoulli(cfg.flip_prob);

    double loss_sum = 0.0;
    for (OffsetEntry& e : result.table.entries) {
      const Triangle25 pred = decode_entry(e, grid);
      const Triangle25 gt =
          maybe_flipped(gt_tris[static_cast<std::size_t>(e.gt_index)], flips[static_cast<std::size_t>(e.gt_index)]);

      LossGradient grad;
      if (cfg.variant == LossVariant::chamfer_mse) {
        loss_sum += regression_loss(pred, gt, cfg.coord_scale).total;
        grad = regression_loss_grad(pred, gt, cfg.coord_scale);
      } else {
        loss_sum += ordered_mse_loss(pred, gt, cfg.coord_scale);
        grad = ordered_mse_grad(pred, gt, cfg.coord_scale);
      }
      e.v1 = e.v1 - cfg.lr * grad.d_p0;
      e.v2 = e.v2 - cfg.lr * grad.d_p1;
      e.v3 = e.v3 - cfg.lr * grad.d_p2;
    }
    result.trace.loss_per_step.push_back(loss_sum / static_cast<double>(result.table.entries.size()));
  }

  double error_sum = 0.0;
  result.trace.final_anchor_vertex_error.reserve(result.table.entries.size());
  for (const OffsetEntry& e : result.table.entries) {
    const double err = vertex_error(decode_entry(e, grid), gt_tris[static_cast<std::size_t>(e.gt_index)]);
    result.trace.final_anchor_vertex_error.push_back(err);
    error_sum += err;
  }
  result.trace.final_mean_vertex_error =
      result.table.entries.empty() ? 0.0 : error_sum / static_cast<double>(result.table.entries.size());
  result.trace.final_eval =
      decode_and_eval(result.table, grid, labels, cfg.confidence_threshold, cfg.nms_iou);
  return result;
}

double gradient_check(LossVariant variant, const Triangle25& pred, const Triangle25& gt,
                      double h) {
  auto loss_of = [&](const Triangle25& t) {
    return variant == LossVariant::chamfer_mse ? regression_loss(t, gt).total
                                               : ordered_mse_loss(t, gt);
  };
  const LossGradient analytic = variant == LossVariant::chamfer_mse
                                    ? regression_loss_grad(pred, gt)
                                    : ordered_mse_grad(pred, gt);
  const double analytic_flat[6] = {analytic.d_p0.x, analytic.d_p0.y, analytic.d_p1.x,
                                   analytic.d_p1.y, analytic.d_p2.x, analytic.d_p2.y};

  double worst = 0.0;
  for (int coord = 0; coord < 6; ++coord) {
    auto bump = [&](double delta) {
      Triangle25 t = pred;
      double* fields[6] = {&t.p0.x, &t.p0.y, &t.p1.x, &t.p1.y, &t.p2.x, &t.p2.y};
      *fields[coord] += delta;
      return loss_of(t);
    };
    const double numeric = (bump(h) - bump(-h)) / (2.0 * h);
    const double denom = std::max(std::abs(analytic_flat[coord]), std::abs(numeric));
    const double err = denom < 1e-12 ? std::abs(analytic_flat[coord] - numeric)
                                     : std::abs(analytic_flat[coord] - numeric) / denom;
    worst = std::max(worst, err);
  }
  return worst;
}

EvalReport decode_and_eval(const OffsetTable& table, const AnchorGrid& grid,
                           const std::vector<GroundTruthLabel>& labels,
                           double confidence_threshold, double nms_iou) {
  std::vector<RawPrediction> raws;
  raws.reserve(table.entries.size());
  for (const OffsetEntry& e : table.entries) {
    raws.push_back({e.anchor_index, e.v1, e.v2, e.v3, {1.0}});
  }
  std::size_t dropped = 0;
  const auto decoded = decode_detections(raws, grid, kEpsArea, &dropped);
  const auto filtered = filter_confidence(decoded, confidence_threshold);
  const auto kept = approx_nms(filtered, nms_iou);

  ImageSample sample;
  sample.image_id = "train";
  sample.detections = kept;
  sample.labels = labels;
  return evaluate_dataset({sample}, 1);
}

}  // namespace pgram
