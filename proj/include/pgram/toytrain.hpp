#pragma once

// Desk-scale gradient descent on per-anchor offset tables. There is no
// network: every active anchor owns its own (v1, v2, v3) parameters, so the
// loss landscape of the regression head is observed in isolation. Labels
// can randomly swap their front-vertex order each step, recreating the
// early-training condition where predictions and labels disagree on vertex
// order; the Chamfer-based loss must be indifferent to it, the ordered MSE
// baseline is not.

#include <cstdint>
#include <vector>

#include "pgram/assignment.hpp"
#include "pgram/codec.hpp"
#include "pgram/error.hpp"
#include "pgram/loss.hpp"
#include "pgram/metrics.hpp"

namespace pgram {

struct NoActiveAnchors : Error {
  using Error::Error;
};

enum class LossVariant { chamfer_mse, ordered_mse };

struct TrainConfig {
  LossVariant variant = LossVariant::chamfer_mse;
  double lr = 0.1;
  int steps = 500;
  double flip_prob = 0.0;  // P(label swaps p1/p2 in a given step)
  std::uint64_t seed = 1;
  double coord_scale = 1.0;
  double confidence_threshold = kDefaultConfidenceThreshold;
  double nms_iou = kDefaultNmsIou;
};

// Learnable offsets for one active anchor; confidence is fixed at 1.0.
struct OffsetEntry {
  int anchor_index = 0;
  int gt_index = 0;
  Vec2 v1, v2, v3;
};

struct OffsetTable {
  std::vector<OffsetEntry> entries;
};

struct TrainTrace {
  std::vector<double> loss_per_step;  // mean over active anchors, one per step
  std::vector<double> final_anchor_vertex_error;  // px, one per active anchor
  double final_mean_vertex_error = 0.0;           // px
  EvalReport final_eval;
};

struct TrainResult {
  TrainTrace trace;
  OffsetTable table;
};

// Plain gradient descent from zero offsets. Each anchor's parameters only
// appear in its own loss term, so the update is per-anchor; the reported
// per-step loss averages over active anchors. Throws NoActiveAnchors when
// some label has no anchor within eta.
TrainResult train_offsets(const std::vector<GroundTruthLabel>& labels, const AnchorGrid& grid,
                          ToleranceEta eta, const TrainConfig& cfg);

// Max relative deviation between the analytic gradient and central finite
// differences with step h over all six predicted coordinates. Falls back to
// absolute deviation when both gradients vanish.
double gradient_check(LossVariant variant, const Triangle25& pred, const Triangle25& gt,
                      double h);

// Decode all anchors in the table, confidence-filter, approx-NMS, evaluate
// against the labels.
EvalReport decode_and_eval(const OffsetTable& table, const AnchorGrid& grid,
                           const std::vector<GroundTruthLabel>& labels,
                           double confidence_threshold = kDefaultConfidenceThreshold,
                           double nms_iou = kDefaultNmsIou);

}  // namespace pgram
