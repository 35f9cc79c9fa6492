#pragma once

// Evaluation of detections against annotated footprints: greedy IoU > 0.5
// matching, precision/recall, mAP@50, average IoU over matched pairs (AIoU)
// and mean absolute orientation error (mAOE) between the front-to-rear axes.

#include <optional>
#include <string>
#include <vector>

#include "pgram/codec.hpp"
#include "pgram/error.hpp"
#include "pgram/geometry.hpp"

namespace pgram {

struct DegenerateOrientation : Error {
  using Error::Error;
};

struct MatchedPair {
  int pred_index = 0;
  int gt_index = 0;
  double iou = 0.0;  // always > 0.5 by the matching rule
};

struct MatchSet {
  std::vector<MatchedPair> pairs;
  std::vector<int> unmatched_preds;  // false positives
  std::vector<int> unmatched_gts;    // false negatives

  std::size_t tp() const { return pairs.size(); }
  std::size_t fp() const { return unmatched_preds.size(); }
  std::size_t fn() const { return unmatched_gts.size(); }
};

// Midpoints of the front edge (p1, p2) and rear edge (p3, p4); the segment
// between them is the orientation axis.
struct OrientedMidpoints {
  Point2 front_mid, rear_mid;
};

struct ImageSample {
  std::string image_id;
  std::vector<Detection> detections;
  std::vector<GroundTruthLabel> labels;
};

struct EvalReport {
  double precision = 0.0;
  double recall = 0.0;
  double map50 = 0.0;
  std::optional<double> aiou;  // absent when no pair matched
  std::optional<double> maoe;  // degrees, absent when no pair matched
  long tp = 0, fp = 0, fn = 0;
  long images = 0;
};

// Greedy per-image matching in descending prediction confidence; each
// prediction takes the unmatched same-class gt with the highest exact IoU,
// accepted iff IoU > 0.5 (strict).
MatchSet match_detections(const std::vector<Detection>& preds,
                          const std::vector<GroundTruthLabel>& gts);

// P := 1 with no predictions; R := 1 with no ground truths.
std::pair<double, double> precision_recall(const MatchSet& ms);

// Dataset-level AP at IoU 0.5 for one class: global confidence sweep,
// all-points interpolation of the precision envelope.
double average_precision_50(const std::vector<ImageSample>& data, int class_id);

// Mean AP over the classes that have at least one ground truth.
double map50(const std::vector<ImageSample>& data);

std::optional<double> aiou(const MatchSet& ms);

OrientedMidpoints oriented_midpoints(const Parallelogram& par);

// Slope angle of the front-to-rear axis in degrees, range (-90, 90]; a
// vertical axis yields exactly 90. Throws DegenerateOrientation when the
// midpoints coincide.
double axis_angle_deg(const Parallelogram& par);

// |angle difference| folded to [0, 90] degrees so the metric treats the
// axis as an undirected line and stays continuous near vertical.
double absolute_orientation_error(const Parallelogram& pred, const Parallelogram& gt);

// The raw |difference| of the two (-90, 90] angles, range [0, 180); kept
// for strict-formula comparison.
double absolute_orientation_error_unfolded(const Parallelogram& pred, const Parallelogram& gt);

std::optional<double> maoe(const MatchSet& ms, const std::vector<Detection>& preds,
                           const std::vector<GroundTruthLabel>& gts);

// Full per-dataset evaluation; per-image matching runs on `workers` threads
// (0 picks the hardware default), aggregation is deterministic.
EvalReport evaluate_dataset(const std::vector<ImageSample>& data, unsigned workers = 0);

}  // namespace pgram
