#pragma once

// Decoding of raw per-anchor network outputs into detections, confidence
// filtering, and NMS. The deployed NMS approximates parallelogram IoU with
// the IoU of axis-aligned bounding rectangles; exact NMS and a benchmark
// quantifying the approximation error and speedup are kept alongside it.

#include <cstddef>
#include <vector>

#include "pgram/assignment.hpp"
#include "pgram/error.hpp"
#include "pgram/geometry.hpp"

namespace pgram {

struct IndexOutOfGrid : Error {
  using Error::Error;
};

// Network-output stand-in for one anchor: three offset vectors plus
// per-class confidences.
struct RawPrediction {
  int anchor_index = 0;
  Vec2 v1, v2, v3;
  std::vector<double> class_scores;
};

struct Detection {
  Parallelogram footprint;
  int class_id = 0;
  double confidence = 0.0;
};

// An annotated footprint.
struct GroundTruthLabel {
  Parallelogram footprint;
  int class_id = 0;
};

struct NmsReport {
  std::size_t kept_exact = 0;
  std::size_t kept_approx = 0;
  // Mean |exact_iou - aabb_iou| over all suppression-candidate pairs
  // examined by the exact pass.
  double mean_abs_iou_discrepancy = 0.0;
  double exact_time = 0.0;   // seconds, median over repetitions
  double approx_time = 0.0;  // seconds, median over repetitions
  // 1 - |kept_exact CAP kept_approx| / |kept_exact CUP kept_approx|.
  double kept_set_disagreement = 0.0;
  std::size_t pairs_examined = 0;
};

// p0 = a + v1, p1 = a + v2, p2 = a + v3 for anchor position a. Throws
// IndexOutOfGrid.
Triangle25 decode(const RawPrediction& raw, const AnchorGrid& grid);

// Decodes all raw predictions into detections: argmax class score decides
// class and confidence, the triangle is reconstructed into a parallelogram.
// Degenerate decoded triangles (area < eps_area) are dropped and counted in
// *dropped_degenerate, not treated as errors.
std::vector<Detection> decode_detections(const std::vector<RawPrediction>& raws,
                                         const AnchorGrid& grid,
                                         double eps_area = kEpsArea,
                                         std::size_t* dropped_degenerate = nullptr);

// Keeps detections whose confidence is >= threshold (closed inequality).
std::vector<Detection> filter_confidence(const std::vector<Detection>& dets, double threshold);

constexpr double kDefaultConfidenceThreshold = 0.1;
constexpr double kDefaultNmsIou = 0.5;

// Greedy class-aware NMS, highest confidence first; the suppression test
// uses the IoU of the footprints' axis-aligned bounding rectangles.
std::vector<Detection> approx_nms(const std::vector<Detection>& dets, double iou_threshold);

// Same greedy pass with exact parallelogram IoU.
std::vector<Detection> exact_nms(const std::vector<Detection>& dets, double iou_threshold);

// Runs both NMS variants single-threaded, timing each as the median over
// `repetitions` runs after two warm-ups, and measures the IoU approximation
// error over the pairs the exact pass examines. Requires |dets| >= 2.
NmsReport nms_benchmark(const std::vector<Detection>& dets, double iou_threshold,
                        int repetitions = 11);

}  // namespace pgram
