#include "pgram/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <set>

#include "pgram/parallel.hpp"

namespace pgram {

namespace {

constexpr double kMatchIou = 0.5;
constexpr double kAxisLengthTol = 1e-9;  // px

std::vector<std::size_t> confidence_order(const std::vector<Detection>& preds) {
  std::vector<std::size_t> order(preds.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return preds[a].confidence > preds[b].confidence;
  });
  return order;
}

}  // namespace

MatchSet match_detections(const std::vector<Detection>& preds,
                          const std::vector<GroundTruthLabel>& gts) {
  MatchSet ms;
  std::vector<bool> gt_taken(gts.size(), false);

  for (std::size_t p : confidence_order(preds)) {
    int best_gt = -1;
    double best_iou = 0.0;
    for (std::size_t g = 0; g < gts.size(); ++g) {
      if (gt_taken[g] || gts[g].class_id != preds[p].class_id) continue;
      const double iou = exact_iou(preds[p].footprint, gts[g].footprint);
      if (iou > best_iou) {
        best_iou = iou;
        best_gt = static_cast<int>(g);
      }
    }
    if (best_gt >= 0 && best_iou > kMatchIou) {
      gt_taken[static_cast<std::size_t>(best_gt)] = true;
      ms.pairs.push_back({static_cast<int>(p), best_gt, best_iou});
    } else {
      ms.unmatched_preds.push_back(static_cast<int>(p));
    }
  }
  for (std::size_t g = 0; g < gts.size(); ++g) {
    if (!gt_taken[g]) ms.unmatched_gts.push_back(static_cast<int>(g));
  }
  std::sort(ms.unmatched_preds.begin(), ms.unmatched_preds.end());
  return ms;
}

std::pair<double, double> precision_recall(const MatchSet& ms) {
  const double tp = static_cast<double>(ms.tp());
  const double precision = ms.tp() + ms.fp() == 0 ? 1.0 : tp / static_cast<double>(ms.tp() + ms.fp());
  const double recall = ms.tp() + ms.fn() == 0 ? 1.0 : tp / static_cast<double>(ms.tp() + ms.fn());
  return {precision, recall};
}

double average_precision_50(const std::vector<ImageSample>& data, int class_id) {
  std::size_t n_gt = 0;
  for (const ImageSample& img : data) {
    for (const GroundTruthLabel& gt : img.labels) {
      if (gt.class_id == class_id) ++n_gt;
    }
  }
  if (n_gt == 0) return 0.0;

  struct Entry {
    double confidence;
    std::size_t image, det;
  };
  std::vector<Entry> entries;
  for (std::size_t i = 0; i < data.size(); ++i) {
    for (std::size_t d = 0; d < data[i].detections.size(); ++d) {
      if (data[i].detections[d].class_id == class_id) {
        entries.push_back({data[i].detections[d].confidence, i, d});
      }
    }
  }
  std::stable_sort(entries.begin(), entries.end(),
                   [](const Entry& a, const Entry& b) { return a.confidence > b.confidence; });

  std::vector<std::vector<bool>> gt_taken(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) gt_taken[i].assign(data[i].labels.size(), false);

  std::vector<double> precision, recall;
  std::size_t tp = 0;
  for (std::size_t rank = 0; rank < entries.size(); ++rank) {
    const Entry& e = entries[rank];
    const Detection& det = data[e.image].detections[e.det];
    const auto& labels = data[e.image].labels;
    int best_gt = -1;
    double best_iou = 0.0;
    for (std::size_t g = 0; g < labels.size(); ++g) {
      if (gt_taken[e.image][g] || labels[g].class_id != class_id) continue;
      const double iou = exact_iou(det.footprint, labels[g].footprint);
      if (iou > best_iou) {
        best_iou = iou;
        best_gt = static_cast<int>(g);
      }
    }
    if (best_gt >= 0 && best_iou > kMatchIou) {
      gt_taken[e.image][static_cast<std::size_t>(best_gt)] = true;
      ++tp;
    }
    precision.push_back(static_cast<double>(tp) / static_cast<double>(rank + 1));
    recall.push_back(static_cast<double>(tp) / static_cast<double>(n_gt));
  }

  // Precision envelope, integrated over recall (all-points interpolation).
  double envelope = 0.0;
  double ap = 0.0;
  for (std::size_t i = precision.size(); i-- > 0;) {
    envelope = std::max(envelope, precision[i]);
    const double r_prev = i == 0 ? 0.0 : recall[i - 1];
    ap += (recall[i] - r_prev) * envelope;
  }
  return ap;
}

double map50(const std::vector<ImageSample>& data) {
  std::set<int> classes;
  bool any_pred = false;
  for (const ImageSample& img : data) {
    for (const GroundTruthLabel& gt : img.labels) classes.insert(gt.class_id);
    any_pred = any_pred || !img.detections.empty();
  }
  if (classes.empty()) {
    // Vacuous dataset: perfect when nothing was predicted either.
    return any_pred ? 0.0 : 1.0;
  }
  double sum = 0.0;
  for (int c : classes) sum += average_precision_50(data, c);
  return sum / static_cast<double>(classes.size());
}

std::optional<double> aiou(const MatchSet& ms) {
  if (ms.pairs.empty()) return std::nullopt;
  double sum = 0.0;
  for (const MatchedPair& pr : ms.pairs) sum += pr.iou;
  return sum / static_cast<double>(ms.pairs.size());
}

OrientedMidpoints oriented_midpoints(const Parallelogram& par) {
  return {0.5 * (par.vertices[0] + par.vertices[1]),
          0.5 * (par.vertices[2] + par.vertices[3])};
}

double axis_angle_deg(const Parallelogram& par) {
  const OrientedMidpoints mids = oriented_midpoints(par);
  const Vec2 axis = mids.rear_mid - mids.front_mid;
  if (norm(axis) < kAxisLengthTol) {
    throw DegenerateOrientation("front and rear edge midpoints coincide");
  }
  // atan2 keeps a vertical axis well-defined; map the direction angle into
  // the slope-angle range (-90, 90].
  double deg = std::atan2(axis.y, axis.x) * 180.0 / std::numbers::pi;
  if (deg > 90.0) deg -= 180.0;
  if (deg <= -90.0) deg += 180.0;
  return deg;
}

double absolute_orientation_error_unfolded(const Parallelogram& pred, const Parallelogram& gt) {
  return std::abs(axis_angle_deg(pred) - axis_angle_deg(gt));
}

double absolute_orientation_error(const Parallelogram& pred, const Parallelogram& gt) {
  const double diff = absolute_orientation_error_unfolded(pred, gt);
  return diff > 90.0 ? 180.0 - diff : diff;
}

std::optional<double> maoe(const MatchSet& ms, const std::vector<Detection>& preds,
                           const std::vector<GroundTruthLabel>& gts) {
  if (ms.pairs.empty()) return std::nullopt;
  double sum = 0.0;
  for (const MatchedPair& pr : ms.pairs) {
    sum += absolute_orientation_error(preds[static_cast<std::size_t>(pr.pred_index)].footprint,
                                      gts[static_cast<std::size_t>(pr.gt_index)].footprint);
  }
  return sum / static_cast<double>(ms.pairs.size());
}

EvalReport evaluate_dataset(const std::vector<ImageSample>& data, unsigned workers) {
  std::vector<MatchSet> matches(data.size());
  parallel_for_index(data.size(), workers,
                     [&](std::size_t i) { matches[i] = match_detections(data[i].detections, data[i].labels); });

  EvalReport report;
  report.images = static_cast<long>(data.size());
  double iou_sum = 0.0, aoe_sum = 0.0;
  std::size_t n_pairs = 0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const MatchSet& ms = matches[i];
    report.tp += static_cast<long>(ms.tp());
    report.fp += static_cast<long>(ms.fp());
    report.fn += static_cast<long>(ms.fn());
    for (const MatchedPair& pr : ms.pairs) {
      iou_sum += pr.iou;
      aoe_sum += absolute_orientation_error(
          data[i].detections[static_cast<std::size_t>(pr.pred_index)].footprint,
          data[i].labels[static_cast<std::size_t>(pr.gt_index)].footprint);
      ++n_pairs;
    }
  }
  report.precision =
      report.tp + report.fp == 0 ? 1.0 : static_cast<double>(report.tp) / static_cast<double>(report.tp + report.fp);
  report.recall =
      report.tp + report.fn == 0 ? 1.0 : static_cast<double>(report.tp) / static_cast<double>(report.tp + report.fn);
  report.map50 = map50(data);
  if (n_pairs > 0) {
    report.aiou = iou_sum / static_cast<double>(n_pairs);
    report.maoe = aoe_sum / static_cast<double>(n_pairs);
  }
  return report;
}

}  // namespace pgram
