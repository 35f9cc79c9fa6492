#include "pgram/codec.hpp"

#include <algorithm>
#include <chrono>
#include <numeric>
#include <string>

namespace pgram {

namespace {

// Indices sorted by confidence descending; stable so equal confidences keep
// input order.
std::vector<std::size_t> confidence_order(const std::vector<Detection>& dets) {
  std::vector<std::size_t> order(dets.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return dets[a].confidence > dets[b].confidence;
  });
  return order;
}

template <typename IouFn>
std::vector<std::size_t> greedy_keep(const std::vector<Detection>& dets, double iou_threshold,
                                     IouFn&& iou) {
  std::vector<std::size_t> kept;
  for (std::size_t idx : confidence_order(dets)) {
    bool suppressed = false;
    for (std::size_t k : kept) {
      if (dets[k].class_id == dets[idx].class_id && iou(k, idx) >= iou_threshold) {
        suppressed = true;
        break;
      }
    }
    if (!suppressed) kept.push_back(idx);
  }
  return kept;
}

std::vector<Detection> take(const std::vector<Detection>& dets,
                            const std::vector<std::size_t>& indices) {
  std::vector<Detection> out;
  out.reserve(indices.size());
  for (std::size_t i : indices) out.push_back(dets[i]);
  return out;
}

std::vector<std::size_t> exact_keep(const std::vector<Detection>& dets, double iou_threshold) {
  return greedy_keep(dets, iou_threshold, [&](std::size_t a, std::size_t b) {
    return exact_iou(dets[a].footprint, dets[b].footprint);
  });
}

std::vector<std::size_t> approx_keep(const std::vector<Detection>& dets, double iou_threshold) {
  std::vector<Rect> boxes;
  boxes.reserve(dets.size());
  for (const Detection& d : dets) boxes.push_back(aabb(d.footprint));
  return greedy_keep(dets, iou_threshold,
                     [&](std::size_t a, std::size_t b) { return aabb_iou(boxes[a], boxes[b]); });
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

Triangle25 decode(const RawPrediction& raw, const AnchorGrid& grid) {
  if (!grid.contains(raw.anchor_index)) {
    throw IndexOutOfGrid("anchor index " + std::to_string(raw.anchor_index) +
                         " outside grid of size " + std::to_string(grid.size()));
  }
  const Point2 a = grid.anchor_position(raw.anchor_index);
  return Triangle25{a + raw.v1, a + raw.v2, a + raw.v3};
}

std::vector<Detection> decode_detections(const std::vector<RawPrediction>& raws,
                                         const AnchorGrid& grid, double eps_area,
                                         std::size_t* dropped_degenerate) {
  std::vector<Detection> out;
  out.reserve(raws.size());
  std::size_t dropped = 0;
  for (const RawPrediction& raw : raws) {
    const Triangle25 tri = decode(raw, grid);
    if (tri.degenerate(eps_area)) {
      ++dropped;
      continue;
    }
    const auto best = std::max_element(raw.class_scores.begin(), raw.class_scores.end());
    if (best == raw.class_scores.end()) {
      ++dropped;
      continue;
    }
    Detection det;
    det.footprint = reconstruct_parallelogram(tri, 0.0);
    det.class_id = static_cast<int>(best - raw.class_scores.begin());
    det.confidence = *best;
    out.push_back(std::move(det));
  }
  if (dropped_degenerate) *dropped_degenerate = dropped;
  return out;
}

std::vector<Detection> filter_confidence(const std::vector<Detection>& dets, double threshold) {
  std::vector<Detection> out;
  out.reserve(dets.size());
  for (const Detection& d : dets) {
    if (d.confidence >= threshold) out.push_back(d);
  }
  return out;
}

std::vector<Detection> approx_nms(const std::vector<Detection>& dets, double iou_threshold) {
  return take(dets, approx_keep(dets, iou_threshold));
}

std::vector<Detection> exact_nms(const std::vector<Detection>& dets, double iou_threshold) {
  return take(dets, exact_keep(dets, iou_threshold));
}

NmsReport nms_benchmark(const std::vector<Detection>& dets, double iou_threshold,
                        int repetitions) {
  if (dets.size() < 2) {
    throw InvalidConfig("nms_benchmark requires at least 2 detections");
  }
  repetitions = std::max(repetitions, 1);

  using clock = std::chrono::steady_clock;
  auto timed = [&](auto&& fn) {
    const auto start = clock::now();
    auto result = fn();
    const auto stop = clock::now();
    return std::pair{std::chrono::duration<double>(stop - start).count(), std::move(result)};
  };

  NmsReport report;

  for (int i = 0; i < 2; ++i) {
    (void)exact_keep(dets, iou_threshold);
    (void)approx_keep(dets, iou_threshold);
  }

  std::vector<double> exact_times, approx_times;
  std::vector<std::size_t> kept_exact, kept_approx;
  for (int i = 0; i < repetitions; ++i) {
    auto [te, ke] = timed([&] { return exact_keep(dets, iou_threshold); });
    auto [ta, ka] = timed([&] { return approx_keep(dets, iou_threshold); });
    exact_times.push_back(te);
    approx_times.push_back(ta);
    kept_exact = std::move(ke);
    kept_approx = std::move(ka);
  }
  report.exact_time = median(exact_times);
  report.approx_time = median(approx_times);
  report.kept_exact = kept_exact.size();
  report.kept_approx = kept_approx.size();

  // Instrumented exact pass: every pair it examines also gets the AABB IoU.
  std::vector<Rect> boxes;
  boxes.reserve(dets.size());
  for (const Detection& d : dets) boxes.push_back(aabb(d.footprint));
  double discrepancy_sum = 0.0;
  std::size_t pairs = 0;
  (void)greedy_keep(dets, iou_threshold, [&](std::size_t a, std::size_t b) {
    const double exact = exact_iou(dets[a].footprint, dets[b].footprint);
    discrepancy_sum += std::abs(exact - aabb_iou(boxes[a], boxes[b]));
    ++pairs;
    return exact;
  });
  report.pairs_examined = pairs;
  report.mean_abs_iou_discrepancy = pairs > 0 ? discrepancy_sum / static_cast<double>(pairs) : 0.0;

  std::sort(kept_exact.begin(), kept_exact.end());
  std::sort(kept_approx.begin(), kept_approx.end());
  std::vector<std::size_t> both;
  std::set_intersection(kept_exact.begin(), kept_exact.end(), kept_approx.begin(),
                        kept_approx.end(), std::back_inserter(both));
  const std::size_t uni = kept_exact.size() + kept_approx.size() - both.size();
  report.kept_set_disagreement =
      uni == 0 ? 0.0 : 1.0 - static_cast<double>(both.size()) / static_cast<double>(uni);
  return report;
}

}  // namespace pgram
