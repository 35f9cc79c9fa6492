#pragma once

// File formats: JSONL records (one JSON object per line) for labels,
// detections, raw predictions, 3D boxes and L-shape annotations, plus the
// key=value run configuration format. All readers validate eagerly and
// report the offending line number. Field layout is documented with
// examples in docs/FORMATS.md.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pgram/codec.hpp"
#include "pgram/datagen.hpp"
#include "pgram/error.hpp"
#include "pgram/geometry.hpp"
#include "pgram/metrics.hpp"

namespace pgram {

struct ParseError : Error {
  using Error::Error;
};

// Parallelogram invariant tolerance applied when loading label/detection
// records.
constexpr double kLoadInvariantTol = 1e-6;  // px

struct LabelRecord {
  std::string image_id;
  int class_id = 0;
  Parallelogram footprint;
};

struct DetectionRecord {
  std::string image_id;
  int class_id = 0;
  double confidence = 0.0;
  Parallelogram footprint;
};

struct RawPredictionRecord {
  std::string image_id;
  RawPrediction raw;
};

struct Box3DRecord {
  std::string image_id;
  int class_id = 0;
  Box3D box;  // yaw stored in degrees on disk, radians in memory
};

struct LShapeRecord {
  std::string image_id;
  int class_id = 0;
  Point2 pa, pb, pc;  // pb is the L-vertex shared by the two visible edges
};

std::vector<LabelRecord> read_labels(const std::filesystem::path& path);
void write_labels(const std::filesystem::path& path, const std::vector<LabelRecord>& records);

std::vector<DetectionRecord> read_detections(const std::filesystem::path& path);
void write_detections(const std::filesystem::path& path,
                      const std::vector<DetectionRecord>& records);

std::vector<RawPredictionRecord> read_raw_predictions(const std::filesystem::path& path);
void write_raw_predictions(const std::filesystem::path& path,
                           const std::vector<RawPredictionRecord>& records);

std::vector<Box3DRecord> read_boxes3d(const std::filesystem::path& path);
void write_boxes3d(const std::filesystem::path& path, const std::vector<Box3DRecord>& records);

std::vector<LShapeRecord> read_lshapes(const std::filesystem::path& path);
void write_lshapes(const std::filesystem::path& path, const std::vector<LShapeRecord>& records);

// Groups detections and labels into per-image samples. Image order follows
// first appearance in the label file, then in the prediction file, so
// output is deterministic.
std::vector<ImageSample> group_by_image(const std::vector<DetectionRecord>& preds,
                                        const std::vector<LabelRecord>& labels);

// key = value configuration, '#' comments. Unknown keys are an error at the
// consumer, caught through the typed getters' `touch` bookkeeping.
class Config {
 public:
  static Config load(const std::filesystem::path& path);
  static Config from_string(const std::string& text);

  double get_double(const std::string& key, double fallback) const;
  int get_int(const std::string& key, int fallback) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;

  // Keys present in the file but never read by any getter.
  std::vector<std::string> unused_keys() const;

 private:
  std::map<std::string, std::string> values_;
  mutable std::map<std::string, bool> used_;
};

}  // namespace pgram
