#include "pgram/io.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include <json.hpp>

namespace pgram {

namespace {

using json = nlohmann::ordered_json;

[[noreturn]] void fail(const std::filesystem::path& path, std::size_t line, const std::string& msg) {
  throw ParseError(path.string() + ":" + std::to_string(line) + ": " + msg);
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string() + " for reading");
  return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw ParseError("cannot open " + path.string() + " for writing");
  return out;
}

double get_finite(const json& j, const char* key, const std::filesystem::path& path,
                  std::size_t line) {
  if (!j.contains(key) || !j[key].is_number()) fail(path, line, std::string("missing numeric field '") + key + "'");
  const double v = j[key].get<double>();
  if (!std::isfinite(v)) fail(path, line, std::string("non-finite value in field '") + key + "'");
  return v;
}

Point2 get_point(const json& j, const std::filesystem::path& path, std::size_t line,
                 const char* what) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    fail(path, line, std::string(what) + " must be a [x, y] pair");
  }
  const Point2 p{j[0].get<double>(), j[1].get<double>()};
  if (!is_finite(p)) fail(path, line, std::string("non-finite coordinates in ") + what);
  return p;
}

json point_json(Point2 p) { return json::array({p.x, p.y}); }

Parallelogram get_footprint(const json& j, const std::filesystem::path& path, std::size_t line) {
  if (!j.contains("vertices") || !j["vertices"].is_array() || j["vertices"].size() != 4) {
    fail(path, line, "'vertices' must hold exactly 4 points");
  }
  Parallelogram par;
  for (std::size_t i = 0; i < 4; ++i) {
    par.vertices[i] = get_point(j["vertices"][i], path, line, "vertex");
  }
  if (!j.contains("center")) fail(path, line, "missing 'center'");
  par.center = get_point(j["center"], path, line, "center");
  if (!parallelogram_invariant_holds(par, kLoadInvariantTol)) {
    fail(path, line, "vertices do not form a parallelogram around the center (tolerance 1e-6 px)");
  }
  return par;
}

json footprint_json(const Parallelogram& par) {
  json j;
  j["vertices"] = json::array({point_json(par.vertices[0]), point_json(par.vertices[1]),
                               point_json(par.vertices[2]), point_json(par.vertices[3])});
  j["center"] = point_json(par.center);
  return j;
}

std::string get_image_id(const json& j, const std::filesystem::path& path, std::size_t line) {
  if (!j.contains("image_id") || !j["image_id"].is_string()) {
    fail(path, line, "missing string field 'image_id'");
  }
  return j["image_id"].get<std::string>();
}

int get_class_id(const json& j, const std::filesystem::path& path, std::size_t line) {
  if (!j.contains("class_id") || !j["class_id"].is_number_integer()) {
    fail(path, line, "missing integer field 'class_id'");
  }
  return j["class_id"].get<int>();
}

// Runs fn over every non-empty line; fn receives the parsed object.
template <typename Fn>
void for_each_record(const std::filesystem::path& path, Fn&& fn) {
  std::ifstream in = open_in(path);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      fail(path, line_no, std::string("invalid JSON: ") + e.what());
    }
    fn(j, line_no);
  }
}

}  // namespace

std::vector<LabelRecord> read_labels(const std::filesystem::path& path) {
  std::vector<LabelRecord> records;
  for_each_record(path, [&](const json& j, std::size_t line) {
    LabelRecord r;
    r.image_id = get_image_id(j, path, line);
    r.class_id = get_class_id(j, path, line);
    r.footprint = get_footprint(j, path, line);
    records.push_back(std::move(r));
  });
  return records;
}

void write_labels(const std::filesystem::path& path, const std::vector<LabelRecord>& records) {
  std::ofstream out = open_out(path);
  for (const LabelRecord& r : records) {
    json j;
    j["image_id"] = r.image_id;
    j["class_id"] = r.class_id;
    j.update(footprint_json(r.footprint));
    out << j.dump() << '\n';
  }
}

std::vector<DetectionRecord> read_detections(const std::filesystem::path& path) {
  std::vector<DetectionRecord> records;
  for_each_record(path, [&](const json& j, std::size_t line) {
    DetectionRecord r;
    r.image_id = get_image_id(j, path, line);
    r.class_id = get_class_id(j, path, line);
    r.confidence = get_finite(j, "confidence", path, line);
    if (r.confidence < 0.0 || r.confidence > 1.0) fail(path, line, "'confidence' outside [0, 1]");
    r.footprint = get_footprint(j, path, line);
    records.push_back(std::move(r));
  });
  return records;
}

void write_detections(const std::filesystem::path& path,
                      const std::vector<DetectionRecord>& records) {
  std::ofstream out = open_out(path);
  for (const DetectionRecord& r : records) {
    json j;
    j["image_id"] = r.image_id;
    j["class_id"] = r.class_id;
    j["confidence"] = r.confidence;
    j.update(footprint_json(r.footprint));
    out << j.dump() << '\n';
  }
}

std::vector<RawPredictionRecord> read_raw_predictions(const std::filesystem::path& path) {
  std::vector<RawPredictionRecord> records;
  for_each_record(path, [&](const json& j, std::size_t line) {
    RawPredictionRecord r;
    r.image_id = get_image_id(j, path, line);
    if (!j.contains("anchor_index") || !j["anchor_index"].is_number_integer()) {
      fail(path, line, "missing integer field 'anchor_index'");
    }
    r.raw.anchor_index = j["anchor_index"].get<int>();
    r.raw.v1 = get_point(j.contains("v1") ? j["v1"] : json(), path, line, "v1");
    r.raw.v2 = get_point(j.contains("v2") ? j["v2"] : json(), path, line, "v2");
    r.raw.v3 = get_point(j.contains("v3") ? j["v3"] : json(), path, line, "v3");
    if (!j.contains("class_scores") || !j["class_scores"].is_array() || j["class_scores"].empty()) {
      fail(path, line, "'class_scores' must be a non-empty array");
    }
    for (const auto& s : j["class_scores"]) {
      if (!s.is_number()) fail(path, line, "'class_scores' entries must be numbers");
      const double v = s.get<double>();
      if (!std::isfinite(v) || v < 0.0 || v > 1.0) fail(path, line, "class score outside [0, 1]");
      r.raw.class_scores.push_back(v);
    }
    records.push_back(std::move(r));
  });
  return records;
}

void write_raw_predictions(const std::filesystem::path& path,
                           const std::vector<RawPredictionRecord>& records) {
  std::ofstream out = open_out(path);
  for (const RawPredictionRecord& r : records) {
    json j;
    j["image_id"] = r.image_id;
    j["anchor_index"] = r.raw.anchor_index;
    j["v1"] = point_json(r.raw.v1);
    j["v2"] = point_json(r.raw.v2);
    j["v3"] = point_json(r.raw.v3);
    j["class_scores"] = r.raw.class_scores;
    out << j.dump() << '\n';
  }
}

std::vector<Box3DRecord> read_boxes3d(const std::filesystem::path& path) {
  std::vector<Box3DRecord> records;
  for_each_record(path, [&](const json& j, std::size_t line) {
    Box3DRecord r;
    r.image_id = get_image_id(j, path, line);
    r.class_id = get_class_id(j, path, line);
    if (!j.contains("center") || !j["center"].is_array() || j["center"].size() != 3) {
      fail(path, line, "'center' must be a [x, y, z] triple");
    }
    for (const auto& c : j["center"]) {
      if (!c.is_number() || !std::isfinite(c.get<double>())) fail(path, line, "non-finite box center");
    }
    r.box.center = {j["center"][0].get<double>(), j["center"][1].get<double>(),
                    j["center"][2].get<double>()};
    r.box.length = get_finite(j, "length", path, line);
    r.box.width = get_finite(j, "width", path, line);
    if (r.box.length <= 0.0 || r.box.width <= 0.0) fail(path, line, "box dimensions must be positive");
    // Angles are degrees on disk.
    r.box.yaw = get_finite(j, "yaw_deg", path, line) * std::numbers::pi / 180.0;
    records.push_back(std::move(r));
  });
  return records;
}

void write_boxes3d(const std::filesystem::path& path, const std::vector<Box3DRecord>& records) {
  std::ofstream out = open_out(path);
  for (const Box3DRecord& r : records) {
    json j;
    j["image_id"] = r.image_id;
    j["class_id"] = r.class_id;
    j["center"] = json::array({r.box.center.x, r.box.center.y, r.box.center.z});
    j["length"] = r.box.length;
    j["width"] = r.box.width;
    j["yaw_deg"] = r.box.yaw * 180.0 / std::numbers::pi;
    out << j.dump() << '\n';
  }
}

std::vector<LShapeRecord> read_lshapes(const std::filesystem::path& path) {
  std::vector<LShapeRecord> records;
  for_each_record(path, [&](const json& j, std::size_t line) {
    LShapeRecord r;
    r.image_id = get_image_id(j, path, line);
    r.class_id = get_class_id(j, path, line);
    r.pa = get_point(j.contains("pa") ? j["pa"] : json(), path, line, "pa");
    r.pb = get_point(j.contains("pb") ? j["pb"] : json(), path, line, "pb");
    r.pc = get_point(j.contains("pc") ? j["pc"] : json(), path, line, "pc");
    records.push_back(std::move(r));
  });
  return records;
}

void write_lshapes(const std::filesystem::path& path, const std::vector<LShapeRecord>& records) {
  std::ofstream out = open_out(path);
  for (const LShapeRecord& r : records) {
    json j;
    j["image_id"] = r.image_id;
    j["class_id"] = r.class_id;
    j["pa"] = point_json(r.pa);
    j["pb"] = point_json(r.pb);
    j["pc"] = point_json(r.pc);
    out << j.dump() << '\n';
  }
}

std::vector<ImageSample> group_by_image(const std::vector<DetectionRecord>& preds,
                                        const std::vector<LabelRecord>& labels) {
  std::vector<ImageSample> samples;
  std::map<std::string, std::size_t> index;
  auto sample_for = [&](const std::string& image_id) -> ImageSample& {
    auto [it, inserted] = index.try_emplace(image_id, samples.size());
    if (inserted) {
      samples.push_back(ImageSample{image_id, {}, {}});
    }
    return samples[it->second];
  };
  for (const LabelRecord& r : labels) {
    sample_for(r.image_id).labels.push_back({r.footprint, r.class_id});
  }
  for (const DetectionRecord& r : preds) {
    sample_for(r.image_id).detections.push_back({r.footprint, r.class_id, r.confidence});
  }
  return samples;
}

Config Config::load(const std::filesystem::path& path) {
  std::ifstream in = open_in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return from_string(ss.str());
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

Config Config::from_string(const std::string& text) {
  Config cfg;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    const auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
  };
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ParseError("line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ParseError("line " + std::to_string(line_no) + ": empty key");
    cfg.values_[key] = value;
    cfg.used_[key] = false;
  }
  return cfg;
}

double Config::get_double(const std::string& key, double fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  used_[key] = true;
  try {
    std::size_t pos = 0;
    const double v = std::stod(it->second, &pos);
    if (pos != it->second.size()) throw std::invalid_argument(it->second);
    return v;
  } catch (const std::exception&) {
    throw ParseError("config key '" + key + "' is not a number: '" + it->second + "'");
  }
}

int Config::get_int(const std::string& key, int fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  used_[key] = true;
  try {
    std::size_t pos = 0;
    const int v = std::stoi(it->second, &pos);
    if (pos != it->second.size()) throw std::invalid_argument(it->second);
    return v;
  } catch (const std::exception&) {
    throw ParseError("config key '" + key + "' is not an integer: '" + it->second + "'");
  }
}

std::string Config::get_string(const std::string& key, const std::string& fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  used_[key] = true;
  return it->second;
}

std::vector<std::string> Config::unused_keys() const {
  std::vector<std::string> keys;
  for (const auto& [key, used] : used_) {
    if (!used) keys.push_back(key);
  }
  return keys;
}

}  // namespace pgram
