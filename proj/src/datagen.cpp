#include "pgram/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "pgram/rng.hpp"

namespace pgram {

namespace {

Vec3 rotate(const std::array<double, 9>& r, const Vec3& p) {
  return {r[0] * p.x + r[1] * p.y + r[2] * p.z,
          r[3] * p.x + r[4] * p.y + r[5] * p.z,
          r[6] * p.x + r[7] * p.y + r[8] * p.z};
}

// World-plane footprint of a box, optionally inflated, as a parallelogram
// in world (x, y) for overlap tests.
Parallelogram world_footprint(const Box3D& box, double inflate) {
  const Box3D grown{box.center, box.length + inflate, box.width + inflate, box.yaw};
  const auto corners = bottom_face(grown);
  Parallelogram par;
  for (int i = 0; i < 4; ++i) par.vertices[static_cast<std::size_t>(i)] = {corners[static_cast<std::size_t>(i)].x, corners[static_cast<std::size_t>(i)].y};
  par.center = {box.center.x, box.center.y};
  return par;
}

}  // namespace

void CameraModel::validate() const {
  const auto& r = rotation;
  auto row = [&](int i) { return Vec3{r[static_cast<std::size_t>(3 * i)], r[static_cast<std::size_t>(3 * i + 1)], r[static_cast<std::size_t>(3 * i + 2)]}; };
  auto dot3 = [](Vec3 a, Vec3 b) { return a.x * b.x + a.y * b.y + a.z * b.z; };
  constexpr double tol = 1e-9;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      const double expect = i == j ? 1.0 : 0.0;
      if (std::abs(dot3(row(i), row(j)) - expect) > tol) {
        throw InvalidConfig("camera rotation is not orthonormal");
      }
    }
  }
  const Vec3 r0 = row(0), r1 = row(1), r2 = row(2);
  const double det = r0.x * (r1.y * r2.z - r1.z * r2.y) - r0.y * (r1.x * r2.z - r1.z * r2.x) +
                     r0.z * (r1.x * r2.y - r1.y * r2.x);
  if (std::abs(det - 1.0) > tol) {
    throw InvalidConfig("camera rotation determinant is not +1");
  }
  if (!(fx > 0.0) || !(fy > 0.0)) {
    throw InvalidConfig("camera focal lengths must be positive");
  }
}

CameraModel CameraModel::affine_identity(double scale, double cx, double cy) {
  CameraModel cam;
  cam.mode = Mode::affine;
  cam.fx = cam.fy = scale;
  cam.cx = cx;
  cam.cy = cy;
  return cam;
}

CameraModel CameraModel::elevated(Mode mode, double x, double y, double height, double pitch_deg,
                                  double fx, double fy, double cx, double cy) {
  const double pitch = pitch_deg * std::numbers::pi / 180.0;
  const double c = std::cos(pitch), s = std::sin(pitch);
  CameraModel cam;
  cam.mode = mode;
  // Camera axes in world coordinates: x right (east), y down-tilted, z the
  // viewing direction (north, pitched toward the ground).
  cam.rotation = {1, 0, 0,
                  0, -s, -c,
                  0, c, -s};
  const Vec3 center{x, y, height};
  const Vec3 rc = rotate(cam.rotation, center);
  cam.translation = {-rc.x, -rc.y, -rc.z};
  cam.fx = fx;
  cam.fy = fy;
  cam.cx = cx;
  cam.cy = cy;
  cam.validate();
  return cam;
}

std::array<Vec3, 4> bottom_face(const Box3D& box) {
  const double c = std::cos(box.yaw), s = std::sin(box.yaw);
  const double hl = 0.5 * box.length, hw = 0.5 * box.width;
  // Local corners CCW viewed from above (+z).
  const double local[4][2] = {{hl, hw}, {-hl, hw}, {-hl, -hw}, {hl, -hw}};
  std::array<Vec3, 4> out;
  for (int i = 0; i < 4; ++i) {
    const double lx = local[i][0], ly = local[i][1];
    out[static_cast<std::size_t>(i)] = {box.center.x + c * lx - s * ly,
                                        box.center.y + s * lx + c * ly, box.center.z};
  }
  return out;
}

Point2 project_point(const CameraModel& cam, const Vec3& p) {
  const Vec3 r = rotate(cam.rotation, p);
  const Vec3 pc{r.x + cam.translation.x, r.y + cam.translation.y, r.z + cam.translation.z};
  if (cam.mode == CameraModel::Mode::affine) {
    return {cam.fx * pc.x + cam.cx, cam.fy * pc.y + cam.cy};
  }
  if (pc.z <= cam.eps_depth) {
    throw BehindCamera("point at depth " + std::to_string(pc.z) + " m is behind the camera");
  }
  return {cam.fx * pc.x / pc.z + cam.cx, cam.fy * pc.y / pc.z + cam.cy};
}

Parallelogram fit_parallelogram(const std::array<Point2, 4>& quad) {
  const Point2 center = 0.25 * (quad[0] + quad[1] + quad[2] + quad[3]);
  const Vec2 d1 = 0.5 * (quad[0] - quad[2]);
  const Vec2 d2 = 0.5 * (quad[1] - quad[3]);
  return Parallelogram{{center + d1, center + d2, center - d1, center - d2}, center};
}

double fit_residual(const std::array<Point2, 4>& quad, const Parallelogram& par) {
  double worst = 0.0;
  for (int i = 0; i < 4; ++i) {
    worst = std::max(worst, norm(par.vertices[static_cast<std::size_t>(i)] - quad[static_cast<std::size_t>(i)]));
  }
  return worst;
}

BoxLabel box_to_label(const Box3D& box, const CameraModel& cam) {
  const auto corners = bottom_face(box);
  std::array<Point2, 4> quad;
  for (int i = 0; i < 4; ++i) quad[static_cast<std::size_t>(i)] = project_point(cam, corners[static_cast<std::size_t>(i)]);
  BoxLabel label;
  label.footprint = fit_parallelogram(quad);
  label.fit_residual = fit_residual(quad, label.footprint);
  label.degenerate = label.footprint.area() < kEpsArea;
  return label;
}

Parallelogram complete_lshape(const Point2& pa, const Point2& pb, const Point2& pc) {
  const double twice_area = std::abs(cross(pb - pa, pc - pa));
  if (0.5 * twice_area < kEpsArea) {
    throw CollinearCorners("L-shape corners are collinear");
  }
  const Point2 pd = pa + pc - pb;
  return Parallelogram{{pa, pb, pc, pd}, 0.5 * (pa + pc)};
}

CameraModel default_camera(CameraModel::Mode mode) {
  // 10 m mast looking north over the placement region; ~720p framing.
  const double fx = mode == CameraModel::Mode::pinhole ? 700.0 : 14.0;
  const double fy = fx;
  return CameraModel::elevated(mode, 0.0, 0.0, 10.0, 45.0, fx, fy, 640.0, 360.0);
}

std::vector<Detection> synth_predictions(const std::vector<GroundTruthLabel>& labels,
                                         const PredictionNoise& noise, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Detection> preds;
  for (const GroundTruthLabel& label : labels) {
    const Triangle25 tri = triangle_from_parallelogram(label.footprint);
    const int dups = rng.uniform_int(noise.dups_min, noise.dups_max);
    for (int d = 0; d < dups; ++d) {
      Triangle25 jittered;
      double drift = 0.0;
      for (int attempt = 0; attempt < 8; ++attempt) {
        const Vec2 j0{rng.normal(0.0, noise.sigma), rng.normal(0.0, noise.sigma)};
        const Vec2 j1{rng.normal(0.0, noise.sigma), rng.normal(0.0, noise.sigma)};
        const Vec2 j2{rng.normal(0.0, noise.sigma), rng.normal(0.0, noise.sigma)};
        jittered = Triangle25{tri.p0 + j0, tri.p1 + j1, tri.p2 + j2};
        drift = (norm(j0) + norm(j1) + norm(j2)) / 3.0;
        if (!jittered.degenerate()) break;
      }
      if (jittered.degenerate()) continue;
      Detection det;
      det.footprint = reconstruct_parallelogram(jittered, 0.0);
      det.class_id = label.class_id;
      det.confidence = std::clamp(
          noise.conf_base - noise.conf_decay * drift + rng.normal(0.0, noise.conf_noise), 0.01, 1.0);
      preds.push_back(std::move(det));
    }
  }
  return preds;
}

Scene generate_scene(const SceneConfig& cfg, const CameraModel& cam) {
  if (cfg.count_min < 0 || cfg.count_max < cfg.count_min || !(cfg.length_min > 0.0) ||
      cfg.length_max < cfg.length_min || !(cfg.width_min > 0.0) || cfg.width_max < cfg.width_min ||
      cfg.region_x_max < cfg.region_x_min || cfg.region_y_max < cfg.region_y_min) {
    throw InvalidConfig("scene config bounds must be positive and ordered");
  }

  SplitMix64 streams(cfg.seed);
  Rng place_rng(streams.next());
  const std::uint64_t prediction_seed = streams.next();

  Scene scene;
  const int count = place_rng.uniform_int(cfg.count_min, cfg.count_max);
  std::vector<Parallelogram> inflated;  // grown by min_gap/2 per side

  int budget = cfg.max_retries_per_vehicle * std::max(count, 1);
  while (static_cast<int>(scene.boxes.size()) < count) {
    if (budget-- <= 0) {
      throw PlacementFailure("could not place " + std::to_string(count) + " vehicles in region after retry budget");
    }
    Box3D box;
    box.center = {place_rng.uniform(cfg.region_x_min, cfg.region_x_max),
                  place_rng.uniform(cfg.region_y_min, cfg.region_y_max), 0.0};
    box.length = place_rng.uniform(cfg.length_min, cfg.length_max);
    box.width = place_rng.uniform(cfg.width_min, cfg.width_max);
    box.yaw = place_rng.uniform(0.0, 2.0 * std::numbers::pi);

    const Parallelogram candidate = world_footprint(box, cfg.min_gap);
    bool overlaps = false;
    for (const Parallelogram& other : inflated) {
      if (exact_iou(candidate, other) > 0.0) {
        overlaps = true;
        break;
      }
    }
    if (overlaps) continue;
    inflated.push_back(candidate);
    scene.boxes.push_back(box);
  }

  for (const Box3D& box : scene.boxes) {
    const BoxLabel label = box_to_label(box, cam);
    if (label.degenerate) {
      ++scene.degenerate_labels;
      continue;
    }
    scene.labels.push_back({label.footprint, 0});
  }
  scene.predictions = synth_predictions(scene.labels, cfg.noise, prediction_seed);
  return scene;
}

std::vector<Scene> generate_scenes(const SceneConfig& cfg, const CameraModel& cam,
                                   std::size_t n_scenes, std::uint64_t master_seed) {
  SplitMix64 seeds(master_seed);
  std::vector<Scene> scenes;
  scenes.reserve(n_scenes);
  for (std::size_t i = 0; i < n_scenes; ++i) {
    SceneConfig scene_cfg = cfg;
    scene_cfg.seed = seeds.next();
    scenes.push_back(generate_scene(scene_cfg, cam));
  }
  return scenes;
}

}  // namespace pgram
