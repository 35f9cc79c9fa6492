#pragma once

// Synthetic scene and label generation. Vehicles are ground-plane rectangles
// in a z-up world; an elevated camera projects their bottom faces into the
// image. Under the affine camera the projected quad is exactly a
// parallelogram; under the pinhole camera it is fitted by least squares and
// the residual is reported, quantifying how far the parallelogram premise
// bends under real perspective.

#include <array>
#include <cstdint>
#include <vector>

#include "pgram/codec.hpp"
#include "pgram/error.hpp"
#include "pgram/geometry.hpp"

namespace pgram {

struct BehindCamera : Error {
  using Error::Error;
};
struct CollinearCorners : Error {
  using Error::Error;
};
struct PlacementFailure : Error {
  using Error::Error;
};

struct Vec3 {
  double x = 0.0, y = 0.0, z = 0.0;
};

inline Vec3 operator-(Vec3 a, Vec3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }

// Ground-plane box: zero pitch/roll, z is the ground elevation of the
// bottom face.
struct Box3D {
  Vec3 center;        // meters; z = bottom elevation
  double length = 0;  // meters, along the yaw direction
  double width = 0;   // meters
  double yaw = 0;     // radians, z-up
};

struct CameraModel {
  enum class Mode { affine, pinhole };

  Mode mode = Mode::affine;
  std::array<double, 9> rotation{1, 0, 0, 0, 1, 0, 0, 0, 1};  // row-major, world -> camera
  Vec3 translation;                                           // X_cam = R * X_world + t
  double fx = 1.0, fy = 1.0;  // pinhole: focal px; affine: px per meter
  double cx = 0.0, cy = 0.0;  // principal point / image offset, px
  double eps_depth = 0.1;     // meters, minimum pinhole depth

  // Orthonormality (det +1) check; throws InvalidConfig.
  void validate() const;

  // Axis-aligned affine camera: (x, y, z) -> (s*x + cx, s*y + cy).
  static CameraModel affine_identity(double scale, double cx, double cy);

  // Camera at (x, y, height) looking toward +y, pitched down by pitch_deg.
  static CameraModel elevated(Mode mode, double x, double y, double height, double pitch_deg,
                              double fx, double fy, double cx, double cy);
};

// The 4 corners of the box's bottom rectangle, counter-clockwise viewed
// from above.
std::array<Vec3, 4> bottom_face(const Box3D& box);

// Throws BehindCamera when a pinhole point has depth <= eps_depth.
Point2 project_point(const CameraModel& cam, const Vec3& p);

struct BoxLabel {
  Parallelogram footprint;
  double fit_residual = 0.0;  // px, max vertex distance quad -> fit
  bool degenerate = false;    // collapsed footprint (area < kEpsArea)
};

BoxLabel box_to_label(const Box3D& box, const CameraModel& cam);

// Least-squares parallelogram through an ordered quad: center at the
// centroid, generators at the half-diagonals. Exact parallelograms are
// fixed points.
Parallelogram fit_parallelogram(const std::array<Point2, 4>& quad);

double fit_residual(const std::array<Point2, 4>& quad, const Parallelogram& par);

// Completes an L-shape annotation (three outermost corners, pb the shared
// L-vertex) by reflecting pb across the diagonal (pa, pc): pd = pa + pc - pb.
// Throws CollinearCorners.
Parallelogram complete_lshape(const Point2& pa, const Point2& pb, const Point2& pc);

// Noise model for synthetic "predictions" derived from labels.
struct PredictionNoise {
  double sigma = 2.0;  // px, per-coordinate Gaussian jitter on p0, p1, p2
  int dups_min = 3;    // detections emitted per vehicle
  int dups_max = 8;
  double conf_base = 0.95;
  double conf_decay = 0.02;  // confidence lost per px of mean vertex drift
  double conf_noise = 0.02;
};

struct SceneConfig {
  int count_min = 6;
  int count_max = 14;
  double length_min = 3.5, length_max = 5.5;  // meters
  double width_min = 1.6, width_max = 2.1;    // meters
  double region_x_min = -18.0, region_x_max = 18.0;  // meters
  double region_y_min = 14.0, region_y_max = 40.0;
  double min_gap = 0.5;  // meters between vehicle footprints
  int max_retries_per_vehicle = 200;
  std::uint64_t seed = 1;
  PredictionNoise noise;
};

struct Scene {
  std::vector<Box3D> boxes;
  std::vector<GroundTruthLabel> labels;
  std::vector<Detection> predictions;
  std::size_t degenerate_labels = 0;  // boxes whose projection collapsed
};

// Default elevated vantage matching the scene region: 10 m height, 45 deg
// pitch, looking north over the placement area.
CameraModel default_camera(CameraModel::Mode mode = CameraModel::Mode::pinhole);

// Deterministic under cfg.seed: placement rejects world-space footprint
// overlaps (min_gap apart); throws PlacementFailure when the region cannot
// fit the requested count.
Scene generate_scene(const SceneConfig& cfg, const CameraModel& cam);

// Jittered duplicate detections for a label set; separate seed so sweeps
// over sigma can reuse one scene.
std::vector<Detection> synth_predictions(const std::vector<GroundTruthLabel>& labels,
                                         const PredictionNoise& noise, std::uint64_t seed);

// Per-scene seeds derived from master_seed by a splitmix64 sequence.
std::vector<Scene> generate_scenes(const SceneConfig& cfg, const CameraModel& cam,
                                   std::size_t n_scenes, std::uint64_t master_seed);

}  // namespace pgram
