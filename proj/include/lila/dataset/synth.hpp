#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "lila/autolabel.hpp"
#include "lila/geometry.hpp"
#include "lila/label_space.hpp"
#include "lila/rng.hpp"
#include "lila/scan_projection.hpp"

namespace lila {

/// Horizontal plane z = height in world coordinates.
struct GroundPlane {
  double height = 0.0;
  LidarClass cls = LidarClass::kRoad;
};

/// Axis-aligned box in world coordinates.
struct Box {
  Vec3 min = Vec3::Zero();
  Vec3 max = Vec3::Ones();
  LidarClass cls = LidarClass::kConstruction;
};

/// Vertical cylinder with flat caps.
struct Cylinder {
  double x = 0.0;
  double y = 0.0;
  double radius = 0.5;
  double z_min = 0.0;
  double z_max = 1.0;
  LidarClass cls = LidarClass::kPole;
};

struct SyntheticScene {
  std::optional<GroundPlane> ground;
  std::vector<Box> boxes;
  std::vector<Cylinder> cylinders;

  /// Throws InvalidArgument on degenerate primitives or non-semantic classes.
  void validate() const;
};

struct RayHit {
  double distance = 0.0;
  LidarClass cls = LidarClass::kUnlabeled;
};

/// Ray parameters t > 0 of the first surface crossing for a unit `dir`, or
/// nullopt. A ray starting inside a solid reports its exit.
std::optional<double> intersect_ground(const GroundPlane& plane, const Vec3& origin,
                                       const Vec3& dir);
std::optional<double> intersect_box(const Box& box, const Vec3& origin, const Vec3& dir);
std::optional<double> intersect_cylinder(const Cylinder& cyl, const Vec3& origin,
                                         const Vec3& dir);

/// Nearest hit within `max_distance`; ties go to the primitive listed first
/// (ground, then boxes, then cylinders).
std::optional<RayHit> cast_ray(const SyntheticScene& scene, const Vec3& origin, const Vec3& dir,
                               double max_distance);

/// Mean synthetic reflectivity per class in [0, 1].
float class_reflectivity(LidarClass cls);

struct SensorConfig {
  BeamTable beams = BeamTable::uniform();
  int columns = kDefaultColumns;
  Micros revolution_us = 100'000;
  RigidTransform lidar_to_vehicle = RigidTransform::from_translation(0.0, 0.0, 1.8);
  double max_range_m = 120.0;
  double reflectivity_noise = 0.03;
};

struct CameraConfig {
  CameraIntrinsics intrinsics;
  RigidTransform camera_to_vehicle;

  /// 480x240 forward camera, 90 deg horizontal field of view, 1 ms shutter,
  /// mounted slightly ahead of and below the scanner.
  static CameraConfig forward_default();
};

struct SynthFrame {
  LidarScan scan;               // one point per (ring, column) firing, misses have range 0
  LabelImage semantic_image;    // Cityscapes ids, sky where no primitive is hit
  LabeledScan ground_truth;     // class of the primitive each beam hit
  PoseTrack poses;
  CalibrationSet calibration;
  BeamTable beams = BeamTable::uniform();
  Timestamp camera_time;

  FrameBundle bundle() const;
};

/// Ray-casts one scanner revolution starting at `revolution_start`. Column
/// bin j fires at revolution_start + j * revolution_us / columns (integer
/// microseconds) along its bin-center azimuth, all rings at once, from the
/// vehicle pose at that instant. The camera image is rendered from the pose
/// at mid-exposure, camera_time + t_r / 2, through pixel centers.
SynthFrame synth_generate(const SyntheticScene& scene, const PoseTrack& trajectory,
                          Timestamp revolution_start, Timestamp camera_time,
                          const SensorConfig& sensor, const CameraConfig& camera,
                          std::uint64_t seed);

/// Pose track sampled every `step_us` over [start, end] for constant forward
/// speed and yaw rate, starting at the world origin heading +x.
PoseTrack constant_motion_track(Timestamp start, Timestamp end, double speed_mps,
                                double yaw_rate_rad_s, Micros step_us = 10'000);

struct StreetConfig {
  double length_m = 60.0;
  double road_half_width_m = 4.0;
  int frames = 10;
  double speed_mps = 5.0;
  Micros frame_interval_us = 500'000;
  SensorConfig sensor;
  CameraConfig camera = CameraConfig::forward_default();
};

/// Randomized street: road, sidewalks, terrain strips, buildings, poles with
/// signs, vegetation, parked vehicles, pedestrians and cyclists.
SyntheticScene random_street_scene(const StreetConfig& config, Rng& rng);

struct SynthSequence {
  SyntheticScene scene;
  PoseTrack trajectory;
  std::vector<SynthFrame> frames;
};

/// A drive along a random street. Frame i uses seed derive_seed(seed, i + 1);
/// frames are generated on up to `jobs` threads with identical output.
SynthSequence generate_street_sequence(const StreetConfig& config, std::uint64_t seed,
                                       int jobs = 1);

/// Calibration perturbed by a random rotation of up to `rotation_deg` about
/// each axis and a translation of up to `translation_m` per axis.
CalibrationSet jitter_calibration(const CalibrationSet& calibration, double rotation_deg,
                                  double translation_m, Rng& rng);

/// Replaces every pixel within `radius` of a class boundary with the label
/// of a random pixel in its (2 radius + 1)^2 neighbourhood.
LabelImage bleed_boundaries(const LabelImage& image, int radius, Rng& rng);

}  // namespace lila
