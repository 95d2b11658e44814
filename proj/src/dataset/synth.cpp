#include "lila/dataset/synth.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "lila/error.hpp"
#include "lila/parallel.hpp"

namespace lila {

namespace {

constexpr double kHitEpsilon = 1e-9;
constexpr double kParallelEpsilon = 1e-15;

void consider(std::optional<double>& best, double t) {
  if (t > kHitEpsilon && (!best || t < *best)) best = t;
}

void require_semantic(LidarClass cls, const char* what) {
  if (static_cast<std::uint8_t>(cls) >= kNumLidarClasses) {
    throw Error(ErrorCode::kInvalidArgument, std::string(what) + " needs a semantic class");
  }
}

}  // namespace

void SyntheticScene::validate() const {
  if (ground) {
    require_semantic(ground->cls, "ground plane");
    if (!std::isfinite(ground->height)) {
      throw Error(ErrorCode::kInvalidArgument, "ground plane height must be finite");
    }
  }
  for (const Box& b : boxes) {
    require_semantic(b.cls, "box");
    if (!b.min.allFinite() || !b.max.allFinite() || !(b.min.array() < b.max.array()).all()) {
      throw Error(ErrorCode::kInvalidArgument, "box needs finite min < max on every axis");
    }
  }
  for (const Cylinder& c : cylinders) {
    require_semantic(c.cls, "cylinder");
    if (!(c.radius > 0.0) || !(c.z_min < c.z_max) || !std::isfinite(c.x) || !std::isfinite(c.y) ||
        !std::isfinite(c.radius) || !std::isfinite(c.z_min) || !std::isfinite(c.z_max)) {
      throw Error(ErrorCode::kInvalidArgument, "cylinder needs radius > 0 and z_min < z_max");
    }
  }
}

std::optional<double> intersect_ground(const GroundPlane& plane, const Vec3& origin,
                                       const Vec3& dir) {
  if (std::abs(dir.z()) < kParallelEpsilon) return std::nullopt;
  const double t = (plane.height - origin.z()) / dir.z();
  if (t > kHitEpsilon) return t;
  return std::nullopt;
}

std::optional<double> intersect_box(const Box& box, const Vec3& origin, const Vec3& dir) {
  double t_enter = -std::numeric_limits<double>::infinity();
  double t_exit = std::numeric_limits<double>::infinity();
  for (int axis = 0; axis < 3; ++axis) {
    const double o = origin[axis];
    const double d = dir[axis];
    if (std::abs(d) < kParallelEpsilon) {
      if (o < box.min[axis] || o > box.max[axis]) return std::nullopt;
      continue;
    }
    double ta = (box.min[axis] - o) / d;
    double tb = (box.max[axis] - o) / d;
    if (ta > tb) std::swap(ta, tb);
    t_enter = std::max(t_enter, ta);
    t_exit = std::min(t_exit, tb);
  }
  if (t_exit < t_enter) return std::nullopt;
  if (t_enter > kHitEpsilon) return t_enter;
  if (t_exit > kHitEpsilon) return t_exit;
  return std::nullopt;
}

std::optional<double> intersect_cylinder(const Cylinder& cyl, const Vec3& origin,
                                         const Vec3& dir) {
  std::optional<double> best;
  const double ox = origin.x() - cyl.x;
  const double oy = origin.y() - cyl.y;
  const double a = dir.x() * dir.x() + dir.y() * dir.y();
  if (a > kParallelEpsilon) {
    const double b = 2.0 * (ox * dir.x() + oy * dir.y());
    const double c = ox * ox + oy * oy - cyl.radius * cyl.radius;
    const double disc = b * b - 4.0 * a * c;
    if (disc >= 0.0) {
      const double sq = std::sqrt(disc);
      for (double t : {(-b - sq) / (2.0 * a), (-b + sq) / (2.0 * a)}) {
        const double z = origin.z() + t * dir.z();
        if (z >= cyl.z_min && z <= cyl.z_max) consider(best, t);
      }
    }
  }
  if (std::abs(dir.z()) > kParallelEpsilon) {
    for (double zc : {cyl.z_min, cyl.z_max}) {
      const double t = (zc - origin.z()) / dir.z();
      const double x = ox + t * dir.x();
      const double y = oy + t * dir.y();
      if (x * x + y * y <= cyl.radius * cyl.radius) consider(best, t);
    }
  }
  return best;
}

std::optional<RayHit> cast_ray(const SyntheticScene& scene, const Vec3& origin, const Vec3& dir,
                               double max_distance) {
  std::optional<RayHit> best;
  auto offer = [&](std::optional<double> t, LidarClass cls) {
    if (t && *t <= max_distance && (!best || *t < best->distance)) best = RayHit{*t, cls};
  };
  if (scene.ground) offer(intersect_ground(*scene.ground, origin, dir), scene.ground->cls);
  for (const Box& b : scene.boxes) offer(intersect_box(b, origin, dir), b.cls);
  for (const Cylinder& c : scene.cylinders) offer(intersect_cylinder(c, origin, dir), c.cls);
  return best;
}

float class_reflectivity(LidarClass cls) {
  static constexpr std::array<float, kNumLidarClasses> kTable = {
      0.12f,  // road
      0.25f,  // sidewalk
      0.35f,  // person
      0.40f,  // rider
      0.60f,  // small vehicle
      0.50f,  // large vehicle
      0.45f,  // two-wheeler
      0.30f,  // construction
      0.55f,  // pole
      0.95f,  // traffic sign
      0.20f,  // vegetation
      0.08f,  // terrain
      0.00f,  // sky
  };
  const auto id = static_cast<std::size_t>(cls);
  return id < kTable.size() ? kTable[id] : 0.0f;
}

CameraConfig CameraConfig::forward_default() {
  CameraConfig c;
  c.intrinsics = {240.0, 240.0, 239.5, 119.5, 480, 240, 1000};
  c.camera_to_vehicle = RigidTransform(forward_camera_rotation(), Vec3(0.3, 0.0, 1.6));
  return c;
}

FrameBundle SynthFrame::bundle() const {
  return {scan, semantic_image, camera_time, calibration, poses, beams};
}

SynthFrame synth_generate(const SyntheticScene& scene, const PoseTrack& trajectory,
                          Timestamp revolution_start, Timestamp camera_time,
                          const SensorConfig& sensor, const CameraConfig& camera,
                          std::uint64_t seed) {
  scene.validate();
  camera.intrinsics.validate();
  if (sensor.columns < 1 || sensor.revolution_us < 0) {
    throw Error(ErrorCode::kInvalidArgument, "sensor needs columns >= 1 and revolution_us >= 0");
  }
  SynthFrame frame;
  frame.beams = sensor.beams;
  frame.poses = trajectory;
  frame.camera_time = camera_time;
  frame.calibration = {sensor.lidar_to_vehicle, camera.camera_to_vehicle, camera.intrinsics};

  const int rings = sensor.beams.rings();
  const int columns = sensor.columns;
  LidarScan& scan = frame.scan;
  scan.rings = rings;
  scan.columns = columns;
  scan.revolution_start = revolution_start;
  scan.points.reserve(static_cast<std::size_t>(rings) * columns);
  LabeledScan& truth = frame.ground_truth;
  truth.labels.reserve(scan.points.capacity());
  truth.provenance.reserve(scan.points.capacity());

  Rng rng(seed);
  for (int bin = 0; bin < columns; ++bin) {
    const Timestamp t = revolution_start + bin * sensor.revolution_us / columns;
    const RigidTransform lidar_pose = compose(trajectory.pose_at(t), sensor.lidar_to_vehicle);
    const float azimuth = column_center_azimuth(column_of_bin(bin, columns), columns);
    for (int ring = 0; ring < rings; ++ring) {
      const Vec3 dir =
          lidar_pose.rotation() * spherical_to_xyz(1.0, azimuth, sensor.beams.elevation(ring));
      const auto hit = cast_ray(scene, lidar_pose.translation(), dir, sensor.max_range_m);
      LidarPoint p;
      p.ring = static_cast<std::uint16_t>(ring);
      p.azimuth = azimuth;
      p.time = t;
      if (hit) {
        p.range = static_cast<float>(hit->distance);
        const double noisy = class_reflectivity(hit->cls) + sensor.reflectivity_noise * rng.normal();
        p.reflectivity = static_cast<float>(std::clamp(noisy, 0.0, 1.0));
        truth.labels.push_back(static_cast<std::uint8_t>(hit->cls));
        truth.provenance.push_back(Provenance::kTransferred);
      } else {
        truth.labels.push_back(kUnlabeledId);
        truth.provenance.push_back(Provenance::kInvalid);
      }
      scan.points.push_back(p);
    }
  }
  truth.scan = scan;

  const CameraIntrinsics& k = camera.intrinsics;
  const Timestamp render_time = camera_time + k.shutter_interval_us / 2;
  const RigidTransform camera_pose =
      compose(trajectory.pose_at(render_time), camera.camera_to_vehicle);
  frame.semantic_image = LabelImage(k.height, k.width, LabelSet::kCityscapes,
                                    static_cast<std::uint8_t>(CityscapesClass::kSky));
  for (int v = 0; v < k.height; ++v) {
    for (int u = 0; u < k.width; ++u) {
      const Vec3 ray((u - k.cx) / k.fx, (v - k.cy) / k.fy, 1.0);
      const Vec3 dir = camera_pose.rotation() * ray.normalized();
      const auto hit = cast_ray(scene, camera_pose.translation(), dir,
                                std::numeric_limits<double>::infinity());
      if (hit) frame.semantic_image.at(v, u) = static_cast<std::uint8_t>(representative_class(hit->cls));
    }
  }
  return frame;
}

PoseTrack constant_motion_track(Timestamp start, Timestamp end, double speed_mps,
                                double yaw_rate_rad_s, Micros step_us) {
  if (end < start || step_us <= 0) {
    throw Error(ErrorCode::kInvalidArgument, "motion track needs start <= end and step > 0");
  }
  std::vector<TimedPose> samples;
  auto pose_at = [&](Timestamp t) {
    const double tau = static_cast<double>(t - start) * 1e-6;
    const double yaw = yaw_rate_rad_s * tau;
    double x = speed_mps * tau;
    double y = 0.0;
    if (std::abs(yaw_rate_rad_s) > 1e-12) {
      x = speed_mps / yaw_rate_rad_s * std::sin(yaw);
      y = speed_mps / yaw_rate_rad_s * (1.0 - std::cos(yaw));
    }
    return compose(RigidTransform::from_translation(x, y, 0.0), RigidTransform::from_rotation_z(yaw));
  };
  for (Timestamp t = start; t < end; t = t + step_us) samples.push_back({t, pose_at(t)});
  samples.push_back({end, pose_at(end)});
  return PoseTrack(std::move(samples));
}

SyntheticScene random_street_scene(const StreetConfig& config, Rng& rng) {
  SyntheticScene scene;
  scene.ground = GroundPlane{0.0, LidarClass::kRoad};
  const double x0 = -30.0;
  const double x1 = config.length_m + 60.0;
  const double road = config.road_half_width_m;
  const double walk = road + 3.0;

  for (double side : {-1.0, 1.0}) {
    auto y_range = [side](double a, double b) {
      return side > 0 ? std::pair{a, b} : std::pair{-b, -a};
    };
    const auto [sw0, sw1] = y_range(road, walk);
    scene.boxes.push_back({Vec3(x0, sw0, 0.0), Vec3(x1, sw1, 0.15), LidarClass::kSidewalk});

    // Frontage: buildings, vegetation or open terrain in segments.
    for (double x = x0; x < x1;) {
      const double len = rng.uniform(6.0, 18.0);
      const double kind = rng.uniform();
      const double depth_start = walk + rng.uniform(0.0, 2.0);
      if (kind < 0.5) {
        const auto [b0, b1] = y_range(depth_start, depth_start + rng.uniform(6.0, 12.0));
        scene.boxes.push_back({Vec3(x, b0, 0.0), Vec3(x + len, b1, rng.uniform(5.0, 14.0)),
                               LidarClass::kConstruction});
      } else if (kind < 0.8) {
        const auto [t0, t1] = y_range(walk, walk + 4.0);
        scene.boxes.push_back({Vec3(x, t0, 0.0), Vec3(x + len, t1, 0.08), LidarClass::kTerrain});
        const int trees = 1 + static_cast<int>(rng.below(3));
        for (int i = 0; i < trees; ++i) {
          const double tx = x + rng.uniform(1.0, std::max(1.5, len - 1.0));
          const double ty = side * (walk + rng.uniform(1.0, 3.0));
          const double r = rng.uniform(1.0, 2.0);
          scene.cylinders.push_back({tx, ty, r, rng.uniform(1.5, 2.5), rng.uniform(4.0, 7.0),
                                     LidarClass::kVegetation});
          scene.cylinders.push_back({tx, ty, 0.2, 0.08, 2.6, LidarClass::kVegetation});
        }
      } else {
        const auto [t0, t1] = y_range(walk, walk + 8.0);
        scene.boxes.push_back({Vec3(x, t0, 0.0), Vec3(x + len, t1, 0.08), LidarClass::kTerrain});
      }
      x += len + rng.uniform(0.0, 3.0);
    }

    // Poles along the curb, some carrying a sign.
    for (double x = x0 + rng.uniform(0.0, 10.0); x < x1; x += rng.uniform(10.0, 20.0)) {
      const double py = side * (road + 0.5);
      scene.cylinders.push_back({x, py, 0.12, 0.0, rng.uniform(4.0, 6.0), LidarClass::kPole});
      if (rng.uniform() < 0.6) {
        const double z = rng.uniform(2.2, 2.8);
        scene.boxes.push_back({Vec3(x - 0.05, py - 0.4, z), Vec3(x + 0.05, py + 0.4, z + 0.8),
                               LidarClass::kTrafficSign});
      }
    }

    // Parked vehicles at the road edge.
    for (double x = x0 + rng.uniform(0.0, 8.0); x < x1; x += rng.uniform(7.0, 16.0)) {
      const bool truck = rng.uniform() < 0.25;
      const double len = truck ? rng.uniform(7.0, 10.0) : rng.uniform(3.8, 4.8);
      const double wid = truck ? 2.5 : 1.8;
      const double hgt = truck ? rng.uniform(3.0, 3.6) : rng.uniform(1.4, 1.7);
      const auto [v0, v1] = y_range(road - wid - 0.2, road - 0.2);
      scene.boxes.push_back({Vec3(x, v0, 0.0), Vec3(x + len, v1, hgt),
                             truck ? LidarClass::kLargeVehicle : LidarClass::kSmallVehicle});
      x += len;
    }

    // Pedestrians on the sidewalk, cyclists near the curb.
    const int people = 3 + static_cast<int>(rng.below(5));
    for (int i = 0; i < people; ++i) {
      const double px = rng.uniform(x0, x1);
      scene.cylinders.push_back({px, side * rng.uniform(road + 0.8, walk - 0.5), 0.3, 0.15,
                                 rng.uniform(1.6, 1.9), LidarClass::kPerson});
    }
    const int cyclists = 1 + static_cast<int>(rng.below(3));
    for (int i = 0; i < cyclists; ++i) {
      const double cx = rng.uniform(x0, x1);
      const double cy = side * rng.uniform(road - 3.0, road - 2.4);
      scene.boxes.push_back({Vec3(cx - 0.9, cy - 0.3, 0.0), Vec3(cx + 0.9, cy + 0.3, 1.0),
                             LidarClass::kTwoWheeler});
      scene.cylinders.push_back({cx, cy, 0.3, 1.0, 1.8, LidarClass::kRider});
    }
  }
  return scene;
}

SynthSequence generate_street_sequence(const StreetConfig& config, std::uint64_t seed, int jobs) {
  if (config.frames < 0) throw Error(ErrorCode::kInvalidArgument, "negative frame count");
  SynthSequence seq;
  Rng rng(derive_seed(seed, 0));
  seq.scene = random_street_scene(config, rng);
  const Timestamp first{1'000'000};
  const Timestamp last = first + static_cast<Micros>(std::max(config.frames - 1, 0)) *
                                     config.frame_interval_us;
  seq.trajectory = constant_motion_track(first + (-200'000),
                                         last + config.sensor.revolution_us + 200'000,
                                         config.speed_mps, 0.0);
  std::vector<Micros> camera_offsets;
  for (int i = 0; i < config.frames; ++i) {
    // The camera fires while the scanner sweeps past its axis, within a few
    // columns' worth of time.
    camera_offsets.push_back(static_cast<Micros>(rng.uniform(-2000.0, 2000.0)));
  }
  seq.frames.resize(static_cast<std::size_t>(config.frames));
  parallel_for(seq.frames.size(), jobs, [&](std::size_t i) {
    const Timestamp start = first + static_cast<Micros>(i) * config.frame_interval_us;
    seq.frames[i] = synth_generate(seq.scene, seq.trajectory, start, start + camera_offsets[i],
                                   config.sensor, config.camera, derive_seed(seed, i + 1));
  });
  return seq;
}

CalibrationSet jitter_calibration(const CalibrationSet& calibration, double rotation_deg,
                                  double translation_m, Rng& rng) {
  const double r = deg_to_rad(rotation_deg);
  const Eigen::Matrix3d delta =
      (Eigen::AngleAxisd(rng.uniform(-r, r), Vec3::UnitZ()) *
       Eigen::AngleAxisd(rng.uniform(-r, r), Vec3::UnitY()) *
       Eigen::AngleAxisd(rng.uniform(-r, r), Vec3::UnitX()))
          .toRotationMatrix();
  const Vec3 shift(rng.uniform(-translation_m, translation_m),
                   rng.uniform(-translation_m, translation_m),
                   rng.uniform(-translation_m, translation_m));
  CalibrationSet out = calibration;
  const RigidTransform& c = calibration.camera_to_vehicle;
  out.camera_to_vehicle = RigidTransform(c.rotation() * delta, c.translation() + shift);
  return out;
}

LabelImage bleed_boundaries(const LabelImage& image, int radius, Rng& rng) {
  if (radius < 0) throw Error(ErrorCode::kInvalidArgument, "bleed radius must be >= 0");
  LabelImage out = image;
  if (radius == 0) return out;
  for (int v = 0; v < image.rows; ++v) {
    for (int u = 0; u < image.cols; ++u) {
      const int v0 = std::max(0, v - radius);
      const int v1 = std::min(image.rows - 1, v + radius);
      const int u0 = std::max(0, u - radius);
      const int u1 = std::min(image.cols - 1, u + radius);
      const std::uint8_t own = image.at(v, u);
      bool boundary = false;
      for (int y = v0; y <= v1 && !boundary; ++y) {
        for (int x = u0; x <= u1; ++x) {
          if (image.at(y, x) != own) {
            boundary = true;
            break;
          }
        }
      }
      if (!boundary) continue;
      const int y = v0 + static_cast<int>(rng.below(static_cast<std::uint64_t>(v1 - v0 + 1)));
      const int x = u0 + static_cast<int>(rng.below(static_cast<std::uint64_t>(u1 - u0 + 1)));
      out.at(v, u) = image.at(y, x);
    }
  }
  return out;
}

}  // namespace lila
