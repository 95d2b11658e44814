#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace lila {

using Vec3 = Eigen::Vector3d;

/// Signed duration in microseconds.
using Micros = std::int64_t;

/// Absolute time in microseconds since epoch.
struct Timestamp {
  std::int64_t us = 0;

  friend constexpr auto operator<=>(Timestamp, Timestamp) = default;
  friend constexpr Timestamp operator+(Timestamp t, Micros d) { return {t.us + d}; }
  friend constexpr Micros operator-(Timestamp a, Timestamp b) { return a.us - b.us; }
};

/// Wraps an angle to (-pi, pi].
double wrap_to_pi(double radians);
/// Wraps an angle to [0, 2pi).
double wrap_to_two_pi(double radians);
double deg_to_rad(double degrees);

/// SE(3) element stored as a 3x3 rotation matrix plus translation.
/// Maps points from the child frame into the parent frame: p' = R p + t.
class RigidTransform {
 public:
  RigidTransform();

  /// Throws InvalidArgument unless `rotation` is a proper rotation
  /// (||R^T R - I||_inf < 1e-9, det > 0) and all entries are finite.
  RigidTransform(const Eigen::Matrix3d& rotation, const Vec3& translation);

  static RigidTransform identity() { return {}; }
  static RigidTransform from_translation(double x, double y, double z);
  static RigidTransform from_rotation_z(double radians);
  static RigidTransform from_quaternion(const Eigen::Quaterniond& q, const Vec3& translation);
  /// Accepts a homogeneous 4x4 matrix whose last row must be (0 0 0 1).
  static RigidTransform from_matrix(const Eigen::Matrix4d& m);

  const Eigen::Matrix3d& rotation() const { return rotation_; }
  const Vec3& translation() const { return translation_; }
  Eigen::Matrix4d matrix() const;
  Eigen::Quaterniond quaternion() const;

  /// Max-norm distance of both parts; used by tests and tolerances.
  double distance_to(const RigidTransform& other) const;

  bool operator==(const RigidTransform& other) const {
    return rotation_ == other.rotation_ && translation_ == other.translation_;
  }

 private:
  struct Unchecked {};
  RigidTransform(Unchecked, const Eigen::Matrix3d& rotation, const Vec3& translation)
      : rotation_(rotation), translation_(translation) {}

  friend RigidTransform compose(const RigidTransform& a, const RigidTransform& b);
  friend RigidTransform inverse(const RigidTransform& t);
  friend RigidTransform interpolate(const RigidTransform& a, const RigidTransform& b, double s);

  Eigen::Matrix3d rotation_;
  Vec3 translation_;
};

/// Returns the transform that applies `b` first, then `a`.
RigidTransform compose(const RigidTransform& a, const RigidTransform& b);
RigidTransform inverse(const RigidTransform& t);
Vec3 apply(const RigidTransform& t, const Vec3& p);

/// Linear translation / spherical-linear rotation blend, s in [0, 1].
/// Returns `a` and `b` exactly at the endpoints.
RigidTransform interpolate(const RigidTransform& a, const RigidTransform& b, double s);

/// Time offset between a point measurement and the camera reference time.
/// Integer arithmetic; t_r / 2 truncates toward zero.
Micros delta_t(Timestamp camera_time, Timestamp point_time, Micros shutter_interval);

struct TimedPose {
  Timestamp time;
  RigidTransform pose;  // vehicle-in-world
};

/// Odometry samples with strictly increasing timestamps.
class PoseTrack {
 public:
  PoseTrack() = default;
  /// Throws InvalidArgument if timestamps are not strictly increasing.
  explicit PoseTrack(std::vector<TimedPose> samples);

  const std::vector<TimedPose>& samples() const { return samples_; }
  bool empty() const { return samples_.empty(); }
  std::size_t size() const { return samples_.size(); }
  Timestamp start() const;
  Timestamp end() const;
  bool covers(Timestamp t) const;

  /// Vehicle pose at `t`. Throws OutOfRange outside [start, end] or when the
  /// track holds fewer than two samples and `t` is not a sample time.
  RigidTransform pose_at(Timestamp t) const;

 private:
  std::vector<TimedPose> samples_;
};

/// pose(t_to)^-1 * pose(t_from): maps coordinates expressed in the vehicle
/// frame at `t_from` into the vehicle frame at `t_to`.
RigidTransform relative_motion(const PoseTrack& track, Timestamp t_from, Timestamp t_to);

/// Moves a point measured in the vehicle frame through the inverse of the
/// vehicle motion `motion`.
Vec3 ego_motion_correct(const Vec3& p_vehicle, const RigidTransform& motion);

struct CameraIntrinsics {
  double fx = 1.0;
  double fy = 1.0;
  double cx = 0.0;
  double cy = 0.0;
  int width = 1;
  int height = 1;
  Micros shutter_interval_us = 0;

  /// Throws InvalidArgument on non-positive focal lengths or sizes.
  void validate() const;
};

struct PixelCoord {
  double u = 0.0;
  double v = 0.0;
};

/// Camera frame convention: x right, y down, z forward. Returns nullopt for
/// points with z <= 0 or projections outside [0, width) x [0, height).
std::optional<PixelCoord> pinhole_project(const CameraIntrinsics& intrinsics, const Vec3& p_camera);

struct CalibrationSet {
  RigidTransform lidar_to_vehicle;
  RigidTransform camera_to_vehicle;
  CameraIntrinsics intrinsics;
};

/// Rotation taking camera axes (x right, y down, z forward) to vehicle axes
/// (x forward, y left, z up) for a camera looking along vehicle +x.
Eigen::Matrix3d forward_camera_rotation();

}  // namespace lila
