#include "lila/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "lila/error.hpp"

namespace lila {

double wrap_to_pi(double radians) {
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  double wrapped = std::fmod(radians, kTwoPi);
  if (wrapped <= -std::numbers::pi) wrapped += kTwoPi;
  if (wrapped > std::numbers::pi) wrapped -= kTwoPi;
  return wrapped;
}

double wrap_to_two_pi(double radians) {
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  double wrapped = std::fmod(radians, kTwoPi);
  if (wrapped < 0.0) wrapped += kTwoPi;
  // fmod of a tiny negative value can round up to exactly 2pi.
  if (wrapped >= kTwoPi) wrapped = 0.0;
  return wrapped;
}

double deg_to_rad(double degrees) { return degrees * std::numbers::pi / 180.0; }

RigidTransform::RigidTransform()
    : rotation_(Eigen::Matrix3d::Identity()), translation_(Vec3::Zero()) {}

RigidTransform::RigidTransform(const Eigen::Matrix3d& rotation, const Vec3& translation)
    : rotation_(rotation), translation_(translation) {
  if (!rotation_.allFinite() || !translation_.allFinite()) {
    throw Error(ErrorCode::kInvalidArgument, "rigid transform has non-finite entries");
  }
  const double orthogonality =
      (rotation_.transpose() * rotation_ - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff();
  if (orthogonality >= 1e-9 || rotation_.determinant() <= 0.0) {
    throw Error(ErrorCode::kInvalidArgument,
                "rotation is not orthonormal with det +1 (deviation " +
                    std::to_string(orthogonality) + ")");
  }
}

RigidTransform RigidTransform::from_translation(double x, double y, double z) {
  return {Eigen::Matrix3d::Identity(), Vec3(x, y, z)};
}

RigidTransform RigidTransform::from_rotation_z(double radians) {
  return {Eigen::AngleAxisd(radians, Vec3::UnitZ()).toRotationMatrix(), Vec3::Zero()};
}

RigidTransform RigidTransform::from_quaternion(const Eigen::Quaterniond& q,
                                               const Vec3& translation) {
  const double norm = q.norm();
  if (!std::isfinite(norm) || std::abs(norm - 1.0) > 1e-6) {
    throw Error(ErrorCode::kInvalidArgument, "quaternion is not unit length");
  }
  return {q.normalized().toRotationMatrix(), translation};
}

RigidTransform RigidTransform::from_matrix(const Eigen::Matrix4d& m) {
  const Eigen::RowVector4d last = m.row(3);
  if (last != Eigen::RowVector4d(0.0, 0.0, 0.0, 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "homogeneous matrix last row must be 0 0 0 1");
  }
  return {m.topLeftCorner<3, 3>(), m.topRightCorner<3, 1>()};
}

Eigen::Matrix4d RigidTransform::matrix() const {
  Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
  m.topLeftCorner<3, 3>() = rotation_;
  m.topRightCorner<3, 1>() = translation_;
  return m;
}

Eigen::Quaterniond RigidTransform::quaternion() const {
  Eigen::Quaterniond q(rotation_);
  q.normalize();
  // Canonical sign keeps pose logs stable.
  if (q.w() < 0.0) q.coeffs() = -q.coeffs();
  return q;
}

double RigidTransform::distance_to(const RigidTransform& other) const {
  return std::max((rotation_ - other.rotation_).cwiseAbs().maxCoeff(),
                  (translation_ - other.translation_).cwiseAbs().maxCoeff());
}

RigidTransform compose(const RigidTransform& a, const RigidTransform& b) {
  return {RigidTransform::Unchecked{}, a.rotation_ * b.rotation_,
          a.rotation_ * b.translation_ + a.translation_};
}

RigidTransform inverse(const RigidTransform& t) {
  const Eigen::Matrix3d rt = t.rotation_.transpose();
  return {RigidTransform::Unchecked{}, rt, -(rt * t.translation_)};
}

Vec3 apply(const RigidTransform& t, const Vec3& p) {
  return t.rotation() * p + t.translation();
}

RigidTransform interpolate(const RigidTransform& a, const RigidTransform& b, double s) {
  if (s <= 0.0 || a == b) return a;
  if (s >= 1.0) return b;
  const Eigen::Quaterniond qa(a.rotation_);
  const Eigen::Quaterniond qb(b.rotation_);
  const Eigen::Matrix3d rotation = qa.slerp(s, qb).normalized().toRotationMatrix();
  const Vec3 translation = (1.0 - s) * a.translation_ + s * b.translation_;
  return {RigidTransform::Unchecked{}, rotation, translation};
}

Micros delta_t(Timestamp camera_time, Timestamp point_time, Micros shutter_interval) {
  return camera_time.us - point_time.us + shutter_interval / 2;
}

PoseTrack::PoseTrack(std::vector<TimedPose> samples) : samples_(std::move(samples)) {
  for (std::size_t i = 1; i < samples_.size(); ++i) {
    if (samples_[i].time <= samples_[i - 1].time) {
      throw Error(ErrorCode::kInvalidArgument,
                  "pose track timestamps must be strictly increasing (index " +
                      std::to_string(i) + ")");
    }
  }
}

Timestamp PoseTrack::start() const {
  if (samples_.empty()) throw Error(ErrorCode::kOutOfRange, "empty pose track");
  return samples_.front().time;
}

Timestamp PoseTrack::end() const {
  if (samples_.empty()) throw Error(ErrorCode::kOutOfRange, "empty pose track");
  return samples_.back().time;
}

bool PoseTrack::covers(Timestamp t) const {
  return !samples_.empty() && samples_.front().time <= t && t <= samples_.back().time;
}

RigidTransform PoseTrack::pose_at(Timestamp t) const {
  if (!covers(t)) {
    throw Error(ErrorCode::kOutOfRange,
                "timestamp " + std::to_string(t.us) + " outside pose track span");
  }
  const auto upper = std::upper_bound(
      samples_.begin(), samples_.end(), t,
      [](Timestamp value, const TimedPose& sample) { return value < sample.time; });
  const auto& before = *std::prev(upper);
  if (before.time == t || upper == samples_.end()) return before.pose;
  const double s =
      static_cast<double>(t - before.time) / static_cast<double>(upper->time - before.time);
  return interpolate(before.pose, upper->pose, s);
}

RigidTransform relative_motion(const PoseTrack& track, Timestamp t_from, Timestamp t_to) {
  const RigidTransform from = track.pose_at(t_from);
  if (t_from == t_to) return RigidTransform::identity();
  const RigidTransform to = track.pose_at(t_to);
  if (from == to) return RigidTransform::identity();
  return compose(inverse(to), from);
}

Vec3 ego_motion_correct(const Vec3& p_vehicle, const RigidTransform& motion) {
  return apply(inverse(motion), p_vehicle);
}

void CameraIntrinsics::validate() const {
  if (!(fx > 0.0) || !(fy > 0.0) || !std::isfinite(fx) || !std::isfinite(fy) ||
      !std::isfinite(cx) || !std::isfinite(cy)) {
    throw Error(ErrorCode::kInvalidArgument, "camera focal lengths must be positive and finite");
  }
  if (width <= 0 || height <= 0) {
    throw Error(ErrorCode::kInvalidArgument, "camera image size must be positive");
  }
  if (shutter_interval_us < 0) {
    throw Error(ErrorCode::kInvalidArgument, "shutter interval must be non-negative");
  }
}

std::optional<PixelCoord> pinhole_project(const CameraIntrinsics& intrinsics,
                                          const Vec3& p_camera) {
  if (!(p_camera.z() > 0.0)) return std::nullopt;
  const double u = intrinsics.fx * p_camera.x() / p_camera.z() + intrinsics.cx;
  const double v = intrinsics.fy * p_camera.y() / p_camera.z() + intrinsics.cy;
  if (!(u >= 0.0 && u < intrinsics.width && v >= 0.0 && v < intrinsics.height)) {
    return std::nullopt;
  }
  return PixelCoord{u, v};
}

Eigen::Matrix3d forward_camera_rotation() {
  Eigen::Matrix3d r;
  // Columns are the camera axes expressed in vehicle coordinates.
  r.col(0) = Vec3(0.0, -1.0, 0.0);
  r.col(1) = Vec3(0.0, 0.0, -1.0);
  r.col(2) = Vec3(1.0, 0.0, 0.0);
  return r;
}

}  // namespace lila
