#include "lila/autolabel.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <unordered_map>

#include "lila/error.hpp"

namespace lila {

std::string_view provenance_name(Provenance p) {
  switch (p) {
    case Provenance::kTransferred: return "transferred";
    case Provenance::kOutOfView: return "out_of_view";
    case Provenance::kOccluded: return "occluded";
    case Provenance::kInvalid: return "invalid";
  }
  return "unknown";
}

void validate_labeled_scan(const LabeledScan& labeled) {
  const std::size_t n = labeled.scan.points.size();
  if (labeled.labels.size() != n || labeled.provenance.size() != n) {
    throw Error(ErrorCode::kLengthMismatch, "labels/provenance do not match point count");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!is_lidar_class_id(labeled.labels[i])) {
      throw Error(ErrorCode::kUnknownLabelId, "label id " + std::to_string(labeled.labels[i]));
    }
    if (labeled.provenance[i] != Provenance::kTransferred && labeled.labels[i] != kUnlabeledId) {
      throw Error(ErrorCode::kInvalidArgument,
                  "point " + std::to_string(i) + " is labeled but was not transferred");
    }
  }
}

std::vector<PointProjection> project_points(const FrameBundle& bundle,
                                            const AutolabelOptions& options) {
  const CalibrationSet& calib = bundle.calibration;
  calib.intrinsics.validate();
  const RigidTransform vehicle_to_camera = inverse(calib.camera_to_vehicle);

  std::vector<PointProjection> out(bundle.scan.points.size());
  for (std::size_t i = 0; i < bundle.scan.points.size(); ++i) {
    const LidarPoint& p = bundle.scan.points[i];
    PointProjection& proj = out[i];
    if (!p.valid()) continue;
    if (p.ring >= bundle.beams.rings()) {
      throw Error(ErrorCode::kShapeMismatch,
                  "point ring " + std::to_string(p.ring) + " outside beam table");
    }
    const Vec3 p_lidar = spherical_to_xyz(p.range, p.azimuth, bundle.beams.elevation(p.ring));
    const Vec3 p_vehicle = apply(calib.lidar_to_vehicle, p_lidar);

    Vec3 p_corrected = p_vehicle;
    if (options.ego_motion_correction) {
      // Camera reference time sits at the image center for rolling shutters.
      const Micros dt = delta_t(bundle.camera_time, p.time, calib.intrinsics.shutter_interval_us);
      const Timestamp reference = p.time + dt;
      if (!bundle.odometry.covers(p.time) || !bundle.odometry.covers(reference)) continue;
      // Vehicle motion from measurement time to camera reference time,
      // expressed in the measurement-time frame.
      const RigidTransform motion = relative_motion(bundle.odometry, reference, p.time);
      p_corrected = ego_motion_correct(p_vehicle, motion);
    }

    proj.camera_point = apply(vehicle_to_camera, p_corrected);
    proj.depth = proj.camera_point.z();
    const auto pixel = pinhole_project(calib.intrinsics, proj.camera_point);
    proj.status = Provenance::kOutOfView;
    if (!pixel) continue;
    const auto u = static_cast<int>(std::lround(pixel->u));
    const auto v = static_cast<int>(std::lround(pixel->v));
    if (u >= calib.intrinsics.width || v >= calib.intrinsics.height) continue;
    proj.u = u;
    proj.v = v;
    proj.status = Provenance::kTransferred;
  }
  return out;
}

std::vector<std::uint8_t> occlusion_filter(std::span<const PixelDepth> points, double epsilon_m) {
  auto key = [](const PixelDepth& p) {
    return (static_cast<std::int64_t>(p.v) << 32) ^ static_cast<std::uint32_t>(p.u);
  };
  std::unordered_map<std::int64_t, double> nearest;
  nearest.reserve(points.size());
  for (const PixelDepth& p : points) {
    auto [it, inserted] = nearest.try_emplace(key(p), p.depth);
    if (!inserted) it->second = std::min(it->second, p.depth);
  }
  std::vector<std::uint8_t> occluded(points.size(), 0);
  for (std::size_t i = 0; i < points.size(); ++i) {
    occluded[i] = points[i].depth > nearest.at(key(points[i])) + epsilon_m ? 1 : 0;
  }
  return occluded;
}

LabeledScan autolabel_frame(const FrameBundle& bundle, const AutolabelOptions& options) {
  const CameraIntrinsics& intr = bundle.calibration.intrinsics;
  const LabelImage& semantic = bundle.semantic_image;
  if (semantic.rows != intr.height || semantic.cols != intr.width) {
    throw Error(ErrorCode::kCalibrationMismatch,
                "semantic image is " + std::to_string(semantic.cols) + "x" +
                    std::to_string(semantic.rows) + " but intrinsics expect " +
                    std::to_string(intr.width) + "x" + std::to_string(intr.height));
  }
  const LabelImage lidar_labels =
      semantic.label_set == LabelSet::kCityscapes ? remap_image(semantic) : semantic;
  if (semantic.label_set == LabelSet::kLidar) validate_label_image(lidar_labels);

  const std::vector<PointProjection> projections = project_points(bundle, options);

  std::vector<PixelDepth> in_view;
  std::vector<std::size_t> in_view_index;
  for (std::size_t i = 0; i < projections.size(); ++i) {
    if (projections[i].status != Provenance::kTransferred) continue;
    in_view.push_back({projections[i].u, projections[i].v, projections[i].depth});
    in_view_index.push_back(i);
  }
  const std::vector<std::uint8_t> occluded =
      occlusion_filter(in_view, options.occlusion_epsilon_m);

  LabeledScan out;
  out.scan = bundle.scan;
  out.labels.assign(projections.size(), kUnlabeledId);
  out.provenance.resize(projections.size());
  for (std::size_t i = 0; i < projections.size(); ++i) out.provenance[i] = projections[i].status;
  for (std::size_t j = 0; j < in_view.size(); ++j) {
    const std::size_t i = in_view_index[j];
    if (occluded[j]) {
      out.provenance[i] = Provenance::kOccluded;
      continue;
    }
    out.labels[i] = lidar_labels.at(in_view[j].v, in_view[j].u);
  }
  return out;
}

ProvenanceCounts& ProvenanceCounts::operator+=(const ProvenanceCounts& o) {
  transferred += o.transferred;
  out_of_view += o.out_of_view;
  occluded += o.occluded;
  invalid += o.invalid;
  return *this;
}

ProvenanceCounts count_provenance(const LabeledScan& labeled) {
  ProvenanceCounts counts;
  for (const Provenance p : labeled.provenance) {
    switch (p) {
      case Provenance::kTransferred: ++counts.transferred; break;
      case Provenance::kOutOfView: ++counts.out_of_view; break;
      case Provenance::kOccluded: ++counts.occluded; break;
      case Provenance::kInvalid: ++counts.invalid; break;
    }
  }
  return counts;
}

bool heading_ok(double camera_azimuth, double scanner_azimuth, double gamma_h) {
  return std::abs(wrap_to_pi(scanner_azimuth - camera_azimuth)) <= gamma_h / 2.0;
}

std::vector<std::size_t> filter_frames(std::span<const FrameHeading> frames, double gamma_h) {
  std::vector<std::size_t> kept;
  for (std::size_t i = 0; i < frames.size(); ++i) {
    if (heading_ok(frames[i].camera_azimuth, frames[i].scanner_azimuth, gamma_h)) {
      kept.push_back(i);
    }
  }
  return kept;
}

double camera_azimuth(const CalibrationSet& calibration) {
  const Vec3 axis_vehicle = calibration.camera_to_vehicle.rotation() * Vec3::UnitZ();
  const Vec3 axis_lidar = calibration.lidar_to_vehicle.rotation().transpose() * axis_vehicle;
  return wrap_to_two_pi(std::atan2(axis_lidar.y(), axis_lidar.x()));
}

std::optional<double> scanner_azimuth_at(const LidarScan& scan, Timestamp t) {
  // One sample per distinct firing time; the first point at a time wins.
  std::vector<std::pair<std::int64_t, double>> samples;
  samples.reserve(scan.points.size());
  for (const LidarPoint& p : scan.points) samples.emplace_back(p.time.us, p.azimuth);
  std::stable_sort(samples.begin(), samples.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  samples.erase(std::unique(samples.begin(), samples.end(),
                            [](const auto& a, const auto& b) { return a.first == b.first; }),
                samples.end());
  if (samples.size() < 2) return std::nullopt;

  auto upper = std::upper_bound(samples.begin(), samples.end(), t.us,
                                [](std::int64_t value, const auto& s) { return value < s.first; });
  std::size_t hi = static_cast<std::size_t>(upper - samples.begin());
  hi = std::clamp<std::size_t>(hi, 1, samples.size() - 1);
  const auto& a = samples[hi - 1];
  const auto& b = samples[hi];
  const double sweep = wrap_to_pi(b.second - a.second);
  const double s = static_cast<double>(t.us - a.first) / static_cast<double>(b.first - a.first);
  return wrap_to_two_pi(a.second + s * sweep);
}

}  // namespace lila
