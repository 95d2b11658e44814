#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "lila/geometry.hpp"
#include "lila/label_space.hpp"
#include "lila/scan_projection.hpp"

namespace lila {

/// Why a point did or did not receive a label.
enum class Provenance : std::uint8_t {
  kTransferred = 0,
  kOutOfView = 1,
  kOccluded = 2,
  kInvalid = 3,
};
std::string_view provenance_name(Provenance p);

struct LabeledScan {
  LidarScan scan;
  std::vector<std::uint8_t> labels;  // LidarClass ids, one per point
  std::vector<Provenance> provenance;
};

/// Throws LengthMismatch / InvalidArgument if the per-point arrays are
/// inconsistent or a non-transferred point carries a label.
void validate_labeled_scan(const LabeledScan& labeled);

struct FrameBundle {
  LidarScan scan;
  LabelImage semantic_image;  // Cityscapes ids are remapped on the fly
  Timestamp camera_time;
  CalibrationSet calibration;
  PoseTrack odometry;
  BeamTable beams = BeamTable::uniform();
};

struct AutolabelOptions {
  bool ego_motion_correction = true;
  double occlusion_epsilon_m = 0.5;
};

/// Per-point result of the geometric stage, before occlusion handling.
struct PointProjection {
  Provenance status = Provenance::kInvalid;  // kInvalid, kOutOfView or kTransferred
  int u = -1;                                // nearest pixel column
  int v = -1;                                // nearest pixel row
  double depth = 0.0;                        // camera-frame z
  Vec3 camera_point = Vec3::Zero();
};

/// LiDAR -> vehicle -> ego-motion correction to camera time -> camera -> pixel,
/// for every point in the bundle's scan.
std::vector<PointProjection> project_points(const FrameBundle& bundle,
                                            const AutolabelOptions& options = {});

struct PixelDepth {
  int u = 0;
  int v = 0;
  double depth = 0.0;
};

/// Within each pixel, flags points farther than the nearest one by more than
/// `epsilon_m`. Result depends only on the multiset of inputs.
std::vector<std::uint8_t> occlusion_filter(std::span<const PixelDepth> points, double epsilon_m);

/// Full label transfer for one frame. Throws CalibrationMismatch when the
/// semantic image size disagrees with the intrinsics.
LabeledScan autolabel_frame(const FrameBundle& bundle, const AutolabelOptions& options = {});

struct ProvenanceCounts {
  std::size_t transferred = 0;
  std::size_t out_of_view = 0;
  std::size_t occluded = 0;
  std::size_t invalid = 0;

  std::size_t total() const { return transferred + out_of_view + occluded + invalid; }
  ProvenanceCounts& operator+=(const ProvenanceCounts& o);
};
ProvenanceCounts count_provenance(const LabeledScan& labeled);

/// True iff the wrapped deviation between scanner and camera azimuths is at
/// most half the window width `gamma_h`.
bool heading_ok(double camera_azimuth, double scanner_azimuth, double gamma_h);

struct FrameHeading {
  double camera_azimuth = 0.0;
  double scanner_azimuth = 0.0;
};

/// Indices of the frames that pass heading_ok, in input order.
std::vector<std::size_t> filter_frames(std::span<const FrameHeading> frames, double gamma_h);

/// Azimuth of the camera principal axis expressed in the LiDAR frame.
double camera_azimuth(const CalibrationSet& calibration);

/// Azimuth the scanner was pointing at time `t`, by linear interpolation of
/// (time, azimuth) samples of the scan; extrapolates from the nearest pair
/// outside the sampled span. nullopt for scans without two distinct times.
std::optional<double> scanner_azimuth_at(const LidarScan& scan, Timestamp t);

}  // namespace lila
