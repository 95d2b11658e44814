#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "lila/geometry.hpp"
#include "lila/scan_projection.hpp"

namespace lila::io {

/// Shortest decimal text that parses back to exactly `value`.
std::string format_double(double value);

struct CalibrationFile {
  CalibrationSet calibration;
  std::optional<BeamTable> beams;  // ring_elevation_rad, row 0 first
};

/// `key = value` lines; '#' starts a comment. Keys: fx fy cx cy width height
/// t_r_us lidar_to_vehicle camera_to_vehicle (16 row-major reals each) and
/// optionally ring_elevation_rad. Throws ParseError on unknown, duplicate
/// or missing keys.
CalibrationFile parse_calibration(std::string_view text);
std::string format_calibration(const CalibrationFile& calib);
CalibrationFile read_calibration(const std::filesystem::path& path);
void write_calibration(const std::filesystem::path& path, const CalibrationFile& calib);

/// CSV with header `timestamp_us,tx,ty,tz,qx,qy,qz,qw`: vehicle-in-world
/// translation and unit quaternion, strictly increasing timestamps.
PoseTrack parse_pose_log(std::string_view text);
std::string format_pose_log(const PoseTrack& track);
PoseTrack read_pose_log(const std::filesystem::path& path);
void write_pose_log(const std::filesystem::path& path, const PoseTrack& track);

/// CSV `iteration,loss`, iterations counted from `first_iteration`.
std::string format_loss_trace(std::span<const double> losses, int first_iteration = 1);

}  // namespace lila::io
