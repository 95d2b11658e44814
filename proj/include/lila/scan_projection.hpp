#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "lila/geometry.hpp"

namespace lila {

inline constexpr int kDefaultRings = 32;
inline constexpr int kDefaultColumns = 1800;
/// Range value carried by points that produced no return.
inline constexpr float kInvalidRange = 0.0f;

struct LidarPoint {
  std::uint16_t ring = 0;
  float azimuth = 0.0f;  // radians in [0, 2pi), 0 = vehicle forward, CCW positive
  float range = kInvalidRange;
  float reflectivity = 0.0f;
  Timestamp time;

  bool valid() const { return range > 0.0f; }
  bool operator==(const LidarPoint&) const = default;
};

struct LidarScan {
  std::vector<LidarPoint> points;
  int rings = kDefaultRings;
  int columns = kDefaultColumns;
  Timestamp revolution_start;

  bool operator==(const LidarScan&) const = default;
};

/// Per-ring elevation angles in radians, row 0 = highest beam.
class BeamTable {
 public:
  /// Throws InvalidArgument unless elevations are finite and strictly decreasing.
  explicit BeamTable(std::vector<double> elevations_rad);

  /// Uniform spacing from +15 deg (row 0) down to -25 deg (last row).
  static BeamTable uniform(int rings = kDefaultRings, double top_deg = 15.0,
                           double bottom_deg = -25.0);

  int rings() const { return static_cast<int>(elevations_.size()); }
  double elevation(int ring) const { return elevations_.at(static_cast<std::size_t>(ring)); }
  const std::vector<double>& elevations() const { return elevations_; }

 private:
  std::vector<double> elevations_;
};

struct Cell {
  int row = 0;
  int col = 0;
  bool operator==(const Cell&) const = default;
};

/// Image cell for a point. Forward (azimuth 0) lands in the center column and
/// columns decrease as azimuth grows counterclockwise, so the image reads the
/// horizon left to right as seen from the sensor.
Cell cell_of(const LidarPoint& point, int columns);

/// Azimuth bin index k = floor(azimuth / 2pi * columns), clamped to [0, columns).
int azimuth_bin(double azimuth, int columns);
int column_of_bin(int bin, int columns);
int bin_of_column(int col, int columns);
/// Azimuth at the center of the bin that maps to `col`.
float column_center_azimuth(int col, int columns);

/// Cylindrical depth/reflectivity image. All grids are row-major rows x cols.
struct LidarImage {
  int rows = 0;
  int cols = 0;
  Timestamp revolution_start;
  std::vector<float> depth;
  std::vector<float> reflectivity;
  std::vector<std::uint8_t> valid;
  std::vector<std::int64_t> point_time;
  /// Index into the source scan's point list; -1 where no point landed.
  std::vector<std::int32_t> point_index;

  LidarImage() = default;
  LidarImage(int rows, int cols);

  std::size_t index(int row, int col) const {
    return static_cast<std::size_t>(row) * static_cast<std::size_t>(cols) +
           static_cast<std::size_t>(col);
  }
  std::size_t size() const { return depth.size(); }
  std::size_t valid_count() const;
};

/// Bins every valid point into its cell. When two points share a cell the
/// nearer range wins (first one on exact ties).
LidarImage scan_to_image(const LidarScan& scan);

/// Emits one point per valid cell, row-major, with azimuth at the bin center.
/// Throws ShapeMismatch when the beam table does not match the image rows.
LidarScan image_to_scan(const LidarImage& image, const BeamTable& beams);

/// Spherical to Cartesian in the LiDAR frame at a cell's bin-center azimuth.
Vec3 cell_to_xyz(int row, int col, double range, const BeamTable& beams, int columns);

/// Same conversion at an arbitrary azimuth.
Vec3 spherical_to_xyz(double range, double azimuth, double elevation);

}  // namespace lila
