#include "lila/scan_projection.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "lila/error.hpp"

namespace lila {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}  // namespace

BeamTable::BeamTable(std::vector<double> elevations_rad) : elevations_(std::move(elevations_rad)) {
  if (elevations_.empty()) throw Error(ErrorCode::kInvalidArgument, "beam table is empty");
  for (std::size_t i = 0; i < elevations_.size(); ++i) {
    if (!std::isfinite(elevations_[i])) {
      throw Error(ErrorCode::kInvalidArgument, "beam elevation is not finite");
    }
    if (i > 0 && !(elevations_[i] < elevations_[i - 1])) {
      throw Error(ErrorCode::kInvalidArgument,
                  "beam elevations must strictly decrease with row (row " + std::to_string(i) +
                      ")");
    }
  }
}

BeamTable BeamTable::uniform(int rings, double top_deg, double bottom_deg) {
  if (rings < 1) throw Error(ErrorCode::kInvalidArgument, "ring count must be positive");
  std::vector<double> elevations(static_cast<std::size_t>(rings));
  for (int r = 0; r < rings; ++r) {
    const double s = rings == 1 ? 0.0 : static_cast<double>(r) / (rings - 1);
    elevations[static_cast<std::size_t>(r)] = deg_to_rad(top_deg + s * (bottom_deg - top_deg));
  }
  return BeamTable(std::move(elevations));
}

int azimuth_bin(double azimuth, int columns) {
  const int bin = static_cast<int>(std::floor(azimuth / kTwoPi * columns));
  return std::clamp(bin, 0, columns - 1);
}

int column_of_bin(int bin, int columns) {
  const int col = (columns / 2 - bin) % columns;
  return col < 0 ? col + columns : col;
}

int bin_of_column(int col, int columns) {
  // column_of_bin is an involution up to the center offset.
  const int bin = (columns / 2 - col) % columns;
  return bin < 0 ? bin + columns : bin;
}

float column_center_azimuth(int col, int columns) {
  const int bin = bin_of_column(col, columns);
  return static_cast<float>((bin + 0.5) * kTwoPi / columns);
}

Cell cell_of(const LidarPoint& point, int columns) {
  return {point.ring, column_of_bin(azimuth_bin(point.azimuth, columns), columns)};
}

LidarImage::LidarImage(int rows_in, int cols_in) : rows(rows_in), cols(cols_in) {
  if (rows < 0 || cols < 0) throw Error(ErrorCode::kInvalidArgument, "negative image size");
  const auto n = static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols);
  depth.assign(n, 0.0f);
  reflectivity.assign(n, 0.0f);
  valid.assign(n, 0);
  point_time.assign(n, 0);
  point_index.assign(n, -1);
}

std::size_t LidarImage::valid_count() const {
  return static_cast<std::size_t>(std::count(valid.begin(), valid.end(), std::uint8_t{1}));
}

LidarImage scan_to_image(const LidarScan& scan) {
  if (scan.rings < 1 || scan.columns < 1) {
    throw Error(ErrorCode::kInvalidArgument, "scan needs positive rings and columns");
  }
  LidarImage image(scan.rings, scan.columns);
  image.revolution_start = scan.revolution_start;
  for (std::size_t i = 0; i < scan.points.size(); ++i) {
    const LidarPoint& p = scan.points[i];
    if (!p.valid()) continue;
    if (p.ring >= scan.rings) {
      throw Error(ErrorCode::kInvalidArgument,
                  "point ring " + std::to_string(p.ring) + " outside scan rings");
    }
    if (!(p.azimuth >= 0.0f && static_cast<double>(p.azimuth) < kTwoPi)) {
      throw Error(ErrorCode::kInvalidArgument, "point azimuth outside [0, 2pi)");
    }
    const Cell cell = cell_of(p, scan.columns);
    const std::size_t k = image.index(cell.row, cell.col);
    if (image.valid[k] && !(p.range < image.depth[k])) continue;
    image.valid[k] = 1;
    image.depth[k] = p.range;
    image.reflectivity[k] = p.reflectivity;
    image.point_time[k] = p.time.us;
    image.point_index[k] = static_cast<std::int32_t>(i);
  }
  return image;
}

LidarScan image_to_scan(const LidarImage& image, const BeamTable& beams) {
  if (beams.rings() != image.rows) {
    throw Error(ErrorCode::kShapeMismatch, "beam table has " + std::to_string(beams.rings()) +
                                               " rings, image has " + std::to_string(image.rows));
  }
  LidarScan scan;
  scan.rings = image.rows;
  scan.columns = image.cols;
  scan.revolution_start = image.revolution_start;
  scan.points.reserve(image.valid_count());
  for (int r = 0; r < image.rows; ++r) {
    for (int c = 0; c < image.cols; ++c) {
      const std::size_t k = image.index(r, c);
      if (!image.valid[k]) continue;
      LidarPoint p;
      p.ring = static_cast<std::uint16_t>(r);
      p.azimuth = column_center_azimuth(c, image.cols);
      p.range = image.depth[k];
      p.reflectivity = image.reflectivity[k];
      p.time = Timestamp{image.point_time[k]};
      scan.points.push_back(p);
    }
  }
  return scan;
}

Vec3 spherical_to_xyz(double range, double azimuth, double elevation) {
  const double horizontal = range * std::cos(elevation);
  return {horizontal * std::cos(azimuth), horizontal * std::sin(azimuth),
          range * std::sin(elevation)};
}

Vec3 cell_to_xyz(int row, int col, double range, const BeamTable& beams, int columns) {
  const double azimuth = (bin_of_column(col, columns) + 0.5) * kTwoPi / columns;
  return spherical_to_xyz(range, azimuth, beams.elevation(row));
}

}  // namespace lila
