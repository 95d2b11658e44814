#include "lila/io/scan_file.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "lila/io/binary.hpp"

namespace lila::io {

namespace {

constexpr std::string_view kScanMagic = "LLSC";
constexpr std::string_view kLabelMagic = "LLLB";
constexpr std::uint32_t kLabelVersion = 1;

bool azimuth_in_range(float az) {
  return az >= 0.0f && static_cast<double>(az) < 2.0 * std::numbers::pi;
}

}  // namespace

std::vector<std::uint8_t> serialize_scan(const LidarScan& scan) {
  constexpr int kMaxU16 = std::numeric_limits<std::uint16_t>::max();
  if (scan.rings < 1 || scan.rings > kMaxU16 || scan.columns < 1 || scan.columns > kMaxU16) {
    throw Error(ErrorCode::kInvalidArgument, "scan ring/column counts must fit in u16");
  }
  if (scan.points.size() > std::numeric_limits<std::uint32_t>::max()) {
    throw Error(ErrorCode::kInvalidArgument, "scan has too many points");
  }
  ByteWriter w;
  w.bytes().reserve(kScanHeaderBytes + kScanRecordBytes * scan.points.size());
  w.put_text(kScanMagic);
  w.put<std::uint32_t>(kScanFileVersion);
  w.put<std::uint32_t>(static_cast<std::uint32_t>(scan.points.size()));
  w.put<std::uint16_t>(static_cast<std::uint16_t>(scan.rings));
  w.put<std::uint16_t>(static_cast<std::uint16_t>(scan.columns));
  w.put<std::int64_t>(scan.revolution_start.us);
  for (std::size_t i = 0; i < scan.points.size(); ++i) {
    const LidarPoint& p = scan.points[i];
    if (p.ring >= scan.rings || !azimuth_in_range(p.azimuth)) {
      throw Error(ErrorCode::kInvalidArgument,
                  "point " + std::to_string(i) + " has ring or azimuth out of range");
    }
    w.put<std::uint16_t>(p.ring);
    w.put<float>(p.azimuth);
    w.put<float>(p.range);
    w.put<float>(p.reflectivity);
    w.put<std::int64_t>(p.time.us);
  }
  return std::move(w.bytes());
}

LidarScan deserialize_scan(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes, "scan file");
  r.expect_magic(kScanMagic);
  const auto version = r.get<std::uint32_t>();
  if (version != kScanFileVersion) {
    throw Error(ErrorCode::kVersionUnsupported,
                "scan file version " + std::to_string(version) + " is not supported");
  }
  const auto count = r.get<std::uint32_t>();
  LidarScan scan;
  scan.rings = r.get<std::uint16_t>();
  scan.columns = r.get<std::uint16_t>();
  scan.revolution_start.us = r.get<std::int64_t>();
  if (scan.rings == 0 || scan.columns == 0) {
    throw Error(ErrorCode::kParseError, "scan file declares zero rings or columns");
  }
  const std::size_t expected = static_cast<std::size_t>(count) * kScanRecordBytes;
  if (r.remaining() < expected) {
    throw Error(ErrorCode::kTruncatedFile, "scan file declares " + std::to_string(count) +
                                               " points but holds " +
                                               std::to_string(r.remaining() / kScanRecordBytes));
  }
  if (r.remaining() > expected) {
    throw Error(ErrorCode::kParseError, "scan file has trailing bytes after its records");
  }
  scan.points.resize(count);
  for (std::uint32_t i = 0; i < count; ++i) {
    LidarPoint& p = scan.points[i];
    p.ring = r.get<std::uint16_t>();
    p.azimuth = r.get<float>();
    p.range = r.get<float>();
    p.reflectivity = r.get<float>();
    p.time.us = r.get<std::int64_t>();
    if (p.ring >= scan.rings || !azimuth_in_range(p.azimuth)) {
      throw Error(ErrorCode::kParseError,
                  "scan record " + std::to_string(i) + " has ring or azimuth out of range");
    }
  }
  return scan;
}

void write_scan(const std::filesystem::path& path, const LidarScan& scan) {
  write_file_bytes(path, serialize_scan(scan));
}

LidarScan read_scan(const std::filesystem::path& path) {
  return deserialize_scan(read_file_bytes(path));
}

std::vector<std::uint8_t> serialize_labels(std::span<const std::uint8_t> labels,
                                           std::span<const Provenance> provenance) {
  if (labels.size() != provenance.size()) {
    throw Error(ErrorCode::kLengthMismatch, "labels and provenance differ in length");
  }
  ByteWriter w;
  w.put_text(kLabelMagic);
  w.put<std::uint32_t>(kLabelVersion);
  w.put<std::uint32_t>(static_cast<std::uint32_t>(labels.size()));
  w.put_bytes(labels);
  for (Provenance p : provenance) w.put<std::uint8_t>(static_cast<std::uint8_t>(p));
  return std::move(w.bytes());
}

PointLabels deserialize_labels(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes, "label file");
  r.expect_magic(kLabelMagic);
  const auto version = r.get<std::uint32_t>();
  if (version != kLabelVersion) {
    throw Error(ErrorCode::kVersionUnsupported,
                "label file version " + std::to_string(version) + " is not supported");
  }
  const auto count = r.get<std::uint32_t>();
  PointLabels out;
  const auto labels = r.get_bytes(count);
  out.labels.assign(labels.begin(), labels.end());
  for (std::uint8_t id : out.labels) {
    if (id != kUnlabeledId && !is_lidar_class_id(id)) {
      throw Error(ErrorCode::kUnknownLabelId, "label file holds id " + std::to_string(id));
    }
  }
  out.provenance.reserve(count);
  for (std::uint8_t raw : r.get_bytes(count)) {
    if (raw > static_cast<std::uint8_t>(Provenance::kInvalid)) {
      throw Error(ErrorCode::kParseError, "unknown provenance code " + std::to_string(raw));
    }
    out.provenance.push_back(static_cast<Provenance>(raw));
  }
  if (r.remaining() != 0) throw Error(ErrorCode::kParseError, "label file has trailing bytes");
  return out;
}

void write_labels(const std::filesystem::path& path, const LabeledScan& labeled) {
  write_file_bytes(path, serialize_labels(labeled.labels, labeled.provenance));
}

PointLabels read_labels(const std::filesystem::path& path) {
  return deserialize_labels(read_file_bytes(path));
}

}  // namespace lila::io
