#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "lila/autolabel.hpp"
#include "lila/scan_projection.hpp"

namespace lila::io {

inline constexpr std::uint32_t kScanFileVersion = 1;
/// "LLSC" | u32 version | u32 count | u16 rings | u16 columns | i64 revolution start.
inline constexpr std::size_t kScanHeaderBytes = 24;
/// u16 ring | f32 azimuth | f32 range | f32 reflectivity | i64 timestamp.
inline constexpr std::size_t kScanRecordBytes = 22;

/// Throws InvalidArgument for azimuths outside [0, 2pi), rings outside the
/// scan, or ring/column counts that do not fit in u16.
std::vector<std::uint8_t> serialize_scan(const LidarScan& scan);
/// Throws BadMagic, VersionUnsupported, TruncatedFile, ParseError.
LidarScan deserialize_scan(std::span<const std::uint8_t> bytes);

void write_scan(const std::filesystem::path& path, const LidarScan& scan);
LidarScan read_scan(const std::filesystem::path& path);

/// Labels for an existing scan file:
/// "LLLB" | u32 version | u32 count | count label bytes | count provenance bytes.
std::vector<std::uint8_t> serialize_labels(std::span<const std::uint8_t> labels,
                                           std::span<const Provenance> provenance);
struct PointLabels {
  std::vector<std::uint8_t> labels;
  std::vector<Provenance> provenance;
};
PointLabels deserialize_labels(std::span<const std::uint8_t> bytes);

void write_labels(const std::filesystem::path& path, const LabeledScan& labeled);
PointLabels read_labels(const std::filesystem::path& path);

}  // namespace lila::io
