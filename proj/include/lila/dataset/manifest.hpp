#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lila/geometry.hpp"

namespace lila {

enum class Split : std::uint8_t { kUnassigned, kTrain, kVal, kTest };
std::string_view split_name(Split s);
std::optional<Split> split_from_name(std::string_view name);

/// Paths are relative to the manifest's directory.
struct FrameEntry {
  std::string scan;
  std::string image;          // Cityscapes-id semantic image (PGM)
  Timestamp camera_time;
  std::string ground_truth;   // optional per-point truth labels
  std::string labels;         // optional autolabel output
  bool operator==(const FrameEntry&) const = default;
};

struct SequenceEntry {
  std::string id;
  std::string calibration;
  std::string poses;
  std::vector<FrameEntry> frames;
  Split split = Split::kUnassigned;
  bool operator==(const SequenceEntry&) const = default;
};

struct DatasetManifest {
  std::vector<SequenceEntry> sequences;
  bool operator==(const DatasetManifest&) const = default;

  std::size_t frame_count() const;
};

std::string manifest_to_json(const DatasetManifest& manifest);
/// Throws ParseError on malformed JSON or duplicate sequence ids.
DatasetManifest manifest_from_json(std::string_view text);
DatasetManifest read_manifest(const std::filesystem::path& path);
void write_manifest(const std::filesystem::path& path, const DatasetManifest& manifest);

using SplitRatios = std::array<double, 3>;  // train, val, test
inline constexpr SplitRatios kDefaultSplitRatios{0.62, 0.13, 0.25};

/// Assigns whole sequences to train/val/test. Sequences are visited in a
/// seed-shuffled order and each goes to the split whose frame count lags its
/// target the most (ties to train, then val); once the sequences left equal
/// the splits still empty, each of them fills one empty split. Throws
/// TooFewSequences below three sequences, InvalidArgument for bad ratios.
DatasetManifest split_sequences(const DatasetManifest& manifest,
                                const SplitRatios& ratios = kDefaultSplitRatios,
                                std::uint64_t seed = 0);

/// Indices round(i (N-1) / (k-1)), halves rounded up, for i in [0, k); k = 1
/// picks frame (N-1)/2. Throws KExceedsN when k > N, InvalidArgument for k < 1.
std::vector<std::size_t> select_keyframes(std::size_t n, std::size_t k);

}  // namespace lila
