#pragma once

#include <cstring>
#include <filesystem>
#include <string>
#include <vector>

#include "fixture_data.hpp"
#include "lila/io/binary.hpp"
#include "lila/io/image_file.hpp"
#include "lila/io/scan_file.hpp"
#include "lila/neural/checkpoint.hpp"

namespace lila::fixtures {

inline bool same_bits(float a, float b) { return std::memcmp(&a, &b, sizeof a) == 0; }

inline bool same_bits(const std::vector<float>& a, const std::vector<float>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!same_bits(a[i], b[i])) return false;
  }
  return true;
}

/// Parses every golden file, compares it with the object it encodes and
/// re-encodes it byte for byte. Returns one message per mismatch.
inline std::vector<std::string> check_golden_files(const std::filesystem::path& dir) {
  std::vector<std::string> failures;
  auto expect = [&](bool ok, const std::string& what) {
    if (!ok) failures.push_back(what);
  };
  try {
    const auto scan_bytes = io::read_file_bytes(dir / "scan.llsc");
    const LidarScan scan = io::deserialize_scan(scan_bytes);
    const LidarScan golden = golden_scan();
    expect(scan_bytes.size() == io::kScanHeaderBytes + 40 * io::kScanRecordBytes, "scan: size");
    expect(scan.rings == 4 && scan.columns == 16 && scan.revolution_start == golden.revolution_start,
           "scan: header fields");
    expect(scan.points.size() == golden.points.size(), "scan: point count");
    for (std::size_t i = 0; i < std::min(scan.points.size(), golden.points.size()); ++i) {
      const LidarPoint& a = scan.points[i];
      const LidarPoint& b = golden.points[i];
      const bool ok = a.ring == b.ring && same_bits(a.azimuth, b.azimuth) &&
                      same_bits(a.range, b.range) && same_bits(a.reflectivity, b.reflectivity) &&
                      a.time == b.time;
      expect(ok, "scan: point " + std::to_string(i));
    }
    expect(io::serialize_scan(scan) == scan_bytes, "scan: re-encoding differs");

    const LidarImage image = scan_to_image(golden);
    const auto depth_bytes = io::read_file_bytes(dir / "scan_depth.pfm");
    const io::FloatRaster depth = io::decode_pfm(depth_bytes);
    expect(depth.rows == 4 && depth.cols == 16 && same_bits(depth.values, image.depth), "depth pfm: values");
    expect(io::encode_pfm(depth) == depth_bytes, "depth pfm: re-encoding differs");

    const auto refl_bytes = io::read_file_bytes(dir / "scan_reflectivity.pfm");
    const io::FloatRaster refl = io::decode_pfm(refl_bytes);
    expect(same_bits(refl.values, image.reflectivity), "reflectivity pfm: values");
    expect(io::encode_pfm(refl) == refl_bytes, "reflectivity pfm: re-encoding differs");

    const auto mask_bytes = io::read_file_bytes(dir / "scan_mask.pgm");
    const io::ByteRaster mask = io::decode_pgm(mask_bytes);
    bool mask_ok = mask.values.size() == image.size();
    for (std::size_t i = 0; mask_ok && i < image.size(); ++i) {
      mask_ok = mask.values[i] == (image.valid[i] ? 255 : 0);
    }
    expect(mask_ok, "mask pgm: values");
    expect(io::encode_pgm(mask) == mask_bytes, "mask pgm: re-encoding differs");

    const auto label_bytes = io::read_file_bytes(dir / "labels.pgm");
    const io::ByteRaster labels = io::decode_pgm(label_bytes);
    expect(labels.rows == 3 && labels.cols == 5 && labels.values == golden_labels().ids,
           "labels pgm: values");
    expect(io::encode_pgm(labels) == label_bytes, "labels pgm: re-encoding differs");

    const auto ckpt_bytes = io::read_file_bytes(dir / "checkpoint.llnw");
    const nn::LilaNet<float> net = nn::deserialize_checkpoint(ckpt_bytes);
    const nn::LilaNet<float> want = golden_network();
    expect(net.spec() == want.spec(), "checkpoint: spec");
    const auto got_params = net.parameters();
    const auto want_params = want.parameters();
    bool params_ok = got_params.size() == want_params.size();
    for (std::size_t i = 0; params_ok && i < got_params.size(); ++i) {
      params_ok = got_params[i]->name == want_params[i]->name &&
                  got_params[i]->value.shape() == want_params[i]->value.shape() &&
                  same_bits(got_params[i]->value.values(), want_params[i]->value.values());
    }
    expect(params_ok, "checkpoint: parameters");
    expect(nn::serialize_checkpoint(net) == ckpt_bytes, "checkpoint: re-encoding differs");
  } catch (const std::exception& e) {
    failures.push_back(std::string("exception: ") + e.what());
  }
  return failures;
}

}  // namespace lila::fixtures
