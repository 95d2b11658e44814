#pragma once

// Objects behind the checked-in golden files in tests/fixtures. Every value
// is exactly representable so the expectations hold on any IEEE platform.

#include "lila/label_space.hpp"
#include "lila/neural/lilanet.hpp"
#include "lila/scan_projection.hpp"

namespace lila::fixtures {

inline LidarScan golden_scan() {
  LidarScan scan;
  scan.rings = 4;
  scan.columns = 16;
  scan.revolution_start = Timestamp{1'000'000};
  for (int i = 0; i < 40; ++i) {
    LidarPoint p;
    p.ring = static_cast<std::uint16_t>(i % 4);
    p.azimuth = static_cast<float>(i) * 0.15f;
    p.range = i % 7 == 6 ? kInvalidRange : 1.0f + static_cast<float>(i) * 0.5f;
    p.reflectivity = static_cast<float>(i) / 64.0f;
    p.time = Timestamp{1'000'000 + i * 625};
    scan.points.push_back(p);
  }
  return scan;
}

inline LabelImage golden_labels() {
  LabelImage image(3, 5, LabelSet::kLidar, 0);
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 5; ++c) image.at(r, c) = static_cast<std::uint8_t>((r * 5 + c) % 13);
  }
  image.at(2, 4) = kUnlabeledId;
  return image;
}

inline nn::LilaNet<float> golden_network() {
  nn::LilaNet<float> net(nn::NetworkSpec{{2, 2, 2, 2, 2}, 2, 13});
  int k = 0;
  for (auto* p : net.parameters()) {
    for (float& v : p->value.data()) v = static_cast<float>(k++ % 17 - 8) / 16.0f;
  }
  return net;
}

}  // namespace lila::fixtures
