#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

namespace lila {

/// Cityscapes evaluation classes, numbered by their Cityscapes train ids.
enum class CityscapesClass : std::uint8_t {
  kRoad = 0,
  kSidewalk = 1,
  kBuilding = 2,
  kWall = 3,
  kFence = 4,
  kPole = 5,
  kTrafficLight = 6,
  kTrafficSign = 7,
  kVegetation = 8,
  kTerrain = 9,
  kSky = 10,
  kPerson = 11,
  kRider = 12,
  kCar = 13,
  kTruck = 14,
  kBus = 15,
  kOnRails = 16,
  kMotorcycle = 17,
  kBicycle = 18,
};
inline constexpr int kNumCityscapesClasses = 19;

/// Reduced LiDAR label set.
enum class LidarClass : std::uint8_t {
  kRoad = 0,
  kSidewalk = 1,
  kPerson = 2,
  kRider = 3,
  kSmallVehicle = 4,
  kLargeVehicle = 5,
  kTwoWheeler = 6,
  kConstruction = 7,
  kPole = 8,
  kTrafficSign = 9,
  kVegetation = 10,
  kTerrain = 11,
  kSky = 12,
  kUnlabeled = 255,
};
inline constexpr int kNumLidarClasses = 13;
inline constexpr std::uint8_t kUnlabeledId = 255;

struct Rgb {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;
  bool operator==(const Rgb&) const = default;
};

LidarClass map_class(CityscapesClass c);
/// Cityscapes class whose color and identity stand in for a merged LiDAR class.
CityscapesClass representative_class(LidarClass c);
Rgb class_color(LidarClass c);
Rgb cityscapes_color(CityscapesClass c);

std::string_view class_name(LidarClass c);
std::string_view class_name(CityscapesClass c);
std::optional<LidarClass> lidar_class_from_name(std::string_view name);

bool is_lidar_class_id(std::uint8_t id);
bool is_cityscapes_class_id(std::uint8_t id);
inline std::uint8_t id_of(LidarClass c) { return static_cast<std::uint8_t>(c); }

enum class LabelSet : std::uint8_t { kCityscapes, kLidar };

/// Row-major grid of class ids tagged with the label set they belong to.
struct LabelImage {
  int rows = 0;
  int cols = 0;
  LabelSet label_set = LabelSet::kLidar;
  std::vector<std::uint8_t> ids;

  LabelImage() = default;
  LabelImage(int rows, int cols, LabelSet set, std::uint8_t fill);

  std::uint8_t at(int row, int col) const {
    return ids[static_cast<std::size_t>(row) * static_cast<std::size_t>(cols) +
               static_cast<std::size_t>(col)];
  }
  std::uint8_t& at(int row, int col) {
    return ids[static_cast<std::size_t>(row) * static_cast<std::size_t>(cols) +
               static_cast<std::size_t>(col)];
  }
  bool operator==(const LabelImage&) const = default;
};

/// Throws UnknownLabelId if any cell holds an id outside the declared set.
void validate_label_image(const LabelImage& image);

/// Element-wise Cityscapes -> LiDAR mapping. Throws InvalidArgument when the
/// input is not declared as Cityscapes and UnknownLabelId on foreign ids.
LabelImage remap_image(const LabelImage& image);

LabelImage crop(const LabelImage& image, int row0, int col0, int rows, int cols);

/// Interleaved RGB visualization using class_color (or cityscapes_color).
std::vector<std::uint8_t> colorize(const LabelImage& image);

}  // namespace lila
