#include "lila/label_space.hpp"

#include <string>

#include "lila/error.hpp"

namespace lila {

namespace {

struct CityscapesEntry {
  std::string_view name;
  LidarClass target;
  Rgb color;
};

// Indexed by Cityscapes train id.
constexpr std::array<CityscapesEntry, kNumCityscapesClasses> kCityscapes = {{
    {"road", LidarClass::kRoad, {128, 64, 128}},
    {"sidewalk", LidarClass::kSidewalk, {244, 35, 232}},
    {"building", LidarClass::kConstruction, {70, 70, 70}},
    {"wall", LidarClass::kConstruction, {102, 102, 156}},
    {"fence", LidarClass::kUnlabeled, {190, 153, 153}},
    {"pole", LidarClass::kPole, {153, 153, 153}},
    {"traffic_light", LidarClass::kConstruction, {250, 170, 30}},
    {"traffic_sign", LidarClass::kTrafficSign, {220, 220, 0}},
    {"vegetation", LidarClass::kVegetation, {107, 142, 35}},
    {"terrain", LidarClass::kTerrain, {152, 251, 152}},
    {"sky", LidarClass::kSky, {70, 130, 180}},
    {"person", LidarClass::kPerson, {220, 20, 60}},
    {"rider", LidarClass::kRider, {255, 0, 0}},
    {"car", LidarClass::kSmallVehicle, {0, 0, 142}},
    {"truck", LidarClass::kLargeVehicle, {0, 0, 70}},
    {"bus", LidarClass::kLargeVehicle, {0, 60, 100}},
    {"on_rails", LidarClass::kLargeVehicle, {0, 80, 100}},
    {"motorcycle", LidarClass::kTwoWheeler, {0, 0, 230}},
    {"bicycle", LidarClass::kTwoWheeler, {119, 11, 32}},
}};

struct LidarEntry {
  std::string_view name;
  CityscapesClass representative;
};

constexpr std::array<LidarEntry, kNumLidarClasses> kLidar = {{
    {"road", CityscapesClass::kRoad},
    {"sidewalk", CityscapesClass::kSidewalk},
    {"person", CityscapesClass::kPerson},
    {"rider", CityscapesClass::kRider},
    {"small_vehicle", CityscapesClass::kCar},
    {"large_vehicle", CityscapesClass::kTruck},
    {"two_wheeler", CityscapesClass::kBicycle},
    {"construction", CityscapesClass::kBuilding},
    {"pole", CityscapesClass::kPole},
    {"traffic_sign", CityscapesClass::kTrafficSign},
    {"vegetation", CityscapesClass::kVegetation},
    {"terrain", CityscapesClass::kTerrain},
    {"sky", CityscapesClass::kSky},
}};

}  // namespace

LidarClass map_class(CityscapesClass c) {
  return kCityscapes.at(static_cast<std::size_t>(c)).target;
}

CityscapesClass representative_class(LidarClass c) {
  if (c == LidarClass::kUnlabeled) return CityscapesClass::kFence;
  return kLidar.at(static_cast<std::size_t>(c)).representative;
}

Rgb class_color(LidarClass c) {
  if (c == LidarClass::kUnlabeled) return {0, 0, 0};
  return cityscapes_color(representative_class(c));
}

Rgb cityscapes_color(CityscapesClass c) {
  return kCityscapes.at(static_cast<std::size_t>(c)).color;
}

std::string_view class_name(LidarClass c) {
  if (c == LidarClass::kUnlabeled) return "unlabeled";
  return kLidar.at(static_cast<std::size_t>(c)).name;
}

std::string_view class_name(CityscapesClass c) {
  return kCityscapes.at(static_cast<std::size_t>(c)).name;
}

std::optional<LidarClass> lidar_class_from_name(std::string_view name) {
  for (std::size_t i = 0; i < kLidar.size(); ++i) {
    if (kLidar[i].name == name) return static_cast<LidarClass>(i);
  }
  if (name == "unlabeled") return LidarClass::kUnlabeled;
  return std::nullopt;
}

bool is_lidar_class_id(std::uint8_t id) { return id < kNumLidarClasses || id == kUnlabeledId; }

bool is_cityscapes_class_id(std::uint8_t id) { return id < kNumCityscapesClasses; }

LabelImage::LabelImage(int rows_in, int cols_in, LabelSet set, std::uint8_t fill)
    : rows(rows_in), cols(cols_in), label_set(set) {
  if (rows < 0 || cols < 0) throw Error(ErrorCode::kInvalidArgument, "negative label image size");
  ids.assign(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols), fill);
}

void validate_label_image(const LabelImage& image) {
  if (image.ids.size() != static_cast<std::size_t>(image.rows) * image.cols) {
    throw Error(ErrorCode::kShapeMismatch, "label image buffer does not match its size");
  }
  const bool cityscapes = image.label_set == LabelSet::kCityscapes;
  for (std::size_t i = 0; i < image.ids.size(); ++i) {
    const std::uint8_t id = image.ids[i];
    if (cityscapes ? !is_cityscapes_class_id(id) : !is_lidar_class_id(id)) {
      throw Error(ErrorCode::kUnknownLabelId,
                  "label id " + std::to_string(id) + " at index " + std::to_string(i) +
                      " is not in the declared label set");
    }
  }
}

LabelImage remap_image(const LabelImage& image) {
  if (image.label_set != LabelSet::kCityscapes) {
    throw Error(ErrorCode::kInvalidArgument, "remap_image expects a Cityscapes label image");
  }
  validate_label_image(image);
  LabelImage out(image.rows, image.cols, LabelSet::kLidar, kUnlabeledId);
  for (std::size_t i = 0; i < image.ids.size(); ++i) {
    out.ids[i] = id_of(map_class(static_cast<CityscapesClass>(image.ids[i])));
  }
  return out;
}

LabelImage crop(const LabelImage& image, int row0, int col0, int rows, int cols) {
  if (row0 < 0 || col0 < 0 || rows < 0 || cols < 0 || row0 + rows > image.rows ||
      col0 + cols > image.cols) {
    throw Error(ErrorCode::kOutOfRange, "crop window outside label image");
  }
  LabelImage out(rows, cols, image.label_set, 0);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) out.at(r, c) = image.at(row0 + r, col0 + c);
  }
  return out;
}

std::vector<std::uint8_t> colorize(const LabelImage& image) {
  validate_label_image(image);
  std::vector<std::uint8_t> rgb;
  rgb.reserve(image.ids.size() * 3);
  for (const std::uint8_t id : image.ids) {
    const Rgb color = image.label_set == LabelSet::kCityscapes
                          ? cityscapes_color(static_cast<CityscapesClass>(id))
                          : class_color(static_cast<LidarClass>(id));
    rgb.push_back(color.r);
    rgb.push_back(color.g);
    rgb.push_back(color.b);
  }
  return rgb;
}

}  // namespace lila
