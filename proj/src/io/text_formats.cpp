#include "lila/io/text_formats.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <map>
#include <sstream>
#include <vector>

#include "lila/io/binary.hpp"

namespace lila::io {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos - start)));
    if (pos == std::string_view::npos) return out;
    start = pos + 1;
  }
}

std::vector<std::string_view> fields(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    const std::size_t start = i;
    while (i < s.size() && s[i] != ' ' && s[i] != '\t') ++i;
    if (i > start) out.push_back(s.substr(start, i - start));
  }
  return out;
}

template <typename T>
T parse_number(std::string_view text, std::string_view what) {
  T value{};
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw Error(ErrorCode::kParseError,
                std::string(what) + ": cannot parse '" + std::string(text) + "'");
  }
  return value;
}

std::vector<double> parse_reals(std::string_view text, std::string_view key) {
  std::vector<double> out;
  for (std::string_view f : fields(text)) out.push_back(parse_number<double>(f, key));
  return out;
}

Eigen::Matrix4d parse_matrix(std::string_view text, std::string_view key) {
  const auto values = parse_reals(text, key);
  if (values.size() != 16) {
    throw Error(ErrorCode::kParseError, std::string(key) + " needs 16 values, got " +
                                            std::to_string(values.size()));
  }
  Eigen::Matrix4d m;
  for (int i = 0; i < 16; ++i) m(i / 4, i % 4) = values[static_cast<std::size_t>(i)];
  return m;
}

std::string format_matrix(const Eigen::Matrix4d& m) {
  std::string out;
  for (int i = 0; i < 16; ++i) {
    if (i) out += ' ';
    out += format_double(m(i / 4, i % 4));
  }
  return out;
}

}  // namespace

std::string format_double(double value) {
  std::array<char, 32> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return std::string(buf.data(), ptr);
}

CalibrationFile parse_calibration(std::string_view text) {
  std::map<std::string, std::string_view, std::less<>> entries;
  int line_no = 0;
  for (std::string_view line : split(text, '\n')) {
    ++line_no;
    line = trim(line.substr(0, line.find('#')));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorCode::kParseError, "calibration line " + std::to_string(line_no) +
                                              " lacks '='");
    }
    const std::string key(trim(line.substr(0, eq)));
    if (!entries.emplace(key, trim(line.substr(eq + 1))).second) {
      throw Error(ErrorCode::kParseError, "calibration key '" + key + "' repeated");
    }
  }
  static const std::array<std::string_view, 10> kKeys = {
      "fx", "fy", "cx", "cy", "width", "height", "t_r_us",
      "lidar_to_vehicle", "camera_to_vehicle", "ring_elevation_rad"};
  for (const auto& [key, value] : entries) {
    if (std::find(kKeys.begin(), kKeys.end(), key) == kKeys.end()) {
      throw Error(ErrorCode::kParseError, "unknown calibration key '" + key + "'");
    }
  }
  auto get = [&](std::string_view key) {
    const auto it = entries.find(key);
    if (it == entries.end()) {
      throw Error(ErrorCode::kParseError, "calibration key '" + std::string(key) + "' missing");
    }
    return it->second;
  };
  CalibrationFile out;
  CameraIntrinsics& k = out.calibration.intrinsics;
  k.fx = parse_number<double>(get("fx"), "fx");
  k.fy = parse_number<double>(get("fy"), "fy");
  k.cx = parse_number<double>(get("cx"), "cx");
  k.cy = parse_number<double>(get("cy"), "cy");
  k.width = parse_number<int>(get("width"), "width");
  k.height = parse_number<int>(get("height"), "height");
  k.shutter_interval_us = parse_number<std::int64_t>(get("t_r_us"), "t_r_us");
  k.validate();
  out.calibration.lidar_to_vehicle =
      RigidTransform::from_matrix(parse_matrix(get("lidar_to_vehicle"), "lidar_to_vehicle"));
  out.calibration.camera_to_vehicle =
      RigidTransform::from_matrix(parse_matrix(get("camera_to_vehicle"), "camera_to_vehicle"));
  if (const auto it = entries.find("ring_elevation_rad"); it != entries.end()) {
    out.beams = BeamTable(parse_reals(it->second, "ring_elevation_rad"));
  }
  return out;
}

std::string format_calibration(const CalibrationFile& calib) {
  const CameraIntrinsics& k = calib.calibration.intrinsics;
  std::ostringstream os;
  os << "fx = " << format_double(k.fx) << "\n"
     << "fy = " << format_double(k.fy) << "\n"
     << "cx = " << format_double(k.cx) << "\n"
     << "cy = " << format_double(k.cy) << "\n"
     << "width = " << k.width << "\n"
     << "height = " << k.height << "\n"
     << "t_r_us = " << k.shutter_interval_us << "\n"
     << "lidar_to_vehicle = " << format_matrix(calib.calibration.lidar_to_vehicle.matrix()) << "\n"
     << "camera_to_vehicle = " << format_matrix(calib.calibration.camera_to_vehicle.matrix())
     << "\n";
  if (calib.beams) {
    os << "ring_elevation_rad =";
    for (double e : calib.beams->elevations()) os << ' ' << format_double(e);
    os << "\n";
  }
  return os.str();
}

CalibrationFile read_calibration(const std::filesystem::path& path) {
  return parse_calibration(read_text_file(path));
}

void write_calibration(const std::filesystem::path& path, const CalibrationFile& calib) {
  write_text_file(path, format_calibration(calib));
}

namespace {
constexpr std::string_view kPoseHeader = "timestamp_us,tx,ty,tz,qx,qy,qz,qw";
}

PoseTrack parse_pose_log(std::string_view text) {
  std::vector<TimedPose> samples;
  int line_no = 0;
  bool header_seen = false;
  for (std::string_view line : split(text, '\n')) {
    ++line_no;
    if (line.empty()) continue;
    if (!header_seen) {
      if (line != kPoseHeader) throw Error(ErrorCode::kParseError, "pose log header mismatch");
      header_seen = true;
      continue;
    }
    const auto cols = split(line, ',');
    if (cols.size() != 8) {
      throw Error(ErrorCode::kParseError, "pose log line " + std::to_string(line_no) +
                                              " needs 8 columns");
    }
    std::array<double, 7> v{};
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = parse_number<double>(cols[i + 1], "pose value");
    const Eigen::Quaterniond q(v[6], v[3], v[4], v[5]);
    samples.push_back({Timestamp{parse_number<std::int64_t>(cols[0], "timestamp_us")},
                       RigidTransform::from_quaternion(q, Vec3(v[0], v[1], v[2]))});
  }
  if (!header_seen) throw Error(ErrorCode::kParseError, "pose log is empty");
  return PoseTrack(std::move(samples));
}

std::string format_pose_log(const PoseTrack& track) {
  std::string out(kPoseHeader);
  out += '\n';
  for (const TimedPose& s : track.samples()) {
    const Vec3& t = s.pose.translation();
    const Eigen::Quaterniond q = s.pose.quaternion();
    out += std::to_string(s.time.us);
    for (double v : {t.x(), t.y(), t.z(), q.x(), q.y(), q.z(), q.w()}) {
      out += ',';
      out += format_double(v);
    }
    out += '\n';
  }
  return out;
}

PoseTrack read_pose_log(const std::filesystem::path& path) {
  return parse_pose_log(read_text_file(path));
}

void write_pose_log(const std::filesystem::path& path, const PoseTrack& track) {
  write_text_file(path, format_pose_log(track));
}

std::string format_loss_trace(std::span<const double> losses, int first_iteration) {
  std::string out = "iteration,loss\n";
  for (std::size_t i = 0; i < losses.size(); ++i) {
    out += std::to_string(first_iteration + static_cast<int>(i));
    out += ',';
    out += format_double(losses[i]);
    out += '\n';
  }
  return out;
}

}  // namespace lila::io
