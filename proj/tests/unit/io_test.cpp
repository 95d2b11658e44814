#include <cmath>
#include <cstring>
#include <limits>
#include <numbers>

#include <gtest/gtest.h>

#include "lila/error.hpp"
#include "lila/io/binary.hpp"
#include "lila/io/image_file.hpp"
#include "lila/io/scan_file.hpp"
#include "lila/io/text_formats.hpp"
#include "lila/rng.hpp"
#include "test_util.hpp"

namespace lila::io {
namespace {

LidarScan random_scan(Rng& rng, std::size_t n) {
  LidarScan scan;
  scan.rings = 32;
  scan.columns = 1800;
  scan.revolution_start = Timestamp{static_cast<std::int64_t>(rng.next_u64() >> 2) - (1LL << 60)};
  for (std::size_t i = 0; i < n; ++i) {
    LidarPoint p;
    p.ring = static_cast<std::uint16_t>(rng.below(32));
    p.azimuth = static_cast<float>(rng.uniform(0.0, 6.28));
    p.range = rng.uniform() < 0.1 ? kInvalidRange : static_cast<float>(rng.uniform(0.1, 200.0));
    p.reflectivity = static_cast<float>(rng.uniform());
    p.time = Timestamp{static_cast<std::int64_t>(rng.next_u64() >> 1) * (rng.uniform() < 0.5 ? -1 : 1)};
    scan.points.push_back(p);
  }
  return scan;
}

TEST(ScanFile, RoundTripBitExact) {
  Rng rng(1);
  for (int trial = 0; trial < 20; ++trial) {
    const LidarScan scan = random_scan(rng, rng.below(500));
    const auto bytes = serialize_scan(scan);
    EXPECT_EQ(bytes.size(), kScanHeaderBytes + kScanRecordBytes * scan.points.size());
    const LidarScan back = deserialize_scan(bytes);
    EXPECT_EQ(back, scan);
    EXPECT_EQ(serialize_scan(back), bytes);
  }
}

TEST(ScanFile, EmptyScanIsHeaderOnly) {
  LidarScan scan;
  const auto bytes = serialize_scan(scan);
  ASSERT_EQ(bytes.size(), kScanHeaderBytes);
  EXPECT_EQ(std::string(bytes.begin(), bytes.begin() + 4), "LLSC");
  EXPECT_EQ(deserialize_scan(bytes), scan);
}

TEST(ScanFile, HeaderLayout) {
  LidarScan scan;
  scan.rings = 16;
  scan.columns = 0x0102;
  scan.revolution_start = Timestamp{0x0102030405060708};
  const auto b = serialize_scan(scan);
  const std::vector<std::uint8_t> expected = {'L', 'L', 'S', 'C', 1, 0, 0, 0, 0, 0, 0, 0,
                                              16,  0,   2,   1,   8, 7, 6, 5, 4, 3, 2, 1};
  EXPECT_EQ(b, expected);
}

TEST(ScanFile, Errors) {
  Rng rng(2);
  const auto bytes = serialize_scan(random_scan(rng, 3));
  auto bad = bytes;
  bad[0] = 'X';
  EXPECT_LILA_ERROR(deserialize_scan(bad), kBadMagic);
  bad = bytes;
  bad[4] = 2;
  EXPECT_LILA_ERROR(deserialize_scan(bad), kVersionUnsupported);
  bad.assign(bytes.begin(), bytes.end() - 1);
  EXPECT_LILA_ERROR(deserialize_scan(bad), kTruncatedFile);
  bad.assign(bytes.begin(), bytes.begin() + 10);
  EXPECT_LILA_ERROR(deserialize_scan(bad), kTruncatedFile);
  bad = bytes;
  bad.push_back(0);
  EXPECT_LILA_ERROR(deserialize_scan(bad), kParseError);

  LidarScan scan;
  LidarPoint p;
  p.azimuth = static_cast<float>(2 * std::numbers::pi);
  scan.points.push_back(p);
  EXPECT_LILA_ERROR(serialize_scan(scan), kInvalidArgument);
  scan.points[0].azimuth = 0.0f;
  scan.points[0].ring = 40;
  EXPECT_LILA_ERROR(serialize_scan(scan), kInvalidArgument);
}

TEST(ScanFile, FileRoundTrip) {
  testing::TempDir dir;
  Rng rng(3);
  const LidarScan scan = random_scan(rng, 100);
  write_scan(dir / "a.llsc", scan);
  EXPECT_EQ(read_scan(dir / "a.llsc"), scan);
  EXPECT_LILA_ERROR(read_scan(dir / "missing.llsc"), kIoError);
}

TEST(LabelFile, RoundTripAndErrors) {
  const std::vector<std::uint8_t> labels = {0, 12, 255, 4};
  const std::vector<Provenance> prov = {Provenance::kTransferred, Provenance::kTransferred,
                                        Provenance::kOccluded, Provenance::kTransferred};
  const auto bytes = serialize_labels(labels, prov);
  const PointLabels back = deserialize_labels(bytes);
  EXPECT_EQ(back.labels, labels);
  EXPECT_EQ(back.provenance, prov);

  auto bad = bytes;
  bad[12] = 13;
  EXPECT_LILA_ERROR(deserialize_labels(bad), kUnknownLabelId);
  bad = bytes;
  bad[bad.size() - 1] = 9;
  EXPECT_LILA_ERROR(deserialize_labels(bad), kParseError);
  bad = bytes;
  bad[1] = 'X';
  EXPECT_LILA_ERROR(deserialize_labels(bad), kBadMagic);
  EXPECT_LILA_ERROR(serialize_labels(labels, {}), kLengthMismatch);
}

std::uint32_t bits(float f) {
  std::uint32_t u;
  std::memcpy(&u, &f, 4);
  return u;
}

TEST(Pfm, LayoutIsBottomUpLittleEndian) {
  const FloatRaster image{2, 3, {1, 2, 3, 4, 5, 6}};
  const auto bytes = encode_pfm(image);
  const std::string header = "Pf\n3 2\n-1.0\n";
  ASSERT_EQ(bytes.size(), header.size() + 24);
  EXPECT_EQ(std::string(bytes.begin(), bytes.begin() + static_cast<long>(header.size())), header);
  float first;
  std::memcpy(&first, bytes.data() + header.size(), 4);
  EXPECT_EQ(first, 4.0f);  // bottom row comes first
  EXPECT_EQ(decode_pfm(bytes), image);
}

TEST(Pfm, RoundTripPreservesBitPatterns) {
  Rng rng(4);
  FloatRaster image{7, 11, {}};
  for (int i = 0; i < 77; ++i) image.values.push_back(static_cast<float>(rng.normal() * 1e3));
  image.values[0] = -0.0f;
  image.values[1] = std::numeric_limits<float>::denorm_min();
  image.values[2] = std::numeric_limits<float>::infinity();
  const FloatRaster back = decode_pfm(encode_pfm(image));
  ASSERT_EQ(back.values.size(), image.values.size());
  for (std::size_t i = 0; i < image.values.size(); ++i) {
    EXPECT_EQ(bits(back.values[i]), bits(image.values[i]));
  }
}

TEST(Pfm, ReadsBigEndian) {
  std::string text = "Pf\n1 1\n1.0\n";
  std::vector<std::uint8_t> bytes(text.begin(), text.end());
  const std::uint32_t u = bits(1.5f);
  for (int s = 24; s >= 0; s -= 8) bytes.push_back(static_cast<std::uint8_t>(u >> s));
  EXPECT_EQ(decode_pfm(bytes).values, std::vector<float>{1.5f});
}

TEST(Pfm, Errors) {
  const std::string color = "PF\n1 1\n-1.0\n";
  EXPECT_LILA_ERROR(decode_pfm(std::vector<std::uint8_t>(color.begin(), color.end())), kBadMagic);
  const std::string short_data = "Pf\n2 2\n-1.0\n1234";
  EXPECT_LILA_ERROR(decode_pfm(std::vector<std::uint8_t>(short_data.begin(), short_data.end())),
                    kTruncatedFile);
}

TEST(Pgm, RoundTripAndComments) {
  const ByteRaster image{2, 2, {0, 255, 7, 13}};
  const auto bytes = encode_pgm(image);
  EXPECT_EQ(std::string(bytes.begin(), bytes.begin() + 11), "P5\n2 2\n255\n");
  EXPECT_EQ(decode_pgm(bytes), image);
  std::string text = "P5\n# a comment\n2 2\n255\n";
  std::vector<std::uint8_t> commented(text.begin(), text.end());
  commented.insert(commented.end(), image.values.begin(), image.values.end());
  EXPECT_EQ(decode_pgm(commented), image);
  commented.push_back(1);
  EXPECT_LILA_ERROR(decode_pgm(commented), kParseError);
  const std::string wide = "P5\n1 1\n65535\n\0\0";
  EXPECT_LILA_ERROR(decode_pgm(std::vector<std::uint8_t>(wide.begin(), wide.end())), kParseError);
}

TEST(Ppm, RoundTrip) {
  const RgbRaster image{1, 2, {{1, 2, 3}, {250, 128, 0}}};
  EXPECT_EQ(decode_ppm(encode_ppm(image)), image);
  EXPECT_LILA_ERROR(decode_ppm(encode_pgm(ByteRaster{1, 1, {0}})), kBadMagic);
}

TEST(LabelImageFile, ValidatesIds) {
  testing::TempDir dir;
  LabelImage image(2, 3, LabelSet::kCityscapes, 18);
  write_label_image(dir / "c.pgm", image);
  EXPECT_EQ(read_label_image(dir / "c.pgm", LabelSet::kCityscapes), image);
  EXPECT_LILA_ERROR(read_label_image(dir / "c.pgm", LabelSet::kLidar), kUnknownLabelId);
}

CalibrationFile sample_calibration() {
  CalibrationFile c;
  c.calibration.intrinsics = {240.125, 239.875, 239.5, 119.5, 480, 240, 1000};
  c.calibration.lidar_to_vehicle = RigidTransform::from_translation(0, 0, 1.8);
  Rng rng(5);
  c.calibration.camera_to_vehicle = testing::random_transform(rng, 2.0);
  c.beams = BeamTable::uniform();
  return c;
}

TEST(Calibration, RoundTripExact) {
  const CalibrationFile c = sample_calibration();
  const CalibrationFile back = parse_calibration(format_calibration(c));
  EXPECT_EQ(back.calibration.intrinsics.fx, c.calibration.intrinsics.fx);
  EXPECT_EQ(back.calibration.intrinsics.shutter_interval_us, 1000);
  EXPECT_EQ(back.calibration.camera_to_vehicle, c.calibration.camera_to_vehicle);
  EXPECT_EQ(back.calibration.lidar_to_vehicle, c.calibration.lidar_to_vehicle);
  ASSERT_TRUE(back.beams);
  EXPECT_EQ(back.beams->elevations(), c.beams->elevations());
}

TEST(Calibration, KeyErrors) {
  const std::string text = format_calibration(sample_calibration());
  EXPECT_LILA_ERROR(parse_calibration(text + "fx = 3\n"), kParseError);
  EXPECT_LILA_ERROR(parse_calibration(text + "focal = 3\n"), kParseError);
  const auto pos = text.find("fy");
  const auto end = text.find('\n', pos);
  EXPECT_LILA_ERROR(parse_calibration(text.substr(0, pos) + text.substr(end + 1)), kParseError);
  EXPECT_LILA_ERROR(parse_calibration("# only a comment\n"), kParseError);
}

TEST(Calibration, CommentsAndNoBeams) {
  CalibrationFile c = sample_calibration();
  c.beams.reset();
  const CalibrationFile back = parse_calibration("# header\n" + format_calibration(c));
  EXPECT_FALSE(back.beams);
}

TEST(PoseLog, RoundTripWithinTolerance) {
  Rng rng(6);
  std::vector<TimedPose> samples;
  for (int i = 0; i < 30; ++i) samples.push_back({Timestamp{i * 10'000 - 5}, testing::random_transform(rng)});
  const PoseTrack track(samples);
  const std::string text = format_pose_log(track);
  EXPECT_EQ(text.substr(0, text.find('\n')), "timestamp_us,tx,ty,tz,qx,qy,qz,qw");
  const PoseTrack back = parse_pose_log(text);
  ASSERT_EQ(back.samples().size(), samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    EXPECT_EQ(back.samples()[i].time, samples[i].time);
    EXPECT_LE(back.samples()[i].pose.distance_to(samples[i].pose), 1e-12);
  }
}

TEST(PoseLog, Errors) {
  EXPECT_LILA_ERROR(parse_pose_log(""), kParseError);
  EXPECT_LILA_ERROR(parse_pose_log("t,x\n"), kParseError);
  EXPECT_LILA_ERROR(parse_pose_log("timestamp_us,tx,ty,tz,qx,qy,qz,qw\n1,2,3\n"), kParseError);
  EXPECT_THROW(parse_pose_log("timestamp_us,tx,ty,tz,qx,qy,qz,qw\n5,0,0,0,0,0,0,1\n5,0,0,0,0,0,0,1\n"),
               Error);
}

TEST(LossTrace, Format) {
  const std::vector<double> losses = {2.5, 0.125};
  EXPECT_EQ(format_loss_trace(losses), "iteration,loss\n1,2.5\n2,0.125\n");
  EXPECT_EQ(format_loss_trace(losses, 11), "iteration,loss\n11,2.5\n12,0.125\n");
}

TEST(FormatDouble, ShortestRoundTrip) {
  Rng rng(7);
  for (int i = 0; i < 1000; ++i) {
    const double v = rng.normal() * std::pow(10.0, rng.uniform(-20, 20));
    EXPECT_EQ(std::stod(format_double(v)), v);
  }
  EXPECT_EQ(format_double(0.1), "0.1");
}

}  // namespace
}  // namespace lila::io
