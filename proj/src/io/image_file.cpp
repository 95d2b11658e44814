#include "lila/io/image_file.hpp"

#include <bit>
#include <cctype>
#include <charconv>
#include <string>

#include "lila/io/binary.hpp"

namespace lila::io {

namespace {

// Netpbm/PFM header tokenizer: whitespace-separated fields, '#' comments,
// exactly one whitespace byte before the raster.
class HeaderParser {
 public:
  HeaderParser(std::span<const std::uint8_t> bytes, const char* what)
      : bytes_(bytes), what_(what) {}

  std::string token() {
    skip_space_and_comments();
    std::string out;
    while (pos_ < bytes_.size() && !std::isspace(bytes_[pos_])) {
      out.push_back(static_cast<char>(bytes_[pos_++]));
    }
    if (out.empty()) throw Error(ErrorCode::kTruncatedFile, std::string(what_) + ": short header");
    return out;
  }

  int positive_int() {
    const std::string t = token();
    int value = 0;
    auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
    if (ec != std::errc() || ptr != t.data() + t.size() || value <= 0) {
      throw Error(ErrorCode::kParseError, std::string(what_) + ": bad header field '" + t + "'");
    }
    return value;
  }

  std::span<const std::uint8_t> raster(std::size_t n) {
    if (pos_ >= bytes_.size() || !std::isspace(bytes_[pos_])) {
      throw Error(ErrorCode::kParseError, std::string(what_) + ": header not terminated");
    }
    ++pos_;
    if (bytes_.size() - pos_ < n) {
      throw Error(ErrorCode::kTruncatedFile, std::string(what_) + ": raster needs " +
                                                 std::to_string(n) + " bytes, have " +
                                                 std::to_string(bytes_.size() - pos_));
    }
    if (bytes_.size() - pos_ > n) {
      throw Error(ErrorCode::kParseError, std::string(what_) + ": trailing bytes after raster");
    }
    return bytes_.subspan(pos_, n);
  }

 private:
  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      if (std::isspace(bytes_[pos_])) {
        ++pos_;
      } else if (bytes_[pos_] == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  std::span<const std::uint8_t> bytes_;
  const char* what_;
  std::size_t pos_ = 0;
};

void expect_magic(HeaderParser& h, std::span<const std::uint8_t> bytes, std::string_view magic,
                  const char* what) {
  if (bytes.size() < magic.size() ||
      std::string_view(reinterpret_cast<const char*>(bytes.data()), magic.size()) != magic) {
    throw Error(ErrorCode::kBadMagic, std::string(what) + ": expected \"" + std::string(magic) + "\"");
  }
  if (h.token() != magic) {
    throw Error(ErrorCode::kBadMagic, std::string(what) + ": expected \"" + std::string(magic) + "\"");
  }
}

template <typename T>
void check_raster(const Raster<T>& image, const char* what) {
  if (image.rows <= 0 || image.cols <= 0 ||
      image.values.size() != static_cast<std::size_t>(image.rows) * image.cols) {
    throw Error(ErrorCode::kShapeMismatch, std::string(what) + ": raster size mismatch");
  }
}

std::vector<std::uint8_t> netpbm(const char* magic, int cols, int rows,
                                 std::span<const std::uint8_t> raster) {
  ByteWriter w;
  w.put_text(std::string(magic) + "\n" + std::to_string(cols) + " " + std::to_string(rows) +
             "\n255\n");
  w.put_bytes(raster);
  return std::move(w.bytes());
}

}  // namespace

std::vector<std::uint8_t> encode_pfm(const FloatRaster& image) {
  check_raster(image, "PFM");
  ByteWriter w;
  w.put_text("Pf\n" + std::to_string(image.cols) + " " + std::to_string(image.rows) + "\n-1.0\n");
  for (int row = image.rows - 1; row >= 0; --row) {
    for (int col = 0; col < image.cols; ++col) {
      w.put<float>(image.values[static_cast<std::size_t>(row) * image.cols + col]);
    }
  }
  return std::move(w.bytes());
}

FloatRaster decode_pfm(std::span<const std::uint8_t> bytes) {
  HeaderParser h(bytes, "PFM");
  expect_magic(h, bytes, "Pf", "PFM");
  FloatRaster image;
  image.cols = h.positive_int();
  image.rows = h.positive_int();
  const std::string scale_text = h.token();
  double scale = 0.0;
  auto [ptr, ec] = std::from_chars(scale_text.data(), scale_text.data() + scale_text.size(), scale);
  if (ec != std::errc() || ptr != scale_text.data() + scale_text.size() || scale == 0.0) {
    throw Error(ErrorCode::kParseError, "PFM: bad scale '" + scale_text + "'");
  }
  const bool big_endian = scale > 0.0;
  const std::size_t n = static_cast<std::size_t>(image.rows) * image.cols;
  ByteReader r(h.raster(n * sizeof(float)), "PFM");
  image.values.resize(n);
  for (int row = image.rows - 1; row >= 0; --row) {
    for (int col = 0; col < image.cols; ++col) {
      auto bits = r.get<std::uint32_t>();
      if (big_endian) bits = __builtin_bswap32(bits);
      image.values[static_cast<std::size_t>(row) * image.cols + col] = std::bit_cast<float>(bits);
    }
  }
  return image;
}

std::vector<std::uint8_t> encode_pgm(const ByteRaster& image) {
  check_raster(image, "PGM");
  return netpbm("P5", image.cols, image.rows, image.values);
}

ByteRaster decode_pgm(std::span<const std::uint8_t> bytes) {
  HeaderParser h(bytes, "PGM");
  expect_magic(h, bytes, "P5", "PGM");
  ByteRaster image;
  image.cols = h.positive_int();
  image.rows = h.positive_int();
  if (h.positive_int() > 255) throw Error(ErrorCode::kParseError, "PGM: only 8-bit maxval supported");
  const auto raster = h.raster(static_cast<std::size_t>(image.rows) * image.cols);
  image.values.assign(raster.begin(), raster.end());
  return image;
}

std::vector<std::uint8_t> encode_ppm(const RgbRaster& image) {
  check_raster(image, "PPM");
  std::vector<std::uint8_t> raster;
  raster.reserve(image.values.size() * 3);
  for (const Rgb& c : image.values) raster.insert(raster.end(), {c.r, c.g, c.b});
  return netpbm("P6", image.cols, image.rows, raster);
}

RgbRaster decode_ppm(std::span<const std::uint8_t> bytes) {
  HeaderParser h(bytes, "PPM");
  expect_magic(h, bytes, "P6", "PPM");
  RgbRaster image;
  image.cols = h.positive_int();
  image.rows = h.positive_int();
  if (h.positive_int() > 255) throw Error(ErrorCode::kParseError, "PPM: only 8-bit maxval supported");
  const std::size_t n = static_cast<std::size_t>(image.rows) * image.cols;
  const auto raster = h.raster(n * 3);
  image.values.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    image.values[i] = {raster[3 * i], raster[3 * i + 1], raster[3 * i + 2]};
  }
  return image;
}

void write_pfm(const std::filesystem::path& path, const FloatRaster& image) {
  write_file_bytes(path, encode_pfm(image));
}
FloatRaster read_pfm(const std::filesystem::path& path) { return decode_pfm(read_file_bytes(path)); }
void write_pgm(const std::filesystem::path& path, const ByteRaster& image) {
  write_file_bytes(path, encode_pgm(image));
}
ByteRaster read_pgm(const std::filesystem::path& path) { return decode_pgm(read_file_bytes(path)); }
void write_ppm(const std::filesystem::path& path, const RgbRaster& image) {
  write_file_bytes(path, encode_ppm(image));
}
RgbRaster read_ppm(const std::filesystem::path& path) { return decode_ppm(read_file_bytes(path)); }

void write_label_image(const std::filesystem::path& path, const LabelImage& labels) {
  write_pgm(path, ByteRaster{labels.rows, labels.cols, labels.ids});
}

LabelImage read_label_image(const std::filesystem::path& path, LabelSet set) {
  ByteRaster raster = read_pgm(path);
  LabelImage labels(raster.rows, raster.cols, set, 0);
  labels.ids = std::move(raster.values);
  validate_label_image(labels);
  return labels;
}

}  // namespace lila::io
