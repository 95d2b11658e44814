#include "lila/neural/checkpoint.hpp"

#include <nlohmann/json.hpp>

#include "lila/io/binary.hpp"

namespace lila::nn {

namespace {

constexpr std::string_view kMagic = "LLNW";

nlohmann::json header_json(const LilaNet<float>& net) {
  nlohmann::json params = nlohmann::json::array();
  for (const Parameter<float>* p : net.parameters()) {
    const Shape& s = p->value.shape();
    params.push_back({{"name", p->name}, {"shape", {s[0], s[1], s[2], s[3]}}});
  }
  const NetworkSpec& spec = net.spec();
  return {{"block_widths", spec.block_widths},
          {"in_channels", spec.in_channels},
          {"num_classes", spec.num_classes},
          {"parameters", params}};
}

}  // namespace

std::vector<std::uint8_t> serialize_checkpoint(const LilaNet<float>& net) {
  io::ByteWriter w;
  w.put_text(kMagic);
  w.put<std::uint32_t>(kCheckpointVersion);
  const std::string header = header_json(net).dump();
  w.put<std::uint32_t>(static_cast<std::uint32_t>(header.size()));
  w.put_text(header);
  for (const Parameter<float>* p : net.parameters()) {
    for (float v : p->value.data()) w.put<float>(v);
  }
  return std::move(w.bytes());
}

LilaNet<float> deserialize_checkpoint(std::span<const std::uint8_t> bytes) {
  io::ByteReader r(bytes, "checkpoint");
  r.expect_magic(kMagic);
  const auto version = r.get<std::uint32_t>();
  if (version != kCheckpointVersion) {
    throw Error(ErrorCode::kVersionUnsupported,
                "checkpoint version " + std::to_string(version) + " is not supported");
  }
  const auto header_len = r.get<std::uint32_t>();
  const auto header_bytes = r.get_bytes(header_len);
  nlohmann::json header;
  NetworkSpec spec;
  try {
    header = nlohmann::json::parse(header_bytes.begin(), header_bytes.end());
    spec.block_widths = header.at("block_widths").get<std::array<int, 5>>();
    spec.in_channels = header.at("in_channels").get<int>();
    spec.num_classes = header.at("num_classes").get<int>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParseError, std::string("checkpoint header: ") + e.what());
  }
  spec.validate();
  LilaNet<float> net(spec);
  auto params = net.parameters();
  const auto& listed = header.at("parameters");
  if (!listed.is_array() || listed.size() != params.size()) {
    throw Error(ErrorCode::kParseError, "checkpoint parameter list does not match its spec");
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    const Shape& s = params[i]->value.shape();
    const std::array<int, 4> expected{s[0], s[1], s[2], s[3]};
    if (listed[i].value("name", "") != params[i]->name ||
        listed[i].value("shape", std::array<int, 4>{}) != expected) {
      throw Error(ErrorCode::kParseError, "checkpoint parameter " + std::to_string(i) +
                                              " does not match " + params[i]->name);
    }
    for (float& v : params[i]->value.data()) v = r.get<float>();
  }
  if (r.remaining() != 0) {
    throw Error(ErrorCode::kParseError,
                "checkpoint has " + std::to_string(r.remaining()) + " trailing bytes");
  }
  return net;
}

void save_checkpoint(const std::filesystem::path& path, const LilaNet<float>& net) {
  io::write_file_bytes(path, serialize_checkpoint(net));
}

LilaNet<float> load_checkpoint(const std::filesystem::path& path) {
  return deserialize_checkpoint(io::read_file_bytes(path));
}

}  // namespace lila::nn
