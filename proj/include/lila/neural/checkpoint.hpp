#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "lila/neural/lilanet.hpp"

namespace lila::nn {

inline constexpr std::uint32_t kCheckpointVersion = 1;

/// Layout, all little-endian:
///   "LLNW" | u32 version | u32 header length | JSON header |
///   f32 values of every parameter in declaration order.
/// The JSON header records the network spec and each parameter's name/shape.
std::vector<std::uint8_t> serialize_checkpoint(const LilaNet<float>& net);
LilaNet<float> deserialize_checkpoint(std::span<const std::uint8_t> bytes);

void save_checkpoint(const std::filesystem::path& path, const LilaNet<float>& net);
/// Throws BadMagic, VersionUnsupported, TruncatedFile or ParseError.
LilaNet<float> load_checkpoint(const std::filesystem::path& path);

}  // namespace lila::nn
