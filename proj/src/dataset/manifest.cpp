#include "lila/dataset/manifest.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include <nlohmann/json.hpp>

#include "lila/error.hpp"
#include "lila/io/binary.hpp"
#include "lila/rng.hpp"

namespace lila {

using nlohmann::json;

std::string_view split_name(Split s) {
  switch (s) {
    case Split::kUnassigned: return "unassigned";
    case Split::kTrain: return "train";
    case Split::kVal: return "val";
    case Split::kTest: return "test";
  }
  return "unassigned";
}

std::optional<Split> split_from_name(std::string_view name) {
  for (Split s : {Split::kUnassigned, Split::kTrain, Split::kVal, Split::kTest}) {
    if (split_name(s) == name) return s;
  }
  return std::nullopt;
}

std::size_t DatasetManifest::frame_count() const {
  std::size_t n = 0;
  for (const SequenceEntry& s : sequences) n += s.frames.size();
  return n;
}

std::string manifest_to_json(const DatasetManifest& manifest) {
  json seqs = json::array();
  for (const SequenceEntry& s : manifest.sequences) {
    json frames = json::array();
    for (const FrameEntry& f : s.frames) {
      json frame = {{"scan", f.scan}, {"image", f.image}, {"camera_time_us", f.camera_time.us}};
      if (!f.ground_truth.empty()) frame["ground_truth"] = f.ground_truth;
      if (!f.labels.empty()) frame["labels"] = f.labels;
      frames.push_back(std::move(frame));
    }
    seqs.push_back({{"id", s.id},
                    {"calibration", s.calibration},
                    {"poses", s.poses},
                    {"split", split_name(s.split)},
                    {"frames", std::move(frames)}});
  }
  return json{{"version", 1}, {"sequences", std::move(seqs)}}.dump(2) + "\n";
}

DatasetManifest manifest_from_json(std::string_view text) {
  DatasetManifest out;
  try {
    const json doc = json::parse(text);
    if (doc.value("version", 1) != 1) {
      throw Error(ErrorCode::kVersionUnsupported, "manifest version is not supported");
    }
    std::set<std::string> ids;
    for (const json& s : doc.at("sequences")) {
      SequenceEntry seq;
      seq.id = s.at("id").get<std::string>();
      seq.calibration = s.at("calibration").get<std::string>();
      seq.poses = s.at("poses").get<std::string>();
      const std::string split = s.value("split", "unassigned");
      const auto parsed = split_from_name(split);
      if (!parsed) throw Error(ErrorCode::kParseError, "unknown split '" + split + "'");
      seq.split = *parsed;
      for (const json& f : s.at("frames")) {
        seq.frames.push_back({f.at("scan").get<std::string>(), f.at("image").get<std::string>(),
                              Timestamp{f.at("camera_time_us").get<std::int64_t>()},
                              f.value("ground_truth", ""), f.value("labels", "")});
      }
      if (!ids.insert(seq.id).second) {
        throw Error(ErrorCode::kParseError, "sequence id '" + seq.id + "' repeated");
      }
      out.sequences.push_back(std::move(seq));
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParseError, std::string("manifest: ") + e.what());
  }
  return out;
}

DatasetManifest read_manifest(const std::filesystem::path& path) {
  return manifest_from_json(io::read_text_file(path));
}

void write_manifest(const std::filesystem::path& path, const DatasetManifest& manifest) {
  io::write_text_file(path, manifest_to_json(manifest));
}

DatasetManifest split_sequences(const DatasetManifest& manifest, const SplitRatios& ratios,
                                std::uint64_t seed) {
  const std::size_t n = manifest.sequences.size();
  if (n < 3) {
    throw Error(ErrorCode::kTooFewSequences,
                "splitting needs at least 3 sequences, got " + std::to_string(n));
  }
  for (double r : ratios) {
    if (!(r > 0.0) || !std::isfinite(r)) {
      throw Error(ErrorCode::kInvalidArgument, "split ratios must be positive");
    }
  }
  const double ratio_sum = ratios[0] + ratios[1] + ratios[2];
  const double total = static_cast<double>(manifest.frame_count());

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(seed);
  rng.shuffle(order.begin(), order.end());
  // Largest sequences first; the shuffle only breaks ties. Placing small
  // sequences last keeps the final corrections small.
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return manifest.sequences[a].frames.size() > manifest.sequences[b].frames.size();
  });

  std::array<double, 3> assigned{0.0, 0.0, 0.0};
  std::array<std::size_t, 3> members{0, 0, 0};
  DatasetManifest out = manifest;
  constexpr std::array<Split, 3> kSplits{Split::kTrain, Split::kVal, Split::kTest};

  for (std::size_t step = 0; step < n; ++step) {
    const std::size_t remaining = n - step;
    const auto empty = static_cast<std::size_t>(std::count(members.begin(), members.end(), 0u));
    const bool force_empty = remaining == empty;
    int best = -1;
    double best_deficit = 0.0;
    for (int k = 0; k < 3; ++k) {
      if (force_empty && members[static_cast<std::size_t>(k)] != 0) continue;
      const double deficit = ratios[static_cast<std::size_t>(k)] / ratio_sum * total -
                             assigned[static_cast<std::size_t>(k)];
      if (best < 0 || deficit > best_deficit) {
        best = k;
        best_deficit = deficit;
      }
    }
    SequenceEntry& seq = out.sequences[order[step]];
    seq.split = kSplits[static_cast<std::size_t>(best)];
    assigned[static_cast<std::size_t>(best)] += static_cast<double>(seq.frames.size());
    ++members[static_cast<std::size_t>(best)];
  }
  return out;
}

std::vector<std::size_t> select_keyframes(std::size_t n, std::size_t k) {
  if (k < 1) throw Error(ErrorCode::kInvalidArgument, "keyframe count must be at least 1");
  if (k > n) {
    throw Error(ErrorCode::kKExceedsN, "cannot pick " + std::to_string(k) + " keyframes from " +
                                           std::to_string(n) + " frames");
  }
  if (k == 1) return {(n - 1) / 2};
  std::vector<std::size_t> out;
  out.reserve(k);
  const std::size_t span = n - 1;
  const std::size_t steps = k - 1;
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t idx = (2 * i * span + steps) / (2 * steps);
    if (out.empty() || out.back() != idx) out.push_back(idx);
  }
  return out;
}

}  // namespace lila
