#include "lila/cli/commands.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "lila/autolabel.hpp"
#include "lila/dataset/manifest.hpp"
#include "lila/evaluation.hpp"
#include "lila/io/binary.hpp"
#include "lila/io/image_file.hpp"
#include "lila/io/scan_file.hpp"
#include "lila/io/text_formats.hpp"
#include "lila/neural/checkpoint.hpp"
#include "test_util.hpp"

namespace lila::cli {
namespace {

namespace fs = std::filesystem;

struct Outcome {
  int code = -1;
  std::string out;
  std::string err;
};

Outcome lila(std::vector<std::string> args) {
  args.insert(args.begin(), "lila");
  std::ostringstream out, err;
  Outcome o;
  o.code = run(args, out, err);
  o.out = out.str();
  o.err = err.str();
  return o;
}

std::string p(const fs::path& path) { return path.string(); }

/// Small synthetic dataset shared by the tests in this file.
class CliDataset : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    root_ = fs::temp_directory_path() / "lila_cli_dataset";
    fs::remove_all(root_);
    const Outcome o = lila({"synth", "-o", p(root_ / "data"), "--sequences", "3", "--frames", "3",
                            "--columns", "96", "--seed", "5"});
    ASSERT_EQ(o.code, kExitOk) << o.err;
  }
  static void TearDownTestSuite() { fs::remove_all(root_); }

  static fs::path manifest() { return root_ / "data" / "manifest.json"; }
  static inline fs::path root_;
};

TEST(Cli, HelpAndUsageErrors) {
  EXPECT_EQ(lila({"--help"}).code, kExitOk);
  EXPECT_EQ(lila({}).code, kExitFailure);
  EXPECT_EQ(lila({"frobnicate"}).code, kExitFailure);
  EXPECT_EQ(lila({"train"}).code, kExitFailure);
}

TEST(Cli, MissingInputIsExitTwo) {
  testing::TempDir dir;
  const Outcome o = lila({"project", p(dir / "nope.llsc"), "-o", p(dir.path())});
  EXPECT_EQ(o.code, kExitFailure);
  EXPECT_NE(o.err.find("IoError"), std::string::npos);
  EXPECT_EQ(lila({"autolabel", p(dir / "none.json"), "-o", p(dir / "out")}).code, kExitFailure);
}

TEST(Cli, ProjectEmptyScan) {
  testing::TempDir dir;
  LidarScan scan;
  scan.rings = 4;
  scan.columns = 10;
  io::write_scan(dir / "empty.llsc", scan);
  const Outcome o = lila({"project", p(dir / "empty.llsc"), "-o", p(dir / "out")});
  ASSERT_EQ(o.code, kExitOk) << o.err;
  const io::FloatRaster depth = io::read_pfm(dir / "out" / "empty_depth.pfm");
  EXPECT_EQ(depth.rows, 4);
  EXPECT_EQ(depth.cols, 10);
  for (float v : depth.values) EXPECT_EQ(v, 0.0f);
  const io::ByteRaster mask = io::read_pgm(dir / "out" / "empty_mask.pgm");
  for (auto v : mask.values) EXPECT_EQ(v, 0);
}

TEST(Cli, ProjectWritesMaskOfValidCells) {
  testing::TempDir dir;
  LidarScan scan;
  scan.rings = 2;
  scan.columns = 8;
  LidarPoint pt;
  pt.ring = 1;
  pt.azimuth = 0.1f;
  pt.range = 3.5f;
  pt.reflectivity = 0.25f;
  scan.points.push_back(pt);
  io::write_scan(dir / "one.llsc", scan);
  ASSERT_EQ(lila({"project", p(dir / "one.llsc"), "-o", p(dir.path())}).code, kExitOk);
  const Cell c = cell_of(pt, 8);
  const std::size_t k = static_cast<std::size_t>(c.row * 8 + c.col);
  EXPECT_EQ(io::read_pfm(dir / "one_depth.pfm").values[k], 3.5f);
  EXPECT_EQ(io::read_pfm(dir / "one_reflectivity.pfm").values[k], 0.25f);
  const auto mask = io::read_pgm(dir / "one_mask.pgm").values;
  EXPECT_EQ(std::count(mask.begin(), mask.end(), 255), 1);
  EXPECT_EQ(mask[k], 255);
}

TEST_F(CliDataset, SynthIsDeterministicAndHonoursFrameCount) {
  const fs::path again = root_ / "again";
  ASSERT_EQ(lila({"synth", "-o", p(again), "--sequences", "3", "--frames", "3", "--columns", "96",
                  "--seed", "5"})
                .code,
            kExitOk);
  const DatasetManifest m = read_manifest(manifest());
  ASSERT_EQ(m.sequences.size(), 3u);
  for (const auto& seq : m.sequences) {
    EXPECT_EQ(seq.frames.size(), 3u);
    EXPECT_NE(seq.split, Split::kUnassigned);
  }
  for (const auto& entry : fs::recursive_directory_iterator(root_ / "data")) {
    if (!entry.is_regular_file()) continue;
    const fs::path rel = fs::relative(entry.path(), root_ / "data");
    EXPECT_EQ(io::read_file_bytes(entry.path()), io::read_file_bytes(again / rel)) << rel;
  }
}

TEST_F(CliDataset, SynthTruthAgreesWithReloadedAutolabel) {
  // Oracle spot-check: re-run autolabel through the file formats and
  // compare with the stored ground truth on transferred points.
  const DatasetManifest m = read_manifest(manifest());
  const fs::path base = manifest().parent_path();
  const auto& seq = m.sequences[0];
  const auto calib = io::read_calibration(base / seq.calibration);
  const FrameBundle bundle{io::read_scan(base / seq.frames[0].scan),
                           io::read_label_image(base / seq.frames[0].image, LabelSet::kCityscapes),
                           seq.frames[0].camera_time, calib.calibration,
                           io::read_pose_log(base / seq.poses), *calib.beams};
  const LabeledScan out = autolabel_frame(bundle);
  const io::PointLabels truth = io::read_labels(base / seq.frames[0].ground_truth);
  std::size_t transferred = 0, agree = 0;
  for (std::size_t i = 0; i < out.labels.size(); ++i) {
    if (out.provenance[i] != Provenance::kTransferred || out.labels[i] == kUnlabeledId) continue;
    ++transferred;
    agree += out.labels[i] == truth.labels[i];
  }
  ASSERT_GT(transferred, 50u);
  EXPECT_GE(static_cast<double>(agree) / static_cast<double>(transferred), 0.9);
}

TEST_F(CliDataset, AutolabelReportMatchesHeadingFilter) {
  const fs::path out = root_ / "auto";
  const Outcome o = lila({"autolabel", p(manifest()), "-o", p(out)});
  ASSERT_EQ(o.code, kExitOk) << o.err;
  std::ifstream report(out / "report.jsonl");
  std::string line;
  std::size_t frames = 0, kept = 0;
  while (std::getline(report, line)) {
    const auto j = nlohmann::json::parse(line);
    ++frames;
    const bool k = j["kept"].get<bool>();
    kept += k;
    ASSERT_FALSE(j["heading_deviation_deg"].is_null());
    EXPECT_EQ(k, std::abs(j["heading_deviation_deg"].get<double>()) <= 30.0);
  }
  EXPECT_EQ(frames, 9u);
  EXPECT_NE(o.out.find("heading filter: kept " + std::to_string(kept) + " of 9 frames"),
            std::string::npos)
      << o.out;
  const DatasetManifest labeled = read_manifest(out / "manifest.json");
  EXPECT_EQ(labeled.frame_count(), kept);
  for (const auto& seq : labeled.sequences) {
    for (const auto& f : seq.frames) {
      EXPECT_FALSE(f.labels.empty());
      EXPECT_NO_THROW(io::read_labels(out / f.labels));
      EXPECT_NO_THROW(io::read_scan(out / f.scan));
    }
  }
}

TEST(Cli, AutolabelEmptyManifest) {
  testing::TempDir dir;
  write_manifest(dir / "m.json", DatasetManifest{});
  const Outcome o = lila({"autolabel", p(dir / "m.json"), "-o", p(dir / "out")});
  ASSERT_EQ(o.code, kExitOk) << o.err;
  EXPECT_EQ(io::read_text_file(dir / "out" / "report.jsonl"), "");
  EXPECT_NE(o.out.find("kept 0 of 0"), std::string::npos);
}

TEST_F(CliDataset, ZeroIterationTrainEmitsInitCheckpoint) {
  const fs::path ckpt = root_ / "zero.llnw";
  ASSERT_EQ(lila({"train", p(manifest()), "-o", p(ckpt), "--iterations", "0", "--seed", "9",
                  "--split", "all"})
                .code,
            kExitOk);
  nn::LilaNet<float> init;
  init.init_msra(9);
  EXPECT_EQ(io::read_file_bytes(ckpt), nn::serialize_checkpoint(init));
  EXPECT_EQ(io::read_text_file(root_ / "zero.loss.csv"), "iteration,loss\n");
}

TEST_F(CliDataset, TrainFinetuneInferEval) {
  const fs::path ckpt = root_ / "net.llnw";
  Outcome o = lila({"train", p(manifest()), "-o", p(ckpt), "--iterations", "12", "--batch", "2",
                    "--split", "all"});
  ASSERT_EQ(o.code, kExitOk) << o.err;
  const std::string trace = io::read_text_file(root_ / "net.loss.csv");
  EXPECT_EQ(std::count(trace.begin(), trace.end(), '\n'), 13);

  // Same command, same bytes.
  ASSERT_EQ(lila({"train", p(manifest()), "-o", p(root_ / "net2.llnw"), "--iterations", "12",
                  "--batch", "2", "--split", "all"})
                .code,
            kExitOk);
  EXPECT_EQ(io::read_file_bytes(ckpt), io::read_file_bytes(root_ / "net2.llnw"));

  const fs::path tuned = root_ / "tuned.llnw";
  o = lila({"finetune", p(manifest()), "--checkpoint", p(ckpt), "-o", p(tuned), "--iterations",
            "6", "--batch", "2", "--split", "all"});
  ASSERT_EQ(o.code, kExitOk) << o.err;
  // The finetune trace picks up where training ended.
  auto last_loss = [](const std::string& csv) {
    const auto line_start = csv.rfind('\n', csv.size() - 2) + 1;
    return std::stod(csv.substr(csv.find(',', line_start) + 1));
  };
  auto first_loss = [](const std::string& csv) {
    const auto line_start = csv.find('\n') + 1;
    return std::stod(csv.substr(csv.find(',', line_start) + 1));
  };
  const double before = last_loss(trace);
  const double after = first_loss(io::read_text_file(root_ / "tuned.loss.csv"));
  EXPECT_LT(after / before, 10.0);
  EXPECT_LT(before / after, 10.0);

  const fs::path pred = root_ / "pred";
  o = lila({"infer", p(manifest()), "--checkpoint", p(tuned), "-o", p(pred), "--split", "test"});
  ASSERT_EQ(o.code, kExitOk) << o.err;
  const fs::path json_path = root_ / "eval.json";
  o = lila({"eval", p(pred), p(manifest()), "--split", "test", "--json", p(json_path)});
  ASSERT_EQ(o.code, kExitOk) << o.err;
  EXPECT_NE(o.out.find("mean IoU"), std::string::npos);

  // Oracle: the evaluation module on the same files.
  const DatasetManifest m = read_manifest(manifest());
  ConfusionMatrix cm;
  for (const auto& seq : m.sequences) {
    if (seq.split != Split::kTest) continue;
    for (std::size_t i = 0; i < seq.frames.size(); ++i) {
      char name[16];
      std::snprintf(name, sizeof name, "%04zu.lbl", i);
      cm.accumulate(io::read_labels(pred / seq.id / name).labels,
                    io::read_labels(manifest().parent_path() / seq.frames[i].ground_truth).labels);
    }
  }
  const auto report = nlohmann::json::parse(io::read_text_file(json_path));
  EXPECT_EQ(report["samples"].get<std::uint64_t>(), cm.total());
  if (!report["mean_iou"].is_null()) EXPECT_DOUBLE_EQ(report["mean_iou"].get<double>(), mean_iou(cm));
}

TEST_F(CliDataset, EvalPerfectPredictionsAndDisjointLists) {
  const DatasetManifest m = read_manifest(manifest());
  const fs::path pred = root_ / "perfect";
  for (const auto& seq : m.sequences) {
    if (seq.split != Split::kTest) continue;
    fs::create_directories(pred / seq.id);
    for (std::size_t i = 0; i < seq.frames.size(); ++i) {
      char name[16];
      std::snprintf(name, sizeof name, "%04zu.lbl", i);
      fs::copy_file(manifest().parent_path() / seq.frames[i].ground_truth, pred / seq.id / name);
    }
  }
  const fs::path json_path = root_ / "perfect.json";
  Outcome o = lila({"eval", p(pred), p(manifest()), "--json", p(json_path)});
  ASSERT_EQ(o.code, kExitOk) << o.err;
  EXPECT_DOUBLE_EQ(nlohmann::json::parse(io::read_text_file(json_path))["mean_iou"].get<double>(), 1.0);

  // An extra prediction with no ground truth, then a missing one.
  fs::copy_file(manifest().parent_path() / m.sequences[0].frames[0].ground_truth,
                pred / "stray.lbl");
  EXPECT_EQ(lila({"eval", p(pred), p(manifest())}).code, kExitFailure);
  fs::remove(pred / "stray.lbl");
  fs::remove_all(pred / m.sequences[0].id);
  fs::remove_all(pred / m.sequences[1].id);
  fs::remove_all(pred / m.sequences[2].id);
  EXPECT_EQ(lila({"eval", p(pred), p(manifest())}).code, kExitFailure);
}

TEST_F(CliDataset, BadCheckpointMagicIsExitTwo) {
  const fs::path bad = root_ / "bad.llnw";
  io::write_file_bytes(bad, std::vector<std::uint8_t>{'N', 'O', 'P', 'E', 1, 0, 0, 0});
  const Outcome o = lila({"finetune", p(manifest()), "--checkpoint", p(bad), "-o",
                          p(root_ / "x.llnw"), "--iterations", "1"});
  EXPECT_EQ(o.code, kExitFailure);
  EXPECT_NE(o.err.find("BadMagic"), std::string::npos);
}

TEST_F(CliDataset, ConfigFileWithFlagOverride) {
  const fs::path cfg = root_ / "cfg.json";
  io::write_text_file(cfg, R"({"iterations": 3, "batch": 1, "split": "all", "seed": 2})");
  ASSERT_EQ(lila({"train", p(manifest()), "-o", p(root_ / "c.llnw"), "--config", p(cfg),
                  "--iterations", "2"})
                .code,
            kExitOk);
  const std::string trace = io::read_text_file(root_ / "c.loss.csv");
  EXPECT_EQ(std::count(trace.begin(), trace.end(), '\n'), 3);
  io::write_text_file(cfg, R"({"iterations": "many"})");
  EXPECT_EQ(lila({"train", p(manifest()), "-o", p(root_ / "d.llnw"), "--config", p(cfg)}).code,
            kExitFailure);
}

}  // namespace
}  // namespace lila::cli
