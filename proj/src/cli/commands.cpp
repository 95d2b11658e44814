#include "lila/cli/commands.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <tuple>
#include <optional>
#include <set>

#include <nlohmann/json.hpp>

#include "lila/autolabel.hpp"
#include "lila/dataset/manifest.hpp"
#include "lila/dataset/synth.hpp"
#include "lila/error.hpp"
#include "lila/evaluation.hpp"
#include "lila/io/binary.hpp"
#include "lila/io/image_file.hpp"
#include "lila/io/scan_file.hpp"
#include "lila/io/text_formats.hpp"
#include "lila/neural/checkpoint.hpp"
#include "lila/neural/training.hpp"
#include "lila/parallel.hpp"

namespace lila::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Values a JSON config may supply; explicit flags win.
struct Overrides {
  json config = json::object();

  template <typename T>
  void apply(const CLI::Option* flag, const char* key, T& target) const {
    if (flag->count() == 0 && config.contains(key)) target = config.at(key).get<T>();
  }
};

Overrides load_config(const std::string& path) {
  Overrides o;
  if (path.empty()) return o;
  try {
    o.config = json::parse(io::read_text_file(path));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParseError, "config " + path + ": " + e.what());
  }
  if (!o.config.is_object()) throw Error(ErrorCode::kParseError, "config must be a JSON object");
  return o;
}

std::string frame_name(std::size_t index) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04zu", index);
  return buf;
}

fs::path resolve(const fs::path& base, const std::string& relative) {
  if (relative.empty()) throw Error(ErrorCode::kInvalidArgument, "empty path in manifest");
  const fs::path p(relative);
  return p.is_absolute() ? p : base / p;
}

std::string relative_to(const fs::path& path, const fs::path& base) {
  return fs::relative(fs::absolute(path), fs::absolute(base)).generic_string();
}

void ensure_directory(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::kIoError, "cannot create " + dir.string() + ": " + ec.message());
}

void require_file(const fs::path& path) {
  if (!fs::is_regular_file(path)) throw Error(ErrorCode::kIoError, "missing input " + path.string());
}

nn::NetworkSpec profile_spec(const std::string& profile) {
  if (profile == "full") return nn::NetworkSpec::full();
  if (profile == "reduced") return nn::NetworkSpec::reduced();
  throw Error(ErrorCode::kInvalidArgument, "profile must be full or reduced, got " + profile);
}

bool split_selected(const SequenceEntry& seq, const std::string& split) {
  return split == "all" || split_name(seq.split) == split;
}

void validate_split_option(const std::string& split) {
  if (split != "all" && !split_from_name(split)) {
    throw Error(ErrorCode::kInvalidArgument, "unknown split '" + split + "'");
  }
}

struct SequenceContext {
  io::CalibrationFile calibration;
  PoseTrack poses;
};

SequenceContext load_sequence(const fs::path& base, const SequenceEntry& seq) {
  return {io::read_calibration(resolve(base, seq.calibration)),
          io::read_pose_log(resolve(base, seq.poses))};
}

struct FrameRef {
  const SequenceEntry* sequence = nullptr;
  std::size_t index = 0;
  const FrameEntry& frame() const { return sequence->frames[index]; }
};

std::vector<FrameRef> select_frames(const DatasetManifest& manifest, const std::string& split) {
  std::vector<FrameRef> out;
  for (const SequenceEntry& seq : manifest.sequences) {
    if (!split_selected(seq, split)) continue;
    for (std::size_t i = 0; i < seq.frames.size(); ++i) out.push_back({&seq, i});
  }
  return out;
}

// ---- project ---------------------------------------------------------------

int cmd_project(const std::string& scan_path, const std::string& out_dir, std::ostream& out) {
  require_file(scan_path);
  const LidarScan scan = io::read_scan(scan_path);
  const LidarImage image = scan_to_image(scan);
  ensure_directory(out_dir);
  const std::string stem = fs::path(scan_path).stem().string();
  io::FloatRaster depth{image.rows, image.cols, image.depth};
  io::FloatRaster refl{image.rows, image.cols, image.reflectivity};
  io::ByteRaster mask{image.rows, image.cols, std::vector<std::uint8_t>(image.size())};
  for (std::size_t i = 0; i < image.size(); ++i) mask.values[i] = image.valid[i] ? 255 : 0;
  io::write_pfm(fs::path(out_dir) / (stem + "_depth.pfm"), depth);
  io::write_pfm(fs::path(out_dir) / (stem + "_reflectivity.pfm"), refl);
  io::write_pgm(fs::path(out_dir) / (stem + "_mask.pgm"), mask);
  out << "projected " << scan.points.size() << " points onto " << image.rows << "x" << image.cols
      << ", " << image.valid_count() << " valid cells\n";
  return kExitOk;
}

// ---- autolabel ---------------------------------------------------------------

struct AutolabelArgs {
  std::string manifest;
  std::string out_dir;
  double gamma_h_deg = 60.0;
  double epsilon_occ_m = 0.5;
  bool no_ego_motion = false;
  int jobs = 1;
};

struct FrameOutcome {
  std::optional<double> deviation;
  bool kept = false;
  ProvenanceCounts counts;
  std::string labels;  // relative to the output directory
};

int cmd_autolabel(const AutolabelArgs& args, std::ostream& out) {
  require_file(args.manifest);
  const fs::path base = fs::path(args.manifest).parent_path();
  const DatasetManifest manifest = read_manifest(args.manifest);
  const fs::path out_dir(args.out_dir);
  ensure_directory(out_dir);
  const double gamma_h = deg_to_rad(args.gamma_h_deg);
  AutolabelOptions options;
  options.ego_motion_correction = !args.no_ego_motion;
  options.occlusion_epsilon_m = args.epsilon_occ_m;

  DatasetManifest labeled;
  std::ofstream report(out_dir / "report.jsonl", std::ios::trunc);
  if (!report) throw Error(ErrorCode::kIoError, "cannot write report in " + out_dir.string());
  ProvenanceCounts totals;
  std::size_t frames = 0;
  std::size_t kept = 0;
  for (const SequenceEntry& seq : manifest.sequences) {
    const SequenceContext ctx = load_sequence(base, seq);
    const BeamTable* beams = ctx.calibration.beams ? &*ctx.calibration.beams : nullptr;
    std::vector<FrameOutcome> outcomes(seq.frames.size());
    if (!seq.frames.empty()) ensure_directory(out_dir / seq.id);
    parallel_for(seq.frames.size(), args.jobs, [&](std::size_t i) {
      const FrameEntry& entry = seq.frames[i];
      FrameBundle bundle{io::read_scan(resolve(base, entry.scan)),
                         io::read_label_image(resolve(base, entry.image), LabelSet::kCityscapes),
                         entry.camera_time, ctx.calibration.calibration, ctx.poses,
                         BeamTable::uniform()};
      bundle.beams = beams ? *beams : BeamTable::uniform(bundle.scan.rings);
      FrameOutcome& o = outcomes[i];
      const auto scanner = scanner_azimuth_at(bundle.scan, entry.camera_time);
      const double camera = camera_azimuth(bundle.calibration);
      if (scanner) {
        o.deviation = wrap_to_pi(*scanner - camera);
        o.kept = heading_ok(camera, *scanner, gamma_h);
      }
      if (!o.kept) return;
      const LabeledScan result = autolabel_frame(bundle, options);
      o.counts = count_provenance(result);
      o.labels = seq.id + "/" + frame_name(i) + ".lbl";
      io::write_labels(out_dir / o.labels, result);
    });

    SequenceEntry out_seq = seq;
    out_seq.calibration = relative_to(resolve(base, seq.calibration), out_dir);
    out_seq.poses = relative_to(resolve(base, seq.poses), out_dir);
    out_seq.frames.clear();
    for (std::size_t i = 0; i < seq.frames.size(); ++i) {
      const FrameOutcome& o = outcomes[i];
      json line = {{"sequence", seq.id},
                   {"frame", i},
                   {"kept", o.kept},
                   {"heading_deviation_deg",
                    o.deviation ? json(*o.deviation * 180.0 / std::numbers::pi) : json(nullptr)},
                   {"transferred", o.counts.transferred},
                   {"out_of_view", o.counts.out_of_view},
                   {"occluded", o.counts.occluded},
                   {"invalid", o.counts.invalid}};
      report << line.dump() << "\n";
      ++frames;
      if (!o.kept) continue;
      ++kept;
      totals += o.counts;
      FrameEntry f = seq.frames[i];
      f.scan = relative_to(resolve(base, f.scan), out_dir);
      f.image = relative_to(resolve(base, f.image), out_dir);
      if (!f.ground_truth.empty()) f.ground_truth = relative_to(resolve(base, f.ground_truth), out_dir);
      f.labels = o.labels;
      out_seq.frames.push_back(std::move(f));
    }
    labeled.sequences.push_back(std::move(out_seq));
  }
  if (!report) throw Error(ErrorCode::kIoError, "report write failed");
  write_manifest(out_dir / "manifest.json", labeled);
  const json summary = {{"frames", frames},
                        {"kept", kept},
                        {"discarded", frames - kept},
                        {"gamma_h_deg", args.gamma_h_deg},
                        {"transferred", totals.transferred},
                        {"out_of_view", totals.out_of_view},
                        {"occluded", totals.occluded},
                        {"invalid", totals.invalid}};
  io::write_text_file(out_dir / "summary.json", summary.dump(2) + "\n");
  out << "heading filter: kept " << kept << " of " << frames << " frames\n";
  out << "labels: transferred " << totals.transferred << ", out_of_view " << totals.out_of_view
      << ", occluded " << totals.occluded << ", invalid " << totals.invalid << "\n";
  return kExitOk;
}

// ---- train / finetune --------------------------------------------------------

struct TrainArgs {
  std::string manifest;
  std::string output;
  std::string loss_csv;
  std::string checkpoint;  // finetune only
  std::string label_source = "ground_truth";
  std::string split = "train";
  std::string profile = "reduced";
  std::size_t keyframes = 0;
  int iterations = 1000;
  double lr = 1e-3;
  int batch = 5;
  std::uint64_t seed = 0;
  int jobs = 1;
};

std::vector<nn::TrainingSample> load_samples(const TrainArgs& args) {
  if (args.label_source != "ground_truth" && args.label_source != "labels") {
    throw Error(ErrorCode::kInvalidArgument, "label source must be ground_truth or labels");
  }
  validate_split_option(args.split);
  require_file(args.manifest);
  const fs::path base = fs::path(args.manifest).parent_path();
  const DatasetManifest manifest = read_manifest(args.manifest);
  std::vector<FrameRef> frames;
  for (const FrameRef& ref : select_frames(manifest, args.split)) {
    const FrameEntry& f = ref.frame();
    if (!(args.label_source == "labels" ? f.labels : f.ground_truth).empty()) frames.push_back(ref);
  }
  if (args.keyframes > 0) {
    std::vector<FrameRef> picked;
    for (std::size_t k : select_keyframes(frames.size(), args.keyframes)) picked.push_back(frames[k]);
    frames = std::move(picked);
  }
  if (frames.empty()) {
    throw Error(ErrorCode::kEmptyDataset, "no " + args.split + " frames carry " +
                                              args.label_source + " labels");
  }
  std::vector<nn::TrainingSample> samples(frames.size());
  parallel_for(frames.size(), args.jobs, [&](std::size_t i) {
    const FrameEntry& f = frames[i].frame();
    const LidarScan scan = io::read_scan(resolve(base, f.scan));
    const io::PointLabels labels = io::read_labels(
        resolve(base, args.label_source == "labels" ? f.labels : f.ground_truth));
    samples[i] = nn::make_training_sample(scan, labels.labels);
  });
  return samples;
}

fs::path loss_csv_path(const TrainArgs& args) {
  if (!args.loss_csv.empty()) return args.loss_csv;
  fs::path p(args.output);
  p.replace_extension(".loss.csv");
  return p;
}

int cmd_train(const TrainArgs& args, bool finetune, std::ostream& out) {
  if (args.batch < 1) throw Error(ErrorCode::kInvalidArgument, "--batch must be >= 1");
  if (args.iterations < 0) throw Error(ErrorCode::kInvalidArgument, "--iterations must be >= 0");
  std::optional<nn::LilaNet<float>> warm;
  if (finetune) {
    require_file(args.checkpoint);
    warm = nn::load_checkpoint(args.checkpoint);
  }
  const std::vector<nn::TrainingSample> samples = load_samples(args);
  nn::TrainConfig config;
  config.spec = warm ? warm->spec() : profile_spec(args.profile);
  config.learning_rate = args.lr;
  config.batch_size = args.batch;
  config.seed = args.seed;
  config.iterations = args.iterations;
  const nn::TrainResult result = nn::train(samples, config, std::move(warm));
  if (const fs::path parent = fs::path(args.output).parent_path(); !parent.empty()) {
    ensure_directory(parent);
  }
  nn::save_checkpoint(args.output, result.net);
  io::write_text_file(loss_csv_path(args), io::format_loss_trace(result.loss_trace));
  out << (finetune ? "finetuned " : "trained ") << result.loss_trace.size() << " iterations on "
      << samples.size() << " frames";
  if (!result.loss_trace.empty()) out << ", final loss " << result.loss_trace.back();
  out << "\n";
  return kExitOk;
}

// ---- infer -------------------------------------------------------------------

struct InferArgs {
  std::string manifest;
  std::string checkpoint;
  std::string out_dir;
  std::string split = "test";
  int jobs = 1;
};

int cmd_infer(const InferArgs& args, std::ostream& out) {
  validate_split_option(args.split);
  require_file(args.manifest);
  require_file(args.checkpoint);
  const nn::LilaNet<float> net = nn::load_checkpoint(args.checkpoint);
  const fs::path base = fs::path(args.manifest).parent_path();
  const DatasetManifest manifest = read_manifest(args.manifest);
  const std::vector<FrameRef> frames = select_frames(manifest, args.split);
  const fs::path out_dir(args.out_dir);
  ensure_directory(out_dir);
  for (const FrameRef& ref : frames) ensure_directory(out_dir / ref.sequence->id);
  parallel_for(frames.size(), args.jobs, [&](std::size_t i) {
    const LidarScan scan = io::read_scan(resolve(base, frames[i].frame().scan));
    const LidarImage image = scan_to_image(scan);
    const nn::Prediction pred = nn::infer(net, nn::encode_image(image), image.valid);
    LabeledScan result{LidarScan{}, std::vector<std::uint8_t>(scan.points.size(), kUnlabeledId),
                       std::vector<Provenance>(scan.points.size(), Provenance::kInvalid)};
    for (std::size_t p = 0; p < scan.points.size(); ++p) {
      const LidarPoint& point = scan.points[p];
      if (!point.valid()) continue;
      const Cell cell = cell_of(point, scan.columns);
      result.labels[p] = pred.labels.at(cell.row, cell.col);
      result.provenance[p] = Provenance::kTransferred;
    }
    io::write_labels(out_dir / frames[i].sequence->id / (frame_name(frames[i].index) + ".lbl"),
                     result);
  });
  out << "predicted " << frames.size() << " frames\n";
  return kExitOk;
}

// ---- eval --------------------------------------------------------------------

struct EvalArgs {
  std::string predictions;
  std::string manifest;
  std::string split = "test";
  std::string json_out;
  std::string table_out;
};

int cmd_eval(const EvalArgs& args, std::ostream& out) {
  validate_split_option(args.split);
  require_file(args.manifest);
  if (!fs::is_directory(args.predictions)) {
    throw Error(ErrorCode::kIoError, "missing predictions directory " + args.predictions);
  }
  const fs::path base = fs::path(args.manifest).parent_path();
  const DatasetManifest manifest = read_manifest(args.manifest);
  std::set<std::string> expected;
  ConfusionMatrix cm;
  std::size_t evaluated = 0;
  for (const FrameRef& ref : select_frames(manifest, args.split)) {
    const FrameEntry& f = ref.frame();
    if (f.ground_truth.empty()) continue;
    const std::string key = ref.sequence->id + "/" + frame_name(ref.index) + ".lbl";
    expected.insert(key);
    const fs::path pred_path = fs::path(args.predictions) / key;
    if (!fs::is_regular_file(pred_path)) {
      throw Error(ErrorCode::kInvalidArgument, "no prediction for ground truth frame " + key);
    }
    const io::PointLabels pred = io::read_labels(pred_path);
    const io::PointLabels truth = io::read_labels(resolve(base, f.ground_truth));
    cm.accumulate(pred.labels, truth.labels);
    ++evaluated;
  }
  for (const auto& entry : fs::recursive_directory_iterator(args.predictions)) {
    if (!entry.is_regular_file() || entry.path().extension() != ".lbl") continue;
    const std::string key = fs::relative(entry.path(), args.predictions).generic_string();
    if (!expected.count(key)) {
      throw Error(ErrorCode::kInvalidArgument, "prediction " + key + " has no ground truth");
    }
  }
  if (evaluated == 0) {
    throw Error(ErrorCode::kEmptyDataset, "no " + args.split + " frames with ground truth");
  }
  const json report = iou_report_json(cm);
  const std::string table = iou_report_table(cm, "LiLaNet");
  if (!args.json_out.empty()) io::write_text_file(args.json_out, report.dump(2) + "\n");
  if (!args.table_out.empty()) io::write_text_file(args.table_out, table);
  out << table;
  return kExitOk;
}

// ---- synth -------------------------------------------------------------------

struct SynthArgs {
  std::string out_dir;
  int sequences = 4;
  int frames = 10;
  int columns = kDefaultColumns;
  double speed_mps = 5.0;
  double length_m = 60.0;
  std::int64_t frame_interval_us = 500'000;
  std::uint64_t seed = 0;
  int jobs = 1;
};

int cmd_synth(const SynthArgs& args, std::ostream& out) {
  if (args.sequences < 0 || args.frames < 0 || args.columns < 1) {
    throw Error(ErrorCode::kInvalidArgument, "sequences/frames must be >= 0, columns >= 1");
  }
  const fs::path out_dir(args.out_dir);
  ensure_directory(out_dir);
  StreetConfig config;
  config.frames = args.frames;
  config.sensor.columns = args.columns;
  config.speed_mps = args.speed_mps;
  config.length_m = args.length_m;
  config.frame_interval_us = args.frame_interval_us;

  DatasetManifest manifest;
  for (int s = 0; s < args.sequences; ++s) {
    char id[16];
    std::snprintf(id, sizeof id, "seq%03d", s);
    const SynthSequence seq =
        generate_street_sequence(config, derive_seed(args.seed, static_cast<std::uint64_t>(s)),
                                 args.jobs);
    const fs::path dir = out_dir / id;
    ensure_directory(dir);
    SequenceEntry entry;
    entry.id = id;
    entry.calibration = std::string(id) + "/calibration.txt";
    entry.poses = std::string(id) + "/poses.csv";
    io::write_calibration(dir / "calibration.txt",
                          io::CalibrationFile{seq.frames.empty() ? CalibrationSet{
                                                                       config.sensor.lidar_to_vehicle,
                                                                       config.camera.camera_to_vehicle,
                                                                       config.camera.intrinsics}
                                                                 : seq.frames.front().calibration,
                                              config.sensor.beams});
    io::write_pose_log(dir / "poses.csv", seq.trajectory);
    entry.frames.resize(seq.frames.size());
    parallel_for(seq.frames.size(), args.jobs, [&](std::size_t i) {
      const SynthFrame& f = seq.frames[i];
      const std::string name = frame_name(i);
      io::write_scan(dir / ("scan_" + name + ".llsc"), f.scan);
      io::write_label_image(dir / ("image_" + name + ".pgm"), f.semantic_image);
      io::write_labels(dir / ("truth_" + name + ".lbl"), f.ground_truth);
      entry.frames[i] = {std::string(id) + "/scan_" + name + ".llsc",
                         std::string(id) + "/image_" + name + ".pgm", f.camera_time,
                         std::string(id) + "/truth_" + name + ".lbl", ""};
    });
    manifest.sequences.push_back(std::move(entry));
  }
  if (manifest.sequences.size() >= 3) {
    manifest = split_sequences(manifest, kDefaultSplitRatios, args.seed);
  }
  write_manifest(out_dir / "manifest.json", manifest);
  out << "generated " << args.sequences << " sequences x " << args.frames << " frames in "
      << out_dir.string() << "\n";
  return kExitOk;
}

// ---- wiring ------------------------------------------------------------------

CLI::Option* add_config(CLI::App* app, std::string& path) {
  return app->add_option("--config", path, "JSON config; explicit flags override it")
      ->check(CLI::ExistingFile);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"LiDAR semantic labeling toolkit", "lila"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "lila 0.1.0");

  std::string config_path;

  // project
  std::string project_scan;
  std::string project_out = ".";
  auto* project = app.add_subcommand("project", "Scan file to depth/reflectivity PFM + mask PGM");
  project->add_option("scan", project_scan, "Input scan file")->required();
  project->add_option("-o,--output", project_out, "Output directory");

  // autolabel
  AutolabelArgs al;
  auto* autolabel = app.add_subcommand("autolabel", "Transfer camera labels onto LiDAR points");
  autolabel->add_option("manifest", al.manifest, "Dataset manifest")->required();
  autolabel->add_option("-o,--output", al.out_dir, "Output directory")->required();
  auto* al_gamma = autolabel->add_option("--gamma-h-deg", al.gamma_h_deg,
                                         "Heading window width in degrees")->capture_default_str();
  auto* al_eps = autolabel->add_option("--epsilon-occ-m", al.epsilon_occ_m,
                                       "Occlusion depth tolerance in metres")->capture_default_str();
  auto* al_noego = autolabel->add_flag("--no-ego-motion", al.no_ego_motion,
                                       "Disable ego-motion correction");
  auto* al_jobs = autolabel->add_option("--jobs", al.jobs, "Worker threads")->check(CLI::PositiveNumber);
  add_config(autolabel, config_path);

  // train / finetune
  TrainArgs tr;
  TrainArgs ft;
  ft.lr = 1e-4;
  struct TrainFlags {
    CLI::Option *iterations, *lr, *batch, *seed, *profile, *jobs, *keyframes, *source, *split;
  };
  auto add_train = [&](CLI::App* cmd, TrainArgs& a) {
    cmd->add_option("manifest", a.manifest, "Dataset manifest")->required();
    cmd->add_option("-o,--output", a.output, "Checkpoint to write")->required();
    cmd->add_option("--loss-csv", a.loss_csv, "Loss trace CSV (default: <output>.loss.csv)");
    TrainFlags f;
    f.iterations = cmd->add_option("--iterations", a.iterations, "Training iterations")->capture_default_str();
    f.lr = cmd->add_option("--lr", a.lr, "Adam learning rate")->capture_default_str();
    f.batch = cmd->add_option("--batch", a.batch, "Batch size")->capture_default_str();
    f.seed = cmd->add_option("--seed", a.seed, "Random seed")->capture_default_str();
    f.profile = cmd->add_option("--profile", a.profile, "Network profile: full or reduced")
                    ->check(CLI::IsMember({"full", "reduced"}))
                    ->capture_default_str();
    f.jobs = cmd->add_option("--jobs", a.jobs, "Loader threads")->check(CLI::PositiveNumber);
    f.keyframes = cmd->add_option("--keyframes", a.keyframes, "Use k evenly spaced frames (0 = all)");
    f.source = cmd->add_option("--label-source", a.label_source, "ground_truth or labels")
                   ->capture_default_str();
    f.split = cmd->add_option("--split", a.split, "train, val, test or all")->capture_default_str();
    add_config(cmd, config_path);
    return f;
  };
  auto* train = app.add_subcommand("train", "Train LiLaNet from MSRA initialization");
  const TrainFlags train_flags = add_train(train, tr);
  auto* finetune = app.add_subcommand("finetune", "Continue training from a checkpoint");
  const TrainFlags finetune_flags = add_train(finetune, ft);
  finetune->add_option("--checkpoint", ft.checkpoint, "Checkpoint to start from")->required();

  // infer
  InferArgs inf;
  auto* infer = app.add_subcommand("infer", "Predict per-point labels for a manifest split");
  infer->add_option("manifest", inf.manifest, "Dataset manifest")->required();
  infer->add_option("--checkpoint", inf.checkpoint, "Trained checkpoint")->required();
  infer->add_option("-o,--output", inf.out_dir, "Output directory")->required();
  auto* inf_split = infer->add_option("--split", inf.split, "Split to predict")->capture_default_str();
  auto* inf_jobs = infer->add_option("--jobs", inf.jobs, "Worker threads")->check(CLI::PositiveNumber);
  add_config(infer, config_path);

  // eval
  EvalArgs ev;
  auto* eval = app.add_subcommand("eval", "IoU of predictions against ground truth");
  eval->add_option("predictions", ev.predictions, "Directory written by infer")->required();
  eval->add_option("manifest", ev.manifest, "Dataset manifest with ground truth")->required();
  eval->add_option("--split", ev.split, "Split to evaluate")->capture_default_str();
  eval->add_option("--json", ev.json_out, "Write the JSON report here");
  eval->add_option("--table", ev.table_out, "Write the text table here");

  // synth
  SynthArgs sy;
  auto* synth = app.add_subcommand("synth", "Generate a synthetic dataset");
  synth->add_option("-o,--output", sy.out_dir, "Output directory")->required();
  auto* sy_seqs = synth->add_option("--sequences", sy.sequences, "Sequences")->capture_default_str();
  auto* sy_frames = synth->add_option("--frames", sy.frames, "Frames per sequence")->capture_default_str();
  auto* sy_cols = synth->add_option("--columns", sy.columns, "Scanner columns")->capture_default_str();
  auto* sy_speed = synth->add_option("--speed-mps", sy.speed_mps, "Vehicle speed")->capture_default_str();
  auto* sy_len = synth->add_option("--length-m", sy.length_m, "Street length")->capture_default_str();
  auto* sy_interval = synth->add_option("--frame-interval-us", sy.frame_interval_us,
                                        "Time between frames")->capture_default_str();
  auto* sy_seed = synth->add_option("--seed", sy.seed, "Random seed")->capture_default_str();
  auto* sy_jobs = synth->add_option("--jobs", sy.jobs, "Worker threads")->check(CLI::PositiveNumber);
  add_config(synth, config_path);

  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const std::string& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      app.exit(e, out, err);
      return kExitOk;
    }
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }

  try {
    const Overrides cfg = load_config(config_path);
    if (project->parsed()) return cmd_project(project_scan, project_out, out);
    if (autolabel->parsed()) {
      cfg.apply(al_gamma, "gamma_h_deg", al.gamma_h_deg);
      cfg.apply(al_eps, "epsilon_occ_m", al.epsilon_occ_m);
      cfg.apply(al_noego, "no_ego_motion", al.no_ego_motion);
      cfg.apply(al_jobs, "jobs", al.jobs);
      return cmd_autolabel(al, out);
    }
    for (auto [cmd, a, f, is_ft] :
         {std::tuple{train, &tr, &train_flags, false},
          std::tuple{finetune, &ft, &finetune_flags, true}}) {
      if (!cmd->parsed()) continue;
      cfg.apply(f->iterations, "iterations", a->iterations);
      cfg.apply(f->lr, "lr", a->lr);
      cfg.apply(f->batch, "batch", a->batch);
      cfg.apply(f->seed, "seed", a->seed);
      cfg.apply(f->profile, "profile", a->profile);
      cfg.apply(f->jobs, "jobs", a->jobs);
      cfg.apply(f->keyframes, "keyframes", a->keyframes);
      cfg.apply(f->source, "label_source", a->label_source);
      cfg.apply(f->split, "split", a->split);
      return cmd_train(*a, is_ft, out);
    }
    if (infer->parsed()) {
      cfg.apply(inf_split, "split", inf.split);
      cfg.apply(inf_jobs, "jobs", inf.jobs);
      return cmd_infer(inf, out);
    }
    if (eval->parsed()) return cmd_eval(ev, out);
    if (synth->parsed()) {
      cfg.apply(sy_seqs, "sequences", sy.sequences);
      cfg.apply(sy_frames, "frames", sy.frames);
      cfg.apply(sy_cols, "columns", sy.columns);
      cfg.apply(sy_speed, "speed_mps", sy.speed_mps);
      cfg.apply(sy_len, "length_m", sy.length_m);
      cfg.apply(sy_interval, "frame_interval_us", sy.frame_interval_us);
      cfg.apply(sy_seed, "seed", sy.seed);
      cfg.apply(sy_jobs, "jobs", sy.jobs);
      return cmd_synth(sy, out);
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  } catch (const json::exception& e) {
    err << "error: config: " << e.what() << "\n";
    return kExitFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitFailure;
}

}  // namespace lila::cli
