// mdaug — command-line harness for volume augmentation experiments:
// split planning, on-the-fly augmentation, slice previews, Dice evaluation,
// probability-map ensembling and throughput benchmarking.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>

#include "CLI11.hpp"
#include "json.hpp"
#include "mdaug/dataset.hpp"
#include "mdaug/metrics.hpp"
#include "mdaug/nifti.hpp"
#include "mdaug/pipeline.hpp"
#include "mdaug/presets.hpp"
#include "mdaug/rng.hpp"
#include "mdaug/splits.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace mdaug;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitValidation = 3;
constexpr int kExitIo = 4;

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << text;
  if (!out) throw IoError("short write to '" + path.string() + "'");
}

void write_json(const fs::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

fs::path existing_file(const std::string& p) {
  if (!fs::is_regular_file(p)) throw IoError("no such file: '" + p + "'");
  return p;
}

fs::path existing_dir(const std::string& p) {
  if (!fs::is_directory(p)) throw IoError("no such directory: '" + p + "'");
  return p;
}

// ---------------------------------------------------------------------------
// plan-splits

struct PlanArgs {
  std::string protocol;
  std::string dataset;
  std::string out = "splits";
  std::uint64_t seed = 0;
  std::string train_vendor = "A";
  std::string base_vendor = "B";
  std::string target_vendor = "A";
  std::vector<int> percentages = {0, 10, 20, 30, 40, 50, 60, 70, 80, 90, 100};
};

int cmd_plan_splits(const PlanArgs& a) {
  const Dataset ds = load_dataset(existing_file(a.dataset));
  const auto records = ds.records();

  std::vector<SplitManifest> folds;
  if (a.protocol == "cross-domain") {
    folds.push_back(plan_cross_domain(records, vendor_from_string(a.train_vendor), a.seed));
  } else if (a.protocol == "holdout-four") {
    folds = plan_holdout_four(records, a.seed);
  } else if (a.protocol == "fraction-sweep") {
    folds = plan_fraction_sweep(records, vendor_from_string(a.base_vendor),
                                vendor_from_string(a.target_vendor), a.percentages, a.seed);
  } else if (a.protocol == "bn-experiment") {
    folds = plan_bn_experiment(records, a.seed);
  } else if (a.protocol == "five-fold") {
    folds = plan_five_fold(records, a.seed);
  } else {
    throw ValidationError("unknown protocol '" + a.protocol +
                          "' (cross-domain, holdout-four, fraction-sweep, bn-experiment, five-fold)");
  }

  fs::path out_path(a.out);
  if (out_path.extension() != ".json") {
    fs::create_directories(out_path);
    out_path /= a.protocol + ".json";
  }
  write_json(out_path, manifests_to_json(a.protocol, a.seed, folds, records));

  auto counts = [](const std::map<std::string, int>& m) {
    std::string s;
    for (const auto& [vendor, n] : m) s += (s.empty() ? "" : " ") + vendor + ":" + std::to_string(n);
    return s.empty() ? std::string("-") : s;
  };
  std::printf("%-12s %6s %6s  %-14s %-14s\n", "fold", "train", "val", "train vendors",
              "val vendors");
  for (const auto& f : folds)
    std::printf("%-12s %6zu %6zu  %-14s %-14s\n", f.name.c_str(), f.train.size(),
                f.validation.size(), counts(f.train_vendor_counts).c_str(),
                counts(f.val_vendor_counts).c_str());
  std::printf("wrote %s\n", out_path.string().c_str());
  return kExitOk;
}

// ---------------------------------------------------------------------------
// augment

struct AugmentArgs {
  std::string preset = "mnms-nnunet";
  std::string config;
  std::string dataset;
  std::vector<std::string> cases;
  std::size_t samples = 0;
  std::uint64_t seed = 0;
  int workers = 1;
  std::string out = "augmented";
  std::vector<int> patch;
};

struct FrameSource {
  std::string case_id;
  Frame frame;
  fs::path image;
  std::optional<fs::path> label;
};

std::vector<FrameSource> frame_sources(const Dataset& ds, const std::vector<std::string>& filter) {
  std::vector<FrameSource> out;
  for (const auto& e : ds.entries) {
    if (!filter.empty() &&
        std::find(filter.begin(), filter.end(), e.record.case_id) == filter.end())
      continue;
    for (const auto& [frame, files] : e.frames) {
      if (files.image.empty()) continue;
      out.push_back({e.record.case_id, frame, files.image, files.label});
    }
  }
  return out;
}

AugmentationPreset preset_with_patch(const std::string& name, const std::vector<int>& patch) {
  AugmentationPreset preset = load_preset(name);
  if (!patch.empty()) {
    if (patch.size() == 2) {
      preset.spatial.patch_size = {{patch[0], patch[1], 1}};
    } else if (patch.size() == 3) {
      preset.spatial.patch_size = {{patch[0], patch[1], patch[2]}};
    } else {
      throw ValidationError("--patch expects 2 or 3 comma-separated extents");
    }
    validate(preset.spatial);
  }
  return preset;
}

int cmd_augment(const AugmentArgs& a) {
  const Dataset ds = load_dataset(existing_file(a.dataset));
  const auto sources = frame_sources(ds, a.cases);
  if (a.samples == 0) {
    std::printf("0 samples requested, nothing to do\n");
    return kExitOk;
  }
  if (sources.empty()) throw ValidationError("dataset contains no cases with image files");
  const AugmentationPreset preset =
      preset_with_patch(a.config.empty() ? a.preset : a.config, a.patch);
  fs::create_directories(a.out);

  auto loader = [&](std::size_t index) {
    const auto& src = sources[index % sources.size()];
    SampleInput in;
    in.case_id = src.case_id;
    in.frame = src.frame;
    in.image = nifti::read_volume_file(src.image);
    if (src.label) in.mask = nifti::read_mask_file(*src.label);
    return in;
  };

  AugmentationStream stream(a.samples, loader, preset, a.seed, a.workers);
  std::size_t failures = 0;
  while (auto sample = stream.next()) {
    if (!sample->ok()) {
      std::fprintf(stderr, "sample %zu (%s): %s\n", sample->index, sample->case_id.c_str(),
                   sample->error.c_str());
      ++failures;
      continue;
    }
    char suffix[48];
    std::snprintf(suffix, sizeof(suffix), "_%s_s%05zu", frame_name(sample->frame), sample->index);
    const fs::path base = fs::path(a.out) / (sample->case_id + suffix);
    nifti::write_volume_file(base.string() + ".nii", *sample->image);
    if (sample->mask) nifti::write_mask_file(base.string() + "_seg.nii", *sample->mask);
  }
  const auto st = stream.stats();
  std::printf("%zu samples in %.2f s (%.1f samples/s), %zu failed\n", st.samples, st.wall_seconds,
              st.samples_per_sec, failures);
  return failures == 0 ? kExitOk : kExitIo;
}

// ---------------------------------------------------------------------------
// preview

struct PreviewArgs {
  std::string input;
  std::string mask;
  std::string preset = "mnms-nnunet";
  std::string config;
  std::uint64_t seed = 0;
  std::string out = "preview";
};

std::vector<int> preview_slices(int nz) {
  std::set<int> s{0, nz / 2, nz - 1};
  return {s.begin(), s.end()};
}

// Binary portable graymap, windowed to the displayed slice's min/max. Mask
// contours (in-plane label boundaries) paint at full intensity.
void write_pgm_slice(const fs::path& path, const Volume& v, const SegmentationMask* mask, int z) {
  const int nx = v.dims.nx, ny = v.dims.ny;
  double lo = v.at(0, 0, z), hi = lo;
  for (int y = 0; y < ny; ++y)
    for (int x = 0; x < nx; ++x) {
      lo = std::min(lo, v.at(x, y, z));
      hi = std::max(hi, v.at(x, y, z));
    }
  const double scale = hi > lo ? 255.0 / (hi - lo) : 0.0;

  std::string body;
  body.reserve(static_cast<std::size_t>(nx) * ny);
  for (int y = 0; y < ny; ++y) {
    for (int x = 0; x < nx; ++x) {
      unsigned char px = static_cast<unsigned char>(std::lround((v.at(x, y, z) - lo) * scale));
      if (mask) {
        const std::uint8_t l = mask->at(x, y, z);
        if (l != kBackground) {
          const bool edge = (x == 0 || mask->at(x - 1, y, z) != l) ||
                            (x == nx - 1 || mask->at(x + 1, y, z) != l) ||
                            (y == 0 || mask->at(x, y - 1, z) != l) ||
                            (y == ny - 1 || mask->at(x, y + 1, z) != l);
          if (edge) px = 255;
        }
      }
      body.push_back(static_cast<char>(px));
    }
  }
  std::string header = "P5\n" + std::to_string(nx) + " " + std::to_string(ny) + "\n255\n";
  write_text(path, header + body);
}

int cmd_preview(const PreviewArgs& a) {
  const Volume v = nifti::read_volume_file(a.input);
  std::optional<SegmentationMask> mask;
  if (!a.mask.empty()) mask = nifti::read_mask_file(a.mask);
  const AugmentationPreset preset = load_preset(a.config.empty() ? a.preset : a.config);
  fs::create_directories(a.out);

  for (int z : preview_slices(v.dims.nz))
    write_pgm_slice(fs::path(a.out) / ("before_z" + std::to_string(z) + ".pgm"), v,
                    mask ? &*mask : nullptr, z);

  SampleRequest req{"preview", Frame::ED, 0, a.seed};
  auto [img, seg] = augment_sample(v, mask ? &*mask : nullptr, preset, req);
  for (int z : preview_slices(img.dims.nz))
    write_pgm_slice(fs::path(a.out) / ("after_z" + std::to_string(z) + ".pgm"), img,
                    seg ? &*seg : nullptr, z);

  std::printf("wrote %zu slice images to %s\n",
              2 * preview_slices(v.dims.nz).size(), a.out.c_str());
  return kExitOk;
}

// ---------------------------------------------------------------------------
// dice / report

struct DiceArgs {
  std::string pred_dir;
  std::string gt_dir;
  std::string dataset;
  std::string out = "dice-report";
  double empty_dice = 1.0;
};

std::optional<fs::path> find_case_file(const fs::path& dir, const std::string& case_id,
                                       Frame frame) {
  for (const char* ext : {".nii", ".nii.gz"}) {
    fs::path p = dir / (case_id + "_" + frame_name(frame) + ext);
    if (fs::exists(p)) return p;
  }
  return std::nullopt;
}

int cmd_dice(const DiceArgs& a) {
  existing_dir(a.pred_dir);
  existing_dir(a.gt_dir);
  const Dataset ds = load_dataset(existing_file(a.dataset));
  std::vector<CaseScore> scores;
  std::vector<std::string> warnings;

  for (const auto& e : ds.entries) {
    if (!e.record.annotated) continue;
    std::vector<Frame> frames;
    if (e.record.has_ed) frames.push_back(Frame::ED);
    if (e.record.has_es) frames.push_back(Frame::ES);
    for (Frame f : frames) {
      const auto pred = find_case_file(a.pred_dir, e.record.case_id, f);
      const auto gt = find_case_file(a.gt_dir, e.record.case_id, f);
      if (!pred || !gt) {
        warnings.push_back(std::string("excluded ") + e.record.case_id + "_" + frame_name(f) +
                           ": missing " + (!pred ? "prediction" : "ground truth"));
        continue;
      }
      const SegmentationMask pm = nifti::read_mask_file(*pred);
      const SegmentationMask gm = nifti::read_mask_file(*gt);
      CaseScore cs;
      cs.case_id = e.record.case_id;
      cs.frame = f;
      cs.vendor = e.record.vendor;
      for (int cls = 1; cls < kNumClasses; ++cls)
        cs.per_class[cls] = dice(pm, gm, cls, a.empty_dice);
      scores.push_back(std::move(cs));
    }
  }
  for (const auto& w : warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
  if (scores.empty())
    throw ValidationError("no case id matched between prediction and ground-truth directories");

  DiceReport report = stratified_report(scores, a.empty_dice);
  report.warnings = warnings;
  fs::create_directories(a.out);
  write_json(fs::path(a.out) / "report.json", report_to_json(report));
  const std::string text = report_to_text(report);
  write_text(fs::path(a.out) / "report.txt", text);
  std::fputs(text.c_str(), stdout);
  std::printf("scored %zu case-frames (%zu excluded)\n", scores.size(), warnings.size());
  return kExitOk;
}

struct ReportArgs {
  std::string in;
  std::string out;
};

int cmd_report(const ReportArgs& a) {
  std::ifstream in(a.in);
  if (!in) throw IoError("cannot open '" + a.in + "'");
  json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw ValidationError(std::string("report: invalid JSON: ") + e.what());
  }
  if (!j.contains("schema") || j.at("schema") != "mdaug-dice-report/1")
    throw ValidationError("report: missing or unsupported schema id");

  std::vector<CaseScore> scores;
  for (const auto& c : j.at("cases")) {
    CaseScore cs;
    cs.case_id = c.at("case_id").get<std::string>();
    cs.frame = frame_from_string(c.at("frame").get<std::string>());
    if (c.contains("vendor")) cs.vendor = vendor_from_string(c.at("vendor").get<std::string>());
    for (int cls = 1; cls < kNumClasses; ++cls)
      if (c.at("dice").contains(kClassNames[cls]))
        cs.per_class[cls] = c.at("dice").at(kClassNames[cls]).get<double>();
    scores.push_back(std::move(cs));
  }
  const DiceReport report = stratified_report(scores, j.value("empty_dice_value", 1.0));
  const std::string text = report_to_text(report);
  if (!a.out.empty()) write_text(a.out, text);
  std::fputs(text.c_str(), stdout);
  return kExitOk;
}

// ---------------------------------------------------------------------------
// ensemble

struct EnsembleArgs {
  std::vector<std::string> map_dirs;
  std::string out = "ensembled";
};

int cmd_ensemble(const EnsembleArgs& a) {
  if (a.map_dirs.empty()) throw ValidationError("ensemble: needs at least one --maps directory");
  for (const auto& dir : a.map_dirs) existing_dir(dir);
  const fs::path first(a.map_dirs.front());

  std::vector<std::string> case_ids;
  for (const auto& entry : fs::directory_iterator(first)) {
    std::string name = entry.path().filename().string();
    if (name.ends_with(".nii.gz")) name.resize(name.size() - 7);
    else if (name.ends_with(".nii")) name.resize(name.size() - 4);
    else continue;
    case_ids.push_back(name);
  }
  std::sort(case_ids.begin(), case_ids.end());
  if (case_ids.empty()) throw ValidationError("no probability maps found in '" + first.string() + "'");

  fs::create_directories(a.out);
  std::size_t failures = 0;
  for (const auto& id : case_ids) {
    try {
      std::vector<ProbabilityMap> maps;
      for (const auto& dir : a.map_dirs) {
        for (const char* ext : {".nii", ".nii.gz"}) {
          const fs::path p = fs::path(dir) / (id + ext);
          if (fs::exists(p)) {
            maps.push_back(nifti::read_probability_map_file(p));
            break;
          }
        }
      }
      const SegmentationMask decoded = argmax_decode(ensemble(maps));
      nifti::write_mask_file(fs::path(a.out) / (id + ".nii"), decoded);
    } catch (const std::exception& e) {
      std::fprintf(stderr, "case %s: %s\n", id.c_str(), e.what());
      ++failures;
    }
  }
  std::printf("ensembled %zu cases (%zu failed) from %zu directories\n", case_ids.size() - failures,
              failures, a.map_dirs.size());
  return failures == 0 ? kExitOk : kExitValidation;
}

// ---------------------------------------------------------------------------
// bench

struct BenchArgs {
  std::string preset = "mnms-nnunet";
  std::string config;
  std::vector<int> shape = {256, 256};
  double duration = 5.0;
  std::size_t samples = 0;  // when set, overrides duration
  std::uint64_t seed = 0;
  int workers = 1;
  std::string out;
};

Volume synthetic_volume(const std::vector<int>& shape, std::uint64_t seed) {
  Dims d;
  if (shape.size() == 2) d = {shape[0], shape[1], 1};
  else if (shape.size() == 3) d = {shape[0], shape[1], shape[2]};
  else throw ValidationError("--shape expects 2 or 3 comma-separated extents");
  std::vector<double> data(d.voxels());
  Rng rng(derive_stream(seed, 0xbe9c));
  std::size_t i = 0;
  for (int z = 0; z < d.nz; ++z)
    for (int y = 0; y < d.ny; ++y)
      for (int x = 0; x < d.nx; ++x, ++i)
        data[i] = std::sin(0.07 * x) * std::cos(0.05 * y) + 0.1 * z + 0.25 * rng.uniform01();
  return zscore_normalize(Volume(d, Spacing{1.4, 1.4, 10.0}, std::move(data)));
}

int cmd_bench(const BenchArgs& a) {
  const AugmentationPreset preset = load_preset(a.config.empty() ? a.preset : a.config);
  const Volume source = synthetic_volume(a.shape, a.seed);
  auto loader = [&](std::size_t) {
    SampleInput in;
    in.image = source;
    in.case_id = "bench";
    return in;
  };

  std::size_t total = 0;
  double wall = 0.0;
  int peak = 0;
  StageTimings breakdown;
  const auto t0 = std::chrono::steady_clock::now();
  std::uint64_t chunk_index = 0;
  do {
    const std::size_t chunk = a.samples ? a.samples : 32;
    AugmentationStream stream(chunk, loader, preset, a.seed + chunk_index++, a.workers);
    while (auto s = stream.next())
      if (!s->ok()) throw ValidationError("bench sample failed: " + s->error);
    const auto st = stream.stats();
    total += st.samples;
    peak = std::max(peak, st.peak_in_flight);
    breakdown.merge(st.timings);
    wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  } while (a.samples == 0 && wall < a.duration);

  const double rate = wall > 0.0 ? static_cast<double>(total) / wall : 0.0;
  json j;
  j["schema"] = "mdaug-bench/1";
  j["preset"] = preset.name;
  j["shape"] = a.shape;
  j["workers"] = a.workers;
  j["samples"] = total;
  j["wall_seconds"] = wall;
  j["samples_per_sec"] = rate;
  j["peak_in_flight"] = peak;
  j["breakdown"] = json::object();
  for (const auto& [stage, sec] : breakdown.seconds) j["breakdown"][stage] = sec;
  if (!a.out.empty()) write_json(a.out, j);

  std::printf("preset %-16s workers %d  %zu samples in %.2f s  => %.1f samples/s  (peak in-flight %d)\n",
              preset.name.c_str(), a.workers, total, wall, rate, peak);
  for (const auto& [stage, sec] : breakdown.seconds)
    std::printf("  %-26s %8.3f s\n", stage.c_str(), sec);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"deterministic volume augmentation and domain-shift experiment harness"};
  app.require_subcommand(1);

  PlanArgs plan;
  auto* sp = app.add_subcommand("plan-splits", "generate experiment split manifests");
  sp->add_option("--protocol", plan.protocol,
                 "cross-domain | holdout-four | fraction-sweep | bn-experiment | five-fold")
      ->required();
  sp->add_option("--dataset", plan.dataset, "dataset manifest JSON")->required();
  sp->add_option("--seed", plan.seed, "planner seed (default 0)");
  sp->add_option("--out", plan.out, "output file (.json) or directory");
  sp->add_option("--train-vendor", plan.train_vendor, "cross-domain: training vendor (A|B)");
  sp->add_option("--base-vendor", plan.base_vendor, "fraction-sweep: base vendor");
  sp->add_option("--target-vendor", plan.target_vendor, "fraction-sweep: target vendor");
  sp->add_option("--percentages", plan.percentages, "fraction-sweep percentages")->delimiter(',');

  AugmentArgs aug;
  auto* sa = app.add_subcommand("augment", "write augmented samples to disk");
  sa->add_option("--preset", aug.preset, "preset name or JSON file");
  sa->add_option("--config", aug.config, "preset config JSON (overrides --preset)");
  sa->add_option("--dataset", aug.dataset, "dataset manifest JSON")->required();
  sa->add_option("--cases", aug.cases, "restrict to these case ids")->delimiter(',');
  sa->add_option("--samples", aug.samples, "number of samples to generate")->required();
  sa->add_option("--seed", aug.seed, "run seed (default 0)");
  sa->add_option("--workers", aug.workers, "worker threads")->check(CLI::PositiveNumber);
  sa->add_option("--out", aug.out, "output directory");
  sa->add_option("--patch", aug.patch, "patch size px,py[,pz]")->delimiter(',');

  PreviewArgs prev;
  auto* sv = app.add_subcommand("preview", "write before/after slice images");
  sv->add_option("--input", prev.input, "volume (.nii/.nii.gz)")->required();
  sv->add_option("--mask", prev.mask, "optional mask for contour overlay");
  sv->add_option("--preset", prev.preset, "preset name or JSON file");
  sv->add_option("--config", prev.config, "preset config JSON (overrides --preset)");
  sv->add_option("--seed", prev.seed, "sample seed (default 0)");
  sv->add_option("--out", prev.out, "output directory");

  DiceArgs dc;
  auto* sd = app.add_subcommand("dice", "score predictions against ground truth");
  sd->add_option("--pred", dc.pred_dir, "prediction mask directory")->required();
  sd->add_option("--gt", dc.gt_dir, "ground-truth mask directory")->required();
  sd->add_option("--dataset", dc.dataset, "dataset manifest JSON")->required();
  sd->add_option("--out", dc.out, "report output directory");
  sd->add_option("--empty-dice", dc.empty_dice, "score when both masks lack the class (default 1)");

  ReportArgs rep;
  auto* sr = app.add_subcommand("report", "render a dice report JSON as a text table");
  sr->add_option("--in", rep.in, "report.json")->required();
  sr->add_option("--out", rep.out, "optional text output file");

  EnsembleArgs ens;
  auto* se = app.add_subcommand("ensemble", "average probability maps and decode masks");
  se->add_option("--maps", ens.map_dirs, "probability-map directory (repeatable)")->required();
  se->add_option("--out", ens.out, "output directory");

  BenchArgs bench;
  auto* sb = app.add_subcommand("bench", "measure augmentation throughput");
  sb->add_option("--preset", bench.preset, "preset name or JSON file");
  sb->add_option("--config", bench.config, "preset config JSON (overrides --preset)");
  sb->add_option("--shape", bench.shape, "synthetic patch shape nx,ny[,nz]")->delimiter(',');
  sb->add_option("--duration", bench.duration, "target wall time in seconds");
  sb->add_option("--samples", bench.samples, "exact sample count (overrides duration)");
  sb->add_option("--seed", bench.seed, "run seed (default 0)");
  sb->add_option("--workers", bench.workers, "worker threads")->check(CLI::PositiveNumber);
  sb->add_option("--out", bench.out, "machine-readable report JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (sp->parsed()) return cmd_plan_splits(plan);
    if (sa->parsed()) return cmd_augment(aug);
    if (sv->parsed()) return cmd_preview(prev);
    if (sd->parsed()) return cmd_dice(dc);
    if (sr->parsed()) return cmd_report(rep);
    if (se->parsed()) return cmd_ensemble(ens);
    if (sb->parsed()) return cmd_bench(bench);
  } catch (const IoError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitIo;
  } catch (const nifti::NiftiError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return e.code() == nifti::ErrorCode::Io ? kExitIo : kExitValidation;
  } catch (const ValidationError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitValidation;
  } catch (const std::filesystem::filesystem_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitIo;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return kExitUsage;
}
