#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>

#include "mdaug/presets.hpp"
#include "mdaug/volume.hpp"

namespace mdaug {

/// Identifies one augmented sample. (seed, sample_index) determines every
/// random draw for the sample (see derive_stream), so results are independent
/// of worker count and scheduling.
struct SampleRequest {
  std::string case_id;
  Frame frame = Frame::ED;
  std::uint64_t sample_index = 0;
  std::uint64_t seed = 0;
};

struct StageTimings {
  std::map<std::string, double> seconds;

  void add(const std::string& stage, double s) { seconds[stage] += s; }
  void merge(const StageTimings& o) {
    for (const auto& [k, v] : o.seconds) seconds[k] += v;
  }
};

/// Applies the preset to one sample: the composed spatial pass first, then
/// the intensity chain in the fixed transform order. Gamma and inverse gamma
/// are mutually exclusive per draw (50/50 pick when both are enabled, then
/// the picked branch applies with its own probability).
std::pair<Volume, std::optional<SegmentationMask>> augment_sample(const Volume& v,
                                                                  const SegmentationMask* mask,
                                                                  const AugmentationPreset& preset,
                                                                  const SampleRequest& req,
                                                                  StageTimings* timings = nullptr);

struct SampleInput {
  Volume image;
  std::optional<SegmentationMask> mask;
  std::string case_id;
  Frame frame = Frame::ED;
};

struct SampleOutput {
  std::size_t index = 0;
  std::string case_id;
  Frame frame = Frame::ED;
  std::optional<Volume> image;
  std::optional<SegmentationMask> mask;
  std::string error;  // empty on success; loader/transform failures land here

  bool ok() const { return error.empty(); }
};

/// On-the-fly augmentation over a worker pool. Samples are delivered in index
/// order; at most workers + queue_depth samples are resident at any time.
/// Per-sample failures are reported through SampleOutput::error without
/// stopping the stream. Output for sample i is bit-identical for any worker
/// count.
class AugmentationStream {
 public:
  using Loader = std::function<SampleInput(std::size_t index)>;

  AugmentationStream(std::size_t count, Loader loader, AugmentationPreset preset,
                     std::uint64_t seed, int workers, int queue_depth = 2);
  ~AugmentationStream();

  AugmentationStream(const AugmentationStream&) = delete;
  AugmentationStream& operator=(const AugmentationStream&) = delete;

  /// Next sample in index order; nullopt once all samples were delivered.
  std::optional<SampleOutput> next();

  struct Stats {
    std::size_t samples = 0;
    double wall_seconds = 0.0;
    double samples_per_sec = 0.0;
    int peak_in_flight = 0;
    StageTimings timings;
  };
  Stats stats() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace mdaug
