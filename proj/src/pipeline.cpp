#include "mdaug/pipeline.hpp"

#include <chrono>
#include <condition_variable>
#include <mutex>
#include <thread>
#include <vector>

#include "mdaug/rng.hpp"

namespace mdaug {

namespace {

using Clock = std::chrono::steady_clock;

class StageTimer {
 public:
  StageTimer(StageTimings* t, const char* stage) : t_(t), stage_(stage) {
    if (t_) start_ = Clock::now();
  }
  ~StageTimer() {
    if (t_) t_->add(stage_, std::chrono::duration<double>(Clock::now() - start_).count());
  }

 private:
  StageTimings* t_;
  const char* stage_;
  Clock::time_point start_;
};

}  // namespace

std::pair<Volume, std::optional<SegmentationMask>> augment_sample(const Volume& v,
                                                                  const SegmentationMask* mask,
                                                                  const AugmentationPreset& preset,
                                                                  const SampleRequest& req,
                                                                  StageTimings* timings) {
  Rng rng(derive_stream(req.seed, req.sample_index));
  const auto& ip = preset.intensity;

  Volume img;
  std::optional<SegmentationMask> seg;
  {
    StageTimer t(timings, "spatial");
    auto resolved = sample_spatial(preset.spatial, v.dims, v.spacing, rng);
    auto pair = apply_spatial(v, mask, resolved);
    img = std::move(pair.first);
    seg = std::move(pair.second);
  }

  const bool has_gamma = ip.gamma_range.has_value();
  const bool has_inverse = ip.inverse_gamma_range.has_value();
  if (has_gamma || has_inverse) {
    StageTimer t(timings, "gamma");
    const bool pick_gamma = (has_gamma && has_inverse) ? rng.bernoulli(0.5) : has_gamma;
    if (pick_gamma) {
      if (rng.bernoulli(ip.p_gamma))
        img = gamma_transform(img, rng.uniform((*ip.gamma_range)[0], (*ip.gamma_range)[1]),
                              ip.gamma_retain_stats);
    } else {
      if (rng.bernoulli(ip.p_inverse_gamma))
        img = inverse_gamma_transform(
            img, rng.uniform((*ip.inverse_gamma_range)[0], (*ip.inverse_gamma_range)[1]));
    }
  }

  if (ip.additive_brightness && rng.bernoulli(ip.p_additive_brightness)) {
    StageTimer t(timings, "brightness-additive");
    img = additive_brightness(
        img, rng.normal((*ip.additive_brightness)[0], (*ip.additive_brightness)[1]));
  }

  if (ip.multiplicative_brightness_range && rng.bernoulli(ip.p_multiplicative_brightness)) {
    StageTimer t(timings, "brightness-multiplicative");
    img = multiplicative_brightness(img, rng.uniform((*ip.multiplicative_brightness_range)[0],
                                                     (*ip.multiplicative_brightness_range)[1]));
  }

  if (ip.contrast_range && rng.bernoulli(ip.p_contrast)) {
    StageTimer t(timings, "contrast");
    img = contrast_transform(img, rng.uniform((*ip.contrast_range)[0], (*ip.contrast_range)[1]),
                             ip.contrast_preserve_range);
  }

  if (ip.gaussian_blur_sigma_range && rng.bernoulli(ip.p_gaussian_blur)) {
    StageTimer t(timings, "blur");
    img = gaussian_blur(img,
                        rng.uniform((*ip.gaussian_blur_sigma_range)[0],
                                    (*ip.gaussian_blur_sigma_range)[1]),
                        preset.spatial.anisotropy_threshold);
  }

  if (ip.gaussian_noise_sigma_range && rng.bernoulli(ip.p_gaussian_noise)) {
    StageTimer t(timings, "noise");
    const double sigma =
        rng.uniform((*ip.gaussian_noise_sigma_range)[0], (*ip.gaussian_noise_sigma_range)[1]);
    img = gaussian_noise(img, sigma, rng);
  }

  return {std::move(img), std::move(seg)};
}

struct AugmentationStream::Impl {
  std::size_t count;
  Loader loader;
  AugmentationPreset preset;
  std::uint64_t seed;
  int capacity;

  std::mutex mu;
  std::condition_variable cv_worker;
  std::condition_variable cv_consumer;
  std::map<std::size_t, SampleOutput> ready;
  std::size_t next_to_issue = 0;
  std::size_t next_to_deliver = 0;
  std::size_t delivered = 0;
  int in_flight = 0;
  int peak_in_flight = 0;
  bool stop = false;
  StageTimings timings;
  Clock::time_point start = Clock::now();
  Clock::time_point last_delivery = Clock::now();
  std::vector<std::thread> pool;

  void worker() {
    for (;;) {
      std::size_t idx;
      {
        std::unique_lock lk(mu);
        cv_worker.wait(lk, [&] { return stop || (next_to_issue < count && in_flight < capacity); });
        if (stop || next_to_issue >= count) return;
        idx = next_to_issue++;
        ++in_flight;
        peak_in_flight = std::max(peak_in_flight, in_flight);
      }

      SampleOutput out;
      out.index = idx;
      StageTimings local;
      try {
        SampleInput in = loader(idx);
        out.case_id = in.case_id;
        out.frame = in.frame;
        SampleRequest req{in.case_id, in.frame, static_cast<std::uint64_t>(idx), seed};
        auto [img, seg] = augment_sample(in.image, in.mask ? &*in.mask : nullptr, preset, req, &local);
        out.image = std::move(img);
        out.mask = std::move(seg);
      } catch (const std::exception& e) {
        out.error = e.what();
      }

      {
        std::lock_guard lk(mu);
        timings.merge(local);
        ready.emplace(idx, std::move(out));
      }
      cv_consumer.notify_all();
    }
  }
};

AugmentationStream::AugmentationStream(std::size_t count, Loader loader, AugmentationPreset preset,
                                       std::uint64_t seed, int workers, int queue_depth)
    : impl_(std::make_unique<Impl>()) {
  if (workers < 1) throw ValidationError("AugmentationStream: workers must be >= 1");
  if (queue_depth < 0) throw ValidationError("AugmentationStream: queue depth must be >= 0");
  impl_->count = count;
  impl_->loader = std::move(loader);
  impl_->preset = std::move(preset);
  impl_->seed = seed;
  impl_->capacity = workers + queue_depth;
  impl_->pool.reserve(static_cast<std::size_t>(workers));
  for (int i = 0; i < workers; ++i) impl_->pool.emplace_back([this] { impl_->worker(); });
}

AugmentationStream::~AugmentationStream() {
  {
    std::lock_guard lk(impl_->mu);
    impl_->stop = true;
  }
  impl_->cv_worker.notify_all();
  for (auto& t : impl_->pool) t.join();
}

std::optional<SampleOutput> AugmentationStream::next() {
  std::unique_lock lk(impl_->mu);
  if (impl_->next_to_deliver >= impl_->count) return std::nullopt;
  const std::size_t want = impl_->next_to_deliver;
  impl_->cv_consumer.wait(lk, [&] { return impl_->ready.count(want) > 0; });
  auto node = impl_->ready.extract(want);
  ++impl_->next_to_deliver;
  ++impl_->delivered;
  --impl_->in_flight;
  impl_->last_delivery = Clock::now();
  lk.unlock();
  impl_->cv_worker.notify_all();
  return std::move(node.mapped());
}

AugmentationStream::Stats AugmentationStream::stats() const {
  std::lock_guard lk(impl_->mu);
  Stats s;
  s.samples = impl_->delivered;
  s.wall_seconds = std::chrono::duration<double>(impl_->last_delivery - impl_->start).count();
  s.samples_per_sec = s.wall_seconds > 0.0 ? static_cast<double>(s.samples) / s.wall_seconds : 0.0;
  s.peak_in_flight = impl_->peak_in_flight;
  s.timings = impl_->timings;
  return s;
}

}  // namespace mdaug
