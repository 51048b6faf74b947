#include <cstring>

#include "doctest.h"
#include "mdaug/pipeline.hpp"
#include "test_util.hpp"

using namespace mdaug;

namespace {

AugmentationPreset inert_preset() {
  AugmentationPreset p;
  p.name = "inert";
  return p;
}

bool bit_identical(const Volume& a, const Volume& b) {
  return a.dims == b.dims &&
         std::memcmp(a.data.data(), b.data.data(), a.data.size() * sizeof(double)) == 0;
}

}  // namespace

TEST_SUITE("pipeline") {
  TEST_CASE("zero-probability preset with full patch is the identity") {
    Rng rng(1);
    const Volume v = test::random_volume(Dims{8, 7, 3}, rng);
    const SegmentationMask m = test::random_mask(Dims{8, 7, 3}, rng);
    auto [img, seg] = augment_sample(v, &m, inert_preset(), {"c", Frame::ED, 0, 0});
    CHECK(img.data == v.data);
    CHECK(seg->labels == m.labels);
  }

  TEST_CASE("fixed (seed, index) reproduces bit-identical samples") {
    Rng rng(2);
    const Volume v = test::random_volume(Dims{16, 16, 4}, rng);
    const SegmentationMask m = test::random_mask(Dims{16, 16, 4}, rng);
    const AugmentationPreset preset = builtin_preset("mnms-nnunet");
    const SampleRequest req{"c", Frame::ES, 3, 7};
    auto a = augment_sample(v, &m, preset, req);
    auto b = augment_sample(v, &m, preset, req);
    CHECK(bit_identical(a.first, b.first));
    CHECK(a.second->labels == b.second->labels);

    // a different index draws a different transform
    auto c = augment_sample(v, &m, preset, {"c", Frame::ES, 4, 7});
    CHECK_FALSE(bit_identical(a.first, c.first));
  }

  TEST_CASE("stage timings cover the applied transform order") {
    Rng rng(3);
    const Volume v = test::random_volume(Dims{32, 32, 1}, rng);
    StageTimings t;
    augment_sample(v, nullptr, builtin_preset("heavy-DA"), {"c", Frame::ED, 1, 1}, &t);
    CHECK(t.seconds.count("spatial") == 1);
    for (const auto& [stage, sec] : t.seconds) CHECK(sec >= 0.0);
  }

  TEST_CASE("stream output is independent of worker count") {
    Rng rng(4);
    std::vector<Volume> inputs;
    for (int i = 0; i < 4; ++i) inputs.push_back(test::random_volume(Dims{12, 12, 3}, rng));

    auto loader = [&](std::size_t index) {
      SampleInput in;
      in.image = inputs[index % inputs.size()];
      in.case_id = "case" + std::to_string(index % inputs.size());
      return in;
    };
    const AugmentationPreset preset = builtin_preset("mnms-nnunet");
    constexpr std::size_t kSamples = 32;

    auto run = [&](int workers) {
      std::vector<Volume> out;
      AugmentationStream stream(kSamples, loader, preset, 5, workers);
      while (auto s = stream.next()) {
        REQUIRE(s->ok());
        CHECK(s->index == out.size());  // delivered in index order
        out.push_back(std::move(*s->image));
      }
      return out;
    };

    const auto one = run(1);
    const auto eight = run(8);
    REQUIRE(one.size() == kSamples);
    REQUIRE(eight.size() == kSamples);
    for (std::size_t i = 0; i < kSamples; ++i) CHECK(bit_identical(one[i], eight[i]));
  }

  TEST_CASE("stream respects the in-flight bound") {
    Rng rng(5);
    const Volume v = test::random_volume(Dims{16, 16, 2}, rng);
    auto loader = [&](std::size_t) {
      SampleInput in;
      in.image = v;
      in.case_id = "c";
      return in;
    };
    AugmentationStream stream(48, loader, builtin_preset("BL"), 1, /*workers=*/4,
                              /*queue_depth=*/2);
    while (auto s = stream.next()) REQUIRE(s->ok());
    const auto st = stream.stats();
    CHECK(st.samples == 48);
    CHECK(st.peak_in_flight <= 6);
    CHECK(st.samples_per_sec > 0.0);
  }

  TEST_CASE("per-sample failures do not stop the stream") {
    Rng rng(6);
    const Volume v = test::random_volume(Dims{8, 8, 2}, rng);
    auto loader = [&](std::size_t index) {
      if (index == 3) throw std::runtime_error("corrupt input file");
      SampleInput in;
      in.image = v;
      in.case_id = "c";
      return in;
    };
    AugmentationStream stream(10, loader, builtin_preset("BL"), 1, 2);
    std::size_t ok = 0, failed = 0;
    while (auto s = stream.next()) {
      if (s->ok()) ++ok;
      else {
        ++failed;
        CHECK(s->index == 3);
        CHECK(s->error.find("corrupt") != std::string::npos);
      }
    }
    CHECK(ok == 9);
    CHECK(failed == 1);
  }

  TEST_CASE("patch-size presets crop every sample to the patch") {
    Rng rng(7);
    const Volume v = test::random_volume(Dims{20, 18, 6}, rng);
    AugmentationPreset p = inert_preset();
    p.spatial.patch_size = {{8, 8, 2}};
    for (std::uint64_t i = 0; i < 4; ++i) {
      auto [img, seg] = augment_sample(v, nullptr, p, {"c", Frame::ED, i, 9});
      CHECK(img.dims == Dims{8, 8, 2});
    }
  }
}
