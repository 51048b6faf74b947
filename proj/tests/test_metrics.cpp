#include "doctest.h"
#include "mdaug/metrics.hpp"
#include "test_util.hpp"

using namespace mdaug;

namespace {

// Voxel-set oracle: explicit set construction and intersection counting.
double dice_oracle(const SegmentationMask& a, const SegmentationMask& b, int cls) {
  std::vector<std::size_t> pa, pb;
  for (std::size_t i = 0; i < a.labels.size(); ++i) {
    if (a.labels[i] == cls) pa.push_back(i);
    if (b.labels[i] == cls) pb.push_back(i);
  }
  std::size_t inter = 0;
  for (std::size_t i : pa)
    for (std::size_t j : pb)
      if (i == j) ++inter;
  if (pa.empty() && pb.empty()) return 1.0;
  return 2.0 * static_cast<double>(inter) / static_cast<double>(pa.size() + pb.size());
}

SegmentationMask mask_of(Dims d, std::vector<std::uint8_t> l) {
  return SegmentationMask(d, Spacing{}, std::move(l));
}

}  // namespace

TEST_SUITE("eval-metrics") {
  TEST_CASE("dice basics") {
    Rng rng(3);
    const SegmentationMask m = test::random_mask(Dims{4, 4, 2}, rng);
    for (int cls = 0; cls < 4; ++cls) CHECK(dice(m, m, cls) == 1.0);

    // disjoint non-empty sets
    const auto a = mask_of(Dims{4, 1, 1}, {1, 1, 0, 0});
    const auto b = mask_of(Dims{4, 1, 1}, {0, 0, 1, 1});
    CHECK(dice(a, b, 1) == 0.0);

    // |P| = 4, |G| = 2, overlap 2 on a 4x4 grid
    std::vector<std::uint8_t> pred(16, 0), gt(16, 0);
    pred[0] = pred[1] = pred[2] = pred[3] = 1;
    gt[2] = gt[3] = 1;
    CHECK(dice(mask_of(Dims{4, 4, 1}, pred), mask_of(Dims{4, 4, 1}, gt), 1) ==
          doctest::Approx(0.6667).epsilon(1e-4));

    // both empty: configurable convention
    CHECK(dice(a, b, 3) == 1.0);
    CHECK(dice(a, b, 3, 0.0) == 0.0);

    CHECK_THROWS_AS(dice(a, mask_of(Dims{2, 2, 1}, {0, 0, 0, 0}), 1), ValidationError);
  }

  TEST_CASE("dice is symmetric and matches the voxel-set oracle") {
    Rng rng(17);
    for (int trial = 0; trial < 50; ++trial) {
      const SegmentationMask a = test::random_mask(Dims{8, 8, 8}, rng);
      const SegmentationMask b = test::random_mask(Dims{8, 8, 8}, rng);
      for (int cls = 0; cls < 4; ++cls) {
        CHECK(dice(a, b, cls) == dice(b, a, cls));
        CHECK(dice(a, b, cls) == dice_oracle(a, b, cls));
      }
    }
  }

  TEST_CASE("mean_dice over the three foreground classes") {
    CHECK(mean_dice({{1, 1.0}, {2, 1.0}, {3, 1.0}}) == 1.0);
    CHECK(mean_dice({{1, 0.9}, {2, 0.8}, {3, 0.7}}) == doctest::Approx(0.8));
    CHECK(mean_dice({{1, 0.9232}, {2, 0.8571}, {3, 0.8870}}) ==
          doctest::Approx(0.8891).epsilon(1e-4));
    CHECK_THROWS_AS(mean_dice({{1, 0.9}, {2, 0.8}}), ValidationError);
  }

  TEST_CASE("stratified report: single vendor, single case") {
    CaseScore cs{"case0", Frame::ED, Vendor::A, {{1, 0.5}, {2, 0.75}, {3, 1.0}}};
    const DiceReport r = stratified_report({cs});
    CHECK(r.by_vendor.at(Vendor::A).per_class_mean.at(1) == 0.5);
    CHECK(r.by_vendor.at(Vendor::A).per_class_mean.at(2) == 0.75);
    CHECK(r.by_vendor.at(Vendor::A).mean == doctest::Approx(0.75));
    CHECK(r.overall_mean == doctest::Approx(0.75));
  }

  TEST_CASE("stratified report: vendors aggregate independently") {
    std::vector<CaseScore> scores = {
        {"a0", Frame::ED, Vendor::A, {{1, 0.8}, {2, 0.6}, {3, 1.0}}},
        {"a1", Frame::ED, Vendor::A, {{1, 0.6}, {2, 0.8}, {3, 0.0}}},
        {"b0", Frame::ED, Vendor::B, {{1, 1.0}, {2, 1.0}, {3, 1.0}}},
        {"b1", Frame::ED, Vendor::B, {{1, 0.5}, {2, 0.5}, {3, 0.5}}},
    };
    const DiceReport r = stratified_report(scores);
    CHECK(r.by_vendor.at(Vendor::A).per_class_mean.at(1) == doctest::Approx(0.7));
    CHECK(r.by_vendor.at(Vendor::A).per_class_mean.at(3) == doctest::Approx(0.5));
    CHECK(r.by_vendor.at(Vendor::B).per_class_mean.at(1) == doctest::Approx(0.75));
    CHECK(r.by_vendor.at(Vendor::B).mean == doctest::Approx(0.75));
    // aggregates recompute exactly from the per-case entries
    double lv = 0;
    for (const auto& cs : scores) lv += cs.per_class.at(1);
    CHECK(r.per_class_mean.at(1) == doctest::Approx(lv / 4.0).epsilon(1e-12));
  }

  TEST_CASE("patient-first averaging differs from frame pooling when frames are uneven") {
    std::vector<CaseScore> scores = {
        {"p0", Frame::ED, Vendor::A, {{1, 1.0}, {2, 1.0}, {3, 1.0}}},
        {"p0", Frame::ES, Vendor::A, {{1, 0.0}, {2, 0.0}, {3, 0.0}}},
        {"p1", Frame::ED, Vendor::A, {{1, 0.4}, {2, 0.4}, {3, 0.4}}},
    };
    const DiceReport r = stratified_report(scores);
    CHECK(r.by_vendor.at(Vendor::A).per_class_mean.at(1) == doctest::Approx((1.0 + 0.0 + 0.4) / 3));
    CHECK(r.by_vendor_patient_first.at(Vendor::A).per_class_mean.at(1) ==
          doctest::Approx((0.5 + 0.4) / 2));
  }

  TEST_CASE("untagged cases are rejected") {
    CaseScore cs{"case0", Frame::ED, std::nullopt, {{1, 1.0}, {2, 1.0}, {3, 1.0}}};
    CHECK_THROWS_AS(stratified_report({cs}), ValidationError);
  }

  TEST_CASE("text report reproduces the vendor-stratified layout") {
    // synthetic per-case scores averaging to the published vendor-A column
    std::vector<CaseScore> scores = {
        {"a0", Frame::ED, Vendor::A, {{1, 0.9232 + 0.01}, {2, 0.8571 - 0.02}, {3, 0.8870}}},
        {"a1", Frame::ES, Vendor::A, {{1, 0.9232 - 0.01}, {2, 0.8571 + 0.02}, {3, 0.8870}}},
        {"b0", Frame::ED, Vendor::B, {{1, 0.9146}, {2, 0.8761}, {3, 0.8876}}},
        {"c0", Frame::ED, Vendor::C, {{1, 0.9032}, {2, 0.8418}, {3, 0.8838}}},
        {"d0", Frame::ED, Vendor::D, {{1, 0.9091}, {2, 0.8384}, {3, 0.8822}}},
    };
    const DiceReport r = stratified_report(scores);
    const std::string text = report_to_text(r);
    CHECK(text.find("Vendor A") != std::string::npos);
    CHECK(text.find("Vendor D") != std::string::npos);
    CHECK(text.find("LV") != std::string::npos);
    CHECK(text.find("LVM") != std::string::npos);
    CHECK(text.find("RV") != std::string::npos);
    CHECK(text.find("0.9232") != std::string::npos);
    CHECK(text.find("0.8571") != std::string::npos);
    CHECK(text.find("0.8870") != std::string::npos);
    CHECK(text.find("0.9091") != std::string::npos);

    const auto j = report_to_json(r);
    CHECK(j.at("schema") == "mdaug-dice-report/1");
    CHECK(j.at("aggregate").at("by_vendor").at("A").at("per_class").at("LV").get<double>() ==
          doctest::Approx(0.9232));
  }

  TEST_CASE("ensemble averages probability maps") {
    const Dims d{1, 1, 1};
    const ProbabilityMap m1(2, d, {}, {0.8, 0.2});
    const ProbabilityMap m2(2, d, {}, {0.4, 0.6});

    const ProbabilityMap single = ensemble({m1});
    CHECK(single.probs == m1.probs);

    const ProbabilityMap mean = ensemble({m1, m2});
    CHECK(mean.probs[0] == doctest::Approx(0.6));
    CHECK(mean.probs[1] == doctest::Approx(0.4));

    // permutation invariance and idempotence on identical inputs
    const ProbabilityMap swapped = ensemble({m2, m1});
    CHECK(swapped.probs[0] == doctest::Approx(mean.probs[0]));
    const ProbabilityMap same = ensemble({m1, m1, m1});
    CHECK(test::max_abs_diff(same.probs, m1.probs) < 1e-12);

    // one-hot agreement stays one-hot
    const SegmentationMask m(d, Spacing{}, {1}, 2);
    const ProbabilityMap hot = one_hot(m, 2);
    const ProbabilityMap agreed = ensemble({hot, hot});
    CHECK(argmax_decode(agreed).labels == m.labels);

    CHECK_THROWS_AS(ensemble({}), ValidationError);
    const ProbabilityMap other(2, Dims{2, 1, 1}, {}, {0.5, 0.5, 0.5, 0.5});
    CHECK_THROWS_AS(ensemble({m1, other}), ValidationError);
  }
}
