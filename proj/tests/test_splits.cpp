#include <algorithm>
#include <set>

#include "doctest.h"
#include "mdaug/splits.hpp"

using namespace mdaug;

namespace {

// Roster mirroring the annotated training corpus: 75 vendor-A cases at
// centre 1, 50 vendor-B at centre 2, 25 vendor-B at centre 3.
std::vector<CaseRecord> full_roster() {
  std::vector<CaseRecord> cases;
  auto add = [&](const char* prefix, int n, Vendor v, int centre) {
    for (int i = 0; i < n; ++i) {
      char id[16];
      std::snprintf(id, sizeof(id), "%s%03d", prefix, i);
      cases.push_back({id, v, centre, true, true, true});
    }
  };
  add("A", 75, Vendor::A, 1);
  add("B", 50, Vendor::B, 2);
  add("C", 25, Vendor::B, 3);  // vendor B, second centre
  return cases;
}

std::set<std::string> as_set(const std::vector<std::string>& v) { return {v.begin(), v.end()}; }

bool disjoint(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  const auto sa = as_set(a);
  for (const auto& id : b)
    if (sa.count(id)) return false;
  return true;
}

int vendor_count(const SplitManifest& m, const char* vendor, bool train) {
  const auto& counts = train ? m.train_vendor_counts : m.val_vendor_counts;
  auto it = counts.find(vendor);
  return it == counts.end() ? 0 : it->second;
}

}  // namespace

TEST_SUITE("harness-splits") {
  TEST_CASE("cross-domain uses one full vendor per side") {
    const auto cases = full_roster();
    const SplitManifest m = plan_cross_domain(cases, Vendor::A, 1);
    CHECK(m.train.size() == 75);
    CHECK(m.validation.size() == 75);
    CHECK(vendor_count(m, "A", true) == 75);
    CHECK(vendor_count(m, "B", false) == 75);

    const SplitManifest swapped = plan_cross_domain(cases, Vendor::B, 1);
    CHECK(as_set(swapped.train) == as_set(m.validation));
    CHECK(as_set(swapped.validation) == as_set(m.train));

    std::vector<CaseRecord> only_a(cases.begin(), cases.begin() + 75);
    CHECK_THROWS_AS(plan_cross_domain(only_a, Vendor::A, 1), ValidationError);
    CHECK_THROWS_AS(plan_cross_domain(cases, Vendor::C, 1), ValidationError);
  }

  TEST_CASE("holdout-four shares one validation set and keeps mixed halves disjoint") {
    const auto cases = full_roster();
    const auto folds = plan_holdout_four(cases, 7);
    REQUIRE(folds.size() == 4);
    for (const auto& f : folds) {
      CHECK(f.train.size() == 50);
      CHECK(f.validation.size() == 50);
      CHECK(vendor_count(f, "A", false) == 25);
      CHECK(vendor_count(f, "B", false) == 25);
      CHECK(disjoint(f.train, f.validation));
      CHECK(f.validation == folds[0].validation);  // identical shared set
    }
    CHECK(vendor_count(folds[0], "A", true) == 50);
    CHECK(vendor_count(folds[1], "B", true) == 50);
    CHECK(vendor_count(folds[2], "A", true) == 25);
    CHECK(vendor_count(folds[2], "B", true) == 25);
    CHECK(disjoint(folds[2].train, folds[3].train));

    const auto again = plan_holdout_four(cases, 7);
    CHECK(again == folds);
    const auto other_seed = plan_holdout_four(cases, 8);
    CHECK(other_seed != folds);
  }

  TEST_CASE("fraction sweep adds nested target cases over a fixed base stack") {
    const auto cases = full_roster();
    const auto folds = plan_fraction_sweep(cases, Vendor::B, Vendor::A, {0, 10, 30, 100}, 3);
    REQUIRE(folds.size() == 4);

    CHECK(folds[0].train.size() == 50);  // pct 0: pure cross-domain stack
    CHECK(vendor_count(folds[0], "A", true) == 0);
    CHECK(folds[1].train.size() == 55);
    CHECK(folds[2].train.size() == 65);  // 30% => 15 target cases
    CHECK(vendor_count(folds[2], "A", true) == 15);
    CHECK(folds[3].train.size() == 100);  // 100% => all 50 target cases
    CHECK(vendor_count(folds[3], "A", true) == 50);

    for (std::size_t i = 0; i < folds.size(); ++i) {
      CHECK(folds[i].validation == folds[0].validation);
      CHECK(disjoint(folds[i].train, folds[i].validation));
      if (i > 0) {
        const auto prev = as_set(folds[i - 1].train);
        const auto cur = as_set(folds[i].train);
        CHECK(std::includes(cur.begin(), cur.end(), prev.begin(), prev.end()));
      }
    }

    CHECK_THROWS_AS(plan_fraction_sweep(cases, Vendor::B, Vendor::A, {15}, 3), ValidationError);
    CHECK_THROWS_AS(plan_fraction_sweep(cases, Vendor::A, Vendor::A, {0}, 3), ValidationError);
  }

  TEST_CASE("bn-experiment: 15-per-vendor holdout with 60/60/120 training") {
    const auto cases = full_roster();
    const auto folds = plan_bn_experiment(cases, 11);
    REQUIRE(folds.size() == 3);
    for (const auto& f : folds) {
      CHECK(f.validation.size() == 30);
      CHECK(vendor_count(f, "A", false) == 15);
      CHECK(vendor_count(f, "B", false) == 15);
      CHECK(f.validation == folds[0].validation);
      CHECK(disjoint(f.train, f.validation));
    }
    CHECK(folds[0].train.size() == 60);
    CHECK(vendor_count(folds[0], "A", true) == 60);
    CHECK(folds[1].train.size() == 60);
    CHECK(vendor_count(folds[1], "B", true) == 60);
    CHECK(folds[2].train.size() == 120);

    // AB train is exactly the union of the A and B trains
    std::set<std::string> u = as_set(folds[0].train);
    for (const auto& id : folds[1].train) u.insert(id);
    CHECK(as_set(folds[2].train) == u);
  }

  TEST_CASE("five-fold partitions the data with preserved vendor ratio") {
    const auto cases = full_roster();
    const auto folds = plan_five_fold(cases, 99);
    REQUIRE(folds.size() == 5);

    std::set<std::string> seen;
    for (const auto& f : folds) {
      CHECK(f.train.size() == 120);
      CHECK(f.validation.size() == 30);
      CHECK(vendor_count(f, "A", false) == 15);
      CHECK(vendor_count(f, "B", false) == 15);
      CHECK(disjoint(f.train, f.validation));
      for (const auto& id : f.validation) {
        CHECK(seen.insert(id).second);  // pairwise disjoint validation sets
      }
    }
    CHECK(seen.size() == 150);  // jointly exhaustive

    std::vector<CaseRecord> four(cases.begin(), cases.begin() + 4);
    CHECK_THROWS_AS(plan_five_fold(four, 1), ValidationError);
  }

  TEST_CASE("small five-fold keeps the 80/20 shape") {
    std::vector<CaseRecord> ten;
    for (int i = 0; i < 5; ++i)
      ten.push_back({"A00" + std::to_string(i), Vendor::A, 1, true, true, true});
    for (int i = 0; i < 5; ++i)
      ten.push_back({"B00" + std::to_string(i), Vendor::B, 2, true, true, true});
    const auto folds = plan_five_fold(ten, 2);
    for (const auto& f : folds) {
      CHECK(f.train.size() == 8);
      CHECK(f.validation.size() == 2);
      CHECK(vendor_count(f, "A", false) == 1);
      CHECK(vendor_count(f, "B", false) == 1);
    }
  }

  TEST_CASE("unannotated cases never enter a split") {
    auto cases = full_roster();
    cases.push_back({"X000", Vendor::A, 1, false, true, true});
    const auto folds = plan_five_fold(cases, 1);
    for (const auto& f : folds) {
      CHECK(as_set(f.train).count("X000") == 0);
      CHECK(as_set(f.validation).count("X000") == 0);
    }
  }

  TEST_CASE("json round trip and bit-identical regeneration") {
    const auto cases = full_roster();
    const auto folds = plan_five_fold(cases, 5);
    const auto j1 = manifests_to_json("five-fold", 5, folds, cases);
    const auto j2 = manifests_to_json("five-fold", 5, plan_five_fold(cases, 5), cases);
    CHECK(j1.dump(2) == j2.dump(2));
    CHECK(j1.at("schema") == "mdaug-manifest/1");
    CHECK(j1.at("meta").at("annotated_count") == 150);

    const auto back = manifests_from_json(j1);
    REQUIRE(back.size() == folds.size());
    for (std::size_t i = 0; i < folds.size(); ++i) {
      CHECK(back[i].train == folds[i].train);
      CHECK(back[i].validation == folds[i].validation);
      CHECK(back[i].name == folds[i].name);
    }

    // roster order must not matter
    auto shuffled_order = cases;
    std::reverse(shuffled_order.begin(), shuffled_order.end());
    const auto j3 = manifests_to_json("five-fold", 5, plan_five_fold(shuffled_order, 5), cases);
    CHECK(j1.dump(2) == j3.dump(2));
  }
}
