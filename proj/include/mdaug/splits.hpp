#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"
#include "mdaug/volume.hpp"

namespace mdaug {

/// One train/validation assignment. Planners are pure functions of
/// (case list, seed): regenerating with the same inputs gives bit-identical
/// manifests. Case ids inside each list are sorted.
struct SplitManifest {
  std::string protocol;
  std::uint64_t seed = 0;
  int fold_index = 0;
  std::string name;
  std::vector<std::string> train;
  std::vector<std::string> validation;
  std::map<std::string, int> train_vendor_counts;
  std::map<std::string, int> val_vendor_counts;

  bool operator==(const SplitManifest&) const = default;
};

/// All annotated cases of `train_vendor` train, all of the other vendor
/// validate. Requires the full 75-per-vendor roster.
SplitManifest plan_cross_domain(const std::vector<CaseRecord>& cases, Vendor train_vendor,
                                std::uint64_t seed);

/// Four training sets (50 A, 50 B, mixed I, mixed II with disjoint halves)
/// sharing one 25+25 validation set.
std::vector<SplitManifest> plan_holdout_four(const std::vector<CaseRecord>& cases,
                                             std::uint64_t seed);

/// Fixed 50-case base-vendor stack plus round(pct/100 * 50) target-vendor
/// cases per manifest; training sets are nested across percentages and the
/// 25+25 validation set is fixed and disjoint.
std::vector<SplitManifest> plan_fraction_sweep(const std::vector<CaseRecord>& cases,
                                               Vendor base_vendor, Vendor target_vendor,
                                               const std::vector<int>& percentages,
                                               std::uint64_t seed);

/// Training sets of 60 (A), 60 (B) and their 120-case union, all sharing a
/// fixed 15-per-vendor validation set.
std::vector<SplitManifest> plan_bn_experiment(const std::vector<CaseRecord>& cases,
                                              std::uint64_t seed);

/// Five 80/20 folds over the annotated A+B cases; the validation sets
/// partition the data and each fold preserves the vendor ratio within one
/// case.
std::vector<SplitManifest> plan_five_fold(const std::vector<CaseRecord>& cases,
                                          std::uint64_t seed);

nlohmann::ordered_json manifests_to_json(const std::string& protocol, std::uint64_t seed,
                                         const std::vector<SplitManifest>& folds,
                                         const std::vector<CaseRecord>& cases);
std::vector<SplitManifest> manifests_from_json(const nlohmann::ordered_json& j);

}  // namespace mdaug
