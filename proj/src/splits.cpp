#include "mdaug/splits.hpp"

#include <algorithm>
#include <cmath>

#include "mdaug/rng.hpp"

namespace mdaug {

namespace {

// Annotated case ids of one vendor, shuffled by a stream derived from
// (seed, vendor). Sorting first makes the result independent of roster order.
std::vector<std::string> shuffled_vendor_ids(const std::vector<CaseRecord>& cases, Vendor v,
                                             std::uint64_t seed) {
  std::vector<std::string> ids;
  for (const auto& c : cases)
    if (c.annotated && c.vendor == v) ids.push_back(c.case_id);
  std::sort(ids.begin(), ids.end());
  Rng rng(derive_stream(seed, static_cast<std::uint64_t>(v) + 1));
  shuffle(ids, rng);
  return ids;
}

void require(std::size_t have, std::size_t need, Vendor v, const std::string& protocol) {
  if (have < need)
    throw ValidationError(protocol + ": needs >= " + std::to_string(need) +
                          " annotated cases for vendor " + vendor_name(v) + ", found " +
                          std::to_string(have));
}

std::map<std::string, Vendor> vendor_lookup(const std::vector<CaseRecord>& cases) {
  std::map<std::string, Vendor> m;
  for (const auto& c : cases) m[c.case_id] = c.vendor;
  return m;
}

SplitManifest make_manifest(const std::string& protocol, std::uint64_t seed, int fold_index,
                            std::string name, std::vector<std::string> train,
                            std::vector<std::string> val,
                            const std::map<std::string, Vendor>& vendors) {
  SplitManifest m;
  m.protocol = protocol;
  m.seed = seed;
  m.fold_index = fold_index;
  m.name = std::move(name);
  std::sort(train.begin(), train.end());
  std::sort(val.begin(), val.end());
  m.train = std::move(train);
  m.validation = std::move(val);
  for (const auto& id : m.train) m.train_vendor_counts[vendor_name(vendors.at(id))] += 1;
  for (const auto& id : m.validation) m.val_vendor_counts[vendor_name(vendors.at(id))] += 1;
  return m;
}

std::vector<std::string> concat(std::vector<std::string> a, const std::vector<std::string>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

std::vector<std::string> slice(const std::vector<std::string>& v, std::size_t from, std::size_t n) {
  return {v.begin() + static_cast<std::ptrdiff_t>(from),
          v.begin() + static_cast<std::ptrdiff_t>(from + n)};
}

}  // namespace

SplitManifest plan_cross_domain(const std::vector<CaseRecord>& cases, Vendor train_vendor,
                                std::uint64_t seed) {
  if (train_vendor != Vendor::A && train_vendor != Vendor::B)
    throw ValidationError("cross-domain: train vendor must be A or B");
  const Vendor other = train_vendor == Vendor::A ? Vendor::B : Vendor::A;
  auto train_ids = shuffled_vendor_ids(cases, train_vendor, seed);
  auto val_ids = shuffled_vendor_ids(cases, other, seed);
  require(train_ids.size(), 75, train_vendor, "cross-domain");
  require(val_ids.size(), 75, other, "cross-domain");
  return make_manifest("cross-domain", seed, 0,
                       std::string("train-") + vendor_name(train_vendor), std::move(train_ids),
                       std::move(val_ids), vendor_lookup(cases));
}

std::vector<SplitManifest> plan_holdout_four(const std::vector<CaseRecord>& cases,
                                             std::uint64_t seed) {
  auto a = shuffled_vendor_ids(cases, Vendor::A, seed);
  auto b = shuffled_vendor_ids(cases, Vendor::B, seed);
  require(a.size(), 75, Vendor::A, "holdout-four");
  require(b.size(), 75, Vendor::B, "holdout-four");
  const auto vendors = vendor_lookup(cases);

  const auto val = concat(slice(a, 0, 25), slice(b, 0, 25));
  std::vector<SplitManifest> out;
  out.push_back(make_manifest("holdout-four", seed, 0, "train-A", slice(a, 25, 50), val, vendors));
  out.push_back(make_manifest("holdout-four", seed, 1, "train-B", slice(b, 25, 50), val, vendors));
  out.push_back(make_manifest("holdout-four", seed, 2, "mixed-I",
                              concat(slice(a, 25, 25), slice(b, 25, 25)), val, vendors));
  out.push_back(make_manifest("holdout-four", seed, 3, "mixed-II",
                              concat(slice(a, 50, 25), slice(b, 50, 25)), val, vendors));
  return out;
}

std::vector<SplitManifest> plan_fraction_sweep(const std::vector<CaseRecord>& cases,
                                               Vendor base_vendor, Vendor target_vendor,
                                               const std::vector<int>& percentages,
                                               std::uint64_t seed) {
  if (base_vendor == target_vendor)
    throw ValidationError("fraction-sweep: base and target vendor must differ");
  for (int pct : percentages)
    if (pct < 0 || pct > 100 || pct % 10 != 0)
      throw ValidationError("fraction-sweep: percentages must be multiples of 10 in 0..100");
  auto base = shuffled_vendor_ids(cases, base_vendor, seed);
  auto target = shuffled_vendor_ids(cases, target_vendor, seed);
  require(base.size(), 75, base_vendor, "fraction-sweep");
  require(target.size(), 75, target_vendor, "fraction-sweep");
  const auto vendors = vendor_lookup(cases);

  const auto val = concat(slice(base, 0, 25), slice(target, 0, 25));
  const auto base_stack = slice(base, 25, 50);
  const auto target_pool = slice(target, 25, 50);  // nesting: prefix per percentage

  std::vector<SplitManifest> out;
  int fold = 0;
  for (int pct : percentages) {
    const auto added = static_cast<std::size_t>(std::llround(pct * 50 / 100.0));
    char name[16];
    std::snprintf(name, sizeof(name), "pct-%03d", pct);
    out.push_back(make_manifest("fraction-sweep", seed, fold++, name,
                                concat(base_stack, slice(target_pool, 0, added)), val, vendors));
  }
  return out;
}

std::vector<SplitManifest> plan_bn_experiment(const std::vector<CaseRecord>& cases,
                                              std::uint64_t seed) {
  auto a = shuffled_vendor_ids(cases, Vendor::A, seed);
  auto b = shuffled_vendor_ids(cases, Vendor::B, seed);
  require(a.size(), 75, Vendor::A, "bn-experiment");
  require(b.size(), 75, Vendor::B, "bn-experiment");
  const auto vendors = vendor_lookup(cases);

  const auto val = concat(slice(a, 0, 15), slice(b, 0, 15));
  const auto train_a = slice(a, 15, 60);
  const auto train_b = slice(b, 15, 60);
  std::vector<SplitManifest> out;
  out.push_back(make_manifest("bn-experiment", seed, 0, "A", train_a, val, vendors));
  out.push_back(make_manifest("bn-experiment", seed, 1, "B", train_b, val, vendors));
  out.push_back(make_manifest("bn-experiment", seed, 2, "AB", concat(train_a, train_b), val, vendors));
  return out;
}

std::vector<SplitManifest> plan_five_fold(const std::vector<CaseRecord>& cases,
                                          std::uint64_t seed) {
  auto a = shuffled_vendor_ids(cases, Vendor::A, seed);
  auto b = shuffled_vendor_ids(cases, Vendor::B, seed);
  if (a.size() + b.size() < 5)
    throw ValidationError("five-fold: needs at least 5 annotated A/B cases, found " +
                          std::to_string(a.size() + b.size()));
  const auto vendors = vendor_lookup(cases);

  // Per-vendor balanced chunks keep each fold's vendor ratio within one case.
  auto chunks = [](const std::vector<std::string>& ids) {
    std::array<std::vector<std::string>, 5> out;
    const std::size_t q = ids.size() / 5, r = ids.size() % 5;
    std::size_t pos = 0;
    for (std::size_t f = 0; f < 5; ++f) {
      const std::size_t n = q + (f < r ? 1 : 0);
      out[f] = slice(ids, pos, n);
      pos += n;
    }
    return out;
  };
  const auto ca = chunks(a), cb = chunks(b);

  std::vector<SplitManifest> out;
  for (int f = 0; f < 5; ++f) {
    const auto val = concat(ca[static_cast<std::size_t>(f)], cb[static_cast<std::size_t>(f)]);
    std::vector<std::string> train;
    for (int g = 0; g < 5; ++g) {
      if (g == f) continue;
      train = concat(std::move(train), ca[static_cast<std::size_t>(g)]);
      train = concat(std::move(train), cb[static_cast<std::size_t>(g)]);
    }
    out.push_back(make_manifest("five-fold", seed, f, "fold-" + std::to_string(f),
                                std::move(train), val, vendors));
  }
  return out;
}

nlohmann::ordered_json manifests_to_json(const std::string& protocol, std::uint64_t seed,
                                         const std::vector<SplitManifest>& folds,
                                         const std::vector<CaseRecord>& cases) {
  nlohmann::ordered_json j;
  j["schema"] = "mdaug-manifest/1";
  j["protocol"] = protocol;
  j["seed"] = seed;
  j["folds"] = nlohmann::ordered_json::array();
  for (const auto& m : folds) {
    nlohmann::ordered_json f;
    f["name"] = m.name;
    f["fold_index"] = m.fold_index;
    f["train"] = m.train;
    f["val"] = m.validation;
    f["train_vendor_counts"] = m.train_vendor_counts;
    f["val_vendor_counts"] = m.val_vendor_counts;
    j["folds"].push_back(f);
  }
  std::map<std::string, int> vendor_counts;
  int annotated = 0;
  for (const auto& c : cases) {
    vendor_counts[vendor_name(c.vendor)] += 1;
    annotated += c.annotated;
  }
  j["meta"]["case_count"] = cases.size();
  j["meta"]["annotated_count"] = annotated;
  j["meta"]["vendor_counts"] = vendor_counts;
  return j;
}

std::vector<SplitManifest> manifests_from_json(const nlohmann::ordered_json& j) {
  if (!j.contains("schema") || j.at("schema") != "mdaug-manifest/1")
    throw ValidationError("manifest: missing or unsupported schema id");
  std::vector<SplitManifest> out;
  for (const auto& f : j.at("folds")) {
    SplitManifest m;
    m.protocol = j.at("protocol").get<std::string>();
    m.seed = j.at("seed").get<std::uint64_t>();
    m.name = f.at("name").get<std::string>();
    m.fold_index = f.at("fold_index").get<int>();
    m.train = f.at("train").get<std::vector<std::string>>();
    m.validation = f.at("val").get<std::vector<std::string>>();
    if (f.contains("train_vendor_counts"))
      m.train_vendor_counts = f.at("train_vendor_counts").get<std::map<std::string, int>>();
    if (f.contains("val_vendor_counts"))
      m.val_vendor_counts = f.at("val_vendor_counts").get<std::map<std::string, int>>();
    out.push_back(std::move(m));
  }
  return out;
}

}  // namespace mdaug
