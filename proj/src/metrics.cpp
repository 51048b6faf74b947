#include "mdaug/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace mdaug {

double dice(const SegmentationMask& pred, const SegmentationMask& gt, int cls,
            double both_empty_value) {
  if (pred.dims != gt.dims) throw ValidationError("dice: mask dims differ");
  std::size_t p = 0, g = 0, both = 0;
  for (std::size_t i = 0; i < pred.labels.size(); ++i) {
    const bool in_p = pred.labels[i] == cls;
    const bool in_g = gt.labels[i] == cls;
    p += in_p;
    g += in_g;
    both += in_p && in_g;
  }
  if (p + g == 0) return both_empty_value;
  return 2.0 * static_cast<double>(both) / static_cast<double>(p + g);
}

double mean_dice(const std::map<int, double>& per_class) {
  double sum = 0.0;
  for (int cls : {1, 2, 3}) {
    auto it = per_class.find(cls);
    if (it == per_class.end())
      throw ValidationError(std::string("mean_dice: missing class ") + kClassNames[cls]);
    sum += it->second;
  }
  return sum / 3.0;
}

namespace {

VendorStats accumulate(const std::vector<std::map<int, double>>& entries) {
  VendorStats s;
  s.entries = static_cast<int>(entries.size());
  std::map<int, int> counts;
  for (const auto& e : entries) {
    for (const auto& [cls, d] : e) {
      s.per_class_mean[cls] += d;
      counts[cls] += 1;
    }
  }
  for (auto& [cls, sum] : s.per_class_mean) sum /= counts[cls];
  double total = 0.0;
  int n = 0;
  for (const auto& [cls, m] : s.per_class_mean) {
    if (cls == kBackground) continue;
    total += m;
    ++n;
  }
  s.mean = n ? total / n : 0.0;
  return s;
}

}  // namespace

DiceReport stratified_report(const std::vector<CaseScore>& cases, double empty_dice_value) {
  DiceReport r;
  r.empty_dice_value = empty_dice_value;
  r.cases = cases;

  std::map<Vendor, std::vector<std::map<int, double>>> per_vendor;
  std::map<Vendor, std::map<std::string, std::vector<std::map<int, double>>>> per_patient;
  std::map<int, double> class_sum;
  std::map<int, int> class_count;
  double overall = 0.0;
  int overall_n = 0;

  for (const auto& cs : cases) {
    if (!cs.vendor)
      throw ValidationError("stratified_report: case '" + cs.case_id + "' has no vendor tag");
    for (const auto& [cls, d] : cs.per_class) {
      if (d < 0.0 || d > 1.0)
        throw ValidationError("stratified_report: dice outside [0,1] for case '" + cs.case_id + "'");
      class_sum[cls] += d;
      class_count[cls] += 1;
      if (cls != kBackground) {
        overall += d;
        ++overall_n;
      }
    }
    per_vendor[*cs.vendor].push_back(cs.per_class);
    per_patient[*cs.vendor][cs.case_id].push_back(cs.per_class);
  }

  for (const auto& [cls, sum] : class_sum) r.per_class_mean[cls] = sum / class_count[cls];
  r.overall_mean = overall_n ? overall / overall_n : 0.0;

  for (const auto& [vendor, entries] : per_vendor) r.by_vendor[vendor] = accumulate(entries);

  for (const auto& [vendor, patients] : per_patient) {
    std::vector<std::map<int, double>> averaged;
    for (const auto& [id, frames] : patients) {
      std::map<int, double> mean;
      std::map<int, int> n;
      for (const auto& f : frames)
        for (const auto& [cls, d] : f) {
          mean[cls] += d;
          n[cls] += 1;
        }
      for (auto& [cls, sum] : mean) sum /= n[cls];
      averaged.push_back(std::move(mean));
    }
    r.by_vendor_patient_first[vendor] = accumulate(averaged);
  }
  return r;
}

nlohmann::ordered_json report_to_json(const DiceReport& r) {
  nlohmann::ordered_json j;
  j["schema"] = "mdaug-dice-report/1";
  j["empty_dice_value"] = r.empty_dice_value;

  auto class_map = [](const std::map<int, double>& m) {
    nlohmann::ordered_json out;
    for (const auto& [cls, d] : m) out[kClassNames[cls]] = d;
    return out;
  };
  auto vendor_block = [&](const std::map<Vendor, VendorStats>& m) {
    nlohmann::ordered_json out;
    for (const auto& [vendor, stats] : m) {
      nlohmann::ordered_json v;
      v["per_class"] = class_map(stats.per_class_mean);
      v["mean"] = stats.mean;
      v["entries"] = stats.entries;
      out[vendor_name(vendor)] = v;
    }
    return out;
  };

  j["cases"] = nlohmann::ordered_json::array();
  for (const auto& cs : r.cases) {
    nlohmann::ordered_json c;
    c["case_id"] = cs.case_id;
    c["frame"] = frame_name(cs.frame);
    if (cs.vendor) c["vendor"] = vendor_name(*cs.vendor);
    c["dice"] = class_map(cs.per_class);
    c["mean"] = mean_dice(cs.per_class);
    j["cases"].push_back(c);
  }
  j["aggregate"]["per_class_mean"] = class_map(r.per_class_mean);
  j["aggregate"]["overall_mean"] = r.overall_mean;
  j["aggregate"]["by_vendor"] = vendor_block(r.by_vendor);
  j["aggregate"]["by_vendor_patient_first"] = vendor_block(r.by_vendor_patient_first);
  j["aggregate"]["case_entries"] = r.cases.size();
  if (!r.warnings.empty()) j["warnings"] = r.warnings;
  return j;
}

std::string report_to_text(const DiceReport& r) {
  static constexpr Vendor kVendors[] = {Vendor::A, Vendor::B, Vendor::C, Vendor::D};
  std::ostringstream out;
  auto cell = [&](const std::string& s) {
    out << s;
    for (std::size_t i = s.size(); i < 12; ++i) out << ' ';
  };
  auto num = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4f", v);
    return std::string(buf);
  };

  cell("class");
  for (Vendor v : kVendors) cell(std::string("Vendor ") + vendor_name(v));
  out << '\n';
  for (int cls : {1, 2, 3}) {
    cell(kClassNames[cls]);
    for (Vendor v : kVendors) {
      auto it = r.by_vendor.find(v);
      const bool have = it != r.by_vendor.end() && it->second.per_class_mean.count(cls);
      cell(have ? num(it->second.per_class_mean.at(cls)) : "-");
    }
    out << '\n';
  }
  cell("mean");
  for (Vendor v : kVendors) {
    auto it = r.by_vendor.find(v);
    cell(it != r.by_vendor.end() ? num(it->second.mean) : "-");
  }
  out << '\n';
  cell("entries");
  for (Vendor v : kVendors) {
    auto it = r.by_vendor.find(v);
    cell(it != r.by_vendor.end() ? std::to_string(it->second.entries) : "-");
  }
  out << '\n';
  return out.str();
}

ProbabilityMap ensemble(const std::vector<ProbabilityMap>& maps) {
  if (maps.empty()) throw ValidationError("ensemble: empty map list");
  const auto& first = maps.front();
  for (const auto& m : maps)
    if (m.dims != first.dims || m.num_classes != first.num_classes)
      throw ValidationError("ensemble: probability maps differ in shape or class count");
  std::vector<double> mean(first.probs.size(), 0.0);
  for (const auto& m : maps)
    for (std::size_t i = 0; i < mean.size(); ++i) mean[i] += m.probs[i];
  const double inv = 1.0 / static_cast<double>(maps.size());
  for (double& v : mean) v *= inv;
  return ProbabilityMap(first.num_classes, first.dims, first.spacing, std::move(mean));
}

}  // namespace mdaug
