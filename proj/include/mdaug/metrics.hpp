#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "mdaug/volume.hpp"

namespace mdaug {

/// 2|P n G| / (|P| + |G|) over the voxel sets of class `cls`. When both sets
/// are empty the structure is absent from both rater and model and the score
/// defaults to `both_empty_value` (1.0, configurable to 0.0).
double dice(const SegmentationMask& pred, const SegmentationMask& gt, int cls,
            double both_empty_value = 1.0);

/// Unweighted mean over the three foreground classes; all of LV, LVM, RV must
/// be present in the map.
double mean_dice(const std::map<int, double>& per_class);

/// One scored (case, frame) pair.
struct CaseScore {
  std::string case_id;
  Frame frame = Frame::ED;
  std::optional<Vendor> vendor;
  std::map<int, double> per_class;  // class id -> dice
};

struct VendorStats {
  std::map<int, double> per_class_mean;
  double mean = 0.0;
  int entries = 0;
};

struct DiceReport {
  double empty_dice_value = 1.0;
  std::vector<CaseScore> cases;
  std::map<int, double> per_class_mean;
  double overall_mean = 0.0;
  // Stratification is reported both ways because the source protocol does not
  // fix the order: frame-level entries pooled per vendor, and ED/ES averaged
  // per patient first.
  std::map<Vendor, VendorStats> by_vendor;
  std::map<Vendor, VendorStats> by_vendor_patient_first;
  std::vector<std::string> warnings;
};

/// Aggregates per-entry scores into the vendor-stratified report. Every entry
/// must carry a vendor tag.
DiceReport stratified_report(const std::vector<CaseScore>& cases, double empty_dice_value = 1.0);

nlohmann::ordered_json report_to_json(const DiceReport& r);

/// Aligned text table, classes as rows and vendors A..D as columns.
std::string report_to_text(const DiceReport& r);

/// Voxelwise arithmetic mean of the probability maps; all maps must share
/// dims and class count.
ProbabilityMap ensemble(const std::vector<ProbabilityMap>& maps);

}  // namespace mdaug
