#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "mdaug/intensity.hpp"
#include "mdaug/spatial.hpp"

namespace mdaug {

/// A named, versioned bundle of every augmentation parameter. Built-in
/// presets are frozen configurations; user presets load from JSON documents
/// with schema id "mdaug-preset/1".
struct AugmentationPreset {
  std::string name;
  int version = 1;
  SpatialParams spatial;
  IntensityParams intensity;

  bool operator==(const AugmentationPreset&) const = default;

  /// The fixed application order; presets cannot reorder it.
  static const std::vector<std::string>& transform_order();
};

std::vector<std::string> builtin_preset_names();

/// Throws ValidationError for unknown names.
AugmentationPreset builtin_preset(const std::string& name);

/// Accepts a built-in name or a path to a preset JSON document.
AugmentationPreset load_preset(const std::string& name_or_path);

/// Strict parse: unknown keys, inverted ranges and bad probabilities are all
/// rejected. Round trip through to_json is lossless.
AugmentationPreset preset_from_json(const nlohmann::ordered_json& j);
nlohmann::ordered_json preset_to_json(const AugmentationPreset& p);

}  // namespace mdaug
