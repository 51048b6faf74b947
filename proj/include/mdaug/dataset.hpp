#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <vector>

#include "json.hpp"
#include "mdaug/volume.hpp"

namespace mdaug {

struct FrameFiles {
  std::filesystem::path image;
  std::optional<std::filesystem::path> label;
};

struct DatasetEntry {
  CaseRecord record;
  std::map<Frame, FrameFiles> frames;  // may be empty for planning-only rosters
};

/// Case roster for one experiment: ids, vendor/centre tags and (optionally)
/// where each frame's image and label live. Persisted as JSON with schema id
/// "mdaug-dataset/1"; relative paths resolve against the manifest location.
struct Dataset {
  std::vector<DatasetEntry> entries;

  std::vector<CaseRecord> records() const;
  const DatasetEntry* find(const std::string& case_id) const;
};

Dataset dataset_from_json(const nlohmann::ordered_json& j,
                          const std::filesystem::path& base_dir = {});
Dataset load_dataset(const std::filesystem::path& manifest_path);
nlohmann::ordered_json dataset_to_json(const Dataset& d);

}  // namespace mdaug
