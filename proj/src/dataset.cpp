#include "mdaug/dataset.hpp"

#include <fstream>

namespace mdaug {

std::vector<CaseRecord> Dataset::records() const {
  std::vector<CaseRecord> out;
  out.reserve(entries.size());
  for (const auto& e : entries) out.push_back(e.record);
  return out;
}

const DatasetEntry* Dataset::find(const std::string& case_id) const {
  for (const auto& e : entries)
    if (e.record.case_id == case_id) return &e;
  return nullptr;
}

Dataset dataset_from_json(const nlohmann::ordered_json& j, const std::filesystem::path& base_dir) {
  if (!j.contains("schema") || j.at("schema") != "mdaug-dataset/1")
    throw ValidationError("dataset: missing or unsupported schema id (want mdaug-dataset/1)");
  if (!j.contains("cases") || !j.at("cases").is_array())
    throw ValidationError("dataset: missing 'cases' array");

  auto resolve = [&](const std::string& p) {
    std::filesystem::path path(p);
    return path.is_absolute() || base_dir.empty() ? path : base_dir / path;
  };

  Dataset d;
  for (const auto& c : j.at("cases")) {
    DatasetEntry e;
    e.record.case_id = c.at("case_id").get<std::string>();
    e.record.vendor = vendor_from_string(c.at("vendor").get<std::string>());
    e.record.centre = c.at("centre").get<int>();
    e.record.annotated = c.value("annotated", false);
    e.record.has_ed = false;
    e.record.has_es = false;
    if (c.contains("frames")) {
      for (const auto& [frame_key, files] : c.at("frames").items()) {
        const Frame f = frame_from_string(frame_key);
        (f == Frame::ED ? e.record.has_ed : e.record.has_es) = true;
        FrameFiles ff;
        if (files.contains("image")) ff.image = resolve(files.at("image").get<std::string>());
        if (files.contains("label")) ff.label = resolve(files.at("label").get<std::string>());
        e.frames[f] = std::move(ff);
      }
    } else {
      // Planning-only roster: both standard frames assumed present.
      e.record.has_ed = true;
      e.record.has_es = true;
    }
    validate_case(e.record);
    d.entries.push_back(std::move(e));
  }
  return d;
}

Dataset load_dataset(const std::filesystem::path& manifest_path) {
  std::ifstream in(manifest_path);
  if (!in) throw ValidationError("dataset: cannot open '" + manifest_path.string() + "'");
  nlohmann::ordered_json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw ValidationError("dataset '" + manifest_path.string() + "': invalid JSON: " + e.what());
  }
  return dataset_from_json(j, manifest_path.parent_path());
}

nlohmann::ordered_json dataset_to_json(const Dataset& d) {
  nlohmann::ordered_json j;
  j["schema"] = "mdaug-dataset/1";
  j["cases"] = nlohmann::ordered_json::array();
  for (const auto& e : d.entries) {
    nlohmann::ordered_json c;
    c["case_id"] = e.record.case_id;
    c["vendor"] = vendor_name(e.record.vendor);
    c["centre"] = e.record.centre;
    c["annotated"] = e.record.annotated;
    if (!e.frames.empty()) {
      nlohmann::ordered_json frames;
      for (const auto& [f, files] : e.frames) {
        nlohmann::ordered_json ff;
        ff["image"] = files.image.string();
        if (files.label) ff["label"] = files.label->string();
        frames[frame_name(f)] = ff;
      }
      c["frames"] = frames;
    }
    j["cases"].push_back(c);
  }
  return j;
}

}  // namespace mdaug
