#include "mdaug/presets.hpp"

#include <filesystem>
#include <fstream>

namespace mdaug {

namespace {

// Application probabilities and ranges for transforms the source
// configurations enable without quantifying. Fixed here so every preset is
// fully explicit and versioned.
constexpr double kRotationP = 0.2;
constexpr double kScaleP = 0.2;
constexpr double kGammaP = 0.3;
constexpr double kInverseGammaP = 0.1;
constexpr double kNoiseP = 0.1;
constexpr double kBlurP = 0.2;
constexpr double kAdditiveP = 0.15;
constexpr double kMultiplicativeP = 0.15;
constexpr double kContrastP = 0.15;
constexpr std::array<double, 2> kNoiseSigma{0.0, 0.1};
constexpr std::array<double, 2> kBlurSigma{0.5, 1.0};
constexpr std::array<double, 2> kContrastRange{0.75, 1.25};
constexpr std::array<double, 2> kScaleRange{0.7, 1.4};

SpatialParams spatial_base(double rotation_deg) {
  SpatialParams s;
  s.rotation_deg = rotation_deg;
  s.p_rotation = kRotationP;
  s.scale_range = kScaleRange;
  s.p_scale = kScaleP;
  s.flip_x = true;
  s.flip_y = true;
  return s;
}

void enable_gaussian(IntensityParams& i) {
  i.gaussian_noise_sigma_range = kNoiseSigma;
  i.p_gaussian_noise = kNoiseP;
  i.gaussian_blur_sigma_range = kBlurSigma;
  i.p_gaussian_blur = kBlurP;
}

AugmentationPreset make_bl() {
  AugmentationPreset p;
  p.name = "BL";
  p.spatial = spatial_base(30.0);
  return p;
}

AugmentationPreset make_bl_enhanced() {
  AugmentationPreset p = make_bl();
  p.name = "BL-enhanced";
  p.spatial.rotation_deg = 60.0;
  return p;
}

AugmentationPreset make_bl_enhanced_br() {
  AugmentationPreset p = make_bl_enhanced();
  p.name = "BL-enhanced-br";
  p.intensity.additive_brightness = {{0.0, 0.2}};
  p.intensity.p_additive_brightness = kAdditiveP;
  p.intensity.multiplicative_brightness_range = {{0.6, 1.5}};
  p.intensity.p_multiplicative_brightness = kMultiplicativeP;
  return p;
}

AugmentationPreset make_bl_all() {
  AugmentationPreset p = make_bl();
  p.name = "BL-all";
  p.intensity.gamma_range = {{0.7, 1.5}};
  p.intensity.p_gamma = kGammaP;
  p.intensity.inverse_gamma_range = {{0.7, 1.5}};
  p.intensity.p_inverse_gamma = kInverseGammaP;
  enable_gaussian(p.intensity);
  p.intensity.additive_brightness = {{0.0, 0.1}};
  p.intensity.p_additive_brightness = kAdditiveP;
  p.intensity.multiplicative_brightness_range = {{0.7, 1.3}};
  p.intensity.p_multiplicative_brightness = kMultiplicativeP;
  p.intensity.contrast_range = kContrastRange;
  p.intensity.p_contrast = kContrastP;
  return p;
}

AugmentationPreset make_heavy_da() {
  AugmentationPreset p = make_bl_all();
  p.name = "heavy-DA";
  p.spatial.rotation_deg = 180.0;
  p.intensity.gamma_range = {{0.6, 1.6}};
  p.intensity.inverse_gamma_range = {{0.6, 1.6}};
  p.intensity.additive_brightness = {{0.0, 0.3}};
  return p;
}

AugmentationPreset make_default_nnunet() {
  AugmentationPreset p;
  p.name = "default-nnunet";
  p.spatial = spatial_base(30.0);
  p.spatial.elastic_alpha_range = {0.0, 200.0};
  p.spatial.elastic_sigma_range = {9.0, 13.0};
  p.spatial.p_elastic = 0.0;  // recorded but inactive in this configuration
  p.intensity.gamma_range = {{0.7, 1.5}};
  p.intensity.p_gamma = kGammaP;
  enable_gaussian(p.intensity);
  p.intensity.additive_brightness = {{0.0, 0.1}};
  p.intensity.p_additive_brightness = kAdditiveP;
  return p;
}

AugmentationPreset make_mnms_nnunet() {
  AugmentationPreset p;
  p.name = "mnms-nnunet";
  p.spatial = spatial_base(30.0);
  p.spatial.p_rotation = 0.7;
  p.spatial.p_scale = 0.3;
  p.spatial.per_axis_scale = true;
  p.spatial.p_per_axis_scale = 0.3;
  p.spatial.elastic_alpha_range = {0.0, 300.0};
  p.spatial.elastic_sigma_range = {9.0, 15.0};
  p.spatial.p_elastic = 0.1;
  p.intensity.gamma_range = {{0.5, 1.6}};
  p.intensity.p_gamma = kGammaP;
  enable_gaussian(p.intensity);
  p.intensity.additive_brightness = {{0.0, 0.2}};
  p.intensity.p_additive_brightness = kAdditiveP;
  return p;
}

using json = nlohmann::ordered_json;

void reject_unknown_keys(const json& obj, std::initializer_list<const char*> allowed,
                         const char* where) {
  for (const auto& [key, value] : obj.items()) {
    bool known = false;
    for (const char* a : allowed) known = known || key == a;
    if (!known)
      throw ValidationError(std::string("preset: unknown key '") + key + "' in " + where);
  }
}

std::array<double, 2> parse_range(const json& j, const char* key) {
  const auto& r = j.at(key);
  if (!r.is_array() || r.size() != 2)
    throw ValidationError(std::string("preset: '") + key + "' must be a [lo, hi] pair");
  return {r[0].get<double>(), r[1].get<double>()};
}

json range_json(const std::array<double, 2>& r) { return json::array({r[0], r[1]}); }

}  // namespace

const std::vector<std::string>& AugmentationPreset::transform_order() {
  static const std::vector<std::string> order{"spatial",   "gamma", "brightness-additive",
                                              "brightness-multiplicative", "contrast", "blur",
                                              "noise"};
  return order;
}

std::vector<std::string> builtin_preset_names() {
  return {"default-nnunet", "BL", "BL-enhanced", "BL-enhanced-br", "BL-all", "heavy-DA",
          "mnms-nnunet"};
}

AugmentationPreset builtin_preset(const std::string& name) {
  if (name == "default-nnunet") return make_default_nnunet();
  if (name == "BL") return make_bl();
  if (name == "BL-enhanced") return make_bl_enhanced();
  if (name == "BL-enhanced-br") return make_bl_enhanced_br();
  if (name == "BL-all") return make_bl_all();
  if (name == "heavy-DA") return make_heavy_da();
  if (name == "mnms-nnunet") return make_mnms_nnunet();
  throw ValidationError("unknown preset '" + name + "'");
}

AugmentationPreset load_preset(const std::string& name_or_path) {
  for (const auto& name : builtin_preset_names())
    if (name == name_or_path) return builtin_preset(name);
  std::ifstream in(name_or_path);
  if (!in)
    throw ValidationError("unknown preset '" + name_or_path +
                          "' (not a built-in name and not a readable file)");
  json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw ValidationError("preset '" + name_or_path + "': invalid JSON: " + e.what());
  }
  return preset_from_json(j);
}

AugmentationPreset preset_from_json(const json& j) {
  reject_unknown_keys(j, {"schema", "name", "version", "order", "spatial", "intensity"}, "root");
  if (!j.contains("schema") || j.at("schema") != "mdaug-preset/1")
    throw ValidationError("preset: missing or unsupported schema id (want mdaug-preset/1)");
  AugmentationPreset p;
  p.name = j.value("name", std::string("custom"));
  p.version = j.value("version", 1);
  if (j.contains("order") &&
      j.at("order").get<std::vector<std::string>>() != AugmentationPreset::transform_order())
    throw ValidationError("preset: transform order is fixed and cannot be changed");

  if (j.contains("spatial")) {
    const json& s = j.at("spatial");
    reject_unknown_keys(s,
                        {"rotation_deg", "p_rotation", "scale_range", "p_scale", "per_axis_scale",
                         "p_per_axis_scale", "elastic_alpha_range", "elastic_sigma_range",
                         "p_elastic", "flip_axes", "patch_size", "anisotropy_threshold"},
                        "spatial");
    auto& sp = p.spatial;
    sp.rotation_deg = s.value("rotation_deg", 0.0);
    sp.p_rotation = s.value("p_rotation", 0.0);
    if (s.contains("scale_range")) sp.scale_range = parse_range(s, "scale_range");
    sp.p_scale = s.value("p_scale", 0.0);
    sp.per_axis_scale = s.value("per_axis_scale", false);
    sp.p_per_axis_scale = s.value("p_per_axis_scale", 0.0);
    if (s.contains("elastic_alpha_range")) sp.elastic_alpha_range = parse_range(s, "elastic_alpha_range");
    if (s.contains("elastic_sigma_range")) sp.elastic_sigma_range = parse_range(s, "elastic_sigma_range");
    sp.p_elastic = s.value("p_elastic", 0.0);
    if (s.contains("flip_axes")) {
      for (const auto& axis : s.at("flip_axes")) {
        const auto a = axis.get<std::string>();
        if (a == "x") sp.flip_x = true;
        else if (a == "y") sp.flip_y = true;
        else if (a == "z") sp.flip_z = true;
        else throw ValidationError("preset: flip axis must be x, y or z");
      }
    }
    if (s.contains("patch_size")) {
      const auto& ps = s.at("patch_size");
      if (!ps.is_array() || ps.size() != 3)
        throw ValidationError("preset: patch_size must be [px, py, pz]");
      sp.patch_size = {{ps[0].get<int>(), ps[1].get<int>(), ps[2].get<int>()}};
    }
    sp.anisotropy_threshold = s.value("anisotropy_threshold", 3.0);
  }

  if (j.contains("intensity")) {
    const json& s = j.at("intensity");
    reject_unknown_keys(
        s,
        {"gamma_range", "p_gamma", "gamma_retain_stats", "inverse_gamma_range", "p_inverse_gamma",
         "additive_brightness", "p_additive_brightness", "multiplicative_brightness_range",
         "p_multiplicative_brightness", "contrast_range", "p_contrast", "contrast_preserve_range",
         "gaussian_noise_sigma_range", "p_gaussian_noise", "gaussian_blur_sigma_range",
         "p_gaussian_blur"},
        "intensity");
    auto& ip = p.intensity;
    if (s.contains("gamma_range")) ip.gamma_range = parse_range(s, "gamma_range");
    ip.p_gamma = s.value("p_gamma", 0.0);
    ip.gamma_retain_stats = s.value("gamma_retain_stats", false);
    if (s.contains("inverse_gamma_range")) ip.inverse_gamma_range = parse_range(s, "inverse_gamma_range");
    ip.p_inverse_gamma = s.value("p_inverse_gamma", 0.0);
    if (s.contains("additive_brightness")) {
      const auto& ab = s.at("additive_brightness");
      reject_unknown_keys(ab, {"mu", "sigma"}, "additive_brightness");
      ip.additive_brightness = {{ab.at("mu").get<double>(), ab.at("sigma").get<double>()}};
    }
    ip.p_additive_brightness = s.value("p_additive_brightness", 0.0);
    if (s.contains("multiplicative_brightness_range"))
      ip.multiplicative_brightness_range = parse_range(s, "multiplicative_brightness_range");
    ip.p_multiplicative_brightness = s.value("p_multiplicative_brightness", 0.0);
    if (s.contains("contrast_range")) ip.contrast_range = parse_range(s, "contrast_range");
    ip.p_contrast = s.value("p_contrast", 0.0);
    ip.contrast_preserve_range = s.value("contrast_preserve_range", true);
    if (s.contains("gaussian_noise_sigma_range"))
      ip.gaussian_noise_sigma_range = parse_range(s, "gaussian_noise_sigma_range");
    ip.p_gaussian_noise = s.value("p_gaussian_noise", 0.0);
    if (s.contains("gaussian_blur_sigma_range"))
      ip.gaussian_blur_sigma_range = parse_range(s, "gaussian_blur_sigma_range");
    ip.p_gaussian_blur = s.value("p_gaussian_blur", 0.0);
  }

  validate(p.spatial);
  validate(p.intensity);
  return p;
}

nlohmann::ordered_json preset_to_json(const AugmentationPreset& p) {
  json j;
  j["schema"] = "mdaug-preset/1";
  j["name"] = p.name;
  j["version"] = p.version;
  j["order"] = AugmentationPreset::transform_order();

  json s;
  const auto& sp = p.spatial;
  s["rotation_deg"] = sp.rotation_deg;
  s["p_rotation"] = sp.p_rotation;
  s["scale_range"] = range_json(sp.scale_range);
  s["p_scale"] = sp.p_scale;
  s["per_axis_scale"] = sp.per_axis_scale;
  s["p_per_axis_scale"] = sp.p_per_axis_scale;
  s["elastic_alpha_range"] = range_json(sp.elastic_alpha_range);
  s["elastic_sigma_range"] = range_json(sp.elastic_sigma_range);
  s["p_elastic"] = sp.p_elastic;
  json flips = json::array();
  if (sp.flip_x) flips.push_back("x");
  if (sp.flip_y) flips.push_back("y");
  if (sp.flip_z) flips.push_back("z");
  s["flip_axes"] = flips;
  if (sp.patch_size)
    s["patch_size"] = json::array({(*sp.patch_size)[0], (*sp.patch_size)[1], (*sp.patch_size)[2]});
  s["anisotropy_threshold"] = sp.anisotropy_threshold;
  j["spatial"] = s;

  json i;
  const auto& ip = p.intensity;
  if (ip.gamma_range) i["gamma_range"] = range_json(*ip.gamma_range);
  i["p_gamma"] = ip.p_gamma;
  i["gamma_retain_stats"] = ip.gamma_retain_stats;
  if (ip.inverse_gamma_range) i["inverse_gamma_range"] = range_json(*ip.inverse_gamma_range);
  i["p_inverse_gamma"] = ip.p_inverse_gamma;
  if (ip.additive_brightness) {
    i["additive_brightness"]["mu"] = (*ip.additive_brightness)[0];
    i["additive_brightness"]["sigma"] = (*ip.additive_brightness)[1];
  }
  i["p_additive_brightness"] = ip.p_additive_brightness;
  if (ip.multiplicative_brightness_range)
    i["multiplicative_brightness_range"] = range_json(*ip.multiplicative_brightness_range);
  i["p_multiplicative_brightness"] = ip.p_multiplicative_brightness;
  if (ip.contrast_range) i["contrast_range"] = range_json(*ip.contrast_range);
  i["p_contrast"] = ip.p_contrast;
  i["contrast_preserve_range"] = ip.contrast_preserve_range;
  if (ip.gaussian_noise_sigma_range)
    i["gaussian_noise_sigma_range"] = range_json(*ip.gaussian_noise_sigma_range);
  i["p_gaussian_noise"] = ip.p_gaussian_noise;
  if (ip.gaussian_blur_sigma_range)
    i["gaussian_blur_sigma_range"] = range_json(*ip.gaussian_blur_sigma_range);
  i["p_gaussian_blur"] = ip.p_gaussian_blur;
  j["intensity"] = i;
  return j;
}

}  // namespace mdaug
