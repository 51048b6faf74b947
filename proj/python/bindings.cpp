#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "mdaug/dataset.hpp"
#include "mdaug/metrics.hpp"
#include "mdaug/nifti.hpp"
#include "mdaug/normlayers.hpp"
#include "mdaug/pipeline.hpp"
#include "mdaug/presets.hpp"
#include "mdaug/spatial.hpp"
#include "mdaug/splits.hpp"

namespace py = pybind11;
using namespace mdaug;

namespace {

// Arrays cross the boundary as shape (nx, ny, nz) with arr[x, y, z] ==
// Volume::at(x, y, z), independent of the numpy memory order.
Volume volume_from_array(const py::array_t<double>& arr, std::array<double, 3> spacing) {
  if (arr.ndim() != 3) throw py::value_error("expected a 3D array");
  const Dims d{static_cast<int>(arr.shape(0)), static_cast<int>(arr.shape(1)),
               static_cast<int>(arr.shape(2))};
  std::vector<double> data(d.voxels());
  const auto a = arr.unchecked<3>();
  for (int z = 0; z < d.nz; ++z)
    for (int y = 0; y < d.ny; ++y)
      for (int x = 0; x < d.nx; ++x) data[voxel_index(d, x, y, z)] = a(x, y, z);
  return Volume(d, Spacing{spacing[0], spacing[1], spacing[2]}, std::move(data));
}

py::array_t<double> volume_to_array(const Volume& v) {
  py::array_t<double> out({v.dims.nx, v.dims.ny, v.dims.nz});
  auto a = out.mutable_unchecked<3>();
  for (int z = 0; z < v.dims.nz; ++z)
    for (int y = 0; y < v.dims.ny; ++y)
      for (int x = 0; x < v.dims.nx; ++x) a(x, y, z) = v.at(x, y, z);
  return out;
}

SegmentationMask mask_from_array(const py::array_t<std::uint8_t>& arr,
                                 std::array<double, 3> spacing) {
  if (arr.ndim() != 3) throw py::value_error("expected a 3D array");
  const Dims d{static_cast<int>(arr.shape(0)), static_cast<int>(arr.shape(1)),
               static_cast<int>(arr.shape(2))};
  std::vector<std::uint8_t> labels(d.voxels());
  const auto a = arr.unchecked<3>();
  for (int z = 0; z < d.nz; ++z)
    for (int y = 0; y < d.ny; ++y)
      for (int x = 0; x < d.nx; ++x) labels[voxel_index(d, x, y, z)] = a(x, y, z);
  return SegmentationMask(d, Spacing{spacing[0], spacing[1], spacing[2]}, std::move(labels));
}

py::array_t<std::uint8_t> mask_to_array(const SegmentationMask& m) {
  py::array_t<std::uint8_t> out({m.dims.nx, m.dims.ny, m.dims.nz});
  auto a = out.mutable_unchecked<3>();
  for (int z = 0; z < m.dims.nz; ++z)
    for (int y = 0; y < m.dims.ny; ++y)
      for (int x = 0; x < m.dims.nx; ++x) a(x, y, z) = m.at(x, y, z);
  return out;
}

// Probability maps cross as (C, nx, ny, nz).
ProbabilityMap probmap_from_array(const py::array_t<double>& arr, std::array<double, 3> spacing) {
  if (arr.ndim() != 4) throw py::value_error("expected a 4D (class, x, y, z) array");
  const int classes = static_cast<int>(arr.shape(0));
  const Dims d{static_cast<int>(arr.shape(1)), static_cast<int>(arr.shape(2)),
               static_cast<int>(arr.shape(3))};
  std::vector<double> probs(d.voxels() * static_cast<std::size_t>(classes));
  const auto a = arr.unchecked<4>();
  for (int c = 0; c < classes; ++c)
    for (int z = 0; z < d.nz; ++z)
      for (int y = 0; y < d.ny; ++y)
        for (int x = 0; x < d.nx; ++x)
          probs[static_cast<std::size_t>(c) * d.voxels() + voxel_index(d, x, y, z)] = a(c, x, y, z);
  return ProbabilityMap(classes, d, Spacing{spacing[0], spacing[1], spacing[2]}, std::move(probs));
}

py::array_t<double> probmap_to_array(const ProbabilityMap& p) {
  py::array_t<double> out({p.num_classes, p.dims.nx, p.dims.ny, p.dims.nz});
  auto a = out.mutable_unchecked<4>();
  for (int c = 0; c < p.num_classes; ++c)
    for (int z = 0; z < p.dims.nz; ++z)
      for (int y = 0; y < p.dims.ny; ++y)
        for (int x = 0; x < p.dims.nx; ++x) a(c, x, y, z) = p.at(c, x, y, z);
  return out;
}

ActivationBatch batch_from_array(const py::array_t<double>& arr) {
  if (arr.ndim() != 5) throw py::value_error("expected a 5D (n, c, x, y, z) array");
  ActivationBatch b(static_cast<int>(arr.shape(0)), static_cast<int>(arr.shape(1)),
                    static_cast<int>(arr.shape(2)), static_cast<int>(arr.shape(3)),
                    static_cast<int>(arr.shape(4)));
  const auto a = arr.unchecked<5>();
  std::size_t i = 0;
  for (int n = 0; n < b.n; ++n)
    for (int c = 0; c < b.c; ++c)
      for (int x = 0; x < b.nx; ++x)
        for (int y = 0; y < b.ny; ++y)
          for (int z = 0; z < b.nz; ++z) b.v[i++] = a(n, c, x, y, z);
  return b;
}

py::array_t<double> batch_to_array(const ActivationBatch& b) {
  py::array_t<double> out({b.n, b.c, b.nx, b.ny, b.nz});
  auto a = out.mutable_unchecked<5>();
  std::size_t i = 0;
  for (int n = 0; n < b.n; ++n)
    for (int c = 0; c < b.c; ++c)
      for (int x = 0; x < b.nx; ++x)
        for (int y = 0; y < b.ny; ++y)
          for (int z = 0; z < b.nz; ++z) a(n, c, x, y, z) = b.v[i++];
  return out;
}

py::object json_to_py(const nlohmann::ordered_json& j) {
  return py::module_::import("json").attr("loads")(j.dump());
}

std::vector<CaseRecord> cases_from_py(const py::list& cases) {
  std::vector<CaseRecord> out;
  for (const auto& item : cases) {
    const py::dict d = item.cast<py::dict>();
    CaseRecord r;
    r.case_id = d["case_id"].cast<std::string>();
    r.vendor = vendor_from_string(d["vendor"].cast<std::string>());
    r.centre = d["centre"].cast<int>();
    r.annotated = d.contains("annotated") ? d["annotated"].cast<bool>() : true;
    validate_case(r);
    out.push_back(std::move(r));
  }
  return out;
}

NormParams params_from_py(const py::array_t<double>& gamma, const py::array_t<double>& beta,
                          double eps, double momentum) {
  NormParams p;
  p.gamma.assign(gamma.data(), gamma.data() + gamma.size());
  p.beta.assign(beta.data(), beta.data() + beta.size());
  p.eps = eps;
  p.momentum = momentum;
  return p;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "deterministic volume augmentation engine (C++ core)";

  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<nifti::NiftiError>(m, "NiftiError", PyExc_ValueError);

  py::class_<Volume>(m, "Volume")
      .def(py::init(&volume_from_array), py::arg("data"),
           py::arg("spacing") = std::array<double, 3>{1.0, 1.0, 1.0})
      .def_property_readonly("data", &volume_to_array)
      .def_property_readonly("shape",
                             [](const Volume& v) {
                               return py::make_tuple(v.dims.nx, v.dims.ny, v.dims.nz);
                             })
      .def_property_readonly("spacing",
                             [](const Volume& v) {
                               return py::make_tuple(v.spacing.sx, v.spacing.sy, v.spacing.sz);
                             })
      .def_property_readonly("metadata", [](const Volume& v) { return v.metadata; })
      .def("__repr__", [](const Volume& v) {
        return "Volume(" + std::to_string(v.dims.nx) + "x" + std::to_string(v.dims.ny) + "x" +
               std::to_string(v.dims.nz) + ")";
      });

  py::class_<SegmentationMask>(m, "Mask")
      .def(py::init(&mask_from_array), py::arg("labels"),
           py::arg("spacing") = std::array<double, 3>{1.0, 1.0, 1.0})
      .def_property_readonly("labels", &mask_to_array)
      .def_property_readonly("shape", [](const SegmentationMask& m_) {
        return py::make_tuple(m_.dims.nx, m_.dims.ny, m_.dims.nz);
      });

  py::class_<AugmentationPreset>(m, "Preset")
      .def_property_readonly("name", [](const AugmentationPreset& p) { return p.name; })
      .def("to_json", [](const AugmentationPreset& p) { return json_to_py(preset_to_json(p)); })
      .def("__repr__",
           [](const AugmentationPreset& p) { return "Preset('" + p.name + "')"; });

  m.def("builtin_preset_names", &builtin_preset_names);
  m.def("load_preset", &load_preset, py::arg("name_or_path"));
  m.def(
      "preset_from_json",
      [](const py::object& doc) {
        const auto dumped = py::module_::import("json").attr("dumps")(doc).cast<std::string>();
        return preset_from_json(nlohmann::ordered_json::parse(dumped));
      },
      py::arg("document"));

  // core-volume operations
  m.def("zscore_normalize", &zscore_normalize, py::arg("volume"));
  m.def(
      "argmax_decode",
      [](const py::array_t<double>& probs, std::array<double, 3> spacing) {
        return argmax_decode(probmap_from_array(probs, spacing));
      },
      py::arg("probs"), py::arg("spacing") = std::array<double, 3>{1.0, 1.0, 1.0});
  m.def(
      "one_hot",
      [](const SegmentationMask& mask, int num_classes) {
        return probmap_to_array(one_hot(mask, num_classes));
      },
      py::arg("mask"), py::arg("num_classes"));

  // intensity transforms
  m.def("gamma_transform", &gamma_transform, py::arg("volume"), py::arg("gamma"),
        py::arg("retain_stats") = false);
  m.def("inverse_gamma_transform", &inverse_gamma_transform, py::arg("volume"), py::arg("gamma"));
  m.def("additive_brightness", &additive_brightness, py::arg("volume"), py::arg("offset"));
  m.def("multiplicative_brightness", &multiplicative_brightness, py::arg("volume"),
        py::arg("factor"));
  m.def("contrast_transform", &contrast_transform, py::arg("volume"), py::arg("factor"),
        py::arg("preserve_range") = true);
  m.def(
      "gaussian_noise",
      [](const Volume& v, double sigma, std::uint64_t seed) {
        Rng rng(seed);
        return gaussian_noise(v, sigma, rng);
      },
      py::arg("volume"), py::arg("sigma"), py::arg("seed") = 0);
  m.def("gaussian_blur", &gaussian_blur, py::arg("volume"), py::arg("sigma"),
        py::arg("anisotropy_threshold") = 3.0);

  // spatial
  m.def(
      "resample",
      [](const Volume& v, std::array<double, 3> spacing) {
        return resample(v, Spacing{spacing[0], spacing[1], spacing[2]});
      },
      py::arg("volume"), py::arg("target_spacing"));
  m.def(
      "resample_mask",
      [](const SegmentationMask& mask, std::array<double, 3> spacing) {
        return resample_mask(mask, Spacing{spacing[0], spacing[1], spacing[2]});
      },
      py::arg("mask"), py::arg("target_spacing"));
  m.def(
      "z_spacing_target",
      [](std::vector<double> zs, const std::string& policy) {
        if (policy == "minimum") return z_spacing_policy(std::move(zs), ZSpacingPolicy::Minimum);
        if (policy == "percentile10")
          return z_spacing_policy(std::move(zs), ZSpacingPolicy::Percentile10);
        throw py::value_error("policy must be 'minimum' or 'percentile10'");
      },
      py::arg("z_spacings"), py::arg("policy") = "percentile10");

  // pipeline
  m.def(
      "augment_sample",
      [](const Volume& v, const std::optional<SegmentationMask>& mask,
         const AugmentationPreset& preset, std::uint64_t seed, std::uint64_t index) {
        SampleRequest req{"py", Frame::ED, index, seed};
        auto [img, seg] = augment_sample(v, mask ? &*mask : nullptr, preset, req);
        return py::make_tuple(std::move(img), std::move(seg));
      },
      py::arg("volume"), py::arg("mask") = py::none(), py::arg("preset"), py::arg("seed") = 0,
      py::arg("index") = 0);

  // metrics
  m.def("dice", &dice, py::arg("pred"), py::arg("gt"), py::arg("cls"),
        py::arg("both_empty_value") = 1.0);
  m.def("mean_dice", &mean_dice, py::arg("per_class"));
  m.def(
      "ensemble",
      [](const std::vector<py::array_t<double>>& maps, std::array<double, 3> spacing) {
        std::vector<ProbabilityMap> pm;
        pm.reserve(maps.size());
        for (const auto& a : maps) pm.push_back(probmap_from_array(a, spacing));
        return probmap_to_array(ensemble(pm));
      },
      py::arg("maps"), py::arg("spacing") = std::array<double, 3>{1.0, 1.0, 1.0});

  // normalization layers
  m.def(
      "instance_norm",
      [](const py::array_t<double>& x, const py::array_t<double>& gamma,
         const py::array_t<double>& beta, double eps) {
        const auto [y, cache] = in_forward(batch_from_array(x), params_from_py(gamma, beta, eps, 0.1));
        return batch_to_array(y);
      },
      py::arg("x"), py::arg("gamma"), py::arg("beta"), py::arg("eps") = 1e-5);
  m.def(
      "instance_norm_grad",
      [](const py::array_t<double>& x, const py::array_t<double>& grad_y,
         const py::array_t<double>& gamma, const py::array_t<double>& beta, double eps) {
        const auto [y, cache] = in_forward(batch_from_array(x), params_from_py(gamma, beta, eps, 0.1));
        const NormGrads g = in_backward(batch_from_array(grad_y), cache);
        return py::make_tuple(batch_to_array(g.grad_x), g.grad_gamma, g.grad_beta);
      },
      py::arg("x"), py::arg("grad_y"), py::arg("gamma"), py::arg("beta"), py::arg("eps") = 1e-5);
  m.def(
      "batch_norm_train",
      [](const py::array_t<double>& x, const py::array_t<double>& gamma,
         const py::array_t<double>& beta, std::vector<double> running_mean,
         std::vector<double> running_var, double eps, double momentum) {
        NormParams p = params_from_py(gamma, beta, eps, momentum);
        p.running_mean = std::move(running_mean);
        p.running_var = std::move(running_var);
        const auto r = bn_forward_train(batch_from_array(x), p);
        return py::make_tuple(batch_to_array(r.y), r.running_mean, r.running_var);
      },
      py::arg("x"), py::arg("gamma"), py::arg("beta"), py::arg("running_mean"),
      py::arg("running_var"), py::arg("eps") = 1e-5, py::arg("momentum") = 0.1);
  m.def(
      "batch_norm_inference",
      [](const py::array_t<double>& x, const py::array_t<double>& gamma,
         const py::array_t<double>& beta, std::vector<double> running_mean,
         std::vector<double> running_var, double eps) {
        NormParams p = params_from_py(gamma, beta, eps, 0.1);
        p.running_mean = std::move(running_mean);
        p.running_var = std::move(running_var);
        return batch_to_array(bn_forward_inference(batch_from_array(x), p));
      },
      py::arg("x"), py::arg("gamma"), py::arg("beta"), py::arg("running_mean"),
      py::arg("running_var"), py::arg("eps") = 1e-5);

  // split planners; each returns the persisted manifest document
  auto manifest_doc = [](const std::string& protocol, std::uint64_t seed,
                         const std::vector<SplitManifest>& folds,
                         const std::vector<CaseRecord>& cases) {
    return json_to_py(manifests_to_json(protocol, seed, folds, cases));
  };
  m.def(
      "plan_cross_domain",
      [manifest_doc](const py::list& cases, const std::string& train_vendor, std::uint64_t seed) {
        const auto recs = cases_from_py(cases);
        return manifest_doc("cross-domain", seed,
                            {plan_cross_domain(recs, vendor_from_string(train_vendor), seed)}, recs);
      },
      py::arg("cases"), py::arg("train_vendor"), py::arg("seed") = 0);
  m.def(
      "plan_holdout_four",
      [manifest_doc](const py::list& cases, std::uint64_t seed) {
        const auto recs = cases_from_py(cases);
        return manifest_doc("holdout-four", seed, plan_holdout_four(recs, seed), recs);
      },
      py::arg("cases"), py::arg("seed") = 0);
  m.def(
      "plan_fraction_sweep",
      [manifest_doc](const py::list& cases, const std::string& base, const std::string& target,
                     const std::vector<int>& percentages, std::uint64_t seed) {
        const auto recs = cases_from_py(cases);
        return manifest_doc(
            "fraction-sweep", seed,
            plan_fraction_sweep(recs, vendor_from_string(base), vendor_from_string(target),
                                percentages, seed),
            recs);
      },
      py::arg("cases"), py::arg("base_vendor"), py::arg("target_vendor"), py::arg("percentages"),
      py::arg("seed") = 0);
  m.def(
      "plan_bn_experiment",
      [manifest_doc](const py::list& cases, std::uint64_t seed) {
        const auto recs = cases_from_py(cases);
        return manifest_doc("bn-experiment", seed, plan_bn_experiment(recs, seed), recs);
      },
      py::arg("cases"), py::arg("seed") = 0);
  m.def(
      "plan_five_fold",
      [manifest_doc](const py::list& cases, std::uint64_t seed) {
        const auto recs = cases_from_py(cases);
        return manifest_doc("five-fold", seed, plan_five_fold(recs, seed), recs);
      },
      py::arg("cases"), py::arg("seed") = 0);

  // file io
  m.def(
      "read_volume", [](const std::filesystem::path& p) { return nifti::read_volume_file(p); },
      py::arg("path"));
  m.def(
      "read_mask", [](const std::filesystem::path& p) { return nifti::read_mask_file(p); },
      py::arg("path"));
  m.def(
      "write_volume",
      [](const std::filesystem::path& p, const Volume& v) { nifti::write_volume_file(p, v); },
      py::arg("path"), py::arg("volume"));
  m.def(
      "write_mask",
      [](const std::filesystem::path& p, const SegmentationMask& mask) {
        nifti::write_mask_file(p, mask);
      },
      py::arg("path"), py::arg("mask"));
}
