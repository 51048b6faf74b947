#include "mdaug/volume.hpp"

#include <cmath>
#include <limits>

namespace mdaug {

namespace {

void check_grid(const Dims& d, const Spacing& s, std::size_t count, const char* what) {
  if (d.nx < 1 || d.ny < 1 || d.nz < 1)
    throw ValidationError(std::string(what) + ": dims must be >= 1 per axis");
  if (!(s.sx > 0.0) || !(s.sy > 0.0) || !(s.sz > 0.0) || !std::isfinite(s.sx) ||
      !std::isfinite(s.sy) || !std::isfinite(s.sz))
    throw ValidationError(std::string(what) + ": spacing must be positive and finite");
  if (count != d.voxels())
    throw ValidationError(std::string(what) + ": data length does not match dims");
}

}  // namespace

Volume::Volume(Dims d, Spacing s, std::vector<double> values, Metadata meta)
    : dims(d), spacing(s), data(std::move(values)), metadata(std::move(meta)) {
  check_grid(dims, spacing, data.size(), "Volume");
  for (double v : data)
    if (!std::isfinite(v)) throw ValidationError("Volume: non-finite intensity");
}

SegmentationMask::SegmentationMask(Dims d, Spacing s, std::vector<std::uint8_t> values, int classes)
    : dims(d), spacing(s), labels(std::move(values)), num_classes(classes) {
  check_grid(dims, spacing, labels.size(), "SegmentationMask");
  if (num_classes < 1) throw ValidationError("SegmentationMask: num_classes must be >= 1");
  for (std::uint8_t l : labels)
    if (l >= num_classes)
      throw ValidationError("SegmentationMask: label " + std::to_string(int(l)) +
                            " is not a declared class code");
}

ProbabilityMap::ProbabilityMap(int classes, Dims d, Spacing s, std::vector<double> values)
    : num_classes(classes), dims(d), spacing(s), probs(std::move(values)) {
  if (num_classes < 2) throw ValidationError("ProbabilityMap: needs at least 2 classes");
  if (probs.size() != dims.voxels() * static_cast<std::size_t>(num_classes))
    throw ValidationError("ProbabilityMap: data length does not match dims and class count");
  check_grid(dims, spacing, dims.voxels(), "ProbabilityMap");
  const std::size_t n = dims.voxels();
  for (std::size_t v = 0; v < n; ++v) {
    double sum = 0.0;
    for (int c = 0; c < num_classes; ++c) {
      const double p = probs[static_cast<std::size_t>(c) * n + v];
      if (!(p >= -kSimplexTolerance) || !(p <= 1.0 + kSimplexTolerance))
        throw ValidationError("ProbabilityMap: probability outside [0,1]");
      sum += p;
    }
    if (std::abs(sum - 1.0) > kSimplexTolerance)
      throw ValidationError("ProbabilityMap: per-voxel probabilities do not sum to 1");
  }
}

const char* vendor_name(Vendor v) {
  switch (v) {
    case Vendor::A: return "A";
    case Vendor::B: return "B";
    case Vendor::C: return "C";
    case Vendor::D: return "D";
  }
  return "?";
}

Vendor vendor_from_string(const std::string& s) {
  if (s == "A") return Vendor::A;
  if (s == "B") return Vendor::B;
  if (s == "C") return Vendor::C;
  if (s == "D") return Vendor::D;
  throw ValidationError("unknown vendor '" + s + "'");
}

const char* frame_name(Frame f) { return f == Frame::ED ? "ED" : "ES"; }

Frame frame_from_string(const std::string& s) {
  if (s == "ED") return Frame::ED;
  if (s == "ES") return Frame::ES;
  throw ValidationError("unknown frame '" + s + "'");
}

bool vendor_centre_allowed(Vendor v, int centre) {
  switch (v) {
    case Vendor::A: return centre == 1 || centre == 6;
    case Vendor::B: return centre == 2 || centre == 3;
    case Vendor::C: return centre == 4;
    case Vendor::D: return centre == 5;
  }
  return false;
}

void validate_case(const CaseRecord& rec) {
  if (rec.case_id.empty()) throw ValidationError("CaseRecord: empty case id");
  if (!vendor_centre_allowed(rec.vendor, rec.centre))
    throw ValidationError("CaseRecord '" + rec.case_id + "': vendor " + vendor_name(rec.vendor) +
                          " is not paired with centre " + std::to_string(rec.centre));
  if (!rec.has_ed && !rec.has_es)
    throw ValidationError("CaseRecord '" + rec.case_id + "': no frames");
}

Volume zscore_normalize(const Volume& v) {
  const std::size_t n = v.data.size();
  double mean = 0.0;
  for (double x : v.data) mean += x;
  mean /= static_cast<double>(n);
  double var = 0.0;
  for (double x : v.data) var += (x - mean) * (x - mean);
  var /= static_cast<double>(n);
  std::vector<double> out(n, 0.0);
  if (var > 0.0) {
    const double inv_sd = 1.0 / std::sqrt(var);
    for (std::size_t i = 0; i < n; ++i) out[i] = (v.data[i] - mean) * inv_sd;
  }
  return Volume(v.dims, v.spacing, std::move(out), v.metadata);
}

SegmentationMask argmax_decode(const ProbabilityMap& p) {
  const std::size_t n = p.dims.voxels();
  std::vector<std::uint8_t> labels(n, 0);
  for (std::size_t v = 0; v < n; ++v) {
    int best = 0;
    double best_p = p.probs[v];
    for (int c = 1; c < p.num_classes; ++c) {
      const double q = p.probs[static_cast<std::size_t>(c) * n + v];
      if (q > best_p) {  // strict: ties keep the lowest class index
        best_p = q;
        best = c;
      }
    }
    labels[v] = static_cast<std::uint8_t>(best);
  }
  return SegmentationMask(p.dims, p.spacing, std::move(labels), p.num_classes);
}

ProbabilityMap one_hot(const SegmentationMask& m, int num_classes) {
  const std::size_t n = m.dims.voxels();
  for (std::uint8_t l : m.labels)
    if (l >= num_classes)
      throw ValidationError("one_hot: label " + std::to_string(int(l)) +
                            " out of range for " + std::to_string(num_classes) + " classes");
  std::vector<double> probs(n * static_cast<std::size_t>(num_classes), 0.0);
  for (std::size_t v = 0; v < n; ++v)
    probs[static_cast<std::size_t>(m.labels[v]) * n + v] = 1.0;
  return ProbabilityMap(num_classes, m.dims, m.spacing, std::move(probs));
}

bool in_plane_only(const Spacing& s, int nz, double threshold) {
  if (nz <= 1) return true;
  return s.sz / std::min(s.sx, s.sy) > threshold;
}

}  // namespace mdaug
