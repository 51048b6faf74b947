#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace mdaug {

/// Thrown when a value object or an operation argument violates a contract.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Dims {
  int nx = 1, ny = 1, nz = 1;

  std::size_t voxels() const {
    return static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny) *
           static_cast<std::size_t>(nz);
  }
  bool operator==(const Dims&) const = default;
};

/// Voxel spacing in millimetres per axis.
struct Spacing {
  double sx = 1.0, sy = 1.0, sz = 1.0;
  bool operator==(const Spacing&) const = default;
};

using Metadata = std::map<std::string, std::string>;

// x is the fastest-moving axis, matching on-disk NIfTI ordering.
inline std::size_t voxel_index(const Dims& d, int x, int y, int z) {
  return static_cast<std::size_t>(x) +
         static_cast<std::size_t>(d.nx) *
             (static_cast<std::size_t>(y) + static_cast<std::size_t>(d.ny) * static_cast<std::size_t>(z));
}

/// Anisotropic 3D scalar grid. Treated as an immutable value once built; all
/// transforms return new volumes.
struct Volume {
  Dims dims;
  Spacing spacing;
  std::vector<double> data;
  Metadata metadata;

  Volume() = default;
  Volume(Dims d, Spacing s, std::vector<double> values, Metadata meta = {});

  double at(int x, int y, int z) const { return data[voxel_index(dims, x, y, z)]; }
  double& at(int x, int y, int z) { return data[voxel_index(dims, x, y, z)]; }
};

constexpr int kNumClasses = 4;
constexpr std::array<const char*, kNumClasses> kClassNames = {"background", "LV", "LVM", "RV"};
constexpr int kBackground = 0;

/// Integer label grid aligned with a Volume. Labels must stay below
/// num_classes (default: the 4-class cardiac table above).
struct SegmentationMask {
  Dims dims;
  Spacing spacing;
  std::vector<std::uint8_t> labels;
  int num_classes = kNumClasses;

  SegmentationMask() = default;
  SegmentationMask(Dims d, Spacing s, std::vector<std::uint8_t> values, int classes = kNumClasses);

  std::uint8_t at(int x, int y, int z) const { return labels[voxel_index(dims, x, y, z)]; }
  std::uint8_t& at(int x, int y, int z) { return labels[voxel_index(dims, x, y, z)]; }
};

/// Per-class soft prediction grid, class-major layout: probs[c * voxels + v].
/// Per voxel the class probabilities must sum to 1 within kSimplexTolerance.
struct ProbabilityMap {
  int num_classes = 2;
  Dims dims;
  Spacing spacing;
  std::vector<double> probs;

  static constexpr double kSimplexTolerance = 1e-5;

  ProbabilityMap() = default;
  ProbabilityMap(int classes, Dims d, Spacing s, std::vector<double> values);

  double at(int c, int x, int y, int z) const {
    return probs[static_cast<std::size_t>(c) * dims.voxels() + voxel_index(dims, x, y, z)];
  }
  double& at(int c, int x, int y, int z) {
    return probs[static_cast<std::size_t>(c) * dims.voxels() + voxel_index(dims, x, y, z)];
  }
};

enum class Vendor { A, B, C, D };
enum class Frame { ED, ES };

const char* vendor_name(Vendor v);
Vendor vendor_from_string(const std::string& s);
const char* frame_name(Frame f);
Frame frame_from_string(const std::string& s);

/// True when (vendor, centre) is one of the pairings seen in the source
/// dataset: A:{1,6}, B:{2,3}, C:{4}, D:{5}.
bool vendor_centre_allowed(Vendor v, int centre);

struct CaseRecord {
  std::string case_id;
  Vendor vendor = Vendor::A;
  int centre = 1;
  bool annotated = false;
  bool has_ed = true;
  bool has_es = true;
};

/// Validates id, vendor/centre pairing and frame presence.
void validate_case(const CaseRecord& rec);

/// (x - mean) / population stddev. A constant (or single-voxel) input maps to
/// all zeros.
Volume zscore_normalize(const Volume& v);

/// Per voxel: index of the maximal class probability, ties broken towards the
/// lowest class index.
SegmentationMask argmax_decode(const ProbabilityMap& p);

/// Exact 0/1 encoding with a single 1 per voxel. Labels >= num_classes are
/// rejected.
ProbabilityMap one_hot(const SegmentationMask& m, int num_classes);

/// Anisotropy rule shared by the spatial and intensity transforms: volumes
/// whose through-plane spacing exceeds `threshold` times the finest in-plane
/// spacing (or that are single-slice) are treated as stacks of 2D images.
bool in_plane_only(const Spacing& s, int nz, double threshold = 3.0);

}  // namespace mdaug
