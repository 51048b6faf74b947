#pragma once

#include <array>
#include <optional>
#include <utility>

#include "mdaug/rng.hpp"
#include "mdaug/volume.hpp"

namespace mdaug {

/// Geometric augmentation parameters. Rotation is a symmetric interval
/// [-rotation_deg, +rotation_deg]. patch_size unset means "use the source
/// dims". For anisotropic volumes (see in_plane_only) rotation collapses to
/// in-plane (about z) and elastic deformation is built per slice.
struct SpatialParams {
  double rotation_deg = 0.0;
  double p_rotation = 0.0;

  std::array<double, 2> scale_range{1.0, 1.0};
  double p_scale = 0.0;
  bool per_axis_scale = false;
  double p_per_axis_scale = 0.0;

  std::array<double, 2> elastic_alpha_range{0.0, 0.0};
  std::array<double, 2> elastic_sigma_range{1.0, 1.0};
  double p_elastic = 0.0;

  // Enabled axes flip with probability 0.5 each. z stays opt-in; the usual
  // cardiac setting mirrors in-plane only.
  bool flip_x = false;
  bool flip_y = false;
  bool flip_z = false;

  std::optional<std::array<int, 3>> patch_size;
  double anisotropy_threshold = 3.0;

  bool operator==(const SpatialParams&) const = default;
};

void validate(const SpatialParams& p);

/// Smoothed random offsets in voxel units, one grid per axis. Offsets are
/// Gaussian-smoothed U(-1,1) noise scaled by alpha; the unit-mass kernel
/// guarantees max |offset| <= alpha.
struct DisplacementField {
  Dims dims;
  double alpha = 0.0;
  double sigma = 1.0;
  std::vector<double> dx, dy, dz;
};

DisplacementField make_elastic_field(double alpha, double sigma, const Dims& dims, Rng& rng);

/// In-plane variant for anisotropic volumes: dx/dy are smoothed per slice
/// (no coupling across z) and dz is identically zero.
DisplacementField make_elastic_field_inplane(double alpha, double sigma, const Dims& dims, Rng& rng);

/// One fully resolved draw. The source coordinate of output voxel p is
///
///   src(p) = centre + scale * (R * (flip(p) - patch_centre)) + field(p)
///
/// evaluated per axis, with R = Rz*Ry*Rx and flip() mirroring output indices
/// on the flipped axes. `centre` already contains the crop draw.
struct ResolvedSpatial {
  std::array<int, 3> patch{1, 1, 1};
  std::array<double, 3> centre{0, 0, 0};
  std::array<double, 3> angles_rad{0, 0, 0};
  std::array<double, 3> scales{1, 1, 1};
  std::array<bool, 3> flips{false, false, false};
  std::optional<DisplacementField> field;  // indexed by output voxel

  bool identity() const;
};

/// Draws one resolved transform. Each sub-transform activates independently
/// with its probability; drawn values stay inside their declared ranges. All
/// randomness comes from `rng`, so identical streams give identical draws.
ResolvedSpatial sample_spatial(const SpatialParams& p, const Dims& src, const Spacing& spacing,
                               Rng& rng);

/// Evaluates the composed mapping with one interpolation pass: trilinear
/// (bilinear for single-slice volumes) for the image, nearest-neighbor for
/// the mask. Out-of-bounds reads fill with the minimum intensity of the
/// cropped source region (background for masks). Output dims equal the patch.
std::pair<Volume, std::optional<SegmentationMask>> apply_spatial(const Volume& v,
                                                                 const SegmentationMask* mask,
                                                                 const ResolvedSpatial& t);

/// Grid resampling to a new spacing: new_dim = round(old_dim * old_spacing /
/// new_spacing), at least 1; voxel centres of the old and new grid extents
/// are aligned.
Volume resample(const Volume& v, const Spacing& target);
SegmentationMask resample_mask(const SegmentationMask& m, const Spacing& target);

enum class ZSpacingPolicy { Percentile10, Minimum };

/// Target z-spacing over a non-empty case list. Percentile10 linearly
/// interpolates between order statistics at rank 0.1 * (n - 1).
double z_spacing_policy(std::vector<double> z_spacings, ZSpacingPolicy policy);
double z_spacing_policy(const std::vector<Volume>& cases, ZSpacingPolicy policy);

}  // namespace mdaug
