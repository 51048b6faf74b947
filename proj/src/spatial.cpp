#include "mdaug/spatial.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mdaug/filters.hpp"

namespace mdaug {

namespace {

constexpr double kDegToRad = 0.017453292519943295;

using Mat3 = std::array<std::array<double, 3>, 3>;

// R = Rz * Ry * Rx
Mat3 rotation_matrix(const std::array<double, 3>& angles) {
  const double cx = std::cos(angles[0]), sx = std::sin(angles[0]);
  const double cy = std::cos(angles[1]), sy = std::sin(angles[1]);
  const double cz = std::cos(angles[2]), sz = std::sin(angles[2]);
  const Mat3 rx{{{1, 0, 0}, {0, cx, -sx}, {0, sx, cx}}};
  const Mat3 ry{{{cy, 0, sy}, {0, 1, 0}, {-sy, 0, cy}}};
  const Mat3 rz{{{cz, -sz, 0}, {sz, cz, 0}, {0, 0, 1}}};
  auto mul = [](const Mat3& a, const Mat3& b) {
    Mat3 m{};
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        for (int k = 0; k < 3; ++k) m[i][j] += a[i][k] * b[k][j];
    return m;
  };
  return mul(rz, mul(ry, rx));
}

std::array<double, 3> apply_mat(const Mat3& m, const std::array<double, 3>& v) {
  return {m[0][0] * v[0] + m[0][1] * v[1] + m[0][2] * v[2],
          m[1][0] * v[0] + m[1][1] * v[1] + m[1][2] * v[2],
          m[2][0] * v[0] + m[2][1] * v[1] + m[2][2] * v[2]};
}

std::vector<double> unit_noise(std::size_t n, Rng& rng) {
  std::vector<double> g(n);
  for (double& v : g) v = rng.uniform(-1.0, 1.0);
  return g;
}

void scale_all(std::vector<double>& g, double alpha) {
  for (double& v : g) v *= alpha;
}

double trilinear(const Volume& v, double x, double y, double z, double fill) {
  const int x0 = static_cast<int>(std::floor(x));
  const int y0 = static_cast<int>(std::floor(y));
  const int z0 = static_cast<int>(std::floor(z));
  const double fx = x - x0, fy = y - y0, fz = z - z0;
  double acc = 0.0;
  for (int dz = 0; dz < 2; ++dz) {
    const double wz = dz ? fz : 1.0 - fz;
    if (wz == 0.0) continue;
    for (int dy = 0; dy < 2; ++dy) {
      const double wy = dy ? fy : 1.0 - fy;
      if (wy == 0.0) continue;
      for (int dx = 0; dx < 2; ++dx) {
        const double wx = dx ? fx : 1.0 - fx;
        if (wx == 0.0) continue;
        const int xi = x0 + dx, yi = y0 + dy, zi = z0 + dz;
        const bool inside = xi >= 0 && xi < v.dims.nx && yi >= 0 && yi < v.dims.ny && zi >= 0 &&
                            zi < v.dims.nz;
        acc += wx * wy * wz * (inside ? v.at(xi, yi, zi) : fill);
      }
    }
  }
  return acc;
}

std::uint8_t nearest_label(const SegmentationMask& m, double x, double y, double z) {
  const int xi = static_cast<int>(std::lround(x));
  const int yi = static_cast<int>(std::lround(y));
  const int zi = static_cast<int>(std::lround(z));
  const bool inside =
      xi >= 0 && xi < m.dims.nx && yi >= 0 && yi < m.dims.ny && zi >= 0 && zi < m.dims.nz;
  return inside ? m.at(xi, yi, zi) : static_cast<std::uint8_t>(kBackground);
}

// Minimum over the intersection of the crop box with the source; whole-volume
// minimum when the box lies fully outside.
double crop_region_min(const Volume& v, const ResolvedSpatial& t) {
  int lo[3], hi[3];
  const int src[3] = {v.dims.nx, v.dims.ny, v.dims.nz};
  bool empty = false;
  for (int i = 0; i < 3; ++i) {
    const int begin = static_cast<int>(std::floor(t.centre[i] - (t.patch[i] - 1) / 2.0));
    lo[i] = std::max(0, begin);
    hi[i] = std::min(src[i], begin + t.patch[i]);
    empty = empty || lo[i] >= hi[i];
  }
  double m = std::numeric_limits<double>::infinity();
  if (empty) {
    for (double x : v.data) m = std::min(m, x);
    return m;
  }
  for (int z = lo[2]; z < hi[2]; ++z)
    for (int y = lo[1]; y < hi[1]; ++y)
      for (int x = lo[0]; x < hi[0]; ++x) m = std::min(m, v.at(x, y, z));
  return m;
}

}  // namespace

void validate(const SpatialParams& p) {
  if (p.rotation_deg < 0.0) throw ValidationError("SpatialParams: rotation range must be >= 0");
  if (p.scale_range[0] > p.scale_range[1] || !(p.scale_range[0] > 0.0))
    throw ValidationError("SpatialParams: bad scale range");
  if (p.elastic_alpha_range[0] > p.elastic_alpha_range[1] || p.elastic_alpha_range[0] < 0.0)
    throw ValidationError("SpatialParams: bad elastic alpha range");
  if (p.elastic_sigma_range[0] > p.elastic_sigma_range[1] || !(p.elastic_sigma_range[0] > 0.0))
    throw ValidationError("SpatialParams: bad elastic sigma range");
  for (double prob : {p.p_rotation, p.p_scale, p.p_per_axis_scale, p.p_elastic})
    if (!(prob >= 0.0 && prob <= 1.0))
      throw ValidationError("SpatialParams: probability outside [0,1]");
  if (p.patch_size)
    for (int d : *p.patch_size)
      if (d < 1) throw ValidationError("SpatialParams: patch size must be >= 1 per axis");
  if (!(p.anisotropy_threshold > 0.0))
    throw ValidationError("SpatialParams: anisotropy threshold must be > 0");
}

DisplacementField make_elastic_field(double alpha, double sigma, const Dims& dims, Rng& rng) {
  if (alpha < 0.0) throw ValidationError("make_elastic_field: alpha must be >= 0");
  if (!(sigma > 0.0)) throw ValidationError("make_elastic_field: sigma must be > 0");
  DisplacementField f;
  f.dims = dims;
  f.alpha = alpha;
  f.sigma = sigma;
  const std::size_t n = dims.voxels();
  f.dx = unit_noise(n, rng);
  f.dy = unit_noise(n, rng);
  f.dz = unit_noise(n, rng);
  for (auto* g : {&f.dx, &f.dy, &f.dz}) {
    filters::smooth_gaussian(*g, dims, sigma, /*in_plane=*/false);
    scale_all(*g, alpha);
  }
  return f;
}

DisplacementField make_elastic_field_inplane(double alpha, double sigma, const Dims& dims,
                                             Rng& rng) {
  if (alpha < 0.0) throw ValidationError("make_elastic_field: alpha must be >= 0");
  if (!(sigma > 0.0)) throw ValidationError("make_elastic_field: sigma must be > 0");
  DisplacementField f;
  f.dims = dims;
  f.alpha = alpha;
  f.sigma = sigma;
  const std::size_t n = dims.voxels();
  f.dx = unit_noise(n, rng);
  f.dy = unit_noise(n, rng);
  f.dz.assign(n, 0.0);
  // Smoothing only in-plane keeps slices independent.
  for (auto* g : {&f.dx, &f.dy}) {
    filters::smooth_gaussian(*g, dims, sigma, /*in_plane=*/true);
    scale_all(*g, alpha);
  }
  return f;
}

bool ResolvedSpatial::identity() const {
  return angles_rad == std::array<double, 3>{0, 0, 0} && scales == std::array<double, 3>{1, 1, 1} &&
         flips == std::array<bool, 3>{false, false, false} && !field;
}

ResolvedSpatial sample_spatial(const SpatialParams& p, const Dims& src, const Spacing& spacing,
                               Rng& rng) {
  validate(p);
  ResolvedSpatial t;
  t.patch = p.patch_size.value_or(std::array<int, 3>{src.nx, src.ny, src.nz});
  const bool inplane = in_plane_only(spacing, src.nz, p.anisotropy_threshold);

  // Draw order is fixed: rotation, scale, elastic, flips, crop. Disabled
  // sub-transforms consume no draws.
  if (rng.bernoulli(p.p_rotation)) {
    const double r = p.rotation_deg * kDegToRad;
    if (inplane) {
      t.angles_rad[2] = rng.uniform(-r, r);
    } else {
      for (int i = 0; i < 3; ++i) t.angles_rad[i] = rng.uniform(-r, r);
    }
  }

  if (rng.bernoulli(p.p_scale)) {
    if (p.per_axis_scale && rng.bernoulli(p.p_per_axis_scale)) {
      for (int i = 0; i < 3; ++i) t.scales[i] = rng.uniform(p.scale_range[0], p.scale_range[1]);
    } else {
      const double s = rng.uniform(p.scale_range[0], p.scale_range[1]);
      t.scales = {s, s, s};
    }
  }

  if (rng.bernoulli(p.p_elastic)) {
    const double alpha = rng.uniform(p.elastic_alpha_range[0], p.elastic_alpha_range[1]);
    const double sigma = rng.uniform(p.elastic_sigma_range[0], p.elastic_sigma_range[1]);
    const Dims fdims{t.patch[0], t.patch[1], t.patch[2]};
    t.field = inplane ? make_elastic_field_inplane(alpha, sigma, fdims, rng)
                      : make_elastic_field(alpha, sigma, fdims, rng);
  }

  const bool flip_enabled[3] = {p.flip_x, p.flip_y, p.flip_z};
  for (int i = 0; i < 3; ++i)
    if (flip_enabled[i]) t.flips[i] = rng.bernoulli(0.5);

  const int src_dim[3] = {src.nx, src.ny, src.nz};
  for (int i = 0; i < 3; ++i) {
    if (src_dim[i] > t.patch[i]) {
      const auto origin = rng.uniform_int(static_cast<std::uint64_t>(src_dim[i] - t.patch[i] + 1));
      t.centre[i] = static_cast<double>(origin) + (t.patch[i] - 1) / 2.0;
    } else {
      t.centre[i] = (src_dim[i] - 1) / 2.0;  // centred, padding on demand
    }
  }
  return t;
}

std::pair<Volume, std::optional<SegmentationMask>> apply_spatial(const Volume& v,
                                                                 const SegmentationMask* mask,
                                                                 const ResolvedSpatial& t) {
  if (mask && mask->dims != v.dims)
    throw ValidationError("apply_spatial: mask dims differ from volume dims");
  const Dims out_dims{t.patch[0], t.patch[1], t.patch[2]};
  if (t.field && t.field->dims != out_dims)
    throw ValidationError("apply_spatial: displacement field dims differ from patch");

  const Mat3 rot = rotation_matrix(t.angles_rad);
  const double fill = crop_region_min(v, t);
  const std::array<double, 3> patch_centre{(t.patch[0] - 1) / 2.0, (t.patch[1] - 1) / 2.0,
                                           (t.patch[2] - 1) / 2.0};

  std::vector<double> out(out_dims.voxels());
  std::vector<std::uint8_t> out_labels;
  if (mask) out_labels.resize(out_dims.voxels());

  std::size_t idx = 0;
  for (int z = 0; z < t.patch[2]; ++z) {
    for (int y = 0; y < t.patch[1]; ++y) {
      for (int x = 0; x < t.patch[0]; ++x, ++idx) {
        const int p[3] = {x, y, z};
        std::array<double, 3> d;
        for (int i = 0; i < 3; ++i) {
          const int pf = t.flips[i] ? t.patch[i] - 1 - p[i] : p[i];
          d[i] = pf - patch_centre[i];
        }
        std::array<double, 3> rd = apply_mat(rot, d);
        // scale > 1 samples a wider source region (zoom out)
        for (int i = 0; i < 3; ++i) rd[i] = rd[i] * t.scales[i] + t.centre[i];
        if (t.field) {
          rd[0] += t.field->dx[idx];
          rd[1] += t.field->dy[idx];
          rd[2] += t.field->dz[idx];
        }
        out[idx] = trilinear(v, rd[0], rd[1], rd[2], fill);
        if (mask) out_labels[idx] = nearest_label(*mask, rd[0], rd[1], rd[2]);
      }
    }
  }

  Volume img(out_dims, v.spacing, std::move(out), v.metadata);
  std::optional<SegmentationMask> seg;
  if (mask) seg.emplace(out_dims, mask->spacing, std::move(out_labels), mask->num_classes);
  return {std::move(img), std::move(seg)};
}

namespace {

Dims resampled_dims(const Dims& d, const Spacing& from, const Spacing& to) {
  auto count = [](int n, double s_old, double s_new) {
    return std::max(1, static_cast<int>(std::llround(n * s_old / s_new)));
  };
  return Dims{count(d.nx, from.sx, to.sx), count(d.ny, from.sy, to.sy),
              count(d.nz, from.sz, to.sz)};
}

// Voxel-centre alignment of the grid extents.
inline double src_coord(int out, int n_out, int n_in) {
  if (n_out == n_in) return out;
  return (out + 0.5) * (static_cast<double>(n_in) / n_out) - 0.5;
}

}  // namespace

Volume resample(const Volume& v, const Spacing& target) {
  if (!(target.sx > 0.0 && target.sy > 0.0 && target.sz > 0.0))
    throw ValidationError("resample: target spacing must be > 0");
  const Dims nd = resampled_dims(v.dims, v.spacing, target);
  std::vector<double> out(nd.voxels());
  std::size_t idx = 0;
  for (int z = 0; z < nd.nz; ++z) {
    const double sz = std::clamp(src_coord(z, nd.nz, v.dims.nz), 0.0, v.dims.nz - 1.0);
    for (int y = 0; y < nd.ny; ++y) {
      const double sy = std::clamp(src_coord(y, nd.ny, v.dims.ny), 0.0, v.dims.ny - 1.0);
      for (int x = 0; x < nd.nx; ++x, ++idx) {
        const double sx = std::clamp(src_coord(x, nd.nx, v.dims.nx), 0.0, v.dims.nx - 1.0);
        out[idx] = trilinear(v, sx, sy, sz, 0.0);  // clamped coords never go OOB
      }
    }
  }
  return Volume(nd, target, std::move(out), v.metadata);
}

SegmentationMask resample_mask(const SegmentationMask& m, const Spacing& target) {
  if (!(target.sx > 0.0 && target.sy > 0.0 && target.sz > 0.0))
    throw ValidationError("resample: target spacing must be > 0");
  const Dims nd = resampled_dims(m.dims, m.spacing, target);
  std::vector<std::uint8_t> out(nd.voxels());
  std::size_t idx = 0;
  for (int z = 0; z < nd.nz; ++z) {
    const double sz = std::clamp(src_coord(z, nd.nz, m.dims.nz), 0.0, m.dims.nz - 1.0);
    for (int y = 0; y < nd.ny; ++y) {
      const double sy = std::clamp(src_coord(y, nd.ny, m.dims.ny), 0.0, m.dims.ny - 1.0);
      for (int x = 0; x < nd.nx; ++x, ++idx) {
        const double sx = std::clamp(src_coord(x, nd.nx, m.dims.nx), 0.0, m.dims.nx - 1.0);
        out[idx] = nearest_label(m, sx, sy, sz);
      }
    }
  }
  return SegmentationMask(nd, target, std::move(out), m.num_classes);
}

double z_spacing_policy(std::vector<double> z_spacings, ZSpacingPolicy policy) {
  if (z_spacings.empty()) throw ValidationError("z_spacing_policy: empty case list");
  std::sort(z_spacings.begin(), z_spacings.end());
  if (policy == ZSpacingPolicy::Minimum) return z_spacings.front();
  const double rank = 0.1 * (static_cast<double>(z_spacings.size()) - 1.0);
  const std::size_t lo = static_cast<std::size_t>(rank);
  const double frac = rank - static_cast<double>(lo);
  if (lo + 1 >= z_spacings.size()) return z_spacings[lo];
  return z_spacings[lo] + frac * (z_spacings[lo + 1] - z_spacings[lo]);
}

double z_spacing_policy(const std::vector<Volume>& cases, ZSpacingPolicy policy) {
  std::vector<double> zs;
  zs.reserve(cases.size());
  for (const auto& v : cases) zs.push_back(v.spacing.sz);
  return z_spacing_policy(std::move(zs), policy);
}

}  // namespace mdaug
