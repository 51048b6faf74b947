#include "mdaug/intensity.hpp"

#include <algorithm>
#include <cmath>

#include "mdaug/filters.hpp"

namespace mdaug {

namespace {

constexpr double kGammaEps = 1e-7;

void check_range(const std::optional<std::array<double, 2>>& r, const char* name) {
  if (r && (*r)[0] > (*r)[1])
    throw ValidationError(std::string("IntensityParams: inverted range for ") + name);
}

void check_prob(double p, const char* name) {
  if (!(p >= 0.0 && p <= 1.0))
    throw ValidationError(std::string("IntensityParams: probability for ") + name +
                          " outside [0,1]");
}

struct Moments {
  double mean, sd;
};

Moments moments(const std::vector<double>& data) {
  double mean = 0.0;
  for (double x : data) mean += x;
  mean /= static_cast<double>(data.size());
  double var = 0.0;
  for (double x : data) var += (x - mean) * (x - mean);
  var /= static_cast<double>(data.size());
  return {mean, std::sqrt(var)};
}

}  // namespace

void validate(const IntensityParams& p) {
  check_range(p.gamma_range, "gamma");
  check_range(p.inverse_gamma_range, "inverse gamma");
  check_range(p.multiplicative_brightness_range, "multiplicative brightness");
  check_range(p.contrast_range, "contrast");
  check_range(p.gaussian_noise_sigma_range, "gaussian noise");
  check_range(p.gaussian_blur_sigma_range, "gaussian blur");
  if (p.additive_brightness && (*p.additive_brightness)[1] < 0.0)
    throw ValidationError("IntensityParams: additive brightness sigma must be >= 0");
  if (p.gaussian_noise_sigma_range && (*p.gaussian_noise_sigma_range)[0] < 0.0)
    throw ValidationError("IntensityParams: noise sigma must be >= 0");
  if (p.gaussian_blur_sigma_range && (*p.gaussian_blur_sigma_range)[0] < 0.0)
    throw ValidationError("IntensityParams: blur sigma must be >= 0");
  check_prob(p.p_gamma, "gamma");
  check_prob(p.p_inverse_gamma, "inverse gamma");
  check_prob(p.p_additive_brightness, "additive brightness");
  check_prob(p.p_multiplicative_brightness, "multiplicative brightness");
  check_prob(p.p_contrast, "contrast");
  check_prob(p.p_gaussian_noise, "gaussian noise");
  check_prob(p.p_gaussian_blur, "gaussian blur");
}

Volume gamma_transform(const Volume& v, double gamma, bool retain_stats) {
  if (!(gamma > 0.0)) throw ValidationError("gamma_transform: gamma must be > 0");
  // gamma 1 is analytically the identity; skip the eps-regularized evaluation
  if (gamma == 1.0) return v;
  const auto [lo, hi] = std::minmax_element(v.data.begin(), v.data.end());
  const double vmin = *lo, vmax = *hi;
  const double range = vmax - vmin;
  const Moments in = retain_stats ? moments(v.data) : Moments{0, 0};

  std::vector<double> out(v.data.size());
  const double inv = 1.0 / (range + kGammaEps);
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = std::pow((v.data[i] - vmin) * inv, gamma) * range + vmin;

  if (retain_stats) {
    const Moments now = moments(out);
    if (now.sd > 0.0) {
      const double s = in.sd / now.sd;
      for (double& x : out) x = (x - now.mean) * s + in.mean;
    } else {
      for (double& x : out) x = x - now.mean + in.mean;
    }
  }
  return Volume(v.dims, v.spacing, std::move(out), v.metadata);
}

Volume inverse_gamma_transform(const Volume& v, double gamma) {
  std::vector<double> flipped(v.data.size());
  for (std::size_t i = 0; i < flipped.size(); ++i) flipped[i] = -v.data[i];
  Volume neg = gamma_transform(Volume(v.dims, v.spacing, std::move(flipped)), gamma);
  for (double& x : neg.data) x = -x;
  neg.metadata = v.metadata;
  return neg;
}

Volume additive_brightness(const Volume& v, double offset) {
  std::vector<double> out(v.data.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = v.data[i] + offset;
  return Volume(v.dims, v.spacing, std::move(out), v.metadata);
}

Volume multiplicative_brightness(const Volume& v, double factor) {
  std::vector<double> out(v.data.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = v.data[i] * factor;
  return Volume(v.dims, v.spacing, std::move(out), v.metadata);
}

Volume contrast_transform(const Volume& v, double factor, bool preserve_range) {
  double mean = 0.0;
  for (double x : v.data) mean += x;
  mean /= static_cast<double>(v.data.size());
  const auto [lo, hi] = std::minmax_element(v.data.begin(), v.data.end());
  const double vmin = *lo, vmax = *hi;

  std::vector<double> out(v.data.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    double y = mean + (v.data[i] - mean) * factor;
    if (preserve_range) y = std::clamp(y, vmin, vmax);
    out[i] = y;
  }
  return Volume(v.dims, v.spacing, std::move(out), v.metadata);
}

Volume gaussian_noise(const Volume& v, double sigma, Rng& rng) {
  if (sigma < 0.0) throw ValidationError("gaussian_noise: sigma must be >= 0");
  std::vector<double> out(v.data.size());
  if (sigma == 0.0) {
    out = v.data;
  } else {
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = v.data[i] + rng.normal(0.0, sigma);
  }
  return Volume(v.dims, v.spacing, std::move(out), v.metadata);
}

Volume gaussian_blur(const Volume& v, double sigma, double anisotropy_threshold) {
  if (sigma < 0.0) throw ValidationError("gaussian_blur: sigma must be >= 0");
  std::vector<double> out = v.data;
  if (sigma > 0.0)
    filters::smooth_gaussian(out, v.dims, sigma,
                             in_plane_only(v.spacing, v.dims.nz, anisotropy_threshold));
  return Volume(v.dims, v.spacing, std::move(out), v.metadata);
}

}  // namespace mdaug
