#pragma once

#include <optional>

#include "mdaug/rng.hpp"
#include "mdaug/volume.hpp"

namespace mdaug {

/// Photometric augmentation parameters. A transform is active when its range
/// (or mu/sigma pair) is set; the matching probability gates per-sample
/// application. Intensities are assumed z-score normalized, so sigma values
/// are in normalized units.
struct IntensityParams {
  std::optional<std::array<double, 2>> gamma_range;
  double p_gamma = 0.0;
  bool gamma_retain_stats = false;

  std::optional<std::array<double, 2>> inverse_gamma_range;
  double p_inverse_gamma = 0.0;

  // additive offset drawn from N(mu, sigma), one shared draw per sample
  std::optional<std::array<double, 2>> additive_brightness;  // {mu, sigma}
  double p_additive_brightness = 0.0;

  std::optional<std::array<double, 2>> multiplicative_brightness_range;
  double p_multiplicative_brightness = 0.0;

  std::optional<std::array<double, 2>> contrast_range;
  double p_contrast = 0.0;
  bool contrast_preserve_range = true;

  std::optional<std::array<double, 2>> gaussian_noise_sigma_range;
  double p_gaussian_noise = 0.0;

  std::optional<std::array<double, 2>> gaussian_blur_sigma_range;
  double p_gaussian_blur = 0.0;

  bool operator==(const IntensityParams&) const = default;
};

/// Throws when ranges are inverted, sigmas negative or probabilities outside
/// [0, 1].
void validate(const IntensityParams& p);

/// x' = ((x - min) / (max - min + eps))^gamma * (max - min) + min, eps 1e-7.
/// With retain_stats the output is rescaled to restore the input mean and
/// standard deviation. Constant input is returned unchanged. gamma must be
/// positive.
Volume gamma_transform(const Volume& v, double gamma, bool retain_stats = false);

/// Gamma on the value-flipped image: x' = -gamma_transform(-x, gamma).
Volume inverse_gamma_transform(const Volume& v, double gamma);

/// x' = x + offset.
Volume additive_brightness(const Volume& v, double offset);

/// x' = x * factor.
Volume multiplicative_brightness(const Volume& v, double factor);

/// x' = mean + (x - mean) * factor, optionally clipped to the input range.
Volume contrast_transform(const Volume& v, double factor, bool preserve_range = true);

/// Adds i.i.d. N(0, sigma^2) per voxel, drawn from the given stream.
Volume gaussian_noise(const Volume& v, double sigma, Rng& rng);

/// Separable Gaussian blur, kernel radius ceil(3*sigma), unit mass,
/// reflective boundary. Applied in-plane only for anisotropic volumes
/// (see in_plane_only).
Volume gaussian_blur(const Volume& v, double sigma, double anisotropy_threshold = 3.0);

}  // namespace mdaug
