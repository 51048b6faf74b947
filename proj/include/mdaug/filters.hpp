#pragma once

#include <vector>

#include "mdaug/volume.hpp"

namespace mdaug::filters {

/// Discrete Gaussian kernel, radius ceil(3*sigma), normalized to unit sum.
/// sigma <= 0 yields the identity kernel {1}.
std::vector<double> gaussian_kernel(double sigma);

/// Half-sample symmetric reflection (edge duplicated: -1 -> 0, n -> n-1),
/// folded as often as needed, so arbitrary kernel radii are safe. This
/// boundary keeps a unit-sum kernel exactly mass-conserving.
int reflect(long long i, long long n);

/// In-place convolution of one axis (0=x, 1=y, 2=z) with an odd-length
/// unit-sum kernel.
void smooth_axis(std::vector<double>& grid, const Dims& dims, int axis,
                 const std::vector<double>& kernel);

/// Separable Gaussian smoothing over x and y, and over z unless
/// `in_plane` is set.
void smooth_gaussian(std::vector<double>& grid, const Dims& dims, double sigma, bool in_plane);

}  // namespace mdaug::filters
