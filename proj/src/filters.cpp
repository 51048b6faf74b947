#include "mdaug/filters.hpp"

#include <cmath>

namespace mdaug::filters {

std::vector<double> gaussian_kernel(double sigma) {
  if (sigma <= 0.0) return {1.0};
  const int radius = static_cast<int>(std::ceil(3.0 * sigma));
  std::vector<double> k(2 * radius + 1);
  double sum = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    const double w = std::exp(-0.5 * (i / sigma) * (i / sigma));
    k[i + radius] = w;
    sum += w;
  }
  for (double& w : k) w /= sum;
  return k;
}

int reflect(long long i, long long n) {
  if (n == 1) return 0;
  const long long period = 2 * n;
  long long m = i % period;
  if (m < 0) m += period;
  if (m >= n) m = period - 1 - m;
  return static_cast<int>(m);
}

void smooth_axis(std::vector<double>& grid, const Dims& dims, int axis,
                 const std::vector<double>& kernel) {
  if (kernel.size() <= 1) return;
  const int radius = static_cast<int>(kernel.size() / 2);
  const int n[3] = {dims.nx, dims.ny, dims.nz};
  const std::size_t stride[3] = {1, static_cast<std::size_t>(dims.nx),
                                 static_cast<std::size_t>(dims.nx) * static_cast<std::size_t>(dims.ny)};
  const int len = n[axis];
  const std::size_t step = stride[axis];

  // Iterate over all lines along `axis`.
  const int a1 = (axis == 0) ? 1 : 0;
  const int a2 = (axis == 2) ? 1 : 2;
  std::vector<double> line(static_cast<std::size_t>(len));
  for (int j2 = 0; j2 < n[a2]; ++j2) {
    for (int j1 = 0; j1 < n[a1]; ++j1) {
      const std::size_t base = static_cast<std::size_t>(j1) * stride[a1] +
                               static_cast<std::size_t>(j2) * stride[a2];
      for (int i = 0; i < len; ++i) line[static_cast<std::size_t>(i)] = grid[base + static_cast<std::size_t>(i) * step];
      for (int i = 0; i < len; ++i) {
        double acc = 0.0;
        for (int k = -radius; k <= radius; ++k)
          acc += kernel[static_cast<std::size_t>(k + radius)] *
                 line[static_cast<std::size_t>(reflect(i + k, len))];
        grid[base + static_cast<std::size_t>(i) * step] = acc;
      }
    }
  }
}

void smooth_gaussian(std::vector<double>& grid, const Dims& dims, double sigma, bool in_plane) {
  const auto kernel = gaussian_kernel(sigma);
  smooth_axis(grid, dims, 0, kernel);
  smooth_axis(grid, dims, 1, kernel);
  if (!in_plane) smooth_axis(grid, dims, 2, kernel);
}

}  // namespace mdaug::filters
