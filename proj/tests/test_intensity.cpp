#include <cmath>
#include <numeric>

#include "doctest.h"
#include "mdaug/filters.hpp"
#include "mdaug/intensity.hpp"
#include "test_util.hpp"

using namespace mdaug;

namespace {

// Direct (non-separable) convolution with its own kernel construction; the
// oracle for the separable implementation.
Volume brute_force_blur(const Volume& v, double sigma) {
  const int radius = static_cast<int>(std::ceil(3.0 * sigma));
  std::vector<double> k1(static_cast<std::size_t>(2 * radius + 1));
  double sum = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    k1[static_cast<std::size_t>(i + radius)] = std::exp(-0.5 * i * i / (sigma * sigma));
    sum += k1[static_cast<std::size_t>(i + radius)];
  }
  for (double& w : k1) w /= sum;

  auto reflect = [](int i, int n) {
    const int period = 2 * n;
    int m = i % period;
    if (m < 0) m += period;
    return m >= n ? period - 1 - m : m;
  };

  std::vector<double> out(v.data.size());
  for (int z = 0; z < v.dims.nz; ++z)
    for (int y = 0; y < v.dims.ny; ++y)
      for (int x = 0; x < v.dims.nx; ++x) {
        double acc = 0.0;
        for (int dz = -radius; dz <= radius; ++dz)
          for (int dy = -radius; dy <= radius; ++dy)
            for (int dx = -radius; dx <= radius; ++dx) {
              const double w = k1[static_cast<std::size_t>(dx + radius)] *
                               k1[static_cast<std::size_t>(dy + radius)] *
                               k1[static_cast<std::size_t>(dz + radius)];
              acc += w * v.at(reflect(x + dx, v.dims.nx), reflect(y + dy, v.dims.ny),
                              reflect(z + dz, v.dims.nz));
            }
        out[voxel_index(v.dims, x, y, z)] = acc;
      }
  return Volume(v.dims, v.spacing, std::move(out));
}

double sum_of(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0); }

}  // namespace

TEST_SUITE("transforms-intensity") {
  TEST_CASE("neutral parameters are the identity within 1e-9") {
    Rng rng(11);
    const Volume v = test::random_volume(Dims{6, 5, 4}, rng, {1, 1, 1}, -2, 2);
    CHECK(test::max_abs_diff(gamma_transform(v, 1.0).data, v.data) < 1e-9);
    CHECK(test::max_abs_diff(inverse_gamma_transform(v, 1.0).data, v.data) < 1e-9);
    CHECK(test::max_abs_diff(additive_brightness(v, 0.0).data, v.data) < 1e-9);
    CHECK(test::max_abs_diff(multiplicative_brightness(v, 1.0).data, v.data) < 1e-9);
    CHECK(test::max_abs_diff(contrast_transform(v, 1.0).data, v.data) < 1e-9);
    Rng noise_rng(0);
    CHECK(test::max_abs_diff(gaussian_noise(v, 0.0, noise_rng).data, v.data) < 1e-9);
    CHECK(test::max_abs_diff(gaussian_blur(v, 0.0).data, v.data) < 1e-9);
  }

  TEST_CASE("gamma on fixed vectors") {
    const Volume a = test::make_volume(Dims{3, 1, 1}, {0.0, 0.5, 1.0});
    const Volume a2 = gamma_transform(a, 2.0);
    CHECK(a2.data[0] == doctest::Approx(0.0).epsilon(1e-6));
    CHECK(a2.data[1] == doctest::Approx(0.25).epsilon(1e-6));
    CHECK(a2.data[2] == doctest::Approx(1.0).epsilon(1e-6));

    const Volume b = test::make_volume(Dims{3, 1, 1}, {0.0, 0.25, 1.0});
    const Volume b05 = gamma_transform(b, 0.5);
    CHECK(b05.data[1] == doctest::Approx(0.5).epsilon(1e-6));
    CHECK(b05.data[2] == doctest::Approx(1.0).epsilon(1e-6));

    CHECK_THROWS_AS(gamma_transform(a, 0.0), ValidationError);
    CHECK_THROWS_AS(gamma_transform(a, -1.0), ValidationError);
  }

  TEST_CASE("gamma keeps min/max, order, and constants") {
    Rng rng(23);
    const Volume v = test::random_volume(Dims{8, 8, 2}, rng, {1, 1, 1}, -3, 7);
    const auto [vmin, vmax] = std::minmax_element(v.data.begin(), v.data.end());
    for (double g : {0.4, 0.9, 1.7, 2.5}) {
      const Volume t = gamma_transform(v, g);
      const auto [tmin, tmax] = std::minmax_element(t.data.begin(), t.data.end());
      CHECK(std::abs(*tmin - *vmin) < 1e-5);
      CHECK(std::abs(*tmax - *vmax) < 1e-5);
      // monotone: order of any two voxels is preserved
      for (std::size_t i = 1; i < v.data.size(); ++i) {
        const bool le = v.data[i - 1] <= v.data[i];
        CHECK(le == (t.data[i - 1] <= t.data[i] + 1e-12));
      }
    }
    const Volume c = test::make_volume(Dims{2, 1, 1}, {3.5, 3.5});
    CHECK(gamma_transform(c, 2.3).data == c.data);
  }

  TEST_CASE("gamma retain_stats restores mean and sd") {
    Rng rng(31);
    const Volume v = test::random_volume(Dims{8, 8, 4}, rng, {1, 1, 1}, -1, 3);
    const Volume t = gamma_transform(v, 2.0, true);
    const double n = static_cast<double>(v.data.size());
    const double mean_in = sum_of(v.data) / n, mean_out = sum_of(t.data) / n;
    double var_in = 0, var_out = 0;
    for (std::size_t i = 0; i < v.data.size(); ++i) {
      var_in += (v.data[i] - mean_in) * (v.data[i] - mean_in);
      var_out += (t.data[i] - mean_out) * (t.data[i] - mean_out);
    }
    CHECK(std::abs(mean_in - mean_out) < 1e-9);
    CHECK(std::abs(std::sqrt(var_in / n) - std::sqrt(var_out / n)) < 1e-9);
  }

  TEST_CASE("inverse gamma on fixed vectors equals flip conjugation") {
    const Volume a = test::make_volume(Dims{3, 1, 1}, {0.0, 0.5, 1.0});
    const Volume inv = inverse_gamma_transform(a, 2.0);
    CHECK(inv.data[0] == doctest::Approx(0.0).epsilon(1e-6));
    CHECK(inv.data[1] == doctest::Approx(0.75).epsilon(1e-6));
    CHECK(inv.data[2] == doctest::Approx(1.0).epsilon(1e-6));

    // on [0,1] data: inverse gamma == 1 - gamma(1 - x)
    Rng rng(5);
    const Volume v = test::random_volume(Dims{4, 4, 4}, rng, {1, 1, 1}, 0, 1);
    std::vector<double> flipped(v.data.size());
    const auto [mn, mx] = std::minmax_element(v.data.begin(), v.data.end());
    for (std::size_t i = 0; i < flipped.size(); ++i) flipped[i] = *mx + *mn - v.data[i];
    Volume conj = gamma_transform(Volume(v.dims, v.spacing, flipped), 1.8);
    for (double& x : conj.data) x = *mx + *mn - x;
    CHECK(test::max_abs_diff(inverse_gamma_transform(v, 1.8).data, conj.data) < 1e-9);
  }

  TEST_CASE("brightness and contrast on fixed vectors") {
    const Volume v01 = test::make_volume(Dims{2, 1, 1}, {0.0, 1.0});
    CHECK(additive_brightness(v01, 0.3).data == std::vector<double>{0.3, 1.3});

    const Volume vm = test::make_volume(Dims{2, 1, 1}, {-1.0, 2.0});
    CHECK(multiplicative_brightness(vm, 0.5).data == std::vector<double>{-0.5, 1.0});

    const Volume vc = test::make_volume(Dims{2, 1, 1}, {0.0, 2.0});
    const Volume half = contrast_transform(vc, 0.5);
    CHECK(half.data[0] == doctest::Approx(0.5));
    CHECK(half.data[1] == doctest::Approx(1.5));
    const Volume clipped = contrast_transform(vc, 2.0, true);
    CHECK(clipped.data == std::vector<double>{0.0, 2.0});
    const Volume unclipped = contrast_transform(vc, 2.0, false);
    CHECK(unclipped.data[0] == doctest::Approx(-1.0));
    CHECK(unclipped.data[1] == doctest::Approx(3.0));
  }

  TEST_CASE("contrast preserves the mean when not clipped") {
    Rng rng(41);
    const Volume v = test::random_volume(Dims{8, 8, 2}, rng);
    const Volume t = contrast_transform(v, 0.6, false);
    const double n = static_cast<double>(v.data.size());
    CHECK(std::abs(sum_of(v.data) / n - sum_of(t.data) / n) < 1e-6);
  }

  TEST_CASE("sampler statistics match their distributions") {
    Rng rng(123);
    const int n = 10000;
    double mean = 0, var = 0;
    std::vector<double> draws(n);
    for (auto& d : draws) {
      d = rng.normal(0.0, 0.2);
      mean += d;
    }
    mean /= n;
    for (double d : draws) var += (d - mean) * (d - mean);
    var /= n;
    CHECK(std::abs(mean) < 0.01);
    CHECK(std::abs(std::sqrt(var) - 0.2) < 0.01);

    for (int i = 0; i < n; ++i) {
      const double m = rng.uniform(0.6, 1.5);
      CHECK(m >= 0.6);
      CHECK(m < 1.5);
    }
  }

  TEST_CASE("gaussian noise statistics and determinism") {
    const Volume zero(Dims{64, 64, 64}, Spacing{}, std::vector<double>(64 * 64 * 64, 0.0));
    Rng rng(77);
    const Volume noisy = gaussian_noise(zero, 0.1, rng);
    double var = 0;
    for (double x : noisy.data) var += x * x;
    var /= static_cast<double>(noisy.data.size());
    CHECK(std::abs(std::sqrt(var) - 0.1) < 0.005);

    Rng r1(5), r2(5);
    const Volume small = test::make_volume(Dims{4, 4, 1}, std::vector<double>(16, 0.0));
    CHECK(gaussian_noise(small, 0.3, r1).data == gaussian_noise(small, 0.3, r2).data);
  }

  TEST_CASE("blur conserves constants and total mass") {
    const Volume c(Dims{6, 6, 3}, Spacing{}, std::vector<double>(6 * 6 * 3, 2.5));
    const Volume cb = gaussian_blur(c, 1.1);
    CHECK(test::max_abs_diff(cb.data, c.data) < 1e-12);

    Rng rng(13);
    const Volume v = test::random_volume(Dims{8, 8, 8}, rng, {1, 1, 1}, -5, 5);
    const Volume b = gaussian_blur(v, 1.3);
    CHECK(std::abs(sum_of(v.data) - sum_of(b.data)) < 1e-6);
  }

  TEST_CASE("separable blur equals the direct convolution oracle") {
    Rng rng(29);
    const Volume v = test::random_volume(Dims{8, 8, 8}, rng, {1, 1, 1}, -4, 4);
    for (double sigma : {0.6, 1.0, 1.7}) {
      const Volume fast = gaussian_blur(v, sigma);
      const Volume slow = brute_force_blur(v, sigma);
      CHECK(test::max_abs_diff(fast.data, slow.data) < 1e-9);
    }
  }

  TEST_CASE("anisotropic volumes blur in-plane only") {
    Rng rng(37);
    // distinct constant per slice; any cross-slice mixing would change values
    std::vector<double> data(5 * 5 * 4);
    for (int z = 0; z < 4; ++z)
      for (int i = 0; i < 25; ++i) data[static_cast<std::size_t>(z * 25 + i)] = z;
    const Volume v(Dims{5, 5, 4}, Spacing{1.4, 1.4, 10.0}, data);
    const Volume b = gaussian_blur(v, 1.0);
    CHECK(test::max_abs_diff(b.data, v.data) < 1e-12);
  }

  TEST_CASE("parameter validation") {
    IntensityParams p;
    p.gamma_range = {{1.5, 0.7}};
    CHECK_THROWS_AS(validate(p), ValidationError);
    p.gamma_range = {{0.7, 1.5}};
    p.p_gamma = 1.5;
    CHECK_THROWS_AS(validate(p), ValidationError);
    p.p_gamma = 0.3;
    CHECK_NOTHROW(validate(p));
  }
}
