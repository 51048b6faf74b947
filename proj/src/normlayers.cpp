#include "mdaug/normlayers.hpp"

#include <cmath>

namespace mdaug {

ActivationBatch::ActivationBatch(int n_, int c_, int nx_, int ny_, int nz_,
                                 std::vector<double> values)
    : n(n_), c(c_), nx(nx_), ny(ny_), nz(nz_), v(std::move(values)) {
  if (n < 1 || c < 1 || nx < 1 || ny < 1 || nz < 1)
    throw ValidationError("ActivationBatch: all extents must be >= 1");
  if (v.empty()) v.assign(size(), 0.0);
  if (v.size() != size()) throw ValidationError("ActivationBatch: data length mismatch");
}

NormParams NormParams::identity(int channels) {
  NormParams p;
  p.gamma.assign(static_cast<std::size_t>(channels), 1.0);
  p.beta.assign(static_cast<std::size_t>(channels), 0.0);
  p.running_mean.assign(static_cast<std::size_t>(channels), 0.0);
  p.running_var.assign(static_cast<std::size_t>(channels), 1.0);
  return p;
}

namespace {

void check_params(const ActivationBatch& x, const NormParams& p, bool need_running) {
  if (!(p.eps > 0.0)) throw ValidationError("NormParams: eps must be > 0");
  if (!(p.momentum > 0.0 && p.momentum <= 1.0))
    throw ValidationError("NormParams: momentum must be in (0, 1]");
  const auto c = static_cast<std::size_t>(x.c);
  if (p.gamma.size() != c || p.beta.size() != c)
    throw ValidationError("NormParams: gamma/beta length must equal channel count");
  if (need_running) {
    if (p.running_mean.size() != c || p.running_var.size() != c)
      throw ValidationError("NormParams: running stats missing or of wrong length");
    for (double v : p.running_var)
      if (v < 0.0) throw ValidationError("NormParams: running_var must be >= 0");
  }
}

}  // namespace

std::pair<ActivationBatch, NormCache> in_forward(const ActivationBatch& x, const NormParams& p) {
  check_params(x, p, false);
  const std::size_t spatial = x.spatial();
  ActivationBatch y(x.n, x.c, x.nx, x.ny, x.nz);
  NormCache cache;
  cache.instance = true;
  cache.xhat = ActivationBatch(x.n, x.c, x.nx, x.ny, x.nz);
  cache.inv_std.resize(static_cast<std::size_t>(x.n) * static_cast<std::size_t>(x.c));
  cache.gamma = p.gamma;

  for (int ni = 0; ni < x.n; ++ni) {
    for (int ci = 0; ci < x.c; ++ci) {
      const std::size_t base = x.offset(ni, ci);
      double mean = 0.0;
      for (std::size_t i = 0; i < spatial; ++i) mean += x.v[base + i];
      mean /= static_cast<double>(spatial);
      double var = 0.0;
      for (std::size_t i = 0; i < spatial; ++i) {
        const double d = x.v[base + i] - mean;
        var += d * d;
      }
      var /= static_cast<double>(spatial);
      const double inv_std = 1.0 / std::sqrt(var + p.eps);
      cache.inv_std[static_cast<std::size_t>(ni) * x.c + ci] = inv_std;
      const double g = p.gamma[static_cast<std::size_t>(ci)];
      const double b = p.beta[static_cast<std::size_t>(ci)];
      for (std::size_t i = 0; i < spatial; ++i) {
        const double xh = (x.v[base + i] - mean) * inv_std;
        cache.xhat.v[base + i] = xh;
        y.v[base + i] = g * xh + b;
      }
    }
  }
  return {std::move(y), std::move(cache)};
}

BnTrainResult bn_forward_train(const ActivationBatch& x, const NormParams& p) {
  check_params(x, p, false);
  const std::size_t spatial = x.spatial();
  const std::size_t group = static_cast<std::size_t>(x.n) * spatial;
  if (group <= 1)
    throw ValidationError("bn_forward_train: batch*spatial must exceed 1 element per channel");

  BnTrainResult r;
  r.y = ActivationBatch(x.n, x.c, x.nx, x.ny, x.nz);
  r.cache.instance = false;
  r.cache.xhat = ActivationBatch(x.n, x.c, x.nx, x.ny, x.nz);
  r.cache.inv_std.resize(static_cast<std::size_t>(x.c));
  r.cache.gamma = p.gamma;
  r.running_mean = p.running_mean.empty() ? std::vector<double>(x.c, 0.0) : p.running_mean;
  r.running_var = p.running_var.empty() ? std::vector<double>(x.c, 1.0) : p.running_var;
  if (r.running_mean.size() != static_cast<std::size_t>(x.c) ||
      r.running_var.size() != static_cast<std::size_t>(x.c))
    throw ValidationError("bn_forward_train: running stats of wrong length");

  for (int ci = 0; ci < x.c; ++ci) {
    double mean = 0.0;
    for (int ni = 0; ni < x.n; ++ni) {
      const std::size_t base = x.offset(ni, ci);
      for (std::size_t i = 0; i < spatial; ++i) mean += x.v[base + i];
    }
    mean /= static_cast<double>(group);
    double var = 0.0;
    for (int ni = 0; ni < x.n; ++ni) {
      const std::size_t base = x.offset(ni, ci);
      for (std::size_t i = 0; i < spatial; ++i) {
        const double d = x.v[base + i] - mean;
        var += d * d;
      }
    }
    var /= static_cast<double>(group);  // population variance in the forward pass
    const double inv_std = 1.0 / std::sqrt(var + p.eps);
    r.cache.inv_std[static_cast<std::size_t>(ci)] = inv_std;
    const double g = p.gamma[static_cast<std::size_t>(ci)];
    const double b = p.beta[static_cast<std::size_t>(ci)];
    for (int ni = 0; ni < x.n; ++ni) {
      const std::size_t base = x.offset(ni, ci);
      for (std::size_t i = 0; i < spatial; ++i) {
        const double xh = (x.v[base + i] - mean) * inv_std;
        r.cache.xhat.v[base + i] = xh;
        r.y.v[base + i] = g * xh + b;
      }
    }
    const double unbiased = var * static_cast<double>(group) / static_cast<double>(group - 1);
    r.running_mean[static_cast<std::size_t>(ci)] =
        (1.0 - p.momentum) * r.running_mean[static_cast<std::size_t>(ci)] + p.momentum * mean;
    r.running_var[static_cast<std::size_t>(ci)] =
        (1.0 - p.momentum) * r.running_var[static_cast<std::size_t>(ci)] + p.momentum * unbiased;
  }
  return r;
}

ActivationBatch bn_forward_inference(const ActivationBatch& x, const NormParams& p) {
  check_params(x, p, /*need_running=*/true);
  const std::size_t spatial = x.spatial();
  ActivationBatch y(x.n, x.c, x.nx, x.ny, x.nz);
  for (int ci = 0; ci < x.c; ++ci) {
    const double inv_std = 1.0 / std::sqrt(p.running_var[static_cast<std::size_t>(ci)] + p.eps);
    const double mean = p.running_mean[static_cast<std::size_t>(ci)];
    const double g = p.gamma[static_cast<std::size_t>(ci)];
    const double b = p.beta[static_cast<std::size_t>(ci)];
    for (int ni = 0; ni < x.n; ++ni) {
      const std::size_t base = x.offset(ni, ci);
      for (std::size_t i = 0; i < spatial; ++i)
        y.v[base + i] = g * (x.v[base + i] - mean) * inv_std + b;
    }
  }
  return y;
}

namespace {

// Shared analytic gradient. For each normalization group of size M:
//   grad_x_i = (gamma * inv_std / M) * (M * g_i - sum(g) - xhat_i * sum(g * xhat))
NormGrads norm_backward(const ActivationBatch& grad_y, const NormCache& cache) {
  const ActivationBatch& xh = cache.xhat;
  if (!grad_y.same_shape(xh))
    throw ValidationError("norm backward: gradient shape does not match cached forward shape");
  const std::size_t expected_groups =
      cache.instance ? static_cast<std::size_t>(xh.n) * static_cast<std::size_t>(xh.c)
                     : static_cast<std::size_t>(xh.c);
  if (cache.inv_std.size() != expected_groups ||
      cache.gamma.size() != static_cast<std::size_t>(xh.c))
    throw ValidationError("norm backward: cache does not match forward call");

  const std::size_t spatial = xh.spatial();
  NormGrads out;
  out.grad_x = ActivationBatch(xh.n, xh.c, xh.nx, xh.ny, xh.nz);
  out.grad_gamma.assign(static_cast<std::size_t>(xh.c), 0.0);
  out.grad_beta.assign(static_cast<std::size_t>(xh.c), 0.0);

  for (int ci = 0; ci < xh.c; ++ci) {
    for (int ni = 0; ni < xh.n; ++ni) {
      const std::size_t base = xh.offset(ni, ci);
      for (std::size_t i = 0; i < spatial; ++i) {
        out.grad_beta[static_cast<std::size_t>(ci)] += grad_y.v[base + i];
        out.grad_gamma[static_cast<std::size_t>(ci)] += grad_y.v[base + i] * xh.v[base + i];
      }
    }
  }

  if (cache.instance) {
    for (int ni = 0; ni < xh.n; ++ni) {
      for (int ci = 0; ci < xh.c; ++ci) {
        const std::size_t base = xh.offset(ni, ci);
        double sum_g = 0.0, sum_gx = 0.0;
        for (std::size_t i = 0; i < spatial; ++i) {
          sum_g += grad_y.v[base + i];
          sum_gx += grad_y.v[base + i] * xh.v[base + i];
        }
        const double m = static_cast<double>(spatial);
        const double scale = cache.gamma[static_cast<std::size_t>(ci)] *
                             cache.inv_std[static_cast<std::size_t>(ni) * xh.c + ci] / m;
        for (std::size_t i = 0; i < spatial; ++i)
          out.grad_x.v[base + i] =
              scale * (m * grad_y.v[base + i] - sum_g - xh.v[base + i] * sum_gx);
      }
    }
  } else {
    const double m = static_cast<double>(static_cast<std::size_t>(xh.n) * spatial);
    for (int ci = 0; ci < xh.c; ++ci) {
      double sum_g = 0.0, sum_gx = 0.0;
      for (int ni = 0; ni < xh.n; ++ni) {
        const std::size_t base = xh.offset(ni, ci);
        for (std::size_t i = 0; i < spatial; ++i) {
          sum_g += grad_y.v[base + i];
          sum_gx += grad_y.v[base + i] * xh.v[base + i];
        }
      }
      const double scale =
          cache.gamma[static_cast<std::size_t>(ci)] * cache.inv_std[static_cast<std::size_t>(ci)] / m;
      for (int ni = 0; ni < xh.n; ++ni) {
        const std::size_t base = xh.offset(ni, ci);
        for (std::size_t i = 0; i < spatial; ++i)
          out.grad_x.v[base + i] =
              scale * (m * grad_y.v[base + i] - sum_g - xh.v[base + i] * sum_gx);
      }
    }
  }
  return out;
}

}  // namespace

NormGrads in_backward(const ActivationBatch& grad_y, const NormCache& cache) {
  if (!cache.instance) throw ValidationError("in_backward: cache is from a batch-norm forward");
  return norm_backward(grad_y, cache);
}

NormGrads bn_backward(const ActivationBatch& grad_y, const NormCache& cache) {
  if (cache.instance) throw ValidationError("bn_backward: cache is from an instance-norm forward");
  return norm_backward(grad_y, cache);
}

}  // namespace mdaug
