#pragma once

#include <vector>

#include "mdaug/volume.hpp"

namespace mdaug {

/// Dense (N, C, X, Y, Z) activation grid, N fastest-changing last: index =
/// ((((n * C + c) * X + x) * Y + y) * Z + z).
struct ActivationBatch {
  int n = 1, c = 1, nx = 1, ny = 1, nz = 1;
  std::vector<double> v;

  ActivationBatch() = default;
  ActivationBatch(int n_, int c_, int nx_, int ny_, int nz_, std::vector<double> values = {});

  std::size_t spatial() const {
    return static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny) * static_cast<std::size_t>(nz);
  }
  std::size_t size() const { return static_cast<std::size_t>(n) * static_cast<std::size_t>(c) * spatial(); }
  std::size_t offset(int ni, int ci) const {
    return (static_cast<std::size_t>(ni) * static_cast<std::size_t>(c) + static_cast<std::size_t>(ci)) * spatial();
  }
  bool same_shape(const ActivationBatch& o) const {
    return n == o.n && c == o.c && nx == o.nx && ny == o.ny && nz == o.nz;
  }
};

struct NormParams {
  std::vector<double> gamma;  // per-channel scale
  std::vector<double> beta;   // per-channel shift
  double eps = 1e-5;
  double momentum = 0.1;                  // BN running-stat update weight
  std::vector<double> running_mean;       // BN only
  std::vector<double> running_var;        // BN only

  static NormParams identity(int channels);
};

/// Saved forward state needed by the backward pass.
struct NormCache {
  bool instance = true;  // IN: group = (sample, channel); BN: channel over batch
  ActivationBatch xhat;
  std::vector<double> inv_std;  // one per group
  std::vector<double> gamma;
};

struct NormGrads {
  ActivationBatch grad_x;
  std::vector<double> grad_gamma;
  std::vector<double> grad_beta;
};

/// Instance normalization: per (sample, channel) standardization over the
/// spatial voxels, then the per-channel affine: y = gamma * xhat + beta.
std::pair<ActivationBatch, NormCache> in_forward(const ActivationBatch& x, const NormParams& p);

struct BnTrainResult {
  ActivationBatch y;
  NormCache cache;
  std::vector<double> running_mean;  // r' = (1 - momentum) * r + momentum * batch stat
  std::vector<double> running_var;   // unbiased batch variance in the update
};

/// Batch normalization in training mode: statistics over (batch, spatial) per
/// channel using population variance in the forward pass. Rejects groups of a
/// single element.
BnTrainResult bn_forward_train(const ActivationBatch& x, const NormParams& p);

/// y = gamma * (x - running_mean) / sqrt(running_var + eps) + beta.
ActivationBatch bn_forward_inference(const ActivationBatch& x, const NormParams& p);

NormGrads in_backward(const ActivationBatch& grad_y, const NormCache& cache);
NormGrads bn_backward(const ActivationBatch& grad_y, const NormCache& cache);

}  // namespace mdaug
