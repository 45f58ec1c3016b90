#pragma once

// Layer primitives with hand-derived backward passes. All layers operate in
// double precision on row-major NdArrays; convolution is valid (no padding)
// with stride 1.

#include <cstddef>
#include <span>
#include <vector>

#include "covrank/ndarray.hpp"
#include "covrank/rng.hpp"

namespace covrank {

struct Conv2d {
  std::size_t filters = 0;
  std::size_t channels = 0;
  std::size_t core_h = 0;
  std::size_t core_w = 0;
  std::vector<double> weight;  // (filters, channels, core_h, core_w)
  std::vector<double> bias;    // (filters)

  Conv2d() = default;
  Conv2d(std::size_t filters, std::size_t channels, std::size_t core_h, std::size_t core_w);

  double& w(std::size_t f, std::size_t c, std::size_t i, std::size_t j) {
    return weight[((f * channels + c) * core_h + i) * core_w + j];
  }
  double w(std::size_t f, std::size_t c, std::size_t i, std::size_t j) const {
    return weight[((f * channels + c) * core_h + i) * core_w + j];
  }

  void init(Rng& rng);
};

struct FcLayer {
  std::size_t out = 0;
  std::size_t in = 0;
  std::vector<double> weight;  // (out, in)
  std::vector<double> bias;    // (out)

  FcLayer() = default;
  FcLayer(std::size_t out, std::size_t in);

  void init(Rng& rng);
};

/// Valid cross-correlation plus bias. x is (c,H,W); result is (k, H-h+1, W-w+1).
NdArray conv2d_forward(const NdArray& x, const Conv2d& layer);

/// Accumulates dL/dweight and dL/dbias into grad (same extents as layer) and,
/// when dx is non-null, writes dL/dx.
void conv2d_backward(const NdArray& x, const Conv2d& layer, const NdArray& dy, Conv2d& grad, NdArray* dx);

void relu_inplace(NdArray& x);

struct PoolResult {
  NdArray out;
  std::vector<std::size_t> argmax;  // flat input index per output cell
};

/// 2x2 max pooling, stride 2. Odd trailing rows/columns form partial windows
/// so extents become ceil(H/2) x ceil(W/2).
PoolResult maxpool2x2_forward(const NdArray& x);
NdArray maxpool2x2_backward(const Shape& input_shape, const PoolResult& fwd, const NdArray& dy);

std::vector<double> fc_forward(const FcLayer& layer, std::span<const double> x);
/// Accumulates into grad; writes dL/dx into dx when non-empty.
void fc_backward(const FcLayer& layer, std::span<const double> x, std::span<const double> dy, FcLayer& grad,
                 std::span<double> dx);

/// Contracts axis 1 of a 4-D tensor (a,k,b,c) with a width-k, single-output
/// dense layer, giving (a,b,c).
NdArray fc_reduce_4d(const NdArray& x, const FcLayer& layer);
void fc_reduce_4d_backward(const NdArray& x, const FcLayer& layer, const NdArray& dy, FcLayer& grad, NdArray* dx);

/// Numerically stable (max-subtracted) softmax.
std::vector<double> softmax(std::span<const double> logits);

/// Weighted cross-entropy of softmax(logits) against a class label. Writes
/// dL/dlogits and returns the loss.
double softmax_cross_entropy(std::span<const double> logits, std::size_t label, double weight,
                             std::span<double> dlogits);

}  // namespace covrank
