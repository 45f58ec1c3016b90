#include "covrank/nn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "covrank/error.hpp"
#include "covrank/simd.hpp"

namespace covrank {

Conv2d::Conv2d(std::size_t filters_, std::size_t channels_, std::size_t core_h_, std::size_t core_w_)
    : filters(filters_),
      channels(channels_),
      core_h(core_h_),
      core_w(core_w_),
      weight(filters_ * channels_ * core_h_ * core_w_, 0.0),
      bias(filters_, 0.0) {}

void Conv2d::init(Rng& rng) {
  const double fan_in = static_cast<double>(channels * core_h * core_w);
  const double limit = std::sqrt(6.0 / fan_in);
  for (double& v : weight) v = rng.uniform(-limit, limit);
  std::fill(bias.begin(), bias.end(), 0.0);
}

FcLayer::FcLayer(std::size_t out_, std::size_t in_) : out(out_), in(in_), weight(out_ * in_, 0.0), bias(out_, 0.0) {}

void FcLayer::init(Rng& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(in + out));
  for (double& v : weight) v = rng.uniform(-limit, limit);
  std::fill(bias.begin(), bias.end(), 0.0);
}

namespace {

// Patch matrix: row p = output position, columns (c, i, j) in weight order.
std::vector<double> im2col(const NdArray& x, std::size_t kh, std::size_t kw, std::size_t Ho, std::size_t Wo) {
  const std::size_t C = x.dim(0), H = x.dim(1), W = x.dim(2), K = C * kh * kw;
  std::vector<double> cols(Ho * Wo * K);
  const double* xs = x.data().data();
  for (std::size_t h = 0; h < Ho; ++h) {
    for (std::size_t w = 0; w < Wo; ++w) {
      double* row = cols.data() + (h * Wo + w) * K;
      for (std::size_t c = 0; c < C; ++c) {
        for (std::size_t i = 0; i < kh; ++i) {
          std::copy_n(xs + (c * H + h + i) * W + w, kw, row);
          row += kw;
        }
      }
    }
  }
  return cols;
}

}  // namespace

NdArray conv2d_forward(const NdArray& x, const Conv2d& layer) {
  if (x.rank() != 3 || x.dim(0) != layer.channels) {
    fail(ErrorKind::training, "conv2d: input " + shape_string(x.shape()) + " does not have " +
                                  std::to_string(layer.channels) + " channels");
  }
  const std::size_t H = x.dim(1), W = x.dim(2);
  if (H < layer.core_h || W < layer.core_w) {
    fail(ErrorKind::training, "conv2d: input " + shape_string(x.shape()) + " smaller than core " +
                                  std::to_string(layer.core_h) + "x" + std::to_string(layer.core_w));
  }
  const std::size_t Ho = H - layer.core_h + 1, Wo = W - layer.core_w + 1;
  const std::size_t K = layer.channels * layer.core_h * layer.core_w, P = Ho * Wo;
  const auto cols = im2col(x, layer.core_h, layer.core_w, Ho, Wo);
  NdArray y({layer.filters, Ho, Wo});
  double* ys = y.data().data();
  for (std::size_t f = 0; f < layer.filters; ++f) {
    const std::span<const double> wf(layer.weight.data() + f * K, K);
    for (std::size_t p = 0; p < P; ++p) {
      ys[f * P + p] = layer.bias[f] + simd::dot(wf, std::span<const double>(cols.data() + p * K, K));
    }
  }
  return y;
}

void conv2d_backward(const NdArray& x, const Conv2d& layer, const NdArray& dy, Conv2d& grad, NdArray* dx) {
  const std::size_t C = layer.channels, H = x.dim(1), W = x.dim(2);
  const std::size_t kh = layer.core_h, kw = layer.core_w;
  const std::size_t Ho = dy.dim(1), Wo = dy.dim(2);
  const std::size_t K = C * kh * kw, P = Ho * Wo;
  const auto cols = im2col(x, kh, kw, Ho, Wo);
  const double* gs = dy.data().data();
  std::vector<double> dcols(dx ? P * K : 0, 0.0);
  for (std::size_t f = 0; f < layer.filters; ++f) {
    double db = 0.0;
    const std::span<double> gw(grad.weight.data() + f * K, K);
    const std::span<const double> wf(layer.weight.data() + f * K, K);
    for (std::size_t p = 0; p < P; ++p) {
      const double g = gs[f * P + p];
      db += g;
      if (g == 0.0) continue;
      simd::axpy(g, std::span<const double>(cols.data() + p * K, K), gw);
      if (dx) simd::axpy(g, wf, std::span<double>(dcols.data() + p * K, K));
    }
    grad.bias[f] += db;
  }
  if (!dx) return;
  *dx = NdArray(x.shape());
  double* xs = dx->data().data();
  for (std::size_t h = 0; h < Ho; ++h) {
    for (std::size_t w = 0; w < Wo; ++w) {
      const double* row = dcols.data() + (h * Wo + w) * K;
      for (std::size_t c = 0; c < C; ++c) {
        for (std::size_t i = 0; i < kh; ++i) {
          double* dst = xs + (c * H + h + i) * W + w;
          for (std::size_t j = 0; j < kw; ++j) dst[j] += row[j];
          row += kw;
        }
      }
    }
  }
}

void relu_inplace(NdArray& x) {
  for (double& v : x.values()) v = v > 0.0 ? v : 0.0;
}

PoolResult maxpool2x2_forward(const NdArray& x) {
  const std::size_t C = x.dim(0), H = x.dim(1), W = x.dim(2);
  const std::size_t Ho = (H + 1) / 2, Wo = (W + 1) / 2;
  PoolResult r{NdArray({C, Ho, Wo}), std::vector<std::size_t>(C * Ho * Wo)};
  for (std::size_t c = 0; c < C; ++c) {
    for (std::size_t h = 0; h < Ho; ++h) {
      for (std::size_t w = 0; w < Wo; ++w) {
        double best = -std::numeric_limits<double>::infinity();
        std::size_t arg = 0;
        for (std::size_t dh = 0; dh < 2; ++dh) {
          const std::size_t ih = 2 * h + dh;
          if (ih >= H) break;
          for (std::size_t dw = 0; dw < 2; ++dw) {
            const std::size_t iw = 2 * w + dw;
            if (iw >= W) break;
            const std::size_t idx = (c * H + ih) * W + iw;
            if (x[idx] > best) {
              best = x[idx];
              arg = idx;
            }
          }
        }
        const std::size_t o = (c * Ho + h) * Wo + w;
        r.out[o] = best;
        r.argmax[o] = arg;
      }
    }
  }
  return r;
}

NdArray maxpool2x2_backward(const Shape& input_shape, const PoolResult& fwd, const NdArray& dy) {
  NdArray dx(input_shape);
  for (std::size_t o = 0; o < fwd.argmax.size(); ++o) dx[fwd.argmax[o]] += dy[o];
  return dx;
}

std::vector<double> fc_forward(const FcLayer& layer, std::span<const double> x) {
  if (x.size() != layer.in) {
    fail(ErrorKind::training, "fc: input width " + std::to_string(x.size()) + " != layer width " +
                                  std::to_string(layer.in));
  }
  std::vector<double> y(layer.out);
  const std::span<const double> ws = layer.weight;
  for (std::size_t o = 0; o < layer.out; ++o) {
    y[o] = layer.bias[o] + simd::dot(ws.subspan(o * layer.in, layer.in), x);
  }
  return y;
}

void fc_backward(const FcLayer& layer, std::span<const double> x, std::span<const double> dy, FcLayer& grad,
                 std::span<double> dx) {
  if (!dx.empty()) std::fill(dx.begin(), dx.end(), 0.0);
  const std::span<const double> ws = layer.weight;
  std::span<double> gw = grad.weight;
  for (std::size_t o = 0; o < layer.out; ++o) {
    grad.bias[o] += dy[o];
    simd::axpy(dy[o], x, gw.subspan(o * layer.in, layer.in));
    if (!dx.empty()) simd::axpy(dy[o], ws.subspan(o * layer.in, layer.in), dx);
  }
}

NdArray fc_reduce_4d(const NdArray& x, const FcLayer& layer) {
  if (x.rank() != 4) fail(ErrorKind::training, "fc_reduce_4d: expected a 4-D input, got " + shape_string(x.shape()));
  const std::size_t A = x.dim(0), K = x.dim(1), B = x.dim(2), C = x.dim(3);
  if (layer.in != K || layer.out != 1) {
    fail(ErrorKind::training, "fc_reduce_4d: layer " + std::to_string(layer.out) + "x" + std::to_string(layer.in) +
                                  " cannot contract axis of width " + std::to_string(K));
  }
  const std::size_t plane = B * C;
  NdArray y({A, B, C}, layer.bias[0]);
  const std::span<const double> xs = x.data();
  for (std::size_t a = 0; a < A; ++a) {
    for (std::size_t k = 0; k < K; ++k) {
      simd::axpy(layer.weight[k], xs.subspan((a * K + k) * plane, plane), y.data().subspan(a * plane, plane));
    }
  }
  return y;
}

void fc_reduce_4d_backward(const NdArray& x, const FcLayer& layer, const NdArray& dy, FcLayer& grad, NdArray* dx) {
  const std::size_t A = x.dim(0), K = x.dim(1), B = x.dim(2), C = x.dim(3);
  const std::size_t plane = B * C;
  const std::span<const double> xs = x.data();
  const std::span<const double> gs = dy.data();
  if (dx) *dx = NdArray(x.shape());
  for (std::size_t a = 0; a < A; ++a) {
    const auto g = gs.subspan(a * plane, plane);
    for (double v : g) grad.bias[0] += v;
    for (std::size_t k = 0; k < K; ++k) {
      const std::size_t off = (a * K + k) * plane;
      grad.weight[k] += simd::dot(g, xs.subspan(off, plane));
      if (dx) simd::axpy(layer.weight[k], g, dx->data().subspan(off, plane));
    }
  }
}

std::vector<double> softmax(std::span<const double> logits) {
  std::vector<double> p(logits.size());
  if (logits.empty()) return p;
  const double mx = *std::max_element(logits.begin(), logits.end());
  double z = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    p[i] = std::exp(logits[i] - mx);
    z += p[i];
  }
  for (double& v : p) v /= z;
  return p;
}

double softmax_cross_entropy(std::span<const double> logits, std::size_t label, double weight,
                             std::span<double> dlogits) {
  const double mx = *std::max_element(logits.begin(), logits.end());
  double z = 0.0;
  for (double l : logits) z += std::exp(l - mx);
  const double log_z = mx + std::log(z);
  for (std::size_t i = 0; i < logits.size(); ++i) {
    const double p = std::exp(logits[i] - log_z);
    dlogits[i] = weight * (p - (i == label ? 1.0 : 0.0));
  }
  return weight * (log_z - logits[label]);
}

}  // namespace covrank
