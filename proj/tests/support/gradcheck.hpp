#pragma once

// Analytic vs central-difference gradients for every layer and for whole
// networks. Each check returns the number of coordinates compared and the
// worst relative error; gradients smaller than 1e-4 in magnitude are
// compared on an absolute 1e-4 scale.

#include <string>
#include <vector>

#include "covrank/network.hpp"
#include "covrank/nn.hpp"
#include "oracles.hpp"

namespace covrank::gradcheck {

struct Result {
  std::string name;
  std::size_t coords = 0;
  double worst = 0.0;
};

inline double rel(double a, double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-4});
}

inline void compare(Result& r, const std::vector<double>& analytic, const std::vector<std::size_t>& coords,
                    const std::vector<double>& numeric) {
  for (std::size_t k = 0; k < coords.size(); ++k) {
    r.worst = std::max(r.worst, rel(analytic[coords[k]], numeric[k]));
    ++r.coords;
  }
}

inline std::vector<double> randn(Rng& rng, std::size_t n, double s = 1.0) {
  std::vector<double> v(n);
  for (auto& x : v) x = s * rng.normal();
  return v;
}

inline double weighted_sum(const std::vector<double>& a, const std::vector<double>& w) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * w[i];
  return s;
}

inline Result conv(std::uint64_t seed) {
  Rng rng(seed);
  Result r{"conv2d"};
  Conv2d layer(3, 2, 3, 2);
  layer.init(rng);
  for (auto& b : layer.bias) b = rng.normal();
  NdArray x({2, 5, 6}, randn(rng, 60));
  const NdArray y0 = conv2d_forward(x, layer);
  const auto w = randn(rng, y0.size());
  Conv2d grad(3, 2, 3, 2);
  NdArray dx;
  conv2d_backward(x, layer, NdArray(y0.shape(), w), grad, &dx);

  auto wcoords = oracle::sample_coords(rng, layer.weight.size(), 36);
  compare(r, grad.weight, wcoords, oracle::numeric_gradient([&](const std::vector<double>& p) {
            Conv2d l = layer;
            l.weight = p;
            return weighted_sum(conv2d_forward(x, l).values(), w);
          }, layer.weight, wcoords));
  std::vector<std::size_t> bcoords = {0, 1, 2};
  compare(r, grad.bias, bcoords, oracle::numeric_gradient([&](const std::vector<double>& p) {
            Conv2d l = layer;
            l.bias = p;
            return weighted_sum(conv2d_forward(x, l).values(), w);
          }, layer.bias, bcoords));
  auto xcoords = oracle::sample_coords(rng, x.size(), 40);
  compare(r, dx.values(), xcoords, oracle::numeric_gradient([&](const std::vector<double>& p) {
            return weighted_sum(conv2d_forward(NdArray(x.shape(), p), layer).values(), w);
          }, x.values(), xcoords));
  return r;
}

inline Result pool(std::uint64_t seed) {
  Rng rng(seed);
  Result r{"maxpool2x2"};
  NdArray x({2, 5, 7}, randn(rng, 70));
  const auto fwd = maxpool2x2_forward(x);
  const auto w = randn(rng, fwd.out.size());
  const NdArray dx = maxpool2x2_backward(x.shape(), fwd, NdArray(fwd.out.shape(), w));
  auto coords = oracle::sample_coords(rng, x.size(), 70);
  compare(r, dx.values(), coords, oracle::numeric_gradient([&](const std::vector<double>& p) {
            return weighted_sum(maxpool2x2_forward(NdArray(x.shape(), p)).out.values(), w);
          }, x.values(), coords));
  return r;
}

inline Result fc(std::uint64_t seed) {
  Rng rng(seed);
  Result r{"fc"};
  FcLayer layer(4, 9);
  layer.init(rng);
  for (auto& b : layer.bias) b = rng.normal();
  const auto x = randn(rng, 9);
  const auto w = randn(rng, 4);
  FcLayer grad(4, 9);
  std::vector<double> dx(9);
  fc_backward(layer, x, w, grad, dx);
  auto wc = oracle::sample_coords(rng, layer.weight.size(), 36);
  compare(r, grad.weight, wc, oracle::numeric_gradient([&](const std::vector<double>& p) {
            FcLayer l = layer;
            l.weight = p;
            return weighted_sum(fc_forward(l, x), w);
          }, layer.weight, wc));
  std::vector<std::size_t> bc = {0, 1, 2, 3};
  compare(r, grad.bias, bc, oracle::numeric_gradient([&](const std::vector<double>& p) {
            FcLayer l = layer;
            l.bias = p;
            return weighted_sum(fc_forward(l, x), w);
          }, layer.bias, bc));
  auto xc = oracle::sample_coords(rng, 9, 9);
  compare(r, dx, xc, oracle::numeric_gradient([&](const std::vector<double>& p) {
            return weighted_sum(fc_forward(layer, p), w);
          }, x, xc));
  return r;
}

inline Result fc_reduce(std::uint64_t seed) {
  Rng rng(seed);
  Result r{"fc_reduce_4d"};
  FcLayer layer(1, 4);
  layer.init(rng);
  layer.bias[0] = rng.normal();
  NdArray x({2, 4, 3, 3}, randn(rng, 72));
  const NdArray y0 = fc_reduce_4d(x, layer);
  const auto w = randn(rng, y0.size());
  FcLayer grad(1, 4);
  NdArray dx;
  fc_reduce_4d_backward(x, layer, NdArray(y0.shape(), w), grad, &dx);
  std::vector<std::size_t> wc = {0, 1, 2, 3};
  compare(r, grad.weight, wc, oracle::numeric_gradient([&](const std::vector<double>& p) {
            FcLayer l = layer;
            l.weight = p;
            return weighted_sum(fc_reduce_4d(x, l).values(), w);
          }, layer.weight, wc));
  compare(r, grad.bias, {0}, oracle::numeric_gradient([&](const std::vector<double>& p) {
            FcLayer l = layer;
            l.bias = p;
            return weighted_sum(fc_reduce_4d(x, l).values(), w);
          }, layer.bias, {0}));
  auto xc = oracle::sample_coords(rng, x.size(), 40);
  compare(r, dx.values(), xc, oracle::numeric_gradient([&](const std::vector<double>& p) {
            return weighted_sum(fc_reduce_4d(NdArray(x.shape(), p), layer).values(), w);
          }, x.values(), xc));
  return r;
}

inline Result softmax_ce(std::uint64_t seed) {
  Rng rng(seed);
  Result r{"softmax_cross_entropy"};
  for (int rep = 0; rep < 25; ++rep) {
    const std::size_t k = 2 + rng.below(5);
    const auto z = randn(rng, k, 2.0);
    const std::size_t label = rng.below(k);
    const double weight = rng.uniform(0.2, 3.0);
    std::vector<double> dz(k);
    softmax_cross_entropy(z, label, weight, dz);
    auto coords = oracle::sample_coords(rng, k, k);
    compare(r, dz, coords, oracle::numeric_gradient([&](const std::vector<double>& p) {
              std::vector<double> tmp(k);
              return softmax_cross_entropy(p, label, weight, tmp);
            }, z, coords));
  }
  return r;
}

inline Result network(std::uint64_t seed, const NetworkSpec& spec, const std::string& name) {
  Rng rng(seed);
  Result r{name};
  Network net(spec, derive_seed(seed, 1));
  NdArray x(spec.input, randn(rng, shape_size(spec.input)));
  const std::size_t label = 1;
  const double weight = 1.3;
  Network grad = net.zeros_like();
  net.accumulate_gradient(x, label, weight, grad);
  const auto analytic = grad.flat_parameters();
  const auto p0 = net.flat_parameters();
  auto coords = oracle::sample_coords(rng, p0.size(), 120);
  compare(r, analytic, coords, oracle::numeric_gradient([&](const std::vector<double>& p) {
            Network n2 = net;
            n2.set_flat_parameters(p);
            Network g = n2.zeros_like();
            return n2.accumulate_gradient(x, label, weight, g);
          }, p0, coords));
  return r;
}

inline std::vector<Result> all(std::uint64_t seed) {
  NetworkSpec conv_net;
  conv_net.input = {3, 7, 6};
  conv_net.filters = 4;
  conv_net.out_len = 5;
  NetworkSpec reduce_net;
  reduce_net.input = {4, 3, 6, 5};
  reduce_net.reduce_axis1 = true;
  reduce_net.filters = 3;
  reduce_net.core_h = 2;
  reduce_net.core_w = 3;
  reduce_net.out_len = 4;
  NetworkSpec fc_net;
  fc_net.input = {6, 4};
  fc_net.conv = false;
  fc_net.out_len = 5;
  return {conv(seed),
          pool(seed + 1),
          fc(seed + 2),
          fc_reduce(seed + 3),
          softmax_ce(seed + 4),
          network(seed + 5, conv_net, "classifier (conv head)"),
          network(seed + 6, reduce_net, "classifier (axis reduction)"),
          network(seed + 7, fc_net, "encoder (dense)")};
}

}  // namespace covrank::gradcheck
