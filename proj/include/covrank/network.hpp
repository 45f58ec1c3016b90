#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "covrank/ndarray.hpp"
#include "covrank/nn.hpp"

namespace covrank {

/// Layer layout of a ConvNet:
///   [fc over axis 1 of a 4-D input] -> [conv -> ReLU -> 2x2 max-pool] -> fc(out_len) -> [fc(out_len -> 2)]
/// Bracketed stages are optional. The out_len vector is the encoding a
/// channel encoder hands to later fusion; logits come from the head when
/// present, otherwise from the out_len layer itself.
struct NetworkSpec {
  Shape input;
  bool reduce_axis1 = false;
  bool conv = true;
  std::size_t filters = 8;
  std::size_t core_h = 3;
  std::size_t core_w = 3;
  std::size_t out_len = 16;
  bool head = true;

  bool operator==(const NetworkSpec&) const = default;
};

class Network {
 public:
  Network() = default;
  Network(NetworkSpec spec, std::uint64_t seed);

  struct Trace {
    NdArray conv_input;
    NdArray activation;  // post-ReLU conv output
    PoolResult pool;
    std::vector<double> features;  // input to the out_len layer
    std::vector<double> encoding;  // out_len output
    std::vector<double> logits;
  };

  Trace forward(const NdArray& x) const;
  std::vector<double> encode(const NdArray& x) const { return forward(x).encoding; }
  std::vector<double> probabilities(const NdArray& x) const;

  /// Post-ReLU convolution outputs, one (H-h+1, W-w+1) map per filter.
  std::vector<NdArray> feature_maps(const NdArray& x) const;

  /// Adds the gradient of the weighted cross-entropy loss for one example to
  /// grad (a zeros_like() accumulator) and returns the loss.
  double accumulate_gradient(const NdArray& x, std::size_t label, double weight, Network& grad) const;

  Network zeros_like() const;

  const NetworkSpec& spec() const { return spec_; }
  std::size_t classes() const { return spec_.head ? 2 : spec_.out_len; }

  std::vector<std::span<double>> blocks();
  std::vector<std::span<const double>> blocks() const;
  std::size_t parameter_count() const;
  std::vector<double> flat_parameters() const;
  void set_flat_parameters(std::span<const double> values);

  const Conv2d& conv() const { return conv_; }

 private:
  NetworkSpec spec_;
  FcLayer reduce_;
  Conv2d conv_;
  FcLayer fc_;
  FcLayer head_;
};

}  // namespace covrank
