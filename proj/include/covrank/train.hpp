#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "covrank/network.hpp"

namespace covrank {

struct TrainConfig {
  std::size_t epochs = 100;
  std::size_t batch = 32;
  double lr = 0.003;
  bool class_weights = true;  // inverse-frequency weighting of the two classes
  double clip_norm = 0.0;     // rescale mean batch gradients above this L2 norm; 0 disables
  std::uint64_t seed = 0;
};

struct TrainResult {
  std::vector<double> loss_trace;  // mean weighted loss per epoch
};

/// Class weights N / (C * N_c); absent classes get weight 0.
std::vector<double> inverse_frequency_weights(std::span<const std::size_t> labels, std::size_t classes);

/// Minibatch SGD on the mean weighted cross-entropy of each batch. The
/// shuffle of epoch e draws from a stream derived from (seed, e), so training
/// is reproducible per seed. Throws Error(training) on a non-finite loss.
TrainResult train(Network& net, std::span<const NdArray> inputs, std::span<const std::size_t> labels,
                  const TrainConfig& config);

}  // namespace covrank
