#include "covrank/train.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "covrank/error.hpp"
#include "covrank/rng.hpp"
#include "covrank/simd.hpp"

namespace covrank {

std::vector<double> inverse_frequency_weights(std::span<const std::size_t> labels, std::size_t classes) {
  std::vector<double> counts(classes, 0.0);
  for (std::size_t l : labels) counts.at(l) += 1.0;
  std::size_t present = 0;
  for (double c : counts) present += c > 0.0;
  std::vector<double> w(classes, 0.0);
  for (std::size_t c = 0; c < classes; ++c) {
    if (counts[c] > 0.0) w[c] = static_cast<double>(labels.size()) / (static_cast<double>(present) * counts[c]);
  }
  return w;
}

TrainResult train(Network& net, std::span<const NdArray> inputs, std::span<const std::size_t> labels,
                  const TrainConfig& config) {
  if (inputs.empty()) fail(ErrorKind::training, "train: empty dataset");
  if (inputs.size() != labels.size()) fail(ErrorKind::training, "train: inputs and labels differ in length");
  const std::size_t classes = net.classes();
  std::vector<double> weights(classes, 1.0);
  if (config.class_weights) weights = inverse_frequency_weights(labels, classes);

  const std::size_t batch = std::max<std::size_t>(1, config.batch);
  std::vector<std::size_t> order(inputs.size());
  TrainResult result;
  result.loss_trace.reserve(config.epochs);

  Network grad = net.zeros_like();
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(derive_seed(config.seed, epoch));
    rng.shuffle(order);

    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < order.size(); start += batch) {
      const std::size_t end = std::min(order.size(), start + batch);
      for (auto b : grad.blocks()) std::fill(b.begin(), b.end(), 0.0);
      double batch_loss = 0.0;
      for (std::size_t i = start; i < end; ++i) {
        const std::size_t s = order[i];
        batch_loss += net.accumulate_gradient(inputs[s], labels[s], weights[labels[s]], grad);
      }
      if (!std::isfinite(batch_loss)) {
        std::ostringstream msg;
        msg << "train: non-finite loss " << batch_loss << " at epoch " << epoch << ", batch starting at " << start
            << " (lr=" << config.lr << ")";
        fail(ErrorKind::training, msg.str());
      }
      epoch_loss += batch_loss;
      if (config.lr != 0.0) {
        auto params = net.blocks();
        auto grads = grad.blocks();
        double step = -config.lr / static_cast<double>(end - start);
        if (config.clip_norm > 0.0) {
          double sq = 0.0;
          for (auto g : grads) sq += simd::dot(g, g);
          const double norm = std::sqrt(sq) / static_cast<double>(end - start);
          if (norm > config.clip_norm) step *= config.clip_norm / norm;
        }
        for (std::size_t b = 0; b < params.size(); ++b) simd::axpy(step, grads[b], params[b]);
      }
    }
    result.loss_trace.push_back(epoch_loss / static_cast<double>(order.size()));
  }
  return result;
}

}  // namespace covrank
