#include "covrank/network.hpp"

#include <algorithm>

#include "covrank/error.hpp"
#include "covrank/rng.hpp"

namespace covrank {

Network::Network(NetworkSpec spec, std::uint64_t seed) : spec_(std::move(spec)) {
  Rng rng(seed);
  Shape shape = spec_.input;
  if (spec_.reduce_axis1) {
    if (shape.size() != 4) fail(ErrorKind::config, "network: axis reduction needs a 4-D input");
    reduce_ = FcLayer(1, shape[1]);
    reduce_.init(rng);
    shape = {shape[0], shape[2], shape[3]};
  }
  std::size_t features = shape_size(shape);
  if (spec_.conv) {
    if (shape.size() != 3) fail(ErrorKind::config, "network: convolution needs a (c,H,W) input");
    spec_.core_h = std::min(spec_.core_h, shape[1]);
    spec_.core_w = std::min(spec_.core_w, shape[2]);
    if (spec_.filters == 0 || spec_.core_h == 0 || spec_.core_w == 0) {
      fail(ErrorKind::config, "network: empty convolution");
    }
    conv_ = Conv2d(spec_.filters, shape[0], spec_.core_h, spec_.core_w);
    conv_.init(rng);
    const std::size_t ho = shape[1] - spec_.core_h + 1, wo = shape[2] - spec_.core_w + 1;
    features = spec_.filters * ((ho + 1) / 2) * ((wo + 1) / 2);
  }
  if (spec_.out_len == 0 || (!spec_.head && spec_.out_len < 2)) {
    fail(ErrorKind::config, "network: output length too small");
  }
  fc_ = FcLayer(spec_.out_len, features);
  fc_.init(rng);
  if (spec_.head) {
    head_ = FcLayer(2, spec_.out_len);
    head_.init(rng);
  }
}

Network::Trace Network::forward(const NdArray& x) const {
  if (x.shape() != spec_.input) {
    fail(ErrorKind::training, "network: input " + shape_string(x.shape()) + " but expected " +
                                  shape_string(spec_.input));
  }
  Trace t;
  t.conv_input = spec_.reduce_axis1 ? fc_reduce_4d(x, reduce_) : x;
  if (spec_.conv) {
    t.activation = conv2d_forward(t.conv_input, conv_);
    relu_inplace(t.activation);
    t.pool = maxpool2x2_forward(t.activation);
    t.features = t.pool.out.values();
  } else {
    t.features = t.conv_input.values();
  }
  t.encoding = fc_forward(fc_, t.features);
  t.logits = spec_.head ? fc_forward(head_, t.encoding) : t.encoding;
  return t;
}

std::vector<double> Network::probabilities(const NdArray& x) const { return softmax(forward(x).logits); }

std::vector<NdArray> Network::feature_maps(const NdArray& x) const {
  std::vector<NdArray> maps;
  if (!spec_.conv) return maps;
  const Trace t = forward(x);
  const std::size_t k = t.activation.dim(0), h = t.activation.dim(1), w = t.activation.dim(2);
  for (std::size_t f = 0; f < k; ++f) {
    std::vector<double> plane(t.activation.values().begin() + f * h * w,
                              t.activation.values().begin() + (f + 1) * h * w);
    maps.emplace_back(Shape{h, w}, std::move(plane));
  }
  return maps;
}

double Network::accumulate_gradient(const NdArray& x, std::size_t label, double weight, Network& grad) const {
  const Trace t = forward(x);
  std::vector<double> dlogits(t.logits.size());
  const double loss = softmax_cross_entropy(t.logits, label, weight, dlogits);

  std::vector<double> dencoding;
  if (spec_.head) {
    dencoding.assign(spec_.out_len, 0.0);
    fc_backward(head_, t.encoding, dlogits, grad.head_, dencoding);
  } else {
    dencoding = dlogits;
  }

  const bool need_input_grad = spec_.conv || spec_.reduce_axis1;
  std::vector<double> dfeatures(need_input_grad ? t.features.size() : 0);
  fc_backward(fc_, t.features, dencoding, grad.fc_, dfeatures);
  if (!need_input_grad) return loss;

  NdArray dconv_input;
  if (spec_.conv) {
    NdArray dpool(t.pool.out.shape(), std::move(dfeatures));
    NdArray dact = maxpool2x2_backward(t.activation.shape(), t.pool, dpool);
    for (std::size_t i = 0; i < dact.size(); ++i) {
      if (t.activation[i] <= 0.0) dact[i] = 0.0;
    }
    conv2d_backward(t.conv_input, conv_, dact, grad.conv_, spec_.reduce_axis1 ? &dconv_input : nullptr);
  } else {
    dconv_input = NdArray(t.conv_input.shape(), std::move(dfeatures));
  }
  if (spec_.reduce_axis1) fc_reduce_4d_backward(x, reduce_, dconv_input, grad.reduce_, nullptr);
  return loss;
}

Network Network::zeros_like() const {
  Network g = *this;
  for (auto block : g.blocks()) std::fill(block.begin(), block.end(), 0.0);
  return g;
}

std::vector<std::span<double>> Network::blocks() {
  std::vector<std::span<double>> out;
  if (spec_.reduce_axis1) {
    out.emplace_back(reduce_.weight);
    out.emplace_back(reduce_.bias);
  }
  if (spec_.conv) {
    out.emplace_back(conv_.weight);
    out.emplace_back(conv_.bias);
  }
  out.emplace_back(fc_.weight);
  out.emplace_back(fc_.bias);
  if (spec_.head) {
    out.emplace_back(head_.weight);
    out.emplace_back(head_.bias);
  }
  return out;
}

std::vector<std::span<const double>> Network::blocks() const {
  std::vector<std::span<const double>> out;
  for (auto b : const_cast<Network*>(this)->blocks()) out.emplace_back(b);
  return out;
}

std::size_t Network::parameter_count() const {
  std::size_t n = 0;
  for (auto b : blocks()) n += b.size();
  return n;
}

std::vector<double> Network::flat_parameters() const {
  std::vector<double> flat;
  flat.reserve(parameter_count());
  for (auto b : blocks()) flat.insert(flat.end(), b.begin(), b.end());
  return flat;
}

void Network::set_flat_parameters(std::span<const double> values) {
  if (values.size() != parameter_count()) {
    fail(ErrorKind::training, "network: expected " + std::to_string(parameter_count()) + " parameters, got " +
                                  std::to_string(values.size()));
  }
  std::size_t off = 0;
  for (auto b : blocks()) {
    std::copy_n(values.begin() + off, b.size(), b.begin());
    off += b.size();
  }
}

}  // namespace covrank
