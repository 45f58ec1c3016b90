#include "covrank/ndarray.hpp"

#include <cmath>
#include <numeric>

#include "covrank/error.hpp"

namespace covrank {

std::size_t shape_size(const Shape& s) {
  return std::accumulate(s.begin(), s.end(), std::size_t{1}, std::multiplies<>());
}

std::string shape_string(const Shape& s) {
  std::string out = "[";
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(s[i]);
  }
  return out + "]";
}

NdArray::NdArray(Shape shape, double fill) : shape_(std::move(shape)), data_(shape_size(shape_), fill) {}

NdArray::NdArray(Shape shape, std::vector<double> data) : shape_(std::move(shape)), data_(std::move(data)) {
  if (shape_size(shape_) != data_.size()) {
    fail(ErrorKind::data, "NdArray: shape " + shape_string(shape_) + " does not match " +
                              std::to_string(data_.size()) + " values");
  }
}

NdArray NdArray::reshaped(Shape shape) const { return NdArray(std::move(shape), data_); }

NdArray NdArray::permuted(const std::vector<std::size_t>& perm) const {
  const std::size_t r = rank();
  if (perm.size() != r) fail(ErrorKind::data, "permuted: rank mismatch");
  Shape out_shape(r);
  for (std::size_t i = 0; i < r; ++i) out_shape[i] = shape_.at(perm[i]);

  std::vector<std::size_t> in_stride(r, 1);
  for (std::size_t i = r; i-- > 1;) in_stride[i - 1] = in_stride[i] * shape_[i];

  NdArray out(out_shape);
  std::vector<std::size_t> idx(r, 0);
  for (std::size_t flat = 0; flat < out.size(); ++flat) {
    std::size_t src = 0;
    for (std::size_t i = 0; i < r; ++i) src += idx[i] * in_stride[perm[i]];
    out.data_[flat] = data_[src];
    for (std::size_t i = r; i-- > 0;) {
      if (++idx[i] < out_shape[i]) break;
      idx[i] = 0;
    }
  }
  return out;
}

bool NdArray::all_finite() const {
  for (double v : data_) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

void standardize(NdArray& x) {
  if (x.empty()) return;
  const double n = static_cast<double>(x.size());
  double mean = 0.0;
  for (double v : x.values()) mean += v;
  mean /= n;
  double var = 0.0;
  for (double v : x.values()) var += (v - mean) * (v - mean);
  var /= n;
  const double sd = std::sqrt(var);
  for (double& v : x.values()) {
    v -= mean;
    if (sd > 1e-12) v /= sd;
  }
}

}  // namespace covrank
