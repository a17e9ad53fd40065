#include "ads/nn/tensor.hpp"

#include <algorithm>
#include <numeric>

#include "ads/error.hpp"

namespace ads::nn {

std::size_t shape_size(const Shape& shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
}

std::string shape_string(const Shape& shape) {
  std::string s = "[";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) s += ", ";
    s += std::to_string(shape[i]);
  }
  return s + "]";
}

Tensor::Tensor(Shape shape, double fill) : shape_(std::move(shape)), values_(shape_size(shape_), fill) {}

Tensor::Tensor(Shape shape, std::vector<double> values) : shape_(std::move(shape)), values_(std::move(values)) {
  if (values_.size() != shape_size(shape_)) {
    throw Error(ErrorCode::ShapeMismatch, "tensor of shape " + shape_string(shape_) + " given " +
                                              std::to_string(values_.size()) + " values");
  }
}

void Tensor::fill(double v) { std::fill(values_.begin(), values_.end(), v); }

Tensor Tensor::reshaped(Shape shape) const& {
  Tensor copy = *this;
  return std::move(copy).reshaped(std::move(shape));
}

Tensor Tensor::reshaped(Shape shape) && {
  if (shape_size(shape) != values_.size()) {
    throw Error(ErrorCode::ShapeMismatch, "cannot reshape " + shape_string(shape_) + " to " + shape_string(shape));
  }
  shape_ = std::move(shape);
  return std::move(*this);
}

Tensor Tensor::slice_rows(std::size_t begin, std::size_t end) const {
  if (begin > end || end > batch()) throw Error(ErrorCode::ShapeMismatch, "row slice out of range");
  Shape shape = shape_;
  shape[0] = end - begin;
  const auto rs = row_size();
  return Tensor(std::move(shape), std::vector<double>(values_.begin() + static_cast<std::ptrdiff_t>(begin * rs),
                                                      values_.begin() + static_cast<std::ptrdiff_t>(end * rs)));
}

Tensor Tensor::concat_rows(std::span<const Tensor* const> parts) {
  if (parts.empty()) return {};
  Shape shape = parts.front()->shape();
  shape[0] = 0;
  std::vector<double> values;
  for (const auto* p : parts) {
    if (p->rank() != shape.size() || !std::equal(p->shape().begin() + 1, p->shape().end(), shape.begin() + 1)) {
      throw Error(ErrorCode::ShapeMismatch, "concat_rows: trailing shapes differ");
    }
    shape[0] += p->batch();
    values.insert(values.end(), p->values().begin(), p->values().end());
  }
  return Tensor(std::move(shape), std::move(values));
}

}  // namespace ads::nn
