#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace ads::nn {

using Shape = std::vector<std::size_t>;

std::size_t shape_size(const Shape& shape);
std::string shape_string(const Shape& shape);

// Dense row-major array of doubles. Batched tensors carry the batch size as
// their leading dimension.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(Shape shape, double fill = 0.0);
  Tensor(Shape shape, std::vector<double> values);

  const Shape& shape() const { return shape_; }
  std::size_t rank() const { return shape_.size(); }
  std::size_t dim(std::size_t i) const { return shape_[i]; }
  std::size_t size() const { return values_.size(); }
  bool empty() const { return values_.empty(); }

  double* data() { return values_.data(); }
  const double* data() const { return values_.data(); }
  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }
  double& operator[](std::size_t i) { return values_[i]; }
  double operator[](std::size_t i) const { return values_[i]; }

  std::size_t batch() const { return shape_.empty() ? 0 : shape_[0]; }
  std::size_t row_size() const { return batch() == 0 ? 0 : values_.size() / batch(); }
  std::span<const double> row(std::size_t b) const { return {values_.data() + b * row_size(), row_size()}; }
  std::span<double> row(std::size_t b) { return {values_.data() + b * row_size(), row_size()}; }

  void fill(double v);
  // Same values, new shape of equal size. Throws ShapeMismatch otherwise.
  Tensor reshaped(Shape shape) const&;
  Tensor reshaped(Shape shape) &&;

  // Rows [begin, end) of a batched tensor.
  Tensor slice_rows(std::size_t begin, std::size_t end) const;
  static Tensor concat_rows(std::span<const Tensor* const> parts);

  friend bool operator==(const Tensor&, const Tensor&) = default;

 private:
  Shape shape_;
  std::vector<double> values_;
};

// Trainable parameter with its gradient accumulator; grad always has the shape
// of value.
struct ParamTensor {
  std::string name;
  Tensor value;
  Tensor grad;

  ParamTensor() = default;
  ParamTensor(std::string n, Shape shape) : name(std::move(n)), value(shape), grad(shape) {}
  void zero_grad() { grad.fill(0.0); }
};

}  // namespace ads::nn
