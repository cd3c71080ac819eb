#include "hgctr/tensor.hpp"

#include <cmath>
#include <sstream>

#include "hgctr/errors.hpp"

namespace hgctr {

namespace {

std::size_t shape_product(const std::vector<std::size_t>& shape) {
  std::size_t n = 1;
  for (std::size_t s : shape) n *= s;
  return n;
}

}  // namespace

Tensor::Tensor(std::vector<std::size_t> shape, std::vector<double> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
  if (shape_.empty()) {
    throw ContractError("Tensor: rank-0 shapes are not supported");
  }
  if (shape_product(shape_) != data_.size()) {
    throw ContractError("Tensor: shape " + shape_string(shape_) + " does not match " +
                        std::to_string(data_.size()) + " elements");
  }
}

Tensor Tensor::zeros(std::vector<std::size_t> shape) {
  std::size_t n = shape_product(shape);
  return Tensor(std::move(shape), std::vector<double>(n, 0.0));
}

Tensor Tensor::full(std::vector<std::size_t> shape, double value) {
  std::size_t n = shape_product(shape);
  return Tensor(std::move(shape), std::vector<double>(n, value));
}

Tensor Tensor::scalar(double value) { return Tensor({1}, {value}); }

Tensor Tensor::vector(std::vector<double> values) {
  std::size_t n = values.size();
  return Tensor({n}, std::move(values));
}

Tensor Tensor::matrix(std::size_t rows, std::size_t cols, std::vector<double> values) {
  return Tensor({rows, cols}, std::move(values));
}

std::size_t Tensor::rows() const {
  if (shape_.size() != 2) {
    throw ContractError("Tensor::rows: tensor has rank " + std::to_string(shape_.size()));
  }
  return shape_[0];
}

std::size_t Tensor::cols() const {
  if (shape_.size() != 2) {
    throw ContractError("Tensor::cols: tensor has rank " + std::to_string(shape_.size()));
  }
  return shape_[1];
}

double Tensor::item() const {
  if (data_.size() != 1) {
    throw ContractError("Tensor::item: tensor has " + std::to_string(data_.size()) +
                        " elements, expected 1");
  }
  return data_[0];
}

bool Tensor::all_finite() const {
  for (double v : data_) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

std::string shape_string(const std::vector<std::size_t>& shape) {
  std::ostringstream os;
  os << "[";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i > 0) os << ", ";
    os << shape[i];
  }
  os << "]";
  return os.str();
}

}  // namespace hgctr
