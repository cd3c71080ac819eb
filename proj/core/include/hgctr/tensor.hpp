#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace hgctr {

/// Dense row-major tensor of doubles. Rank 1 and 2 are all the model needs;
/// a scalar is a rank-1 tensor of size 1.
class Tensor {
 public:
  Tensor() = default;
  Tensor(std::vector<std::size_t> shape, std::vector<double> data);

  static Tensor zeros(std::vector<std::size_t> shape);
  static Tensor full(std::vector<std::size_t> shape, double value);
  static Tensor scalar(double value);
  static Tensor vector(std::vector<double> values);
  static Tensor matrix(std::size_t rows, std::size_t cols, std::vector<double> values);

  const std::vector<std::size_t>& shape() const { return shape_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  // Rank-2 accessors; throw ContractError on other ranks.
  std::size_t rows() const;
  std::size_t cols() const;

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }
  std::span<const double> values() const { return data_; }
  std::vector<double> to_vector() const { return data_; }

  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }

  /// Value of a single-element tensor.
  double item() const;
  bool is_scalar() const { return data_.size() == 1; }

  bool all_finite() const;
  bool same_shape(const Tensor& other) const { return shape_ == other.shape_; }
  bool operator==(const Tensor& other) const {
    return shape_ == other.shape_ && data_ == other.data_;
  }

 private:
  std::vector<std::size_t> shape_;
  std::vector<double> data_;
};

std::string shape_string(const std::vector<std::size_t>& shape);

}  // namespace hgctr
