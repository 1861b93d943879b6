#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace puntag {

#ifdef PUNTAG_SINGLE_PRECISION
using real = float;
#else
using real = double;
#endif

// Dense row-major tensor. Shape product always equals data length.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(std::vector<std::size_t> shape);
  Tensor(std::vector<std::size_t> shape, std::vector<real> values);

  static Tensor zeros(std::vector<std::size_t> shape);
  static Tensor full(std::vector<std::size_t> shape, real value);
  static Tensor scalar(real value);                // shape {1}
  static Tensor vec(std::vector<real> values);     // shape {n}

  const std::vector<std::size_t>& shape() const { return shape_; }
  std::size_t rank() const { return shape_.size(); }
  std::size_t numel() const { return data_.size(); }
  std::size_t extent(std::size_t axis) const;
  bool same_shape(const Tensor& other) const { return shape_ == other.shape_; }

  real* data() { return data_.data(); }
  const real* data() const { return data_.data(); }
  real& operator[](std::size_t i) { return data_[i]; }
  real operator[](std::size_t i) const { return data_[i]; }
  // 2-D access
  real& at(std::size_t row, std::size_t col);
  real at(std::size_t row, std::size_t col) const;

  void fill(real value);
  bool all_finite() const;

  std::string shape_str() const;  // e.g. "2x3"

 private:
  std::vector<std::size_t> shape_;
  std::vector<real> data_;
};

}  // namespace puntag
