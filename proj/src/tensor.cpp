#include "puntag/tensor.hpp"

#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace puntag {

namespace {

std::size_t shape_product(const std::vector<std::size_t>& shape) {
  std::size_t n = 1;
  for (std::size_t e : shape) n *= e;
  return n;
}

}  // namespace

Tensor::Tensor(std::vector<std::size_t> shape)
    : shape_(std::move(shape)), data_(shape_product(shape_), real(0)) {}

Tensor::Tensor(std::vector<std::size_t> shape, std::vector<real> values)
    : shape_(std::move(shape)), data_(std::move(values)) {
  if (shape_product(shape_) != data_.size()) {
    std::ostringstream msg;
    msg << "tensor: shape " << shape_str() << " does not match " << data_.size() << " values";
    throw std::runtime_error(msg.str());
  }
}

Tensor Tensor::zeros(std::vector<std::size_t> shape) { return Tensor(std::move(shape)); }

Tensor Tensor::full(std::vector<std::size_t> shape, real value) {
  Tensor t(std::move(shape));
  t.fill(value);
  return t;
}

Tensor Tensor::scalar(real value) { return Tensor({1}, {value}); }

Tensor Tensor::vec(std::vector<real> values) {
  std::size_t n = values.size();
  return Tensor({n}, std::move(values));
}

std::size_t Tensor::extent(std::size_t axis) const {
  if (axis >= shape_.size()) throw std::runtime_error("tensor: axis out of range");
  return shape_[axis];
}

real& Tensor::at(std::size_t row, std::size_t col) {
  return data_[row * shape_[1] + col];
}

real Tensor::at(std::size_t row, std::size_t col) const {
  return data_[row * shape_[1] + col];
}

void Tensor::fill(real value) {
  for (real& x : data_) x = value;
}

bool Tensor::all_finite() const {
  for (real x : data_) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

std::string Tensor::shape_str() const {
  if (shape_.empty()) return "scalar";
  std::ostringstream os;
  for (std::size_t i = 0; i < shape_.size(); ++i) {
    if (i > 0) os << 'x';
    os << shape_[i];
  }
  return os.str();
}

}  // namespace puntag
