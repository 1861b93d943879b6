#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "puntag/tensor.hpp"

namespace puntag {

// A named trainable tensor with an accumulated gradient buffer.
struct Parameter {
  std::string name;
  Tensor value;
  Tensor grad;

  Parameter() = default;
  Parameter(std::string name_, Tensor value_)
      : name(std::move(name_)), value(std::move(value_)), grad(Tensor::zeros(value.shape())) {}

  void zero_grad() { grad.fill(real(0)); }
};

// Handle to a node owned by a Graph.
struct Value {
  std::uint32_t idx = UINT32_MAX;
};

// Reverse-mode tape. Operations compute their result eagerly and record
// an edge; backward() sweeps the tape once in reverse creation order and
// accumulates into Parameter::grad. A graph is single-use: one forward
// construction phase, at most one backward() call.
class Graph {
 public:
  Value input(Tensor t);               // constant leaf, no gradient
  Value param(Parameter& p);           // trainable leaf
  Value gather_row(Parameter& table, std::size_t row);  // row of a 2-D parameter

  Value add(Value a, Value b);         // elementwise, same shape
  Value sub(Value a, Value b);
  Value mul(Value a, Value b);         // elementwise
  Value scale(Value a, real factor);
  Value matmul(Value a, Value b);      // (m x k) * (k x n)
  Value matvec(Value m, Value v);      // (m x k) * (k)
  Value dot(Value a, Value b);         // (k) . (k) -> (1)
  Value sigmoid(Value a);
  Value tanh(Value a);
  Value concat(std::span<const Value> parts);  // 1-D concatenation
  Value slice(Value a, std::size_t start, std::size_t len);  // 1-D
  Value reshape(Value a, std::vector<std::size_t> shape);
  Value add_col(Value m, Value v);     // adds v (r) to every column of m (r x c)
  Value logsumexp(Value a);            // 1-D -> (1), overflow-safe
  Value logsumexp_cols(Value m);       // (r x c) -> (c), over rows per column
  Value sum(Value a);                  // -> (1)

  const Tensor& value(Value v) const;
  const Tensor& grad(Value v) const;   // valid after backward()

  // Reverse accumulation from a scalar loss into every reachable
  // parameter. A second call on the same graph is an error.
  void backward(Value loss);

  std::size_t size() const { return nodes_.size(); }
  void set_check_finite(bool on) { check_finite_ = on; }

 private:
  enum class Op : std::uint8_t {
    kInput, kParam, kGatherRow,
    kAdd, kSub, kMul, kScale,
    kMatMul, kMatVec, kDot,
    kSigmoid, kTanh,
    kConcat, kSlice, kReshape,
    kAddCol, kLogSumExp, kLogSumExpCols, kSum,
  };

  struct Node {
    Op op;
    std::vector<std::uint32_t> inputs;
    Tensor value;
    Tensor grad;
    Parameter* parameter = nullptr;  // kParam / kGatherRow
    std::size_t aux0 = 0;            // slice start / gather row
    std::size_t aux1 = 0;            // slice length
    real factor = real(0);           // kScale
  };

  Value push(Node node);
  const Node& node(Value v) const;
  const Tensor& node_value(std::size_t idx) const;
  Tensor& node_grad(std::size_t idx);
  void backward_step(std::size_t i);
  [[noreturn]] void shape_error(const char* op, const Tensor& a, const Tensor& b) const;

  std::vector<Node> nodes_;
  bool backward_done_ = false;
  bool check_finite_ = false;
};

const char* op_name(int op);

}  // namespace puntag
