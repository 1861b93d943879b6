#include "puntag/graph.hpp"

#include <Eigen/Core>

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace puntag {

namespace {

constexpr real kNegInf = -std::numeric_limits<real>::infinity();

using EMat = Eigen::Matrix<real, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using EVec = Eigen::Matrix<real, Eigen::Dynamic, 1>;

Eigen::Map<const EMat> mat_map(const Tensor& t) {
  return {t.data(), static_cast<Eigen::Index>(t.extent(0)), static_cast<Eigen::Index>(t.extent(1))};
}
Eigen::Map<EMat> mat_map(Tensor& t) {
  return {t.data(), static_cast<Eigen::Index>(t.extent(0)), static_cast<Eigen::Index>(t.extent(1))};
}
Eigen::Map<const EVec> vec_map(const Tensor& t) {
  return {t.data(), static_cast<Eigen::Index>(t.numel())};
}
Eigen::Map<EVec> vec_map(Tensor& t) {
  return {t.data(), static_cast<Eigen::Index>(t.numel())};
}

// logsumexp over a strided range; max-shifted so large inputs never overflow.
real stable_lse(const real* x, std::size_t n, std::size_t stride) {
  real m = kNegInf;
  for (std::size_t i = 0; i < n; ++i) m = std::max(m, x[i * stride]);
  if (m == kNegInf) return kNegInf;
  real s = 0;
  for (std::size_t i = 0; i < n; ++i) s += std::exp(x[i * stride] - m);
  return m + std::log(s);
}

}  // namespace

const char* op_name(int op) {
  static const char* names[] = {
      "input", "param", "gather_row", "add", "sub", "mul", "scale",
      "matmul", "matvec", "dot", "sigmoid", "tanh", "concat", "slice",
      "reshape", "add_col", "logsumexp", "logsumexp_cols", "sum"};
  return names[op];
}

void Graph::shape_error(const char* op, const Tensor& a, const Tensor& b) const {
  std::ostringstream msg;
  msg << op << ": incompatible shapes " << a.shape_str() << " and " << b.shape_str();
  throw std::runtime_error(msg.str());
}

Value Graph::push(Node node) {
  if (backward_done_) throw std::runtime_error("graph: cannot extend a graph after backward()");
  if (check_finite_) {
    const Tensor& v = node.op == Op::kParam ? node.parameter->value : node.value;
    if (!v.all_finite()) {
      throw std::runtime_error(std::string("graph: non-finite result from op ") +
                               op_name(static_cast<int>(node.op)));
    }
  }
  nodes_.push_back(std::move(node));
  return Value{static_cast<std::uint32_t>(nodes_.size() - 1)};
}

const Graph::Node& Graph::node(Value v) const {
  if (v.idx >= nodes_.size()) throw std::runtime_error("graph: invalid value handle");
  return nodes_[v.idx];
}

// Parameter leaves alias the parameter's own value/grad buffers; every
// other node owns its storage.
const Tensor& Graph::node_value(std::size_t idx) const {
  const Node& n = nodes_[idx];
  return n.op == Op::kParam ? n.parameter->value : n.value;
}

Tensor& Graph::node_grad(std::size_t idx) {
  Node& n = nodes_[idx];
  return n.op == Op::kParam ? n.parameter->grad : n.grad;
}

const Tensor& Graph::value(Value v) const {
  node(v);
  return node_value(v.idx);
}

const Tensor& Graph::grad(Value v) const {
  const Node& n = node(v);
  return n.op == Op::kParam ? n.parameter->grad : n.grad;
}

Value Graph::input(Tensor t) {
  Node n{Op::kInput, {}, std::move(t), {}};
  return push(std::move(n));
}

Value Graph::param(Parameter& p) {
  Node n{Op::kParam, {}, {}, {}};
  n.parameter = &p;
  return push(std::move(n));
}

Value Graph::gather_row(Parameter& table, std::size_t row) {
  if (table.value.rank() != 2) throw std::runtime_error("gather_row: parameter must be 2-D");
  if (row >= table.value.extent(0)) throw std::runtime_error("gather_row: row out of range");
  std::size_t cols = table.value.extent(1);
  Tensor out({cols});
  const real* src = table.value.data() + row * cols;
  for (std::size_t i = 0; i < cols; ++i) out[i] = src[i];
  Node n{Op::kGatherRow, {}, std::move(out), {}};
  n.parameter = &table;
  n.aux0 = row;
  return push(std::move(n));
}

Value Graph::add(Value a, Value b) {
  const Tensor& ta = value(a);
  const Tensor& tb = value(b);
  if (!ta.same_shape(tb)) shape_error("add", ta, tb);
  Tensor out(ta.shape());
  for (std::size_t i = 0; i < out.numel(); ++i) out[i] = ta[i] + tb[i];
  return push(Node{Op::kAdd, {a.idx, b.idx}, std::move(out), {}});
}

Value Graph::sub(Value a, Value b) {
  const Tensor& ta = value(a);
  const Tensor& tb = value(b);
  if (!ta.same_shape(tb)) shape_error("sub", ta, tb);
  Tensor out(ta.shape());
  for (std::size_t i = 0; i < out.numel(); ++i) out[i] = ta[i] - tb[i];
  return push(Node{Op::kSub, {a.idx, b.idx}, std::move(out), {}});
}

Value Graph::mul(Value a, Value b) {
  const Tensor& ta = value(a);
  const Tensor& tb = value(b);
  if (!ta.same_shape(tb)) shape_error("mul", ta, tb);
  Tensor out(ta.shape());
  for (std::size_t i = 0; i < out.numel(); ++i) out[i] = ta[i] * tb[i];
  return push(Node{Op::kMul, {a.idx, b.idx}, std::move(out), {}});
}

Value Graph::scale(Value a, real factor) {
  const Tensor& ta = value(a);
  Tensor out(ta.shape());
  for (std::size_t i = 0; i < out.numel(); ++i) out[i] = ta[i] * factor;
  Node n{Op::kScale, {a.idx}, std::move(out), {}};
  n.factor = factor;
  return push(std::move(n));
}

Value Graph::matmul(Value a, Value b) {
  const Tensor& ta = value(a);
  const Tensor& tb = value(b);
  if (ta.rank() != 2 || tb.rank() != 2 || ta.extent(1) != tb.extent(0)) {
    shape_error("matmul", ta, tb);
  }
  Tensor out({ta.extent(0), tb.extent(1)});
  mat_map(out).noalias() = mat_map(ta) * mat_map(tb);
  return push(Node{Op::kMatMul, {a.idx, b.idx}, std::move(out), {}});
}

Value Graph::matvec(Value m, Value v) {
  const Tensor& tm = value(m);
  const Tensor& tv = value(v);
  if (tm.rank() != 2 || tv.rank() != 1 || tm.extent(1) != tv.extent(0)) {
    shape_error("matvec", tm, tv);
  }
  Tensor out({tm.extent(0)});
  vec_map(out).noalias() = mat_map(tm) * vec_map(tv);
  return push(Node{Op::kMatVec, {m.idx, v.idx}, std::move(out), {}});
}

Value Graph::dot(Value a, Value b) {
  const Tensor& ta = value(a);
  const Tensor& tb = value(b);
  if (ta.rank() != 1 || tb.rank() != 1 || ta.numel() != tb.numel()) shape_error("dot", ta, tb);
  real s = 0;
  for (std::size_t i = 0; i < ta.numel(); ++i) s += ta[i] * tb[i];
  return push(Node{Op::kDot, {a.idx, b.idx}, Tensor::scalar(s), {}});
}

Value Graph::sigmoid(Value a) {
  const Tensor& ta = value(a);
  Tensor out(ta.shape());
  for (std::size_t i = 0; i < out.numel(); ++i) out[i] = real(1) / (real(1) + std::exp(-ta[i]));
  return push(Node{Op::kSigmoid, {a.idx}, std::move(out), {}});
}

Value Graph::tanh(Value a) {
  const Tensor& ta = value(a);
  Tensor out(ta.shape());
  for (std::size_t i = 0; i < out.numel(); ++i) out[i] = std::tanh(ta[i]);
  return push(Node{Op::kTanh, {a.idx}, std::move(out), {}});
}

Value Graph::concat(std::span<const Value> parts) {
  if (parts.empty()) throw std::runtime_error("concat: no inputs");
  std::size_t total = 0;
  std::vector<std::uint32_t> in;
  in.reserve(parts.size());
  for (Value p : parts) {
    const Tensor& t = value(p);
    if (t.rank() != 1) throw std::runtime_error("concat: inputs must be 1-D, got " + t.shape_str());
    total += t.numel();
    in.push_back(p.idx);
  }
  Tensor out({total});
  std::size_t off = 0;
  for (Value p : parts) {
    const Tensor& t = value(p);
    for (std::size_t i = 0; i < t.numel(); ++i) out[off + i] = t[i];
    off += t.numel();
  }
  return push(Node{Op::kConcat, std::move(in), std::move(out), {}});
}

Value Graph::slice(Value a, std::size_t start, std::size_t len) {
  const Tensor& ta = value(a);
  if (ta.rank() != 1 || start + len > ta.numel()) {
    std::ostringstream msg;
    msg << "slice: range [" << start << ", " << start + len << ") out of " << ta.shape_str();
    throw std::runtime_error(msg.str());
  }
  Tensor out({len});
  for (std::size_t i = 0; i < len; ++i) out[i] = ta[start + i];
  Node n{Op::kSlice, {a.idx}, std::move(out), {}};
  n.aux0 = start;
  n.aux1 = len;
  return push(std::move(n));
}

Value Graph::reshape(Value a, std::vector<std::size_t> shape) {
  const Tensor& ta = value(a);
  Tensor out(std::move(shape));
  if (out.numel() != ta.numel()) shape_error("reshape", ta, out);
  for (std::size_t i = 0; i < out.numel(); ++i) out[i] = ta[i];
  return push(Node{Op::kReshape, {a.idx}, std::move(out), {}});
}

Value Graph::add_col(Value m, Value v) {
  const Tensor& tm = value(m);
  const Tensor& tv = value(v);
  if (tm.rank() != 2 || tv.rank() != 1 || tm.extent(0) != tv.extent(0)) {
    shape_error("add_col", tm, tv);
  }
  Tensor out(tm.shape());
  std::size_t rows = tm.extent(0), cols = tm.extent(1);
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c) out.at(r, c) = tm.at(r, c) + tv[r];
  return push(Node{Op::kAddCol, {m.idx, v.idx}, std::move(out), {}});
}

Value Graph::logsumexp(Value a) {
  const Tensor& ta = value(a);
  if (ta.rank() != 1 || ta.numel() == 0) {
    throw std::runtime_error("logsumexp: expected non-empty 1-D input, got " + ta.shape_str());
  }
  return push(Node{Op::kLogSumExp, {a.idx}, Tensor::scalar(stable_lse(ta.data(), ta.numel(), 1)), {}});
}

Value Graph::logsumexp_cols(Value m) {
  const Tensor& tm = value(m);
  if (tm.rank() != 2 || tm.extent(0) == 0) {
    throw std::runtime_error("logsumexp_cols: expected non-empty 2-D input, got " + tm.shape_str());
  }
  std::size_t rows = tm.extent(0), cols = tm.extent(1);
  Tensor out({cols});
  for (std::size_t c = 0; c < cols; ++c) out[c] = stable_lse(tm.data() + c, rows, cols);
  return push(Node{Op::kLogSumExpCols, {m.idx}, std::move(out), {}});
}

Value Graph::sum(Value a) {
  const Tensor& ta = value(a);
  real s = 0;
  for (std::size_t i = 0; i < ta.numel(); ++i) s += ta[i];
  return push(Node{Op::kSum, {a.idx}, Tensor::scalar(s), {}});
}

void Graph::backward(Value loss) {
  if (backward_done_) throw std::runtime_error("graph: backward() may only be called once");
  if (value(loss).numel() != 1) {
    throw std::runtime_error("backward: loss must be scalar, got shape " + value(loss).shape_str());
  }
  backward_done_ = true;
  for (Node& n : nodes_) {
    if (n.op != Op::kParam) n.grad = Tensor::zeros(n.value.shape());
  }
  node_grad(loss.idx)[0] = real(1);
  // Reverse creation order is a reverse topological order: by the time a
  // node is visited every consumer has already contributed to its grad.
  for (std::size_t i = nodes_.size(); i-- > 0;) backward_step(i);
}

void Graph::backward_step(std::size_t i) {
  Node& n = nodes_[i];
  const Tensor& g = node_grad(i);
  auto in_grad = [&](std::size_t k) -> Tensor& { return node_grad(n.inputs[k]); };
  auto in_val = [&](std::size_t k) -> const Tensor& { return node_value(n.inputs[k]); };

  switch (n.op) {
    case Op::kInput:
    case Op::kParam:
      break;  // consumers already accumulated into the target buffers
    case Op::kGatherRow: {
      std::size_t cols = n.parameter->value.extent(1);
      real* dst = n.parameter->grad.data() + n.aux0 * cols;
      for (std::size_t j = 0; j < g.numel(); ++j) dst[j] += g[j];
      break;
    }
    case Op::kAdd:
      for (std::size_t j = 0; j < g.numel(); ++j) {
        in_grad(0)[j] += g[j];
        in_grad(1)[j] += g[j];
      }
      break;
    case Op::kSub:
      for (std::size_t j = 0; j < g.numel(); ++j) {
        in_grad(0)[j] += g[j];
        in_grad(1)[j] -= g[j];
      }
      break;
    case Op::kMul:
      for (std::size_t j = 0; j < g.numel(); ++j) {
        in_grad(0)[j] += g[j] * in_val(1)[j];
        in_grad(1)[j] += g[j] * in_val(0)[j];
      }
      break;
    case Op::kScale:
      for (std::size_t j = 0; j < g.numel(); ++j) in_grad(0)[j] += g[j] * n.factor;
      break;
    case Op::kMatMul:
      mat_map(in_grad(0)) += mat_map(g) * mat_map(in_val(1)).transpose();
      mat_map(in_grad(1)) += mat_map(in_val(0)).transpose() * mat_map(g);
      break;
    case Op::kMatVec:
      mat_map(in_grad(0)) += vec_map(g) * vec_map(in_val(1)).transpose();
      vec_map(in_grad(1)) += mat_map(in_val(0)).transpose() * vec_map(g);
      break;
    case Op::kDot:
      for (std::size_t j = 0; j < in_val(0).numel(); ++j) {
        in_grad(0)[j] += g[0] * in_val(1)[j];
        in_grad(1)[j] += g[0] * in_val(0)[j];
      }
      break;
    case Op::kSigmoid:
      for (std::size_t j = 0; j < g.numel(); ++j) {
        real y = n.value[j];
        in_grad(0)[j] += g[j] * y * (real(1) - y);
      }
      break;
    case Op::kTanh:
      for (std::size_t j = 0; j < g.numel(); ++j) {
        real y = n.value[j];
        in_grad(0)[j] += g[j] * (real(1) - y * y);
      }
      break;
    case Op::kConcat: {
      std::size_t off = 0;
      for (std::size_t k = 0; k < n.inputs.size(); ++k) {
        Tensor& ig = in_grad(k);
        for (std::size_t j = 0; j < ig.numel(); ++j) ig[j] += g[off + j];
        off += ig.numel();
      }
      break;
    }
    case Op::kSlice:
      for (std::size_t j = 0; j < n.aux1; ++j) in_grad(0)[n.aux0 + j] += g[j];
      break;
    case Op::kReshape:
      for (std::size_t j = 0; j < g.numel(); ++j) in_grad(0)[j] += g[j];
      break;
    case Op::kAddCol: {
      std::size_t rows = n.value.extent(0), cols = n.value.extent(1);
      Tensor& gm = in_grad(0);
      Tensor& gv = in_grad(1);
      for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cols; ++c) {
          gm.at(r, c) += g.at(r, c);
          gv[r] += g.at(r, c);
        }
      break;
    }
    case Op::kLogSumExp: {
      // d lse / d x_j = exp(x_j - lse)
      real lse = n.value[0];
      if (lse == kNegInf) break;
      const Tensor& x = in_val(0);
      for (std::size_t j = 0; j < x.numel(); ++j) in_grad(0)[j] += g[0] * std::exp(x[j] - lse);
      break;
    }
    case Op::kLogSumExpCols: {
      const Tensor& x = in_val(0);
      std::size_t rows = x.extent(0), cols = x.extent(1);
      for (std::size_t c = 0; c < cols; ++c) {
        real lse = n.value[c];
        if (lse == kNegInf) continue;
        for (std::size_t r = 0; r < rows; ++r) {
          in_grad(0).at(r, c) += g[c] * std::exp(x.at(r, c) - lse);
        }
      }
      break;
    }
    case Op::kSum:
      for (std::size_t j = 0; j < in_val(0).numel(); ++j) in_grad(0)[j] += g[0];
      break;
  }
}

}  // namespace puntag
