#include "doctest.h"

#include <cmath>
#include <cstring>
#include <limits>
#include <random>
#include <stdexcept>

#include "oracles.hpp"
#include "puntag/graph.hpp"
#include "puntag/tensor.hpp"

using namespace puntag;

namespace {

Tensor random_tensor(std::vector<std::size_t> shape, std::mt19937_64& rng, real lo = -1, real hi = 1) {
  Tensor t(std::move(shape));
  std::uniform_real_distribution<real> dist(lo, hi);
  for (std::size_t i = 0; i < t.numel(); ++i) t[i] = dist(rng);
  return t;
}

}  // namespace

TEST_CASE("forward shapes and analytic values") {
  Graph g;
  Value a = g.input(Tensor({2, 3}, {1, 2, 3, 4, 5, 6}));
  Value b = g.input(Tensor({3, 1}, {1, 0, 1}));
  Value c = g.matmul(a, b);
  CHECK(g.value(c).shape() == std::vector<std::size_t>{2, 1});
  CHECK(g.value(c)[0] == doctest::Approx(4));
  CHECK(g.value(c)[1] == doctest::Approx(10));

  Value s = g.sigmoid(g.input(Tensor::scalar(0)));
  CHECK(g.value(s)[0] == doctest::Approx(0.5));

  Value l = g.logsumexp(g.input(Tensor::vec({0, 0, 0})));
  CHECK(g.value(l)[0] == doctest::Approx(std::log(3.0)));
}

TEST_CASE("logsumexp is overflow-safe") {
  Graph g;
  Value l = g.logsumexp(g.input(Tensor::vec({1000, 1000})));
  CHECK(g.value(l)[0] == 1000 + std::log(real(2)));
  CHECK(std::isfinite(g.value(l)[0]));
}

TEST_CASE("shape mismatches name the op") {
  Graph g;
  Value a = g.input(Tensor({2, 3}));
  Value b = g.input(Tensor({2, 3}));
  CHECK_THROWS_WITH_AS(g.matmul(a, b), doctest::Contains("matmul"), std::runtime_error);
  Value v = g.input(Tensor::vec({1, 2}));
  CHECK_THROWS_WITH_AS(g.add(a, v), doctest::Contains("add"), std::runtime_error);
  CHECK_THROWS_AS(g.slice(v, 1, 2), std::runtime_error);
}

TEST_CASE("backward on sum gives ones") {
  Parameter p("p", Tensor::vec({3, -1, 2}));
  Graph g;
  Value loss = g.sum(g.param(p));
  g.backward(loss);
  CHECK(p.grad[0] == 1);
  CHECK(p.grad[1] == 1);
  CHECK(p.grad[2] == 1);
}

TEST_CASE("chain rule through sigmoid") {
  // loss = sigmoid(w) * x at w=0, x=2: d/dw = 0.25 * 2 = 0.5
  Parameter w("w", Tensor::vec({0}));
  Graph g;
  Value loss = g.sum(g.mul(g.sigmoid(g.param(w)), g.input(Tensor::vec({2}))));
  g.backward(loss);
  CHECK(w.grad[0] == doctest::Approx(0.5));
}

TEST_CASE("backward guards") {
  Graph g;
  Value v = g.input(Tensor::vec({1, 2}));
  CHECK_THROWS_WITH_AS(g.backward(v), doctest::Contains("scalar"), std::runtime_error);

  Parameter p("p", Tensor::vec({1.0}));
  Graph g2;
  Value loss = g2.sum(g2.param(p));
  g2.backward(loss);
  CHECK_THROWS_AS(g2.backward(loss), std::runtime_error);
}

TEST_CASE("checked mode flags non-finite results") {
  Graph g;
  g.set_check_finite(true);
  Value big = g.input(Tensor::vec({710, 710}));
  // exp overflows to inf inside an unshifted sum; logsumexp must stay finite
  CHECK_NOTHROW(g.logsumexp(big));
  Value zero = g.input(Tensor::vec({0}));
  // 0 * inf = nan surfaces in the op that produced it
  CHECK_THROWS_WITH_AS(g.scale(zero, std::numeric_limits<real>::infinity()),
                       doctest::Contains("non-finite"), std::runtime_error);
}

// Every primitive, checked against central finite differences on random
// small graphs (double precision, h = 1e-5, rtol 1e-4).
TEST_CASE("gradient check covers every primitive") {
  std::mt19937_64 rng(1234);

  // Builds a scalar loss touching all ops from three parameters.
  auto build_loss = [](Parameter& wm, Parameter& wv, Parameter& table) {
    Graph g;
    Value m = g.param(wm);                      // (3 x 4)
    Value v = g.param(wv);                      // (4)
    Value row = g.gather_row(table, 1);         // (4)
    Value mv = g.matvec(m, g.add(v, row));      // (3)
    Value sg = g.sigmoid(mv);
    Value th = g.tanh(mv);
    Value prod = g.mul(sg, th);
    Value diff = g.sub(prod, g.scale(sg, real(0.5)));
    std::vector<Value> parts = {diff, g.slice(mv, 0, 2)};
    Value cat = g.concat(parts);                // (5)
    Value lse = g.logsumexp(cat);
    Value mm = g.matmul(m, g.reshape(g.concat(std::vector<Value>{v, row}), {4, 2}));  // (3 x 2)
    Value ac = g.add_col(mm, mv);
    Value lsec = g.logsumexp_cols(ac);          // (2)
    Value d = g.dot(lsec, lsec);
    Value loss = g.add(lse, d);
    return std::make_pair(std::move(g), loss);
  };

  for (int trial = 0; trial < 5; ++trial) {
    Parameter wm("wm", random_tensor({3, 4}, rng));
    Parameter wv("wv", random_tensor({4}, rng));
    Parameter table("table", random_tensor({3, 4}, rng));

    auto loss_value = [&]() {
      auto [g, loss] = build_loss(wm, wv, table);
      return double(g.value(loss)[0]);
    };

    auto [g, loss] = build_loss(wm, wv, table);
    g.backward(loss);

    for (Parameter* p : {&wm, &wv, &table}) {
      for (std::size_t i = 0; i < p->value.numel(); ++i) {
        double fd = oracle::central_diff(p->value, i, loss_value);
        INFO(p->name, "[", i, "] analytic=", p->grad[i], " fd=", fd);
        CHECK(oracle::grad_close(p->grad[i], fd));
      }
    }
  }
}

TEST_CASE("repeated parameter use accumulates gradients") {
  Parameter w("w", Tensor::vec({2}));
  Graph g;
  Value a = g.param(w);
  Value b = g.param(w);
  Value loss = g.sum(g.mul(a, b));  // w^2, d/dw = 2w = 4
  g.backward(loss);
  CHECK(w.grad[0] == doctest::Approx(4));
}

TEST_CASE("values are deterministic for identical graphs") {
  std::mt19937_64 rng(7);
  Tensor m = random_tensor({4, 4}, rng);
  Tensor v = random_tensor({4}, rng);
  auto run = [&]() {
    Graph g;
    Value out = g.logsumexp(g.tanh(g.matvec(g.input(m), g.input(v))));
    return g.value(out)[0];
  };
  real a = run();
  real b = run();
  CHECK(std::memcmp(&a, &b, sizeof(real)) == 0);
}
