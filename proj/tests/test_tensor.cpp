#include "doctest.h"

#include <limits>
#include <stdexcept>

#include "puntag/tensor.hpp"

using namespace puntag;

TEST_CASE("tensor shape/data invariant") {
  Tensor t({2, 3});
  CHECK(t.numel() == 6);
  CHECK(t.rank() == 2);
  CHECK(t.extent(0) == 2);
  CHECK(t.extent(1) == 3);
  CHECK_THROWS_AS(Tensor({2, 2}, {1.0, 2.0, 3.0}), std::runtime_error);
}

TEST_CASE("tensor 2-D accessors are row-major") {
  Tensor t({2, 3}, {1, 2, 3, 4, 5, 6});
  CHECK(t.at(0, 2) == 3);
  CHECK(t.at(1, 0) == 4);
  t.at(1, 2) = 9;
  CHECK(t[5] == 9);
}

TEST_CASE("tensor finiteness check") {
  Tensor t = Tensor::vec({1.0, 2.0});
  CHECK(t.all_finite());
  t[1] = std::numeric_limits<real>::infinity();
  CHECK_FALSE(t.all_finite());
  t[1] = std::numeric_limits<real>::quiet_NaN();
  CHECK_FALSE(t.all_finite());
}

TEST_CASE("tensor shape string") {
  CHECK(Tensor({4, 2}).shape_str() == "4x2");
  CHECK(Tensor::scalar(0).shape_str() == "1");
}
