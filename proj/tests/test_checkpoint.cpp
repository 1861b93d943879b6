#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>

#include "puntag/checkpoint.hpp"
#include "puntag/util.hpp"

using namespace puntag;

namespace {

std::string temp_path(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / "puntag_ckpt_test";
  std::filesystem::create_directories(dir);
  return (dir / name).string();
}

}  // namespace

TEST_CASE("checkpoint round trip preserves names, shapes, and bits") {
  Tensor a({2, 3}, {1.5, -2.25, 0.0, 1e-300, 3.14159265358979, -0.0});
  Tensor b = Tensor::vec({42});
  std::string path = temp_path("roundtrip.ckpt");
  save_checkpoint(path, {{"layer.weight", &a}, {"layer.bias", &b}});

  auto loaded = load_checkpoint(path);
  REQUIRE(loaded.size() == 2);
  REQUIRE(loaded.count("layer.weight") == 1);
  const Tensor& la = loaded.at("layer.weight");
  CHECK(la.shape() == a.shape());
  for (std::size_t i = 0; i < a.numel(); ++i) {
    CHECK(la[i] == a[i]);  // exact: payload is raw bytes
  }
  CHECK(loaded.at("layer.bias").shape() == b.shape());
  CHECK(loaded.at("layer.bias")[0] == 42);
}

TEST_CASE("checkpoint header carries version and precision") {
  Tensor a = Tensor::vec({1});
  std::string path = temp_path("header.ckpt");
  save_checkpoint(path, {{"t", &a}});
  std::string contents = read_file(path);
  CHECK(contents.rfind("puntag-checkpoint\t1\t", 0) == 0);
  CHECK(contents.find(sizeof(real) == 8 ? "float64" : "float32") != std::string::npos);
}

TEST_CASE("checkpoint parse errors are specific") {
  std::string garbage = temp_path("garbage.ckpt");
  write_file(garbage, "not-a-checkpoint\t1\tfloat64\n");
  CHECK_THROWS_WITH_AS(load_checkpoint(garbage), doctest::Contains("header"),
                       std::runtime_error);

  std::string wrong_precision = temp_path("precision.ckpt");
  write_file(wrong_precision, std::string("puntag-checkpoint\t1\t") +
                                  (sizeof(real) == 8 ? "float32" : "float64") + "\n");
  CHECK_THROWS_AS(load_checkpoint(wrong_precision), std::runtime_error);

  std::string bad_shape = temp_path("shape.ckpt");
  write_file(bad_shape, "puntag-checkpoint\t1\tfloat64\nt\t2xbad\tdeadbeef\n");
  CHECK_THROWS_WITH_AS(load_checkpoint(bad_shape), doctest::Contains("line 2"),
                       std::runtime_error);

  // payload length disagreeing with the declared shape
  std::string bad_len = temp_path("len.ckpt");
  write_file(bad_len, "puntag-checkpoint\t1\tfloat64\nt\t2\tdeadbeef\n");
  CHECK_THROWS_AS(load_checkpoint(bad_len), std::runtime_error);

  CHECK_THROWS_AS(load_checkpoint("/nonexistent/model.ckpt"), std::runtime_error);
}

TEST_CASE("duplicate tensor names are rejected") {
  Tensor a = Tensor::vec({1});
  std::string path = temp_path("dup.ckpt");
  CHECK_THROWS_AS(save_checkpoint(path, {{"t", &a}, {"t", &a}}), std::runtime_error);
}
