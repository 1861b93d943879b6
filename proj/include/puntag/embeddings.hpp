#pragma once

#include <string>
#include <unordered_map>
#include <vector>

#include "puntag/tensor.hpp"

namespace puntag {

// Pretrained word vectors loaded from text (`token v1 ... v_dim` per line).
// Lookup tries the exact surface form, then its lowercase form; anything
// else resolves to the zero vector.
class EmbeddingTable {
 public:
  EmbeddingTable() = default;
  explicit EmbeddingTable(std::size_t dim) : dim_(dim) {}

  static EmbeddingTable load(const std::string& path, std::size_t dim);

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return index_.size(); }

  // Exact-form row, or nullptr when absent (no case fallback here).
  const real* find(const std::string& token) const;

  // Writes dim() values into out; zero-fills and returns false when neither
  // the exact nor the lowercase form is present.
  bool lookup(const std::string& token, real* out) const;

 private:
  std::size_t dim_ = 0;
  std::vector<real> data_;  // row-major, one row per stored token
  std::unordered_map<std::string, std::size_t> index_;  // token -> row
};

}  // namespace puntag
