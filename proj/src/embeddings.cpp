#include "puntag/embeddings.hpp"

#include <algorithm>
#include <fstream>
#include <stdexcept>

#include "puntag/util.hpp"

namespace puntag {

EmbeddingTable EmbeddingTable::load(const std::string& path, std::size_t dim) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open embedding file: " + path);
  if (dim == 0) throw std::runtime_error("embedding dimension must be positive");

  EmbeddingTable table(dim);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> fields = split_ws(line);
    if (fields.size() != dim + 1) {
      throw std::runtime_error(path + ": line " + std::to_string(line_no) + ": expected token + " +
                               std::to_string(dim) + " values, got " +
                               std::to_string(fields.size() == 0 ? 0 : fields.size() - 1));
    }
    if (table.index_.count(fields[0])) continue;  // keep the first occurrence
    std::size_t row = table.index_.size();
    table.index_.emplace(fields[0], row);
    for (std::size_t i = 1; i < fields.size(); ++i) {
      try {
        table.data_.push_back(static_cast<real>(std::stod(fields[i])));
      } catch (const std::exception&) {
        throw std::runtime_error(path + ": line " + std::to_string(line_no) + ": value '" +
                                 fields[i] + "' is not a number");
      }
    }
  }
  return table;
}

const real* EmbeddingTable::find(const std::string& token) const {
  auto it = index_.find(token);
  return it == index_.end() ? nullptr : data_.data() + it->second * dim_;
}

bool EmbeddingTable::lookup(const std::string& token, real* out) const {
  const real* row = find(token);
  if (!row) row = find(lowercase(token));
  if (row) {
    std::copy(row, row + dim_, out);
    return true;
  }
  std::fill(out, out + dim_, real(0));
  return false;
}

}  // namespace puntag
