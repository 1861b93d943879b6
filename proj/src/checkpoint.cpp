#include "puntag/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <set>
#include <stdexcept>

#include "puntag/util.hpp"

namespace puntag {

static_assert(std::endian::native == std::endian::little,
              "checkpoint payloads are little-endian raw values");

namespace {
const char* precision_tag() { return sizeof(real) == 8 ? "float64" : "float32"; }
}  // namespace

void save_checkpoint(const std::string& path,
                     const std::vector<std::pair<std::string, const Tensor*>>& tensors) {
  std::set<std::string> seen;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write checkpoint: " + path);
  out << "puntag-checkpoint\t1\t" << precision_tag() << "\n";
  for (const auto& [name, tensor] : tensors) {
    if (name.empty() || name.find('\t') != std::string::npos) {
      throw std::runtime_error("invalid tensor name '" + name + "'");
    }
    if (!seen.insert(name).second) {
      throw std::runtime_error("duplicate tensor name '" + name + "' in checkpoint");
    }
    if (tensor->numel() == 0) {
      throw std::runtime_error("tensor '" + name + "' is empty");
    }
    out << name << '\t' << tensor->shape_str() << '\t'
        << hex_encode(tensor->data(), tensor->numel() * sizeof(real)) << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

std::map<std::string, Tensor> load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open checkpoint: " + path);

  auto fail = [&path](std::size_t line_no, const std::string& what) -> std::runtime_error {
    return std::runtime_error(path + ": line " + std::to_string(line_no) + ": " + what);
  };

  std::string line;
  if (!std::getline(in, line)) throw fail(1, "missing header");
  std::vector<std::string> header = split(line, '\t');
  if (header.size() != 3 || header[0] != "puntag-checkpoint") {
    throw fail(1, "not a puntag checkpoint header");
  }
  if (header[1] != "1") throw fail(1, "unsupported version '" + header[1] + "'");
  if (header[2] != precision_tag()) {
    throw fail(1, "precision '" + header[2] + "' does not match this build (" +
                      precision_tag() + ")");
  }

  std::map<std::string, Tensor> tensors;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> fields = split(line, '\t');
    if (fields.size() != 3) throw fail(line_no, "expected `name<TAB>shape<TAB>payload`");

    std::vector<std::size_t> shape;
    for (const std::string& part : split(fields[1], 'x')) {
      try {
        std::size_t consumed = 0;
        unsigned long extent = std::stoul(part, &consumed);
        if (consumed != part.size() || extent == 0) throw std::invalid_argument(part);
        shape.push_back(extent);
      } catch (const std::exception&) {
        throw fail(line_no, "bad shape '" + fields[1] + "'");
      }
    }
    if (shape.empty()) throw fail(line_no, "empty shape");

    std::vector<std::uint8_t> bytes;
    try {
      bytes = hex_decode(fields[2]);
    } catch (const std::exception& e) {
      throw fail(line_no, e.what());
    }
    Tensor t(shape);
    if (bytes.size() != t.numel() * sizeof(real)) {
      throw fail(line_no, "payload holds " + std::to_string(bytes.size() / sizeof(real)) +
                              " values but shape " + fields[1] + " needs " +
                              std::to_string(t.numel()));
    }
    std::memcpy(t.data(), bytes.data(), bytes.size());
    if (!tensors.emplace(fields[0], std::move(t)).second) {
      throw fail(line_no, "duplicate tensor name '" + fields[0] + "'");
    }
  }
  return tensors;
}

}  // namespace puntag
