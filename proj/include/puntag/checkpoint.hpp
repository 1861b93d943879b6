#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "puntag/tensor.hpp"

namespace puntag {

// Named-tensor container. Text format, one record per line:
//   puntag-checkpoint <TAB> 1 <TAB> float64        (header: version, precision)
//   name <TAB> 2x3 <TAB> <hex of little-endian raw values>
// The precision tag must match the build's `real`, so a file written by a
// float32 build cannot be silently misread by a float64 one.
void save_checkpoint(const std::string& path,
                     const std::vector<std::pair<std::string, const Tensor*>>& tensors);
std::map<std::string, Tensor> load_checkpoint(const std::string& path);

}  // namespace puntag
