#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <string>
#include <vector>

namespace puntag {

// All experiment randomness flows from one top-level seed through this
// derivation: each consumer mixes the base seed with a fixed stream of
// integers (fold index, epoch index, purpose tag, ...) via splitmix64.
std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> stream);

inline std::mt19937_64 make_rng(std::uint64_t seed) { return std::mt19937_64(seed); }

// Purpose tags for derive_seed streams.
enum : std::uint64_t {
  kSeedFolds = 1,
  kSeedDevSplit = 2,
  kSeedInit = 3,
  kSeedShuffle = 4,
  kSeedFoldRun = 5,
};

std::vector<std::string> split(const std::string& line, char sep);
std::vector<std::string> split_ws(const std::string& line);
std::string trim(const std::string& s);
std::string lowercase(const std::string& s);

// Decodes a UTF-8 string into codepoints; invalid bytes come back as
// their own codepoints so no input can fail.
std::vector<char32_t> utf8_codepoints(const std::string& s);

std::string hex_encode(const void* bytes, std::size_t len);
std::vector<std::uint8_t> hex_decode(const std::string& hex);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& contents);

}  // namespace puntag
