#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace puntag::selftest {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;  // one-line account of what was measured
};

// Gating checks: self-contained, no external data, minutes of CPU total.
CheckResult crf_oracle_equivalence();  // forward + viterbi vs. enumeration
CheckResult normalization();           // probabilities sum to 1
CheckResult end_to_end_gradients();    // finite differences, every group
CheckResult scheme_invariants();       // round trips + constrained decoding
CheckResult synthetic_learnability();  // sentinel corpus reaches 0.99 F1
CheckResult metric_hand_oracle();      // hand-counted fixture, exact

std::vector<CheckResult> run_gating_suite();

// Benchmark-corpus checks; the datasets are not distributed with this
// repository, so callers supply paths.
struct BenchmarkPaths {
  std::string homographic_xml, homographic_det, homographic_loc;
  std::string heterographic_xml, heterographic_det, heterographic_loc;
  std::string embeddings;  // optional pretrained vectors
  std::size_t embedding_dim = 100;
};

CheckResult corpus_statistics(const BenchmarkPaths& paths);
// Full cross-validation runs: detection/location F1 targets, BPA > NP, and
// pipeline < joint. Expensive (hours); `jobs` parallelizes folds.
std::vector<CheckResult> benchmark_reproduction(const BenchmarkPaths& paths, std::size_t jobs);

}  // namespace puntag::selftest
