#pragma once

#include <cstdint>
#include <vector>

#include "puntag/corpus.hpp"
#include "puntag/graph.hpp"

namespace puntag {

// Linear-chain CRF whose per-position factor is conditioned on the tag
// pair: score(i) = W_{y_prev,y} . z_i + b_{y_prev,y}. There is no separate
// emission/transition split and no stop factor; a distinguished start tag
// (prev index == num_tags) parameterizes the first position.
struct CrfParams {
  std::size_t num_tags = 0;
  std::size_t dim = 0;
  Parameter weights;  // ((num_tags+1) * num_tags) x dim, row = y_prev * num_tags + y
  Parameter bias;     // ((num_tags+1) * num_tags)

  CrfParams(std::size_t num_tags, std::size_t dim);

  std::size_t start_index() const { return num_tags; }
  // Validates y_prev <= num_tags (start allowed) and y < num_tags.
  std::size_t pair_row(std::size_t y_prev, std::size_t y) const;

  // Uniform +-sqrt(6 / (dim + rows)) weights, zero biases.
  void init(std::uint64_t seed);
};

// Differentiable log-domain factor for one (y_prev, y) pair at one position.
Value pair_score(Graph& g, Value z, std::size_t y_prev, std::size_t y, CrfParams& params);

// Sum of pair scores along the gold path (y_0 = start).
Value sequence_score(Graph& g, const std::vector<Value>& zs, const TagSequence& gold,
                     CrfParams& params);

// log sum over all num_tags^n sequences, by the forward recursion
// alpha_i(y) = logsumexp_{y'}(alpha_{i-1}(y') + score_i(y', y)).
Value log_partition(Graph& g, const std::vector<Value>& zs, CrfParams& params);

// log_partition - sequence_score; the per-instance training loss.
Value nll(Graph& g, const std::vector<Value>& zs, const TagSequence& gold, CrfParams& params);

// Max-scoring tag sequence. Ties break toward the lowest tag index at the
// final position and at every backpointer, which makes the result the
// reverse-lexicographically smallest maximizing sequence. With
// constrained=true (BPA only) transitions outside
// {start->B, start->P, B->B, B->P, P->A, A->A} score -inf, so the output
// always matches B* (P A*)?.
TagSequence viterbi(const std::vector<Tensor>& zs, const CrfParams& params,
                    const TagScheme& scheme, bool constrained = false);

}  // namespace puntag
