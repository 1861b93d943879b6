#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "puntag/corpus.hpp"
#include "puntag/crf.hpp"
#include "puntag/embeddings.hpp"
#include "puntag/encoder.hpp"

namespace puntag {

// A trained tagger: scheme, vocabulary, encoder, and CRF, persisted as a
// directory of {params.ckpt, meta.json}. The vocabulary-restricted frozen
// word table travels inside the checkpoint, so prediction never needs the
// original embedding file.
struct Model {
  TagScheme scheme;
  Vocabulary vocab;
  EncoderParams encoder;
  CrfParams crf;

  Model(TagScheme scheme, Vocabulary vocab, EncoderParams encoder, CrfParams crf);

  // Vocabulary from the training contexts; freshly initialized parameters.
  static Model build(const TagScheme& scheme, const EncoderConfig& config,
                     const std::vector<Context>& train_contexts,
                     const EmbeddingTable& pretrained, std::uint64_t seed);

  std::vector<Parameter*> trainable_params();

  // Differentiable nll of the gold tag encoding of ctx.
  Value loss(Graph& g, const Context& ctx);

  TagSequence predict(const Context& ctx, bool constrained = false);

  void save(const std::string& dir);
  static Model load(const std::string& dir);
};

}  // namespace puntag
