#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "puntag/corpus.hpp"
#include "puntag/embeddings.hpp"
#include "puntag/graph.hpp"

namespace puntag {

struct EncoderConfig {
  std::size_t char_emb_dim = 30;
  std::size_t word_emb_dim = 100;
  std::size_t char_lstm_hidden = 300;
  std::size_t word_lstm_hidden = 300;
  bool use_position_feature = true;
  std::size_t highway_layers = 1;

  std::size_t char_feature_dim() const { return 2 * char_lstm_hidden; }
  std::size_t word_input_dim() const {
    return char_feature_dim() + word_emb_dim + (use_position_feature ? 1 : 0);
  }
  std::size_t output_dim() const { return 2 * word_lstm_hidden; }
  void validate() const;
};

// One LSTM direction. Gate pre-activations are stacked as four blocks of
// hidden_dim rows in the order input, forget, cell, output; the forget
// block of the bias starts life at 1 so early training does not flush the
// cell state.
struct LstmParams {
  std::size_t input_dim = 0;
  std::size_t hidden_dim = 0;
  Parameter wx;    // (4H x input_dim)
  Parameter wh;    // (4H x H)
  Parameter bias;  // (4H)

  LstmParams(const std::string& prefix, std::size_t input, std::size_t hidden);
  void init(std::mt19937_64& rng);
  std::vector<Parameter*> parameters();

  // Hidden states h_1..h_n for xs in the order given; zero initial state.
  std::vector<Value> run(Graph& g, const std::vector<Value>& xs);
};

// out = gate (.) tanh(transform_w . h + transform_b) + (1 - gate) (.) h,
// gate = sigmoid(gate_w . h + gate_b). Dimension-preserving.
struct HighwayParams {
  std::size_t dim = 0;
  Parameter gate_w, gate_b;
  Parameter transform_w, transform_b;

  HighwayParams(const std::string& prefix, std::size_t dim);
  void init(std::mt19937_64& rng);
  std::vector<Parameter*> parameters();
  Value apply(Graph& g, Value h);
};

// 0 while index < ceil(n/2), 1 in the second half of the sentence.
int position_indicator(std::size_t index, std::size_t n);

// Token encoder: per-token concat of highway-transformed character BiLSTM
// features, a frozen pretrained word vector, and optionally the position
// bit, fed through a word-level BiLSTM.
struct EncoderParams {
  EncoderConfig config;
  Parameter char_table;  // (char_count x char_emb_dim), trainable
  LstmParams char_fwd, char_bwd;
  std::vector<HighwayParams> highway;
  LstmParams word_fwd, word_bwd;
  Tensor word_table;  // (word_count x word_emb_dim), frozen after construction

  // Builds and initializes all parameters; the word table is filled from
  // the pretrained vectors (exact form, then lowercase, else zeros).
  EncoderParams(const EncoderConfig& config, const Vocabulary& vocab,
                const EmbeddingTable& pretrained, std::uint64_t seed);
  // Allocates zeroed parameters of the right shapes (checkpoint restore).
  EncoderParams(const EncoderConfig& config, std::size_t char_count, std::size_t word_count);

  std::vector<Parameter*> trainable();

  Value char_features(Graph& g, const std::string& token, const Vocabulary& vocab);
  std::vector<Value> encoder_inputs(Graph& g, const Context& ctx, const Vocabulary& vocab);
  std::vector<Value> encode(Graph& g, const Context& ctx, const Vocabulary& vocab);
};

}  // namespace puntag
