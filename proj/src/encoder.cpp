#include "puntag/encoder.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "puntag/util.hpp"

namespace puntag {

void EncoderConfig::validate() const {
  if (char_emb_dim == 0 || word_emb_dim == 0 || char_lstm_hidden == 0 || word_lstm_hidden == 0) {
    throw std::runtime_error("encoder: all dimensions must be positive");
  }
  if (highway_layers == 0) {
    throw std::runtime_error("encoder: at least one highway layer is required");
  }
}

namespace {

void xavier_fill(Tensor& t, std::mt19937_64& rng) {
  const real bound = std::sqrt(real(6) / real(t.extent(0) + t.extent(1)));
  std::uniform_real_distribution<real> dist(-bound, bound);
  for (std::size_t i = 0; i < t.numel(); ++i) t[i] = dist(rng);
}

void embedding_fill(Tensor& t, std::mt19937_64& rng) {
  const real bound = std::sqrt(real(3) / real(t.extent(1)));
  std::uniform_real_distribution<real> dist(-bound, bound);
  for (std::size_t i = 0; i < t.numel(); ++i) t[i] = dist(rng);
}

}  // namespace

LstmParams::LstmParams(const std::string& prefix, std::size_t input, std::size_t hidden)
    : input_dim(input),
      hidden_dim(hidden),
      wx(prefix + ".wx", Tensor::zeros({4 * hidden, input})),
      wh(prefix + ".wh", Tensor::zeros({4 * hidden, hidden})),
      bias(prefix + ".bias", Tensor::zeros({4 * hidden})) {}

void LstmParams::init(std::mt19937_64& rng) {
  xavier_fill(wx.value, rng);
  xavier_fill(wh.value, rng);
  bias.value.fill(real(0));
  for (std::size_t i = hidden_dim; i < 2 * hidden_dim; ++i) bias.value[i] = real(1);
}

std::vector<Parameter*> LstmParams::parameters() { return {&wx, &wh, &bias}; }

std::vector<Value> LstmParams::run(Graph& g, const std::vector<Value>& xs) {
  const std::size_t h = hidden_dim;
  Value wx_v = g.param(wx);
  Value wh_v = g.param(wh);
  Value bias_v = g.param(bias);
  Value h_prev = g.input(Tensor::zeros({h}));
  Value c_prev = g.input(Tensor::zeros({h}));

  std::vector<Value> states;
  states.reserve(xs.size());
  for (Value x : xs) {
    Value pre = g.add(g.add(g.matvec(wx_v, x), g.matvec(wh_v, h_prev)), bias_v);
    Value in_gate = g.sigmoid(g.slice(pre, 0, h));
    Value forget_gate = g.sigmoid(g.slice(pre, h, h));
    Value cell_cand = g.tanh(g.slice(pre, 2 * h, h));
    Value out_gate = g.sigmoid(g.slice(pre, 3 * h, h));
    Value c = g.add(g.mul(forget_gate, c_prev), g.mul(in_gate, cell_cand));
    Value state = g.mul(out_gate, g.tanh(c));
    states.push_back(state);
    h_prev = state;
    c_prev = c;
  }
  return states;
}

HighwayParams::HighwayParams(const std::string& prefix, std::size_t dim_)
    : dim(dim_),
      gate_w(prefix + ".gate_w", Tensor::zeros({dim_, dim_})),
      gate_b(prefix + ".gate_b", Tensor::zeros({dim_})),
      transform_w(prefix + ".transform_w", Tensor::zeros({dim_, dim_})),
      transform_b(prefix + ".transform_b", Tensor::zeros({dim_})) {}

void HighwayParams::init(std::mt19937_64& rng) {
  xavier_fill(gate_w.value, rng);
  xavier_fill(transform_w.value, rng);
  gate_b.value.fill(real(0));
  transform_b.value.fill(real(0));
}

std::vector<Parameter*> HighwayParams::parameters() {
  return {&gate_w, &gate_b, &transform_w, &transform_b};
}

Value HighwayParams::apply(Graph& g, Value h) {
  Value gate = g.sigmoid(g.add(g.matvec(g.param(gate_w), h), g.param(gate_b)));
  Value transformed = g.tanh(g.add(g.matvec(g.param(transform_w), h), g.param(transform_b)));
  Value ones = g.input(Tensor::full({dim}, real(1)));
  return g.add(g.mul(gate, transformed), g.mul(g.sub(ones, gate), h));
}

int position_indicator(std::size_t index, std::size_t n) {
  return in_second_half(index, n) ? 1 : 0;
}

EncoderParams::EncoderParams(const EncoderConfig& cfg, const Vocabulary& vocab,
                             const EmbeddingTable& pretrained, std::uint64_t seed)
    : EncoderParams(cfg, vocab.char_count(), vocab.word_count()) {
  if (pretrained.dim() != cfg.word_emb_dim) {
    throw std::runtime_error("encoder: pretrained vectors have dimension " +
                             std::to_string(pretrained.dim()) + ", config expects " +
                             std::to_string(cfg.word_emb_dim));
  }
  auto rng = make_rng(derive_seed(seed, {kSeedInit}));
  embedding_fill(char_table.value, rng);
  char_fwd.init(rng);
  char_bwd.init(rng);
  for (HighwayParams& layer : highway) layer.init(rng);
  word_fwd.init(rng);
  word_bwd.init(rng);

  // reserved rows (padding, unknown) stay zero
  for (std::size_t i = 0; i < vocab.words().size(); ++i) {
    pretrained.lookup(vocab.words()[i], &word_table.at(i + 2, 0));
  }
}

EncoderParams::EncoderParams(const EncoderConfig& cfg, std::size_t char_count,
                             std::size_t word_count)
    : config(cfg),
      char_table("encoder.char_table", Tensor::zeros({char_count, cfg.char_emb_dim})),
      char_fwd("encoder.char_fwd", cfg.char_emb_dim, cfg.char_lstm_hidden),
      char_bwd("encoder.char_bwd", cfg.char_emb_dim, cfg.char_lstm_hidden),
      word_fwd("encoder.word_fwd", cfg.word_input_dim(), cfg.word_lstm_hidden),
      word_bwd("encoder.word_bwd", cfg.word_input_dim(), cfg.word_lstm_hidden),
      word_table(Tensor::zeros({word_count, cfg.word_emb_dim})) {
  cfg.validate();
  for (std::size_t layer = 0; layer < cfg.highway_layers; ++layer) {
    highway.emplace_back("encoder.highway" + std::to_string(layer), cfg.char_feature_dim());
  }
}

std::vector<Parameter*> EncoderParams::trainable() {
  std::vector<Parameter*> out = {&char_table};
  for (LstmParams* lstm : {&char_fwd, &char_bwd, &word_fwd, &word_bwd}) {
    for (Parameter* p : lstm->parameters()) out.push_back(p);
  }
  for (HighwayParams& layer : highway) {
    for (Parameter* p : layer.parameters()) out.push_back(p);
  }
  return out;
}

Value EncoderParams::char_features(Graph& g, const std::string& token, const Vocabulary& vocab) {
  std::vector<char32_t> cps = utf8_codepoints(token);
  std::vector<Value> embs;
  if (cps.empty()) {
    embs.push_back(g.gather_row(char_table, Vocabulary::kUnkId));
  } else {
    embs.reserve(cps.size());
    for (char32_t c : cps) {
      embs.push_back(g.gather_row(char_table, static_cast<std::size_t>(vocab.char_id(c))));
    }
  }
  std::vector<Value> fwd = char_fwd.run(g, embs);
  std::reverse(embs.begin(), embs.end());
  std::vector<Value> bwd = char_bwd.run(g, embs);
  std::vector<Value> ends = {fwd.back(), bwd.back()};
  return g.concat(ends);
}

std::vector<Value> EncoderParams::encoder_inputs(Graph& g, const Context& ctx,
                                                 const Vocabulary& vocab) {
  ctx.validate();
  const std::size_t n = ctx.tokens.size();
  std::vector<Value> inputs;
  inputs.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    Value chars = char_features(g, ctx.tokens[i], vocab);
    for (HighwayParams& layer : highway) chars = layer.apply(g, chars);

    std::size_t row = static_cast<std::size_t>(vocab.word_id(ctx.tokens[i]));
    Tensor word_vec({config.word_emb_dim});
    std::copy(&word_table.at(row, 0), &word_table.at(row, 0) + config.word_emb_dim,
              word_vec.data());

    std::vector<Value> parts = {chars, g.input(std::move(word_vec))};
    if (config.use_position_feature) {
      parts.push_back(g.input(Tensor::vec({real(position_indicator(i, n))})));
    }
    inputs.push_back(g.concat(parts));
  }
  return inputs;
}

std::vector<Value> EncoderParams::encode(Graph& g, const Context& ctx, const Vocabulary& vocab) {
  std::vector<Value> inputs = encoder_inputs(g, ctx, vocab);
  std::vector<Value> fwd = word_fwd.run(g, inputs);
  std::reverse(inputs.begin(), inputs.end());
  std::vector<Value> bwd = word_bwd.run(g, inputs);
  std::reverse(bwd.begin(), bwd.end());

  std::vector<Value> zs;
  zs.reserve(fwd.size());
  for (std::size_t i = 0; i < fwd.size(); ++i) {
    std::vector<Value> parts = {fwd[i], bwd[i]};
    zs.push_back(g.concat(parts));
  }
  return zs;
}

}  // namespace puntag
