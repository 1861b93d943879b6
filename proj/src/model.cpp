#include "puntag/model.hpp"

#include <filesystem>
#include <stdexcept>

#include "json.hpp"

#include "puntag/checkpoint.hpp"
#include "puntag/util.hpp"

namespace puntag {

namespace fs = std::filesystem;
using nlohmann::json;

Model::Model(TagScheme scheme_, Vocabulary vocab_, EncoderParams encoder_, CrfParams crf_)
    : scheme(scheme_), vocab(std::move(vocab_)), encoder(std::move(encoder_)),
      crf(std::move(crf_)) {
  if (crf.num_tags != scheme.size()) {
    throw std::runtime_error("model: crf parameters sized for " + std::to_string(crf.num_tags) +
                             " tags but scheme " + scheme.name() + " has " +
                             std::to_string(scheme.size()));
  }
  if (crf.dim != encoder.config.output_dim()) {
    throw std::runtime_error("model: crf input dimension " + std::to_string(crf.dim) +
                             " does not match encoder output " +
                             std::to_string(encoder.config.output_dim()));
  }
}

Model Model::build(const TagScheme& scheme, const EncoderConfig& config,
                   const std::vector<Context>& train_contexts, const EmbeddingTable& pretrained,
                   std::uint64_t seed) {
  if (train_contexts.empty()) {
    throw std::runtime_error("model: cannot build a vocabulary from zero contexts");
  }
  Vocabulary vocab = Vocabulary::build(train_contexts);
  EncoderParams enc(config, vocab, pretrained, seed);
  CrfParams crf_params(scheme.size(), config.output_dim());
  crf_params.init(seed);
  return Model(scheme, std::move(vocab), std::move(enc), std::move(crf_params));
}

std::vector<Parameter*> Model::trainable_params() {
  std::vector<Parameter*> params = encoder.trainable();
  params.push_back(&crf.weights);
  params.push_back(&crf.bias);
  return params;
}

Value Model::loss(Graph& g, const Context& ctx) {
  TagSequence gold = encode_tags(ctx, scheme);
  return nll(g, encoder.encode(g, ctx, vocab), gold, crf);
}

TagSequence Model::predict(const Context& ctx, bool constrained) {
  Graph g;
  std::vector<Value> zs = encoder.encode(g, ctx, vocab);
  std::vector<Tensor> numeric;
  numeric.reserve(zs.size());
  for (Value z : zs) numeric.push_back(g.value(z));
  return viterbi(numeric, crf, scheme, constrained);
}

namespace {
constexpr int kModelVersion = 1;
const char* kMetaFile = "meta.json";
const char* kParamsFile = "params.ckpt";
const char* kWordTableName = "encoder.word_table";
}  // namespace

void Model::save(const std::string& dir) {
  fs::create_directories(dir);

  json meta;
  meta["format"] = "puntag-model";
  meta["version"] = kModelVersion;
  meta["scheme"] = scheme.name();
  meta["encoder"] = {
      {"char_emb_dim", encoder.config.char_emb_dim},
      {"word_emb_dim", encoder.config.word_emb_dim},
      {"char_lstm_hidden", encoder.config.char_lstm_hidden},
      {"word_lstm_hidden", encoder.config.word_lstm_hidden},
      {"use_position_feature", encoder.config.use_position_feature},
      {"highway_layers", encoder.config.highway_layers},
  };
  meta["vocab"]["words"] = vocab.words();
  std::vector<std::uint32_t> chars;
  for (char32_t c : vocab.chars()) chars.push_back(static_cast<std::uint32_t>(c));
  meta["vocab"]["chars"] = chars;
  write_file((fs::path(dir) / kMetaFile).string(), meta.dump(2) + "\n");

  std::vector<std::pair<std::string, const Tensor*>> tensors;
  for (Parameter* p : trainable_params()) tensors.emplace_back(p->name, &p->value);
  tensors.emplace_back(kWordTableName, &encoder.word_table);
  save_checkpoint((fs::path(dir) / kParamsFile).string(), tensors);
}

Model Model::load(const std::string& dir) {
  std::string meta_path = (fs::path(dir) / kMetaFile).string();
  json meta;
  try {
    meta = json::parse(read_file(meta_path));
  } catch (const json::exception& e) {
    throw std::runtime_error(meta_path + ": " + e.what());
  }
  if (meta.value("format", "") != "puntag-model" || meta.value("version", 0) != kModelVersion) {
    throw std::runtime_error(meta_path + ": not a version-" + std::to_string(kModelVersion) +
                             " puntag model");
  }

  TagScheme scheme = TagScheme::parse(meta.at("scheme").get<std::string>());
  const json& enc_meta = meta.at("encoder");
  EncoderConfig config;
  config.char_emb_dim = enc_meta.at("char_emb_dim").get<std::size_t>();
  config.word_emb_dim = enc_meta.at("word_emb_dim").get<std::size_t>();
  config.char_lstm_hidden = enc_meta.at("char_lstm_hidden").get<std::size_t>();
  config.word_lstm_hidden = enc_meta.at("word_lstm_hidden").get<std::size_t>();
  config.use_position_feature = enc_meta.at("use_position_feature").get<bool>();
  config.highway_layers = enc_meta.at("highway_layers").get<std::size_t>();

  std::vector<std::string> words = meta.at("vocab").at("words").get<std::vector<std::string>>();
  std::vector<char32_t> chars;
  for (std::uint32_t c : meta.at("vocab").at("chars").get<std::vector<std::uint32_t>>()) {
    chars.push_back(static_cast<char32_t>(c));
  }
  Vocabulary vocab(std::move(words), std::move(chars));

  EncoderParams enc(config, vocab.char_count(), vocab.word_count());
  CrfParams crf_params(scheme.size(), config.output_dim());
  Model model(scheme, std::move(vocab), std::move(enc), std::move(crf_params));

  std::string params_path = (fs::path(dir) / kParamsFile).string();
  std::map<std::string, Tensor> tensors = load_checkpoint(params_path);
  auto take = [&tensors, &params_path](const std::string& name, Tensor& into) {
    auto it = tensors.find(name);
    if (it == tensors.end()) {
      throw std::runtime_error(params_path + ": missing tensor '" + name + "'");
    }
    if (!it->second.same_shape(into)) {
      throw std::runtime_error(params_path + ": tensor '" + name + "' has shape " +
                               it->second.shape_str() + ", expected " + into.shape_str());
    }
    into = std::move(it->second);
    tensors.erase(it);
  };
  for (Parameter* p : model.trainable_params()) take(p->name, p->value);
  take(kWordTableName, model.encoder.word_table);
  if (!tensors.empty()) {
    throw std::runtime_error(params_path + ": unexpected tensor '" + tensors.begin()->first + "'");
  }
  return model;
}

}  // namespace puntag
