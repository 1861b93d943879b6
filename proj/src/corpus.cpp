#include "puntag/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include "puntag/util.hpp"

namespace puntag {

void Context::validate() const {
  if (tokens.empty()) {
    throw std::runtime_error("context '" + id + "': no tokens");
  }
  if (gold_pun_index && *gold_pun_index >= tokens.size()) {
    throw std::runtime_error("context '" + id + "': pun index " +
                             std::to_string(*gold_pun_index) + " out of range for " +
                             std::to_string(tokens.size()) + " tokens");
  }
}

namespace {
const std::vector<std::string> kNpTags = {"N", "P"};
const std::vector<std::string> kBpaTags = {"B", "P", "A"};
const std::string kNpName = "np";
const std::string kBpaName = "bpa";
}  // namespace

TagScheme TagScheme::np() { return TagScheme{SchemeVariant::kNP}; }
TagScheme TagScheme::bpa() { return TagScheme{SchemeVariant::kBPA}; }

TagScheme TagScheme::parse(const std::string& name) {
  std::string lower = lowercase(name);
  if (lower == kNpName) return np();
  if (lower == kBpaName) return bpa();
  throw std::runtime_error("unknown tag scheme '" + name + "' (expected np or bpa)");
}

const std::string& TagScheme::name() const {
  return variant == SchemeVariant::kNP ? kNpName : kBpaName;
}

const std::string& TagScheme::tag_name(int tag) const {
  const auto& tags = variant == SchemeVariant::kNP ? kNpTags : kBpaTags;
  if (tag < 0 || static_cast<std::size_t>(tag) >= tags.size()) {
    throw std::runtime_error("tag id " + std::to_string(tag) + " out of range for scheme " + name());
  }
  return tags[static_cast<std::size_t>(tag)];
}

int TagScheme::tag_id(const std::string& tag) const {
  const auto& tags = variant == SchemeVariant::kNP ? kNpTags : kBpaTags;
  for (std::size_t i = 0; i < tags.size(); ++i) {
    if (tags[i] == tag) return static_cast<int>(i);
  }
  throw std::runtime_error("tag '" + tag + "' not in scheme " + name());
}

TagSequence encode_tags(const Context& ctx, const TagScheme& scheme) {
  ctx.validate();
  TagSequence seq;
  seq.scheme = scheme;
  seq.tags.assign(ctx.tokens.size(), 0);  // all-N or all-B
  if (ctx.has_pun()) {
    std::size_t p = *ctx.gold_pun_index;
    seq.tags[p] = scheme.p_index();
    if (scheme.variant == SchemeVariant::kBPA) {
      for (std::size_t i = p + 1; i < seq.tags.size(); ++i) seq.tags[i] = 2;  // A
    }
  }
  return seq;
}

Decoded decode_tags(const TagSequence& seq) {
  Decoded out;
  for (std::size_t i = 0; i < seq.tags.size(); ++i) {
    if (seq.tags[i] == seq.scheme.p_index()) out.pun_indices.push_back(i);
  }
  out.detected = !out.pun_indices.empty();
  return out;
}

Vocabulary::Vocabulary(std::vector<std::string> words, std::vector<char32_t> chars)
    : words_(std::move(words)), chars_(std::move(chars)) {
  index();
}

Vocabulary Vocabulary::build(const std::vector<Context>& contexts) {
  std::set<std::string> words;
  std::set<char32_t> chars;
  for (const Context& ctx : contexts) {
    for (const std::string& tok : ctx.tokens) {
      words.insert(tok);
      for (char32_t c : utf8_codepoints(tok)) chars.insert(c);
    }
  }
  return Vocabulary(std::vector<std::string>(words.begin(), words.end()),
                    std::vector<char32_t>(chars.begin(), chars.end()));
}

void Vocabulary::index() {
  word_ids_.reserve(words_.size());
  for (std::size_t i = 0; i < words_.size(); ++i) {
    word_ids_.emplace(words_[i], static_cast<int>(i) + 2);
  }
  char_ids_.reserve(chars_.size());
  for (std::size_t i = 0; i < chars_.size(); ++i) {
    char_ids_.emplace(chars_[i], static_cast<int>(i) + 2);
  }
}

int Vocabulary::word_id(const std::string& word) const {
  auto it = word_ids_.find(word);
  return it == word_ids_.end() ? kUnkId : it->second;
}

int Vocabulary::char_id(char32_t c) const {
  auto it = char_ids_.find(c);
  return it == char_ids_.end() ? kUnkId : it->second;
}

FoldPlan make_folds(const std::vector<Context>& contexts, std::size_t k,
                    double dev_fraction, std::uint64_t seed) {
  if (k < 2) {
    throw std::runtime_error("fold count must be at least 2, got " + std::to_string(k));
  }
  if (k > contexts.size()) {
    throw std::runtime_error("fold count " + std::to_string(k) + " exceeds " +
                             std::to_string(contexts.size()) + " contexts");
  }
  if (!(dev_fraction > 0.0 && dev_fraction < 1.0)) {
    throw std::runtime_error("dev fraction must lie in (0, 1)");
  }

  std::vector<std::size_t> order(contexts.size());
  std::iota(order.begin(), order.end(), 0);
  auto rng = make_rng(derive_seed(seed, {kSeedFolds}));
  std::shuffle(order.begin(), order.end(), rng);

  FoldPlan plan;
  plan.k = k;
  plan.dev_fraction = dev_fraction;
  plan.seed = seed;
  plan.assignments.assign(contexts.size(), 0);
  for (std::size_t i = 0; i < order.size(); ++i) {
    plan.assignments[order[i]] = i % k;  // round-robin over the shuffle
  }
  return plan;
}

FoldSplit split_for_fold(const FoldPlan& plan, std::size_t fold) {
  if (fold >= plan.k) {
    throw std::runtime_error("fold index " + std::to_string(fold) + " out of range for k=" +
                             std::to_string(plan.k));
  }
  FoldSplit split;
  std::vector<std::size_t> rest;
  for (std::size_t i = 0; i < plan.assignments.size(); ++i) {
    (plan.assignments[i] == fold ? split.test : rest).push_back(i);
  }

  std::vector<std::size_t> order(rest.size());
  std::iota(order.begin(), order.end(), 0);
  auto rng = make_rng(derive_seed(plan.seed, {kSeedDevSplit, fold}));
  std::shuffle(order.begin(), order.end(), rng);

  auto dev_count = static_cast<std::size_t>(std::llround(plan.dev_fraction * rest.size()));
  if (dev_count >= rest.size() && !rest.empty()) dev_count = rest.size() - 1;  // keep train non-empty
  std::vector<bool> is_dev(rest.size(), false);
  for (std::size_t i = 0; i < dev_count; ++i) is_dev[order[i]] = true;
  for (std::size_t i = 0; i < rest.size(); ++i) {
    (is_dev[i] ? split.dev : split.train).push_back(rest[i]);
  }
  return split;
}

bool in_second_half(std::size_t index, std::size_t n) {
  return index >= (n + 1) / 2;  // ceil(n/2)
}

double second_half_fraction(const std::vector<Context>& contexts) {
  std::size_t puns = 0;
  std::size_t second = 0;
  for (const Context& ctx : contexts) {
    if (!ctx.has_pun()) continue;
    ++puns;
    if (in_second_half(*ctx.gold_pun_index, ctx.tokens.size())) ++second;
  }
  if (puns == 0) {
    throw std::runtime_error("second_half_fraction: no pun-bearing contexts");
  }
  return static_cast<double>(second) / static_cast<double>(puns);
}

CorpusFormat parse_corpus_format(const std::string& name) {
  std::string lower = lowercase(name);
  if (lower == "xml") return CorpusFormat::kXml;
  if (lower == "tsv") return CorpusFormat::kTsv;
  throw std::runtime_error("unknown corpus format '" + name + "' (expected xml or tsv)");
}

namespace {

std::vector<Context> load_tsv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open corpus file: " + path);
  std::vector<Context> contexts;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    std::vector<std::string> fields = split(line, '\t');
    if (fields.size() != 3) {
      throw std::runtime_error(path + ": line " + std::to_string(line_no) +
                               ": expected 3 tab-separated fields, got " +
                               std::to_string(fields.size()));
    }
    Context ctx;
    ctx.id = trim(fields[0]);
    ctx.tokens = split_ws(fields[1]);
    std::string pun = trim(fields[2]);
    long idx;
    try {
      idx = std::stol(pun);
    } catch (const std::exception&) {
      throw std::runtime_error(path + ": line " + std::to_string(line_no) +
                               ": pun index '" + pun + "' is not an integer");
    }
    if (idx >= 0) ctx.gold_pun_index = static_cast<std::size_t>(idx);
    try {
      ctx.validate();
    } catch (const std::exception& e) {
      throw std::runtime_error(path + ": line " + std::to_string(line_no) + ": " + e.what());
    }
    contexts.push_back(std::move(ctx));
  }
  return contexts;
}

// Two-column gold files: `context_id <TAB> value`.
std::unordered_map<std::string, std::string> load_gold_pairs(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open gold file: " + path);
  std::unordered_map<std::string, std::string> pairs;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    std::vector<std::string> fields = split(line, '\t');
    if (fields.size() != 2) {
      throw std::runtime_error(path + ": line " + std::to_string(line_no) +
                               ": expected `id<TAB>value`");
    }
    if (!pairs.emplace(trim(fields[0]), trim(fields[1])).second) {
      throw std::runtime_error(path + ": line " + std::to_string(line_no) +
                               ": duplicate context id '" + trim(fields[0]) + "'");
    }
  }
  return pairs;
}

std::vector<Context> load_xml(const std::string& path, const std::string& detection_gold_path,
                              const std::string& location_gold_path) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    pt::read_xml(path, tree);
  } catch (const pt::xml_parser_error& e) {
    throw std::runtime_error(path + ": XML parse error: " + e.message());
  }
  if (tree.empty()) throw std::runtime_error(path + ": no root element");

  std::vector<Context> contexts;
  // token id -> (context index, token index); gold location references these.
  std::unordered_map<std::string, std::pair<std::size_t, std::size_t>> token_pos;

  const pt::ptree& root = tree.begin()->second;
  for (const auto& [name, ctx_node] : root) {
    if (name == "<xmlattr>") continue;
    Context ctx;
    ctx.id = ctx_node.get<std::string>("<xmlattr>.id", "");
    if (ctx.id.empty()) {
      throw std::runtime_error(path + ": context element <" + name + "> lacks an id attribute");
    }
    for (const auto& [tok_name, tok_node] : ctx_node) {
      if (tok_name == "<xmlattr>") continue;
      std::string tok_id = tok_node.get<std::string>("<xmlattr>.id", "");
      if (tok_id.empty()) {
        throw std::runtime_error(path + ": token in context '" + ctx.id +
                                 "' lacks an id attribute");
      }
      token_pos[tok_id] = {contexts.size(), ctx.tokens.size()};
      ctx.tokens.push_back(trim(tok_node.data()));
    }
    if (ctx.tokens.empty()) {
      throw std::runtime_error(path + ": context '" + ctx.id + "' has no tokens");
    }
    contexts.push_back(std::move(ctx));
  }

  std::unordered_map<std::string, std::size_t> ctx_index;
  for (std::size_t i = 0; i < contexts.size(); ++i) ctx_index[contexts[i].id] = i;

  if (!location_gold_path.empty()) {
    for (const auto& [ctx_id, tok_id] : load_gold_pairs(location_gold_path)) {
      auto ctx_it = ctx_index.find(ctx_id);
      if (ctx_it == ctx_index.end()) {
        throw std::runtime_error(location_gold_path + ": unknown context id '" + ctx_id + "'");
      }
      auto tok_it = token_pos.find(tok_id);
      if (tok_it == token_pos.end() || tok_it->second.first != ctx_it->second) {
        throw std::runtime_error(location_gold_path + ": context '" + ctx_id +
                                 "': gold token id '" + tok_id + "' not found in that context");
      }
      contexts[ctx_it->second].gold_pun_index = tok_it->second.second;
    }
  }

  if (!detection_gold_path.empty()) {
    for (const auto& [ctx_id, label] : load_gold_pairs(detection_gold_path)) {
      auto ctx_it = ctx_index.find(ctx_id);
      if (ctx_it == ctx_index.end()) {
        throw std::runtime_error(detection_gold_path + ": unknown context id '" + ctx_id + "'");
      }
      if (label != "0" && label != "1") {
        throw std::runtime_error(detection_gold_path + ": context '" + ctx_id +
                                 "': label must be 0 or 1, got '" + label + "'");
      }
      bool labeled_pun = label == "1";
      if (labeled_pun && location_gold_path.empty()) {
        throw std::runtime_error(detection_gold_path + ": context '" + ctx_id +
                                 "' is labeled as a pun but no location gold file was given; "
                                 "the pun position cannot be recovered from detection labels");
      }
      if (!location_gold_path.empty() && labeled_pun != contexts[ctx_it->second].has_pun()) {
        throw std::runtime_error("gold files disagree for context '" + ctx_id +
                                 "': detection label " + label + " vs location annotation " +
                                 (contexts[ctx_it->second].has_pun() ? "present" : "absent"));
      }
    }
  }

  for (const Context& ctx : contexts) ctx.validate();
  return contexts;
}

}  // namespace

std::vector<Context> load_corpus(const std::string& path, CorpusFormat format,
                                 const std::string& detection_gold_path,
                                 const std::string& location_gold_path) {
  if (format == CorpusFormat::kTsv) {
    if (!detection_gold_path.empty() || !location_gold_path.empty()) {
      throw std::runtime_error("gold side files apply only to the xml format");
    }
    return load_tsv(path);
  }
  return load_xml(path, detection_gold_path, location_gold_path);
}

}  // namespace puntag
