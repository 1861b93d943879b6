#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace puntag {

// One input sentence, pre-tokenized. Gold pun position is 0-based; at most
// one pun per context, and has_pun() holds exactly when the index is set.
struct Context {
  std::string id;
  std::vector<std::string> tokens;
  std::optional<std::size_t> gold_pun_index;

  bool has_pun() const { return gold_pun_index.has_value(); }
  void validate() const;  // throws when the index is out of range or tokens empty
};

enum class SchemeVariant { kNP, kBPA };

// NP tags every token as not-pun/pun; BPA splits not-pun into before/after.
// Tag ids index the tagset: NP = [N, P], BPA = [B, P, A]. P is id 1 in both.
struct TagScheme {
  SchemeVariant variant = SchemeVariant::kNP;

  static TagScheme np();
  static TagScheme bpa();
  static TagScheme parse(const std::string& name);  // accepts "np"/"bpa", any case

  std::size_t size() const { return variant == SchemeVariant::kNP ? 2 : 3; }
  int p_index() const { return 1; }
  const std::string& name() const;                 // "np" or "bpa"
  const std::string& tag_name(int tag) const;
  int tag_id(const std::string& name) const;       // throws on unknown tag

  bool operator==(const TagScheme& o) const { return variant == o.variant; }
};

struct TagSequence {
  TagScheme scheme;
  std::vector<int> tags;
};

struct Decoded {
  bool detected = false;
  std::vector<std::size_t> pun_indices;  // ascending positions tagged P
};

// Deterministic gold tags: the pun token gets P; everything else N (NP) or
// B before / A after the pun (BPA). No-pun contexts are all-N / all-B.
TagSequence encode_tags(const Context& ctx, const TagScheme& scheme);
Decoded decode_tags(const TagSequence& seq);

// Word and character ids with reserved slots: 0 = padding, 1 = unknown.
// Content ids are assigned in sorted order, so the mapping depends only on
// the set of surface forms, not on corpus order.
class Vocabulary {
 public:
  static constexpr int kPadId = 0;
  static constexpr int kUnkId = 1;

  Vocabulary() = default;
  Vocabulary(std::vector<std::string> words, std::vector<char32_t> chars);
  static Vocabulary build(const std::vector<Context>& contexts);

  int word_id(const std::string& word) const;  // falls back to kUnkId
  int char_id(char32_t c) const;
  std::size_t word_count() const { return words_.size() + 2; }
  std::size_t char_count() const { return chars_.size() + 2; }

  const std::vector<std::string>& words() const { return words_; }  // id 2, 3, ...
  const std::vector<char32_t>& chars() const { return chars_; }

 private:
  std::vector<std::string> words_;
  std::vector<char32_t> chars_;
  std::unordered_map<std::string, int> word_ids_;
  std::unordered_map<char32_t, int> char_ids_;
  void index();
};

// Cross-validation plan: per-context test-fold assignment plus the dev
// fraction and seed needed to reproduce each fold's train/dev split.
struct FoldPlan {
  std::size_t k = 0;
  std::vector<std::size_t> assignments;  // context index -> fold in [0, k)
  double dev_fraction = 0.1;
  std::uint64_t seed = 0;
};

struct FoldSplit {
  std::vector<std::size_t> train;  // context indices, corpus order
  std::vector<std::size_t> dev;
  std::vector<std::size_t> test;
};

// Shuffles contexts and deals them round-robin, so fold sizes differ by at
// most one. Requires 2 <= k <= |contexts| and dev_fraction in (0, 1).
FoldPlan make_folds(const std::vector<Context>& contexts, std::size_t k,
                    double dev_fraction, std::uint64_t seed);
FoldSplit split_for_fold(const FoldPlan& plan, std::size_t fold);

// Fraction of pun-bearing contexts whose pun sits in the second half of the
// sentence: index i counts as second half iff i >= ceil(n/2).
double second_half_fraction(const std::vector<Context>& contexts);
bool in_second_half(std::size_t index, std::size_t n);

enum class CorpusFormat { kXml, kTsv };
CorpusFormat parse_corpus_format(const std::string& name);

// TSV: one context per line, `id <TAB> space-separated tokens <TAB> pun_index_or_-1`.
// XML: root element wrapping one element per context (`id` attribute) whose
// children are tokens (`id` attribute + surface text). Gold annotations come
// from side files: detection `context_id <TAB> 0|1`, location
// `context_id <TAB> token_id`. A detection file alone cannot place the pun,
// so positive labels without a location file are an error; when both files
// are given they must agree.
std::vector<Context> load_corpus(const std::string& path, CorpusFormat format,
                                 const std::string& detection_gold_path = "",
                                 const std::string& location_gold_path = "");

}  // namespace puntag
