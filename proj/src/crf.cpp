#include "puntag/crf.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "puntag/util.hpp"

namespace puntag {

CrfParams::CrfParams(std::size_t num_tags_, std::size_t dim_)
    : num_tags(num_tags_),
      dim(dim_),
      weights("crf.weights", Tensor::zeros({(num_tags_ + 1) * num_tags_, dim_})),
      bias("crf.bias", Tensor::zeros({(num_tags_ + 1) * num_tags_})) {
  if (num_tags == 0 || dim == 0) {
    throw std::runtime_error("crf: tag count and input dimension must be positive");
  }
}

std::size_t CrfParams::pair_row(std::size_t y_prev, std::size_t y) const {
  if (y >= num_tags) {
    throw std::runtime_error("crf: tag " + std::to_string(y) +
                             " out of range (start may not appear as the current tag)");
  }
  if (y_prev > num_tags) {
    throw std::runtime_error("crf: previous tag " + std::to_string(y_prev) + " out of range");
  }
  return y_prev * num_tags + y;
}

void CrfParams::init(std::uint64_t seed) {
  auto rng = make_rng(derive_seed(seed, {kSeedInit, 99}));
  const std::size_t rows = (num_tags + 1) * num_tags;
  const real bound = std::sqrt(real(6) / real(dim + rows));
  std::uniform_real_distribution<real> dist(-bound, bound);
  for (std::size_t i = 0; i < weights.value.numel(); ++i) weights.value[i] = dist(rng);
  bias.value.fill(real(0));
}

namespace {

void check_inputs(const std::vector<Value>& zs, const CrfParams& params) {
  if (zs.empty()) throw std::runtime_error("crf: empty input sequence");
  (void)params;
}

void check_gold(const std::vector<Value>& zs, const TagSequence& gold, const CrfParams& params) {
  if (gold.tags.size() != zs.size()) {
    throw std::runtime_error("crf: " + std::to_string(zs.size()) + " input vectors but " +
                             std::to_string(gold.tags.size()) + " gold tags");
  }
  if (gold.scheme.size() != params.num_tags) {
    throw std::runtime_error("crf: scheme " + gold.scheme.name() + " has " +
                             std::to_string(gold.scheme.size()) + " tags but parameters expect " +
                             std::to_string(params.num_tags));
  }
}

// Per-position score vectors: scores[i][y_prev * T + y] for all pairs at once.
std::vector<Value> all_pair_scores(Graph& g, const std::vector<Value>& zs, CrfParams& params) {
  Value w = g.param(params.weights);
  Value b = g.param(params.bias);
  std::vector<Value> scores;
  scores.reserve(zs.size());
  for (Value z : zs) scores.push_back(g.add(g.matvec(w, z), b));
  return scores;
}

Value sequence_score_from(Graph& g, const std::vector<Value>& scores, const TagSequence& gold,
                          const CrfParams& params) {
  Value total = g.input(Tensor::scalar(0));
  std::size_t prev = params.start_index();
  for (std::size_t i = 0; i < gold.tags.size(); ++i) {
    std::size_t row = params.pair_row(prev, static_cast<std::size_t>(gold.tags[i]));
    total = g.add(total, g.slice(scores[i], row, 1));
    prev = static_cast<std::size_t>(gold.tags[i]);
  }
  return total;
}

Value log_partition_from(Graph& g, const std::vector<Value>& scores, const CrfParams& params) {
  const std::size_t t = params.num_tags;
  // alpha over the first position: only start-prefixed rows are reachable.
  Value alpha = g.slice(scores[0], t * t, t);
  for (std::size_t i = 1; i < scores.size(); ++i) {
    // pair matrix m[y_prev][y]; add alpha down every column, reduce over rows
    Value m = g.reshape(g.slice(scores[i], 0, t * t), {t, t});
    alpha = g.logsumexp_cols(g.add_col(m, alpha));
  }
  return g.logsumexp(alpha);
}

}  // namespace

Value pair_score(Graph& g, Value z, std::size_t y_prev, std::size_t y, CrfParams& params) {
  std::size_t row = params.pair_row(y_prev, y);
  Value w_row = g.gather_row(params.weights, row);
  Value b_row = g.slice(g.param(params.bias), row, 1);
  return g.add(g.dot(w_row, z), b_row);
}

Value sequence_score(Graph& g, const std::vector<Value>& zs, const TagSequence& gold,
                     CrfParams& params) {
  check_inputs(zs, params);
  check_gold(zs, gold, params);
  return sequence_score_from(g, all_pair_scores(g, zs, params), gold, params);
}

Value log_partition(Graph& g, const std::vector<Value>& zs, CrfParams& params) {
  check_inputs(zs, params);
  return log_partition_from(g, all_pair_scores(g, zs, params), params);
}

Value nll(Graph& g, const std::vector<Value>& zs, const TagSequence& gold, CrfParams& params) {
  check_inputs(zs, params);
  check_gold(zs, gold, params);
  std::vector<Value> scores = all_pair_scores(g, zs, params);
  return g.sub(log_partition_from(g, scores, params),
               sequence_score_from(g, scores, gold, params));
}

TagSequence viterbi(const std::vector<Tensor>& zs, const CrfParams& params,
                    const TagScheme& scheme, bool constrained) {
  if (zs.empty()) throw std::runtime_error("crf: empty input sequence");
  if (scheme.size() != params.num_tags) {
    throw std::runtime_error("crf: scheme " + scheme.name() + " has " +
                             std::to_string(scheme.size()) + " tags but parameters expect " +
                             std::to_string(params.num_tags));
  }
  if (constrained && scheme.variant != SchemeVariant::kBPA) {
    throw std::runtime_error("crf: constrained decoding is defined only for the bpa scheme");
  }
  const std::size_t t = params.num_tags;
  const std::size_t n = zs.size();
  const std::size_t start = params.start_index();
  const double neg_inf = -std::numeric_limits<double>::infinity();

  for (const Tensor& z : zs) {
    if (z.rank() != 1 || z.numel() != params.dim) {
      throw std::runtime_error("crf: input vector shape " + z.shape_str() +
                               " does not match parameter dimension " +
                               std::to_string(params.dim));
    }
  }

  // BPA transition mask; every other (y_prev, y) is forbidden when constrained.
  auto allowed = [&](std::size_t y_prev, std::size_t y) {
    if (!constrained) return true;
    if (y_prev == start) return y == 0 || y == 1;  // start -> B | P
    if (y_prev == 0) return y == 0 || y == 1;      // B -> B | P
    if (y_prev == 1) return y == 2;                // P -> A
    return y == 2;                                 // A -> A
  };
  // Same summation order as the scoring oracle so exact ties align.
  auto score = [&](std::size_t i, std::size_t y_prev, std::size_t y) {
    std::size_t row = y_prev * t + y;
    double s = 0;
    for (std::size_t j = 0; j < params.dim; ++j) {
      s += double(params.weights.value.at(row, j)) * double(zs[i][j]);
    }
    return s + double(params.bias.value[row]);
  };

  std::vector<std::vector<double>> delta(n, std::vector<double>(t, neg_inf));
  std::vector<std::vector<std::size_t>> back(n, std::vector<std::size_t>(t, 0));
  for (std::size_t y = 0; y < t; ++y) {
    if (allowed(start, y)) delta[0][y] = score(0, start, y);
  }
  for (std::size_t i = 1; i < n; ++i) {
    for (std::size_t y = 0; y < t; ++y) {
      for (std::size_t y_prev = 0; y_prev < t; ++y_prev) {
        if (!allowed(y_prev, y) || delta[i - 1][y_prev] == neg_inf) continue;
        double cand = delta[i - 1][y_prev] + score(i, y_prev, y);
        if (cand > delta[i][y]) {  // strict: ties keep the lowest y_prev
          delta[i][y] = cand;
          back[i][y] = y_prev;
        }
      }
    }
  }

  std::size_t best = 0;
  double best_score = neg_inf;
  for (std::size_t y = 0; y < t; ++y) {
    if (delta[n - 1][y] > best_score) {
      best_score = delta[n - 1][y];
      best = y;
    }
  }
  if (best_score == neg_inf) throw std::runtime_error("crf: no admissible tag sequence");

  TagSequence out;
  out.scheme = scheme;
  out.tags.assign(n, 0);
  for (std::size_t i = n; i-- > 0;) {
    out.tags[i] = static_cast<int>(best);
    if (i > 0) best = back[i][best];
  }
  return out;
}

}  // namespace puntag
