#include "puntag/selftest.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <sstream>
#include <vector>

#include "puntag/crf.hpp"
#include "puntag/experiment.hpp"
#include "puntag/model.hpp"
#include "puntag/training.hpp"
#include "puntag/util.hpp"

namespace puntag::selftest {

namespace {

std::string fmt(double v) {
  std::ostringstream out;
  out << v;
  return out.str();
}

// ---- independent brute-force reference (no graph, no DP) ----

double ref_pair_score(const Tensor& weights, const Tensor& bias, const Tensor& z,
                      std::size_t num_tags, std::size_t y_prev, std::size_t y) {
  std::size_t row = y_prev * num_tags + y;
  double s = 0;
  for (std::size_t j = 0; j < z.numel(); ++j) {
    s += static_cast<double>(weights.at(row, j)) * static_cast<double>(z[j]);
  }
  return s + static_cast<double>(bias[row]);
}

double ref_sequence_score(const Tensor& weights, const Tensor& bias,
                          const std::vector<Tensor>& zs, std::size_t num_tags,
                          const std::vector<int>& tags) {
  double s = 0;
  std::size_t prev = num_tags;  // start
  for (std::size_t i = 0; i < zs.size(); ++i) {
    s += ref_pair_score(weights, bias, zs[i], num_tags, prev, static_cast<std::size_t>(tags[i]));
    prev = static_cast<std::size_t>(tags[i]);
  }
  return s;
}

void for_each_sequence(std::size_t n, std::size_t num_tags,
                       const std::function<void(const std::vector<int>&)>& visit) {
  std::vector<int> tags(n, 0);
  while (true) {
    visit(tags);
    std::size_t i = 0;
    while (i < n && tags[i] == static_cast<int>(num_tags) - 1) tags[i++] = 0;
    if (i == n) return;
    ++tags[i];
  }
}

double ref_log_partition(const Tensor& weights, const Tensor& bias,
                         const std::vector<Tensor>& zs, std::size_t num_tags) {
  std::vector<double> scores;
  for_each_sequence(zs.size(), num_tags, [&](const std::vector<int>& tags) {
    scores.push_back(ref_sequence_score(weights, bias, zs, num_tags, tags));
  });
  double m = *std::max_element(scores.begin(), scores.end());
  double sum = 0;
  for (double s : scores) sum += std::exp(s - m);
  return m + std::log(sum);
}

// Smaller = later positions prefer lower tags; matches the decoder's
// backpointer tie-break.
bool reverse_lex_less(const std::vector<int>& a, const std::vector<int>& b) {
  for (std::size_t i = a.size(); i-- > 0;) {
    if (a[i] != b[i]) return a[i] < b[i];
  }
  return false;
}

std::vector<int> ref_argmax(const Tensor& weights, const Tensor& bias,
                            const std::vector<Tensor>& zs, std::size_t num_tags) {
  std::vector<int> best;
  double best_score = 0;
  for_each_sequence(zs.size(), num_tags, [&](const std::vector<int>& tags) {
    double s = ref_sequence_score(weights, bias, zs, num_tags, tags);
    if (best.empty() || s > best_score ||
        (s == best_score && reverse_lex_less(tags, best))) {
      best = tags;
      best_score = s;
    }
  });
  return best;
}

template <typename Rng>
void fill_uniform(Tensor& t, Rng& rng, double lo, double hi) {
  std::uniform_real_distribution<double> dist(lo, hi);
  for (std::size_t i = 0; i < t.numel(); ++i) t[i] = static_cast<real>(dist(rng));
}

template <typename Rng>
std::vector<Tensor> random_features(Rng& rng, std::size_t n, std::size_t dim) {
  std::vector<Tensor> zs;
  for (std::size_t i = 0; i < n; ++i) {
    Tensor z = Tensor::zeros({dim});
    fill_uniform(z, rng, -2.0, 2.0);
    zs.push_back(std::move(z));
  }
  return zs;
}

}  // namespace

CheckResult crf_oracle_equivalence() {
  CheckResult result{"crf_oracle_equivalence", false, ""};
  std::mt19937_64 rng(101);
  const std::size_t num_tags = 3;
  double worst = 0;
  std::size_t viterbi_matches = 0;
  const std::size_t trials = 200;
  for (std::size_t trial = 0; trial < trials; ++trial) {
    std::size_t n = 1 + rng() % 6;
    std::size_t dim = 2 + rng() % 4;
    CrfParams params(num_tags, dim);
    fill_uniform(params.weights.value, rng, -1.5, 1.5);
    fill_uniform(params.bias.value, rng, -1.0, 1.0);
    std::vector<Tensor> zs = random_features(rng, n, dim);

    Graph g;
    std::vector<Value> zv;
    for (const Tensor& z : zs) zv.push_back(g.input(z));
    double log_z = static_cast<double>(g.value(log_partition(g, zv, params))[0]);
    double ref = ref_log_partition(params.weights.value, params.bias.value, zs, num_tags);
    worst = std::max(worst, std::abs(log_z - ref));

    TagSequence decoded = viterbi(zs, params, TagScheme::bpa());
    if (decoded.tags == ref_argmax(params.weights.value, params.bias.value, zs, num_tags)) {
      ++viterbi_matches;
    }
  }
  result.passed = worst <= 1e-6 && viterbi_matches == trials;
  result.detail = "max |log_partition - enumeration| = " + fmt(worst) + "; viterbi matched " +
                  std::to_string(viterbi_matches) + "/" + std::to_string(trials);
  return result;
}

CheckResult normalization() {
  CheckResult result{"normalization", false, ""};
  std::mt19937_64 rng(202);
  const std::size_t num_tags = 3;
  double worst = 0;
  for (std::size_t trial = 0; trial < 50; ++trial) {
    std::size_t n = 1 + rng() % 5;
    std::size_t dim = 2 + rng() % 3;
    CrfParams params(num_tags, dim);
    fill_uniform(params.weights.value, rng, -1.5, 1.5);
    fill_uniform(params.bias.value, rng, -1.0, 1.0);
    std::vector<Tensor> zs = random_features(rng, n, dim);

    Graph pg;
    std::vector<Value> pzv;
    for (const Tensor& z : zs) pzv.push_back(pg.input(z));
    double log_z = static_cast<double>(pg.value(log_partition(pg, pzv, params))[0]);

    double total = 0;
    for_each_sequence(n, num_tags, [&](const std::vector<int>& tags) {
      Graph g;
      std::vector<Value> zv;
      for (const Tensor& z : zs) zv.push_back(g.input(z));
      TagSequence seq{TagScheme::bpa(), tags};
      double s = static_cast<double>(g.value(sequence_score(g, zv, seq, params))[0]);
      total += std::exp(s - log_z);
    });
    worst = std::max(worst, std::abs(total - 1.0));
  }
  result.passed = worst <= 1e-9;
  result.detail = "max |sum of probabilities - 1| = " + fmt(worst) + " over 50 instances";
  return result;
}

CheckResult end_to_end_gradients() {
  CheckResult result{"end_to_end_gradients", false, ""};

  Context c1;
  c1.id = "t1";
  c1.tokens = {"paws", "for", "thought"};
  c1.gold_pun_index = 0;
  Context c2;
  c2.id = "t2";
  c2.tokens = {"plain", "sailing", "ahead", "now"};
  c2.gold_pun_index = 2;
  std::vector<Context> corpus = {c1, c2};

  EncoderConfig cfg;
  cfg.char_emb_dim = 4;
  cfg.word_emb_dim = 5;
  cfg.char_lstm_hidden = 3;
  cfg.word_lstm_hidden = 4;
  cfg.highway_layers = 1;
  Model model = Model::build(TagScheme::bpa(), cfg, corpus, EmbeddingTable(5), 303);

  auto total_loss = [&]() {
    double total = 0;
    for (const Context& ctx : corpus) {
      Graph g;
      total += static_cast<double>(g.value(model.loss(g, ctx))[0]);
    }
    return total;
  };

  std::vector<Parameter*> params = model.trainable_params();
  for (Parameter* p : params) p->zero_grad();
  for (const Context& ctx : corpus) {
    Graph g;
    Value loss = model.loss(g, ctx);
    g.backward(loss);
  }

  std::mt19937_64 rng(303);
  double worst_rel = 0;
  std::string worst_param = "none";
  bool all_groups_live = true;
  for (Parameter* p : params) {
    double norm = 0;
    for (std::size_t i = 0; i < p->grad.numel(); ++i) {
      norm += static_cast<double>(p->grad[i]) * static_cast<double>(p->grad[i]);
    }
    if (norm == 0) {
      all_groups_live = false;
      worst_param = p->name + " (zero gradient)";
      continue;
    }
    std::vector<std::size_t> probes = {0, p->value.numel() - 1};
    for (int extra = 0; extra < 4; ++extra) probes.push_back(rng() % p->value.numel());
    for (std::size_t idx : probes) {
      const double h = 1e-5;
      real saved = p->value[idx];
      p->value[idx] = saved + static_cast<real>(h);
      double up = total_loss();
      p->value[idx] = saved - static_cast<real>(h);
      double down = total_loss();
      p->value[idx] = saved;
      double numeric = (up - down) / (2 * h);
      double analytic = static_cast<double>(p->grad[idx]);
      double rel = std::abs(analytic - numeric) /
                   std::max({std::abs(analytic), std::abs(numeric), 1e-6});
      if (rel > worst_rel) {
        worst_rel = rel;
        worst_param = p->name;
      }
    }
  }
  result.passed = all_groups_live && worst_rel <= 1e-4;
  result.detail = "worst relative gradient error " + fmt(worst_rel) + " at " + worst_param +
                  " across " + std::to_string(params.size()) + " parameter groups";
  return result;
}

CheckResult scheme_invariants() {
  CheckResult result{"scheme_invariants", false, ""};
  std::mt19937_64 rng(404);

  std::size_t round_trips = 0;
  std::size_t shape_ok = 0;
  const std::size_t trials = 10000;
  for (std::size_t trial = 0; trial < trials; ++trial) {
    Context ctx;
    ctx.id = "r" + std::to_string(trial);
    std::size_t n = 1 + rng() % 10;
    ctx.tokens.assign(n, "w");
    bool has_pun = rng() % 3 != 0;
    if (has_pun) ctx.gold_pun_index = rng() % n;

    TagScheme scheme = (trial % 2 == 0) ? TagScheme::np() : TagScheme::bpa();
    TagSequence tags = encode_tags(ctx, scheme);
    Decoded decoded = decode_tags(tags);
    bool ok = decoded.detected == has_pun;
    if (has_pun) {
      ok = ok && decoded.pun_indices == std::vector<std::size_t>{*ctx.gold_pun_index};
    } else {
      ok = ok && decoded.pun_indices.empty();
    }
    if (ok) ++round_trips;

    if (scheme.size() == 3) {
      // gold BPA must look like B* (P A*)?
      std::size_t i = 0;
      while (i < n && tags.tags[i] == 0) ++i;
      bool good = i == n;
      if (!good && tags.tags[i] == 1) {
        ++i;
        while (i < n && tags.tags[i] == 2) ++i;
        good = i == n;
      }
      if (good) ++shape_ok;
    } else {
      ++shape_ok;
    }
  }

  std::size_t constrained_ok = 0;
  const std::size_t decodes = 1000;
  for (std::size_t trial = 0; trial < decodes; ++trial) {
    std::size_t n = 1 + rng() % 8;
    std::size_t dim = 3;
    CrfParams params(3, dim);
    fill_uniform(params.weights.value, rng, -2.0, 2.0);
    fill_uniform(params.bias.value, rng, -1.0, 1.0);
    TagSequence decoded = viterbi(random_features(rng, n, dim), params, TagScheme::bpa(),
                                  /*constrained=*/true);
    std::size_t i = 0;
    while (i < n && decoded.tags[i] == 0) ++i;
    bool good = i == n;
    if (!good && decoded.tags[i] == 1) {
      ++i;
      while (i < n && decoded.tags[i] == 2) ++i;
      good = i == n;
    }
    if (good && std::count(decoded.tags.begin(), decoded.tags.end(), 1) <= 1) ++constrained_ok;
  }

  result.passed = round_trips == trials && shape_ok == trials && constrained_ok == decodes;
  result.detail = std::to_string(round_trips) + "/" + std::to_string(trials) +
                  " round trips, " + std::to_string(constrained_ok) + "/" +
                  std::to_string(decodes) + " constrained decodes well-formed";
  return result;
}

CheckResult synthetic_learnability() {
  CheckResult result{"synthetic_learnability", false, ""};
  std::mt19937_64 rng(505);

  // Filler vocabulary over a-p; the sentinel's q/z characters appear
  // nowhere else, so the character pathway suffices to spot it.
  std::vector<std::string> fillers;
  for (int w = 0; w < 60; ++w) {
    std::size_t len = 3 + rng() % 5;
    std::string word;
    for (std::size_t c = 0; c < len; ++c) word += static_cast<char>('a' + rng() % 16);
    fillers.push_back(word);
  }
  std::vector<Context> corpus;
  for (int i = 0; i < 500; ++i) {
    Context ctx;
    ctx.id = "syn" + std::to_string(i);
    std::size_t n = 4 + rng() % 5;
    for (std::size_t j = 0; j < n; ++j) ctx.tokens.push_back(fillers[rng() % fillers.size()]);
    std::size_t pun = rng() % n;
    ctx.tokens[pun] = "qzqzqz";
    ctx.gold_pun_index = pun;
    corpus.push_back(std::move(ctx));
  }
  std::vector<Context> train_set(corpus.begin(), corpus.begin() + 400);
  std::vector<Context> held_out(corpus.begin() + 400, corpus.end());

  EncoderConfig cfg;
  cfg.char_emb_dim = 8;
  cfg.word_emb_dim = 8;  // no pretrained vectors: word rows stay zero
  cfg.char_lstm_hidden = 16;
  cfg.word_lstm_hidden = 24;
  cfg.highway_layers = 1;
  Model model = Model::build(TagScheme::bpa(), cfg, train_set, EmbeddingTable(8), 505);

  TrainConfig train_cfg;
  train_cfg.learning_rate = real(0.25);
  train_cfg.max_epochs = 20;
  train_cfg.seed = 505;
  train_cfg.dev_metric = DevMetric::kLocationF1;
  TrainLog log = train(model, train_set, held_out, train_cfg);

  double best = 0;
  std::size_t best_epoch = 0;
  for (const EpochStats& e : log.epochs) {
    if (e.dev_score > best) {
      best = e.dev_score;
      best_epoch = e.epoch;
    }
  }
  result.passed = best >= 0.99;
  result.detail = "held-out location F1 " + fmt(best) + " at epoch " +
                  std::to_string(best_epoch) + " (target 0.99 within 20)";
  return result;
}

CheckResult metric_hand_oracle() {
  CheckResult result{"metric_hand_oracle", false, ""};

  std::vector<Context> golds;
  std::vector<PredictionRecord> preds;
  TagScheme np = TagScheme::np();
  auto add = [&](const std::string& id, bool pun, std::vector<int> tags) {
    Context ctx;
    ctx.id = id;
    ctx.tokens = {"a", "b", "c", "d"};
    if (pun) ctx.gold_pun_index = 2;
    golds.push_back(ctx);
    preds.push_back(PredictionRecord::from_tags(id, TagSequence{np, std::move(tags)}));
  };
  // hand-counted: detection TP=6 FP=2 FN=2 TN=2; location correct=4 of
  // predicted=8 over gold=8 pun contexts
  add("g1", true, {0, 0, 1, 0});
  add("g2", true, {0, 0, 1, 0});
  add("g3", true, {0, 1, 1, 0});
  add("g4", true, {1, 0, 1, 0});
  add("g5", true, {0, 1, 0, 0});
  add("g6", true, {1, 0, 0, 0});
  add("g7", true, {0, 0, 0, 0});
  add("g8", true, {0, 0, 0, 0});
  add("n1", false, {0, 1, 0, 0});
  add("n2", false, {1, 0, 1, 0});
  add("n3", false, {0, 0, 0, 0});
  add("n4", false, {0, 0, 0, 0});

  MetricsReport report = evaluate(preds, golds, /*gold_pun_only=*/true, "np");
  bool counts_ok = report.detection_counts.tp == 6 && report.detection_counts.fp == 2 &&
                   report.detection_counts.fn == 2 && report.detection_counts.tn == 2 &&
                   report.location_counts.correct == 4 && report.location_counts.predicted == 8 &&
                   report.location_counts.gold == 8;
  bool metrics_ok = report.detection.precision == 0.75 && report.detection.recall == 0.75 &&
                    report.detection.f1 == 0.75 && report.location.precision == 0.5 &&
                    report.location.recall == 0.5 && report.location.f1 == 0.5;
  result.passed = counts_ok && metrics_ok;
  result.detail = "detection P/R/F1 = " + fmt(report.detection.precision) + "/" +
                  fmt(report.detection.recall) + "/" + fmt(report.detection.f1) +
                  ", location = " + fmt(report.location.f1) + " (expected 0.75 and 0.5)";
  return result;
}

std::vector<CheckResult> run_gating_suite() {
  return {
      crf_oracle_equivalence(), normalization(),          end_to_end_gradients(),
      scheme_invariants(),      synthetic_learnability(), metric_hand_oracle(),
  };
}

namespace {

ExperimentConfig benchmark_config(const BenchmarkPaths& paths, bool homographic,
                                  std::size_t jobs) {
  ExperimentConfig cfg;
  cfg.corpus_path = homographic ? paths.homographic_xml : paths.heterographic_xml;
  cfg.detection_gold_path = homographic ? paths.homographic_det : paths.heterographic_det;
  cfg.location_gold_path = homographic ? paths.homographic_loc : paths.heterographic_loc;
  cfg.corpus_format = CorpusFormat::kXml;
  cfg.embeddings_path = paths.embeddings;
  cfg.embedding_dim = paths.embedding_dim;
  cfg.jobs = jobs;
  return cfg;
}

}  // namespace

CheckResult corpus_statistics(const BenchmarkPaths& paths) {
  CheckResult result{"corpus_statistics", false, ""};
  auto hom = load_corpus(paths.homographic_xml, CorpusFormat::kXml, paths.homographic_det,
                         paths.homographic_loc);
  auto het = load_corpus(paths.heterographic_xml, CorpusFormat::kXml, paths.heterographic_det,
                         paths.heterographic_loc);
  std::size_t hom_puns = 0, het_puns = 0;
  for (const Context& c : hom) hom_puns += c.has_pun();
  for (const Context& c : het) het_puns += c.has_pun();
  double hom_frac = second_half_fraction(hom);
  double het_frac = second_half_fraction(het);

  bool counts_ok = hom.size() == 2250 && hom_puns == 1607 && het.size() == 1780 &&
                   het_puns == 1271;
  bool fracs_ok = std::abs(hom_frac - 0.88) <= 0.02 && std::abs(het_frac - 0.92) <= 0.02;
  result.passed = counts_ok && fracs_ok;
  result.detail = "homographic " + std::to_string(hom.size()) + "/" + std::to_string(hom_puns) +
                  " second-half " + fmt(hom_frac) + "; heterographic " +
                  std::to_string(het.size()) + "/" + std::to_string(het_puns) +
                  " second-half " + fmt(het_frac);
  return result;
}

std::vector<CheckResult> benchmark_reproduction(const BenchmarkPaths& paths, std::size_t jobs) {
  std::vector<CheckResult> results;
  struct Target {
    bool homographic;
    double detection_f1, location_f1;  // percent, Table-style
  };
  const Target targets[] = {{true, 91.0, 80.2}, {false, 89.6, 79.4}};

  bool bpa_beats_np = true;
  bool pipeline_below = true;
  std::string direction_detail;

  for (const Target& target : targets) {
    ExperimentConfig bpa_cfg = benchmark_config(paths, target.homographic, jobs);
    bpa_cfg.scheme = TagScheme::bpa();
    ExperimentResult bpa = run_crossval(bpa_cfg);
    double det = 100 * bpa.report.detection.f1;
    double loc = 100 * bpa.report.location.f1;

    CheckResult table;
    table.name = std::string("table_targets_") + (target.homographic ? "homographic" : "heterographic");
    table.passed = std::abs(det - target.detection_f1) <= 3.0 &&
                   std::abs(loc - target.location_f1) <= 3.0;
    table.detail = "BPA detection F1 " + fmt(det) + " (target " + fmt(target.detection_f1) +
                   " +-3), location F1 " + fmt(loc) + " (target " + fmt(target.location_f1) +
                   " +-3)";
    results.push_back(table);

    ExperimentConfig np_cfg = benchmark_config(paths, target.homographic, jobs);
    np_cfg.scheme = TagScheme::np();
    ExperimentResult np = run_crossval(np_cfg);
    bpa_beats_np = bpa_beats_np && bpa.report.detection.f1 > np.report.detection.f1 &&
                   bpa.report.location.f1 > np.report.location.f1;

    ExperimentConfig pipe_cfg = benchmark_config(paths, target.homographic, jobs);
    pipe_cfg.scheme = TagScheme::bpa();
    ExperimentResult pipe = run_pipeline(pipe_cfg);
    pipeline_below = pipeline_below && pipe.report.location.f1 < bpa.report.location.f1;

    direction_detail += std::string(target.homographic ? "hom" : "het") + ": NP det/loc " +
                        fmt(100 * np.report.detection.f1) + "/" + fmt(100 * np.report.location.f1) +
                        ", pipeline loc " + fmt(100 * pipe.report.location.f1) + "; ";
  }

  results.push_back({"bpa_outperforms_np", bpa_beats_np, direction_detail});
  results.push_back({"pipeline_below_joint", pipeline_below, direction_detail});
  return results;
}

}  // namespace puntag::selftest
