#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "puntag/corpus.hpp"
#include "puntag/embeddings.hpp"
#include "puntag/encoder.hpp"
#include "puntag/evaluation.hpp"
#include "puntag/training.hpp"

namespace puntag {

// A full cross-validation experiment: data, model dimensions, training
// knobs, and output location. All randomness flows from `seed` through
// documented derivations (fold assignment, per-fold run seeds, per-epoch
// shuffles, parameter init).
struct ExperimentConfig {
  std::string corpus_path;
  CorpusFormat corpus_format = CorpusFormat::kXml;
  std::string detection_gold_path;  // xml only, optional
  std::string location_gold_path;   // xml only, optional

  // Empty path = no pretrained vectors: every word row stays zero and the
  // model relies on the character pathway.
  std::string embeddings_path;
  std::size_t embedding_dim = 100;

  TagScheme scheme = TagScheme::bpa();
  bool use_position_feature = true;
  bool constrained_decode = false;

  std::size_t folds = 10;
  double dev_fraction = 0.1;
  std::uint64_t seed = 1;

  real learning_rate = real(0.015);
  std::size_t max_epochs = 50;
  real gradient_clip = real(5.0);
  DevMetric dev_metric = DevMetric::kLocationF1;

  EncoderConfig encoder;

  std::string output_dir;  // empty: nothing is written
  std::size_t jobs = 1;    // concurrent fold runs
  bool save_models = false;  // persist each fold's model under output_dir

  // Verbatim echo written to <output_dir>/config.txt so a run can be
  // reproduced from its artifacts alone.
  std::string resolved_config_text;

  TrainConfig train_config() const;
};

struct ExperimentResult {
  MetricsReport report;
  std::vector<std::vector<PredictionRecord>> fold_predictions;
  std::vector<TrainLog> fold_logs;
};

// k-fold cross-validation with pooled scoring; writes per-fold prediction
// and log files, the pooled predictions, the report, and the config echo.
ExperimentResult run_crossval(const ExperimentConfig& config);

// Detect-then-locate comparison: drops every no-pun context (perfect
// detection assumed) and scores location only. Errors if no context has
// a pun.
ExperimentResult run_pipeline(const ExperimentConfig& config);

// `key \t value` lines: contexts, with_pun, second_half_fraction.
std::string corpus_stats_report(const std::vector<Context>& contexts);

}  // namespace puntag
