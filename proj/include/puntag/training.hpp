#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "puntag/evaluation.hpp"
#include "puntag/model.hpp"

namespace puntag {

// Metric used to pick the best epoch on the development split.
enum class DevMetric { kDetectionF1, kLocationF1, kCombined };

DevMetric parse_dev_metric(const std::string& name);
std::string dev_metric_name(DevMetric metric);

struct TrainConfig {
  real learning_rate = real(0.015);
  std::size_t max_epochs = 50;
  std::uint64_t seed = 0;
  TagScheme scheme = TagScheme::bpa();
  bool use_position_feature = true;
  // Per-instance global-norm gradient clip; 0 disables clipping.
  real gradient_clip = real(5.0);
  DevMetric dev_metric = DevMetric::kLocationF1;
};

struct EpochStats {
  std::size_t epoch = 0;  // 1-based
  double mean_nll = 0;
  double dev_score = 0;  // 0 when the dev split is empty
};

struct TrainLog {
  std::vector<EpochStats> epochs;
  std::size_t best_epoch = 0;  // epoch whose parameters the model keeps
  std::vector<std::string> visited_ids;  // every id the SGD loop touched

  std::string to_tsv() const;
};

// Plain SGD, batch size one, with per-epoch reshuffling. The model keeps the
// parameters of the epoch with the best dev score (ties keep the earliest);
// with an empty dev split it keeps the final epoch.
TrainLog train(Model& model, const std::vector<Context>& train_set,
               const std::vector<Context>& dev_set, const TrainConfig& config);

struct FoldResult {
  std::vector<PredictionRecord> predictions;  // one per held-out context
  TrainLog log;
};

// Trains a fresh model on the fold's train split and tags its test split.
// A non-empty model_save_dir persists the fold's trained model there.
FoldResult run_fold(const std::vector<Context>& contexts, std::size_t fold,
                    const FoldPlan& plan, const TrainConfig& config,
                    const EncoderConfig& encoder_config, const EmbeddingTable& pretrained,
                    bool constrained_decode = false, const std::string& model_save_dir = "");

}  // namespace puntag
