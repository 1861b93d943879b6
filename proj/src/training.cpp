#include "puntag/training.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>

#include "puntag/util.hpp"

namespace puntag {

DevMetric parse_dev_metric(const std::string& name) {
  if (name == "detection_f1") return DevMetric::kDetectionF1;
  if (name == "location_f1") return DevMetric::kLocationF1;
  if (name == "combined") return DevMetric::kCombined;
  throw std::runtime_error("unknown dev metric '" + name +
                           "' (expected detection_f1, location_f1, or combined)");
}

std::string dev_metric_name(DevMetric metric) {
  switch (metric) {
    case DevMetric::kDetectionF1: return "detection_f1";
    case DevMetric::kLocationF1: return "location_f1";
    case DevMetric::kCombined: return "combined";
  }
  throw std::runtime_error("invalid dev metric value");
}

std::string TrainLog::to_tsv() const {
  std::ostringstream out;
  out << "epoch\tmean_nll\tdev_score\n";
  out << std::fixed << std::setprecision(6);
  for (const EpochStats& e : epochs) {
    out << e.epoch << '\t' << e.mean_nll << '\t' << e.dev_score << '\n';
  }
  out << "# best_epoch\t" << best_epoch << '\n';
  return out.str();
}

namespace {

double dev_score_of(Model& model, const std::vector<Context>& dev_set,
                    const TrainConfig& config) {
  std::vector<PredictionRecord> preds;
  preds.reserve(dev_set.size());
  for (const Context& ctx : dev_set) {
    preds.push_back(PredictionRecord::from_tags(ctx.id, model.predict(ctx)));
  }
  switch (config.dev_metric) {
    case DevMetric::kDetectionF1:
      return detection_metrics(preds, dev_set).f1;
    case DevMetric::kLocationF1:
      return location_metrics(preds, dev_set, /*gold_pun_only=*/true).f1;
    case DevMetric::kCombined: {
      double det = detection_metrics(preds, dev_set).f1;
      double loc = location_metrics(preds, dev_set, /*gold_pun_only=*/true).f1;
      return (det + loc) / 2;
    }
  }
  throw std::runtime_error("invalid dev metric value");
}

void clip_gradients(const std::vector<Parameter*>& params, real max_norm) {
  double sq = 0;
  for (const Parameter* p : params) {
    for (std::size_t i = 0; i < p->grad.numel(); ++i) {
      sq += static_cast<double>(p->grad[i]) * static_cast<double>(p->grad[i]);
    }
  }
  double norm = std::sqrt(sq);
  if (norm <= static_cast<double>(max_norm)) return;
  real scale = static_cast<real>(static_cast<double>(max_norm) / norm);
  for (Parameter* p : params) {
    for (std::size_t i = 0; i < p->grad.numel(); ++i) p->grad[i] *= scale;
  }
}

}  // namespace

TrainLog train(Model& model, const std::vector<Context>& train_set,
               const std::vector<Context>& dev_set, const TrainConfig& config) {
  if (train_set.empty()) throw std::runtime_error("training requires a non-empty training set");
  if (config.max_epochs == 0) throw std::runtime_error("max_epochs must be positive");
  if (config.learning_rate < 0) throw std::runtime_error("learning_rate must be non-negative");
  if (!(model.scheme == config.scheme)) {
    throw std::runtime_error("config scheme '" + config.scheme.name() +
                             "' does not match the model's scheme '" + model.scheme.name() + "'");
  }
  if (model.encoder.config.use_position_feature != config.use_position_feature) {
    throw std::runtime_error("config position-feature flag does not match the model's encoder");
  }
  for (const Context& ctx : train_set) ctx.validate();
  for (const Context& ctx : dev_set) ctx.validate();

  std::vector<Parameter*> params = model.trainable_params();
  std::set<std::string> visited;

  TrainLog log;
  std::vector<Tensor> best_values;
  double best_score = -1;  // any observed dev score beats this
  std::vector<std::size_t> order(train_set.size());
  std::iota(order.begin(), order.end(), 0);

  for (std::size_t epoch = 1; epoch <= config.max_epochs; ++epoch) {
    auto rng = make_rng(derive_seed(config.seed, {kSeedShuffle, epoch}));
    std::shuffle(order.begin(), order.end(), rng);

    double total_nll = 0;
    for (std::size_t step = 0; step < order.size(); ++step) {
      const Context& ctx = train_set[order[step]];
      visited.insert(ctx.id);

      Graph g;
      Value loss = model.loss(g, ctx);
      double nll = static_cast<double>(g.value(loss)[0]);
      if (!std::isfinite(nll)) {
        throw std::runtime_error("non-finite loss at epoch " + std::to_string(epoch) + ", step " +
                                 std::to_string(step + 1) + ", instance '" + ctx.id + "'");
      }
      total_nll += nll;

      for (Parameter* p : params) p->zero_grad();
      g.backward(loss);
      if (config.gradient_clip > 0) clip_gradients(params, config.gradient_clip);
      for (Parameter* p : params) {
        for (std::size_t i = 0; i < p->value.numel(); ++i) {
          p->value[i] -= config.learning_rate * p->grad[i];
        }
      }
    }

    EpochStats stats;
    stats.epoch = epoch;
    stats.mean_nll = total_nll / static_cast<double>(order.size());
    stats.dev_score = dev_set.empty() ? 0 : dev_score_of(model, dev_set, config);
    log.epochs.push_back(stats);

    if (dev_set.empty()) {
      log.best_epoch = epoch;  // no dev split: keep the final epoch
    } else if (stats.dev_score > best_score) {
      best_score = stats.dev_score;
      log.best_epoch = epoch;
      best_values.clear();
      for (const Parameter* p : params) best_values.push_back(p->value);
    }
  }

  if (!dev_set.empty()) {
    for (std::size_t i = 0; i < params.size(); ++i) params[i]->value = best_values[i];
  }
  log.visited_ids.assign(visited.begin(), visited.end());
  return log;
}

FoldResult run_fold(const std::vector<Context>& contexts, std::size_t fold, const FoldPlan& plan,
                    const TrainConfig& config, const EncoderConfig& encoder_config,
                    const EmbeddingTable& pretrained, bool constrained_decode,
                    const std::string& model_save_dir) {
  if (plan.assignments.size() != contexts.size()) {
    throw std::runtime_error("fold plan covers " + std::to_string(plan.assignments.size()) +
                             " contexts but " + std::to_string(contexts.size()) + " were given");
  }
  FoldSplit split = split_for_fold(plan, fold);
  auto gather = [&contexts](const std::vector<std::size_t>& indices) {
    std::vector<Context> out;
    out.reserve(indices.size());
    for (std::size_t i : indices) out.push_back(contexts[i]);
    return out;
  };
  std::vector<Context> train_set = gather(split.train);
  std::vector<Context> dev_set = gather(split.dev);
  std::vector<Context> test_set = gather(split.test);

  EncoderConfig fold_encoder = encoder_config;
  fold_encoder.use_position_feature = config.use_position_feature;

  std::uint64_t fold_seed = derive_seed(config.seed, {kSeedFoldRun, fold});
  TrainConfig fold_config = config;
  fold_config.seed = fold_seed;

  // Vocabulary and parameters come from this fold's training portion
  // (SGD split plus dev split); test-fold-only words map to unknown.
  std::vector<Context> training_portion = train_set;
  training_portion.insert(training_portion.end(), dev_set.begin(), dev_set.end());
  Model model = Model::build(config.scheme, fold_encoder, training_portion, pretrained, fold_seed);

  FoldResult result;
  result.log = train(model, train_set, dev_set, fold_config);
  if (!model_save_dir.empty()) model.save(model_save_dir);
  result.predictions.reserve(test_set.size());
  for (const Context& ctx : test_set) {
    result.predictions.push_back(
        PredictionRecord::from_tags(ctx.id, model.predict(ctx, constrained_decode)));
  }
  return result;
}

}  // namespace puntag
