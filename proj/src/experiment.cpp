#include "puntag/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <filesystem>
#include <iomanip>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "puntag/util.hpp"

namespace puntag {

namespace fs = std::filesystem;

TrainConfig ExperimentConfig::train_config() const {
  TrainConfig cfg;
  cfg.learning_rate = learning_rate;
  cfg.max_epochs = max_epochs;
  cfg.seed = seed;
  cfg.scheme = scheme;
  cfg.use_position_feature = use_position_feature;
  cfg.gradient_clip = gradient_clip;
  cfg.dev_metric = dev_metric;
  return cfg;
}

namespace {

EmbeddingTable load_embeddings(const ExperimentConfig& config) {
  if (config.embeddings_path.empty()) return EmbeddingTable(config.embedding_dim);
  return EmbeddingTable::load(config.embeddings_path, config.embedding_dim);
}

std::vector<FoldResult> run_all_folds(const std::vector<Context>& contexts,
                                      const ExperimentConfig& config) {
  if (config.folds < 2) throw std::runtime_error("cross-validation requires at least 2 folds");
  EmbeddingTable pretrained = load_embeddings(config);
  EncoderConfig encoder = config.encoder;
  encoder.use_position_feature = config.use_position_feature;
  encoder.word_emb_dim = pretrained.dim();
  encoder.validate();
  TrainConfig train_cfg = config.train_config();

  FoldPlan plan = make_folds(contexts, config.folds, config.dev_fraction, config.seed);
  std::vector<FoldResult> results(config.folds);

  auto model_dir = [&config](std::size_t fold) -> std::string {
    if (!config.save_models || config.output_dir.empty()) return "";
    return (fs::path(config.output_dir) / ("model_fold_" + std::to_string(fold))).string();
  };
  if (config.save_models && !config.output_dir.empty()) {
    fs::create_directories(config.output_dir);
  }

  std::size_t jobs = std::max<std::size_t>(1, std::min(config.jobs, config.folds));
  if (jobs == 1) {
    for (std::size_t fold = 0; fold < config.folds; ++fold) {
      results[fold] = run_fold(contexts, fold, plan, train_cfg, encoder, pretrained,
                               config.constrained_decode, model_dir(fold));
    }
    return results;
  }

  // Folds are independent; each fold's randomness is derived from its
  // index, so the schedule cannot change the results.
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(jobs);
  std::vector<std::thread> workers;
  workers.reserve(jobs);
  for (std::size_t w = 0; w < jobs; ++w) {
    workers.emplace_back([&, w] {
      try {
        for (std::size_t fold = next.fetch_add(1); fold < config.folds;
             fold = next.fetch_add(1)) {
          results[fold] = run_fold(contexts, fold, plan, train_cfg, encoder, pretrained,
                                   config.constrained_decode, model_dir(fold));
        }
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (std::thread& t : workers) t.join();
  for (const std::exception_ptr& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return results;
}

void write_outputs(const ExperimentConfig& config, const ExperimentResult& result) {
  if (config.output_dir.empty()) return;
  fs::create_directories(config.output_dir);
  fs::path dir(config.output_dir);

  std::string pooled;
  for (std::size_t fold = 0; fold < result.fold_predictions.size(); ++fold) {
    const auto& preds = result.fold_predictions[fold];
    write_file((dir / ("fold_" + std::to_string(fold) + ".pred.tsv")).string(),
               render_predictions(preds));
    write_file((dir / ("fold_" + std::to_string(fold) + ".train.log")).string(),
               result.fold_logs[fold].to_tsv());
    pooled += render_predictions(preds);
  }
  write_file((dir / "predictions.tsv").string(), pooled);
  write_file((dir / "report.tsv").string(), render_report(result.report));
  if (!config.resolved_config_text.empty()) {
    write_file((dir / "config.txt").string(), config.resolved_config_text);
  }
}

ExperimentResult collect(const ExperimentConfig& config, const std::vector<Context>& contexts,
                         std::vector<FoldResult> folds, bool pipeline) {
  ExperimentResult result;
  result.fold_predictions.reserve(folds.size());
  result.fold_logs.reserve(folds.size());
  for (FoldResult& fr : folds) {
    result.fold_predictions.push_back(std::move(fr.predictions));
    result.fold_logs.push_back(std::move(fr.log));
  }
  if (pipeline) {
    std::vector<PredictionRecord> pooled;
    for (const auto& preds : result.fold_predictions) {
      pooled.insert(pooled.end(), preds.begin(), preds.end());
    }
    result.report = pipeline_eval(pooled, contexts, config.scheme.name());
  } else {
    result.report =
        accumulate(result.fold_predictions, contexts, /*gold_pun_only=*/true, config.scheme.name());
  }
  write_outputs(config, result);
  return result;
}

}  // namespace

ExperimentResult run_crossval(const ExperimentConfig& config) {
  std::vector<Context> contexts = load_corpus(config.corpus_path, config.corpus_format,
                                              config.detection_gold_path,
                                              config.location_gold_path);
  return collect(config, contexts, run_all_folds(contexts, config), /*pipeline=*/false);
}

ExperimentResult run_pipeline(const ExperimentConfig& config) {
  std::vector<Context> contexts = load_corpus(config.corpus_path, config.corpus_format,
                                              config.detection_gold_path,
                                              config.location_gold_path);
  std::vector<Context> pun_only;
  for (const Context& ctx : contexts) {
    if (ctx.has_pun()) pun_only.push_back(ctx);
  }
  if (pun_only.empty()) {
    throw std::runtime_error("pipeline mode needs at least one pun-bearing context");
  }
  return collect(config, pun_only, run_all_folds(pun_only, config), /*pipeline=*/true);
}

std::string corpus_stats_report(const std::vector<Context>& contexts) {
  std::size_t with_pun = 0;
  for (const Context& ctx : contexts) {
    if (ctx.has_pun()) ++with_pun;
  }
  std::ostringstream out;
  out << "contexts\t" << contexts.size() << '\n';
  out << "with_pun\t" << with_pun << '\n';
  out << "second_half_fraction\t";
  if (with_pun == 0) {
    out << "undefined";
  } else {
    out << std::fixed << std::setprecision(4) << second_half_fraction(contexts);
  }
  out << '\n';
  return out.str();
}

}  // namespace puntag
