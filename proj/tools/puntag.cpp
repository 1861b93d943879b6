// Command-line front end: cross-validated experiments, the detect-then-
// locate comparison, single-file tagging with a saved model, corpus
// statistics, and the built-in check suite.

#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "puntag/experiment.hpp"
#include "puntag/model.hpp"
#include "puntag/selftest.hpp"
#include "puntag/util.hpp"

namespace {

using namespace puntag;

// String-typed mirror of the enum-valued config fields, filled by CLI11.
struct ExperimentOptions {
  ExperimentConfig cfg;
  std::string format = "xml";
  std::string scheme = "bpa";
  std::string dev_metric = "location_f1";
  bool no_position = false;
};

void add_experiment_options(CLI::App* cmd, ExperimentOptions& opt) {
  cmd->add_option("--corpus", opt.cfg.corpus_path, "corpus file")->required();
  cmd->add_option("--format", opt.format, "corpus format: xml or tsv")->capture_default_str();
  cmd->add_option("--detection-gold", opt.cfg.detection_gold_path,
                  "detection gold side file (xml corpora)");
  cmd->add_option("--location-gold", opt.cfg.location_gold_path,
                  "location gold side file (xml corpora)");
  cmd->add_option("--embeddings", opt.cfg.embeddings_path,
                  "pretrained word vectors, text format (absent: zero vectors)");
  cmd->add_option("--embedding-dim", opt.cfg.embedding_dim, "word vector width")
      ->capture_default_str();
  cmd->add_option("--scheme", opt.scheme, "tagging scheme: np or bpa")->capture_default_str();
  cmd->add_flag("--no-position", opt.no_position, "drop the position-indicator feature");
  cmd->add_flag("--constrained", opt.cfg.constrained_decode,
                "restrict decoding to well-formed tag shapes (bpa only)");
  cmd->add_flag("--save-models", opt.cfg.save_models,
                "persist each fold's trained model under the output directory");
  cmd->add_option("--folds", opt.cfg.folds, "cross-validation folds")->capture_default_str();
  cmd->add_option("--dev-fraction", opt.cfg.dev_fraction,
                  "fraction of each training portion held out for model selection")
      ->capture_default_str();
  cmd->add_option("--seed", opt.cfg.seed, "top-level random seed")->capture_default_str();
  cmd->add_option("--learning-rate", opt.cfg.learning_rate, "SGD learning rate")
      ->capture_default_str();
  cmd->add_option("--epochs", opt.cfg.max_epochs, "training epochs per fold")
      ->capture_default_str();
  cmd->add_option("--clip", opt.cfg.gradient_clip, "max gradient norm per step (0 disables)")
      ->capture_default_str();
  cmd->add_option("--dev-metric", opt.dev_metric,
                  "epoch selection metric: detection_f1, location_f1, or combined")
      ->capture_default_str();
  cmd->add_option("--char-emb-dim", opt.cfg.encoder.char_emb_dim, "character embedding width")
      ->capture_default_str();
  cmd->add_option("--char-hidden", opt.cfg.encoder.char_lstm_hidden,
                  "character LSTM hidden size")
      ->capture_default_str();
  cmd->add_option("--word-hidden", opt.cfg.encoder.word_lstm_hidden, "word LSTM hidden size")
      ->capture_default_str();
  cmd->add_option("--highway-layers", opt.cfg.encoder.highway_layers,
                  "highway layers over character features")
      ->capture_default_str();
  cmd->add_option("--jobs", opt.cfg.jobs, "concurrent fold runs")->capture_default_str();
  cmd->add_option("--out", opt.cfg.output_dir, "output directory")->required();
}

ExperimentConfig resolve(CLI::App* cmd, ExperimentOptions& opt) {
  opt.cfg.corpus_format = parse_corpus_format(opt.format);
  opt.cfg.scheme = TagScheme::parse(opt.scheme);
  opt.cfg.dev_metric = parse_dev_metric(opt.dev_metric);
  opt.cfg.use_position_feature = !opt.no_position;
  opt.cfg.encoder.word_emb_dim = opt.cfg.embedding_dim;
  // Sectioned so `--config <file> <command>` reruns the experiment as-is.
  opt.cfg.resolved_config_text =
      "[" + cmd->get_name() + "]\n" +
      cmd->config_to_str(/*default_also=*/true, /*write_description=*/true);
  return opt.cfg;
}

struct PredictOptions {
  std::string model_dir;
  std::string input_path;
  std::string output_path;  // empty: stdout
  std::string scheme;       // optional cross-check against the model
  bool constrained = false;
};

// Input: `id <TAB> space-separated tokens` per line; blank lines skipped.
std::vector<Context> load_unlabeled(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open input file: " + path);
  std::vector<Context> contexts;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    std::vector<std::string> fields = split(line, '\t');
    if (fields.size() != 2) {
      throw std::runtime_error(path + ": line " + std::to_string(line_no) +
                               ": expected `id<TAB>tokens`, got " +
                               std::to_string(fields.size()) + " fields");
    }
    Context ctx;
    ctx.id = trim(fields[0]);
    ctx.tokens = split_ws(fields[1]);
    ctx.validate();
    contexts.push_back(std::move(ctx));
  }
  return contexts;
}

int run_predict(const PredictOptions& opt) {
  Model model = Model::load(opt.model_dir);
  if (!opt.scheme.empty() && !(TagScheme::parse(opt.scheme) == model.scheme)) {
    throw std::runtime_error("requested scheme '" + opt.scheme + "' but the model was trained as '" +
                             model.scheme.name() + "'");
  }
  std::ostringstream out;
  for (const Context& ctx : load_unlabeled(opt.input_path)) {
    TagSequence tags = model.predict(ctx, opt.constrained);
    Decoded decoded = decode_tags(tags);
    out << ctx.id << '\t' << (decoded.detected ? "true" : "false") << '\t';
    if (decoded.pun_indices.empty()) {
      out << '-';
    } else {
      for (std::size_t i = 0; i < decoded.pun_indices.size(); ++i) {
        out << (i ? "," : "") << decoded.pun_indices[i];
      }
    }
    out << '\t';
    for (std::size_t i = 0; i < tags.tags.size(); ++i) {
      out << (i ? " " : "") << tags.scheme.tag_name(tags.tags[i]);
    }
    out << '\n';
  }
  if (opt.output_path.empty()) {
    std::cout << out.str();
  } else {
    write_file(opt.output_path, out.str());
  }
  return 0;
}

int run_selftest() {
  bool all_passed = true;
  for (const selftest::CheckResult& result : selftest::run_gating_suite()) {
    std::printf("[%s] %-28s %s\n", result.passed ? "PASS" : "FAIL", result.name.c_str(),
                result.detail.c_str());
    all_passed = all_passed && result.passed;
  }
  return all_passed ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Joint pun detection and location by sequence tagging"};
  app.require_subcommand(1);
  app.set_config("--config", "",
                 "option file written by a previous run; give it before the "
                 "command name, command-line flags override it");

  ExperimentOptions crossval_opt;
  CLI::App* crossval = app.add_subcommand(
      "crossval", "k-fold cross-validation with pooled detection/location scores");
  add_experiment_options(crossval, crossval_opt);

  ExperimentOptions pipeline_opt;
  CLI::App* pipeline = app.add_subcommand(
      "pipeline", "location-only scoring over pun contexts (perfect detection assumed)");
  add_experiment_options(pipeline, pipeline_opt);

  PredictOptions predict_opt;
  CLI::App* predict = app.add_subcommand("predict", "tag sentences with a saved model");
  predict->add_option("--model", predict_opt.model_dir, "saved model directory")->required();
  predict->add_option("--input", predict_opt.input_path, "`id<TAB>tokens` lines")->required();
  predict->add_option("--out", predict_opt.output_path, "output file (default: stdout)");
  predict->add_option("--scheme", predict_opt.scheme, "fail unless the model uses this scheme");
  predict->add_flag("--constrained", predict_opt.constrained,
                    "restrict decoding to well-formed tag shapes (bpa only)");

  struct {
    std::string corpus, format = "xml", detection_gold, location_gold;
  } stats_opt;
  CLI::App* stats = app.add_subcommand("stats", "corpus counts and pun-position statistics");
  stats->add_option("--corpus", stats_opt.corpus, "corpus file")->required();
  stats->add_option("--format", stats_opt.format, "corpus format: xml or tsv")
      ->capture_default_str();
  stats->add_option("--detection-gold", stats_opt.detection_gold, "detection gold side file");
  stats->add_option("--location-gold", stats_opt.location_gold, "location gold side file");

  CLI::App* selftest_cmd =
      app.add_subcommand("selftest", "run the built-in oracle and property checks");

  try {
    app.parse(argc, argv);

    if (crossval->parsed()) {
      ExperimentResult result = run_crossval(resolve(crossval, crossval_opt));
      std::cout << render_report(result.report);
      return 0;
    }
    if (pipeline->parsed()) {
      ExperimentResult result = run_pipeline(resolve(pipeline, pipeline_opt));
      std::cout << render_report(result.report);
      return 0;
    }
    if (predict->parsed()) return run_predict(predict_opt);
    if (stats->parsed()) {
      std::cout << corpus_stats_report(
          load_corpus(stats_opt.corpus, parse_corpus_format(stats_opt.format),
                      stats_opt.detection_gold, stats_opt.location_gold));
      return 0;
    }
    if (selftest_cmd->parsed()) return run_selftest();
    return 1;
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
