#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "puntag/experiment.hpp"
#include "puntag/util.hpp"

using namespace puntag;
namespace fs = std::filesystem;

namespace {

std::string write_tiny_corpus(const fs::path& dir, std::size_t count) {
  std::mt19937_64 rng(77);
  const std::vector<std::string> fillers = {"north", "south", "east", "west"};
  std::string body;
  for (std::size_t i = 0; i < count; ++i) {
    std::size_t n = 3 + rng() % 3;
    std::vector<std::string> tokens;
    for (std::size_t j = 0; j < n; ++j) tokens.push_back(fillers[rng() % fillers.size()]);
    long pun = -1;
    if (rng() % 3 != 0) {
      pun = static_cast<long>(rng() % n);
      tokens[static_cast<std::size_t>(pun)] = "quirk";
    }
    body += "t" + std::to_string(i) + "\t";
    for (std::size_t j = 0; j < n; ++j) body += (j ? " " : "") + tokens[j];
    body += "\t" + std::to_string(pun) + "\n";
  }
  fs::create_directories(dir);
  auto path = dir / "corpus.tsv";
  std::ofstream(path) << body;
  return path.string();
}

ExperimentConfig tiny_experiment(const fs::path& dir, std::size_t corpus_size) {
  ExperimentConfig cfg;
  cfg.corpus_path = write_tiny_corpus(dir, corpus_size);
  cfg.corpus_format = CorpusFormat::kTsv;
  cfg.embedding_dim = 4;
  cfg.scheme = TagScheme::bpa();
  cfg.folds = 3;
  cfg.dev_fraction = 0.15;
  cfg.seed = 7;
  cfg.max_epochs = 1;
  cfg.encoder.char_emb_dim = 3;
  cfg.encoder.word_emb_dim = 4;
  cfg.encoder.char_lstm_hidden = 2;
  cfg.encoder.word_lstm_hidden = 3;
  cfg.output_dir = (dir / "out").string();
  return cfg;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  REQUIRE(in.good());
  return std::string(std::istreambuf_iterator<char>(in), {});
}

}  // namespace

TEST_CASE("crossval writes predictions, logs, and a report") {
  auto dir = fs::temp_directory_path() / "puntag_exp_crossval";
  fs::remove_all(dir);
  ExperimentConfig cfg = tiny_experiment(dir, 15);
  cfg.resolved_config_text = "seed = 7\n";

  ExperimentResult result = run_crossval(cfg);
  CHECK(result.report.scheme_name == "bpa");
  REQUIRE(result.fold_predictions.size() == 3);

  std::size_t total = 0;
  for (std::size_t fold = 0; fold < 3; ++fold) {
    total += result.fold_predictions[fold].size();
    CHECK(fs::exists(dir / "out" / ("fold_" + std::to_string(fold) + ".pred.tsv")));
    CHECK(fs::exists(dir / "out" / ("fold_" + std::to_string(fold) + ".train.log")));
  }
  CHECK(total == 15);
  CHECK(slurp(dir / "out" / "report.tsv") == render_report(result.report));
  CHECK(slurp(dir / "out" / "config.txt") == "seed = 7\n");

  // pooled prediction file holds every context exactly once
  std::string pooled = slurp(dir / "out" / "predictions.tsv");
  for (std::size_t i = 0; i < 15; ++i) {
    CHECK(pooled.find("t" + std::to_string(i) + "\t") != std::string::npos);
  }
}

TEST_CASE("crossval output does not depend on the job count") {
  auto dir = fs::temp_directory_path() / "puntag_exp_jobs";
  fs::remove_all(dir);
  ExperimentConfig cfg = tiny_experiment(dir, 12);
  cfg.output_dir.clear();  // library mode: no files

  cfg.jobs = 1;
  ExperimentResult serial = run_crossval(cfg);
  cfg.jobs = 3;
  ExperimentResult parallel = run_crossval(cfg);

  REQUIRE(serial.fold_predictions.size() == parallel.fold_predictions.size());
  for (std::size_t fold = 0; fold < serial.fold_predictions.size(); ++fold) {
    const auto& a = serial.fold_predictions[fold];
    const auto& b = parallel.fold_predictions[fold];
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(a[i].context_id == b[i].context_id);
      CHECK(a[i].tags.tags == b[i].tags.tags);
    }
  }
  CHECK(render_report(serial.report) == render_report(parallel.report));
}

TEST_CASE("pipeline scopes to pun contexts and reports location only") {
  auto dir = fs::temp_directory_path() / "puntag_exp_pipeline";
  fs::remove_all(dir);
  ExperimentConfig cfg = tiny_experiment(dir, 15);
  cfg.output_dir = (dir / "pipe").string();

  ExperimentResult result = run_pipeline(cfg);
  CHECK(result.report.location_only);
  std::size_t total = 0;
  for (const auto& fold : result.fold_predictions) total += fold.size();
  // only the pun-bearing subset is scored
  CHECK(total < 15);
  CHECK(total == result.report.location_counts.gold);
  CHECK(fs::exists(dir / "pipe" / "report.tsv"));
}

TEST_CASE("pipeline refuses a corpus with no puns") {
  auto dir = fs::temp_directory_path() / "puntag_exp_nopun";
  fs::remove_all(dir);
  fs::create_directories(dir);
  auto path = dir / "corpus.tsv";
  std::ofstream(path) << "a\tnorth south east\t-1\nb\twest north\t-1\n";

  ExperimentConfig cfg;
  cfg.corpus_path = path.string();
  cfg.corpus_format = CorpusFormat::kTsv;
  cfg.embedding_dim = 4;
  cfg.folds = 2;
  cfg.seed = 1;
  cfg.max_epochs = 1;
  cfg.encoder.char_emb_dim = 3;
  cfg.encoder.word_emb_dim = 4;
  cfg.encoder.char_lstm_hidden = 2;
  cfg.encoder.word_lstm_hidden = 3;
  CHECK_THROWS_WITH_AS(run_pipeline(cfg), doctest::Contains("pun"), std::runtime_error);
}

TEST_CASE("a missing embedding file fails with its path in the message") {
  auto dir = fs::temp_directory_path() / "puntag_exp_noemb";
  fs::remove_all(dir);
  ExperimentConfig cfg = tiny_experiment(dir, 9);
  cfg.embeddings_path = "/nonexistent/vectors.txt";
  CHECK_THROWS_WITH_AS(run_crossval(cfg), doctest::Contains("/nonexistent/vectors.txt"),
                       std::runtime_error);
}

TEST_CASE("corpus statistics report counts and the second-half fraction") {
  std::vector<Context> contexts;
  Context a;
  a.id = "a";
  a.tokens = {"w", "w", "w", "w"};
  a.gold_pun_index = 3;
  Context b;
  b.id = "b";
  b.tokens = {"w", "w"};
  Context c;
  c.id = "c";
  c.tokens = {"w", "w", "w"};
  c.gold_pun_index = 0;
  contexts = {a, b, c};

  std::string report = corpus_stats_report(contexts);
  CHECK(report.find("contexts\t3") != std::string::npos);
  CHECK(report.find("with_pun\t2") != std::string::npos);
  CHECK(report.find("second_half_fraction\t0.5000") != std::string::npos);

  std::string empty_report = corpus_stats_report({});
  CHECK(empty_report.find("contexts\t0") != std::string::npos);
  CHECK(empty_report.find("second_half_fraction\tundefined") != std::string::npos);
}
