#include "doctest.h"

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

using namespace std::string_literals;
namespace fs = std::filesystem;

namespace {

struct CliRun {
  int exit_code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  if (!in) return {};
  return std::string(std::istreambuf_iterator<char>(in), {});
}

CliRun run_cli(const std::string& args) {
  static int counter = 0;
  fs::path dir = fs::temp_directory_path() / "puntag_cli_io";
  fs::create_directories(dir);
  fs::path out_path = dir / ("out" + std::to_string(counter) + ".txt");
  fs::path err_path = dir / ("err" + std::to_string(counter) + ".txt");
  ++counter;

  std::string cmd = PUNTAG_CLI_PATH " "s + args + " > " + out_path.string() + " 2> " +
                    err_path.string();
  int status = std::system(cmd.c_str());
  CliRun run;
  run.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  run.out = slurp(out_path);
  run.err = slurp(err_path);
  return run;
}

// `id <TAB> tokens <TAB> pun index` corpus with a character-identifiable
// sentinel marking each pun.
std::string write_corpus(const fs::path& dir, std::size_t count) {
  std::mt19937_64 rng(42);
  const std::vector<std::string> fillers = {"amber", "basalt", "cobalt", "dune"};
  std::string body;
  for (std::size_t i = 0; i < count; ++i) {
    std::size_t n = 3 + rng() % 3;
    std::vector<std::string> tokens;
    for (std::size_t j = 0; j < n; ++j) tokens.push_back(fillers[rng() % fillers.size()]);
    long pun = -1;
    if (rng() % 3 != 0) {
      pun = static_cast<long>(rng() % n);
      tokens[static_cast<std::size_t>(pun)] = "quizzed";
    }
    body += "c" + std::to_string(i) + "\t";
    for (std::size_t j = 0; j < n; ++j) body += (j ? " " : "") + tokens[j];
    body += "\t" + std::to_string(pun) + "\n";
  }
  fs::create_directories(dir);
  fs::path path = dir / "corpus.tsv";
  std::ofstream(path) << body;
  return path.string();
}

std::string small_run_flags(const std::string& corpus, const std::string& out_dir) {
  return "--corpus " + corpus +
         " --format tsv --embedding-dim 4 --folds 3 --epochs 1 --seed 3"
         " --char-emb-dim 3 --char-hidden 2 --word-hidden 3 --out " +
         out_dir;
}

}  // namespace

TEST_CASE("crossval runs end to end and its outputs are reproducible") {
  fs::path dir = fs::temp_directory_path() / "puntag_cli_crossval";
  fs::remove_all(dir);
  std::string corpus = write_corpus(dir, 12);

  std::string out1 = (dir / "out1").string();
  CliRun first = run_cli("crossval " + small_run_flags(corpus, out1) + " --save-models");
  INFO(first.err);
  REQUIRE(first.exit_code == 0);
  CHECK(first.out.find("detection\tbpa") != std::string::npos);
  CHECK(first.out.find("location\tbpa") != std::string::npos);
  CHECK(fs::exists(fs::path(out1) / "report.tsv"));
  CHECK(fs::exists(fs::path(out1) / "predictions.tsv"));
  CHECK(fs::exists(fs::path(out1) / "config.txt"));
  CHECK(fs::exists(fs::path(out1) / "fold_2.train.log"));
  CHECK(fs::exists(fs::path(out1) / "model_fold_0" / "meta.json"));
  CHECK(fs::exists(fs::path(out1) / "model_fold_0" / "params.ckpt"));

  // the echoed config reproduces the run byte for byte
  std::string out2 = (dir / "out2").string();
  CliRun second = run_cli("--config " + out1 + "/config.txt crossval --out " + out2);
  INFO(second.err);
  REQUIRE(second.exit_code == 0);
  CHECK(slurp(fs::path(out1) / "predictions.tsv") == slurp(fs::path(out2) / "predictions.tsv"));
  CHECK(slurp(fs::path(out1) / "report.tsv") == slurp(fs::path(out2) / "report.tsv"));

  // the fold schedule is a performance knob, not a semantic one
  std::string out3 = (dir / "out3").string();
  CliRun parallel = run_cli("crossval " + small_run_flags(corpus, out3) + " --jobs 3");
  REQUIRE(parallel.exit_code == 0);
  CHECK(slurp(fs::path(out1) / "predictions.tsv") == slurp(fs::path(out3) / "predictions.tsv"));
}

TEST_CASE("predict tags an input file with a saved fold model") {
  fs::path dir = fs::temp_directory_path() / "puntag_cli_predict";
  fs::remove_all(dir);
  std::string corpus = write_corpus(dir, 12);
  std::string out = (dir / "out").string();
  REQUIRE(run_cli("crossval " + small_run_flags(corpus, out) + " --save-models").exit_code == 0);
  std::string model = out + "/model_fold_0";

  fs::path input = dir / "input.tsv";
  std::ofstream(input) << "p1\tamber quizzed dune\np2\tbasalt cobalt\n";
  fs::path tagged = dir / "tagged.tsv";
  CliRun run = run_cli("predict --model " + model + " --input " + input.string() + " --out " +
                       tagged.string());
  INFO(run.err);
  REQUIRE(run.exit_code == 0);
  std::string text = slurp(tagged);
  CHECK(text.find("p1\t") != std::string::npos);
  CHECK(text.find("p2\t") != std::string::npos);
  CHECK(std::count(text.begin(), text.end(), '\n') == 2);
  for (const std::string& line : {text.substr(0, text.find('\n'))}) {
    CHECK(std::count(line.begin(), line.end(), '\t') == 3);  // id, detected, index, tags
  }

  // deterministic: a second run emits identical bytes
  fs::path tagged2 = dir / "tagged2.tsv";
  REQUIRE(run_cli("predict --model " + model + " --input " + input.string() + " --out " +
                  tagged2.string())
              .exit_code == 0);
  CHECK(slurp(tagged) == slurp(tagged2));

  // empty input: empty output, success
  fs::path empty = dir / "empty.tsv";
  std::ofstream(empty) << "";
  CliRun empty_run = run_cli("predict --model " + model + " --input " + empty.string());
  CHECK(empty_run.exit_code == 0);
  CHECK(empty_run.out.empty());

  // scheme cross-check
  CliRun mismatch =
      run_cli("predict --model " + model + " --input " + input.string() + " --scheme np");
  CHECK(mismatch.exit_code != 0);
  CHECK(mismatch.err.find("np") != std::string::npos);

  // corrupted parameter file
  fs::path broken = dir / "broken_model";
  fs::copy(model, broken, fs::copy_options::recursive);
  std::ofstream(broken / "params.ckpt") << "garbage";
  CliRun corrupt = run_cli("predict --model " + broken.string() + " --input " + input.string());
  CHECK(corrupt.exit_code != 0);
}

TEST_CASE("pipeline reports location only") {
  fs::path dir = fs::temp_directory_path() / "puntag_cli_pipeline";
  fs::remove_all(dir);
  std::string corpus = write_corpus(dir, 12);
  std::string out = (dir / "pipe").string();
  CliRun run = run_cli("pipeline " + small_run_flags(corpus, out));
  INFO(run.err);
  REQUIRE(run.exit_code == 0);
  CHECK(run.out.find("location\tbpa") != std::string::npos);
  CHECK(run.out.find("detection") == std::string::npos);
}

TEST_CASE("stats prints corpus counts") {
  fs::path dir = fs::temp_directory_path() / "puntag_cli_stats";
  fs::remove_all(dir);
  std::string corpus = write_corpus(dir, 12);
  CliRun run = run_cli("stats --corpus " + corpus + " --format tsv");
  REQUIRE(run.exit_code == 0);
  CHECK(run.out.find("contexts\t12") != std::string::npos);
  CHECK(run.out.find("with_pun\t") != std::string::npos);
  CHECK(run.out.find("second_half_fraction\t") != std::string::npos);
}

TEST_CASE("bad invocations exit nonzero with a message") {
  fs::path dir = fs::temp_directory_path() / "puntag_cli_errors";
  fs::remove_all(dir);
  std::string corpus = write_corpus(dir, 9);

  CHECK(run_cli("").exit_code != 0);
  CHECK(run_cli("crossval --out " + (dir / "x").string()).exit_code != 0);  // corpus missing

  CliRun bad_emb = run_cli("crossval " + small_run_flags(corpus, (dir / "y").string()) +
                           " --embeddings /nonexistent/vectors.txt");
  CHECK(bad_emb.exit_code != 0);
  CHECK(bad_emb.err.find("/nonexistent/vectors.txt") != std::string::npos);

  CliRun bad_scheme = run_cli("crossval " + small_run_flags(corpus, (dir / "z").string()) +
                              " --scheme xyz");
  CHECK(bad_scheme.exit_code != 0);
}
