#include "doctest.h"

#include <stdexcept>
#include <string>
#include <vector>

#include "puntag/evaluation.hpp"

using namespace puntag;

namespace {

Context make_ctx(std::string id, std::size_t n, int pun) {
  Context c;
  c.id = std::move(id);
  c.tokens.assign(n, "w");
  if (pun >= 0) c.gold_pun_index = static_cast<std::size_t>(pun);
  return c;
}

PredictionRecord pred_np(const std::string& id, const std::vector<int>& tags) {
  return PredictionRecord::from_tags(id, TagSequence{TagScheme::np(), tags});
}

// Twelve instances with hand-counted outcomes. Gold puns sit at index 2 of
// four-token sentences; the last four contexts have no pun.
//   detection: TP=6 FP=2 FN=2 TN=2        -> P = R = F1 = 6/8
//   location (gold-pun scope): correct=4, predicted=8, gold=8 -> P = R = 1/2
//   location (all contexts):   predicted=11              -> P = 4/11, R = 1/2
struct Fixture {
  std::vector<Context> golds;
  std::vector<PredictionRecord> preds;
};

Fixture hand_fixture() {
  Fixture f;
  for (int i = 1; i <= 8; ++i) f.golds.push_back(make_ctx("g" + std::to_string(i), 4, 2));
  for (int i = 1; i <= 4; ++i) f.golds.push_back(make_ctx("n" + std::to_string(i), 4, -1));
  f.preds = {
      pred_np("g1", {0, 0, 1, 0}),  // one pun predicted, correct
      pred_np("g2", {0, 0, 1, 0}),  // correct
      pred_np("g3", {0, 1, 1, 0}),  // two predicted, one correct
      pred_np("g4", {1, 0, 1, 0}),  // two predicted, one correct
      pred_np("g5", {0, 1, 0, 0}),  // one predicted, wrong position
      pred_np("g6", {1, 0, 0, 0}),  // wrong position
      pred_np("g7", {0, 0, 0, 0}),  // missed pun
      pred_np("g8", {0, 0, 0, 0}),  // missed pun
      pred_np("n1", {0, 1, 0, 0}),  // false alarm, one stray position
      pred_np("n2", {1, 0, 1, 0}),  // false alarm, two stray positions
      pred_np("n3", {0, 0, 0, 0}),  // true negative
      pred_np("n4", {0, 0, 0, 0}),  // true negative
  };
  return f;
}

}  // namespace

TEST_CASE("prediction records derive detection and positions from tags") {
  PredictionRecord r = pred_np("x", {0, 1, 0, 1});
  CHECK(r.context_id == "x");
  CHECK(r.detected);
  CHECK(r.pun_indices == std::vector<std::size_t>{1, 3});

  PredictionRecord none = pred_np("y", {0, 0});
  CHECK_FALSE(none.detected);
}

TEST_CASE("detection metrics on the hand fixture") {
  Fixture f = hand_fixture();
  MetricsReport report = evaluate(f.preds, f.golds, true, "np");
  CHECK(report.detection_counts.tp == 6);
  CHECK(report.detection_counts.fp == 2);
  CHECK(report.detection_counts.fn == 2);
  CHECK(report.detection_counts.tn == 2);
  CHECK(report.detection.precision == doctest::Approx(0.75));
  CHECK(report.detection.recall == doctest::Approx(0.75));
  CHECK(report.detection.f1 == doctest::Approx(0.75));
}

TEST_CASE("location metrics count every predicted position once") {
  Fixture f = hand_fixture();

  MetricsReport scoped = evaluate(f.preds, f.golds, true, "np");
  CHECK(scoped.location_counts.correct == 4);
  CHECK(scoped.location_counts.predicted == 8);
  CHECK(scoped.location_counts.gold == 8);
  CHECK(scoped.location.precision == doctest::Approx(0.5));
  CHECK(scoped.location.recall == doctest::Approx(0.5));
  CHECK(scoped.location.f1 == doctest::Approx(0.5));

  MetricsReport all = evaluate(f.preds, f.golds, false, "np");
  CHECK(all.location_counts.predicted == 11);
  CHECK(all.location.precision == doctest::Approx(4.0 / 11.0));
  CHECK(all.location.recall == doctest::Approx(0.5));
}

TEST_CASE("small hand-counted detection example") {
  // six instances: TP=2, FP=1, FN=1 -> P = R = F1 = 2/3
  std::vector<Context> golds = {make_ctx("a", 3, 1), make_ctx("b", 3, 0), make_ctx("c", 3, 2),
                                make_ctx("d", 3, -1), make_ctx("e", 3, -1), make_ctx("f", 3, -1)};
  std::vector<PredictionRecord> preds = {
      pred_np("a", {0, 1, 0}),  // TP
      pred_np("b", {1, 0, 0}),  // TP
      pred_np("c", {0, 0, 0}),  // FN
      pred_np("d", {0, 0, 1}),  // FP
      pred_np("e", {0, 0, 0}),  // TN
      pred_np("f", {0, 0, 0}),  // TN
  };
  Pr det = detection_metrics(preds, golds);
  CHECK(det.precision == doctest::Approx(2.0 / 3.0));
  CHECK(det.recall == doctest::Approx(2.0 / 3.0));
  CHECK(det.f1 == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("zero denominators report zero with a flag") {
  std::vector<Context> golds = {make_ctx("a", 3, 1)};
  std::vector<PredictionRecord> preds = {pred_np("a", {0, 0, 0})};
  MetricsReport report = evaluate(preds, golds, true, "np");
  CHECK(report.location.precision == 0.0);
  CHECK(report.location.recall == 0.0);
  CHECK(report.location.f1 == 0.0);
  CHECK(report.location.zero_precision_denominator);
  CHECK_FALSE(report.location.zero_recall_denominator);
  CHECK(report.detection.zero_precision_denominator);
}

TEST_CASE("a location-correct instance is always detection-correct") {
  Fixture f = hand_fixture();
  for (const PredictionRecord& pred : f.preds) {
    for (const Context& gold : f.golds) {
      if (gold.id != pred.context_id || !gold.has_pun()) continue;
      bool location_correct = false;
      for (std::size_t idx : pred.pun_indices) {
        if (idx == *gold.gold_pun_index) location_correct = true;
      }
      if (location_correct) CHECK(pred.detected);
    }
  }
}

TEST_CASE("detection ignores the identity of non-P tags") {
  std::vector<Context> golds = {make_ctx("a", 3, 1), make_ctx("b", 3, -1)};
  std::vector<PredictionRecord> np_preds = {pred_np("a", {0, 1, 0}), pred_np("b", {0, 0, 0})};
  std::vector<PredictionRecord> bpa_preds = {
      PredictionRecord::from_tags("a", TagSequence{TagScheme::bpa(), {0, 1, 2}}),
      PredictionRecord::from_tags("b", TagSequence{TagScheme::bpa(), {0, 0, 2}}),
  };
  Pr np = detection_metrics(np_preds, golds);
  Pr bpa = detection_metrics(bpa_preds, golds);
  CHECK(np.precision == bpa.precision);
  CHECK(np.recall == bpa.recall);
}

TEST_CASE("alignment errors name the offending id") {
  std::vector<Context> golds = {make_ctx("a", 3, 1)};
  std::vector<PredictionRecord> unknown = {pred_np("zz", {0, 1, 0})};
  CHECK_THROWS_WITH_AS(detection_metrics(unknown, golds), doctest::Contains("zz"),
                       std::runtime_error);

  std::vector<PredictionRecord> dup = {pred_np("a", {0, 1, 0}), pred_np("a", {0, 1, 0})};
  CHECK_THROWS_AS(detection_metrics(dup, golds), std::runtime_error);

  std::vector<PredictionRecord> missing = {};
  CHECK_THROWS_AS(detection_metrics(missing, golds), std::runtime_error);
}

TEST_CASE("pooled accumulation equals metrics on the concatenation") {
  Fixture f = hand_fixture();
  std::vector<std::vector<PredictionRecord>> folds = {
      {f.preds.begin(), f.preds.begin() + 5},
      {f.preds.begin() + 5, f.preds.begin() + 9},
      {f.preds.begin() + 9, f.preds.end()},
  };
  MetricsReport pooled = accumulate(folds, f.golds, true, "np");
  MetricsReport direct = evaluate(f.preds, f.golds, true, "np");
  CHECK(pooled.detection.f1 == direct.detection.f1);
  CHECK(pooled.location.f1 == direct.location.f1);
  CHECK(pooled.location_counts.predicted == direct.location_counts.predicted);

  // fold order cannot matter
  std::swap(folds[0], folds[2]);
  MetricsReport permuted = accumulate(folds, f.golds, true, "np");
  CHECK(permuted.detection.f1 == direct.detection.f1);

  folds.push_back({});
  CHECK_THROWS_AS(accumulate(folds, f.golds, true, "np"), std::runtime_error);
}

TEST_CASE("two-fold pooled example from hand counts") {
  // fold 1: TP=1, FP=0, FN=1; fold 2: TP=1, FP=1, FN=0 -> pooled P=2/3, R=2/3
  std::vector<Context> golds = {make_ctx("a", 2, 0), make_ctx("b", 2, 1), make_ctx("c", 2, 0),
                                make_ctx("d", 2, -1)};
  std::vector<std::vector<PredictionRecord>> folds = {
      {pred_np("a", {1, 0}), pred_np("b", {0, 0})},
      {pred_np("c", {1, 0}), pred_np("d", {1, 0})},
  };
  MetricsReport pooled = accumulate(folds, golds, true, "np");
  CHECK(pooled.detection_counts.tp == 2);
  CHECK(pooled.detection_counts.fp == 1);
  CHECK(pooled.detection_counts.fn == 1);
  CHECK(pooled.detection.precision == doctest::Approx(2.0 / 3.0));
  CHECK(pooled.detection.recall == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("pipeline evaluation rejects no-pun contexts") {
  std::vector<Context> golds = {make_ctx("a", 6, 4)};
  std::vector<PredictionRecord> preds = {
      PredictionRecord::from_tags("a", TagSequence{TagScheme::bpa(), {0, 0, 0, 0, 1, 2}})};
  MetricsReport report = pipeline_eval(preds, golds, "bpa");
  CHECK(report.location.f1 == doctest::Approx(1.0));
  CHECK(report.location_only);

  golds.push_back(make_ctx("b", 3, -1));
  preds.push_back(PredictionRecord::from_tags("b", TagSequence{TagScheme::bpa(), {0, 0, 0}}));
  CHECK_THROWS_AS(pipeline_eval(preds, golds, "bpa"), std::runtime_error);
}

TEST_CASE("report rendering emits metric and count rows") {
  Fixture f = hand_fixture();
  MetricsReport report = evaluate(f.preds, f.golds, true, "np");
  std::string text = render_report(report);
  CHECK(text.find("detection\tnp\t0.7500\t0.7500\t0.7500") != std::string::npos);
  CHECK(text.find("location\tnp\t0.5000\t0.5000\t0.5000") != std::string::npos);
  CHECK(text.find("tp\t6") != std::string::npos);
  CHECK(text.find("predicted\t8") != std::string::npos);
}
