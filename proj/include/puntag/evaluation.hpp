#pragma once

#include <string>
#include <vector>

#include "puntag/corpus.hpp"
#include "puntag/tensor.hpp"

namespace puntag {

struct PredictionRecord {
  std::string context_id;
  TagSequence tags;
  bool detected = false;
  std::vector<std::size_t> pun_indices;

  static PredictionRecord from_tags(std::string id, TagSequence tags);
};

struct Pr {
  double precision = 0;
  double recall = 0;
  double f1 = 0;
  bool zero_precision_denominator = false;
  bool zero_recall_denominator = false;
};

struct DetectionCounts {
  std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
};

// Location is scored per predicted position: every P-tagged position
// enters the precision denominator once and is correct iff it equals the
// gold pun index; recall is over gold pun-bearing contexts in scope.
struct LocationCounts {
  std::size_t correct = 0, predicted = 0, gold = 0;
};

struct MetricsReport {
  std::string scheme_name;
  DetectionCounts detection_counts;
  LocationCounts location_counts;
  Pr detection;
  Pr location;
  bool location_only = false;  // pipeline mode: detection row suppressed
};

Pr metrics_from(const DetectionCounts& counts);
Pr metrics_from(const LocationCounts& counts);

// All metric entry points align predictions to gold contexts by id and
// require an exact bijection; any unknown, duplicate, or missing id is an
// error naming the id. gold_pun_only restricts location scoring to the
// contexts that actually contain a pun.
Pr detection_metrics(const std::vector<PredictionRecord>& preds,
                     const std::vector<Context>& golds);
Pr location_metrics(const std::vector<PredictionRecord>& preds, const std::vector<Context>& golds,
                    bool gold_pun_only);
MetricsReport evaluate(const std::vector<PredictionRecord>& preds,
                       const std::vector<Context>& golds, bool gold_pun_only,
                       const std::string& scheme_name);

// Pools raw predictions across folds and scores once; every fold must be
// present and non-empty.
MetricsReport accumulate(const std::vector<std::vector<PredictionRecord>>& fold_preds,
                         const std::vector<Context>& golds, bool gold_pun_only,
                         const std::string& scheme_name);

// Location-only scoring for the detect-then-locate comparison; the corpus
// must consist solely of pun-bearing contexts.
MetricsReport pipeline_eval(const std::vector<PredictionRecord>& preds,
                            const std::vector<Context>& golds, const std::string& scheme_name);

// Tab-separated rows: `task scheme P R F1`, then raw counts, then any
// zero-denominator flags.
std::string render_report(const MetricsReport& report);

// Prediction file line format: `context_id <TAB> space-separated tags`.
std::string render_predictions(const std::vector<PredictionRecord>& preds);

}  // namespace puntag
