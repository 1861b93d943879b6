#include "puntag/evaluation.hpp"

#include <iomanip>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace puntag {

PredictionRecord PredictionRecord::from_tags(std::string id, TagSequence tags_) {
  PredictionRecord r;
  r.context_id = std::move(id);
  r.tags = std::move(tags_);
  Decoded d = decode_tags(r.tags);
  r.detected = d.detected;
  r.pun_indices = std::move(d.pun_indices);
  return r;
}

namespace {

double safe_div(std::size_t num, std::size_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

void finish(Pr& pr) {
  pr.f1 = (pr.precision + pr.recall) > 0
              ? 2 * pr.precision * pr.recall / (pr.precision + pr.recall)
              : 0.0;
}

// id-keyed bijection between predictions and gold contexts
std::vector<std::pair<const PredictionRecord*, const Context*>> align(
    const std::vector<PredictionRecord>& preds, const std::vector<Context>& golds) {
  std::unordered_map<std::string, const Context*> by_id;
  by_id.reserve(golds.size());
  for (const Context& gold : golds) {
    if (!by_id.emplace(gold.id, &gold).second) {
      throw std::runtime_error("duplicate gold context id '" + gold.id + "'");
    }
  }
  std::vector<std::pair<const PredictionRecord*, const Context*>> pairs;
  pairs.reserve(preds.size());
  std::unordered_map<std::string, bool> seen;
  for (const PredictionRecord& pred : preds) {
    auto it = by_id.find(pred.context_id);
    if (it == by_id.end()) {
      throw std::runtime_error("prediction for unknown context id '" + pred.context_id + "'");
    }
    if (!seen.emplace(pred.context_id, true).second) {
      throw std::runtime_error("duplicate prediction for context id '" + pred.context_id + "'");
    }
    pairs.emplace_back(&pred, it->second);
  }
  if (pairs.size() != golds.size()) {
    for (const Context& gold : golds) {
      if (!seen.count(gold.id)) {
        throw std::runtime_error("no prediction for context id '" + gold.id + "'");
      }
    }
  }
  return pairs;
}

DetectionCounts detection_counts_of(
    const std::vector<std::pair<const PredictionRecord*, const Context*>>& pairs) {
  DetectionCounts c;
  for (const auto& [pred, gold] : pairs) {
    if (gold->has_pun()) {
      ++(pred->detected ? c.tp : c.fn);
    } else {
      ++(pred->detected ? c.fp : c.tn);
    }
  }
  return c;
}

LocationCounts location_counts_of(
    const std::vector<std::pair<const PredictionRecord*, const Context*>>& pairs,
    bool gold_pun_only) {
  LocationCounts c;
  for (const auto& [pred, gold] : pairs) {
    if (gold_pun_only && !gold->has_pun()) continue;
    if (gold->has_pun()) ++c.gold;
    c.predicted += pred->pun_indices.size();
    if (gold->has_pun()) {
      for (std::size_t idx : pred->pun_indices) {
        if (idx == *gold->gold_pun_index) ++c.correct;
      }
    }
  }
  return c;
}

}  // namespace

Pr metrics_from(const DetectionCounts& counts) {
  Pr pr;
  pr.zero_precision_denominator = counts.tp + counts.fp == 0;
  pr.zero_recall_denominator = counts.tp + counts.fn == 0;
  pr.precision = safe_div(counts.tp, counts.tp + counts.fp);
  pr.recall = safe_div(counts.tp, counts.tp + counts.fn);
  finish(pr);
  return pr;
}

Pr metrics_from(const LocationCounts& counts) {
  Pr pr;
  pr.zero_precision_denominator = counts.predicted == 0;
  pr.zero_recall_denominator = counts.gold == 0;
  pr.precision = safe_div(counts.correct, counts.predicted);
  pr.recall = safe_div(counts.correct, counts.gold);
  finish(pr);
  return pr;
}

Pr detection_metrics(const std::vector<PredictionRecord>& preds,
                     const std::vector<Context>& golds) {
  return metrics_from(detection_counts_of(align(preds, golds)));
}

Pr location_metrics(const std::vector<PredictionRecord>& preds, const std::vector<Context>& golds,
                    bool gold_pun_only) {
  return metrics_from(location_counts_of(align(preds, golds), gold_pun_only));
}

MetricsReport evaluate(const std::vector<PredictionRecord>& preds,
                       const std::vector<Context>& golds, bool gold_pun_only,
                       const std::string& scheme_name) {
  auto pairs = align(preds, golds);
  MetricsReport report;
  report.scheme_name = scheme_name;
  report.detection_counts = detection_counts_of(pairs);
  report.location_counts = location_counts_of(pairs, gold_pun_only);
  report.detection = metrics_from(report.detection_counts);
  report.location = metrics_from(report.location_counts);
  return report;
}

MetricsReport accumulate(const std::vector<std::vector<PredictionRecord>>& fold_preds,
                         const std::vector<Context>& golds, bool gold_pun_only,
                         const std::string& scheme_name) {
  std::vector<PredictionRecord> pooled;
  for (std::size_t fold = 0; fold < fold_preds.size(); ++fold) {
    if (fold_preds[fold].empty()) {
      throw std::runtime_error("fold " + std::to_string(fold) + " has no predictions");
    }
    pooled.insert(pooled.end(), fold_preds[fold].begin(), fold_preds[fold].end());
  }
  return evaluate(pooled, golds, gold_pun_only, scheme_name);
}

MetricsReport pipeline_eval(const std::vector<PredictionRecord>& preds,
                            const std::vector<Context>& golds, const std::string& scheme_name) {
  for (const Context& gold : golds) {
    if (!gold.has_pun()) {
      throw std::runtime_error("pipeline evaluation saw no-pun context '" + gold.id + "'");
    }
  }
  MetricsReport report = evaluate(preds, golds, true, scheme_name);
  report.location_only = true;
  return report;
}

namespace {
std::string fixed4(double v) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(4) << v;
  return out.str();
}
}  // namespace

std::string render_report(const MetricsReport& report) {
  std::ostringstream out;
  out << "task\tscheme\tP\tR\tF1\n";
  if (!report.location_only) {
    out << "detection\t" << report.scheme_name << '\t' << fixed4(report.detection.precision)
        << '\t' << fixed4(report.detection.recall) << '\t' << fixed4(report.detection.f1) << '\n';
  }
  out << "location\t" << report.scheme_name << '\t' << fixed4(report.location.precision) << '\t'
      << fixed4(report.location.recall) << '\t' << fixed4(report.location.f1) << '\n';
  if (!report.location_only) {
    out << "detection_counts\ttp\t" << report.detection_counts.tp << "\tfp\t"
        << report.detection_counts.fp << "\tfn\t" << report.detection_counts.fn << "\ttn\t"
        << report.detection_counts.tn << '\n';
  }
  out << "location_counts\tcorrect\t" << report.location_counts.correct << "\tpredicted\t"
      << report.location_counts.predicted << "\tgold\t" << report.location_counts.gold << '\n';
  for (const auto& [task, pr] :
       {std::pair<const char*, const Pr*>{"detection", &report.detection},
        std::pair<const char*, const Pr*>{"location", &report.location}}) {
    if (report.location_only && std::string(task) == "detection") continue;
    if (pr->zero_precision_denominator) out << "flag\t" << task << "\tprecision_zero_denominator\n";
    if (pr->zero_recall_denominator) out << "flag\t" << task << "\trecall_zero_denominator\n";
  }
  return out.str();
}

std::string render_predictions(const std::vector<PredictionRecord>& preds) {
  std::ostringstream out;
  for (const PredictionRecord& pred : preds) {
    out << pred.context_id << '\t';
    for (std::size_t i = 0; i < pred.tags.tags.size(); ++i) {
      if (i) out << ' ';
      out << pred.tags.scheme.tag_name(pred.tags.tags[i]);
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace puntag
