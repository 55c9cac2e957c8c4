#include "fglr/metrics.hpp"

#include <cstdio>
#include <fstream>
#include <unordered_map>

#include "json.hpp"
#include "fglr/error.hpp"
#include "fglr/rule_engine.hpp"

namespace fglr {

long long ConfusionMatrix::total() const {
  long long sum = 0;
  for (const auto& row : counts)
    for (long long v : row) sum += v;
  return sum;
}

long long ConfusionMatrix::diagonal() const {
  return counts[0][0] + counts[1][1] + counts[2][2];
}

namespace {

double ratio(long long numerator, long long denominator) {
  return denominator == 0 ? 0.0
                          : static_cast<double>(numerator) / static_cast<double>(denominator);
}

}  // namespace

ClassificationSummary summarize(const ConfusionMatrix& confusion) {
  ClassificationSummary summary;
  summary.confusion = confusion;
  summary.count = confusion.total();
  summary.accuracy = ratio(confusion.diagonal(), summary.count);

  for (int k = 0; k < 3; ++k) {
    long long tp = confusion.counts[k][k];
    long long predicted = 0, gold = 0;
    for (int i = 0; i < 3; ++i) {
      predicted += confusion.counts[i][k];
      gold += confusion.counts[k][i];
    }
    ClassMetrics& m = summary.per_class[k];
    m.precision = ratio(tp, predicted);
    m.recall = ratio(tp, gold);
    m.f1 = (m.precision + m.recall) == 0.0
               ? 0.0
               : 2.0 * m.precision * m.recall / (m.precision + m.recall);
    summary.macro.precision += m.precision / 3.0;
    summary.macro.recall += m.recall / 3.0;
    summary.macro.f1 += m.f1 / 3.0;
  }
  return summary;
}

MetricsReport report_from_predictions(const std::vector<LabeledPrediction>& predictions,
                                      double threshold) {
  ConfusionMatrix confusion;
  std::map<std::string, std::pair<long long, long long>> rounds;  // correct, total
  for (const LabeledPrediction& p : predictions) {
    confusion.add(p.gold, p.predicted);
    if (!p.round.empty()) {
      auto& [correct, total] = rounds[p.round];
      if (p.gold == p.predicted) ++correct;
      ++total;
    }
  }

  MetricsReport report;
  report.threshold = threshold;
  report.observations = summarize(confusion);
  for (const auto& [round, tally] : rounds)
    report.per_round_accuracy[round] = ratio(tally.first, tally.second);
  return report;
}

MetricsReport evaluate(const std::vector<Observation>& dataset,
                       const DualHeadParams& params, const Encoder& encoder,
                       double threshold) {
  std::vector<LabeledPrediction> predictions;
  predictions.reserve(dataset.size());
  for (const Observation& obs : dataset) {
    if (!obs.label)
      throw Error(ErrorKind::InvalidArgument,
                  "observation \"" + obs.id + "\" has no label; evaluation needs gold labels");
    ForwardResult fwd = forward(encode_observation(encoder, obs), params);
    predictions.push_back(
        {*obs.label, classify(fwd.scores, threshold).predicted, obs.round});
  }
  return report_from_predictions(predictions, threshold);
}

std::vector<FactAnnotation> load_fact_annotations(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open fact annotations: " + path);

  std::vector<FactAnnotation> annotations;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
    std::string context = path + ":" + std::to_string(line_number);
    nlohmann::json record;
    try {
      record = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorKind::Parse, context + ": malformed JSON: " + e.what());
    }
    if (!record.contains("id") || !record.contains("fact_index") ||
        !record.contains("label"))
      throw Error(ErrorKind::Parse, context + ": expected {id, fact_index, label}");
    FactAnnotation annotation;
    annotation.id = record["id"].get<std::string>();
    annotation.fact_index = record["fact_index"].get<std::size_t>();
    try {
      annotation.label = parse_label(record["label"].get<std::string>());
    } catch (const Error& e) {
      throw Error(ErrorKind::Parse, context + ": " + e.what());
    }
    annotations.push_back(std::move(annotation));
  }
  return annotations;
}

ClassificationSummary evaluate_facts(const std::vector<Observation>& dataset,
                                     const DualHeadParams& params, const Encoder& encoder,
                                     double threshold,
                                     const std::vector<FactAnnotation>& annotations) {
  std::unordered_map<std::string, const Observation*> by_id;
  for (const Observation& obs : dataset) by_id[obs.id] = &obs;

  // One forward pass per annotated observation.
  std::unordered_map<std::string, FactScores> scored;
  ConfusionMatrix confusion;
  for (const FactAnnotation& annotation : annotations) {
    auto it = by_id.find(annotation.id);
    if (it == by_id.end())
      throw Error(ErrorKind::InvalidArgument,
                  "fact annotation references unknown observation \"" + annotation.id + "\"");
    const Observation& obs = *it->second;
    if (annotation.fact_index >= obs.bundle.facts.size())
      throw Error(ErrorKind::InvalidArgument,
                  "fact annotation for \"" + annotation.id + "\" references fact " +
                      std::to_string(annotation.fact_index) + " but the bundle has " +
                      std::to_string(obs.bundle.facts.size()) + " facts");
    auto scores_it = scored.find(annotation.id);
    if (scores_it == scored.end()) {
      ForwardResult fwd = forward(encode_observation(encoder, obs), params);
      scores_it = scored.emplace(annotation.id, std::move(fwd.scores)).first;
    }
    const FactScores& scores = scores_it->second;
    NliLabel predicted =
        classify_fact(scores.contradiction.raw_attention[annotation.fact_index],
                      scores.entailment.raw_attention[annotation.fact_index], threshold);
    confusion.add(annotation.label, predicted);
  }
  return summarize(confusion);
}

namespace {

using ordered_json = nlohmann::ordered_json;

ordered_json summary_to_json(const ClassificationSummary& summary) {
  static const char* kClassNames[3] = {"entailment", "neutral", "contradiction"};
  ordered_json j;
  j["count"] = summary.count;
  j["accuracy"] = summary.accuracy;
  ordered_json confusion = ordered_json::array();
  for (const auto& row : summary.confusion.counts) confusion.push_back(row);
  j["confusion"] = confusion;  // rows gold, columns predicted
  for (int k = 0; k < 3; ++k) {
    j["per_class"][kClassNames[k]] = {{"precision", summary.per_class[k].precision},
                                      {"recall", summary.per_class[k].recall},
                                      {"f1", summary.per_class[k].f1}};
  }
  j["macro"] = {{"precision", summary.macro.precision},
                {"recall", summary.macro.recall},
                {"f1", summary.macro.f1}};
  return j;
}

void append_summary_rows(std::string& out, const ClassificationSummary& summary) {
  auto row = [&out](const char* name, double e, double n, double c, double macro) {
    char buffer[96];
    std::snprintf(buffer, sizeof(buffer), " %-10s %6.2f %6.2f %6.2f %6.2f\n", name, e, n,
                  c, macro);
    out += buffer;
  };
  row("Precision", summary.per_class[0].precision, summary.per_class[1].precision,
      summary.per_class[2].precision, summary.macro.precision);
  row("Recall", summary.per_class[0].recall, summary.per_class[1].recall,
      summary.per_class[2].recall, summary.macro.recall);
  row("F1", summary.per_class[0].f1, summary.per_class[1].f1, summary.per_class[2].f1,
      summary.macro.f1);
}

}  // namespace

std::string report_to_json(const MetricsReport& report) {
  ordered_json j;
  j["zero_division"] = "precision/recall/f1 reported as 0 when the denominator is 0";
  j["threshold"] = report.threshold;
  j["observations"] = summary_to_json(report.observations);
  j["observations"]["per_round_accuracy"] = ordered_json::object();
  for (const auto& [round, accuracy] : report.per_round_accuracy)
    j["observations"]["per_round_accuracy"][round] = accuracy;
  if (report.facts) j["facts"] = summary_to_json(*report.facts);
  return j.dump(2);
}

std::string report_to_text(const MetricsReport& report) {
  std::string out;
  out += "# precision/recall/f1 are 0 when the denominator is 0\n";
  char buffer[96];
  std::snprintf(buffer, sizeof(buffer), "Accuracy: %.4f (%lld observations)\n",
                report.observations.accuracy, report.observations.count);
  out += buffer;
  for (const auto& [round, accuracy] : report.per_round_accuracy) {
    std::snprintf(buffer, sizeof(buffer), "  %s accuracy: %.4f\n", round.c_str(),
                  accuracy);
    out += buffer;
  }
  out += "\n              Ent.  Neut.  Cont. Macro.\n";
  if (report.facts) {
    out += "Facts:\n";
    append_summary_rows(out, *report.facts);
  }
  out += "Obs:\n";
  append_summary_rows(out, report.observations);
  return out;
}

}  // namespace fglr
