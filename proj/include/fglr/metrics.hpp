#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fglr/data_model.hpp"
#include "fglr/encoder.hpp"
#include "fglr/logic_head.hpp"

namespace fglr {

struct ConfusionMatrix {
  // counts[gold][predicted], indexed by NliLabel order.
  std::array<std::array<long long, 3>, 3> counts{};

  void add(NliLabel gold, NliLabel predicted) {
    ++counts[static_cast<int>(gold)][static_cast<int>(predicted)];
  }
  long long total() const;
  long long diagonal() const;
};

struct ClassMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

// Per-class and macro numbers from one confusion matrix. Undefined ratios
// (zero denominators) are reported as 0.
struct ClassificationSummary {
  ConfusionMatrix confusion;
  std::array<ClassMetrics, 3> per_class;  // NliLabel order
  ClassMetrics macro;                     // unweighted mean over the classes
  double accuracy = 0.0;
  long long count = 0;
};

ClassificationSummary summarize(const ConfusionMatrix& confusion);

struct MetricsReport {
  ClassificationSummary observations;
  std::map<std::string, double> per_round_accuracy;  // only tagged observations
  std::optional<ClassificationSummary> facts;        // when annotations supplied
  double threshold = 0.5;
};

struct LabeledPrediction {
  NliLabel gold;
  NliLabel predicted;
  std::string round;
};

MetricsReport report_from_predictions(const std::vector<LabeledPrediction>& predictions,
                                      double threshold);

MetricsReport evaluate(const std::vector<Observation>& dataset,
                       const DualHeadParams& params, const Encoder& encoder,
                       double threshold);

// Ternary gold label for one fact of one observation.
struct FactAnnotation {
  std::string id;
  std::size_t fact_index = 0;
  NliLabel label = NliLabel::Neutral;
};

// JSONL of { "id": str, "fact_index": int, "label": str }.
std::vector<FactAnnotation> load_fact_annotations(const std::string& path);

// Fact-level scoring under the same contradiction-first hierarchy as the
// observation rules.
ClassificationSummary evaluate_facts(const std::vector<Observation>& dataset,
                                     const DualHeadParams& params, const Encoder& encoder,
                                     double threshold,
                                     const std::vector<FactAnnotation>& annotations);

std::string report_to_json(const MetricsReport& report);
// Aligned table with Facts:/Obs: sections.
std::string report_to_text(const MetricsReport& report);

}  // namespace fglr
