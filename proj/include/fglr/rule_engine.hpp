#pragma once

#include <optional>
#include <vector>

#include "fglr/data_model.hpp"
#include "fglr/logic_head.hpp"

namespace fglr {

inline constexpr double kDefaultThreshold = 0.5;

// Training targets derived from the gold label. An absent entailment target
// means the entailment head receives no supervision (contradiction examples).
struct SupervisionTargets {
  double contradiction_target = 0.0;
  std::optional<double> entailment_target;

  bool entailment_supervised() const { return entailment_target.has_value(); }
};

// With suppress_entailment_on_contradiction the rejected rule variant is
// enabled: contradiction examples additionally supervise the entailment head
// with 0. Off by default.
SupervisionTargets derive_targets(NliLabel label,
                                  bool suppress_entailment_on_contradiction = false);

struct Prediction {
  NliLabel predicted = NliLabel::Neutral;
  std::vector<std::size_t> contradiction_facts;  // raw attention above threshold
  std::vector<std::size_t> entailment_facts;
  FactScores scores;
};

// Evaluation rules: any contradiction fact wins, otherwise any entailment
// fact, otherwise neutral. Strictly greater than the threshold.
Prediction classify(const FactScores& scores, double threshold = kDefaultThreshold);

// Per-fact label under the same hierarchy, used for fact-level metrics.
NliLabel classify_fact(double raw_attention_contradiction,
                       double raw_attention_entailment,
                       double threshold = kDefaultThreshold);

// One JSONL record with the predicted class, the responsible fact index sets,
// and the full per-fact scores.
std::string prediction_to_json_line(const Observation& observation,
                                    const Prediction& prediction);

// Explanation report: the facts responsible for the predicted class, with
// their raw attention values.
std::string explanation_to_json_line(const Observation& observation,
                                     const Prediction& prediction);
std::string explanation_to_text(const Observation& observation,
                                const Prediction& prediction);

}  // namespace fglr
