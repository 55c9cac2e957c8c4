#include "fglr/rule_engine.hpp"

#include <cstdio>

#include "json.hpp"
#include "fglr/error.hpp"

namespace fglr {

SupervisionTargets derive_targets(NliLabel label,
                                  bool suppress_entailment_on_contradiction) {
  SupervisionTargets targets;
  switch (label) {
    case NliLabel::Contradiction:
      targets.contradiction_target = 1.0;
      if (suppress_entailment_on_contradiction) targets.entailment_target = 0.0;
      break;
    case NliLabel::Entailment:
      targets.contradiction_target = 0.0;
      targets.entailment_target = 1.0;
      break;
    case NliLabel::Neutral:
      targets.contradiction_target = 0.0;
      targets.entailment_target = 0.0;
      break;
  }
  return targets;
}

Prediction classify(const FactScores& scores, double threshold) {
  std::size_t n = scores.fact_count();
  if (n == 0 || scores.entailment.raw_attention.size() != n)
    throw Error(ErrorKind::InvalidArgument,
                "classify needs at least one fact scored by both heads");

  Prediction prediction;
  prediction.scores = scores;
  for (std::size_t i = 0; i < n; ++i) {
    if (scores.contradiction.raw_attention[i] > threshold)
      prediction.contradiction_facts.push_back(i);
    if (scores.entailment.raw_attention[i] > threshold)
      prediction.entailment_facts.push_back(i);
  }
  if (!prediction.contradiction_facts.empty())
    prediction.predicted = NliLabel::Contradiction;
  else if (!prediction.entailment_facts.empty())
    prediction.predicted = NliLabel::Entailment;
  else
    prediction.predicted = NliLabel::Neutral;
  return prediction;
}

NliLabel classify_fact(double raw_attention_contradiction,
                       double raw_attention_entailment, double threshold) {
  if (raw_attention_contradiction > threshold) return NliLabel::Contradiction;
  if (raw_attention_entailment > threshold) return NliLabel::Entailment;
  return NliLabel::Neutral;
}

namespace {

using ordered_json = nlohmann::ordered_json;

ordered_json head_scores_to_json(const HeadScores& scores) {
  return {{"logits", scores.logits},
          {"raw_attention", scores.raw_attention},
          {"attention", scores.attention}};
}

// The facts the prediction rests on: contradiction facts when contradiction
// wins, entailment facts when entailment wins, none for neutral.
struct ResponsibleFacts {
  const std::vector<std::size_t>* indices;
  const std::vector<double>* raw;
  const char* head;
};

ResponsibleFacts responsible_facts(const Prediction& prediction) {
  if (prediction.predicted == NliLabel::Contradiction)
    return {&prediction.contradiction_facts,
            &prediction.scores.contradiction.raw_attention, "contradiction"};
  if (prediction.predicted == NliLabel::Entailment)
    return {&prediction.entailment_facts, &prediction.scores.entailment.raw_attention,
            "entailment"};
  static const std::vector<std::size_t> kNone;
  return {&kNone, nullptr, "none"};
}

}  // namespace

std::string prediction_to_json_line(const Observation& observation,
                                    const Prediction& prediction) {
  ordered_json j;
  j["id"] = observation.id;
  j["predicted"] = label_name(prediction.predicted);
  j["contradiction_facts"] = prediction.contradiction_facts;
  j["entailment_facts"] = prediction.entailment_facts;
  j["scores"]["contradiction"] = head_scores_to_json(prediction.scores.contradiction);
  j["scores"]["entailment"] = head_scores_to_json(prediction.scores.entailment);
  return j.dump();
}

std::string explanation_to_json_line(const Observation& observation,
                                     const Prediction& prediction) {
  ordered_json j;
  j["id"] = observation.id;
  j["predicted"] = label_name(prediction.predicted);
  j["responsible_facts"] = ordered_json::array();
  ResponsibleFacts responsible = responsible_facts(prediction);
  for (std::size_t index : *responsible.indices) {
    ordered_json entry;
    entry["index"] = index;
    entry["text"] = observation.bundle.facts[index].text;
    entry["head"] = responsible.head;
    entry["raw_attention"] = (*responsible.raw)[index];
    j["responsible_facts"].push_back(entry);
  }
  return j.dump();
}

std::string explanation_to_text(const Observation& observation,
                                const Prediction& prediction) {
  std::string out = observation.id + ": " + label_name(prediction.predicted) + "\n";
  out += "  hypothesis: " + observation.hypothesis + "\n";
  ResponsibleFacts responsible = responsible_facts(prediction);
  if (responsible.indices->empty()) {
    out += "  no fact exceeds the threshold for either head\n";
    return out;
  }
  out += "  responsible facts:\n";
  for (std::size_t index : *responsible.indices) {
    char value[32];
    std::snprintf(value, sizeof(value), "%.3f", (*responsible.raw)[index]);
    out += "    [" + std::to_string(index) + "] (" + responsible.head + " " + value +
           ") " + observation.bundle.facts[index].text + "\n";
  }
  return out;
}

}  // namespace fglr
