#pragma once

#include <vector>

#include "fglr/data_model.hpp"
#include "fglr/logic_head.hpp"

namespace fglr::testing {

// Straight-line restatement of the evaluation rules, kept deliberately free
// of any code shared with classify(): walk the contradiction attentions, then
// the entailment attentions, and fall through to neutral.
struct BruteForceResult {
  NliLabel label = NliLabel::Neutral;
  std::vector<std::size_t> contradiction_facts;
  std::vector<std::size_t> entailment_facts;
};

inline BruteForceResult classify_bruteforce(const std::vector<double>& raw_contradiction,
                                            const std::vector<double>& raw_entailment,
                                            double threshold = 0.5) {
  BruteForceResult result;
  for (std::size_t i = 0; i < raw_contradiction.size(); ++i)
    if (raw_contradiction[i] > threshold) result.contradiction_facts.push_back(i);
  for (std::size_t i = 0; i < raw_entailment.size(); ++i)
    if (raw_entailment[i] > threshold) result.entailment_facts.push_back(i);

  bool has_contradiction_fact = !result.contradiction_facts.empty();
  bool has_entailment_fact = !result.entailment_facts.empty();
  if (has_contradiction_fact)
    result.label = NliLabel::Contradiction;
  else if (has_entailment_fact)
    result.label = NliLabel::Entailment;
  else
    result.label = NliLabel::Neutral;
  return result;
}

// FactScores with the given raw attentions and consistent derived fields.
inline FactScores make_scores(const std::vector<double>& raw_contradiction,
                              const std::vector<double>& raw_entailment) {
  FactScores scores;
  scores.contradiction.raw_attention = raw_contradiction;
  scores.entailment.raw_attention = raw_entailment;
  scores.contradiction.logits.assign(raw_contradiction.size(), 0.0);
  scores.entailment.logits.assign(raw_entailment.size(), 0.0);
  scores.contradiction.attention = normalize_attention(raw_contradiction);
  scores.entailment.attention = normalize_attention(raw_entailment);
  return scores;
}

}  // namespace fglr::testing
