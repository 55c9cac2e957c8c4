#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "fglr/error.hpp"

namespace fglr {

enum class NliLabel { Entailment = 0, Neutral = 1, Contradiction = 2 };

// Throws Error(Parse) for anything outside the three closed-enum strings.
NliLabel parse_label(const std::string& text);
const char* label_name(NliLabel label);

enum class Provenance { List1 = 0, List2 = 1, Extension = 2, HypCond = 3 };

Provenance parse_provenance(const std::string& text);
const char* provenance_name(Provenance provenance);

struct Fact {
  std::string text;
  Provenance provenance = Provenance::List1;
  // Hypothesis-conditioned facts exist only at evaluation time and must never
  // reach the trainer.
  bool eval_only = false;

  bool operator==(const Fact&) const = default;
};

// Trims whitespace, rejects empty text, derives eval_only from the provenance.
Fact make_fact(std::string text, Provenance provenance);

// Dedup key: case-folded, internal whitespace collapsed, trailing period
// stripped.
std::string normalized_fact_text(const std::string& text);

struct FactBundle {
  std::vector<Fact> facts;
  bool dedup_applied = false;

  bool operator==(const FactBundle&) const = default;
};

// Canonical bundle form: facts grouped List1, List2, Extension, HypCond with
// the original order kept inside each group, duplicates (by normalized text)
// dropped keeping the first occurrence.
FactBundle finalize_bundle(std::vector<Fact> facts);

enum class CombineStrategy { FactComb, FactExt, HypCondAttach };

// FactComb: union of all facts with dedup. FactExt: primary plus extra facts
// not already present. HypCondAttach: append extra facts marked eval_only.
FactBundle combine_bundles(const FactBundle& primary,
                           const std::vector<FactBundle>& extra,
                           CombineStrategy strategy);

struct Observation {
  std::string id;
  std::string premise;
  std::string hypothesis;
  std::optional<NliLabel> label;  // absent only in prediction mode
  FactBundle bundle;
  std::string round;  // free-form tag, empty when absent

  bool operator==(const Observation&) const = default;
};

enum class Split { Train, Eval };

struct LoadOptions {
  Split split = Split::Eval;
  // Fact-generation input has no facts yet; everything else requires them.
  bool require_facts = true;
  // Receives warnings about ignored unknown keys; defaults to stderr.
  std::function<void(const std::string&)> warn;
};

std::vector<Observation> load_dataset(const std::string& path, Split split);
std::vector<Observation> load_dataset(const std::string& path,
                                      const LoadOptions& options);

std::string observation_to_json_line(const Observation& observation);
void save_dataset(const std::vector<Observation>& observations,
                  const std::string& path);

}  // namespace fglr
