#include "fglr/data_model.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <iostream>
#include <sstream>
#include <unordered_set>

#include "json.hpp"

namespace fglr {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string trim(const std::string& s) {
  auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

const char* kKnownKeys[] = {"id", "premise", "hypothesis", "label", "round", "facts"};
const char* kKnownFactKeys[] = {"text", "provenance"};

}  // namespace

NliLabel parse_label(const std::string& text) {
  if (text == "entailment") return NliLabel::Entailment;
  if (text == "neutral") return NliLabel::Neutral;
  if (text == "contradiction") return NliLabel::Contradiction;
  throw Error(ErrorKind::Parse, "unknown label \"" + text +
                                    "\" (expected entailment, neutral, or contradiction)");
}

const char* label_name(NliLabel label) {
  switch (label) {
    case NliLabel::Entailment: return "entailment";
    case NliLabel::Neutral: return "neutral";
    case NliLabel::Contradiction: return "contradiction";
  }
  return "?";
}

Provenance parse_provenance(const std::string& text) {
  if (text == "list1") return Provenance::List1;
  if (text == "list2") return Provenance::List2;
  if (text == "ext") return Provenance::Extension;
  if (text == "hypcond") return Provenance::HypCond;
  throw Error(ErrorKind::Parse, "unknown provenance \"" + text +
                                    "\" (expected list1, list2, ext, or hypcond)");
}

const char* provenance_name(Provenance provenance) {
  switch (provenance) {
    case Provenance::List1: return "list1";
    case Provenance::List2: return "list2";
    case Provenance::Extension: return "ext";
    case Provenance::HypCond: return "hypcond";
  }
  return "?";
}

Fact make_fact(std::string text, Provenance provenance) {
  Fact fact;
  fact.text = trim(text);
  if (fact.text.empty())
    throw Error(ErrorKind::InvalidArgument, "fact text is empty");
  fact.provenance = provenance;
  fact.eval_only = provenance == Provenance::HypCond;
  return fact;
}

std::string normalized_fact_text(const std::string& text) {
  std::string out;
  out.reserve(text.size());
  bool pending_space = false;
  for (unsigned char c : text) {
    if (std::isspace(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) {
      out.push_back(' ');
      pending_space = false;
    }
    out.push_back(static_cast<char>(std::tolower(c)));
  }
  while (!out.empty() && out.back() == '.') out.pop_back();
  while (!out.empty() && out.back() == ' ') out.pop_back();
  return out;
}

FactBundle finalize_bundle(std::vector<Fact> facts) {
  FactBundle bundle;
  std::unordered_set<std::string> seen;
  // Group order List1, List2, Extension, HypCond; stable within each group.
  for (int group = 0; group <= static_cast<int>(Provenance::HypCond); ++group) {
    for (const Fact& fact : facts) {
      if (static_cast<int>(fact.provenance) != group) continue;
      if (!seen.insert(normalized_fact_text(fact.text)).second) continue;
      bundle.facts.push_back(fact);
    }
  }
  bundle.dedup_applied = true;
  return bundle;
}

FactBundle combine_bundles(const FactBundle& primary,
                           const std::vector<FactBundle>& extra,
                           CombineStrategy strategy) {
  std::vector<Fact> merged = primary.facts;
  switch (strategy) {
    case CombineStrategy::FactComb:
      for (const FactBundle& bundle : extra)
        merged.insert(merged.end(), bundle.facts.begin(), bundle.facts.end());
      break;
    case CombineStrategy::FactExt: {
      std::unordered_set<std::string> present;
      for (const Fact& fact : primary.facts)
        present.insert(normalized_fact_text(fact.text));
      for (const FactBundle& bundle : extra)
        for (const Fact& fact : bundle.facts)
          if (present.insert(normalized_fact_text(fact.text)).second)
            merged.push_back(fact);
      break;
    }
    case CombineStrategy::HypCondAttach:
      for (const FactBundle& bundle : extra)
        for (Fact fact : bundle.facts) {
          fact.eval_only = true;
          merged.push_back(fact);
        }
      break;
  }
  return finalize_bundle(std::move(merged));
}

namespace {

Observation parse_record(const ordered_json& record, const std::string& context,
                         const LoadOptions& options) {
  auto warn = [&](const std::string& message) {
    if (options.warn)
      options.warn(message);
    else
      std::cerr << "warning: " << message << "\n";
  };

  for (const auto& item : record.items()) {
    bool known = std::any_of(std::begin(kKnownKeys), std::end(kKnownKeys),
                             [&](const char* k) { return item.key() == k; });
    if (!known) warn(context + ": ignoring unknown key \"" + item.key() + "\"");
  }

  Observation obs;
  if (!record.contains("id") || !record["id"].is_string())
    throw Error(ErrorKind::Parse, context + ": missing string field \"id\"");
  obs.id = record["id"].get<std::string>();
  if (!record.contains("premise") || !record["premise"].is_string())
    throw Error(ErrorKind::Parse, context + ": missing string field \"premise\"");
  obs.premise = record["premise"].get<std::string>();
  if (!record.contains("hypothesis") || !record["hypothesis"].is_string())
    throw Error(ErrorKind::Parse, context + ": missing string field \"hypothesis\"");
  obs.hypothesis = record["hypothesis"].get<std::string>();

  if (record.contains("label")) {
    if (!record["label"].is_string())
      throw Error(ErrorKind::Parse, context + ": \"label\" must be a string");
    try {
      obs.label = parse_label(record["label"].get<std::string>());
    } catch (const Error& e) {
      throw Error(ErrorKind::Parse, context + ": " + e.what());
    }
  }
  if (record.contains("round")) {
    if (!record["round"].is_string())
      throw Error(ErrorKind::Parse, context + ": \"round\" must be a string");
    obs.round = record["round"].get<std::string>();
  }

  std::vector<Fact> facts;
  if (record.contains("facts")) {
    if (!record["facts"].is_array())
      throw Error(ErrorKind::Parse, context + ": \"facts\" must be an array");
    for (const auto& entry : record["facts"]) {
      if (!entry.is_object() || !entry.contains("text") || !entry.contains("provenance"))
        throw Error(ErrorKind::Parse,
                    context + ": each fact needs \"text\" and \"provenance\"");
      for (const auto& item : entry.items()) {
        bool known = std::any_of(std::begin(kKnownFactKeys), std::end(kKnownFactKeys),
                                 [&](const char* k) { return item.key() == k; });
        if (!known)
          warn(context + ": ignoring unknown fact key \"" + item.key() + "\"");
      }
      try {
        facts.push_back(make_fact(entry["text"].get<std::string>(),
                                  parse_provenance(entry["provenance"].get<std::string>())));
      } catch (const Error& e) {
        throw Error(ErrorKind::Parse, context + ": " + e.what());
      }
    }
  }

  if (options.split == Split::Train) {
    // Hypothesis-conditioned facts are never visible to training.
    std::erase_if(facts, [](const Fact& f) { return f.eval_only; });
  }
  if (facts.empty() && options.require_facts)
    throw Error(ErrorKind::Parse,
                context + ": observation \"" + obs.id + "\" has no usable facts");
  obs.bundle = finalize_bundle(std::move(facts));
  return obs;
}

}  // namespace

std::vector<Observation> load_dataset(const std::string& path, Split split) {
  LoadOptions options;
  options.split = split;
  return load_dataset(path, options);
}

std::vector<Observation> load_dataset(const std::string& path,
                                      const LoadOptions& options) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open dataset file: " + path);

  std::vector<Observation> observations;
  std::unordered_set<std::string> ids;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (trim(line).empty()) continue;
    std::string context = path + ":" + std::to_string(line_number);
    ordered_json record;
    try {
      record = ordered_json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorKind::Parse, context + ": malformed JSON: " + e.what());
    }
    if (!record.is_object())
      throw Error(ErrorKind::Parse, context + ": record is not a JSON object");
    Observation obs = parse_record(record, context, options);
    if (!ids.insert(obs.id).second)
      throw Error(ErrorKind::Parse, context + ": duplicate id \"" + obs.id + "\"");
    observations.push_back(std::move(obs));
  }
  return observations;
}

std::string observation_to_json_line(const Observation& observation) {
  ordered_json record;
  record["id"] = observation.id;
  record["premise"] = observation.premise;
  record["hypothesis"] = observation.hypothesis;
  if (observation.label) record["label"] = label_name(*observation.label);
  if (!observation.round.empty()) record["round"] = observation.round;
  record["facts"] = ordered_json::array();
  for (const Fact& fact : observation.bundle.facts) {
    ordered_json entry;
    entry["text"] = fact.text;
    entry["provenance"] = provenance_name(fact.provenance);
    record["facts"].push_back(entry);
  }
  return record.dump();
}

void save_dataset(const std::vector<Observation>& observations,
                  const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::Io, "cannot write dataset file: " + path);
  for (const Observation& obs : observations)
    out << observation_to_json_line(obs) << "\n";
  if (!out) throw Error(ErrorKind::Io, "write failed: " + path);
}

}  // namespace fglr
