#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "fglr/data_model.hpp"

namespace fglr {

enum class PromptKind { List, Extend, HypCond };

const char* prompt_kind_name(PromptKind kind);
// The fixed instruction text each prompt ends with.
std::string instruction_line(PromptKind kind);
// Second instruction of the Extend prompt, after the existing fact list.
std::string extend_followup_line();

struct FewShotExample {
  std::string premise;
  std::string hypothesis;           // HypCond only
  std::vector<std::string> facts;   // List: full list; Extend: partial; HypCond: one fact
  std::vector<std::string> missing; // Extend only
};

// Few-shot prompt content loaded from an editable template file. Blocks are
// separated by lines of exactly `---`; exactly four blocks are required.
struct PromptTemplate {
  PromptKind kind = PromptKind::List;
  std::vector<FewShotExample> examples;
  std::string content_hash;  // hex FNV-1a of the template text

  static PromptTemplate parse(PromptKind kind, const std::string& text);
  static PromptTemplate load(PromptKind kind, const std::string& path);
};

// Few-shot blocks, then the target premise (plus hypothesis or partial fact
// list when the kind needs them), ending with the instruction line.
std::string build_prompt(const PromptTemplate& tpl, const std::string& premise,
                         const std::optional<std::string>& hypothesis = std::nullopt,
                         const std::vector<std::string>& existing_facts = {});

// Splits on line breaks, strips enumeration markers, drops empty lines.
// HypCond responses yield at most one fact (the first non-empty line).
std::vector<std::string> parse_fact_list(const std::string& response, PromptKind kind);

class TextGenService {
 public:
  virtual ~TextGenService() = default;
  virtual std::string complete(const std::string& prompt, int max_tokens,
                               double temperature) = 0;
  virtual std::string model_id() const = 0;
};

// Offline stand-in: derives a numbered fact list from the target premise by
// clause splitting. Pure function of the prompt.
class MockService final : public TextGenService {
 public:
  std::string complete(const std::string& prompt, int max_tokens,
                       double temperature) override;
  std::string model_id() const override { return "mock"; }
};

// POST {prompt, max_tokens, temperature} to the endpoint, expect {"text": ...}.
// Bearer credential read from the FGLR_SERVICE_TOKEN environment variable.
class HttpService final : public TextGenService {
 public:
  explicit HttpService(std::string url, std::string model = "default");
  std::string complete(const std::string& prompt, int max_tokens,
                       double temperature) override;
  std::string model_id() const override { return model_; }

 private:
  std::string url_;
  std::string model_;
};

struct GenerationRecord {
  std::string observation_id;
  PromptKind kind = PromptKind::List;
  std::string template_hash;
  std::string raw_response;
  std::vector<std::string> facts;
  bool parse_failed = false;
  std::string timestamp;  // ISO 8601 UTC
  std::string model;
};

// Append-only JSONL cache keyed by (observation id, kind, template hash).
// Failed parses are kept for audit but never served.
class GenerationCache {
 public:
  // Empty path keeps the cache in memory only.
  explicit GenerationCache(std::string path);

  std::optional<GenerationRecord> find(const std::string& observation_id,
                                       PromptKind kind,
                                       const std::string& template_hash) const;
  void append(const GenerationRecord& record);
  std::size_t size() const { return records_.size(); }

 private:
  std::string path_;
  std::unordered_map<std::string, GenerationRecord> records_;
};

enum class FactStrategy { List1, List2, FactComb, FactExt, HypCond };

FactStrategy parse_strategy(const std::string& name);
const char* strategy_name(FactStrategy strategy);

struct GeneratorOptions {
  int max_tokens = 256;
  double temperature = 0.0;
  int max_attempts = 3;
  int backoff_ms = 250;  // doubled after each failed attempt
};

// Templates live in one directory as list1.txt, list2.txt, extend.txt,
// hypcond.txt; only the files a strategy needs have to exist.
struct TemplateSet {
  std::optional<PromptTemplate> list1;
  std::optional<PromptTemplate> list2;
  std::optional<PromptTemplate> extend;
  std::optional<PromptTemplate> hypcond;

  static TemplateSet load(const std::string& directory);
};

FactBundle generate_bundle(const Observation& observation, Split split,
                           FactStrategy strategy, TextGenService& service,
                           const TemplateSet& templates, GenerationCache& cache,
                           const GeneratorOptions& options = {});

}  // namespace fglr
