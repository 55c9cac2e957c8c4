#include "fglr/generator.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cstring>
#include <ctime>
#include <fstream>
#include <sstream>
#include <thread>

#include "httplib.h"
#include "json.hpp"
#include "fglr/error.hpp"
#include "fglr/hash.hpp"

namespace fglr {

namespace {

std::string trim(const std::string& s) {
  auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

std::string hex64(std::uint64_t value) {
  char buffer[17];
  std::snprintf(buffer, sizeof(buffer), "%016llx",
                static_cast<unsigned long long>(value));
  return buffer;
}

std::string iso_timestamp() {
  std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buffer[32];
  std::strftime(buffer, sizeof(buffer), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buffer;
}

}  // namespace

const char* prompt_kind_name(PromptKind kind) {
  switch (kind) {
    case PromptKind::List: return "list";
    case PromptKind::Extend: return "extend";
    case PromptKind::HypCond: return "hypcond";
  }
  return "?";
}

std::string instruction_line(PromptKind kind) {
  switch (kind) {
    case PromptKind::List:
    case PromptKind::Extend:
      return "List all the facts we explicitly know from the premise:";
    case PromptKind::HypCond:
      return "List a fact we explicitly know from the premise that we can use to "
             "verify if the hypothesis is true:";
  }
  return "";
}

std::string extend_followup_line() { return "List all the facts missing above:"; }

namespace {

std::string strip_enumeration_marker(std::string line) {
  line = trim(line);
  if (line.rfind("\xE2\x80\xA2", 0) == 0) {  // bullet point
    return trim(line.substr(3));
  }
  if (!line.empty() && (line[0] == '-' || line[0] == '*')) {
    return trim(line.substr(1));
  }
  std::size_t i = 0;
  while (i < line.size() && std::isdigit(static_cast<unsigned char>(line[i]))) ++i;
  if (i > 0 && i < line.size() && (line[i] == '.' || line[i] == ')')) {
    return trim(line.substr(i + 1));
  }
  return line;
}

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  return lines;
}

bool take_prefixed(const std::string& line, const char* prefix, std::string& out) {
  std::string t = trim(line);
  std::size_t len = std::strlen(prefix);
  if (t.rfind(prefix, 0) != 0) return false;
  out = trim(t.substr(len));
  return true;
}

FewShotExample parse_example_block(PromptKind kind, const std::vector<std::string>& lines,
                                   std::size_t block_index) {
  auto fail = [&](const std::string& message) -> Error {
    return Error(ErrorKind::Parse, "template block " + std::to_string(block_index + 1) +
                                       ": " + message);
  };

  FewShotExample example;
  std::size_t i = 0;
  while (i < lines.size() && trim(lines[i]).empty()) ++i;
  if (i == lines.size() || !take_prefixed(lines[i], "Premise:", example.premise))
    throw fail("expected a `Premise:` line");
  ++i;

  if (kind == PromptKind::HypCond) {
    if (i == lines.size() || !take_prefixed(lines[i], "Hypothesis:", example.hypothesis))
      throw fail("expected a `Hypothesis:` line");
    ++i;
    std::string fact;
    while (i < lines.size()) {
      if (take_prefixed(lines[i], "Fact:", fact) && !fact.empty())
        example.facts.push_back(fact);
      ++i;
    }
    if (example.facts.size() != 1) throw fail("expected exactly one `Fact:` line");
    return example;
  }

  bool in_missing = false;
  for (; i < lines.size(); ++i) {
    std::string t = trim(lines[i]);
    if (t.empty() || t == "Facts:") continue;
    if (t == "Missing:") {
      if (kind != PromptKind::Extend) throw fail("`Missing:` only belongs in extend templates");
      in_missing = true;
      continue;
    }
    std::string fact = strip_enumeration_marker(t);
    if (fact.empty()) continue;
    (in_missing ? example.missing : example.facts).push_back(fact);
  }
  if (example.facts.empty()) throw fail("expected at least one fact");
  if (kind == PromptKind::Extend && example.missing.empty())
    throw fail("extend templates need a `Missing:` section");
  return example;
}

}  // namespace

PromptTemplate PromptTemplate::parse(PromptKind kind, const std::string& text) {
  PromptTemplate tpl;
  tpl.kind = kind;
  tpl.content_hash = hex64(fnv1a64(text));

  std::vector<std::vector<std::string>> blocks(1);
  for (const std::string& line : split_lines(text)) {
    std::string t = trim(line);
    if (t.rfind('#', 0) == 0 && blocks.size() == 1 && blocks[0].empty())
      continue;  // leading comment lines
    if (t == "---") {
      blocks.emplace_back();
      continue;
    }
    blocks.back().push_back(line);
  }
  while (!blocks.empty() &&
         std::all_of(blocks.back().begin(), blocks.back().end(),
                     [](const std::string& l) { return trim(l).empty(); }))
    blocks.pop_back();

  for (std::size_t b = 0; b < blocks.size(); ++b)
    tpl.examples.push_back(parse_example_block(kind, blocks[b], b));
  if (tpl.examples.size() != 4)
    throw Error(ErrorKind::Parse,
                std::string(prompt_kind_name(kind)) + " template must carry exactly four "
                "few-shot examples, found " + std::to_string(tpl.examples.size()));
  return tpl;
}

PromptTemplate PromptTemplate::load(PromptKind kind, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open template file: " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  try {
    return parse(kind, buffer.str());
  } catch (const Error& e) {
    throw Error(e.kind(), path + ": " + e.what());
  }
}

namespace {

void append_numbered(std::string& out, const std::vector<std::string>& facts,
                     std::size_t start = 1) {
  for (std::size_t i = 0; i < facts.size(); ++i)
    out += std::to_string(start + i) + ". " + facts[i] + "\n";
}

}  // namespace

std::string build_prompt(const PromptTemplate& tpl, const std::string& premise,
                         const std::optional<std::string>& hypothesis,
                         const std::vector<std::string>& existing_facts) {
  if (tpl.kind == PromptKind::HypCond && (!hypothesis || hypothesis->empty()))
    throw Error(ErrorKind::InvalidArgument,
                "hypothesis-conditioned prompts need the hypothesis");
  if (tpl.kind == PromptKind::Extend && existing_facts.empty())
    throw Error(ErrorKind::InvalidArgument,
                "extend prompts need the existing fact list");

  std::string out;
  for (const FewShotExample& example : tpl.examples) {
    out += "Premise: " + example.premise + "\n";
    if (tpl.kind == PromptKind::HypCond)
      out += "Hypothesis: " + example.hypothesis + "\n";
    out += instruction_line(tpl.kind) + "\n";
    if (tpl.kind == PromptKind::HypCond) {
      out += example.facts.front() + "\n";
    } else {
      append_numbered(out, example.facts);
      if (tpl.kind == PromptKind::Extend) {
        out += extend_followup_line() + "\n";
        // Missing facts continue the numbering of the partial list.
        append_numbered(out, example.missing, example.facts.size() + 1);
      }
    }
    out += "\n";
  }

  out += "Premise: " + premise + "\n";
  if (tpl.kind == PromptKind::HypCond) out += "Hypothesis: " + *hypothesis + "\n";
  out += instruction_line(tpl.kind) + "\n";
  if (tpl.kind == PromptKind::Extend) {
    append_numbered(out, existing_facts);
    out += extend_followup_line() + "\n";
  }
  return out;
}

std::vector<std::string> parse_fact_list(const std::string& response, PromptKind kind) {
  std::vector<std::string> facts;
  for (const std::string& line : split_lines(response)) {
    std::string fact = strip_enumeration_marker(line);
    if (fact.empty()) continue;
    facts.push_back(fact);
    if (kind == PromptKind::HypCond) break;  // exactly one fact
  }
  return facts;
}

namespace {

std::vector<std::string> clause_split(const std::string& text) {
  std::vector<std::string> clauses;
  std::string current;
  for (char c : text) {
    if (c == '.' || c == ';' || c == ',') {
      if (!trim(current).empty()) clauses.push_back(trim(current));
      current.clear();
    } else {
      current.push_back(c);
    }
  }
  if (!trim(current).empty()) clauses.push_back(trim(current));
  return clauses;
}

std::size_t word_overlap(const std::string& a, const std::string& b) {
  auto words = [](const std::string& text) {
    std::vector<std::string> out;
    std::string current;
    for (unsigned char c : text) {
      if (std::isalnum(c)) {
        current.push_back(static_cast<char>(std::tolower(c)));
      } else if (!current.empty()) {
        out.push_back(std::move(current));
        current.clear();
      }
    }
    if (!current.empty()) out.push_back(current);
    return out;
  };
  auto wa = words(a);
  auto wb = words(b);
  std::size_t overlap = 0;
  for (const std::string& w : wa)
    if (std::find(wb.begin(), wb.end(), w) != wb.end()) ++overlap;
  return overlap;
}

}  // namespace

std::string MockService::complete(const std::string& prompt, int, double) {
  // Work from the target block: the last Premise/Hypothesis lines and the
  // fact lines that follow them. The final instruction line identifies the
  // prompt kind.
  std::string premise, hypothesis, last_line;
  std::vector<std::string> listed_facts;
  for (const std::string& line : split_lines(prompt)) {
    std::string value;
    if (take_prefixed(line, "Premise:", value)) {
      premise = value;
      listed_facts.clear();
    } else if (take_prefixed(line, "Hypothesis:", value)) {
      hypothesis = value;
    } else {
      std::string fact = strip_enumeration_marker(line);
      if (!fact.empty() && fact != line) listed_facts.push_back(fact);
    }
    if (!trim(line).empty()) last_line = trim(line);
  }

  std::vector<std::string> clauses = clause_split(premise);
  if (clauses.empty()) return "";

  if (last_line == instruction_line(PromptKind::HypCond)) {
    // The clause most lexically similar to the hypothesis, reworded so it
    // stays distinct from the plain-list facts.
    std::size_t best = 0, best_overlap = 0;
    for (std::size_t i = 0; i < clauses.size(); ++i) {
      std::size_t overlap = word_overlap(clauses[i], hypothesis);
      if (overlap > best_overlap) {
        best = i;
        best_overlap = overlap;
      }
    }
    return "According to the premise, " + clauses[best] + ".";
  }

  if (last_line == extend_followup_line()) {
    std::vector<std::string> missing;
    for (const std::string& clause : clauses) {
      bool present = std::any_of(listed_facts.begin(), listed_facts.end(),
                                 [&](const std::string& fact) {
                                   return normalized_fact_text(fact) ==
                                          normalized_fact_text(clause);
                                 });
      if (!present) missing.push_back(clause);
    }
    if (missing.empty()) missing.push_back(clauses.back());
    std::string out;
    append_numbered(out, missing, listed_facts.size() + 1);
    return out;
  }

  std::string out;
  append_numbered(out, clauses);
  return out;
}

HttpService::HttpService(std::string url, std::string model)
    : url_(std::move(url)), model_(std::move(model)) {
  if (url_.rfind("http://", 0) != 0)
    throw Error(ErrorKind::InvalidArgument,
                "service URL must start with http://, got: " + url_);
}

std::string HttpService::complete(const std::string& prompt, int max_tokens,
                                  double temperature) {
  auto path_start = url_.find('/', std::strlen("http://"));
  std::string base = path_start == std::string::npos ? url_ : url_.substr(0, path_start);
  std::string path = path_start == std::string::npos ? "/" : url_.substr(path_start);

  httplib::Client client(base);
  client.set_connection_timeout(10);
  client.set_read_timeout(60);
  if (const char* token = std::getenv("FGLR_SERVICE_TOKEN"))
    client.set_default_headers({{"Authorization", std::string("Bearer ") + token}});

  nlohmann::json request = {
      {"prompt", prompt}, {"max_tokens", max_tokens}, {"temperature", temperature}};
  auto result = client.Post(path, request.dump(), "application/json");
  if (!result)
    throw Error(ErrorKind::Service,
                "service request failed: " + httplib::to_string(result.error()));
  if (result->status != 200)
    throw Error(ErrorKind::Service,
                "service returned status " + std::to_string(result->status));
  try {
    nlohmann::json response = nlohmann::json::parse(result->body);
    return response.at("text").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Service, std::string("malformed service response: ") + e.what());
  }
}

namespace {

std::string cache_key(const std::string& observation_id, PromptKind kind,
                      const std::string& template_hash) {
  return observation_id + "\x1f" + prompt_kind_name(kind) + "\x1f" + template_hash;
}

PromptKind parse_prompt_kind(const std::string& name) {
  if (name == "list") return PromptKind::List;
  if (name == "extend") return PromptKind::Extend;
  if (name == "hypcond") return PromptKind::HypCond;
  throw Error(ErrorKind::Parse, "unknown prompt kind \"" + name + "\"");
}

}  // namespace

GenerationCache::GenerationCache(std::string path) : path_(std::move(path)) {
  if (path_.empty()) return;
  std::ifstream in(path_);
  if (!in) return;  // created on first append
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (trim(line).empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorKind::Parse, path_ + ":" + std::to_string(line_number) +
                                        ": malformed cache line: " + e.what());
    }
    GenerationRecord record;
    record.observation_id = j.at("id").get<std::string>();
    record.kind = parse_prompt_kind(j.at("kind").get<std::string>());
    record.template_hash = j.at("template_hash").get<std::string>();
    record.raw_response = j.at("response").get<std::string>();
    record.facts = j.at("facts").get<std::vector<std::string>>();
    record.parse_failed = j.value("parse_failed", false);
    record.timestamp = j.value("timestamp", "");
    record.model = j.value("model", "");
    // Later lines win, so a retry after a failed parse shadows the failure.
    records_[cache_key(record.observation_id, record.kind, record.template_hash)] =
        std::move(record);
  }
}

std::optional<GenerationRecord> GenerationCache::find(
    const std::string& observation_id, PromptKind kind,
    const std::string& template_hash) const {
  auto it = records_.find(cache_key(observation_id, kind, template_hash));
  if (it == records_.end() || it->second.parse_failed) return std::nullopt;
  return it->second;
}

void GenerationCache::append(const GenerationRecord& record) {
  if (!path_.empty()) {
    nlohmann::ordered_json j;
    j["id"] = record.observation_id;
    j["kind"] = prompt_kind_name(record.kind);
    j["template_hash"] = record.template_hash;
    j["response"] = record.raw_response;
    j["facts"] = record.facts;
    j["parse_failed"] = record.parse_failed;
    j["timestamp"] = record.timestamp;
    j["model"] = record.model;
    std::ofstream out(path_, std::ios::app);
    if (!out) throw Error(ErrorKind::Io, "cannot append to cache: " + path_);
    out << j.dump() << "\n";
    if (!out) throw Error(ErrorKind::Io, "cache write failed: " + path_);
  }
  records_[cache_key(record.observation_id, record.kind, record.template_hash)] = record;
}

FactStrategy parse_strategy(const std::string& name) {
  if (name == "list1") return FactStrategy::List1;
  if (name == "list2") return FactStrategy::List2;
  if (name == "factcomb") return FactStrategy::FactComb;
  if (name == "factext") return FactStrategy::FactExt;
  if (name == "hypcond") return FactStrategy::HypCond;
  throw Error(ErrorKind::Parse,
              "unknown fact strategy \"" + name +
                  "\" (expected list1, list2, factcomb, factext, or hypcond)");
}

const char* strategy_name(FactStrategy strategy) {
  switch (strategy) {
    case FactStrategy::List1: return "list1";
    case FactStrategy::List2: return "list2";
    case FactStrategy::FactComb: return "factcomb";
    case FactStrategy::FactExt: return "factext";
    case FactStrategy::HypCond: return "hypcond";
  }
  return "?";
}

TemplateSet TemplateSet::load(const std::string& directory) {
  TemplateSet set;
  auto try_load = [&directory](PromptKind kind, const char* name,
                               std::optional<PromptTemplate>& slot) {
    std::string path = directory + "/" + name;
    if (std::ifstream probe(path); probe) slot = PromptTemplate::load(kind, path);
  };
  try_load(PromptKind::List, "list1.txt", set.list1);
  try_load(PromptKind::List, "list2.txt", set.list2);
  try_load(PromptKind::Extend, "extend.txt", set.extend);
  try_load(PromptKind::HypCond, "hypcond.txt", set.hypcond);
  return set;
}

namespace {

const PromptTemplate& require_template(const std::optional<PromptTemplate>& slot,
                                       const char* name) {
  if (!slot)
    throw Error(ErrorKind::InvalidArgument,
                std::string("strategy needs the \"") + name + "\" template file");
  return *slot;
}

GenerationRecord fetch(const Observation& observation, const PromptTemplate& tpl,
                       const std::optional<std::string>& hypothesis,
                       const std::vector<std::string>& existing_facts,
                       TextGenService& service, GenerationCache& cache,
                       const GeneratorOptions& options) {
  if (auto hit = cache.find(observation.id, tpl.kind, tpl.content_hash)) return *hit;

  std::string prompt = build_prompt(tpl, observation.premise, hypothesis, existing_facts);
  std::string response;
  for (int attempt = 1;; ++attempt) {
    try {
      response = service.complete(prompt, options.max_tokens, options.temperature);
      break;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::Service || attempt >= options.max_attempts)
        throw Error(ErrorKind::Service,
                    "fact generation for \"" + observation.id + "\" failed after " +
                        std::to_string(attempt) + " attempt(s): " + e.what());
      std::this_thread::sleep_for(
          std::chrono::milliseconds(options.backoff_ms << (attempt - 1)));
    }
  }

  GenerationRecord record;
  record.observation_id = observation.id;
  record.kind = tpl.kind;
  record.template_hash = tpl.content_hash;
  record.raw_response = response;
  record.facts = parse_fact_list(response, tpl.kind);
  record.parse_failed = record.facts.empty();
  record.timestamp = iso_timestamp();
  record.model = service.model_id();
  cache.append(record);  // failures are kept for audit
  if (record.parse_failed)
    throw Error(ErrorKind::Parse, "could not parse a fact list for \"" + observation.id +
                                      "\"; raw response: " + response);
  return record;
}

FactBundle bundle_from(const std::vector<std::string>& facts, Provenance provenance) {
  std::vector<Fact> out;
  out.reserve(facts.size());
  for (const std::string& text : facts) out.push_back(make_fact(text, provenance));
  return finalize_bundle(std::move(out));
}

}  // namespace

FactBundle generate_bundle(const Observation& observation, Split split,
                           FactStrategy strategy, TextGenService& service,
                           const TemplateSet& templates, GenerationCache& cache,
                           const GeneratorOptions& options) {
  auto fetch_list = [&](const std::optional<PromptTemplate>& slot, const char* name,
                        Provenance provenance) {
    const PromptTemplate& tpl = require_template(slot, name);
    return bundle_from(
        fetch(observation, tpl, std::nullopt, {}, service, cache, options).facts,
        provenance);
  };

  switch (strategy) {
    case FactStrategy::List1:
      return fetch_list(templates.list1, "list1.txt", Provenance::List1);
    case FactStrategy::List2:
      return fetch_list(templates.list2, "list2.txt", Provenance::List2);
    case FactStrategy::FactComb: {
      FactBundle list1 = fetch_list(templates.list1, "list1.txt", Provenance::List1);
      FactBundle list2 = fetch_list(templates.list2, "list2.txt", Provenance::List2);
      return combine_bundles(list1, {list2}, CombineStrategy::FactComb);
    }
    case FactStrategy::FactExt: {
      FactBundle list1 = fetch_list(templates.list1, "list1.txt", Provenance::List1);
      std::vector<std::string> existing;
      for (const Fact& fact : list1.facts) existing.push_back(fact.text);
      const PromptTemplate& tpl = require_template(templates.extend, "extend.txt");
      FactBundle extension = bundle_from(
          fetch(observation, tpl, std::nullopt, existing, service, cache, options).facts,
          Provenance::Extension);
      return combine_bundles(list1, {extension}, CombineStrategy::FactExt);
    }
    case FactStrategy::HypCond: {
      if (split == Split::Train)
        throw Error(ErrorKind::InvalidArgument,
                    "strategy not allowed: hypothesis-conditioned facts are generated "
                    "only for evaluation splits");
      FactBundle list1 = fetch_list(templates.list1, "list1.txt", Provenance::List1);
      FactBundle list2 = fetch_list(templates.list2, "list2.txt", Provenance::List2);
      FactBundle combined = combine_bundles(list1, {list2}, CombineStrategy::FactComb);
      const PromptTemplate& tpl = require_template(templates.hypcond, "hypcond.txt");
      FactBundle hyp = bundle_from(
          fetch(observation, tpl, observation.hypothesis, {}, service, cache, options).facts,
          Provenance::HypCond);
      return combine_bundles(combined, {hyp}, CombineStrategy::HypCondAttach);
    }
  }
  throw Error(ErrorKind::Internal, "unreachable strategy");
}

}  // namespace fglr
