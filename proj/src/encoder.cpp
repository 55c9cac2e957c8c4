#include "fglr/encoder.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <map>

#include "json.hpp"
#include "fglr/error.hpp"
#include "fglr/hash.hpp"

namespace fglr {

Representation Encoder::encode_fact(const Observation& observation,
                                    std::size_t fact_index) const {
  if (fact_index >= observation.bundle.facts.size())
    throw Error(ErrorKind::InvalidArgument,
                "fact index " + std::to_string(fact_index) +
                    " out of range for observation \"" + observation.id + "\"");
  return encode(observation.bundle.facts[fact_index].text, observation.hypothesis);
}

std::vector<Representation> encode_observation(const Encoder& encoder,
                                               const Observation& observation) {
  std::vector<Representation> out;
  out.reserve(observation.bundle.facts.size());
  for (std::size_t i = 0; i < observation.bundle.facts.size(); ++i)
    out.push_back(encoder.encode_fact(observation, i));
  return out;
}

HashingEncoder::HashingEncoder(std::size_t hash_dim) : hash_dim_(hash_dim) {
  if (hash_dim_ < 2 || hash_dim_ % 2 != 0)
    throw Error(ErrorKind::InvalidArgument,
                "hashing dimension must be even and >= 2, got " +
                    std::to_string(hash_dim_));
}

std::uint64_t HashingEncoder::token_hash(std::string_view token) {
  return fnv1a64(token);
}

std::vector<std::string> HashingEncoder::tokenize(const std::string& text) {
  std::vector<std::string> words;
  std::string current;
  for (unsigned char c : text) {
    bool word_char = std::isalnum(c) || c >= 0x80;  // keep UTF-8 bytes
    if (word_char) {
      current.push_back(static_cast<char>(c < 0x80 ? std::tolower(c) : c));
    } else if (!current.empty()) {
      words.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) words.push_back(std::move(current));

  std::vector<std::string> tokens = words;
  for (std::size_t i = 0; i + 1 < words.size(); ++i)
    tokens.push_back(words[i] + " " + words[i + 1]);
  return tokens;
}

void HashingEncoder::fill_block(const std::vector<std::string>& tokens,
                                std::size_t offset, std::vector<double>& out) const {
  if (tokens.empty()) return;
  const std::size_t buckets = hash_dim_ / 2;
  const double weight = 1.0 / std::sqrt(static_cast<double>(tokens.size()));
  for (const std::string& token : tokens) {
    std::uint64_t h = token_hash(token);
    double sign = ((h >> 32) & 1u) ? -1.0 : 1.0;
    out[offset + h % buckets] += sign * weight;
  }
  double norm = 0.0;
  for (std::size_t i = 0; i < buckets; ++i)
    norm += out[offset + i] * out[offset + i];
  norm = std::sqrt(norm);
  if (norm > 0.0)
    for (std::size_t i = 0; i < buckets; ++i) out[offset + i] /= norm;
}

namespace {

double multiset_cosine(const std::vector<std::string>& a,
                       const std::vector<std::string>& b) {
  std::map<std::string, double> ca, cb;
  for (const auto& t : a) ca[t] += 1.0;
  for (const auto& t : b) cb[t] += 1.0;
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (const auto& [t, c] : ca) {
    na += c * c;
    auto it = cb.find(t);
    if (it != cb.end()) dot += c * it->second;
  }
  for (const auto& [t, c] : cb) nb += c * c;
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

}  // namespace

Representation HashingEncoder::encode(const std::string& fact_text,
                                      const std::string& hypothesis_text) const {
  if (fact_text.empty())
    throw Error(ErrorKind::InvalidArgument, "encode: fact text is empty");
  if (hypothesis_text.empty())
    throw Error(ErrorKind::InvalidArgument, "encode: hypothesis text is empty");

  Representation rep;
  rep.values.assign(hash_dim_ + 1, 0.0);
  auto fact_tokens = tokenize(fact_text);
  auto hyp_tokens = tokenize(hypothesis_text);
  fill_block(fact_tokens, 0, rep.values);
  fill_block(hyp_tokens, hash_dim_ / 2, rep.values);
  rep.values[hash_dim_] = multiset_cosine(fact_tokens, hyp_tokens);
  return rep;
}

PrecomputedEncoder PrecomputedEncoder::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open embedding file: " + path);

  PrecomputedEncoder encoder;
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
        !record.contains("vector") || !record["vector"].is_array())
      throw Error(ErrorKind::Parse,
                  context + ": expected {id, fact_index, vector} record");

    Representation rep;
    rep.values = record["vector"].get<std::vector<double>>();
    if (encoder.dimension_ == 0) encoder.dimension_ = rep.values.size();
    if (rep.values.size() != encoder.dimension_)
      throw Error(ErrorKind::Parse,
                  context + ": vector dimension " + std::to_string(rep.values.size()) +
                      " does not match file dimension " +
                      std::to_string(encoder.dimension_));
    std::string key = record["id"].get<std::string>() + "\x1f" +
                      std::to_string(record["fact_index"].get<std::size_t>());
    encoder.vectors_[key] = std::move(rep);
  }
  if (encoder.vectors_.empty())
    throw Error(ErrorKind::Parse, "embedding file is empty: " + path);
  return encoder;
}

Representation PrecomputedEncoder::encode(const std::string&,
                                          const std::string&) const {
  throw Error(ErrorKind::InvalidArgument,
              "precomputed encoder is keyed by (observation id, fact index), "
              "not by text");
}

Representation PrecomputedEncoder::encode_fact(const Observation& observation,
                                               std::size_t fact_index) const {
  std::string key = observation.id + "\x1f" + std::to_string(fact_index);
  auto it = vectors_.find(key);
  if (it == vectors_.end())
    throw Error(ErrorKind::InvalidArgument,
                "no precomputed vector for observation \"" + observation.id +
                    "\" fact " + std::to_string(fact_index));
  return it->second;
}

}  // namespace fglr
