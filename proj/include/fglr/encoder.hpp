#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "fglr/data_model.hpp"

namespace fglr {

// Joint (fact, hypothesis) representation consumed by the logic heads.
struct Representation {
  std::vector<double> values;

  std::size_t size() const { return values.size(); }
  bool operator==(const Representation&) const = default;
};

class Encoder {
 public:
  virtual ~Encoder() = default;

  virtual std::size_t dimension() const = 0;

  // Pure function of the two texts and the encoder configuration.
  virtual Representation encode(const std::string& fact_text,
                                const std::string& hypothesis_text) const = 0;

  // Contextual form used by the pipeline. The default delegates to encode();
  // precomputed encoders key on (observation id, fact index) instead.
  virtual Representation encode_fact(const Observation& observation,
                                     std::size_t fact_index) const;
};

std::vector<Representation> encode_observation(const Encoder& encoder,
                                               const Observation& observation);

// Deterministic lexical encoder: signed feature hashing of unigrams and
// bigrams. The fact fills buckets [0, hash_dim/2), the hypothesis fills
// [hash_dim/2, hash_dim); each block is scaled to unit L2 norm. One extra
// trailing coordinate holds the cosine similarity of the two pre-hash token
// multisets, so dimension() is hash_dim + 1 and the output L2 norm is at
// most sqrt(3).
class HashingEncoder final : public Encoder {
 public:
  explicit HashingEncoder(std::size_t hash_dim = 64);

  std::size_t dimension() const override { return hash_dim_ + 1; }
  std::size_t hash_dim() const { return hash_dim_; }

  Representation encode(const std::string& fact_text,
                        const std::string& hypothesis_text) const override;

  // FNV-1a 64; bucket index = token_hash(token) % (hash_dim / 2), sign from
  // bit 32 of the hash.
  static std::uint64_t token_hash(std::string_view token);
  static std::vector<std::string> tokenize(const std::string& text);

 private:
  void fill_block(const std::vector<std::string>& tokens, std::size_t offset,
                  std::vector<double>& out) const;

  std::size_t hash_dim_;
};

// Serves vectors produced elsewhere (e.g. transformer embeddings), keyed by
// (observation id, fact index).
class PrecomputedEncoder final : public Encoder {
 public:
  static PrecomputedEncoder load(const std::string& path);

  std::size_t dimension() const override { return dimension_; }

  // Not keyed by text; always an error.
  Representation encode(const std::string& fact_text,
                        const std::string& hypothesis_text) const override;

  Representation encode_fact(const Observation& observation,
                             std::size_t fact_index) const override;

 private:
  PrecomputedEncoder() = default;

  std::size_t dimension_ = 0;
  std::unordered_map<std::string, Representation> vectors_;  // "id\x1findex"
};

}  // namespace fglr
