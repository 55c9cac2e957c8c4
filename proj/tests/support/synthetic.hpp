#pragma once

#include <random>
#include <string>
#include <unordered_map>
#include <vector>

#include "fglr/data_model.hpp"
#include "fglr/encoder.hpp"

namespace fglr::testing {

// Balanced three-class dataset that is separable under the hashing encoder:
// every non-neutral observation carries exactly one planted fact with a
// class-indicative token, and noise facts are rejected-sampled so their fact
// blocks stay exactly zero on the planted buckets.
struct SyntheticDataset {
  std::vector<Observation> observations;
  std::unordered_map<std::string, std::size_t> planted;  // id -> fact index
  std::string contradiction_token;
  std::string entailment_token;
};

inline SyntheticDataset make_synthetic_dataset(std::size_t per_class,
                                               std::size_t hash_dim,
                                               std::uint64_t seed) {
  HashingEncoder encoder(hash_dim);
  const std::size_t buckets = hash_dim / 2;

  // Pick two planted tokens landing in distinct buckets.
  const std::vector<std::string> candidates = {"zuphek", "vortel", "quimbra",
                                               "drellon", "maxipot", "grolfin"};
  std::string token_c, token_e;
  for (const std::string& a : candidates) {
    for (const std::string& b : candidates) {
      if (a != b && HashingEncoder::token_hash(a) % buckets !=
                        HashingEncoder::token_hash(b) % buckets) {
        token_c = a;
        token_e = b;
        break;
      }
    }
    if (!token_c.empty()) break;
  }
  std::size_t bucket_c = HashingEncoder::token_hash(token_c) % buckets;
  std::size_t bucket_e = HashingEncoder::token_hash(token_e) % buckets;

  std::mt19937_64 rng(seed);
  std::vector<std::string> vocab;
  for (int i = 0; i < 40; ++i) vocab.push_back("w" + std::to_string(i));
  std::uniform_int_distribution<std::size_t> pick_word(0, vocab.size() - 1);
  std::uniform_int_distribution<int> words_per_fact(2, 4);

  auto random_words = [&](int count) {
    std::string text;
    for (int i = 0; i < count; ++i) {
      if (i) text += ' ';
      text += vocab[pick_word(rng)];
    }
    return text;
  };

  // A fact is clean when its block never touches the planted buckets (the
  // bigram tokens matter too, hence the encode-and-check).
  auto touches = [&](const std::string& fact_text, std::size_t bucket) {
    Representation rep = encoder.encode(fact_text, "probe");
    return rep.values[bucket] != 0.0;
  };
  auto noise_fact = [&]() {
    for (;;) {
      std::string text = random_words(words_per_fact(rng));
      if (!touches(text, bucket_c) && !touches(text, bucket_e)) return text;
    }
  };
  auto planted_fact = [&](const std::string& token, std::size_t own_bucket,
                          std::size_t other_bucket) {
    for (;;) {
      std::string text = token + " " + random_words(2);
      if (touches(text, own_bucket) && !touches(text, other_bucket)) return text;
    }
  };

  SyntheticDataset dataset;
  dataset.contradiction_token = token_c;
  dataset.entailment_token = token_e;

  std::uniform_int_distribution<int> facts_per_obs(3, 5);
  const NliLabel labels[3] = {NliLabel::Contradiction, NliLabel::Entailment,
                              NliLabel::Neutral};
  std::size_t counter = 0;
  for (std::size_t i = 0; i < per_class; ++i) {
    for (NliLabel label : labels) {
      Observation obs;
      obs.id = "syn-" + std::to_string(counter++);
      obs.premise = "synthetic premise " + obs.id;
      obs.hypothesis = random_words(3);
      obs.label = label;
      obs.round = "R" + std::to_string(1 + counter % 3);

      int n = facts_per_obs(rng);
      std::vector<Fact> facts;
      for (int f = 0; f < n; ++f)
        facts.push_back(make_fact(noise_fact() + " n" + std::to_string(f),
                                  Provenance::List2));
      if (label != NliLabel::Neutral) {
        std::size_t position =
            std::uniform_int_distribution<std::size_t>(0, facts.size() - 1)(rng);
        const std::string& token =
            label == NliLabel::Contradiction ? token_c : token_e;
        std::size_t own = label == NliLabel::Contradiction ? bucket_c : bucket_e;
        std::size_t other = label == NliLabel::Contradiction ? bucket_e : bucket_c;
        facts[position] = make_fact(planted_fact(token, own, other), Provenance::List2);
        dataset.planted[obs.id] = position;
      }
      obs.bundle = finalize_bundle(std::move(facts));
      dataset.observations.push_back(std::move(obs));
    }
  }

  std::shuffle(dataset.observations.begin(), dataset.observations.end(), rng);
  return dataset;
}

}  // namespace fglr::testing
