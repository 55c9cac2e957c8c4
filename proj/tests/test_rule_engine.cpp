#include <random>

#include "doctest.h"
#include "fglr/error.hpp"
#include "fglr/rule_engine.hpp"
#include "support/bruteforce.hpp"

using namespace fglr;
using fglr::testing::classify_bruteforce;
using fglr::testing::make_scores;

TEST_CASE("derive_targets reproduces the training rules") {
  SupervisionTargets contradiction = derive_targets(NliLabel::Contradiction);
  CHECK(contradiction.contradiction_target == 1.0);
  CHECK_FALSE(contradiction.entailment_supervised());  // ABSTAIN

  SupervisionTargets entailment = derive_targets(NliLabel::Entailment);
  CHECK(entailment.contradiction_target == 0.0);
  REQUIRE(entailment.entailment_supervised());
  CHECK(*entailment.entailment_target == 1.0);

  SupervisionTargets neutral = derive_targets(NliLabel::Neutral);
  CHECK(neutral.contradiction_target == 0.0);
  REQUIRE(neutral.entailment_supervised());
  CHECK(*neutral.entailment_target == 0.0);
}

TEST_CASE("the rejected rule variant supervises entailment with zero") {
  SupervisionTargets variant = derive_targets(NliLabel::Contradiction, true);
  CHECK(variant.contradiction_target == 1.0);
  REQUIRE(variant.entailment_supervised());
  CHECK(*variant.entailment_target == 0.0);
  // The flag changes nothing for the other labels.
  CHECK(derive_targets(NliLabel::Entailment, true).entailment_target == 1.0);
  CHECK(derive_targets(NliLabel::Neutral, true).entailment_target == 0.0);
}

TEST_CASE("contradiction takes precedence over entailment facts") {
  Prediction prediction = classify(make_scores({0.6, 0.1}, {0.9, 0.9}));
  CHECK(prediction.predicted == NliLabel::Contradiction);
  CHECK(prediction.contradiction_facts == std::vector<std::size_t>{0});
  CHECK(prediction.entailment_facts == std::vector<std::size_t>{0, 1});
}

TEST_CASE("values at the threshold do not trigger a class") {
  Prediction prediction = classify(make_scores({0.5}, {0.5}));
  CHECK(prediction.predicted == NliLabel::Neutral);
  CHECK(prediction.contradiction_facts.empty());
  CHECK(prediction.entailment_facts.empty());
}

TEST_CASE("entailment wins when no fact contradicts") {
  Prediction prediction = classify(make_scores({0.1, 0.2}, {0.1, 0.7}));
  CHECK(prediction.predicted == NliLabel::Entailment);
  CHECK(prediction.entailment_facts == std::vector<std::size_t>{1});
}

TEST_CASE("classify rejects empty scores") {
  FactScores empty;
  CHECK_THROWS_AS(classify(empty), Error);
}

TEST_CASE("classify agrees with the brute-force oracle on every indicator pattern") {
  const double values[3] = {0.25, 0.5, 0.75};
  for (std::size_t k = 1; k <= 4; ++k) {
    std::size_t combos = 1;
    for (std::size_t i = 0; i < 2 * k; ++i) combos *= 3;
    for (std::size_t code = 0; code < combos; ++code) {
      std::size_t rest = code;
      std::vector<double> raw_c(k), raw_e(k);
      for (std::size_t i = 0; i < k; ++i) {
        raw_c[i] = values[rest % 3];
        rest /= 3;
        raw_e[i] = values[rest % 3];
        rest /= 3;
      }
      auto expected = classify_bruteforce(raw_c, raw_e);
      Prediction actual = classify(make_scores(raw_c, raw_e));
      REQUIRE(actual.predicted == expected.label);
      REQUIRE(actual.contradiction_facts == expected.contradiction_facts);
      REQUIRE(actual.entailment_facts == expected.entailment_facts);
    }
  }
}

TEST_CASE("raising a contradiction attention never un-predicts contradiction") {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> u(0.01, 0.99);
  std::uniform_int_distribution<std::size_t> count(1, 5);
  for (int trial = 0; trial < 500; ++trial) {
    std::size_t k = count(rng);
    std::vector<double> raw_c(k), raw_e(k);
    for (auto& v : raw_c) v = u(rng);
    for (auto& v : raw_e) v = u(rng);
    Prediction before = classify(make_scores(raw_c, raw_e));

    std::size_t target = std::uniform_int_distribution<std::size_t>(0, k - 1)(rng);
    raw_c[target] = std::min(0.999, raw_c[target] + u(rng) * 0.5);
    Prediction after = classify(make_scores(raw_c, raw_e));
    if (before.predicted == NliLabel::Contradiction)
      CHECK(after.predicted == NliLabel::Contradiction);
  }
}

TEST_CASE("only the indicator pattern matters, never the magnitudes") {
  std::mt19937_64 rng(78);
  std::uniform_real_distribution<double> below(0.01, 0.49);
  std::uniform_real_distribution<double> above(0.51, 0.99);
  std::uniform_int_distribution<int> coin(0, 1);
  std::uniform_int_distribution<std::size_t> count(1, 5);
  for (int trial = 0; trial < 500; ++trial) {
    std::size_t k = count(rng);
    std::vector<bool> pattern_c(k), pattern_e(k);
    auto draw = [&](const std::vector<bool>& pattern) {
      std::vector<double> raw(pattern.size());
      for (std::size_t i = 0; i < pattern.size(); ++i)
        raw[i] = pattern[i] ? above(rng) : below(rng);
      return raw;
    };
    for (std::size_t i = 0; i < k; ++i) {
      pattern_c[i] = coin(rng);
      pattern_e[i] = coin(rng);
    }
    Prediction a = classify(make_scores(draw(pattern_c), draw(pattern_e)));
    Prediction b = classify(make_scores(draw(pattern_c), draw(pattern_e)));
    CHECK(a.predicted == b.predicted);
    CHECK(a.contradiction_facts == b.contradiction_facts);
    CHECK(a.entailment_facts == b.entailment_facts);
  }
}

TEST_CASE("training rules and evaluation rules agree per label") {
  // Scores satisfying the training-time rules for each label classify back to
  // that label.
  CHECK(classify(make_scores({0.8, 0.3}, {0.6, 0.1})).predicted ==
        NliLabel::Contradiction);                       // y_c=1: some fact contradicts
  CHECK(classify(make_scores({0.2, 0.4}, {0.7, 0.2})).predicted ==
        NliLabel::Entailment);                          // y_c=0, y_e=1
  CHECK(classify(make_scores({0.2, 0.4}, {0.45, 0.2})).predicted ==
        NliLabel::Neutral);                             // y_c=0, y_e=0
}

TEST_CASE("prediction invariants hold over random scores") {
  std::mt19937_64 rng(79);
  std::uniform_real_distribution<double> u(0.01, 0.99);
  std::uniform_int_distribution<std::size_t> count(1, 6);
  for (int trial = 0; trial < 500; ++trial) {
    std::size_t k = count(rng);
    std::vector<double> raw_c(k), raw_e(k);
    for (auto& v : raw_c) v = u(rng);
    for (auto& v : raw_e) v = u(rng);
    Prediction p = classify(make_scores(raw_c, raw_e));
    CHECK((p.predicted == NliLabel::Contradiction) == !p.contradiction_facts.empty());
    CHECK((p.predicted == NliLabel::Entailment) ==
          (p.contradiction_facts.empty() && !p.entailment_facts.empty()));
    CHECK((p.predicted == NliLabel::Neutral) ==
          (p.contradiction_facts.empty() && p.entailment_facts.empty()));
  }
}

TEST_CASE("per-fact classification follows the same hierarchy") {
  CHECK(classify_fact(0.7, 0.9) == NliLabel::Contradiction);
  CHECK(classify_fact(0.2, 0.9) == NliLabel::Entailment);
  CHECK(classify_fact(0.5, 0.5) == NliLabel::Neutral);
}

TEST_CASE("explanations list the responsible facts with their attention") {
  Observation obs;
  obs.id = "obs-1";
  obs.hypothesis = "The store opened in London.";
  obs.bundle = finalize_bundle({make_fact("noise fact", Provenance::List1),
                                make_fact("the real fact", Provenance::List2)});
  Prediction prediction = classify(make_scores({0.1, 0.2}, {0.3, 0.9}));

  std::string json = explanation_to_json_line(obs, prediction);
  CHECK(json.find("\"predicted\":\"entailment\"") != std::string::npos);
  CHECK(json.find("the real fact") != std::string::npos);
  CHECK(json.find("noise fact") == std::string::npos);

  std::string text = explanation_to_text(obs, prediction);
  CHECK(text.find("obs-1: entailment") != std::string::npos);
  CHECK(text.find("[1]") != std::string::npos);

  std::string line = prediction_to_json_line(obs, prediction);
  CHECK(line.find("\"entailment_facts\":[1]") != std::string::npos);
  CHECK(line.find("\"raw_attention\":[0.3,0.9]") != std::string::npos);
}
