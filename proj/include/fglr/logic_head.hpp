#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fglr/encoder.hpp"

namespace fglr {

// Row-major dense matrix, just large enough for the heads.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

  double& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }

  bool operator==(const Matrix&) const = default;
};

// Numerically clamped away from {0, 1} so attention normalization and the
// losses stay finite even when the pre-activation saturates.
double stable_sigmoid(double x);

// One attention/classification head. The attention scorer is a one-hidden-
// layer network sigma(w2 . tanh(W1 r + b1) + b2); the per-fact logit is a
// single affine map shared across facts; (w3, b3) calibrate the attended
// observation logit into a probability for the observation-level loss.
struct HeadParams {
  Matrix w1;                    // hidden x d
  std::vector<double> b1;       // hidden
  std::vector<double> w2;       // hidden
  double b2 = 0.0;
  std::vector<double> w_logit;  // d
  double b_logit = 0.0;
  double w3 = 0.0;
  double b3 = 0.0;

  std::size_t input_dim() const { return w1.cols; }
  std::size_t hidden_dim() const { return w1.rows; }

  bool operator==(const HeadParams&) const = default;
};

HeadParams zeros_like(const HeadParams& params);

struct DualHeadParams {
  HeadParams contradiction;
  HeadParams entailment;

  // Weights uniform in [-1/sqrt(fan_in), +1/sqrt(fan_in)], biases zero,
  // drawn in a fixed order from the seed. Contradiction head first.
  static DualHeadParams init(std::size_t input_dim, std::size_t hidden_dim,
                             std::uint64_t seed);

  bool operator==(const DualHeadParams&) const = default;
};

struct HeadScores {
  std::vector<double> logits;         // per-fact logit L_i
  std::vector<double> raw_attention;  // sigmoid-bounded, in (0, 1)
  std::vector<double> attention;      // normalized, sums to 1
};

struct FactScores {
  HeadScores contradiction;
  HeadScores entailment;

  std::size_t fact_count() const { return contradiction.logits.size(); }
};

struct HeadObservation {
  double logit = 0.0;        // attention-weighted combination of per-fact logits
  double probability = 0.0;  // sigmoid(w3 * logit + b3)
};

struct ObservationLogits {
  HeadObservation contradiction;
  HeadObservation entailment;
};

struct ForwardResult {
  FactScores scores;
  ObservationLogits logits;
};

double raw_attention(const Representation& rep, const HeadParams& params);

// a_i = raw_i / sum_k raw_k; requires a non-empty list of positive entries.
std::vector<double> normalize_attention(const std::vector<double>& raw);

// Both heads evaluated on the same representations.
ForwardResult forward(const std::vector<Representation>& facts,
                      const DualHeadParams& params);

// Versioned JSON checkpoint; arrays row-major, full double precision.
inline constexpr int kCheckpointFormatVersion = 1;

struct Checkpoint {
  DualHeadParams params;
  std::uint64_t seed = 0;
};

void save_checkpoint(const Checkpoint& checkpoint, const std::string& path);
std::string checkpoint_to_json(const Checkpoint& checkpoint);
Checkpoint load_checkpoint(const std::string& path);
Checkpoint checkpoint_from_json(const std::string& text);

}  // namespace fglr
