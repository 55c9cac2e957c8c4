#pragma once

#include <cstdint>
#include <string>

namespace fglr {

enum class OptimizerKind { Sgd, Adam };

struct TrainConfig {
  double learning_rate = 1e-3;
  int epochs = 50;
  int batch_size = 1;
  std::uint64_t seed = 0;
  double lambda_obs = 1.0;
  double lambda_fact = 1.0;
  OptimizerKind optimizer = OptimizerKind::Adam;
  bool shuffle = true;       // seeded epoch shuffle of the update order
  double threshold = 0.5;    // only used for the accuracy column of the log
  // Rejected rule variant, kept for ablations: contradiction examples also
  // supervise the entailment head with 0 instead of abstaining.
  bool contradiction_suppresses_entailment = false;

  void validate() const;  // throws Error(InvalidArgument)
};

// Everything a run needs beyond the trainer itself.
struct RunSettings {
  TrainConfig train;
  std::size_t encoder_dim = 64;  // hashing dimension of the built-in encoder
  std::size_t hidden_dim = 32;   // attention scorer hidden size
};

// Key-value config text: one `key = value` per line, `#` comments, blank
// lines ignored, the last occurrence of a key wins. Unknown keys are errors.
RunSettings parse_run_settings(const std::string& text);
RunSettings load_run_settings(const std::string& path);

const char* optimizer_name(OptimizerKind kind);

}  // namespace fglr
