#pragma once

#include <string>
#include <vector>

#include "fglr/config.hpp"
#include "fglr/encoder.hpp"
#include "fglr/logic_head.hpp"
#include "fglr/rule_engine.hpp"

namespace fglr {

struct LossBreakdown {
  double obs_loss_contradiction = 0.0;
  double fact_loss_contradiction = 0.0;
  double obs_loss_entailment = 0.0;   // zero when the entailment head abstains
  double fact_loss_entailment = 0.0;
  double lambda_obs = 1.0;
  double lambda_fact = 1.0;
  double total = 0.0;
};

// Observation loss (calibrated probability vs target, squared) plus fact loss
// (max raw attention vs target, squared), summed over supervised heads.
LossBreakdown compute_loss(const FactScores& scores, const ObservationLogits& logits,
                           const SupervisionTargets& targets, const TrainConfig& config);

// Analytic gradient of the total loss for every head parameter. The max in
// the fact loss routes its subgradient to the first argmax index. Heads
// without supervision get exactly zero gradient.
DualHeadParams gradients(const std::vector<Representation>& facts,
                         const DualHeadParams& params, const SupervisionTargets& targets,
                         const TrainConfig& config);

struct EpochStats {
  int epoch = 0;
  double total_loss = 0.0;
  double obs_loss_contradiction = 0.0;
  double fact_loss_contradiction = 0.0;
  double obs_loss_entailment = 0.0;
  double fact_loss_entailment = 0.0;
  double accuracy = 0.0;
};

struct TrainResult {
  DualHeadParams params;
  std::vector<EpochStats> history;
};

// Deterministic given (dataset order, seed, config). Observations must be
// labeled and must not carry eval-only facts.
TrainResult train(const std::vector<Observation>& dataset, const Encoder& encoder,
                  const TrainConfig& config, DualHeadParams initial);

// Initializes the heads from the encoder dimension and config seed.
TrainResult train(const std::vector<Observation>& dataset, const Encoder& encoder,
                  const TrainConfig& config, std::size_t hidden_dim);

// CSV: epoch,total_loss,obs_loss_c,fact_loss_c,obs_loss_e,fact_loss_e,accuracy
void write_train_log(const std::vector<EpochStats>& history, const std::string& path);

// Flat view over all parameters of both heads in a fixed order; gradients
// built by zeros_like align with it. Shared with the optimizers.
std::vector<double*> parameter_view(DualHeadParams& params);

}  // namespace fglr
