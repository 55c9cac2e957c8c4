#include "fglr/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>

#include "fglr/error.hpp"

namespace fglr {

namespace {

double squared(double x) { return x * x; }

std::size_t argmax_lowest(const std::vector<double>& values) {
  // max_element keeps the first of equal maxima, which is the documented
  // tie-break.
  return static_cast<std::size_t>(
      std::max_element(values.begin(), values.end()) - values.begin());
}

}  // namespace

LossBreakdown compute_loss(const FactScores& scores, const ObservationLogits& logits,
                           const SupervisionTargets& targets, const TrainConfig& config) {
  if (scores.contradiction.raw_attention.empty() ||
      scores.entailment.raw_attention.empty())
    throw Error(ErrorKind::InvalidArgument, "loss needs at least one scored fact");

  LossBreakdown loss;
  loss.lambda_obs = config.lambda_obs;
  loss.lambda_fact = config.lambda_fact;

  double y_c = targets.contradiction_target;
  loss.obs_loss_contradiction = squared(logits.contradiction.probability - y_c);
  loss.fact_loss_contradiction =
      squared(scores.contradiction.raw_attention[argmax_lowest(
                  scores.contradiction.raw_attention)] -
              y_c);

  if (targets.entailment_supervised()) {
    double y_e = *targets.entailment_target;
    loss.obs_loss_entailment = squared(logits.entailment.probability - y_e);
    loss.fact_loss_entailment =
        squared(scores.entailment.raw_attention[argmax_lowest(
                    scores.entailment.raw_attention)] -
                y_e);
  }

  loss.total = loss.lambda_obs * (loss.obs_loss_contradiction + loss.obs_loss_entailment) +
               loss.lambda_fact * (loss.fact_loss_contradiction + loss.fact_loss_entailment);
  return loss;
}

namespace {

// Forward pass for one head keeping the intermediates backprop needs.
struct HeadTrace {
  std::vector<std::vector<double>> hidden;  // tanh activations per fact
  std::vector<double> logits;               // per-fact logit
  std::vector<double> raw;                  // raw attention
  std::vector<double> attention;            // normalized
  double raw_sum = 0.0;
  double obs_logit = 0.0;
  double probability = 0.0;
};

HeadTrace trace_head(const std::vector<Representation>& facts, const HeadParams& p) {
  HeadTrace trace;
  const std::size_t h = p.hidden_dim();
  const std::size_t d = p.input_dim();
  for (const Representation& rep : facts) {
    std::vector<double> t(h);
    double s = p.b2;
    for (std::size_t r = 0; r < h; ++r) {
      double z = p.b1[r];
      for (std::size_t c = 0; c < d; ++c) z += p.w1.at(r, c) * rep.values[c];
      t[r] = std::tanh(z);
      s += p.w2[r] * t[r];
    }
    double logit = p.b_logit;
    for (std::size_t c = 0; c < d; ++c) logit += p.w_logit[c] * rep.values[c];

    trace.hidden.push_back(std::move(t));
    trace.logits.push_back(logit);
    trace.raw.push_back(stable_sigmoid(s));
  }
  trace.attention = normalize_attention(trace.raw);
  trace.raw_sum = std::accumulate(trace.raw.begin(), trace.raw.end(), 0.0);
  for (std::size_t i = 0; i < facts.size(); ++i)
    trace.obs_logit += trace.attention[i] * trace.logits[i];
  trace.probability = stable_sigmoid(p.w3 * trace.obs_logit + p.b3);
  return trace;
}

void backprop_head(const std::vector<Representation>& facts, const HeadParams& p,
                   const HeadTrace& trace, double target, double lambda_obs,
                   double lambda_fact, HeadParams& grad) {
  const std::size_t h = p.hidden_dim();
  const std::size_t d = p.input_dim();
  const std::size_t n = facts.size();

  double prob = trace.probability;
  // Observation loss through the calibration sigmoid.
  double g_cal = lambda_obs * 2.0 * (prob - target) * prob * (1.0 - prob);
  grad.w3 += g_cal * trace.obs_logit;
  grad.b3 += g_cal;
  double g_obs_logit = g_cal * p.w3;

  // Per-fact logits feed the observation logit through the attention weights.
  for (std::size_t i = 0; i < n; ++i) {
    double g_logit = g_obs_logit * trace.attention[i];
    for (std::size_t c = 0; c < d; ++c)
      grad.w_logit[c] += g_logit * facts[i].values[c];
    grad.b_logit += g_logit;
  }

  std::size_t max_index = argmax_lowest(trace.raw);
  double g_fact = lambda_fact * 2.0 * (trace.raw[max_index] - target);

  for (std::size_t k = 0; k < n; ++k) {
    // d obs_logit / d raw_k through the normalization.
    double g_raw = g_obs_logit * (trace.logits[k] - trace.obs_logit) / trace.raw_sum;
    if (k == max_index) g_raw += g_fact;

    double g_s = g_raw * trace.raw[k] * (1.0 - trace.raw[k]);
    grad.b2 += g_s;
    for (std::size_t r = 0; r < h; ++r) {
      double t = trace.hidden[k][r];
      grad.w2[r] += g_s * t;
      double g_z = g_s * p.w2[r] * (1.0 - t * t);
      grad.b1[r] += g_z;
      for (std::size_t c = 0; c < d; ++c)
        grad.w1.at(r, c) += g_z * facts[k].values[c];
    }
  }
}

}  // namespace

DualHeadParams gradients(const std::vector<Representation>& facts,
                         const DualHeadParams& params, const SupervisionTargets& targets,
                         const TrainConfig& config) {
  if (facts.empty())
    throw Error(ErrorKind::InvalidArgument, "gradients need at least one fact");

  DualHeadParams grad;
  grad.contradiction = zeros_like(params.contradiction);
  grad.entailment = zeros_like(params.entailment);

  HeadTrace trace_c = trace_head(facts, params.contradiction);
  backprop_head(facts, params.contradiction, trace_c, targets.contradiction_target,
                config.lambda_obs, config.lambda_fact, grad.contradiction);

  if (targets.entailment_supervised()) {
    HeadTrace trace_e = trace_head(facts, params.entailment);
    backprop_head(facts, params.entailment, trace_e, *targets.entailment_target,
                  config.lambda_obs, config.lambda_fact, grad.entailment);
  }
  return grad;
}

std::vector<double*> parameter_view(DualHeadParams& params) {
  std::vector<double*> view;
  auto add_head = [&view](HeadParams& head) {
    for (double& v : head.w1.data) view.push_back(&v);
    for (double& v : head.b1) view.push_back(&v);
    for (double& v : head.w2) view.push_back(&v);
    view.push_back(&head.b2);
    for (double& v : head.w_logit) view.push_back(&v);
    view.push_back(&head.b_logit);
    view.push_back(&head.w3);
    view.push_back(&head.b3);
  };
  add_head(params.contradiction);
  add_head(params.entailment);
  return view;
}

namespace {

class Optimizer {
 public:
  Optimizer(OptimizerKind kind, double learning_rate, std::size_t size)
      : kind_(kind), learning_rate_(learning_rate) {
    if (kind_ == OptimizerKind::Adam) {
      m_.assign(size, 0.0);
      v_.assign(size, 0.0);
    }
  }

  void step(const std::vector<double*>& params, const std::vector<double*>& grads) {
    if (kind_ == OptimizerKind::Sgd) {
      for (std::size_t i = 0; i < params.size(); ++i)
        *params[i] -= learning_rate_ * *grads[i];
      return;
    }
    ++t_;
    const double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
    double bc1 = 1.0 - std::pow(beta1, t_);
    double bc2 = 1.0 - std::pow(beta2, t_);
    for (std::size_t i = 0; i < params.size(); ++i) {
      double g = *grads[i];
      m_[i] = beta1 * m_[i] + (1.0 - beta1) * g;
      v_[i] = beta2 * v_[i] + (1.0 - beta2) * g * g;
      *params[i] -= learning_rate_ * (m_[i] / bc1) / (std::sqrt(v_[i] / bc2) + eps);
    }
  }

 private:
  OptimizerKind kind_;
  double learning_rate_;
  std::vector<double> m_, v_;
  long t_ = 0;
};

}  // namespace

TrainResult train(const std::vector<Observation>& dataset, const Encoder& encoder,
                  const TrainConfig& config, DualHeadParams initial) {
  config.validate();
  if (dataset.empty())
    throw Error(ErrorKind::InvalidArgument, "training dataset is empty");

  std::vector<SupervisionTargets> targets;
  targets.reserve(dataset.size());
  std::vector<std::vector<Representation>> reps;
  reps.reserve(dataset.size());
  for (const Observation& obs : dataset) {
    if (!obs.label)
      throw Error(ErrorKind::InvalidArgument,
                  "observation \"" + obs.id + "\" has no label; training needs gold labels");
    for (const Fact& fact : obs.bundle.facts)
      if (fact.eval_only)
        throw Error(ErrorKind::InvalidArgument,
                    "observation \"" + obs.id + "\" carries an eval-only fact; "
                    "these must never be used in training");
    targets.push_back(
        derive_targets(*obs.label, config.contradiction_suppresses_entailment));
    reps.push_back(encode_observation(encoder, obs));  // encoder is frozen
  }

  TrainResult result;
  result.params = std::move(initial);
  auto params_view = parameter_view(result.params);

  DualHeadParams grad_accum;
  grad_accum.contradiction = zeros_like(result.params.contradiction);
  grad_accum.entailment = zeros_like(result.params.entailment);
  auto grad_view = parameter_view(grad_accum);

  Optimizer optimizer(config.optimizer, config.learning_rate, params_view.size());
  std::mt19937_64 shuffle_rng(config.seed);

  std::vector<std::size_t> order(dataset.size());
  std::iota(order.begin(), order.end(), 0);

  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    if (config.shuffle) std::shuffle(order.begin(), order.end(), shuffle_rng);

    EpochStats stats;
    stats.epoch = epoch;
    std::size_t batch_fill = 0;

    for (std::size_t pos = 0; pos < order.size(); ++pos) {
      std::size_t idx = order[pos];
      LossBreakdown loss;
      {
        ForwardResult fwd = forward(reps[idx], result.params);
        loss = compute_loss(fwd.scores, fwd.logits, targets[idx], config);
      }
      if (!std::isfinite(loss.total))
        throw Error(ErrorKind::Internal,
                    "non-finite loss at epoch " + std::to_string(epoch) +
                        ", observation \"" + dataset[idx].id + "\"; aborting");

      stats.total_loss += loss.total;
      stats.obs_loss_contradiction += loss.obs_loss_contradiction;
      stats.fact_loss_contradiction += loss.fact_loss_contradiction;
      stats.obs_loss_entailment += loss.obs_loss_entailment;
      stats.fact_loss_entailment += loss.fact_loss_entailment;

      DualHeadParams grad = gradients(reps[idx], result.params, targets[idx], config);
      auto g = parameter_view(grad);
      for (std::size_t i = 0; i < g.size(); ++i) *grad_view[i] += *g[i];
      ++batch_fill;

      bool flush = batch_fill == static_cast<std::size_t>(config.batch_size) ||
                   pos + 1 == order.size();
      if (flush) {
        // Mini-batches average their gradients.
        if (batch_fill > 1)
          for (double* v : grad_view) *v /= static_cast<double>(batch_fill);
        optimizer.step(params_view, grad_view);
        for (double* v : grad_view) *v = 0.0;
        batch_fill = 0;
      }
    }

    double n = static_cast<double>(dataset.size());
    stats.total_loss /= n;
    stats.obs_loss_contradiction /= n;
    stats.fact_loss_contradiction /= n;
    stats.obs_loss_entailment /= n;
    stats.fact_loss_entailment /= n;

    std::size_t correct = 0;
    for (std::size_t i = 0; i < dataset.size(); ++i) {
      ForwardResult fwd = forward(reps[i], result.params);
      if (classify(fwd.scores, config.threshold).predicted == *dataset[i].label)
        ++correct;
    }
    stats.accuracy = static_cast<double>(correct) / n;
    result.history.push_back(stats);
  }
  return result;
}

TrainResult train(const std::vector<Observation>& dataset, const Encoder& encoder,
                  const TrainConfig& config, std::size_t hidden_dim) {
  return train(dataset, encoder, config,
               DualHeadParams::init(encoder.dimension(), hidden_dim, config.seed));
}

void write_train_log(const std::vector<EpochStats>& history, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::Io, "cannot write training log: " + path);
  out << "epoch,total_loss,obs_loss_c,fact_loss_c,obs_loss_e,fact_loss_e,accuracy\n";
  out.precision(17);
  for (const EpochStats& stats : history)
    out << stats.epoch << ',' << stats.total_loss << ',' << stats.obs_loss_contradiction
        << ',' << stats.fact_loss_contradiction << ',' << stats.obs_loss_entailment << ','
        << stats.fact_loss_entailment << ',' << stats.accuracy << "\n";
  if (!out) throw Error(ErrorKind::Io, "write failed: " + path);
}

}  // namespace fglr
