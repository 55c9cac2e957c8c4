#include "fglr/logic_head.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "json.hpp"
#include "fglr/error.hpp"

namespace fglr {

double stable_sigmoid(double x) {
  double r;
  if (x >= 0.0) {
    double z = std::exp(-x);
    r = 1.0 / (1.0 + z);
  } else {
    double z = std::exp(x);
    r = z / (1.0 + z);
  }
  return std::clamp(r, 1e-300, 1.0 - 1e-16);
}

HeadParams zeros_like(const HeadParams& params) {
  HeadParams out;
  out.w1 = Matrix(params.w1.rows, params.w1.cols);
  out.b1.assign(params.b1.size(), 0.0);
  out.w2.assign(params.w2.size(), 0.0);
  out.w_logit.assign(params.w_logit.size(), 0.0);
  return out;
}

DualHeadParams DualHeadParams::init(std::size_t input_dim, std::size_t hidden_dim,
                                    std::uint64_t seed) {
  if (input_dim == 0 || hidden_dim == 0)
    throw Error(ErrorKind::InvalidArgument, "head dimensions must be positive");

  std::mt19937_64 rng(seed);
  auto draw = [&rng](std::size_t fan_in) {
    double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    return std::uniform_real_distribution<double>(-bound, bound)(rng);
  };
  auto init_head = [&]() {
    HeadParams head;
    head.w1 = Matrix(hidden_dim, input_dim);
    for (double& v : head.w1.data) v = draw(input_dim);
    head.b1.assign(hidden_dim, 0.0);
    head.w2.resize(hidden_dim);
    for (double& v : head.w2) v = draw(hidden_dim);
    head.b2 = 0.0;  // untrained raw attention sits near 0.5
    head.w_logit.resize(input_dim);
    for (double& v : head.w_logit) v = draw(input_dim);
    head.b_logit = 0.0;
    head.w3 = draw(1);
    head.b3 = 0.0;
    return head;
  };

  DualHeadParams params;
  params.contradiction = init_head();
  params.entailment = init_head();
  return params;
}

double raw_attention(const Representation& rep, const HeadParams& params) {
  if (rep.size() != params.input_dim())
    throw Error(ErrorKind::InvalidArgument,
                "representation dimension " + std::to_string(rep.size()) +
                    " does not match head input dimension " +
                    std::to_string(params.input_dim()));
  double s = params.b2;
  for (std::size_t r = 0; r < params.hidden_dim(); ++r) {
    double z = params.b1[r];
    for (std::size_t c = 0; c < params.input_dim(); ++c)
      z += params.w1.at(r, c) * rep.values[c];
    s += params.w2[r] * std::tanh(z);
  }
  return stable_sigmoid(s);
}

std::vector<double> normalize_attention(const std::vector<double>& raw) {
  if (raw.empty())
    throw Error(ErrorKind::InvalidArgument, "cannot normalize an empty attention list");
  double sum = 0.0;
  for (double v : raw) {
    if (!(v > 0.0))
      throw Error(ErrorKind::InvalidArgument,
                  "attention normalization requires positive entries");
    sum += v;
  }
  std::vector<double> out(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) out[i] = raw[i] / sum;
  return out;
}

namespace {

HeadScores score_head(const std::vector<Representation>& facts,
                      const HeadParams& params) {
  HeadScores scores;
  scores.logits.reserve(facts.size());
  scores.raw_attention.reserve(facts.size());
  for (const Representation& rep : facts) {
    double logit = params.b_logit;
    for (std::size_t c = 0; c < params.input_dim(); ++c)
      logit += params.w_logit[c] * rep.values[c];
    scores.logits.push_back(logit);
    scores.raw_attention.push_back(raw_attention(rep, params));
  }
  scores.attention = normalize_attention(scores.raw_attention);
  return scores;
}

HeadObservation observe_head(const HeadScores& scores, const HeadParams& params) {
  HeadObservation obs;
  for (std::size_t i = 0; i < scores.logits.size(); ++i)
    obs.logit += scores.attention[i] * scores.logits[i];
  obs.probability = stable_sigmoid(params.w3 * obs.logit + params.b3);
  return obs;
}

}  // namespace

ForwardResult forward(const std::vector<Representation>& facts,
                      const DualHeadParams& params) {
  if (facts.empty())
    throw Error(ErrorKind::InvalidArgument, "forward pass needs at least one fact");

  ForwardResult result;
  result.scores.contradiction = score_head(facts, params.contradiction);
  result.scores.entailment = score_head(facts, params.entailment);
  result.logits.contradiction =
      observe_head(result.scores.contradiction, params.contradiction);
  result.logits.entailment = observe_head(result.scores.entailment, params.entailment);
  return result;
}

namespace {

using ordered_json = nlohmann::ordered_json;

ordered_json head_to_json(const HeadParams& head) {
  ordered_json j;
  j["w1"] = head.w1.data;  // row-major, hidden x d
  j["b1"] = head.b1;
  j["w2"] = head.w2;
  j["b2"] = head.b2;
  j["w_logit"] = head.w_logit;
  j["b_logit"] = head.b_logit;
  j["w3"] = head.w3;
  j["b3"] = head.b3;
  return j;
}

HeadParams head_from_json(const nlohmann::json& j, std::size_t d, std::size_t h,
                          const std::string& name) {
  HeadParams head;
  head.w1.rows = h;
  head.w1.cols = d;
  head.w1.data = j.at("w1").get<std::vector<double>>();
  head.b1 = j.at("b1").get<std::vector<double>>();
  head.w2 = j.at("w2").get<std::vector<double>>();
  head.b2 = j.at("b2").get<double>();
  head.w_logit = j.at("w_logit").get<std::vector<double>>();
  head.b_logit = j.at("b_logit").get<double>();
  head.w3 = j.at("w3").get<double>();
  head.b3 = j.at("b3").get<double>();
  if (head.w1.data.size() != h * d || head.b1.size() != h || head.w2.size() != h ||
      head.w_logit.size() != d)
    throw Error(ErrorKind::Parse, "checkpoint head \"" + name + "\" has inconsistent shapes");
  return head;
}

}  // namespace

std::string checkpoint_to_json(const Checkpoint& checkpoint) {
  ordered_json j;
  j["format_version"] = kCheckpointFormatVersion;
  j["d"] = checkpoint.params.contradiction.input_dim();
  j["h"] = checkpoint.params.contradiction.hidden_dim();
  j["seed"] = checkpoint.seed;
  j["heads"]["contradiction"] = head_to_json(checkpoint.params.contradiction);
  j["heads"]["entailment"] = head_to_json(checkpoint.params.entailment);
  return j.dump(2);
}

void save_checkpoint(const Checkpoint& checkpoint, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::Io, "cannot write checkpoint: " + path);
  out << checkpoint_to_json(checkpoint) << "\n";
  if (!out) throw Error(ErrorKind::Io, "write failed: " + path);
}

Checkpoint checkpoint_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Parse, std::string("malformed checkpoint JSON: ") + e.what());
  }
  if (!j.contains("format_version") || j["format_version"].get<int>() != kCheckpointFormatVersion)
    throw Error(ErrorKind::Parse, "unsupported checkpoint format_version");
  std::size_t d = j.at("d").get<std::size_t>();
  std::size_t h = j.at("h").get<std::size_t>();

  Checkpoint checkpoint;
  checkpoint.seed = j.at("seed").get<std::uint64_t>();
  checkpoint.params.contradiction =
      head_from_json(j.at("heads").at("contradiction"), d, h, "contradiction");
  checkpoint.params.entailment =
      head_from_json(j.at("heads").at("entailment"), d, h, "entailment");
  return checkpoint;
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open checkpoint: " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  try {
    return checkpoint_from_json(buffer.str());
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::Parse)
      throw Error(ErrorKind::Parse, path + ": " + e.what());
    throw;
  }
}

}  // namespace fglr
