#include "fglr/config.hpp"

#include <fstream>
#include <sstream>

#include "fglr/error.hpp"

namespace fglr {

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0))
    throw Error(ErrorKind::InvalidArgument, "learning_rate must be > 0");
  if (epochs < 1) throw Error(ErrorKind::InvalidArgument, "epochs must be >= 1");
  if (batch_size < 1)
    throw Error(ErrorKind::InvalidArgument, "batch_size must be >= 1");
  if (lambda_obs < 0.0 || lambda_fact < 0.0)
    throw Error(ErrorKind::InvalidArgument, "loss weights must be >= 0");
  if (!(threshold >= 0.0 && threshold <= 1.0))
    throw Error(ErrorKind::InvalidArgument, "threshold must be in [0, 1]");
}

const char* optimizer_name(OptimizerKind kind) {
  return kind == OptimizerKind::Adam ? "adam" : "sgd";
}

namespace {

std::string trim(const std::string& s) {
  auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

bool parse_bool(const std::string& value, const std::string& key) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw Error(ErrorKind::Parse, "config key \"" + key + "\": expected a boolean, got \"" + value + "\"");
}

double parse_double(const std::string& value, const std::string& key) {
  try {
    std::size_t pos = 0;
    double v = std::stod(value, &pos);
    if (pos != value.size()) throw std::invalid_argument("");
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorKind::Parse, "config key \"" + key + "\": expected a number, got \"" + value + "\"");
  }
}

long long parse_int(const std::string& value, const std::string& key) {
  try {
    std::size_t pos = 0;
    long long v = std::stoll(value, &pos);
    if (pos != value.size()) throw std::invalid_argument("");
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorKind::Parse, "config key \"" + key + "\": expected an integer, got \"" + value + "\"");
  }
}

}  // namespace

RunSettings parse_run_settings(const std::string& text) {
  RunSettings settings;
  std::istringstream in(text);
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw Error(ErrorKind::Parse, "config line " + std::to_string(line_number) +
                                        ": expected `key = value`");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));

    if (key == "learning_rate") {
      settings.train.learning_rate = parse_double(value, key);
    } else if (key == "epochs") {
      settings.train.epochs = static_cast<int>(parse_int(value, key));
    } else if (key == "batch_size") {
      settings.train.batch_size = static_cast<int>(parse_int(value, key));
    } else if (key == "seed") {
      settings.train.seed = static_cast<std::uint64_t>(parse_int(value, key));
    } else if (key == "lambda_obs") {
      settings.train.lambda_obs = parse_double(value, key);
    } else if (key == "lambda_fact") {
      settings.train.lambda_fact = parse_double(value, key);
    } else if (key == "optimizer") {
      if (value == "sgd")
        settings.train.optimizer = OptimizerKind::Sgd;
      else if (value == "adam")
        settings.train.optimizer = OptimizerKind::Adam;
      else
        throw Error(ErrorKind::Parse,
                    "config key \"optimizer\": expected sgd or adam, got \"" + value + "\"");
    } else if (key == "shuffle") {
      settings.train.shuffle = parse_bool(value, key);
    } else if (key == "contradiction_suppresses_entailment") {
      settings.train.contradiction_suppresses_entailment = parse_bool(value, key);
    } else if (key == "threshold") {
      settings.train.threshold = parse_double(value, key);
    } else if (key == "encoder_dim") {
      settings.encoder_dim = static_cast<std::size_t>(parse_int(value, key));
    } else if (key == "hidden_dim") {
      settings.hidden_dim = static_cast<std::size_t>(parse_int(value, key));
    } else {
      throw Error(ErrorKind::Parse, "config line " + std::to_string(line_number) +
                                        ": unknown key \"" + key + "\"");
    }
  }
  settings.train.validate();
  return settings;
}

RunSettings load_run_settings(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open config file: " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_run_settings(buffer.str());
}

}  // namespace fglr
