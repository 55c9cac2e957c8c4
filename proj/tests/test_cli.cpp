#include <cstdlib>
#include <string>
#include <sys/wait.h>

#include "doctest.h"
#include "json.hpp"
#include "fglr/data_model.hpp"
#include "support/synthetic.hpp"
#include "support/temp_dir.hpp"

using fglr::testing::make_synthetic_dataset;
using fglr::testing::read_file;
using fglr::testing::TempDir;
using fglr::testing::write_file;

namespace {

struct RunResult {
  int code = -1;
  std::string out;
  std::string err;
};

RunResult run_cli(const TempDir& dir, const std::string& args) {
  std::string out_path = dir.file("stdout.txt");
  std::string err_path = dir.file("stderr.txt");
  std::string command = std::string(FGLR_CLI_PATH) + " " + args + " > " + out_path +
                        " 2> " + err_path;
  int status = std::system(command.c_str());
  RunResult result;
  result.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  result.out = read_file(out_path);
  result.err = read_file(err_path);
  return result;
}

std::vector<std::string> jsonl_lines(const std::string& content) {
  std::vector<std::string> lines;
  std::size_t start = 0;
  while (start < content.size()) {
    std::size_t end = content.find('\n', start);
    if (end == std::string::npos) end = content.size();
    if (end > start) lines.push_back(content.substr(start, end - start));
    start = end + 1;
  }
  return lines;
}

}  // namespace

TEST_CASE("usage errors exit with code 2") {
  TempDir dir;
  CHECK(run_cli(dir, "").code == 2);
  CHECK(run_cli(dir, "no-such-command").code == 2);
  CHECK(run_cli(dir, "train --data x.jsonl").code == 2);  // missing --checkpoint
  CHECK(run_cli(dir, "--help").code == 0);
  CHECK(run_cli(dir, "--version").code == 0);
}

TEST_CASE("runtime errors exit with code 1 and a message") {
  TempDir dir;
  RunResult result =
      run_cli(dir, "eval --data missing.jsonl --checkpoint missing.json");
  CHECK(result.code == 1);
  CHECK(result.err.find("error") != std::string::npos);
}

TEST_CASE("the full pipeline runs through the command line") {
  TempDir dir;
  auto dataset = make_synthetic_dataset(8, 16, 17);
  std::string data = dir.file("train.jsonl");
  fglr::save_dataset(dataset.observations, data);
  std::string data_before = read_file(data);

  std::string config = dir.file("train.cfg");
  write_file(config,
             "encoder_dim = 16\nhidden_dim = 8\nepochs = 40\n"
             "learning_rate = 0.003\n");

  std::string checkpoint = dir.file("model.json");
  RunResult trained = run_cli(dir, "train --data " + data + " --config " + config +
                                       " --seed 7 --checkpoint " + checkpoint +
                                       " --log " + dir.file("log.csv"));
  CHECK(trained.code == 0);
  CHECK(read_file(dir.file("log.csv")).find("epoch,") != std::string::npos);

  // Same seed twice: identical checkpoints.
  std::string checkpoint2 = dir.file("model2.json");
  RunResult retrained = run_cli(dir, "train --data " + data + " --config " + config +
                                         " --seed 7 --checkpoint " + checkpoint2);
  CHECK(retrained.code == 0);
  CHECK(read_file(checkpoint) == read_file(checkpoint2));

  // eval: text table on stdout, JSON report on disk.
  std::string report_path = dir.file("report.json");
  RunResult evaluated = run_cli(dir, "eval --data " + data + " --checkpoint " +
                                         checkpoint + " --out " + report_path);
  CHECK(evaluated.code == 0);
  CHECK(evaluated.out.find("Accuracy:") != std::string::npos);
  auto report = nlohmann::json::parse(read_file(report_path));
  double accuracy = report["observations"]["accuracy"].get<double>();
  CHECK(accuracy >= 0.9);

  // predict: one JSONL line per observation; classes agree with eval's
  // confusion matrix column sums.
  std::string pred_path = dir.file("pred.jsonl");
  RunResult predicted = run_cli(dir, "predict --data " + data + " --checkpoint " +
                                         checkpoint + " --out " + pred_path);
  CHECK(predicted.code == 0);
  auto lines = jsonl_lines(read_file(pred_path));
  REQUIRE(lines.size() == dataset.observations.size());
  long long predicted_counts[3] = {0, 0, 0};
  for (const std::string& line : lines) {
    auto record = nlohmann::json::parse(line);
    std::string label = record["predicted"].get<std::string>();
    int k = label == "entailment" ? 0 : label == "neutral" ? 1 : 2;
    ++predicted_counts[k];
  }
  auto confusion = report["observations"]["confusion"];
  for (int k = 0; k < 3; ++k) {
    long long column = 0;
    for (int g = 0; g < 3; ++g) column += confusion[g][k].get<long long>();
    CHECK(predicted_counts[k] == column);
  }

  // explain: responsible facts obey the prediction invariants.
  std::string explain_path = dir.file("explain.jsonl");
  RunResult explained = run_cli(dir, "explain --data " + data + " --checkpoint " +
                                         checkpoint + " --out " + explain_path);
  CHECK(explained.code == 0);
  bool saw_entailment = false;
  for (const std::string& line : jsonl_lines(read_file(explain_path))) {
    auto record = nlohmann::json::parse(line);
    std::string label = record["predicted"].get<std::string>();
    auto& facts = record["responsible_facts"];
    if (label == "neutral") {
      CHECK(facts.empty());
    } else {
      CHECK_FALSE(facts.empty());
      for (auto& fact : facts) CHECK(fact["raw_attention"].get<double>() > 0.5);
    }
    if (label == "entailment") {
      saw_entailment = true;
      for (auto& fact : facts)
        CHECK(fact["head"].get<std::string>() == "entailment");
    }
  }
  CHECK(saw_entailment);

  // No command mutated its input.
  CHECK(read_file(data) == data_before);
}

TEST_CASE("generate-facts drives the offline mock end to end") {
  TempDir dir;
  std::string input = dir.file("raw.jsonl");
  write_file(
      input,
      R"({"id": "g1", "premise": "The bridge opened in 1931. It spans the river.", "hypothesis": "The bridge is new."})"
      "\n");
  std::string before = read_file(input);

  std::string out = dir.file("augmented.jsonl");
  RunResult result = run_cli(dir, "generate-facts --data " + input + " --out " + out +
                                      " --facts-strategy factcomb --split eval "
                                      "--templates " FGLR_TEMPLATES_DIR " --cache " +
                                      dir.file("cache.jsonl"));
  CHECK(result.code == 0);
  auto augmented = fglr::load_dataset(out, fglr::Split::Eval);
  REQUIRE(augmented.size() == 1);
  CHECK(augmented[0].bundle.facts.size() >= 2);
  CHECK(read_file(input) == before);

  // hypcond on the train split is a runtime error.
  RunResult rejected = run_cli(dir, "generate-facts --data " + input + " --out " + out +
                                        " --facts-strategy hypcond --split train "
                                        "--templates " FGLR_TEMPLATES_DIR);
  CHECK(rejected.code == 1);
  CHECK(rejected.err.find("not allowed") != std::string::npos);
}
