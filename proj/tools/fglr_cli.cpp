// Command-line driver for the fact-level logical reasoning pipeline. Talks to
// the core exclusively through the C API in fglr.h.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "fglr.h"

namespace {

int fail(const char* what) {
  std::cerr << "error: " << what << ": " << fglr_last_error() << "\n";
  return 1;
}

bool read_file(const std::string& path, std::string& out) {
  std::ifstream in(path);
  if (!in) return false;
  std::stringstream buffer;
  buffer << in.rdbuf();
  out = buffer.str();
  return true;
}

bool write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) return false;
  out << content;
  return static_cast<bool>(out);
}

struct OwnedString {
  char* value = nullptr;
  ~OwnedString() { fglr_string_free(value); }
};

struct DatasetHandle {
  fglr_dataset* value = nullptr;
  ~DatasetHandle() { fglr_dataset_close(value); }
};

struct ModelHandle {
  fglr_model* value = nullptr;
  ~ModelHandle() { fglr_model_close(value); }
};

fglr_split split_from_name(const std::string& name) {
  return name == "eval" ? FGLR_SPLIT_EVAL : FGLR_SPLIT_TRAIN;
}

struct CommonArgs {
  std::string data;
  std::string checkpoint;
  std::string embeddings;
  std::string out;
  double threshold = 0.5;
};

int open_model_and_data(const CommonArgs& args, fglr_split split, ModelHandle& model,
                        DatasetHandle& dataset) {
  if (fglr_model_open(args.checkpoint.c_str(), &model.value) != FGLR_OK)
    return fail("loading checkpoint");
  if (!args.embeddings.empty() &&
      fglr_model_use_embeddings(model.value, args.embeddings.c_str()) != FGLR_OK)
    return fail("loading embeddings");
  if (fglr_dataset_open(args.data.c_str(), split, &dataset.value) != FGLR_OK)
    return fail("loading dataset");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fact-level logical reasoning for natural language inference"};
  app.require_subcommand(1);
  app.set_version_flag("--version", []() { return std::string(fglr_version()); });

  // generate-facts
  std::string gen_data, gen_out, gen_strategy, gen_split = "train";
  std::string gen_templates = "templates", gen_cache = "fact_cache.jsonl";
  std::string gen_service_url;
  auto* generate = app.add_subcommand(
      "generate-facts", "Decompose premises into fact lists and write the "
                        "augmented dataset");
  generate->add_option("--data", gen_data, "Input dataset JSONL")->required();
  generate->add_option("--out", gen_out, "Augmented dataset JSONL")->required();
  generate
      ->add_option("--facts-strategy", gen_strategy,
                   "One of list1, list2, factcomb, factext, hypcond")
      ->required();
  generate->add_option("--split", gen_split, "train or eval (hypcond needs eval)")
      ->check(CLI::IsMember({"train", "eval"}));
  generate->add_option("--templates", gen_templates, "Prompt template directory");
  generate->add_option("--cache", gen_cache,
                       "Append-only generation cache (empty to disable)");
  generate->add_option("--service-url", gen_service_url,
                       "Text-generation endpoint; omit for the offline mock. "
                       "Credential read from FGLR_SERVICE_TOKEN");

  // train
  std::string train_data, train_checkpoint, train_config, train_log;
  std::int64_t train_seed = -1;
  auto* train = app.add_subcommand("train", "Train the logic heads");
  train->add_option("--data", train_data, "Training dataset JSONL")->required();
  train->add_option("--checkpoint", train_checkpoint, "Checkpoint output path")
      ->required();
  train->add_option("--config", train_config, "Key-value training config file");
  train->add_option("--seed", train_seed, "Overrides the config seed");
  train->add_option("--log", train_log, "Per-epoch CSV log path");

  // eval / predict / explain share the common flags
  CommonArgs eval_args, predict_args, explain_args;
  std::string eval_annotations;
  auto add_common = [](CLI::App* cmd, CommonArgs& args, bool out_required) {
    cmd->add_option("--data", args.data, "Dataset JSONL")->required();
    cmd->add_option("--checkpoint", args.checkpoint, "Model checkpoint")->required();
    cmd->add_option("--threshold", args.threshold,
                    "Fact decision threshold (strictly exceeded)");
    cmd->add_option("--embeddings", args.embeddings,
                    "Precomputed per-fact vectors replacing the built-in encoder");
    auto* out = cmd->add_option("--out", args.out, "Output path");
    if (out_required) out->required();
  };

  auto* eval = app.add_subcommand("eval", "Score a labeled dataset");
  add_common(eval, eval_args, false);
  eval->add_option("--fact-annotations", eval_annotations,
                   "Per-fact gold labels JSONL for fact-level metrics");
  auto* predict = app.add_subcommand("predict", "Write per-observation predictions");
  add_common(predict, predict_args, true);
  auto* explain = app.add_subcommand(
      "explain", "Report the facts responsible for each prediction");
  add_common(explain, explain_args, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  if (generate->parsed()) {
    if (fglr_generate_facts(gen_data.c_str(), split_from_name(gen_split),
                            gen_strategy.c_str(), gen_templates.c_str(),
                            gen_cache.empty() ? nullptr : gen_cache.c_str(),
                            gen_service_url.empty() ? nullptr : gen_service_url.c_str(),
                            gen_out.c_str()) != FGLR_OK)
      return fail("generating facts");
    std::cout << "wrote " << gen_out << "\n";
    return 0;
  }

  if (train->parsed()) {
    std::string config_text;
    if (!train_config.empty() && !read_file(train_config, config_text)) {
      std::cerr << "error: cannot read config file: " << train_config << "\n";
      return 1;
    }
    if (train_seed >= 0)
      config_text += "\nseed = " + std::to_string(train_seed) + "\n";

    ModelHandle model;
    if (fglr_model_new_from_config(config_text.c_str(), &model.value) != FGLR_OK)
      return fail("creating model");
    DatasetHandle dataset;
    if (fglr_dataset_open(train_data.c_str(), FGLR_SPLIT_TRAIN, &dataset.value) !=
        FGLR_OK)
      return fail("loading dataset");
    if (fglr_train(model.value, dataset.value, config_text.c_str(),
                   train_log.empty() ? nullptr : train_log.c_str()) != FGLR_OK)
      return fail("training");
    if (fglr_model_save(model.value, train_checkpoint.c_str()) != FGLR_OK)
      return fail("saving checkpoint");
    std::cout << "wrote " << train_checkpoint << "\n";
    return 0;
  }

  if (eval->parsed()) {
    ModelHandle model;
    DatasetHandle dataset;
    if (int rc = open_model_and_data(eval_args, FGLR_SPLIT_EVAL, model, dataset))
      return rc;
    OwnedString json, text;
    if (fglr_evaluate(model.value, dataset.value, eval_args.threshold,
                      eval_annotations.empty() ? nullptr : eval_annotations.c_str(),
                      &json.value, &text.value) != FGLR_OK)
      return fail("evaluating");
    std::cout << text.value;
    if (!eval_args.out.empty() && !write_file(eval_args.out, json.value)) {
      std::cerr << "error: cannot write report: " << eval_args.out << "\n";
      return 1;
    }
    return 0;
  }

  if (predict->parsed()) {
    ModelHandle model;
    DatasetHandle dataset;
    if (int rc = open_model_and_data(predict_args, FGLR_SPLIT_EVAL, model, dataset))
      return rc;
    OwnedString jsonl;
    if (fglr_predict(model.value, dataset.value, predict_args.threshold,
                     &jsonl.value) != FGLR_OK)
      return fail("predicting");
    if (!write_file(predict_args.out, jsonl.value)) {
      std::cerr << "error: cannot write predictions: " << predict_args.out << "\n";
      return 1;
    }
    return 0;
  }

  if (explain->parsed()) {
    ModelHandle model;
    DatasetHandle dataset;
    if (int rc = open_model_and_data(explain_args, FGLR_SPLIT_EVAL, model, dataset))
      return rc;
    OwnedString jsonl, text;
    if (fglr_explain(model.value, dataset.value, explain_args.threshold, &jsonl.value,
                     &text.value) != FGLR_OK)
      return fail("explaining");
    std::cout << text.value;
    if (!explain_args.out.empty() && !write_file(explain_args.out, jsonl.value)) {
      std::cerr << "error: cannot write explanations: " << explain_args.out << "\n";
      return 1;
    }
    return 0;
  }
  return 2;
}
