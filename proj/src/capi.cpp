#include "fglr.h"

#include <cstdlib>
#include <cstring>
#include <memory>
#include <string>

#include "fglr/config.hpp"
#include "fglr/data_model.hpp"
#include "fglr/encoder.hpp"
#include "fglr/error.hpp"
#include "fglr/generator.hpp"
#include "fglr/logic_head.hpp"
#include "fglr/metrics.hpp"
#include "fglr/rule_engine.hpp"
#include "fglr/trainer.hpp"

struct fglr_dataset {
  fglr::Split split = fglr::Split::Eval;
  std::vector<fglr::Observation> observations;
};

struct fglr_model {
  std::shared_ptr<const fglr::Encoder> encoder;
  fglr::DualHeadParams params;
  uint64_t seed = 0;
};

namespace {

thread_local std::string g_last_error;

fglr_status status_for(fglr::ErrorKind kind) {
  switch (kind) {
    case fglr::ErrorKind::InvalidArgument: return FGLR_INVALID_ARGUMENT;
    case fglr::ErrorKind::Io: return FGLR_IO_ERROR;
    case fglr::ErrorKind::Parse: return FGLR_PARSE_ERROR;
    case fglr::ErrorKind::Service: return FGLR_SERVICE_ERROR;
    case fglr::ErrorKind::Internal: return FGLR_INTERNAL_ERROR;
  }
  return FGLR_INTERNAL_ERROR;
}

template <typename F>
fglr_status guarded(F&& body) {
  try {
    return body();
  } catch (const fglr::Error& e) {
    g_last_error = e.what();
    return status_for(e.kind());
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return FGLR_INTERNAL_ERROR;
  }
}

fglr_status require(bool condition, const char* message) {
  if (condition) return FGLR_OK;
  g_last_error = message;
  return FGLR_INVALID_ARGUMENT;
}

char* copy_string(const std::string& value) {
  char* out = static_cast<char*>(std::malloc(value.size() + 1));
  std::memcpy(out, value.c_str(), value.size() + 1);
  return out;
}

fglr::Split to_split(fglr_split split) {
  return split == FGLR_SPLIT_TRAIN ? fglr::Split::Train : fglr::Split::Eval;
}

const fglr::Encoder& encoder_of(const fglr_model* model) {
  if (!model->encoder)
    throw fglr::Error(fglr::ErrorKind::InvalidArgument,
                      "model has no encoder; attach precomputed embeddings with "
                      "fglr_model_use_embeddings");
  return *model->encoder;
}

}  // namespace

extern "C" {

const char* fglr_version(void) { return "0.1.0"; }

const char* fglr_last_error(void) { return g_last_error.c_str(); }

void fglr_string_free(char* s) { std::free(s); }

fglr_status fglr_dataset_open(const char* path, fglr_split split, fglr_dataset** out) {
  if (auto s = require(path && out, "fglr_dataset_open: null argument")) return s;
  return guarded([&] {
    auto dataset = std::make_unique<fglr_dataset>();
    dataset->split = to_split(split);
    dataset->observations = fglr::load_dataset(path, dataset->split);
    *out = dataset.release();
    return FGLR_OK;
  });
}

size_t fglr_dataset_size(const fglr_dataset* dataset) {
  return dataset ? dataset->observations.size() : 0;
}

void fglr_dataset_close(fglr_dataset* dataset) { delete dataset; }

fglr_status fglr_model_new(int encoder_dim, int hidden_dim, uint64_t seed,
                           fglr_model** out) {
  if (auto s = require(out != nullptr, "fglr_model_new: null out")) return s;
  if (auto s = require(encoder_dim > 0 && hidden_dim > 0,
                       "fglr_model_new: dimensions must be positive"))
    return s;
  return guarded([&] {
    auto model = std::make_unique<fglr_model>();
    model->encoder =
        std::make_shared<fglr::HashingEncoder>(static_cast<std::size_t>(encoder_dim));
    model->params = fglr::DualHeadParams::init(
        model->encoder->dimension(), static_cast<std::size_t>(hidden_dim), seed);
    model->seed = seed;
    *out = model.release();
    return FGLR_OK;
  });
}

fglr_status fglr_model_new_from_config(const char* config_text, fglr_model** out) {
  if (auto s = require(out != nullptr, "fglr_model_new_from_config: null out")) return s;
  return guarded([&] {
    fglr::RunSettings settings =
        fglr::parse_run_settings(config_text ? config_text : "");
    return fglr_model_new(static_cast<int>(settings.encoder_dim),
                          static_cast<int>(settings.hidden_dim), settings.train.seed,
                          out);
  });
}

fglr_status fglr_model_open(const char* checkpoint_path, fglr_model** out) {
  if (auto s = require(checkpoint_path && out, "fglr_model_open: null argument"))
    return s;
  return guarded([&] {
    fglr::Checkpoint checkpoint = fglr::load_checkpoint(checkpoint_path);
    auto model = std::make_unique<fglr_model>();
    std::size_t d = checkpoint.params.contradiction.input_dim();
    // The built-in encoder contributes one interaction coordinate on top of
    // its (even) hashing dimension, so d is odd for checkpoints trained with
    // it. Anything else needs precomputed embeddings attached before use.
    if (d >= 3 && d % 2 == 1)
      model->encoder = std::make_shared<fglr::HashingEncoder>(d - 1);
    model->params = std::move(checkpoint.params);
    model->seed = checkpoint.seed;
    *out = model.release();
    return FGLR_OK;
  });
}

fglr_status fglr_model_save(const fglr_model* model, const char* checkpoint_path) {
  if (auto s = require(model && checkpoint_path, "fglr_model_save: null argument"))
    return s;
  return guarded([&] {
    fglr::save_checkpoint({model->params, model->seed}, checkpoint_path);
    return FGLR_OK;
  });
}

fglr_status fglr_model_use_embeddings(fglr_model* model, const char* embeddings_path) {
  if (auto s = require(model && embeddings_path,
                       "fglr_model_use_embeddings: null argument"))
    return s;
  return guarded([&] {
    auto encoder = std::make_shared<fglr::PrecomputedEncoder>(
        fglr::PrecomputedEncoder::load(embeddings_path));
    if (encoder->dimension() != model->params.contradiction.input_dim())
      throw fglr::Error(fglr::ErrorKind::InvalidArgument,
                        "embedding dimension " + std::to_string(encoder->dimension()) +
                            " does not match model dimension " +
                            std::to_string(model->params.contradiction.input_dim()));
    model->encoder = std::move(encoder);
    return FGLR_OK;
  });
}

void fglr_model_close(fglr_model* model) { delete model; }

fglr_status fglr_train(fglr_model* model, const fglr_dataset* data,
                       const char* config_text, const char* log_csv_path) {
  if (auto s = require(model && data, "fglr_train: null argument")) return s;
  return guarded([&] {
    fglr::RunSettings settings =
        fglr::parse_run_settings(config_text ? config_text : "");
    fglr::TrainResult result =
        fglr::train(data->observations, encoder_of(model), settings.train, model->params);
    model->params = std::move(result.params);
    if (log_csv_path) fglr::write_train_log(result.history, log_csv_path);
    return FGLR_OK;
  });
}

fglr_status fglr_evaluate(const fglr_model* model, const fglr_dataset* data,
                          double threshold, const char* fact_annotations_path,
                          char** report_json_out, char** report_text_out) {
  if (auto s = require(model && data, "fglr_evaluate: null argument")) return s;
  return guarded([&] {
    fglr::MetricsReport report =
        fglr::evaluate(data->observations, model->params, encoder_of(model), threshold);
    if (fact_annotations_path) {
      auto annotations = fglr::load_fact_annotations(fact_annotations_path);
      report.facts = fglr::evaluate_facts(data->observations, model->params,
                                          encoder_of(model), threshold, annotations);
    }
    if (report_json_out) *report_json_out = copy_string(fglr::report_to_json(report));
    if (report_text_out) *report_text_out = copy_string(fglr::report_to_text(report));
    return FGLR_OK;
  });
}

fglr_status fglr_predict(const fglr_model* model, const fglr_dataset* data,
                         double threshold, char** jsonl_out) {
  if (auto s = require(model && data && jsonl_out, "fglr_predict: null argument"))
    return s;
  return guarded([&] {
    std::string out;
    for (const fglr::Observation& obs : data->observations) {
      fglr::ForwardResult fwd =
          fglr::forward(fglr::encode_observation(encoder_of(model), obs), model->params);
      fglr::Prediction prediction = fglr::classify(fwd.scores, threshold);
      out += fglr::prediction_to_json_line(obs, prediction) + "\n";
    }
    *jsonl_out = copy_string(out);
    return FGLR_OK;
  });
}

fglr_status fglr_explain(const fglr_model* model, const fglr_dataset* data,
                         double threshold, char** jsonl_out, char** text_out) {
  if (auto s = require(model && data, "fglr_explain: null argument")) return s;
  return guarded([&] {
    std::string jsonl, text;
    for (const fglr::Observation& obs : data->observations) {
      fglr::ForwardResult fwd =
          fglr::forward(fglr::encode_observation(encoder_of(model), obs), model->params);
      fglr::Prediction prediction = fglr::classify(fwd.scores, threshold);
      jsonl += fglr::explanation_to_json_line(obs, prediction) + "\n";
      text += fglr::explanation_to_text(obs, prediction);
    }
    if (jsonl_out) *jsonl_out = copy_string(jsonl);
    if (text_out) *text_out = copy_string(text);
    return FGLR_OK;
  });
}

fglr_status fglr_generate_facts(const char* data_path, fglr_split split,
                                const char* strategy, const char* templates_dir,
                                const char* cache_path, const char* service_url,
                                const char* out_path) {
  if (auto s = require(data_path && strategy && templates_dir && out_path,
                       "fglr_generate_facts: null argument"))
    return s;
  return guarded([&] {
    fglr::FactStrategy fact_strategy = fglr::parse_strategy(strategy);
    fglr::LoadOptions options;
    options.split = to_split(split);
    options.require_facts = false;  // input records may not have facts yet
    std::vector<fglr::Observation> observations =
        fglr::load_dataset(data_path, options);

    fglr::TemplateSet templates = fglr::TemplateSet::load(templates_dir);
    fglr::GenerationCache cache(cache_path ? cache_path : "");
    std::unique_ptr<fglr::TextGenService> service;
    if (service_url && *service_url)
      service = std::make_unique<fglr::HttpService>(service_url);
    else
      service = std::make_unique<fglr::MockService>();

    for (fglr::Observation& obs : observations)
      obs.bundle = fglr::generate_bundle(obs, options.split, fact_strategy, *service,
                                         templates, cache);
    fglr::save_dataset(observations, out_path);
    return FGLR_OK;
  });
}

}  // extern "C"
