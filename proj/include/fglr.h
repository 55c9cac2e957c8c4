/* Fact-level logical reasoning for NLI: C API.
 *
 * All functions return FGLR_OK on success; on failure they return a status
 * code and leave a message retrievable with fglr_last_error() (thread-local,
 * valid until the next failing call on the same thread). Handles are opaque
 * and owned by the caller via the matching *_close function. Strings written
 * through char** out-parameters must be released with fglr_string_free().
 */
#ifndef FGLR_H
#define FGLR_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define FGLR_API __declspec(dllexport)
#else
#define FGLR_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum fglr_status {
  FGLR_OK = 0,
  FGLR_INVALID_ARGUMENT = 1,
  FGLR_IO_ERROR = 2,
  FGLR_PARSE_ERROR = 3,
  FGLR_SERVICE_ERROR = 4,
  FGLR_INTERNAL_ERROR = 5
} fglr_status;

typedef enum fglr_split {
  FGLR_SPLIT_TRAIN = 0, /* hypothesis-conditioned facts are dropped */
  FGLR_SPLIT_EVAL = 1
} fglr_split;

typedef struct fglr_dataset fglr_dataset;
typedef struct fglr_model fglr_model;

FGLR_API const char* fglr_version(void);
FGLR_API const char* fglr_last_error(void);
FGLR_API void fglr_string_free(char* s);

/* Datasets: JSONL, one observation per line. */
FGLR_API fglr_status fglr_dataset_open(const char* path, fglr_split split,
                                       fglr_dataset** out);
FGLR_API size_t fglr_dataset_size(const fglr_dataset* dataset);
FGLR_API void fglr_dataset_close(fglr_dataset* dataset);

/* Models: the built-in hashing encoder plus both logic heads.
 * encoder_dim is the hashing dimension (even, default 64);
 * hidden_dim sizes the attention scorer (default 32). */
FGLR_API fglr_status fglr_model_new(int encoder_dim, int hidden_dim, uint64_t seed,
                                    fglr_model** out);
/* Reads encoder_dim / hidden_dim / seed from key-value config text
 * (NULL or empty for defaults). */
FGLR_API fglr_status fglr_model_new_from_config(const char* config_text,
                                                fglr_model** out);
FGLR_API fglr_status fglr_model_open(const char* checkpoint_path, fglr_model** out);
FGLR_API fglr_status fglr_model_save(const fglr_model* model,
                                     const char* checkpoint_path);
/* Replace the encoder with precomputed per-fact vectors; their dimension must
 * match the checkpoint. */
FGLR_API fglr_status fglr_model_use_embeddings(fglr_model* model,
                                               const char* embeddings_path);
FGLR_API void fglr_model_close(fglr_model* model);

/* Training. config_text uses the documented `key = value` format; later
 * occurrences of a key win. log_csv_path may be NULL. */
FGLR_API fglr_status fglr_train(fglr_model* model, const fglr_dataset* data,
                                const char* config_text, const char* log_csv_path);

/* Evaluation. fact_annotations_path may be NULL. The report is written as
 * JSON and as an aligned text table; either out-parameter may be NULL. */
FGLR_API fglr_status fglr_evaluate(const fglr_model* model, const fglr_dataset* data,
                                   double threshold, const char* fact_annotations_path,
                                   char** report_json_out, char** report_text_out);

/* Per-observation predictions as JSONL. */
FGLR_API fglr_status fglr_predict(const fglr_model* model, const fglr_dataset* data,
                                  double threshold, char** jsonl_out);

/* Responsible-fact explanations: JSONL plus a human-readable rendering.
 * Either out-parameter may be NULL. */
FGLR_API fglr_status fglr_explain(const fglr_model* model, const fglr_dataset* data,
                                  double threshold, char** jsonl_out, char** text_out);

/* Fact generation. strategy is one of list1, list2, factcomb, factext,
 * hypcond. service_url NULL or empty selects the deterministic offline mock;
 * the credential for a real endpoint is read from FGLR_SERVICE_TOKEN.
 * cache_path may be NULL to skip the on-disk cache. Writes the augmented
 * dataset to out_path. */
FGLR_API fglr_status fglr_generate_facts(const char* data_path, fglr_split split,
                                         const char* strategy,
                                         const char* templates_dir,
                                         const char* cache_path,
                                         const char* service_url,
                                         const char* out_path);

#ifdef __cplusplus
}
#endif

#endif /* FGLR_H */
