/* C API for the PHASE behavioral-fidelity toolkit.
 *
 * Every function returns a phase_rc status code; 0 is success. On failure,
 * phase_last_error() returns a thread-local message describing what went
 * wrong. Objects are opaque handles freed with their phase_*_free function.
 * Strings returned through char** out-parameters are heap-allocated and
 * freed with phase_string_free().
 */
#ifndef PHASE_H
#define PHASE_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define PHASE_API __declspec(dllexport)
#else
#define PHASE_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum phase_rc {
  PHASE_OK = 0,
  PHASE_E_USAGE = 1,   /* bad arguments, missing inputs, invalid config */
  PHASE_E_DATA = 2,    /* malformed or inconsistent data */
  PHASE_E_NUMERIC = 3, /* non-finite values, numeric failure */
} phase_rc;

PHASE_API const char* phase_version(void);
PHASE_API const char* phase_last_error(void);
PHASE_API void phase_string_free(char* s);

typedef struct phase_records phase_records;
typedef struct phase_manifest phase_manifest;
typedef struct phase_dataset phase_dataset;
typedef struct phase_codec phase_codec;
typedef struct phase_model phase_model;

/* ---- connection records -------------------------------------------------- */

/* format: "tsv", "jsonl", or "auto" (sniffs the first byte) */
PHASE_API phase_rc phase_records_read(const char* path, const char* format,
                                      phase_records** out);
PHASE_API phase_rc phase_records_write_jsonl(const phase_records* records, const char* path);
PHASE_API phase_rc phase_records_write_tsv(const phase_records* records, const char* path);
PHASE_API size_t phase_records_count(const phase_records* records);
PHASE_API size_t phase_records_issue_count(const phase_records* records);
/* key_hex: 64 hex chars; mapping_csv_path may be NULL */
PHASE_API phase_rc phase_records_pseudonymize(phase_records* records, const char* key_hex,
                                              const char* salt,
                                              const char* mapping_csv_path);
PHASE_API void phase_records_free(phase_records* records);

/* ---- synthetic corpora --------------------------------------------------- */

/* profile: "human", "beacon", "persona-default", "persona-enhanced" */
PHASE_API phase_rc phase_synth_generate(const char* profile, size_t entities, size_t days,
                                        uint64_t seed, const char* start_date,
                                        phase_records** out_records,
                                        phase_manifest** out_manifest);
/* the fixed 160 entity-day benchmark corpus (40 human / 120 beacon) */
PHASE_API phase_rc phase_synth_benchmark(uint64_t seed, phase_records** out_records,
                                         phase_manifest** out_manifest);

/* ---- label manifests ----------------------------------------------------- */

PHASE_API phase_rc phase_manifest_read(const char* path, phase_manifest** out);
PHASE_API phase_rc phase_manifest_write(const phase_manifest* manifest, const char* path);
PHASE_API void phase_manifest_free(phase_manifest* manifest);

/* ---- day sequences -------------------------------------------------------- */

/* t_bins must divide 86,400; timezone is "UTC" or a fixed offset */
PHASE_API phase_rc phase_featurize(const phase_records* records,
                                   const phase_manifest* manifest /* nullable */,
                                   uint64_t t_bins, const char* timezone,
                                   phase_dataset** out);
PHASE_API phase_rc phase_dataset_read(const char* path, phase_dataset** out);
PHASE_API phase_rc phase_dataset_write(const phase_dataset* dataset, const char* path);
PHASE_API size_t phase_dataset_count(const phase_dataset* dataset);
PHASE_API void phase_dataset_free(phase_dataset* dataset);

/* ---- feature codec -------------------------------------------------------- */

PHASE_API phase_rc phase_codec_fit(const phase_dataset* dataset, phase_codec** out);
PHASE_API phase_rc phase_codec_save(const phase_codec* codec, const char* path);
PHASE_API phase_rc phase_codec_read(const char* path, phase_codec** out);
PHASE_API void phase_codec_free(phase_codec* codec);

/* ---- training and scoring -------------------------------------------------- */

/* train_cfg_json keys (all optional): conv_filters, conv_kernel, lstm_hidden,
 * attn_heads, dropout, folds, epochs, lr, patience, min_delta, batch_size,
 * threshold, threads. Cross-validates, then fits a final model on the full
 * labeled set. report_json_out (nullable) receives the TrainReport. */
PHASE_API phase_rc phase_train(const phase_dataset* dataset, const phase_codec* codec,
                               const char* train_cfg_json, uint64_t seed,
                               phase_model** out_model, char** report_json_out);
PHASE_API phase_rc phase_model_save(const phase_model* model, const char* path);
PHASE_API phase_rc phase_model_read(const char* path, phase_model** out);
PHASE_API void phase_model_free(phase_model* model);

/* scores_csv_path / summary_json_path are nullable; scores_json_out
 * (nullable) receives the scores as a JSON array. */
PHASE_API phase_rc phase_score(const phase_model* model, const phase_codec* codec,
                               const phase_dataset* dataset, const char* scores_csv_path,
                               const char* summary_json_path, char** scores_json_out);

/* ---- whole pipeline commands ---------------------------------------------- */

/* command: synth | ingest | featurize | fit-codec | train | score | explain |
 * report. config_json holds the flat pipeline configuration; artifacts land
 * in its out_dir. Returns the command's exit status. */
PHASE_API phase_rc phase_run_command(const char* command, const char* config_json);

#ifdef __cplusplus
}
#endif

#endif /* PHASE_H */
