/*
 * C interface to the device-independent oblivious-transfer simulator.
 *
 * The library runs experiments described by JSON specs and replays persisted
 * protocol transcripts. Handles are opaque; every call reports a diot_status
 * and the last error message is available per thread via diot_last_error().
 */
#ifndef DIOT_DIOT_H
#define DIOT_DIOT_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum diot_status {
  DIOT_OK = 0,
  DIOT_ERR_ASSERTION = 1, /* experiment ran but its acceptance assertions failed */
  DIOT_ERR_CONFIG = 2,    /* bad spec, config, or file format */
  DIOT_ERR_IO = 3,        /* filesystem problem */
  DIOT_ERR_INTERNAL = 4
} diot_status;

typedef struct diot_experiment diot_experiment;

const char* diot_version(void);

/* Last error message for the calling thread; empty string when none. */
const char* diot_last_error(void);

/*
 * Experiment spec JSON:
 *   {
 *     "kind": "ot1" | "selftest" | "estimate_delta" | "ot4" | "attack"
 *             | "bounds_check",
 *     "config": { "n": ..., "l": ..., "seed": ..., ... },
 *     "trials": ...,
 *     "out": "report.jsonl",            optional
 *     "transcripts_dir": "dir",         optional (ot1/ot4)
 *     ... kind-specific options ...
 *   }
 */
diot_status diot_experiment_create(const char* spec_json, diot_experiment** out);

/* Runs the experiment and writes the report when "out" was given. Returns
 * DIOT_ERR_ASSERTION when the experiment's acceptance assertions fail. */
diot_status diot_experiment_run(diot_experiment* exp);

/* Summary JSON of the last run; owned by the handle, valid until destroy.
 * NULL before the first run. */
const char* diot_experiment_summary(const diot_experiment* exp);

/* Full JSON-lines report of the last run; owned by the handle. */
const char* diot_experiment_report(const diot_experiment* exp);

void diot_experiment_destroy(diot_experiment* exp);

/* One-shot convenience: create + run + destroy. out_path may be NULL to use
 * the spec's "out" field (or write nothing). */
diot_status diot_run_experiment_json(const char* spec_json, const char* out_path);

/* Replays a transcript file, recomputing all derived values. DIOT_OK when
 * everything matches; DIOT_ERR_ASSERTION with the first divergent field in
 * verdict_buf on mismatch; DIOT_ERR_CONFIG on parse problems. */
diot_status diot_replay_transcript(const char* path, char* verdict_buf, size_t buf_len);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* DIOT_DIOT_H */
