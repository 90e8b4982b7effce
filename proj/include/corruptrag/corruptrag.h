/*
 * Copyright (c) 2026 The corruptrag Authors. All Rights Reserved.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef CORRUPTRAG_CORRUPTRAG_H_
#define CORRUPTRAG_CORRUPTRAG_H_

#include <stddef.h>

#if defined(_WIN32)
#  if defined(CORRUPTRAG_BUILDING_LIBRARY)
#    define CRAG_API __declspec(dllexport)
#  else
#    define CRAG_API __declspec(dllimport)
#  endif
#else
#  define CRAG_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum crag_status {
  CRAG_OK = 0,
  CRAG_ERR_INVALID_ARGUMENT = 1,
  CRAG_ERR_IO = 2,
  CRAG_ERR_PARSE = 3,
  CRAG_ERR_CONSTRAINT = 4,
  CRAG_ERR_SCHEMA = 5,
  CRAG_ERR_DIMENSION = 6,
  CRAG_ERR_PROVIDER = 7,
  CRAG_ERR_BUDGET = 8,
  CRAG_ERR_CONFIG = 9,
  CRAG_ERR_INTERNAL = 10
} crag_status;

/* Opaque handles. */
typedef struct crag_store crag_store;
typedef struct crag_report crag_report;

/* Message for the last failing call on this thread; never NULL. */
CRAG_API const char* crag_last_error(void);
CRAG_API const char* crag_version(void);
CRAG_API const char* crag_status_name(crag_status status);

/* Strings returned through char** out-parameters are owned by the caller. */
CRAG_API void crag_string_free(char* s);

/* Knowledge store. Handles are immutable snapshots. */
CRAG_API crag_status crag_store_ingest_file(const char* corpus_jsonl, crag_store** out);
CRAG_API crag_status crag_store_load(const char* path, crag_store** out);
CRAG_API crag_status crag_store_save(const crag_store* store, const char* path);
CRAG_API crag_status crag_store_inject_file(const crag_store* store, const char* poisons_jsonl,
                                            crag_store** out);
CRAG_API size_t crag_store_size(const crag_store* store);
CRAG_API size_t crag_store_injected_count(const crag_store* store);
CRAG_API void crag_store_free(crag_store* store);

/*
 * Crafts one poisoned text per query and writes them as JSONL.
 * options_json: {"attack": "as|ak|pia|prag-bb", "order": "...", "ablate": "...",
 *                "V": 30, "L": 5, "config": "<run config path>", "offline": true}
 * NULL options means AS with the default order.
 */
CRAG_API crag_status crag_craft(const char* queries_jsonl, const char* options_json, const char* out_jsonl);

/* AS poisoned text for a single query; *out_text is caller-owned. */
CRAG_API crag_status crag_craft_as(const char* question, const char* correct_answer,
                                   const char* targeted_answer, const char* order, char** out_text);

/*
 * Runs an experiment. overrides_json may be NULL or
 * {"defenses": ["none", ...], "attacks": [...], "n": 5, "metric": "dot|cosine", "offline": true}.
 * A budget abort still yields a report; check crag_report_complete.
 */
CRAG_API crag_status crag_run(const char* config_path, const char* overrides_json, crag_report** out);
CRAG_API crag_status crag_report_load(const char* path, crag_report** out);
CRAG_API crag_status crag_report_to_json(const crag_report* report, char** out_json);
/* formats: comma-separated tokens, e.g. "json,csv". */
CRAG_API crag_status crag_report_emit(const crag_report* report, const char* formats, const char* out_prefix);
/* 1 when every cell finished without failed trials, 0 otherwise. */
CRAG_API int crag_report_complete(const crag_report* report);
CRAG_API void crag_report_free(crag_report* report);

/* Relevance audit of the clean store; *out_json is caller-owned. */
CRAG_API crag_status crag_audit(const char* config_path, const char* overrides_json, char** out_json);

#ifdef __cplusplus
}
#endif

#endif  /* CORRUPTRAG_CORRUPTRAG_H_ */
