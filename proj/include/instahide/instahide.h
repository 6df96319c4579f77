// Copyright 2026 The instahide-toolkit Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#ifndef INSTAHIDE_INSTAHIDE_H_
#define INSTAHIDE_INSTAHIDE_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define IH_API __declspec(dllexport)
#else
#define IH_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Status codes. Values are stable. */
typedef enum ih_status {
  IH_OK = 0,
  IH_ERR_INVALID_ARGUMENT = 1,
  IH_ERR_FORMAT = 2,
  IH_ERR_IO = 3,
  IH_ERR_DEGENERATE = 4,
  IH_ERR_INFEASIBLE = 5,
  IH_ERR_DIM_MISMATCH = 6,
  IH_ERR_VALIDATION = 7,
  IH_ERR_DIVERGED = 8,
  IH_ERR_INSUFFICIENT_DATA = 9,
  IH_ERR_INTERNAL = 100
} ih_status;

typedef struct ih_dataset ih_dataset;
typedef struct ih_patchset ih_patchset;
typedef struct ih_model ih_model;
typedef struct ih_report ih_report;

IH_API const char* ih_version(void);
IH_API const char* ih_status_name(ih_status status);
/* Message of the last failed call on this thread ("" if none). */
IH_API const char* ih_last_error(void);
/* True for statuses caused by bad options rather than runtime failures. */
IH_API int ih_status_is_usage_error(ih_status status);

/* Datasets (IHDS). */
IH_API ih_status ih_dataset_load(const char* path, ih_dataset** out);
IH_API ih_status ih_dataset_save(const ih_dataset* ds, const char* path);
/* Copies `count` images of channels*height*width f32 pixels (channel-major).
   `labels` may be NULL (classes must then be 0), else count*classes f32. */
IH_API ih_status ih_dataset_create(uint32_t count, uint16_t channels, uint16_t height,
                                   uint16_t width, uint16_t classes, const float* pixels,
                                   const float* labels, ih_dataset** out);
IH_API size_t ih_dataset_count(const ih_dataset* ds);
IH_API ih_status ih_dataset_dims(const ih_dataset* ds, uint16_t* channels, uint16_t* height,
                                 uint16_t* width, uint16_t* classes);
/* Copies image `index` into `pixels` (capacity `len` floats). */
IH_API ih_status ih_dataset_image(const ih_dataset* ds, size_t index, float* pixels, size_t len);
IH_API void ih_dataset_free(ih_dataset* ds);

/* Public patch sets (IHDS plus provenance sidecar). */
IH_API ih_status ih_patchset_load(const char* path, ih_patchset** out);
IH_API size_t ih_patchset_count(const ih_patchset* ps);
IH_API void ih_patchset_free(ih_patchset* ps);

/* Linear softmax models (IHMD). */
IH_API ih_status ih_model_load(const char* path, ih_model** out);
IH_API ih_status ih_model_save(const ih_model* m, const char* path);
/* Class probabilities for image `index` of `ds` (capacity `len`). */
IH_API ih_status ih_model_predict(const ih_model* m, const ih_dataset* ds, size_t index,
                                  double* probs, size_t len);
IH_API size_t ih_model_classes(const ih_model* m);
IH_API void ih_model_free(ih_model* m);

/* Encrypts one epoch of `priv`. scheme: "mixup", "inside" or "cross";
   `pub` is required for cross and ignored otherwise. */
IH_API ih_status ih_encrypt_epoch(const ih_dataset* priv, const char* scheme, uint32_t k,
                                  double c1, double c2, int apply_mask, uint32_t epoch,
                                  uint64_t seed, const ih_patchset* pub, ih_dataset** out);

/* Runs a command ("encrypt", "attack pair", "stats ks-table", ...) with a
   JSON object of options. The report embeds the resolved options and seed. */
IH_API ih_status ih_run(const char* command, const char* config_json, ih_report** out);
/* Newline-separated list of commands; owned by the library. */
IH_API const char* ih_commands(void);
/* Pretty-printed report JSON; owned by the report. */
IH_API const char* ih_report_json(const ih_report* r);
IH_API void ih_report_free(ih_report* r);

#ifdef __cplusplus
}
#endif

#endif /* INSTAHIDE_INSTAHIDE_H_ */
