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


#include "instahide/instahide.h"

#include <algorithm>
#include <exception>
#include <new>
#include <string>

#include "capi/commands.hpp"
#include "core/dataset.hpp"
#include "core/error.hpp"
#include "encrypt/encrypt.hpp"
#include "publicprep/patchset.hpp"
#include "utility/model.hpp"

struct ih_dataset {
  ih::Dataset value;
};
struct ih_patchset {
  ih::PatchSet value;
};
struct ih_model {
  ih::LinearSoftmaxModel value;
};
struct ih_report {
  std::string json;
};

namespace {

thread_local std::string g_last_error;

template <class F>
ih_status guarded(F&& f) noexcept {
  try {
    g_last_error.clear();
    f();
    return IH_OK;
  } catch (const ih::Error& e) {
    g_last_error = e.what();
    return static_cast<ih_status>(static_cast<int>(e.code()));
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
  } catch (const std::exception& e) {
    g_last_error = e.what();
  } catch (...) {
    g_last_error = "unknown error";
  }
  return IH_ERR_INTERNAL;
}

void need(const void* p, const char* what) {
  ih::require(p != nullptr, ih::ErrorCode::kInvalidArgument, std::string(what) + " is NULL");
}

}  // namespace

extern "C" {

const char* ih_version(void) { return "0.1.0"; }

const char* ih_status_name(ih_status status) {
  if (status == IH_OK) return "ok";
  if (status == IH_ERR_INTERNAL) return "internal";
  if (status >= 1 && status <= 9) return ih::to_string(static_cast<ih::ErrorCode>(status));
  return "unknown";
}

const char* ih_last_error(void) { return g_last_error.c_str(); }

int ih_status_is_usage_error(ih_status status) {
  return status == IH_ERR_INVALID_ARGUMENT || status == IH_ERR_VALIDATION ||
         status == IH_ERR_INFEASIBLE;
}

ih_status ih_dataset_load(const char* path, ih_dataset** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    *out = new ih_dataset{ih::load_dataset(path)};
  });
}

ih_status ih_dataset_save(const ih_dataset* ds, const char* path) {
  return guarded([&] {
    need(ds, "dataset");
    need(path, "path");
    ih::save_dataset(ds->value, path);
  });
}

ih_status ih_dataset_create(uint32_t count, uint16_t channels, uint16_t height, uint16_t width,
                            uint16_t classes, const float* pixels, const float* labels,
                            ih_dataset** out) {
  return guarded([&] {
    need(out, "out");
    ih::require(channels > 0 && height > 0 && width > 0, ih::ErrorCode::kInvalidArgument,
                "dims must be positive");
    ih::require(count == 0 || pixels != nullptr, ih::ErrorCode::kInvalidArgument,
                "pixels is NULL");
    ih::require((classes == 0) == (labels == nullptr), ih::ErrorCode::kInvalidArgument,
                "labels must be given exactly when classes > 0");
    ih::Dataset d;
    d.dims = ih::Dims{channels, height, width};
    d.classes = classes;
    const std::size_t n = d.dims.size();
    for (uint32_t i = 0; i < count; ++i) {
      d.images.emplace_back(d.dims, std::vector<float>(pixels + i * n, pixels + (i + 1) * n));
      if (classes > 0) {
        ih::LabelVector y;
        y.weights.assign(labels + static_cast<std::size_t>(i) * classes,
                         labels + static_cast<std::size_t>(i + 1) * classes);
        d.labels.push_back(std::move(y));
      }
    }
    d.validate();
    *out = new ih_dataset{std::move(d)};
  });
}

size_t ih_dataset_count(const ih_dataset* ds) { return ds ? ds->value.size() : 0; }

ih_status ih_dataset_dims(const ih_dataset* ds, uint16_t* channels, uint16_t* height,
                          uint16_t* width, uint16_t* classes) {
  return guarded([&] {
    need(ds, "dataset");
    if (channels) *channels = static_cast<uint16_t>(ds->value.dims.channels);
    if (height) *height = static_cast<uint16_t>(ds->value.dims.height);
    if (width) *width = static_cast<uint16_t>(ds->value.dims.width);
    if (classes) *classes = ds->value.classes;
  });
}

ih_status ih_dataset_image(const ih_dataset* ds, size_t index, float* pixels, size_t len) {
  return guarded([&] {
    need(ds, "dataset");
    need(pixels, "pixels");
    ih::require(index < ds->value.size(), ih::ErrorCode::kInvalidArgument, "index out of range");
    const auto px = ds->value.images[index].pixels();
    ih::require(len >= px.size(), ih::ErrorCode::kInvalidArgument, "buffer too small");
    std::copy(px.begin(), px.end(), pixels);
  });
}

void ih_dataset_free(ih_dataset* ds) { delete ds; }

ih_status ih_patchset_load(const char* path, ih_patchset** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    *out = new ih_patchset{ih::load_patchset(path)};
  });
}

size_t ih_patchset_count(const ih_patchset* ps) { return ps ? ps->value.size() : 0; }

void ih_patchset_free(ih_patchset* ps) { delete ps; }

ih_status ih_model_load(const char* path, ih_model** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    *out = new ih_model{ih::load_model(path)};
  });
}

ih_status ih_model_save(const ih_model* m, const char* path) {
  return guarded([&] {
    need(m, "model");
    need(path, "path");
    ih::save_model(m->value, path);
  });
}

ih_status ih_model_predict(const ih_model* m, const ih_dataset* ds, size_t index, double* probs,
                           size_t len) {
  return guarded([&] {
    need(m, "model");
    need(ds, "dataset");
    need(probs, "probs");
    ih::require(index < ds->value.size(), ih::ErrorCode::kInvalidArgument, "index out of range");
    ih::LinearSoftmaxModel model = m->value;
    ih::bind_feature_map(model, ds->value.dims.size());
    const auto p = ih::forward(model, ds->value.images[index]);
    ih::require(len >= p.size(), ih::ErrorCode::kInvalidArgument, "buffer too small");
    std::copy(p.begin(), p.end(), probs);
  });
}

size_t ih_model_classes(const ih_model* m) { return m ? m->value.classes : 0; }

void ih_model_free(ih_model* m) { delete m; }

ih_status ih_encrypt_epoch(const ih_dataset* priv, const char* scheme, uint32_t k, double c1,
                           double c2, int apply_mask, uint32_t epoch, uint64_t seed,
                           const ih_patchset* pub, ih_dataset** out) {
  return guarded([&] {
    need(priv, "dataset");
    need(scheme, "scheme");
    need(out, "out");
    ih::SchemeParams p;
    p.scheme = ih::parse_scheme(scheme);
    p.k = k;
    p.c1 = c1;
    p.c2 = c2;
    p.apply_mask = apply_mask != 0;
    p.validate();
    const auto samples = ih::encrypt_epoch(priv->value, p, epoch, ih::RngStream{seed, 0},
                                           pub ? &pub->value : nullptr);
    ih::Dataset d;
    d.name = "encrypted";
    d.dims = priv->value.dims;
    d.classes = priv->value.labeled() ? priv->value.classes : 0;
    for (const auto& s : samples) {
      d.images.push_back(s.xtilde);
      if (d.classes > 0) d.labels.push_back(s.ytilde);
    }
    *out = new ih_dataset{std::move(d)};
  });
}

ih_status ih_run(const char* command, const char* config_json, ih_report** out) {
  return guarded([&] {
    need(command, "command");
    need(out, "out");
    ih::Json cfg = ih::Json::object();
    if (config_json && *config_json) {
      cfg = ih::Json::parse(config_json, nullptr, false);
      ih::require(!cfg.is_discarded(), ih::ErrorCode::kInvalidArgument, "config is not valid JSON");
    }
    const ih::Json report = ih::run_command(command, cfg);
    *out = new ih_report{report.dump(2) + "\n"};
  });
}

const char* ih_commands(void) {
  static const std::string list = [] {
    std::string s;
    for (const auto& c : ih::command_names()) s += c + "\n";
    return s;
  }();
  return list.c_str();
}

const char* ih_report_json(const ih_report* r) { return r ? r->json.c_str() : ""; }

void ih_report_free(ih_report* r) { delete r; }

}  // extern "C"
