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


#include "capi/commands.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <sstream>

#include "attacks/gradmatch.hpp"
#include "attacks/pair.hpp"
#include "attacks/report.hpp"
#include "attacks/scan.hpp"
#include "attacks/similarity.hpp"
#include "core/dataset.hpp"
#include "core/error.hpp"
#include "core/sampling.hpp"
#include "encrypt/challenge.hpp"
#include "encrypt/encrypt.hpp"
#include "encrypt/keyfile.hpp"
#include "harness/synthetic.hpp"
#include "publicprep/patchset.hpp"
#include "stats/concentration.hpp"
#include "stats/protocol.hpp"
#include "utility/model.hpp"

namespace ih {

namespace {

constexpr const char* kVersion = "0.1.0";

std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

}  // namespace

Config::Config(Json input) : input_(std::move(input)) {
  if (input_.is_null()) input_ = Json::object();
  require(input_.is_object(), ErrorCode::kInvalidArgument, "config must be a JSON object");
}

const Json* Config::find(const std::string& key) {
  used_.insert(key);
  auto it = input_.find(key);
  if (it == input_.end() || it->is_null()) return nullptr;
  return &*it;
}

std::string Config::str(const std::string& key, const std::string& def) {
  const Json* v = find(key);
  std::string out = def;
  if (v) {
    require(v->is_string(), ErrorCode::kValidation, key + ": expected a string");
    out = v->get<std::string>();
  }
  resolved_[key] = out;
  return out;
}

std::string Config::path(const std::string& key) {
  const Json* v = find(key);
  require(v && v->is_string() && !v->get<std::string>().empty(), ErrorCode::kValidation,
          "missing required option '" + key + "'");
  resolved_[key] = v->get<std::string>();
  return v->get<std::string>();
}

std::optional<std::string> Config::opt_path(const std::string& key) {
  const Json* v = find(key);
  if (!v) return std::nullopt;
  require(v->is_string(), ErrorCode::kValidation, key + ": expected a path");
  if (v->get<std::string>().empty()) return std::nullopt;
  resolved_[key] = v->get<std::string>();
  return v->get<std::string>();
}

std::uint64_t Config::u64(const std::string& key, std::uint64_t def) {
  const Json* v = find(key);
  std::uint64_t out = def;
  if (v) {
    if (v->is_number_unsigned()) {
      out = v->get<std::uint64_t>();
    } else if (v->is_string()) {
      const std::string s = v->get<std::string>();
      auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
      require(ec == std::errc() && p == s.data() + s.size() && !s.empty(), ErrorCode::kValidation,
              key + ": expected a non-negative integer, got '" + s + "'");
    } else {
      fail(ErrorCode::kValidation, key + ": expected a non-negative integer");
    }
  }
  resolved_[key] = out;
  return out;
}

double Config::real(const std::string& key, double def) {
  const Json* v = find(key);
  double out = def;
  if (v) {
    if (v->is_number()) {
      out = v->get<double>();
    } else if (v->is_string()) {
      const std::string s = v->get<std::string>();
      std::size_t used = 0;
      try {
        out = std::stod(s, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      require(used == s.size() && !s.empty(), ErrorCode::kValidation,
              key + ": expected a number, got '" + s + "'");
    } else {
      fail(ErrorCode::kValidation, key + ": expected a number");
    }
    require(std::isfinite(out), ErrorCode::kValidation, key + ": must be finite");
  }
  resolved_[key] = out;
  return out;
}

std::optional<double> Config::opt_real(const std::string& key) {
  if (!find(key)) return std::nullopt;
  return real(key, 0.0);
}

bool Config::flag(const std::string& key, bool def) {
  const Json* v = find(key);
  bool out = def;
  if (v) {
    if (v->is_boolean()) {
      out = v->get<bool>();
    } else if (v->is_string()) {
      const std::string s = lower(v->get<std::string>());
      if (s == "true" || s == "1" || s == "yes" || s == "on") {
        out = true;
      } else if (s == "false" || s == "0" || s == "no" || s == "off") {
        out = false;
      } else {
        fail(ErrorCode::kValidation, key + ": expected true/false, got '" + s + "'");
      }
    } else if (v->is_number_integer()) {
      out = v->get<std::int64_t>() != 0;
    } else {
      fail(ErrorCode::kValidation, key + ": expected a boolean");
    }
  }
  resolved_[key] = out;
  return out;
}

void Config::finish() const {
  for (const auto& [k, v] : input_.items())
    require(k == "seed" || used_.count(k) > 0, ErrorCode::kInvalidArgument, "unknown option '" + k + "'");
}

namespace {

RngStream base_stream(Config& c) { return RngStream{c.u64("seed", 1), 0}; }

SchemeParams read_scheme(Config& c, const std::string& def_scheme, std::size_t def_k) {
  SchemeParams p;
  p.scheme = parse_scheme(c.str("scheme", def_scheme));
  p.k = c.size("k", def_k);
  p.c1 = c.real("c1", 0.65);
  p.c2 = c.real("c2", 0.3);
  p.apply_mask = c.flag("mask", true);
  p.validate();
  return p;
}

Json dims_json(const Dims& d) { return Json::array({d.channels, d.height, d.width}); }

std::uint16_t to_u16(std::uint64_t v, const char* what) {
  require(v >= 1 && v <= 65535, ErrorCode::kValidation, std::string(what) + " must lie in [1, 65535]");
  return static_cast<std::uint16_t>(v);
}

void save_single_image(const Image& im, const std::string& path) {
  Dataset d;
  d.name = "reconstruction";
  d.dims = im.dims();
  d.images.push_back(im);
  save_dataset(d, path);
}

void require_index(std::size_t index, std::size_t n, const char* what) {
  require(index < n, ErrorCode::kValidation,
          std::string(what) + " index " + std::to_string(index) + " out of range (size " +
              std::to_string(n) + ")");
}

std::vector<KeyRecord> load_aligned_keys(const std::string& path, const Dataset& data) {
  auto keys = load_keys(path);
  require(keys.size() == data.size(), ErrorCode::kValidation,
          "keys file has " + std::to_string(keys.size()) + " entries for " +
              std::to_string(data.size()) + " samples");
  return keys;
}

std::vector<std::size_t> members_tagged(const EncryptionKey& key, SourceTag tag) {
  std::vector<std::size_t> out;
  for (const auto& s : key.sources)
    if (s.tag == tag) out.push_back(s.index);
  return out;
}

std::vector<std::size_t> public_members(const EncryptionKey& key) {
  return members_tagged(key, SourceTag::kPublic);
}

// --- import / export ------------------------------------------------------

Json cmd_import(Config& c) {
  const std::string raw = c.path("raw");
  const auto labels_path = c.opt_path("labels");
  const Dims dims{to_u16(c.u64("channels", 3), "channels"), to_u16(c.u64("height", 32), "height"),
                  to_u16(c.u64("width", 32), "width")};
  const std::uint64_t classes_opt = c.u64("classes", 0);
  const std::string out = c.path("out");
  c.finish();

  const auto bytes = read_file(raw);
  const std::size_t d = dims.size();
  require(bytes.size() % d == 0, ErrorCode::kFormat,
          "import: " + std::to_string(bytes.size()) + " bytes is not a multiple of d = " +
              std::to_string(d));
  const std::size_t n = bytes.size() / d;
  Dataset ds;
  ds.name = "import";
  ds.dims = dims;
  for (std::size_t i = 0; i < n; ++i) {
    // Raw layout: height x width x channels, interleaved u8 per image.
    std::vector<float> px(d);
    const std::uint8_t* src = bytes.data() + i * d;
    for (std::size_t y = 0; y < dims.height; ++y)
      for (std::size_t x = 0; x < dims.width; ++x)
        for (std::size_t ch = 0; ch < dims.channels; ++ch)
          px[(ch * dims.height + y) * dims.width + x] =
              static_cast<float>(src[(y * dims.width + x) * dims.channels + ch]) / 255.0f;
    ds.images.emplace_back(dims, std::move(px));
  }
  if (labels_path) {
    std::ifstream in(*labels_path);
    require(static_cast<bool>(in), ErrorCode::kIo, "import: cannot open " + *labels_path);
    std::vector<std::uint64_t> cls;
    std::string line;
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty()) continue;
      std::uint64_t v = 0;
      auto [p, ec] = std::from_chars(line.data(), line.data() + line.size(), v);
      require(ec == std::errc() && p == line.data() + line.size(), ErrorCode::kFormat,
              "import: bad label row '" + line + "'");
      cls.push_back(v);
    }
    require(cls.size() == n, ErrorCode::kFormat,
            "import: " + std::to_string(cls.size()) + " label rows for " + std::to_string(n) +
                " images");
    std::uint64_t classes = classes_opt;
    if (classes == 0)
      for (auto v : cls) classes = std::max(classes, v + 1);
    ds.classes = to_u16(classes, "classes");
    for (auto v : cls) {
      require(v < classes, ErrorCode::kFormat, "import: label " + std::to_string(v) + " >= classes");
      LabelVector y;
      y.weights.assign(classes, 0.0f);
      y.weights[v] = 1.0f;
      ds.labels.push_back(std::move(y));
    }
  }
  save_dataset(ds, out);
  return {{"count", n}, {"dims", dims_json(dims)}, {"classes", ds.classes}};
}

Json cmd_export(Config& c) {
  const std::string in = c.path("in");
  const std::string raw = c.path("raw");
  const auto labels_path = c.opt_path("labels");
  c.finish();
  const Dataset ds = load_dataset(in);
  const std::size_t d = ds.dims.size();
  std::vector<std::uint8_t> bytes(ds.size() * d);
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const auto px = ds.images[i].pixels();
    for (std::size_t y = 0; y < ds.dims.height; ++y)
      for (std::size_t x = 0; x < ds.dims.width; ++x)
        for (std::size_t ch = 0; ch < ds.dims.channels; ++ch) {
          const float v = px[(ch * ds.dims.height + y) * ds.dims.width + x];
          require(v >= 0.0f && v <= 1.0f, ErrorCode::kValidation,
                  "export: pixel outside [0,1]; only raw-range datasets can be exported");
          bytes[i * d + (y * ds.dims.width + x) * ds.dims.channels + ch] =
              static_cast<std::uint8_t>(std::lround(v * 255.0f));
        }
  }
  write_file(raw, bytes);
  if (labels_path) {
    require(ds.labeled(), ErrorCode::kValidation, "export: dataset has no labels");
    std::string text;
    for (const auto& y : ds.labels) text += std::to_string(argmax(std::span<const float>(y.weights))) + "\n";
    write_text(*labels_path, text);
  }
  return {{"count", ds.size()}, {"dims", dims_json(ds.dims)}};
}

Json cmd_generate(Config& c) {
  const std::string kind = c.str("kind", "gaussian");
  const std::size_t n = c.size("n", 100);
  const Dims dims{to_u16(c.u64("channels", 3), "channels"), to_u16(c.u64("height", 32), "height"),
                  to_u16(c.u64("width", 32), "width")};
  const std::string out = c.path("out");
  const RngStream s = base_stream(c);
  if (kind == "gaussian") {
    const auto classes = static_cast<std::uint16_t>(c.u64("classes", 10));
    const bool normalize = c.flag("normalize", true);
    c.finish();
    const Dataset ds = gaussian_dataset(n, dims, classes, normalize, s.child(1));
    save_dataset(ds, out);
    return {{"count", ds.size()}, {"dims", dims_json(dims)}};
  }
  if (kind == "texture") {
    c.finish();
    const Dataset ds = texture_sources(n, dims, s.child(1));
    save_dataset(ds, out);
    return {{"count", ds.size()}, {"dims", dims_json(dims)}};
  }
  require(kind == "separable", ErrorCode::kValidation,
          "kind must be gaussian, texture or separable");
  const auto classes = static_cast<std::uint16_t>(c.u64("classes", 4));
  const double noise = c.real("noise", 0.7);
  const std::size_t n_test = c.size("n_test", n);
  const std::string test_out = c.path("test_out");
  c.finish();
  const SeparableSplit split = separable_dataset(n, n_test, dims, classes, noise, s.child(1));
  save_dataset(split.train, out);
  save_dataset(split.test, test_out);
  return {{"count", split.train.size()}, {"test_count", split.test.size()}, {"dims", dims_json(dims)}};
}

// --- preprocessing and encryption -----------------------------------------

Json cmd_prep_public(Config& c) {
  const std::string in = c.path("in");
  const std::string out = c.path("out");
  PatchSetOptions po;
  po.height = to_u16(c.u64("height", 32), "height");
  po.width = to_u16(c.u64("width", 32), "width");
  po.per_image = c.size("per_image", 1);
  po.min_keypoints = static_cast<std::uint32_t>(c.u64("min_keypoints", 40));
  po.normalize = c.flag("normalize", true);
  const RngStream s = base_stream(c);
  c.finish();
  const Dataset src = load_dataset(in);
  const PatchSetResult r = build_patchset(src, po, s.child(1));
  save_patchset(r.patchset, out);
  return {{"sources", src.size()},
          {"generated", r.generated},
          {"retained", r.patchset.size()},
          {"retention", r.retention},
          {"dims", dims_json(r.patchset.dims)}};
}

std::optional<PatchSet> maybe_public(Config& c, const SchemeParams& p) {
  const auto pub = c.opt_path("public");
  if (p.scheme == Scheme::kCross) {
    require(pub.has_value(), ErrorCode::kValidation, "cross scheme requires 'public'");
    return load_patchset(*pub);
  }
  return std::nullopt;
}

Json cmd_encrypt(Config& c) {
  const std::string priv_path = c.path("private");
  const SchemeParams p = read_scheme(c, "inside", 4);
  auto pub = maybe_public(c, p);
  const auto epochs = static_cast<std::uint32_t>(c.u64("epochs", 1));
  const std::string out = c.path("out");
  const auto keys_path = c.opt_path("keys");
  const RngStream s = base_stream(c);
  c.finish();
  require(epochs >= 1, ErrorCode::kValidation, "epochs must be >= 1");
  const Dataset priv = load_dataset(priv_path);
  const auto hist = encrypt_history(priv, p, epochs, s.child(1), pub ? &*pub : nullptr);
  std::vector<EncryptedSample> samples;
  std::vector<KeyRecord> keys;
  for (const auto& e : hist) {
    samples.push_back(e.sample);
    keys.push_back({e.key, e.sample.epoch, e.sample.sample_id});
  }
  Dataset ds = to_challenge_dataset(samples, priv.labeled() ? priv.classes : 0);
  ds.name = "encrypted";
  save_dataset(ds, out);
  if (keys_path) save_keys(keys, *keys_path);
  return {{"count", ds.size()}, {"epochs", epochs}, {"n", priv.size()}};
}

Json cmd_challenge(Config& c) {
  const std::string priv_path = c.path("private");
  const std::string pub_path = c.path("public");
  SchemeParams p;
  p.scheme = Scheme::kCross;
  p.k = c.size("k", 6);
  p.c1 = c.real("c1", 0.65);
  p.c2 = c.real("c2", 0.3);
  p.apply_mask = true;
  const auto epochs = static_cast<std::uint32_t>(c.u64("epochs", 50));
  const std::string out = c.path("out");
  const RngStream s = base_stream(c);
  c.finish();
  p.validate();
  require(epochs >= 1, ErrorCode::kValidation, "epochs must be >= 1");
  const Dataset priv = load_dataset(priv_path);
  const PatchSet pub = load_patchset(pub_path);
  const auto hist = encrypt_history(priv, p, epochs, s.child(1), &pub);
  std::vector<EncryptedSample> samples;
  samples.reserve(hist.size());
  for (const auto& e : hist) samples.push_back(e.sample);
  const Dataset ds = to_challenge_dataset(samples, priv.labeled() ? priv.classes : 0);
  ChallengeMeta meta{p, epochs, priv.size(), ds.size()};
  const std::vector<const std::vector<Image>*> originals{&priv.images, &pub.patches};
  write_challenge(ds, meta, originals, out);
  return {{"count", ds.size()},
          {"n", priv.size()},
          {"epochs", epochs},
          {"plaintext_rows", count_plaintext_rows(ds, originals)},
          {"meta_path", challenge_meta_path(out).string()}};
}

// --- training --------------------------------------------------------------

Json cmd_train(Config& c) {
  const std::string train_path = c.path("train");
  const std::string out = c.path("out");
  const FeatureMap fmap = parse_feature_map(c.str("feature", "raw"));
  const std::string scheme = c.str("scheme", "none");
  SchemeParams p;
  std::optional<PatchSet> pub;
  if (scheme != "none") {
    p.scheme = parse_scheme(scheme);
    p.k = c.size("k", 4);
    p.c1 = c.real("c1", 0.65);
    p.c2 = c.real("c2", 0.3);
    p.apply_mask = c.flag("mask", true);
    p.validate();
    pub = maybe_public(c, p);
  }
  TrainOptions to;
  to.epochs = static_cast<std::uint32_t>(c.u64("epochs", 50));
  to.lr = c.real("lr", 0.1);
  to.momentum = c.real("momentum", 0.9);
  to.batch = c.size("batch", 128);
  to.l2 = c.real("l2", 1e-4);
  const RngStream s = base_stream(c);
  c.finish();

  const Dataset data = load_dataset(train_path);
  require(data.labeled(), ErrorCode::kValidation, "train: dataset has no labels");
  const auto model0 =
      LinearSoftmaxModel::zeros(data.classes, feature_width(fmap, data.dims.size()), fmap);
  EpochProvider provider;
  auto store = std::make_shared<std::vector<EncryptedSample>>();
  if (scheme == "none") {
    provider = [&data](std::uint32_t) {
      std::vector<TrainSample> v;
      for (std::size_t i = 0; i < data.size(); ++i) v.push_back({&data.images[i], &data.labels[i]});
      return v;
    };
  } else {
    const PatchSet* pp = pub ? &*pub : nullptr;
    provider = [&data, p, pp, store, s](std::uint32_t epoch) {
      *store = encrypt_epoch(data, p, epoch, s.child(2), pp);
      std::vector<TrainSample> v;
      for (const auto& e : *store) v.push_back({&e.xtilde, &e.ytilde});
      return v;
    };
  }
  const TrainResult res = train(model0, provider, to, s.child(3));
  save_model(res.model, out);
  return {{"epoch_loss", res.epoch_loss},
          {"final_loss", res.epoch_loss.empty() ? Json(nullptr) : Json(res.epoch_loss.back())},
          {"classes", res.model.classes},
          {"dim", res.model.dim},
          {"feature", to_string(res.model.feature)}};
}

Json cmd_eval(Config& c) {
  const std::string model_path = c.path("model");
  const std::string test_path = c.path("test");
  const std::string mode = c.str("mode", "plain");
  EvalOptions eo;
  std::optional<Dataset> pool;
  std::optional<PatchSet> pub;
  if (mode == "encrypted") {
    eo.mode = EvalMode::kEncrypted;
    eo.params = read_scheme(c, "inside", 4);
    pool = load_dataset(c.path("pool"));
    pub = maybe_public(c, eo.params);
    eo.E = c.size("E", 10);
  } else {
    require(mode == "plain", ErrorCode::kValidation, "mode must be plain or encrypted");
  }
  const RngStream s = base_stream(c);
  c.finish();
  LinearSoftmaxModel m = load_model(model_path);
  const Dataset test = load_dataset(test_path);
  require(test.labeled(), ErrorCode::kValidation, "eval: test set has no labels");
  bind_feature_map(m, test.dims.size());
  eo.pool = pool ? &*pool : nullptr;
  eo.pub = pub ? &*pub : nullptr;
  return {{"accuracy", evaluate(m, test, eo, s.child(1))}, {"count", test.size()}, {"mode", mode}};
}

// --- attacks ---------------------------------------------------------------

Json attack_json(const AttackReport& r) { return r.to_json(); }

Json cmd_attack_pair(Config& c) {
  const std::string in = c.path("in");
  const auto keys_path = c.opt_path("keys");
  PairOptions po;
  po.k = c.size("k", 2);
  po.delta = c.real("delta", 0.01);
  po.threshold = c.opt_real("threshold");
  const auto recon = c.opt_path("reconstruction");
  c.finish();
  const Dataset ds = load_dataset(in);
  std::vector<EncryptedSample> samples;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    EncryptedSample s;
    s.xtilde = ds.images[i];
    s.sample_id = static_cast<std::uint32_t>(i);
    samples.push_back(std::move(s));
  }
  std::vector<EncryptionKey> keys;
  if (keys_path)
    for (auto& r : load_aligned_keys(*keys_path, ds)) keys.push_back(std::move(r.key));
  AttackReport rep = pair_detection_attack(samples, po, keys_path ? &keys : nullptr);
  if (recon && rep.reconstruction) {
    save_single_image(*rep.reconstruction, *recon);
    rep.reconstruction_path = *recon;
  }
  return attack_json(rep);
}

struct ScanInputs {
  Dataset data;
  PatchSet pub;
  std::size_t index = 0;
  std::optional<std::vector<std::size_t>> members;
  std::optional<KeyRecord> key;
};

ScanInputs read_scan_inputs(Config& c) {
  ScanInputs s;
  const std::string in = c.path("in");
  s.index = c.size("index", 0);
  const std::string pool = c.str("pool", "public");
  require(pool == "public" || pool == "private", ErrorCode::kValidation,
          "pool must be public or private");
  const std::string pub = c.path("public");
  const auto keys_path = c.opt_path("keys");
  s.data = load_dataset(in);
  require_index(s.index, s.data.size(), "sample");
  if (pool == "public") {
    s.pub = load_patchset(pub);
  } else {
    // scan against the private set itself (mixup / inside histories)
    Dataset cand = load_dataset(pub);
    s.pub.dims = cand.dims;
    s.pub.normalized = cand.normalized;
    s.pub.patches = std::move(cand.images);
  }
  if (keys_path) {
    auto keys = load_aligned_keys(*keys_path, s.data);
    s.key = keys[s.index];
    s.members = members_tagged(s.key->key, pool == "public" ? SourceTag::kPublic
                                                            : SourceTag::kPrivate);
  }
  return s;
}

Json cmd_attack_scan(Config& c) {
  ScanInputs in = read_scan_inputs(c);
  ScanOptions so;
  so.k = c.size("k", 4);
  so.delta = c.real("delta", 0.01);
  so.threshold = c.opt_real("threshold");
  so.top = c.size("top", 20);
  const auto oracle_p = c.opt_real("oracle_p");
  const RngStream s = base_stream(c);
  c.finish();
  Image x = in.data.images[in.index];
  if (oracle_p) {
    require(in.key.has_value(), ErrorCode::kValidation, "oracle_p needs 'keys' for the true mask");
    Rng rng(s.child(1));
    x = demask_with_oracle(x, in.key->key.mask, *oracle_p, rng);
  }
  return attack_json(public_scan_attack(x, in.pub, so, in.members ? &*in.members : nullptr));
}

Json cmd_attack_braverman(Config& c) {
  ScanInputs in = read_scan_inputs(c);
  const std::size_t top = c.size("top", 20);
  c.finish();
  return attack_json(braverman_attack(in.data.images[in.index], in.pub.patches, top,
                                      in.members ? &*in.members : nullptr));
}

Json cmd_attack_averaging(Config& c) {
  const std::string in = c.path("in");
  const std::string keys_path = c.path("keys");
  const std::string priv_path = c.path("private");
  AveragingOptions ao;
  const std::string mode = c.str("mode", "strong");
  require(mode == "strong" || mode == "weak", ErrorCode::kValidation, "mode must be strong or weak");
  ao.mode = mode == "strong" ? AveragingMode::kStrong : AveragingMode::kWeak;
  ao.m = c.size("m", 5);
  ao.oracle_p = c.real("oracle_p", 0.25);
  ao.max_probes = c.size("max_probes", 0);
  const RngStream s = base_stream(c);
  c.finish();
  const Dataset ds = load_dataset(in);
  auto keys = load_aligned_keys(keys_path, ds);
  const Dataset priv = load_dataset(priv_path);
  std::vector<Encryption> hist;
  hist.reserve(ds.size());
  for (std::size_t i = 0; i < ds.size(); ++i) {
    Encryption e;
    e.sample.xtilde = ds.images[i];
    if (ds.labeled()) e.sample.ytilde = ds.labels[i];
    e.sample.epoch = keys[i].epoch;
    e.sample.sample_id = keys[i].sample_id;
    e.key = std::move(keys[i].key);
    hist.push_back(std::move(e));
  }
  return attack_json(averaging_attack(hist, priv, ao, s.child(1)));
}

Json cmd_attack_similarity(Config& c) {
  const std::string in = c.path("in");
  const std::string keys_path = c.path("keys");
  const std::string pub_path = c.path("public");
  const auto db_path = c.opt_path("database");
  SimilarityOptions so;
  so.m = c.size("m", 100);
  so.k = c.size("k", 6);
  const double p = c.real("oracle_p", 0.25);
  const std::size_t samples = c.size("samples", 50);
  const RngStream s = base_stream(c);
  c.finish();
  const Dataset ds = load_dataset(in);
  const auto keys = load_aligned_keys(keys_path, ds);
  const PatchSet pub = load_patchset(pub_path);
  const PatchSet db = db_path ? load_patchset(*db_path) : pub;
  std::vector<std::uint32_t> db_sources;
  for (const auto& pr : db.provenance) db_sources.push_back(pr.source_index);
  const SsimIndex index(db.patches, symmetric_range(db.patches));
  require(samples >= 1 && samples <= ds.size(), ErrorCode::kValidation,
          "samples must lie in [1, dataset size]");
  Rng pick(s.child(1));
  const auto chosen = sample_without_replacement(ds.size(), samples, ds.size(), pick);
  std::size_t hits = 0;
  Json per = Json::array();
  for (std::size_t j = 0; j < chosen.size(); ++j) {
    const std::size_t i = chosen[j];
    std::vector<std::uint32_t> truth;
    for (std::size_t m : public_members(keys[i].key)) {
      require_index(m, pub.size(), "public patch");
      truth.push_back(pub.provenance[m].source_index);
    }
    Rng orng(s.child(2).child(j));
    const AttackReport r =
        similarity_search_attack(ds.images[i], index, db_sources, keys[i].key.mask, p, orng, truth, so);
    const bool hit = r.metric("hit") > 0.0;
    hits += hit ? 1 : 0;
    per.push_back({{"sample", i}, {"hit", hit}, {"best_true_rank", r.metric("best_true_rank")}});
  }
  return {{"attack", "similarity_search"},
          {"metrics",
           {{"hit_rate", static_cast<double>(hits) / static_cast<double>(chosen.size())},
            {"samples", chosen.size()},
            {"database", db.size()}}},
          {"details", {{"per_sample", per}}}};
}

Json cmd_attack_gradmatch(Config& c) {
  const std::string model_path = c.path("model");
  const std::string victim_path = c.path("victim");
  const std::size_t index = c.size("index", 0);
  GradMatchOptions go;
  go.steps = c.size("steps", 2000);
  go.lr = c.real("lr", 0.05);
  go.tolerance = c.real("tolerance", 0.0);
  const auto recon = c.opt_path("reconstruction");
  const RngStream s = base_stream(c);
  c.finish();
  LinearSoftmaxModel m = load_model(model_path);
  const Dataset victim = load_dataset(victim_path);
  require_index(index, victim.size(), "victim");
  require(victim.labeled(), ErrorCode::kValidation, "grad-match: victim set has no labels");
  bind_feature_map(m, victim.dims.size());
  const Image& x = victim.images[index];
  const Gradient g = loss_and_gradient(m, x, victim.labels[index]).grad;
  AttackReport rep = gradient_matching_attack(g, m, victim.dims, go, s.child(1), &x);
  if (recon && rep.reconstruction) {
    save_single_image(*rep.reconstruction, *recon);
    rep.reconstruction_path = *recon;
  }
  return attack_json(rep);
}

// --- statistics --------------------------------------------------------------

Json cmd_stats_ks(Config& c) {
  const std::string priv_path = c.path("private");
  KsProtocolOptions po;
  po.params = read_scheme(c, "cross", 4);
  auto pub = maybe_public(c, po.params);
  po.picks = c.size("picks", 10);
  po.per_image = c.size("per_image", 400);
  po.probe_encryptions = c.size("probes", 50);
  po.probe_locations = c.size("locations", 4);
  const auto csv = c.opt_path("csv");
  const RngStream s = base_stream(c);
  c.finish();
  const Dataset priv = load_dataset(priv_path);
  po.pub = pub ? &*pub : nullptr;
  const KsTable t = indistinguishability_protocol(priv, po, s.child(1));
  if (csv) write_text(*csv, t.to_csv());
  return t.to_json();
}

ConcentrationCheckConfig read_check_config(Config& c, std::size_t def_k, std::size_t def_trials) {
  ConcentrationCheckConfig cc;
  cc.d = c.size("d", 3072);
  cc.n = c.size("n", 1000);
  cc.k = c.size("k", def_k);
  cc.sigma2 = c.opt_real("sigma2");
  cc.delta = c.real("delta", 0.01);
  cc.trials = c.size("trials", def_trials);
  cc.beta = c.real("beta", 2.0);
  return cc;
}

Json cmd_stats_concentration(Config& c) {
  const std::string check = c.str("check", "all");
  const ConcentrationCheckConfig cc = read_check_config(c, 3072, 10000);
  const RngStream s = base_stream(c);
  c.finish();
  Json reports = Json::array();
  bool known = false;
  auto want = [&](const char* name) {
    const bool w = check == "all" || check == name;
    known = known || w;
    return w;
  };
  if (want("chi-square")) reports.push_back(check_chi_square_tail(cc, s.child(1)).to_json());
  if (want("bernstein")) reports.push_back(check_bernstein(cc, s.child(2)).to_json());
  if (want("fixed-vector"))
    reports.push_back(check_fixed_vector_concentration(cc, s.child(3)).to_json());
  if (want("inner-product"))
    reports.push_back(check_inner_product_concentration(cc, s.child(4)).to_json());
  require(known, ErrorCode::kValidation,
          "check must be one of all, chi-square, bernstein, fixed-vector, inner-product");
  bool pass = true;
  for (const auto& r : reports) pass = pass && r["pass"].get<bool>();
  return {{"checks", reports}, {"pass", pass}};
}

Json cmd_stats_gap(Config& c) {
  const GapTheorem which = parse_gap_theorem(c.str("theorem", "B2"));
  const ConcentrationCheckConfig cc = read_check_config(c, which == GapTheorem::kB1 ? 2 : 4, 1000);
  const RngStream s = base_stream(c);
  c.finish();
  return check_theorem_gap(cc, which, s.child(1)).to_json();
}

using Handler = std::function<Json(Config&)>;

const std::map<std::string, Handler>& handlers() {
  static const std::map<std::string, Handler> h = {
      {"import", cmd_import},
      {"export", cmd_export},
      {"generate", cmd_generate},
      {"prep-public", cmd_prep_public},
      {"encrypt", cmd_encrypt},
      {"challenge", cmd_challenge},
      {"train", cmd_train},
      {"eval", cmd_eval},
      {"attack pair", cmd_attack_pair},
      {"attack public-scan", cmd_attack_scan},
      {"attack braverman", cmd_attack_braverman},
      {"attack averaging", cmd_attack_averaging},
      {"attack similarity", cmd_attack_similarity},
      {"attack grad-match", cmd_attack_gradmatch},
      {"stats ks-table", cmd_stats_ks},
      {"stats concentration", cmd_stats_concentration},
      {"stats theorem-gap", cmd_stats_gap},
  };
  return h;
}

}  // namespace

std::vector<std::string> command_names() {
  std::vector<std::string> out;
  for (const auto& [k, v] : handlers()) out.push_back(k);
  return out;
}

Json run_command(const std::string& command, const Json& config) {
  const auto& h = handlers();
  auto it = h.find(command);
  require(it != h.end(), ErrorCode::kInvalidArgument, "unknown command '" + command + "'");
  Config c(config);
  Json result = it->second(c);
  c.u64("seed", 1);  // every report records a seed, used or not
  c.finish();
  return {{"tool", "instahide"},
          {"version", kVersion},
          {"command", command},
          {"config", c.resolved()},
          {"result", std::move(result)}};
}

}  // namespace ih
