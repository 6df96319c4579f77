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


#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "instahide/instahide.h"
#include "json.hpp"

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

namespace {

fs::path scratch(const std::string& tag) {
  auto p = fs::temp_directory_path() / ("ih_capi_" + tag);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

Json run(const char* command, const Json& cfg, ih_status* status = nullptr) {
  ih_report* rep = nullptr;
  const ih_status st = ih_run(command, cfg.dump().c_str(), &rep);
  if (status) *status = st;
  if (st != IH_OK) return Json();
  Json out = Json::parse(ih_report_json(rep));
  ih_report_free(rep);
  return out;
}

ih_dataset* tiny_dataset(uint32_t n, uint16_t c, uint16_t h, uint16_t w) {
  const std::size_t d = std::size_t{c} * h * w;
  std::vector<float> px(n * d), labels(n * 2, 0.0f);
  for (std::size_t i = 0; i < px.size(); ++i) px[i] = static_cast<float>(std::sin(0.37 * i + 1.0));
  for (uint32_t i = 0; i < n; ++i) labels[i * 2 + i % 2] = 1.0f;
  ih_dataset* ds = nullptr;
  REQUIRE(ih_dataset_create(n, c, h, w, 2, px.data(), labels.data(), &ds) == IH_OK);
  return ds;
}

}  // namespace

TEST_CASE("version and status names") {
  CHECK(std::string(ih_version()) == "0.1.0");
  CHECK(std::string(ih_status_name(IH_OK)) != "");
  CHECK(std::string(ih_status_name(IH_ERR_FORMAT)) != std::string(ih_status_name(IH_ERR_IO)));
  CHECK(ih_status_is_usage_error(IH_ERR_INVALID_ARGUMENT));
  CHECK(ih_status_is_usage_error(IH_ERR_VALIDATION));
  CHECK(ih_status_is_usage_error(IH_ERR_INFEASIBLE));
  CHECK_FALSE(ih_status_is_usage_error(IH_ERR_IO));
  CHECK_FALSE(ih_status_is_usage_error(IH_OK));
}

TEST_CASE("dataset handles round trip through a file") {
  const fs::path dir = scratch("ds");
  ih_dataset* ds = tiny_dataset(3, 3, 2, 2);
  CHECK(ih_dataset_count(ds) == 3);
  uint16_t c = 0, h = 0, w = 0, k = 0;
  REQUIRE(ih_dataset_dims(ds, &c, &h, &w, &k) == IH_OK);
  CHECK(c == 3);
  CHECK(h == 2);
  CHECK(w == 2);
  CHECK(k == 2);
  const std::string path = (dir / "a.ihds").string();
  REQUIRE(ih_dataset_save(ds, path.c_str()) == IH_OK);
  ih_dataset* back = nullptr;
  REQUIRE(ih_dataset_load(path.c_str(), &back) == IH_OK);
  std::vector<float> a(12), b(12);
  for (std::size_t i = 0; i < 3; ++i) {
    REQUIRE(ih_dataset_image(ds, i, a.data(), a.size()) == IH_OK);
    REQUIRE(ih_dataset_image(back, i, b.data(), b.size()) == IH_OK);
    CHECK(a == b);
  }
  CHECK(ih_dataset_image(ds, 3, a.data(), a.size()) == IH_ERR_INVALID_ARGUMENT);
  CHECK(ih_dataset_image(ds, 0, a.data(), 5) == IH_ERR_INVALID_ARGUMENT);
  ih_dataset_free(back);
  ih_dataset_free(ds);
}

TEST_CASE("errors set the thread's last message") {
  ih_dataset* ds = nullptr;
  CHECK(ih_dataset_load("/nonexistent/x.ihds", &ds) == IH_ERR_IO);
  CHECK(ds == nullptr);
  CHECK(std::string(ih_last_error()).size() > 0);
  CHECK(ih_dataset_load(nullptr, &ds) == IH_ERR_INVALID_ARGUMENT);

  const fs::path dir = scratch("bad");
  std::ofstream(dir / "junk.ihds") << "not a dataset at all";
  CHECK(ih_dataset_load((dir / "junk.ihds").string().c_str(), &ds) == IH_ERR_FORMAT);
}

TEST_CASE("free functions accept null") {
  ih_dataset_free(nullptr);
  ih_patchset_free(nullptr);
  ih_model_free(nullptr);
  ih_report_free(nullptr);
}

TEST_CASE("encrypt_epoch validates parameters") {
  ih_dataset* ds = tiny_dataset(6, 1, 4, 4);
  ih_dataset* out = nullptr;
  REQUIRE(ih_encrypt_epoch(ds, "inside", 2, 0.65, 0.3, 1, 0, 5, nullptr, &out) == IH_OK);
  CHECK(ih_dataset_count(out) == 6);
  ih_dataset* again = nullptr;
  REQUIRE(ih_encrypt_epoch(ds, "inside", 2, 0.65, 0.3, 1, 0, 5, nullptr, &again) == IH_OK);
  std::vector<float> a(16), b(16);
  REQUIRE(ih_dataset_image(out, 2, a.data(), 16) == IH_OK);
  REQUIRE(ih_dataset_image(again, 2, b.data(), 16) == IH_OK);
  CHECK(a == b);
  ih_dataset_free(again);
  ih_dataset_free(out);
  out = nullptr;
  CHECK(ih_encrypt_epoch(ds, "sideways", 2, 0.65, 0.3, 1, 0, 5, nullptr, &out) != IH_OK);
  CHECK(ih_encrypt_epoch(ds, "cross", 4, 0.65, 0.3, 1, 0, 5, nullptr, &out) != IH_OK);
  CHECK(out == nullptr);
  ih_dataset_free(ds);
}

TEST_CASE("ih_run embeds resolved config and seed") {
  const fs::path dir = scratch("run");
  const std::string out = (dir / "g.ihds").string();
  const Json r = run("generate", {{"n", 8}, {"channels", 1}, {"height", 4}, {"width", 4},
                                  {"out", out}, {"seed", 42}});
  REQUIRE(r.is_object());
  CHECK(r.at("tool") == "instahide");
  CHECK(r.at("command") == "generate");
  CHECK(r.at("config").at("seed") == 42);
  CHECK(r.at("config").at("kind") == "gaussian");
  CHECK(r.at("result").at("count") == 8);

  const Json d = run("generate", {{"n", 8}, {"channels", 1}, {"height", 4}, {"width", 4},
                                  {"out", out}});
  CHECK(d.at("config").at("seed") == 1);

  // string values are accepted and normalized
  const Json s = run("generate", {{"n", "8"}, {"channels", "1"}, {"height", "4"},
                                  {"width", "4"}, {"out", out}, {"seed", "42"}});
  CHECK(s.at("config") == r.at("config"));
}

TEST_CASE("ih_run rejects bad input") {
  ih_status st = IH_OK;
  run("generate", {{"n", 8}, {"out", "/tmp/x.ihds"}, {"colour", "blue"}}, &st);
  CHECK(st == IH_ERR_INVALID_ARGUMENT);
  run("no-such-command", Json::object(), &st);
  CHECK(st == IH_ERR_INVALID_ARGUMENT);
  run("generate", Json::object(), &st);
  CHECK(ih_status_is_usage_error(st));
  ih_report* rep = nullptr;
  CHECK(ih_run("generate", "{not json", &rep) == IH_ERR_INVALID_ARGUMENT);
  CHECK(rep == nullptr);
  CHECK(ih_run("generate", "[1,2]", &rep) == IH_ERR_INVALID_ARGUMENT);
}

TEST_CASE("command list covers the tool") {
  const std::string list = ih_commands();
  for (const char* c : {"import", "export", "generate", "prep-public", "encrypt", "challenge",
                        "train", "eval", "attack pair", "attack public-scan",
                        "attack braverman", "attack averaging", "attack similarity",
                        "attack grad-match", "stats ks-table", "stats concentration",
                        "stats theorem-gap"})
    CHECK(list.find(c) != std::string::npos);
}

TEST_CASE("encrypt writes a key file that scan attacks consume") {
  const fs::path dir = scratch("keys");
  const std::string priv = (dir / "p.ihds").string();
  const std::string enc = (dir / "e.ihds").string();
  const std::string keys = (dir / "k.json").string();
  run("generate", {{"n", 20}, {"height", 16}, {"width", 16}, {"out", priv}});
  const Json e = run("encrypt", {{"private", priv}, {"scheme", "mixup"}, {"k", 2},
                                 {"mask", false}, {"epochs", 3}, {"out", enc}, {"keys", keys}});
  REQUIRE(e.is_object());
  CHECK(e.at("result").at("count") == 60);
  const Json kf = Json::parse(std::ifstream(keys));
  CHECK(kf.at("format") == "ihkeys");
  CHECK(kf.at("keys").size() == 60);

  ih_dataset* ds = nullptr;
  REQUIRE(ih_dataset_load(enc.c_str(), &ds) == IH_OK);
  CHECK(ih_dataset_count(ds) == 60);
  ih_dataset_free(ds);

  const Json scan = run("attack public-scan",
                        {{"in", enc}, {"public", priv}, {"pool", "private"}, {"keys", keys},
                         {"index", 4}, {"k", 2}});
  REQUIRE(scan.is_object());
  CHECK(scan.at("result").at("metrics").at("recall") == 1.0);

  ih_status st = IH_OK;
  run("attack public-scan", {{"in", enc}, {"public", priv}, {"index", 4}}, &st);
  CHECK(st == IH_ERR_IO);  // no provenance sidecar: not a patch set
}

TEST_CASE("models train, save, load and predict") {
  const fs::path dir = scratch("model");
  const std::string tr = (dir / "tr.ihds").string();
  const std::string te = (dir / "te.ihds").string();
  const std::string model = (dir / "m.ihmd").string();
  run("generate", {{"kind", "separable"}, {"n", 60}, {"n_test", 20}, {"channels", 1},
                   {"height", 4}, {"width", 4}, {"classes", 3}, {"noise", 0.2},
                   {"out", tr}, {"test_out", te}});
  const Json t = run("train", {{"train", tr}, {"out", model}, {"epochs", 20}});
  REQUIRE(t.is_object());
  const Json e = run("eval", {{"model", model}, {"test", te}});
  CHECK(e.at("result").at("accuracy").get<double>() >= 0.9);

  ih_model* m = nullptr;
  REQUIRE(ih_model_load(model.c_str(), &m) == IH_OK);
  CHECK(ih_model_classes(m) == 3);
  ih_dataset* ds = nullptr;
  REQUIRE(ih_dataset_load(te.c_str(), &ds) == IH_OK);
  std::vector<double> probs(3);
  REQUIRE(ih_model_predict(m, ds, 0, probs.data(), probs.size()) == IH_OK);
  CHECK(probs[0] + probs[1] + probs[2] == doctest::Approx(1.0));
  CHECK(ih_model_predict(m, ds, 0, probs.data(), 2) == IH_ERR_INVALID_ARGUMENT);
  ih_dataset_free(ds);
  ih_model_free(m);
}
