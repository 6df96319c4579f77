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


// Command-line driver over the instahide C API.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "instahide/instahide.h"

namespace {

using Json = nlohmann::ordered_json;

constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

struct OptionSpec {
  const char* name;
  const char* help;
};

struct CommandSpec {
  const char* group;  // "" for top level
  const char* name;
  const char* help;
  std::vector<OptionSpec> options;
};

const std::vector<OptionSpec> kScheme = {
    {"scheme", "mixup, inside or cross"},
    {"k", "images mixed per encryption"},
    {"c1", "upper bound on any coefficient"},
    {"c2", "lower bound on the private coefficients (cross)"},
    {"mask", "apply the random sign mask (true/false)"},
    {"public", "public patch set (required for cross)"},
};

std::vector<OptionSpec> with_scheme(std::vector<OptionSpec> v) {
  v.insert(v.end(), kScheme.begin(), kScheme.end());
  return v;
}

const std::vector<OptionSpec> kCheck = {
    {"d", "dimension"},         {"n", "set size"},
    {"k", "mix size or degrees of freedom"},
    {"sigma2", "Gaussian variance (default 1/d)"},
    {"delta", "failure probability"}, {"trials", "Monte Carlo trials"},
    {"beta", "separation factor"},
};

std::vector<CommandSpec> commands() {
  return {
      {"", "import", "convert raw RGB bytes (+ label CSV) to IHDS",
       {{"raw", "raw u8 file, images of height x width x channels interleaved"},
        {"labels", "CSV with one class index per line"},
        {"channels", "channels (default 3)"},
        {"height", "height (default 32)"},
        {"width", "width (default 32)"},
        {"classes", "class count (default: max label + 1)"},
        {"out", "output IHDS path"}}},
      {"", "export", "convert a [0,1]-range IHDS dataset back to raw RGB bytes",
       {{"in", "input IHDS"}, {"raw", "output raw file"}, {"labels", "output label CSV"}}},
      {"", "generate", "write a synthetic dataset",
       {{"kind", "gaussian, texture or separable"},
        {"n", "images (training images for separable)"},
        {"channels", "channels"},
        {"height", "height"},
        {"width", "width"},
        {"classes", "classes"},
        {"normalize", "normalize gaussian images"},
        {"noise", "noise scale (separable)"},
        {"n-test", "test images (separable)"},
        {"out", "output IHDS"},
        {"test-out", "output test IHDS (separable)"}}},
      {"", "prep-public", "crop and filter a public dataset into a patch set",
       {{"in", "public IHDS"},
        {"out", "output patch set path"},
        {"height", "crop height"},
        {"width", "crop width"},
        {"per-image", "crops per source image"},
        {"min-keypoints", "keep crops with more keypoints (0 disables)"},
        {"normalize", "normalize patches (true/false)"}}},
      {"", "encrypt", "encrypt a private dataset for T epochs",
       with_scheme({{"private", "private IHDS"},
                    {"epochs", "epochs T"},
                    {"out", "output IHDS"},
                    {"keys", "optional ground-truth key file"}})},
      {"", "challenge", "write a cross-dataset challenge set without keys",
       {{"private", "private IHDS"},
        {"public", "public patch set"},
        {"k", "images mixed per encryption (default 6)"},
        {"c1", "upper bound on any coefficient"},
        {"c2", "lower bound on the private coefficients"},
        {"epochs", "epochs T (default 50)"},
        {"out", "output IHDS"}}},
      {"", "train", "train a linear softmax model, optionally on re-encrypted epochs",
       {{"train", "training IHDS"},
        {"out", "output model (IHMD)"},
        {"feature", "raw or raw-abs"},
        {"scheme", "none, mixup, inside or cross"},
        {"k", "images mixed per encryption"},
        {"c1", "upper bound on any coefficient"},
        {"c2", "lower bound on the private coefficients"},
        {"mask", "apply the sign mask"},
        {"public", "public patch set (cross)"},
        {"epochs", "epochs"},
        {"lr", "learning rate"},
        {"momentum", "momentum"},
        {"batch", "minibatch size"},
        {"l2", "weight decay"}}},
      {"", "eval", "top-1 accuracy, plain or with encrypted inference",
       with_scheme({{"model", "model (IHMD)"},
                    {"test", "test IHDS"},
                    {"mode", "plain or encrypted"},
                    {"pool", "mixing pool for encrypted inference"},
                    {"E", "encryptions averaged per test image"}})},
      {"attack", "pair", "pairwise inner-product detection over a history",
       {{"in", "encrypted IHDS"},
        {"keys", "ground-truth key file"},
        {"k", "mix size"},
        {"delta", "failure probability for the default threshold"},
        {"threshold", "explicit threshold"},
        {"reconstruction", "write the largest cluster average (IHDS)"}}},
      {"attack", "public-scan", "inner-product scan of one sample against a public set",
       {{"in", "encrypted IHDS"},
        {"index", "sample index"},
        {"public", "candidate set: public patch set, or private IHDS with pool=private"},
        {"pool", "public (default) or private"},
        {"keys", "ground-truth key file (enables recall)"},
        {"k", "mix size"},
        {"delta", "failure probability"},
        {"threshold", "explicit threshold"},
        {"top", "scores kept in the report"},
        {"oracle-p", "demask with the sign oracle at this error rate"}}},
      {"attack", "braverman", "mask-invariant fourth-moment ranking",
       {{"in", "encrypted IHDS"},
        {"index", "sample index"},
        {"public", "candidate set: public patch set, or private IHDS with pool=private"},
        {"pool", "public (default) or private"},
        {"keys", "ground-truth key file"},
        {"top", "scores kept in the report"}}},
      {"attack", "averaging", "average demasked encryptions of the same image",
       {{"in", "encrypted IHDS"},
        {"keys", "ground-truth key file"},
        {"private", "original private IHDS"},
        {"mode", "strong or weak"},
        {"m", "neighbours averaged (weak)"},
        {"oracle-p", "sign oracle error rate"},
        {"max-probes", "cap on probes (0: all)"}}},
      {"attack", "similarity", "SSIM search of demasked samples over a public database",
       {{"in", "encrypted IHDS"},
        {"keys", "ground-truth key file"},
        {"public", "patch set used for encryption"},
        {"database", "attacker patch set (default: public)"},
        {"m", "top-m cut-off"},
        {"k", "mix size"},
        {"oracle-p", "sign oracle error rate"},
        {"samples", "samples attacked"}}},
      {"attack", "grad-match", "recover an input from its gradient",
       {{"model", "model (IHMD)"},
        {"victim", "IHDS holding the victim"},
        {"index", "victim index"},
        {"steps", "descent steps"},
        {"lr", "step size"},
        {"tolerance", "stop once the objective is below this"},
        {"reconstruction", "write the recovered input (IHDS)"}}},
      {"stats", "ks-table", "KS indistinguishability table",
       with_scheme({{"private", "private IHDS"},
                    {"picks", "images picked"},
                    {"per-image", "encryptions per picked image"},
                    {"probes", "encryptions tested per image"},
                    {"locations", "random pixel locations"},
                    {"csv", "write the table as CSV"}})},
      {"stats", "concentration", "Monte Carlo checks of the concentration lemmas",
       [] {
         std::vector<OptionSpec> v{{"check", "all, chi-square, bernstein, fixed-vector, inner-product"}};
         v.insert(v.end(), kCheck.begin(), kCheck.end());
         return v;
       }()},
      {"stats", "theorem-gap", "Monte Carlo check of the member/non-member gap",
       [] {
         std::vector<OptionSpec> v{{"theorem", "B1 or B2"}};
         v.insert(v.end(), kCheck.begin(), kCheck.end());
         return v;
       }()},
  };
}

std::string key_of(std::string flag) {
  for (char& c : flag)
    if (c == '-') c = '_';
  return flag;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// key=value lines; '#' starts a comment.
bool read_config_file(const std::string& path, Json& out, std::string& err) {
  std::ifstream in(path);
  if (!in) {
    err = "cannot open config file " + path;
    return false;
  }
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      err = path + ":" + std::to_string(lineno) + ": expected key=value";
      return false;
    }
    out[key_of(trim(line.substr(0, eq)))] = trim(line.substr(eq + 1));
  }
  return true;
}

bool write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return static_cast<bool>(std::cout);
  }
  std::ofstream out(path, std::ios::binary);
  out << text;
  return static_cast<bool>(out);
}

int run(const std::string& command, const Json& config, const std::string& report_path) {
  ih_report* rep = nullptr;
  const ih_status st = ih_run(command.c_str(), config.dump().c_str(), &rep);
  if (st != IH_OK) {
    std::cerr << "error (" << ih_status_name(st) << "): " << ih_last_error() << "\n";
    return ih_status_is_usage_error(st) ? kExitUsage : kExitRuntime;
  }
  const std::string text = ih_report_json(rep);
  ih_report_free(rep);
  if (!write_output(report_path, text)) {
    std::cerr << "error: cannot write report " << report_path << "\n";
    return kExitRuntime;
  }
  return 0;
}

struct Leaf {
  std::string command;
  CLI::App* app = nullptr;
  std::map<std::string, std::string> values;
  std::map<std::string, CLI::Option*> options;
  std::string config_file;
  std::string report;
  std::string seed;
  CLI::Option* seed_opt = nullptr;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"instahide toolkit: encryption, attacks and statistical checks"};
  app.require_subcommand(1);
  app.set_version_flag("--version", ih_version());

  std::vector<std::unique_ptr<Leaf>> leaves;
  std::map<std::string, CLI::App*> groups;
  for (const auto& spec : commands()) {
    CLI::App* parent = &app;
    if (*spec.group) {
      auto it = groups.find(spec.group);
      if (it == groups.end()) {
        CLI::App* g = app.add_subcommand(spec.group, std::string(spec.group) + " commands");
        g->require_subcommand(1);
        it = groups.emplace(spec.group, g).first;
      }
      parent = it->second;
    }
    auto leaf = std::make_unique<Leaf>();
    leaf->command = *spec.group ? std::string(spec.group) + " " + spec.name : spec.name;
    leaf->app = parent->add_subcommand(spec.name, spec.help);
    for (const auto& o : spec.options) {
      const std::string key = key_of(o.name);
      leaf->options[key] =
          leaf->app->add_option(std::string("--") + o.name, leaf->values[key], o.help);
    }
    leaf->app->add_option("--config", leaf->config_file, "key=value file (flags take precedence)");
    leaf->seed_opt = leaf->app->add_option("--seed", leaf->seed, "random seed")->envname("IH_SEED");
    leaf->app->add_option("--report", leaf->report, "write the JSON report here (default stdout)");
    leaves.push_back(std::move(leaf));
  }

  std::string replay_in, replay_report;
  CLI::App* replay = app.add_subcommand("replay", "re-run a report's command with its embedded config");
  replay->add_option("report_in", replay_in, "report JSON")->required();
  replay->add_option("--report", replay_report, "write the new report here (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  if (replay->parsed()) {
    std::ifstream in(replay_in);
    if (!in) {
      std::cerr << "error: cannot open " << replay_in << "\n";
      return kExitRuntime;
    }
    const Json r = Json::parse(in, nullptr, false);
    if (r.is_discarded() || !r.contains("command") || !r.contains("config")) {
      std::cerr << "error: " << replay_in << " is not a report\n";
      return kExitUsage;
    }
    return run(r["command"].get<std::string>(), r["config"], replay_report);
  }

  for (const auto& leaf : leaves) {
    if (!leaf->app->parsed()) continue;
    Json cfg = Json::object();
    if (!leaf->config_file.empty()) {
      std::string err;
      if (!read_config_file(leaf->config_file, cfg, err)) {
        std::cerr << "error: " << err << "\n";
        return kExitUsage;
      }
    }
    for (const auto& [key, opt] : leaf->options)
      if (opt->count() > 0) cfg[key] = leaf->values[key];
    // --seed and IH_SEED both land in the option; either beats the file.
    if (!leaf->seed.empty()) cfg["seed"] = leaf->seed;
    return run(leaf->command, cfg, leaf->report);
  }
  std::cerr << app.help();
  return kExitUsage;
}
