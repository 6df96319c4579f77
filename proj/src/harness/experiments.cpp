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


#include "harness/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include "attacks/gradmatch.hpp"
#include "attacks/pair.hpp"
#include "attacks/report.hpp"
#include "attacks/scan.hpp"
#include "attacks/similarity.hpp"
#include "core/error.hpp"
#include "core/sampling.hpp"
#include "harness/synthetic.hpp"
#include "publicprep/patchset.hpp"
#include "stats/ks.hpp"
#include "utility/model.hpp"

namespace ih {

namespace {

Json dims_json(const Dims& d) { return Json::array({d.channels, d.height, d.width}); }

Json params_json(const SchemeParams& p) {
  return {{"scheme", to_string(p.scheme)}, {"k", p.k},         {"c1", p.c1},
          {"c2", p.c2},                    {"masked", p.masked()}};
}

Json stream_json(RngStream s) { return {{"seed", s.seed}, {"stream", s.stream}}; }

Image sum_images(const std::vector<const Image*>& xs) {
  std::vector<float> px(xs.front()->size(), 0.0f);
  for (const Image* x : xs) {
    const auto src = x->pixels();
    for (std::size_t i = 0; i < px.size(); ++i) px[i] += src[i];
  }
  return Image(xs.front()->dims(), std::move(px));
}

PatchSet crop_public(const Dataset& sources, std::uint16_t crop, RngStream stream) {
  PatchSetOptions po;
  po.height = crop;
  po.width = crop;
  po.min_keypoints = 0;
  return build_patchset(sources, po, stream).patchset;
}

}  // namespace

const char* to_string(ScanView v) noexcept {
  switch (v) {
    case ScanView::kPlain: return "plain";
    case ScanView::kMasked: return "masked";
    case ScanView::kOracle: return "oracle";
  }
  return "?";
}

ScanView parse_scan_view(const std::string& name) {
  if (name == "plain") return ScanView::kPlain;
  if (name == "masked") return ScanView::kMasked;
  if (name == "oracle") return ScanView::kOracle;
  fail(ErrorCode::kInvalidArgument, "unknown scan view '" + name + "'");
}

Json run_scan_experiment(const ScanExperiment& cfg, RngStream stream) {
  require(cfg.k >= 1 && cfg.n > cfg.k, ErrorCode::kValidation, "scan experiment: need n > k >= 1");
  require(cfg.trials >= 1, ErrorCode::kValidation, "scan experiment: trials must be >= 1");
  const Dataset pub = gaussian_dataset(cfg.n, cfg.dims, 0, false, stream.child(0));
  const std::size_t d = cfg.dims.size();
  ScanOptions so;
  so.k = cfg.k;
  so.delta = cfg.delta;
  so.top = 0;

  double recall_sum = 0.0, recall_min = 1.0, rank_sum = 0.0;
  std::size_t full_recall = 0;
  std::vector<double> unit_ranks;
  for (std::size_t t = 0; t < cfg.trials; ++t) {
    const RngStream ts = stream.child(1).child(t);
    Rng rng(ts);
    std::vector<std::size_t> members = sample_without_replacement(cfg.n, cfg.k, cfg.n, rng);
    std::vector<const Image*> xs;
    for (std::size_t m : members) xs.push_back(&pub.images[m]);
    Image xtilde = sum_images(xs);
    if (cfg.view != ScanView::kPlain) {
      const SignMask mask = sample_sign_mask(d, ts.child(1));
      apply_mask_inplace(xtilde, mask);
      if (cfg.view == ScanView::kOracle) {
        Rng orng(ts.child(2));
        xtilde = demask_with_oracle(xtilde, mask, cfg.oracle_p, orng);
      }
    }
    const AttackReport rep = public_scan_attack(xtilde, pub.images, so, &members);
    const double r = rep.metric("recall");
    recall_sum += r;
    recall_min = std::min(recall_min, r);
    if (r == 1.0) ++full_recall;
    for (const auto& rank : rep.details["member_ranks"]) {
      const double u = (rank.get<double>() - 0.5) / static_cast<double>(cfg.n);
      unit_ranks.push_back(u);
      rank_sum += u;
    }
  }
  const KsResult ks = ks_uniform(unit_ranks);
  const double T = static_cast<double>(cfg.trials);
  Json out = {{"experiment", "public_scan"},
              {"config",
               {{"dims", dims_json(cfg.dims)},
                {"n", cfg.n},
                {"k", cfg.k},
                {"trials", cfg.trials},
                {"delta", cfg.delta},
                {"view", to_string(cfg.view)},
                {"oracle_p", cfg.oracle_p},
                {"rng", stream_json(stream)}}}};
  out["metrics"] = {{"mean_recall", recall_sum / T},
                    {"min_recall", recall_min},
                    {"full_recall_fraction", static_cast<double>(full_recall) / T},
                    {"mean_unit_rank", rank_sum / static_cast<double>(unit_ranks.size())},
                    {"rank_ks_statistic", ks.statistic},
                    {"rank_ks_pvalue", ks.pvalue},
                    {"ranks", static_cast<double>(unit_ranks.size())}};
  return out;
}

Json run_pair_experiment(const PairExperiment& cfg, RngStream stream) {
  const Dataset priv = gaussian_dataset(cfg.n, cfg.dims, 10, true, stream.child(0));
  const std::vector<Encryption> hist = encrypt_history(priv, cfg.params, cfg.epochs, stream.child(1));
  std::vector<EncryptedSample> samples;
  std::vector<EncryptionKey> keys;
  samples.reserve(hist.size());
  keys.reserve(hist.size());
  for (const auto& e : hist) {
    samples.push_back(e.sample);
    keys.push_back(e.key);
  }
  PairOptions po;
  po.k = cfg.params.k;
  po.delta = cfg.delta;
  const AttackReport rep = pair_detection_attack(samples, po, &keys);
  Json out = {{"experiment", "pair_detection"},
              {"config",
               {{"dims", dims_json(cfg.dims)},
                {"n", cfg.n},
                {"epochs", cfg.epochs},
                {"params", params_json(cfg.params)},
                {"delta", cfg.delta},
                {"rng", stream_json(stream)}}}};
  out["metrics"] = Json::object();
  for (const auto& [k, v] : rep.metrics) out["metrics"][k] = v;
  return out;
}

Json run_similarity_experiment(const SimilarityExperiment& cfg, RngStream stream) {
  require(cfg.params.scheme == Scheme::kCross, ErrorCode::kValidation,
          "similarity experiment: cross scheme required");
  PatchSet enc_pub, db_pub;
  {
    const Dataset sources = texture_sources(cfg.sources, cfg.source_dims, stream.child(0));
    enc_pub = crop_public(sources, cfg.crop, stream.child(1));
    db_pub = crop_public(sources, cfg.crop, stream.child(2));
  }
  std::vector<std::uint32_t> db_sources;
  db_sources.reserve(db_pub.size());
  for (const auto& p : db_pub.provenance) db_sources.push_back(p.source_index);
  const SsimIndex index(db_pub.patches, symmetric_range(db_pub.patches));
  const Dataset priv = gaussian_dataset(cfg.private_n, enc_pub.dims, 10, true, stream.child(3));

  SimilarityOptions so;
  so.m = cfg.m;
  so.k = cfg.params.k;
  std::size_t hits = 0;
  std::size_t coincident = 0;
  double rank_sum = 0.0;
  for (std::size_t s = 0; s < cfg.samples; ++s) {
    const RngStream ss = stream.child(4).child(s);
    const std::size_t i = Rng(ss).below(priv.size());
    const Encryption e = encrypt_one(priv, i, cfg.params, &enc_pub, ss.child(1));
    std::vector<std::uint32_t> truth;
    for (const auto& src : e.key.sources) {
      if (src.tag != SourceTag::kPublic) continue;
      truth.push_back(enc_pub.provenance[src.index].source_index);
      if (enc_pub.provenance[src.index].offset == db_pub.provenance[src.index].offset)
        ++coincident;
    }
    Rng orng(ss.child(2));
    const AttackReport rep = similarity_search_attack(e.sample.xtilde, index, db_sources,
                                                      e.key.mask, cfg.oracle_p, orng, truth, so);
    if (rep.metric("hit") > 0.0) ++hits;
    rank_sum += rep.metric("best_true_rank");
  }
  const double S = static_cast<double>(cfg.samples);
  Json out = {{"experiment", "similarity_search"},
              {"config",
               {{"sources", cfg.sources},
                {"source_dims", dims_json(cfg.source_dims)},
                {"crop", cfg.crop},
                {"private_n", cfg.private_n},
                {"params", params_json(cfg.params)},
                {"m", cfg.m},
                {"oracle_p", cfg.oracle_p},
                {"samples", cfg.samples},
                {"rng", stream_json(stream)}}}};
  out["metrics"] = {{"hit_rate", static_cast<double>(hits) / S},
                    {"hits", static_cast<double>(hits)},
                    {"mean_best_true_rank", rank_sum / S},
                    {"coincident_crops", static_cast<double>(coincident)},
                    {"database", static_cast<double>(index.size())}};
  return out;
}

Json run_ks_experiment(const KsExperiment& cfg, RngStream stream, std::string* csv) {
  const Dataset priv = gaussian_dataset(cfg.private_n, cfg.dims, 10, true, stream.child(0));
  PatchSet pub;
  if (cfg.params.scheme == Scheme::kCross) {
    const Dataset sources = texture_sources(cfg.public_sources, cfg.source_dims, stream.child(1));
    pub = crop_public(sources, static_cast<std::uint16_t>(cfg.dims.height), stream.child(2));
  }
  KsProtocolOptions po;
  po.picks = cfg.picks;
  po.per_image = cfg.per_image;
  po.probe_encryptions = cfg.probe_encryptions;
  po.params = cfg.params;
  po.pub = cfg.params.scheme == Scheme::kCross ? &pub : nullptr;
  const KsTable table = indistinguishability_protocol(priv, po, stream.child(3));
  if (csv) *csv = table.to_csv();
  Json out = {{"experiment", "ks_indistinguishability"},
              {"config",
               {{"dims", dims_json(cfg.dims)},
                {"private_n", cfg.private_n},
                {"public_sources", cfg.public_sources},
                {"params", params_json(cfg.params)},
                {"picks", cfg.picks},
                {"per_image", cfg.per_image},
                {"probe_encryptions", cfg.probe_encryptions},
                {"rng", stream_json(stream)}}}};
  out["metrics"] = {{"min_pvalue", table.min_pvalue()},
                    {"max_all_other_gap", table.max_all_other_gap()}};
  out["table"] = table.to_json();
  return out;
}

Json run_gradmatch_experiment(const GradMatchExperiment& cfg, RngStream stream) {
  const std::size_t d = cfg.dims.size();
  LinearSoftmaxModel model = LinearSoftmaxModel::zeros(cfg.classes, d);
  {
    Rng rng(stream.child(0));
    const double s = 1.0 / std::sqrt(static_cast<double>(d));
    for (double& w : model.W) w = s * rng.normal();
  }
  const Dataset priv = gaussian_dataset(cfg.private_n, cfg.dims, cfg.classes, true, stream.child(1));
  const std::size_t victim = Rng(stream.child(2)).below(priv.size());
  const Image& x = priv.images[victim];

  GradMatchOptions go;
  go.steps = cfg.steps;
  go.lr = cfg.lr;

  const Gradient g_plain = loss_and_gradient(model, x, priv.labels[victim]).grad;
  const AttackReport plain = gradient_matching_attack(g_plain, model, cfg.dims, go, stream.child(3), &x);

  const Encryption e = encrypt_one(priv, victim, cfg.params, nullptr, stream.child(4));
  const Gradient g_enc = loss_and_gradient(model, e.sample.xtilde, e.sample.ytilde).grad;
  const AttackReport enc =
      gradient_matching_attack(g_enc, model, cfg.dims, go, stream.child(5), &e.sample.xtilde);
  const double corr_private = correlation(enc.reconstruction->pixels(), x.pixels());

  Json out = {{"experiment", "gradient_matching"},
              {"config",
               {{"dims", dims_json(cfg.dims)},
                {"classes", cfg.classes},
                {"params", params_json(cfg.params)},
                {"steps", cfg.steps},
                {"lr", cfg.lr},
                {"rng", stream_json(stream)}}}};
  out["metrics"] = {
      {"plain_correlation", plain.metric("correlation")},
      {"encrypted_correlation_xtilde", enc.metric("correlation")},
      {"encrypted_correlation_private", corr_private},
      {"fd_rel_error", std::max(plain.metric("fd_rel_error"), enc.metric("fd_rel_error"))},
      {"plain_final_objective", plain.metric("final_objective")},
      {"encrypted_final_objective", enc.metric("final_objective")}};
  return out;
}

Json run_utility_experiment(const UtilityExperiment& cfg, RngStream stream) {
  const SeparableSplit data =
      separable_dataset(cfg.n_train, cfg.n_test, cfg.dims, cfg.classes, cfg.noise, stream.child(0));
  const FeatureMap fmap = parse_feature_map(cfg.feature);
  const std::size_t width = feature_width(fmap, cfg.dims.size());
  TrainOptions to;
  to.epochs = cfg.epochs;
  to.lr = cfg.lr;

  Json metrics = Json::object();
  {
    std::vector<TrainSample> plain;
    for (std::size_t i = 0; i < data.train.size(); ++i)
      plain.push_back({&data.train.images[i], &data.train.labels[i]});
    const auto res = train(LinearSoftmaxModel::zeros(cfg.classes, width, fmap),
                           [&](std::uint32_t) { return plain; }, to, stream.child(1));
    metrics["vanilla_accuracy"] = evaluate(res.model, data.test, {}, stream.child(2));
  }
  for (std::size_t k : cfg.ks) {
    SchemeParams params;
    params.scheme = Scheme::kInside;
    params.k = k;
    params.c1 = k == 1 ? 1.0 : cfg.c1;
    params.apply_mask = cfg.masked;
    const RngStream ks = stream.child(10 + k);
    auto epoch_data = std::make_shared<std::vector<EncryptedSample>>();
    EpochProvider provider = [&, epoch_data, params, ks](std::uint32_t epoch) {
      *epoch_data = encrypt_epoch(data.train, params, epoch, ks.child(0));
      std::vector<TrainSample> out;
      out.reserve(epoch_data->size());
      for (const auto& s : *epoch_data) out.push_back({&s.xtilde, &s.ytilde});
      return out;
    };
    const auto res =
        train(LinearSoftmaxModel::zeros(cfg.classes, width, fmap), provider, to, ks.child(1));
    EvalOptions eo;
    eo.mode = EvalMode::kEncrypted;
    eo.params = params;
    eo.pool = &data.train;
    eo.E = cfg.E;
    metrics["accuracy_k" + std::to_string(k)] = evaluate(res.model, data.test, eo, ks.child(2));
    metrics["final_loss_k" + std::to_string(k)] = res.epoch_loss.empty() ? 0.0 : res.epoch_loss.back();
  }
  Json out = {{"experiment", "utility"},
              {"config",
               {{"dims", dims_json(cfg.dims)},
                {"classes", cfg.classes},
                {"n_train", cfg.n_train},
                {"n_test", cfg.n_test},
                {"noise", cfg.noise},
                {"ks", cfg.ks},
                {"c1", cfg.c1},
                {"masked", cfg.masked},
                {"epochs", cfg.epochs},
                {"lr", cfg.lr},
                {"E", cfg.E},
                {"feature", cfg.feature},
                {"rng", stream_json(stream)}}}};
  out["metrics"] = metrics;
  return out;
}

}  // namespace ih
