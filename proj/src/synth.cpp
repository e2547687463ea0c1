// Copyright 2026 The EMS-DocRE Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <unordered_set>

#include "ems/corpus.hpp"

namespace ems {

void SynthConfig::validate() const {
  auto fail = [](const std::string& what) { throw Error("synth config: " + what); };
  if (num_classes < 1) fail("num_classes must be >= 1");
  if (feature_dim < 1) fail("feature_dim must be >= 1");
  if (annotated_docs < 0 || ds_docs < 0 || dev_docs < 0 || test_docs < 0) fail("document counts must be >= 0");
  if (min_instances < 2 || max_instances < min_instances) fail("instance range must satisfy 2 <= min <= max");
  bool reachable = false;
  for (int n = 2; n * (n - 1) <= max_instances; ++n) reachable |= n * (n - 1) >= min_instances;
  if (!reachable) fail("no entity count yields n(n-1) instances inside the instance range");
  if (!(zipf_exponent >= 0)) fail("zipf_exponent must be >= 0");
  if (!(positive_rate >= 0 && positive_rate <= 1)) fail("positive_rate must be in [0, 1]");
  if (!(extra_label_rate >= 0 && extra_label_rate < 1)) fail("extra_label_rate must be in [0, 1)");
  if (!(p_fp >= 0 && p_fp <= 1)) fail("p_fp must be in [0, 1]");
  if (!(p_fn >= 0 && p_fn <= 1)) fail("p_fn must be in [0, 1]");
  if (!(sigma >= 0)) fail("sigma must be >= 0");
  if (!(prototype_scale >= 0)) fail("prototype_scale must be >= 0");
  if (entity_pool < 5) fail("entity_pool must be >= 5");
}

namespace {

std::mt19937_64 stream_for(std::uint64_t seed, std::uint32_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), stream};
  return std::mt19937_64(seq);
}

class SplitGenerator {
 public:
  SplitGenerator(const SynthConfig& config, const Eigen::MatrixXd& prototypes, const Eigen::VectorXd& prior)
      : config_(config), prototypes_(prototypes), prior_(prior),
        class_dist_(prior.data(), prior.data() + prior.size()) {
    for (int n = 2; n * (n - 1) <= config.max_instances; ++n)
      if (n * (n - 1) >= config.min_instances) entity_counts_.push_back(n);
  }

  CorpusSplit generate(SplitKind kind, int doc_count, std::mt19937_64& rng) {
    CorpusSplit split;
    split.kind = kind;
    split.schema = RelationSchema::numbered(config_.num_classes);
    split.feature_dim = config_.feature_dim;
    split.documents.reserve(static_cast<size_t>(doc_count));
    const bool distant = kind == SplitKind::kDistant;
    for (int d = 0; d < doc_count; ++d) {
      Document doc;
      char id[64];
      std::snprintf(id, sizeof id, "%s-%06d", to_string(kind).c_str(), d);
      doc.doc_id = id;
      doc.entity_count = entity_counts_[std::uniform_int_distribution<size_t>(0, entity_counts_.size() - 1)(rng)];
      std::unordered_set<int> used;
      std::uniform_int_distribution<int> pool(0, config_.entity_pool - 1);
      while (static_cast<int>(doc.entity_names.size()) < doc.entity_count) {
        int gid = pool(rng);
        if (used.insert(gid).second) doc.entity_names.push_back({"e" + std::to_string(gid)});
      }
      std::vector<LabelSet> gold;
      for (int h = 0; h < doc.entity_count; ++h) {
        for (int t = 0; t < doc.entity_count; ++t) {
          if (h == t) continue;
          LabelSet labels = draw_gold(rng);
          Instance inst;
          inst.head = h;
          inst.tail = t;
          inst.features = features_for(labels, rng);
          if (distant) inst.ds_labels = corrupt(labels, rng);
          gold.push_back(std::move(labels));
          doc.instances.push_back(std::move(inst));
        }
      }
      doc.gold_labels = std::move(gold);
      split.documents.push_back(std::move(doc));
    }
    return split;
  }

 private:
  LabelSet draw_gold(std::mt19937_64& rng) {
    LabelSet labels;
    if (uniform_(rng) >= config_.positive_rate) return labels;
    labels.insert(class_dist_(rng));
    while (labels.size() < config_.num_classes && uniform_(rng) < config_.extra_label_rate) {
      int r = class_dist_(rng);
      while (labels.contains(r)) r = class_dist_(rng);
      labels.insert(r);
    }
    return labels;
  }

  Eigen::VectorXd features_for(const LabelSet& labels, std::mt19937_64& rng) {
    Eigen::VectorXd x(config_.feature_dim);
    for (Eigen::Index k = 0; k < x.size(); ++k) x[k] = config_.sigma * normal_(rng);
    for (int r : labels) x += prototypes_.row(r).transpose();
    return x;
  }

  // Drop each gold label with p_fn, add each other class with p_fp * prior.
  LabelSet corrupt(const LabelSet& gold, std::mt19937_64& rng) {
    LabelSet out;
    for (int r = 0; r < config_.num_classes; ++r) {
      const double u = uniform_(rng);
      if (gold.contains(r)) {
        if (u >= config_.p_fn) out.insert(r);
      } else if (u < config_.p_fp * prior_[r]) {
        out.insert(r);
      }
    }
    return out;
  }

  const SynthConfig& config_;
  const Eigen::MatrixXd& prototypes_;
  const Eigen::VectorXd& prior_;
  std::discrete_distribution<int> class_dist_;
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::vector<int> entity_counts_;
};

}  // namespace

SynthCorpus generate_synthetic(const SynthConfig& config) {
  config.validate();
  SynthCorpus corpus;

  std::mt19937_64 proto_rng = stream_for(config.seed, 0);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double scale = config.prototype_scale / std::sqrt(static_cast<double>(config.feature_dim));
  corpus.prototypes.resize(config.num_classes, config.feature_dim);
  for (Eigen::Index r = 0; r < corpus.prototypes.rows(); ++r)
    for (Eigen::Index k = 0; k < corpus.prototypes.cols(); ++k) corpus.prototypes(r, k) = scale * normal(proto_rng);

  corpus.class_prior.resize(config.num_classes);
  for (int r = 0; r < config.num_classes; ++r) corpus.class_prior[r] = std::pow(r + 1.0, -config.zipf_exponent);
  corpus.class_prior /= corpus.class_prior.sum();

  SplitGenerator generator(config, corpus.prototypes, corpus.class_prior);
  auto make = [&](SplitKind kind, int count, std::uint32_t stream) {
    std::mt19937_64 rng = stream_for(config.seed, stream);
    return generator.generate(kind, count, rng);
  };
  corpus.annotated_train = make(SplitKind::kAnnotatedTrain, config.annotated_docs, 1);
  corpus.ds = make(SplitKind::kDistant, config.ds_docs, 2);
  corpus.dev = make(SplitKind::kDev, config.dev_docs, 3);
  corpus.test = make(SplitKind::kTest, config.test_docs, 4);
  return corpus;
}

}  // namespace ems
