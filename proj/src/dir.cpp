// Copyright 2026 The EMS-DocRE Authors
// SPDX-License-Identifier: Apache-2.0

#include "ems/dir.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <random>

#include "ems/parallel.hpp"

namespace ems {

ClassWeightVector class_weights_from_counts(std::span<const size_t> counts) {
  if (counts.empty()) throw Error("class weights: empty schema");
  const double total = static_cast<double>(std::accumulate(counts.begin(), counts.end(), size_t{0}));
  const double num_classes = static_cast<double>(counts.size());
  ClassWeightVector out;
  out.values = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(counts.size()));
  double max_weight = 0;
  for (size_t r = 0; r < counts.size(); ++r) {
    if (counts[r] == 0) {
      out.absent_classes.push_back(static_cast<int>(r));
      continue;
    }
    const double v = total / (num_classes * static_cast<double>(counts[r]));
    out.values[static_cast<Eigen::Index>(r)] = v;
    max_weight = std::max(max_weight, v);
  }
  if (max_weight == 0) max_weight = 1;  // no positive labels at all
  for (int r : out.absent_classes) out.values[r] = max_weight;
  return out;
}

ClassWeightVector compute_class_weights(const CorpusSplit& annotated) {
  std::vector<size_t> counts(static_cast<size_t>(annotated.schema.size()), 0);
  for (const Document& doc : annotated.documents) {
    if (!doc.gold_labels) throw Error("class weights: document '" + doc.doc_id + "' has no gold labels");
    for (const LabelSet& labels : *doc.gold_labels)
      for (int r : labels) ++counts[static_cast<size_t>(r)];
  }
  return class_weights_from_counts(counts);
}

double informativeness(const Document& document, std::span<const ExpertPrediction> expert,
                       const Eigen::Ref<const Eigen::VectorXd>& weights) {
  if (expert.size() != document.instances.size())
    throw Error("informativeness: document '" + document.doc_id + "' has " + std::to_string(document.instances.size()) +
                " instances but " + std::to_string(expert.size()) + " expert rows");
  double score = 0;
  for (size_t i = 0; i < document.instances.size(); ++i) {
    const LabelSet agreements = intersection(document.instances[i].ds_labels, expert[i].labels);
    for (int r : agreements) score += weights[r] * expert[i].distribution[r];
  }
  return score;
}

size_t selection_size(size_t document_count, double fraction) {
  if (!(fraction > 0.0 && fraction <= 1.0)) throw Error("selection fraction must be in (0, 1]");
  // Tolerate representation error such as 0.29 * 100 = 28.999999999999996.
  const auto k = static_cast<size_t>(std::floor(fraction * static_cast<double>(document_count) + 1e-9));
  return std::clamp<size_t>(k, 1, std::max<size_t>(document_count, 1));
}

namespace {

CorpusSplit subset(const CorpusSplit& ds, const std::vector<size_t>& order) {
  CorpusSplit out;
  out.kind = ds.kind;
  out.schema = ds.schema;
  out.feature_dim = ds.feature_dim;
  out.documents.reserve(order.size());
  for (size_t d : order) out.documents.push_back(ds.documents[d]);
  return out;
}

}  // namespace

Selection rank_and_select(const CorpusSplit& ds, const ExpertTable& expert, const ClassWeightVector& weights,
                          double fraction, int threads) {
  if (ds.documents.empty()) throw Error("rank_and_select: empty DS split");
  if (weights.values.size() != ds.schema.size()) throw Error("rank_and_select: class weight length mismatch");
  const size_t k = selection_size(ds.documents.size(), fraction);
  expert.check_covers(ds);

  std::vector<double> scores(ds.documents.size());
  parallel_for(ds.documents.size(), threads, [&](size_t d) {
    const Document& doc = ds.documents[d];
    scores[d] = informativeness(doc, expert.rows(doc.doc_id), weights.values);
  });

  std::vector<size_t> order(ds.documents.size());
  std::iota(order.begin(), order.end(), size_t{0});
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return ds.documents[a].doc_id < ds.documents[b].doc_id;
  });

  Selection out;
  out.ranking.selected = k;
  for (size_t d : order) out.ranking.entries.push_back({ds.documents[d].doc_id, scores[d]});
  out.augmentation = subset(ds, std::vector<size_t>(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k)));
  return out;
}

CorpusSplit rank_random(const CorpusSplit& ds, double fraction, std::uint64_t seed) {
  if (ds.documents.empty()) throw Error("rank_random: empty DS split");
  const size_t k = selection_size(ds.documents.size(), fraction);
  std::vector<size_t> order(ds.documents.size());
  std::iota(order.begin(), order.end(), size_t{0});
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  order.resize(k);
  std::sort(order.begin(), order.end());
  return subset(ds, order);
}

void write_ranking(const RankedCorpus& ranking, std::ostream& out, const std::string& provenance) {
  if (!provenance.empty()) out << "# " << provenance << '\n';
  out << "# selected\t" << ranking.selected << '\n';
  char score[64];
  for (size_t i = 0; i < ranking.entries.size(); ++i) {
    std::snprintf(score, sizeof score, "%.6f", ranking.entries[i].score);
    out << (i + 1) << '\t' << ranking.entries[i].doc_id << '\t' << score << '\n';
  }
}

}  // namespace ems
