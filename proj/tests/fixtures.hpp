// Copyright 2026 The EMS-DocRE Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <random>
#include <string>
#include <vector>

#include "ems/corpus.hpp"
#include "ems/supervision.hpp"

namespace fixtures {

// A DS split whose documents have `sizes[d]` instances over `num_classes`
// classes, and a matching expert table with the given labels and softmax rows.
struct TinyDs {
  ems::CorpusSplit split;
  ems::ExpertTable expert;
};

inline ems::Document chain_document(const std::string& id, int instance_count) {
  ems::Document doc;
  doc.doc_id = id;
  doc.entity_count = instance_count + 1;
  for (int i = 0; i < instance_count; ++i) {
    ems::Instance inst;
    inst.head = 0;
    inst.tail = i + 1;
    doc.instances.push_back(std::move(inst));
  }
  return doc;
}

inline ems::ExpertPrediction uniform_prediction(int num_classes, ems::LabelSet labels = {}) {
  return {std::move(labels), Eigen::VectorXd::Constant(num_classes + 1, 1.0 / (num_classes + 1))};
}

inline ems::CorpusSplit empty_split(ems::SplitKind kind, int num_classes, int dim = 0) {
  ems::CorpusSplit split;
  split.kind = kind;
  split.schema = ems::RelationSchema::numbered(num_classes);
  split.feature_dim = dim;
  return split;
}

// Random corpus with random DS labels, expert labels and expert distributions.
inline TinyDs random_ds(std::mt19937_64& rng, int num_docs, int num_classes, int max_instances) {
  TinyDs out{empty_split(ems::SplitKind::kDistant, num_classes), {}};
  std::uniform_int_distribution<int> count(1, max_instances);
  std::bernoulli_distribution coin(0.35);
  std::uniform_real_distribution<double> unit(0.01, 1.0);
  for (int d = 0; d < num_docs; ++d) {
    char id[16];
    std::snprintf(id, sizeof id, "doc-%03d", d);
    ems::Document doc = chain_document(id, count(rng));
    std::vector<ems::ExpertPrediction> rows;
    for (auto& inst : doc.instances) {
      ems::ExpertPrediction row;
      row.distribution.resize(num_classes + 1);
      for (int r = 0; r < num_classes; ++r) {
        if (coin(rng)) inst.ds_labels.insert(r);
        if (coin(rng)) row.labels.insert(r);
      }
      for (auto& p : row.distribution) p = unit(rng);
      row.distribution /= row.distribution.sum();
      rows.push_back(std::move(row));
    }
    out.expert.add_document(doc.doc_id, std::move(rows));
    out.split.documents.push_back(std::move(doc));
  }
  return out;
}

}  // namespace fixtures
