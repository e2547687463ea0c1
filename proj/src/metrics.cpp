// Copyright 2026 The EMS-DocRE Authors
// SPDX-License-Identifier: Apache-2.0

#include "ems/metrics.hpp"

namespace ems {

void FactSet::insert(Fact fact, std::vector<FactKey> projection) {
  facts_.emplace(std::move(fact), std::move(projection));
}

const std::vector<FactKey>& FactSet::projection(const Fact& fact) const {
  static const std::vector<FactKey> kNone;
  auto it = facts_.find(fact);
  return it == facts_.end() ? kNone : it->second;
}

FactProjectionSet FactSet::projection_set() const {
  FactProjectionSet out;
  for (const auto& [fact, keys] : facts_) out.insert(keys.begin(), keys.end());
  return out;
}

namespace {

double harmonic(double p, double r) { return p + r > 0 ? 2 * p * r / (p + r) : 0.0; }

size_t correct_count(const FactSet& predicted, const FactSet& gold) {
  size_t c = 0;
  for (const auto& [fact, keys] : predicted) c += gold.contains(fact);
  return c;
}

}  // namespace

PrecisionRecall micro_f1(const FactSet& predicted, const FactSet& gold) {
  const double c = static_cast<double>(correct_count(predicted, gold));
  PrecisionRecall out;
  out.precision = predicted.empty() ? 0.0 : c / static_cast<double>(predicted.size());
  out.recall = gold.empty() ? 0.0 : c / static_cast<double>(gold.size());
  out.f1 = harmonic(out.precision, out.recall);
  return out;
}

PrecisionRecall ign_f1(const FactSet& predicted, const FactSet& gold, const FactProjectionSet& train_facts) {
  size_t correct = 0;
  size_t in_train = 0;
  for (const auto& [fact, keys] : predicted) {
    if (!gold.contains(fact)) continue;
    ++correct;
    for (const FactKey& key : keys) {
      if (train_facts.count(key)) {
        ++in_train;
        break;
      }
    }
  }
  PrecisionRecall out;
  const size_t denominator = predicted.size() - in_train;
  out.precision = denominator == 0 ? 0.0 : static_cast<double>(correct - in_train) / static_cast<double>(denominator);
  out.recall = gold.empty() ? 0.0 : static_cast<double>(correct) / static_cast<double>(gold.size());
  out.f1 = harmonic(out.precision, out.recall);
  return out;
}

MetricsRecord summarize(const FactSet& predicted, const FactSet& gold, const FactProjectionSet& train_facts) {
  const PrecisionRecall plain = micro_f1(predicted, gold);
  const PrecisionRecall ign = ign_f1(predicted, gold, train_facts);
  return {plain.precision, plain.recall, plain.f1, ign.precision, ign.f1};
}

std::vector<FactKey> project(const Document& doc, int head, int tail, int relation) {
  auto names = [&](int entity) -> std::vector<std::string> {
    if (static_cast<size_t>(entity) < doc.entity_names.size() && !doc.entity_names[static_cast<size_t>(entity)].empty())
      return doc.entity_names[static_cast<size_t>(entity)];
    return {doc.doc_id + "#" + std::to_string(entity)};
  };
  std::vector<FactKey> keys;
  for (const std::string& h : names(head))
    for (const std::string& t : names(tail)) keys.push_back({h, t, relation});
  return keys;
}

FactSet gold_facts(const CorpusSplit& split) {
  FactSet out;
  for (const Document& doc : split.documents) {
    if (!doc.gold_labels) throw Error("gold_facts: document '" + doc.doc_id + "' has no gold labels");
    for (size_t i = 0; i < doc.instances.size(); ++i) {
      const Instance& inst = doc.instances[i];
      for (int r : (*doc.gold_labels)[i])
        out.insert({doc.doc_id, inst.head, inst.tail, r}, project(doc, inst.head, inst.tail, r));
    }
  }
  return out;
}

FactProjectionSet train_fact_projections(const CorpusSplit& annotated) {
  return gold_facts(annotated).projection_set();
}

}  // namespace ems
