// Copyright 2026 The EMS-DocRE Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <compare>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "ems/corpus.hpp"

namespace ems {

/// A relation triple located in one document.
struct Fact {
  std::string doc_id;
  int head = 0;
  int tail = 0;
  int relation = 0;
  auto operator<=>(const Fact&) const = default;
};

/// Document-independent projection of a fact (entity name keys + relation).
struct FactKey {
  std::string head;
  std::string tail;
  int relation = 0;
  auto operator<=>(const FactKey&) const = default;
};

using FactProjectionSet = std::set<FactKey>;

class FactSet {
 public:
  void insert(Fact fact, std::vector<FactKey> projection = {});
  bool contains(const Fact& fact) const { return facts_.count(fact) > 0; }
  size_t size() const { return facts_.size(); }
  bool empty() const { return facts_.empty(); }

  /// Fact projections; a fact whose entities carry several names maps to several keys.
  const std::vector<FactKey>& projection(const Fact& fact) const;
  FactProjectionSet projection_set() const;

  auto begin() const { return facts_.begin(); }
  auto end() const { return facts_.end(); }

 private:
  std::map<Fact, std::vector<FactKey>> facts_;
};

struct PrecisionRecall {
  double precision = 0;
  double recall = 0;
  double f1 = 0;
};

struct MetricsRecord {
  double precision = 0;
  double recall = 0;
  double f1 = 0;
  double ign_precision = 0;
  double ign_f1 = 0;
};

PrecisionRecall micro_f1(const FactSet& predicted, const FactSet& gold);

/// Correct predictions whose projection appears in `train_facts` are removed
/// from both the numerator and the predicted count; recall is unchanged.
PrecisionRecall ign_f1(const FactSet& predicted, const FactSet& gold, const FactProjectionSet& train_facts);

MetricsRecord summarize(const FactSet& predicted, const FactSet& gold, const FactProjectionSet& train_facts);

/// Projection keys for (head, tail, relation) in `doc`. Entities without names
/// fall back to document-local keys that never match across documents.
std::vector<FactKey> project(const Document& doc, int head, int tail, int relation);

/// Gold facts of a split with gold labels.
FactSet gold_facts(const CorpusSplit& split);

/// Fact projections of an annotated training split, for the Ign filter.
FactProjectionSet train_fact_projections(const CorpusSplit& annotated);

}  // namespace ems
