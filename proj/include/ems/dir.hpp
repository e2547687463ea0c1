// Copyright 2026 The EMS-DocRE Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "ems/corpus.hpp"
#include "ems/supervision.hpp"

namespace ems {

struct ClassWeightVector {
  Eigen::VectorXd values;
  /// Classes absent from the annotated split; they received the maximum weight.
  std::vector<int> absent_classes;
};

/// Balanced heuristic V_r = n_total / (N_r * n_r) over positive gold labels.
ClassWeightVector compute_class_weights(const CorpusSplit& annotated);
ClassWeightVector class_weights_from_counts(std::span<const size_t> counts);

/// Σ_i Σ_{r ∈ ds_i ∩ ex_i} V_r · P_EX^i(r). NA and TH never contribute.
double informativeness(const Document& document, std::span<const ExpertPrediction> expert,
                       const Eigen::Ref<const Eigen::VectorXd>& weights);

struct RankedDocument {
  std::string doc_id;
  double score = 0;
  bool operator==(const RankedDocument&) const = default;
};

struct RankedCorpus {
  /// Sorted by descending score, ties by ascending doc_id.
  std::vector<RankedDocument> entries;
  /// The first `selected` entries form the augmentation set.
  size_t selected = 0;
  bool operator==(const RankedCorpus&) const = default;
};

struct Selection {
  RankedCorpus ranking;
  CorpusSplit augmentation;
};

/// max(1, floor(fraction * n)).
size_t selection_size(size_t document_count, double fraction);

Selection rank_and_select(const CorpusSplit& ds, const ExpertTable& expert, const ClassWeightVector& weights,
                          double fraction, int threads = 1);

/// Uniform random subset of selection_size(n, fraction) documents, kept in corpus order.
CorpusSplit rank_random(const CorpusSplit& ds, double fraction, std::uint64_t seed);

/// Tab-separated `rank doc_id score` with 1-based rank and 6-decimal scores.
/// '#' lines carry provenance.
void write_ranking(const RankedCorpus& ranking, std::ostream& out, const std::string& provenance = "");

}  // namespace ems
