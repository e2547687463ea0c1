// Copyright 2026 The EMS-DocRE Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Core>

#include "ems/corpus.hpp"
#include "ems/model.hpp"
#include "ems/partition.hpp"

namespace ems {

struct ExpertPrediction {
  LabelSet labels;
  /// Softmax over R ∪ {TH}; only consumed by document scoring.
  Eigen::VectorXd distribution;

  bool operator==(const ExpertPrediction& other) const {
    return labels == other.labels && distribution.size() == other.distribution.size() &&
           distribution == other.distribution;
  }
};

/// Expert output keyed by (doc_id, instance index), documents in insertion order.
class ExpertTable {
 public:
  void add_document(std::string doc_id, std::vector<ExpertPrediction> rows);

  bool contains(const std::string& doc_id) const { return index_.count(doc_id) > 0; }
  /// Throws Error when the document is missing.
  std::span<const ExpertPrediction> rows(const std::string& doc_id) const;

  size_t document_count() const { return documents_.size(); }
  size_t row_count() const;
  const std::vector<std::pair<std::string, std::vector<ExpertPrediction>>>& documents() const { return documents_; }

  /// Throws unless every document and instance of `split` is covered with the right class count.
  void check_covers(const CorpusSplit& split) const;

  bool operator==(const ExpertTable& other) const { return documents_ == other.documents_; }

 private:
  std::vector<std::pair<std::string, std::vector<ExpertPrediction>>> documents_;
  std::unordered_map<std::string, size_t> index_;
};

ExpertPrediction make_prediction(const Eigen::Ref<const Eigen::VectorXd>& logits);

/// One prediction per instance, in corpus order. Deterministic for any thread count.
ExpertTable run_expert(const ModelParamsd& params, const CorpusSplit& split, int threads = 1);

// Prediction file: '#' comment lines, then tab-separated
//   doc_id  instance_index  label_indices  distribution
// where label_indices is comma-separated ("-" for NA) and distribution holds
// N_r + 1 comma-separated probabilities with TH last.
void write_predictions(const ExpertTable& table, std::ostream& out, const std::string& provenance = "");
void save_predictions(const ExpertTable& table, const std::filesystem::path& path, const std::string& provenance = "");

/// Parses a prediction file without alignment checks.
ExpertTable read_predictions(std::istream& in, const std::string& source = "<stream>");

/// Parses and aligns to `split`: rejects unknown documents, missing instances,
/// and rows whose probabilities do not sum to 1 within 1e-6.
ExpertTable load_predictions(const std::filesystem::path& path, const CorpusSplit& split);
ExpertTable read_predictions(std::istream& in, const CorpusSplit& split, const std::string& source = "<stream>");

/// Restriction of `table` to the documents of `split`, in split order.
ExpertTable restrict_to(const ExpertTable& table, const CorpusSplit& split);

}  // namespace ems
