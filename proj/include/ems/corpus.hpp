// Copyright 2026 The EMS-DocRE Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "ems/labels.hpp"

namespace ems {

/// One ordered entity pair of a document.
struct Instance {
  int head = 0;
  int tail = 0;
  Eigen::VectorXd features;
  LabelSet ds_labels;

  bool operator==(const Instance& other) const {
    return head == other.head && tail == other.tail && ds_labels == other.ds_labels &&
           features.size() == other.features.size() && features == other.features;
  }
};

struct Document {
  std::string doc_id;
  int entity_count = 0;
  /// Surface names per entity, used for document-independent fact keys.
  /// Empty when the source carries no names.
  std::vector<std::vector<std::string>> entity_names;
  std::vector<Instance> instances;
  std::optional<std::vector<LabelSet>> gold_labels;

  bool operator==(const Document& other) const = default;
};

enum class SplitKind { kAnnotatedTrain, kDistant, kDev, kTest };

std::string to_string(SplitKind kind);
SplitKind parse_split_kind(const std::string& name);

struct CorpusSplit {
  SplitKind kind = SplitKind::kAnnotatedTrain;
  RelationSchema schema;
  /// 0 for featureless corpora (DocRED text without an encoder).
  int feature_dim = 0;
  std::vector<Document> documents;

  size_t instance_count() const;
  bool operator==(const CorpusSplit& other) const = default;
};

struct ValidationReport {
  size_t documents = 0;
  size_t instances = 0;
  size_t na_instances = 0;
  std::vector<size_t> gold_histogram;
  std::vector<size_t> ds_histogram;
  std::vector<std::string> violations;

  bool valid() const { return violations.empty(); }
  int distinct_gold_classes() const;
  int distinct_ds_classes() const;
};

ValidationReport validate_corpus(const CorpusSplit& split);

/// Throws Error with the first violation of validate_corpus, if any.
void require_valid(const CorpusSplit& split);

enum class CorpusFormat { kNative, kDocred };

struct DocredOptions {
  SplitKind kind = SplitKind::kAnnotatedTrain;
  /// When absent the schema is the sorted set of relation ids in the file.
  std::optional<RelationSchema> schema;
};

/// Line-delimited native corpus: a header record, then one document per line.
/// `provenance`, when non-empty, is stored in the header and ignored on read.
void write_native(const CorpusSplit& split, std::ostream& out, const std::string& provenance = "");
std::string to_native_string(const CorpusSplit& split);
CorpusSplit read_native(std::istream& in, const std::string& source = "<stream>");

void save_corpus(const CorpusSplit& split, const std::filesystem::path& path, const std::string& provenance = "");
CorpusSplit load_corpus(const std::filesystem::path& path, CorpusFormat format = CorpusFormat::kNative,
                        const DocredOptions& docred = {});

CorpusSplit read_docred(std::istream& in, const DocredOptions& options, const std::string& source = "<stream>");

/// DocRED `rel_info.json` (object keyed by relation id) or a JSON array of ids.
RelationSchema load_schema_file(const std::filesystem::path& path);

struct SynthConfig {
  int num_classes = 24;
  int feature_dim = 32;
  int annotated_docs = 200;
  int ds_docs = 2000;
  int dev_docs = 200;
  int test_docs = 200;
  int min_instances = 2;
  int max_instances = 20;
  double zipf_exponent = 1.0;
  /// Probability that an instance expresses at least one relation.
  double positive_rate = 0.3;
  /// Probability of each additional gold label on a positive instance.
  double extra_label_rate = 0.15;
  double p_fp = 0.3;
  double p_fn = 0.3;
  double prototype_scale = 1.0;
  double sigma = 0.12;
  /// Size of the global entity pool that names are drawn from.
  int entity_pool = 20000;
  std::uint64_t seed = 1;

  void validate() const;
};

struct SynthCorpus {
  CorpusSplit annotated_train;
  CorpusSplit ds;
  CorpusSplit dev;
  CorpusSplit test;
  /// Row r is the class prototype of relation r.
  Eigen::MatrixXd prototypes;
  Eigen::VectorXd class_prior;
};

SynthCorpus generate_synthetic(const SynthConfig& config);

}  // namespace ems
