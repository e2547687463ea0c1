// Copyright 2026 The EMS-DocRE Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "ems/corpus.hpp"
#include "ems/metrics.hpp"
#include "ems/model.hpp"
#include "ems/msrl.hpp"
#include "ems/supervision.hpp"

namespace ems {

/// Which label sources build the partition of an augmentation instance.
enum class SupervisionPolicy {
  kMulti,         // Agg = ds ∩ ex, Rec = ds △ ex
  kDistantOnly,   // expert removed: Agg = ds
  kExpertOnly,    // distant removed: Agg = ex
};

std::string to_string(SupervisionPolicy policy);
SupervisionPolicy parse_supervision_policy(const std::string& name);

struct TrainConfig {
  int expert_epochs = 30;
  int main_epochs = 30;
  /// Instances per optimizer step.
  int batch_size = 40;
  double learning_rate = 3.0;
  double warmup_fraction = 0.06;
  LossConfig loss;
  SupervisionPolicy policy = SupervisionPolicy::kMulti;
  std::uint64_t seed = 1;

  void validate() const;
};

struct EpochRecord {
  int epoch = 0;
  double mean_loss = 0;
  MetricsRecord dev;
};

struct TrainReport {
  std::string phase;
  std::vector<EpochRecord> history;
  /// 1-based; 0 when trained without a dev split.
  int best_epoch = 0;
  MetricsRecord best_dev;
  size_t train_instances = 0;
  size_t steps = 0;
  /// Not serialized by write_report.
  double wall_clock_seconds = 0;
};

struct TrainResult {
  ModelParamsd params;
  TrainReport report;
};

/// One supervised instance: feature vector plus its class partition.
struct TrainingExample {
  const Eigen::VectorXd* features = nullptr;
  ClassPartition partition;
};

std::vector<TrainingExample> annotated_examples(const CorpusSplit& annotated);
std::vector<TrainingExample> augmentation_examples(const CorpusSplit& augmentation, const ExpertTable& expert,
                                                   SupervisionPolicy policy);

/// Mean per-instance MSRL loss at fixed parameters.
double mean_loss(const ModelParamsd& params, std::span<const TrainingExample> examples, const LossConfig& loss);

/// SGD with linear warmup on `examples`, reshuffled every epoch; the best dev-F1 epoch is returned.
TrainResult fit(std::vector<TrainingExample> examples, int num_classes, int feature_dim, const CorpusSplit* dev,
                const FactProjectionSet& train_facts, const TrainConfig& config, int epochs,
                const std::string& phase);

/// Expert trained on annotated data alone (Agg = gold, Rec = ∅).
TrainResult train_expert(const CorpusSplit& annotated, const CorpusSplit* dev, const TrainConfig& config);

/// Trainee on annotated ∪ augmentation, the latter partitioned with the expert's labels.
TrainResult train_main(const CorpusSplit& annotated, const CorpusSplit& augmentation, const ExpertTable& expert,
                       const CorpusSplit* dev, const TrainConfig& config);

FactSet predicted_facts(const ModelParamsd& params, const CorpusSplit& split, int threads = 1);

MetricsRecord evaluate(const ModelParamsd& params, const CorpusSplit& split, const FactProjectionSet& train_facts,
                       int threads = 1);

/// One JSON record per epoch followed by a summary record.
void write_report(const TrainReport& report, std::ostream& out, const std::string& provenance = "");
std::string metrics_json(const MetricsRecord& metrics);

}  // namespace ems
