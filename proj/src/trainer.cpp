// Copyright 2026 The EMS-DocRE Authors
// SPDX-License-Identifier: Apache-2.0

#include "ems/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <random>

#include <json.hpp>

#include "ems/parallel.hpp"

namespace ems {

std::string to_string(SupervisionPolicy policy) {
  switch (policy) {
    case SupervisionPolicy::kMulti: return "multi";
    case SupervisionPolicy::kDistantOnly: return "distant_only";
    case SupervisionPolicy::kExpertOnly: return "expert_only";
  }
  return "unknown";
}

SupervisionPolicy parse_supervision_policy(const std::string& name) {
  if (name == "multi") return SupervisionPolicy::kMulti;
  if (name == "distant_only") return SupervisionPolicy::kDistantOnly;
  if (name == "expert_only") return SupervisionPolicy::kExpertOnly;
  throw Error("unknown supervision policy '" + name + "' (expected multi, distant_only or expert_only)");
}

void TrainConfig::validate() const {
  if (expert_epochs < 1 || main_epochs < 1) throw Error("train config: epochs must be >= 1");
  if (batch_size < 1) throw Error("train config: batch_size must be >= 1");
  if (!(learning_rate > 0) || !std::isfinite(learning_rate)) throw Error("train config: learning_rate must be > 0");
  if (!(warmup_fraction >= 0 && warmup_fraction < 1)) throw Error("train config: warmup_fraction must be in [0, 1)");
  loss.validate();
}

std::vector<TrainingExample> annotated_examples(const CorpusSplit& annotated) {
  std::vector<TrainingExample> out;
  out.reserve(annotated.instance_count());
  const int num_classes = annotated.schema.size();
  for (const Document& doc : annotated.documents) {
    if (!doc.gold_labels) throw Error("annotated document '" + doc.doc_id + "' has no gold labels");
    for (size_t i = 0; i < doc.instances.size(); ++i)
      out.push_back({&doc.instances[i].features, annotated_partition((*doc.gold_labels)[i], num_classes)});
  }
  return out;
}

std::vector<TrainingExample> augmentation_examples(const CorpusSplit& augmentation, const ExpertTable& expert,
                                                   SupervisionPolicy policy) {
  if (policy != SupervisionPolicy::kDistantOnly) expert.check_covers(augmentation);
  const int num_classes = augmentation.schema.size();
  std::vector<TrainingExample> out;
  out.reserve(augmentation.instance_count());
  for (const Document& doc : augmentation.documents) {
    std::span<const ExpertPrediction> rows;
    if (policy != SupervisionPolicy::kDistantOnly) rows = expert.rows(doc.doc_id);
    for (size_t i = 0; i < doc.instances.size(); ++i) {
      const LabelSet& ds = doc.instances[i].ds_labels;
      ClassPartition part;
      switch (policy) {
        case SupervisionPolicy::kMulti: part = partition_classes(ds, rows[i].labels, num_classes); break;
        case SupervisionPolicy::kDistantOnly: part = partition_classes(ds, ds, num_classes); break;
        case SupervisionPolicy::kExpertOnly: part = partition_classes(rows[i].labels, rows[i].labels, num_classes); break;
      }
      out.push_back({&doc.instances[i].features, std::move(part)});
    }
  }
  return out;
}

double mean_loss(const ModelParamsd& params, std::span<const TrainingExample> examples, const LossConfig& loss) {
  if (examples.empty()) return 0;
  double total = 0;
  for (const TrainingExample& ex : examples) total += msrl_loss(forward(params, *ex.features), ex.partition, loss).loss;
  return total / static_cast<double>(examples.size());
}

FactSet predicted_facts(const ModelParamsd& params, const CorpusSplit& split, int threads) {
  std::vector<std::vector<LabelSet>> labels(split.documents.size());
  parallel_for(split.documents.size(), threads, [&](size_t d) {
    for (const Instance& inst : split.documents[d].instances)
      labels[d].push_back(predict_labels(forward(params, inst.features)));
  });
  FactSet out;
  for (size_t d = 0; d < split.documents.size(); ++d) {
    const Document& doc = split.documents[d];
    for (size_t i = 0; i < doc.instances.size(); ++i)
      for (int r : labels[d][i])
        out.insert({doc.doc_id, doc.instances[i].head, doc.instances[i].tail, r},
                   project(doc, doc.instances[i].head, doc.instances[i].tail, r));
  }
  return out;
}

MetricsRecord evaluate(const ModelParamsd& params, const CorpusSplit& split, const FactProjectionSet& train_facts,
                       int threads) {
  return summarize(predicted_facts(params, split, threads), gold_facts(split), train_facts);
}

TrainResult fit(std::vector<TrainingExample> examples, int num_classes, int feature_dim, const CorpusSplit* dev,
                const FactProjectionSet& train_facts, const TrainConfig& config, int epochs,
                const std::string& phase) {
  config.validate();
  if (examples.empty()) throw Error(phase + ": no training instances");
  const auto started = std::chrono::steady_clock::now();

  TrainResult result{ModelParamsd::zeros(num_classes, feature_dim), {}};
  TrainReport& report = result.report;
  report.phase = phase;
  report.train_instances = examples.size();

  ModelParamsd params = result.params;
  MatrixX<double> grad_weight(params.weight.rows(), params.weight.cols());
  VectorX<double> grad_bias(params.bias.size());

  const size_t batch = static_cast<size_t>(config.batch_size);
  const size_t steps_per_epoch = (examples.size() + batch - 1) / batch;
  const size_t total_steps = steps_per_epoch * static_cast<size_t>(epochs);
  const auto warmup_steps = static_cast<size_t>(std::floor(config.warmup_fraction * static_cast<double>(total_steps)));
  std::mt19937_64 rng(config.seed);
  std::vector<size_t> order(examples.size());
  std::iota(order.begin(), order.end(), size_t{0});

  size_t step = 0;
  bool have_best = false;
  for (int epoch = 1; epoch <= epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double epoch_loss = 0;
    for (size_t start = 0; start < order.size(); start += batch) {
      const size_t stop = std::min(order.size(), start + batch);
      grad_weight.setZero();
      grad_bias.setZero();
      for (size_t k = start; k < stop; ++k) {
        const TrainingExample& ex = examples[order[k]];
        const LossOutput<double> out = msrl_loss(forward(params, *ex.features), ex.partition, config.loss);
        epoch_loss += out.loss;
        grad_weight.noalias() += out.gradient * ex.features->transpose();
        grad_bias += out.gradient;
      }
      double lr = config.learning_rate;
      if (step < warmup_steps) lr *= static_cast<double>(step + 1) / static_cast<double>(warmup_steps);
      const double scale = lr / static_cast<double>(stop - start);
      params.weight -= scale * grad_weight;
      params.bias -= scale * grad_bias;
      ++step;
    }
    if (!params.all_finite()) throw Error(phase + ": parameters diverged at epoch " + std::to_string(epoch));

    EpochRecord record;
    record.epoch = epoch;
    record.mean_loss = epoch_loss / static_cast<double>(examples.size());
    if (dev) record.dev = evaluate(params, *dev, train_facts);
    report.history.push_back(record);
    if (!dev) {
      result.params = params;
    } else if (!have_best || record.dev.f1 > report.best_dev.f1) {
      have_best = true;
      report.best_epoch = epoch;
      report.best_dev = record.dev;
      result.params = params;
    }
  }
  report.steps = step;
  report.wall_clock_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return result;
}

TrainResult train_expert(const CorpusSplit& annotated, const CorpusSplit* dev, const TrainConfig& config) {
  if (annotated.documents.empty()) throw Error("train_expert: empty annotated split");
  const FactProjectionSet train_facts = train_fact_projections(annotated);
  return fit(annotated_examples(annotated), annotated.schema.size(), annotated.feature_dim, dev, train_facts, config,
             config.expert_epochs, "expert");
}

TrainResult train_main(const CorpusSplit& annotated, const CorpusSplit& augmentation, const ExpertTable& expert,
                       const CorpusSplit* dev, const TrainConfig& config) {
  if (!augmentation.documents.empty() &&
      (augmentation.schema != annotated.schema || augmentation.feature_dim != annotated.feature_dim))
    throw Error("train_main: augmentation split schema or feature dimension differs from the annotated split");
  std::vector<TrainingExample> examples = annotated_examples(annotated);
  std::vector<TrainingExample> extra = augmentation_examples(augmentation, expert, config.policy);
  examples.insert(examples.end(), std::make_move_iterator(extra.begin()), std::make_move_iterator(extra.end()));
  const FactProjectionSet train_facts = train_fact_projections(annotated);
  return fit(std::move(examples), annotated.schema.size(), annotated.feature_dim, dev, train_facts, config,
             config.main_epochs, "main");
}

namespace {

nlohmann::ordered_json metrics_object(const MetricsRecord& m) {
  nlohmann::ordered_json out;
  out["precision"] = m.precision;
  out["recall"] = m.recall;
  out["f1"] = m.f1;
  out["ign_precision"] = m.ign_precision;
  out["ign_f1"] = m.ign_f1;
  return out;
}

}  // namespace

std::string metrics_json(const MetricsRecord& metrics) { return metrics_object(metrics).dump(); }

void write_report(const TrainReport& report, std::ostream& out, const std::string& provenance) {
  for (const EpochRecord& record : report.history) {
    nlohmann::ordered_json line;
    line["record"] = "epoch";
    line["phase"] = report.phase;
    line["epoch"] = record.epoch;
    line["mean_loss"] = record.mean_loss;
    line["dev"] = metrics_object(record.dev);
    out << line.dump() << '\n';
  }
  nlohmann::ordered_json summary;
  summary["record"] = "summary";
  summary["phase"] = report.phase;
  summary["epochs"] = report.history.size();
  summary["steps"] = report.steps;
  summary["train_instances"] = report.train_instances;
  summary["best_epoch"] = report.best_epoch;
  summary["best_dev"] = metrics_object(report.best_dev);
  if (!provenance.empty()) summary["provenance"] = provenance;
  out << summary.dump() << '\n';
}

}  // namespace ems
