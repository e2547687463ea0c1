// Copyright 2026 The EMS-DocRE Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "ems/labels.hpp"

namespace ems {

// Relative time cost of DS-utilization pipelines. One processing pass over a
// set of size m costs m·t for training and inference alike; costs are in m·t.

enum class StageKind { kTrain, kInference };

struct Stage {
  std::string name;
  StageKind kind = StageKind::kTrain;
  /// Multiple of the annotated-set size m.
  double data_size = 1;
  int epochs = 1;

  void validate() const;
};

struct PipelinePlan {
  std::string name;
  std::vector<Stage> stages;
  /// Name of the plan this one is compared against (empty for a baseline).
  std::string baseline;
};

double estimate_cost(const PipelinePlan& plan);

/// Cost ratio rounded to the nearest integer, formatted "Nx".
std::string relative_cost(const PipelinePlan& plan, const PipelinePlan& baseline);

PipelinePlan concatenate(const PipelinePlan& first, const PipelinePlan& second);

/// Original model trained for `epochs` on the annotated set.
PipelinePlan baseline_plan(int epochs = 30);

/// Expert on m for k1 epochs, inference over M, trainee on m and m_A for k2 epochs.
PipelinePlan ems_plan(int expert_epochs, int main_epochs, double augmentation_size, double ds_size,
                      const std::string& name = "ems");

/// DS pretraining over M for `epochs`, then fine-tuning on m.
PipelinePlan ds_pretraining_plan(int epochs, double ds_size, const std::string& name = "ds_pretraining");

/// The four reference plans: baseline, DS pretraining, EMS 3% and EMS 30%.
std::vector<PipelinePlan> bundled_plans();

/// JSON: {"plans": [{"name", "baseline"?, "stages": [{"name"?, "kind", "data_size", "epochs"?}]}]}
std::vector<PipelinePlan> load_plans(const std::filesystem::path& path);
std::vector<PipelinePlan> parse_plans(const std::string& text);

}  // namespace ems
