// Copyright 2026 The EMS-DocRE Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "ems/corpus.hpp"
#include "ems/trainer.hpp"

namespace ems {

/// Every numeric hyperparameter of a run. Sections and keys of the JSON file:
///   synth:     num_classes feature_dim annotated_docs ds_docs dev_docs test_docs
///              min_instances max_instances zipf_exponent positive_rate
///              extra_label_rate p_fp p_fn prototype_scale sigma entity_pool seed
///   train:     expert_epochs main_epochs batch_size learning_rate warmup_fraction seed
///   loss:      gamma_a gamma_b self_supervision plain_mode
///   selection: fraction seed
/// Missing keys keep their defaults; unknown keys are errors.
struct RunConfig {
  SynthConfig synth;
  TrainConfig train;
  double fraction = 0.1;
  std::uint64_t selection_seed = 1;

  void validate() const;
};

/// Environment variables named EMS_<SECTION>__<KEY> (e.g. EMS_TRAIN__LEARNING_RATE)
/// override file values.
inline constexpr const char* kEnvPrefix = "EMS_";

using EnvList = std::vector<std::pair<std::string, std::string>>;

RunConfig parse_config(const std::string& json_text, const EnvList& env = {});
RunConfig load_config(const std::filesystem::path& path, const EnvList& env = {});
/// EMS_* variables of the current process.
EnvList process_environment();

/// Fully resolved config as canonical JSON.
std::string dump_config(const RunConfig& config);
/// FNV-1a 64-bit hash of dump_config, as 16 hex digits.
std::string config_hash(const RunConfig& config);

}  // namespace ems
