// Copyright 2026 The EMS-DocRE Authors
// SPDX-License-Identifier: Apache-2.0

#include "ems/costmodel.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "ems/labels.hpp"

namespace ems {

void Stage::validate() const {
  if (!(data_size > 0) || !std::isfinite(data_size)) throw Error("cost stage '" + name + "': data_size must be > 0");
  if (epochs < 1) throw Error("cost stage '" + name + "': epochs must be >= 1");
  if (kind == StageKind::kInference && epochs != 1) throw Error("cost stage '" + name + "': inference runs one pass");
}

double estimate_cost(const PipelinePlan& plan) {
  if (plan.stages.empty()) throw Error("cost plan '" + plan.name + "' has no stages");
  double cost = 0;
  for (const Stage& stage : plan.stages) {
    stage.validate();
    cost += static_cast<double>(stage.epochs) * stage.data_size;
  }
  return cost;
}

std::string relative_cost(const PipelinePlan& plan, const PipelinePlan& baseline) {
  const double base = estimate_cost(baseline);
  if (!(base > 0)) throw Error("relative cost: baseline '" + baseline.name + "' has zero cost");
  return std::to_string(std::llround(estimate_cost(plan) / base)) + "x";
}

PipelinePlan concatenate(const PipelinePlan& first, const PipelinePlan& second) {
  PipelinePlan out = first;
  out.name = first.name + "+" + second.name;
  out.stages.insert(out.stages.end(), second.stages.begin(), second.stages.end());
  return out;
}

PipelinePlan baseline_plan(int epochs) {
  return {"baseline", {{"train", StageKind::kTrain, 1.0, epochs}}, ""};
}

PipelinePlan ems_plan(int expert_epochs, int main_epochs, double augmentation_size, double ds_size,
                      const std::string& name) {
  return {name,
          {{"expert", StageKind::kTrain, 1.0, expert_epochs},
           {"rank", StageKind::kInference, ds_size, 1},
           {"main_annotated", StageKind::kTrain, 1.0, main_epochs},
           {"main_augmentation", StageKind::kTrain, augmentation_size, main_epochs}},
          "baseline"};
}

PipelinePlan ds_pretraining_plan(int epochs, double ds_size, const std::string& name) {
  return {name,
          {{"pretrain", StageKind::kTrain, ds_size, epochs}, {"finetune", StageKind::kTrain, 1.0, epochs}},
          "baseline"};
}

std::vector<PipelinePlan> bundled_plans() {
  // DocRED: M ≈ 33m. The 3% augmentation set is ≈ 1m, the 30% set ≈ 10m.
  return {baseline_plan(30), ds_pretraining_plan(30, 33.0, "atlop_with_ds"), ems_plan(30, 30, 1.0, 33.0, "ems_3pct"),
          ems_plan(30, 30, 10.0, 33.0, "ems_30pct")};
}

std::vector<PipelinePlan> parse_plans(const std::string& text) {
  nlohmann::json root;
  try {
    root = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(std::string("cost plans: parse failure: ") + e.what());
  }
  std::vector<PipelinePlan> plans;
  try {
    for (const auto& item : root.at("plans")) {
      PipelinePlan plan;
      plan.name = item.at("name").get<std::string>();
      plan.baseline = item.value("baseline", "");
      for (const auto& s : item.at("stages")) {
        Stage stage;
        stage.name = s.value("name", "");
        const std::string kind = s.at("kind").get<std::string>();
        if (kind == "train") {
          stage.kind = StageKind::kTrain;
        } else if (kind == "inference") {
          stage.kind = StageKind::kInference;
        } else {
          throw Error("cost plan '" + plan.name + "': unknown stage kind '" + kind + "'");
        }
        stage.data_size = s.at("data_size").get<double>();
        stage.epochs = s.value("epochs", 1);
        stage.validate();
        plan.stages.push_back(std::move(stage));
      }
      if (plan.stages.empty()) throw Error("cost plan '" + plan.name + "' has no stages");
      plans.push_back(std::move(plan));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("cost plans: ") + e.what());
  }
  return plans;
}

std::vector<PipelinePlan> load_plans(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open cost plan file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_plans(buffer.str());
}

}  // namespace ems
