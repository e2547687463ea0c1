// Copyright 2026 The EMS-DocRE Authors
// SPDX-License-Identifier: Apache-2.0

// Command-line driver for the EMS pipeline.
//
//   ems gen          --config cfg.json --out data/
//   ems train-expert --config cfg.json --annotated data/annotated_train.jsonl --dev data/dev.jsonl --out expert/
//   ems rank         --config cfg.json --corpus data/ds.jsonl --annotated data/annotated_train.jsonl
//                    --model expert/expert.ckpt --out rank/
//   ems train        --config cfg.json --annotated data/annotated_train.jsonl --augmentation rank/augmentation.jsonl
//                    --predictions rank/augmentation.predictions.tsv --dev data/dev.jsonl --out main/
//   ems eval         --model main/model.ckpt --corpus data/test.jsonl --train-facts data/annotated_train.jsonl
//   ems cost         [--plans configs/cost_plans.json]
//
// Numeric hyperparameters come from the config file (and EMS_<SECTION>__<KEY>
// environment overrides); paths and mode switches are flags. Every command
// writes a manifest.json next to its outputs. Errors are reported as a single
// JSON line on stderr with a nonzero exit status.

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ems/config.hpp"
#include "ems/corpus.hpp"
#include "ems/costmodel.hpp"
#include "ems/dir.hpp"
#include "ems/metrics.hpp"
#include "ems/model.hpp"
#include "ems/parallel.hpp"
#include "ems/supervision.hpp"
#include "ems/trainer.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

struct CorpusArgs {
  std::string format = "native";
  std::string split = "";
  std::string schema;
};

ems::CorpusSplit read_corpus(const std::string& path, const CorpusArgs& args, ems::SplitKind default_kind) {
  if (args.format == "native") return ems::load_corpus(path);
  if (args.format != "docred") throw ems::Error("unknown corpus format '" + args.format + "'");
  ems::DocredOptions options;
  options.kind = args.split.empty() ? default_kind : ems::parse_split_kind(args.split);
  if (!args.schema.empty()) options.schema = ems::load_schema_file(args.schema);
  return ems::load_corpus(path, ems::CorpusFormat::kDocred, options);
}

std::string utc_now() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char buffer[32];
  std::strftime(buffer, sizeof buffer, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  return buffer;
}

/// Run bookkeeping; written last so a manifest only exists for completed runs.
class Manifest {
 public:
  Manifest(std::string command, const ems::RunConfig& config)
      : command_(std::move(command)), hash_(ems::config_hash(config)), started_(utc_now()),
        clock_(std::chrono::steady_clock::now()) {
    record_["command"] = command_;
    record_["config_hash"] = hash_;
    record_["config"] = ordered_json::parse(ems::dump_config(config));
  }

  void input(const std::string& role, const std::string& path) {
    if (!path.empty()) record_["inputs"][role] = path;
  }
  void output(const fs::path& path) { record_["outputs"].push_back(path.filename().string()); }
  void set(const std::string& key, ordered_json value) { record_[key] = std::move(value); }

  /// Text stamped into every artifact so it can be traced back to this manifest.
  std::string provenance(const fs::path& manifest_path) const {
    return "manifest=" + manifest_path.filename().string() + " command=" + command_ + " config_hash=" + hash_;
  }

  void write(const fs::path& path) {
    record_["started_at"] = started_;
    record_["finished_at"] = utc_now();
    record_["wall_clock_seconds"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - clock_).count();
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ems::Error("cannot write manifest " + path.string());
    out << record_.dump(2) << '\n';
  }

 private:
  std::string command_;
  std::string hash_;
  std::string started_;
  std::chrono::steady_clock::time_point clock_;
  ordered_json record_;
};

void print_summary(const std::string& report) {
  const std::string trimmed = report.substr(0, report.find_last_not_of('\n') + 1);
  std::cout << trimmed.substr(trimmed.rfind('\n') + 1) << '\n';
}

ems::RunConfig resolve_config(const std::string& path) {
  if (path.empty()) return ems::parse_config("", ems::process_environment());
  return ems::load_config(path, ems::process_environment());
}

fs::path prepare_dir(const std::string& dir) {
  fs::path out(dir);
  fs::create_directories(out);
  return out;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ems::Error("cannot open " + path.string() + " for writing");
  out << text;
}

std::string checkpoint_metadata(const ems::RunConfig& config, const std::string& provenance, const std::string& phase,
                                const ems::TrainReport& report) {
  ordered_json meta;
  meta["format"] = "ems-checkpoint";
  meta["version"] = 1;
  meta["phase"] = phase;
  meta["seed"] = config.train.seed;
  meta["config_hash"] = ems::config_hash(config);
  meta["best_epoch"] = report.best_epoch;
  meta["provenance"] = provenance;
  return meta.dump(2);
}

void emit_warnings(const ems::ClassWeightVector& weights, const ems::RelationSchema& schema) {
  for (int r : weights.absent_classes)
    std::cerr << "warning: class '" << schema.name(r)
              << "' has no annotated examples; using the maximum class weight\n";
}

ems::ExpertTable expert_source(const std::string& predictions, const std::string& model, const ems::CorpusSplit& split,
                               int threads) {
  if (predictions.empty() == model.empty())
    throw ems::Error("exactly one expert source is required (--predictions or --model)");
  if (!predictions.empty()) return ems::load_predictions(predictions, split);
  return ems::run_expert(ems::load_checkpoint(model), split, threads);
}

// ---------------------------------------------------------------------------

struct GenArgs {
  std::string config;
  std::string out;
};

void cmd_gen(const GenArgs& args) {
  const ems::RunConfig config = resolve_config(args.config);
  const fs::path dir = prepare_dir(args.out);
  const fs::path manifest_path = dir / "manifest.json";
  Manifest manifest("gen", config);
  manifest.input("config", args.config);
  manifest.set("seed", config.synth.seed);
  const std::string provenance = manifest.provenance(manifest_path);

  const ems::SynthCorpus corpus = ems::generate_synthetic(config.synth);
  for (const ems::CorpusSplit* split : {&corpus.annotated_train, &corpus.ds, &corpus.dev, &corpus.test}) {
    const fs::path path = dir / (ems::to_string(split->kind) + ".jsonl");
    ems::save_corpus(*split, path, provenance);
    manifest.output(path);
  }
  ordered_json protos;
  protos["provenance"] = provenance;
  protos["class_prior"] = std::vector<double>(corpus.class_prior.data(), corpus.class_prior.data() + corpus.class_prior.size());
  for (Eigen::Index r = 0; r < corpus.prototypes.rows(); ++r) {
    std::vector<double> row(static_cast<size_t>(corpus.prototypes.cols()));
    for (Eigen::Index k = 0; k < corpus.prototypes.cols(); ++k) row[static_cast<size_t>(k)] = corpus.prototypes(r, k);
    protos["prototypes"].push_back(row);
  }
  write_text(dir / "prototypes.json", protos.dump() + "\n");
  manifest.output(dir / "prototypes.json");
  manifest.write(manifest_path);
}

struct TrainExpertArgs {
  std::string config;
  std::string annotated;
  std::string dev;
  std::string out;
};

void cmd_train_expert(const TrainExpertArgs& args) {
  const ems::RunConfig config = resolve_config(args.config);
  const fs::path dir = prepare_dir(args.out);
  const fs::path manifest_path = dir / "manifest.json";
  Manifest manifest("train-expert", config);
  manifest.input("config", args.config);
  manifest.input("annotated", args.annotated);
  manifest.input("dev", args.dev);
  manifest.set("seed", config.train.seed);
  const std::string provenance = manifest.provenance(manifest_path);

  const ems::CorpusSplit annotated = ems::load_corpus(args.annotated);
  std::optional<ems::CorpusSplit> dev;
  if (!args.dev.empty()) dev = ems::load_corpus(args.dev);
  const ems::TrainResult result = ems::train_expert(annotated, dev ? &*dev : nullptr, config.train);

  ems::save_checkpoint(result.params, dir / "expert.ckpt", checkpoint_metadata(config, provenance, "expert", result.report));
  manifest.output(dir / "expert.ckpt");
  std::ostringstream report;
  ems::write_report(result.report, report, provenance);
  write_text(dir / "report.jsonl", report.str());
  manifest.output(dir / "report.jsonl");
  manifest.set("train_wall_clock_seconds", result.report.wall_clock_seconds);
  manifest.write(manifest_path);
  print_summary(report.str());
}

struct PredictArgs {
  std::string model;
  std::string corpus;
  std::string out;
  CorpusArgs corpus_args;
};

void cmd_predict(const PredictArgs& args, int threads) {
  const ems::RunConfig config = resolve_config("");
  const fs::path out(args.out);
  if (out.has_parent_path()) fs::create_directories(out.parent_path());
  fs::path manifest_path = out;
  manifest_path += ".manifest.json";
  Manifest manifest("predict", config);
  manifest.input("model", args.model);
  manifest.input("corpus", args.corpus);

  const ems::CorpusSplit split = read_corpus(args.corpus, args.corpus_args, ems::SplitKind::kDistant);
  const ems::ExpertTable table = ems::run_expert(ems::load_checkpoint(args.model), split, threads);
  ems::save_predictions(table, out, manifest.provenance(manifest_path));
  manifest.output(out);
  manifest.write(manifest_path);
}

struct RankArgs {
  std::string config;
  std::string corpus;
  std::string annotated;
  std::string predictions;
  std::string model;
  std::string out;
  std::optional<double> fraction;
  std::optional<std::uint64_t> seed;
  bool random = false;
  CorpusArgs corpus_args;
};

void cmd_rank(const RankArgs& args, int threads) {
  ems::RunConfig config = resolve_config(args.config);
  if (args.fraction) config.fraction = *args.fraction;
  if (args.seed) config.selection_seed = *args.seed;
  config.validate();
  if (args.predictions.empty() == args.model.empty())
    throw ems::Error("exactly one expert source is required (--predictions or --model)");

  const fs::path dir = prepare_dir(args.out);
  const fs::path manifest_path = dir / "manifest.json";
  Manifest manifest(args.random ? "rank --random" : "rank", config);
  manifest.input("config", args.config);
  manifest.input("corpus", args.corpus);
  manifest.input("annotated", args.annotated);
  manifest.input("predictions", args.predictions);
  manifest.input("model", args.model);
  manifest.set("fraction", config.fraction);
  manifest.set("seed", config.selection_seed);
  const std::string provenance = manifest.provenance(manifest_path);

  const ems::CorpusSplit ds = read_corpus(args.corpus, args.corpus_args, ems::SplitKind::kDistant);
  const ems::ExpertTable table = expert_source(args.predictions, args.model, ds, threads);

  ems::CorpusSplit augmentation;
  if (args.random) {
    augmentation = ems::rank_random(ds, config.fraction, config.selection_seed);
  } else {
    const ems::CorpusSplit annotated = read_corpus(args.annotated, args.corpus_args, ems::SplitKind::kAnnotatedTrain);
    const ems::ClassWeightVector weights = ems::compute_class_weights(annotated);
    emit_warnings(weights, annotated.schema);
    ems::Selection selection = ems::rank_and_select(ds, table, weights, config.fraction, threads);
    std::ostringstream ranking;
    ems::write_ranking(selection.ranking, ranking, provenance);
    write_text(dir / "ranking.tsv", ranking.str());
    manifest.output(dir / "ranking.tsv");
    augmentation = std::move(selection.augmentation);
  }
  ems::save_corpus(augmentation, dir / "augmentation.jsonl", provenance);
  manifest.output(dir / "augmentation.jsonl");
  ems::save_predictions(ems::restrict_to(table, augmentation), dir / "augmentation.predictions.tsv", provenance);
  manifest.output(dir / "augmentation.predictions.tsv");
  manifest.set("selected_documents", augmentation.documents.size());
  manifest.write(manifest_path);
}

struct TrainArgs {
  std::string config;
  std::string annotated;
  std::string augmentation;
  std::string predictions;
  std::string expert;
  std::string dev;
  std::string out;
  bool no_self_sup = false;
  bool no_expert_sup = false;
  bool no_distant_sup = false;
  bool plain = false;
};

void cmd_train(const TrainArgs& args, int threads) {
  ems::RunConfig config = resolve_config(args.config);
  if (args.no_expert_sup && args.no_distant_sup)
    throw ems::Error("--no-expert-sup and --no-distant-sup are mutually exclusive");
  if (args.no_self_sup) config.train.loss.self_supervision = false;
  if (args.plain) config.train.loss.plain_mode = true;
  if (args.no_expert_sup) config.train.policy = ems::SupervisionPolicy::kDistantOnly;
  if (args.no_distant_sup) config.train.policy = ems::SupervisionPolicy::kExpertOnly;
  config.validate();

  const fs::path dir = prepare_dir(args.out);
  const fs::path manifest_path = dir / "manifest.json";
  Manifest manifest("train", config);
  manifest.input("config", args.config);
  manifest.input("annotated", args.annotated);
  manifest.input("augmentation", args.augmentation);
  manifest.input("predictions", args.predictions);
  manifest.input("expert", args.expert);
  manifest.input("dev", args.dev);
  manifest.set("seed", config.train.seed);
  manifest.set("policy", ems::to_string(config.train.policy));
  manifest.set("self_supervision", config.train.loss.self_supervision);
  manifest.set("plain_mode", config.train.loss.plain_mode);
  const std::string provenance = manifest.provenance(manifest_path);

  const ems::CorpusSplit annotated = ems::load_corpus(args.annotated);
  ems::CorpusSplit augmentation;
  augmentation.kind = ems::SplitKind::kDistant;
  augmentation.schema = annotated.schema;
  augmentation.feature_dim = annotated.feature_dim;
  ems::ExpertTable table;
  if (!args.augmentation.empty()) {
    augmentation = ems::load_corpus(args.augmentation);
    if (config.train.policy != ems::SupervisionPolicy::kDistantOnly || !args.predictions.empty() || !args.expert.empty())
      table = expert_source(args.predictions, args.expert, augmentation, threads);
  }
  std::optional<ems::CorpusSplit> dev;
  if (!args.dev.empty()) dev = ems::load_corpus(args.dev);
  const ems::TrainResult result = ems::train_main(annotated, augmentation, table, dev ? &*dev : nullptr, config.train);

  ems::save_checkpoint(result.params, dir / "model.ckpt", checkpoint_metadata(config, provenance, "main", result.report));
  manifest.output(dir / "model.ckpt");
  std::ostringstream report;
  ems::write_report(result.report, report, provenance);
  write_text(dir / "report.jsonl", report.str());
  manifest.output(dir / "report.jsonl");
  manifest.set("train_wall_clock_seconds", result.report.wall_clock_seconds);
  manifest.write(manifest_path);
  print_summary(report.str());
}

struct EvalArgs {
  std::string model;
  std::string corpus;
  std::string train_facts;
  std::string out;
};

void cmd_eval(const EvalArgs& args, int threads) {
  const ems::ModelParamsd params = ems::load_checkpoint(args.model);
  const ems::CorpusSplit split = ems::load_corpus(args.corpus);
  ems::FactProjectionSet train_facts;
  if (!args.train_facts.empty()) train_facts = ems::train_fact_projections(ems::load_corpus(args.train_facts));
  const ems::MetricsRecord metrics = ems::evaluate(params, split, train_facts, threads);

  ordered_json record = ordered_json::parse(ems::metrics_json(metrics));
  record["split"] = ems::to_string(split.kind);
  record["documents"] = split.documents.size();
  if (!args.out.empty()) {
    const fs::path out(args.out);
    if (out.has_parent_path()) fs::create_directories(out.parent_path());
    fs::path manifest_path = out;
    manifest_path += ".manifest.json";
    Manifest manifest("eval", resolve_config(""));
    manifest.input("model", args.model);
    manifest.input("corpus", args.corpus);
    manifest.input("train_facts", args.train_facts);
    record["provenance"] = manifest.provenance(manifest_path);
    write_text(out, record.dump() + "\n");
    manifest.output(out);
    manifest.write(manifest_path);
  }
  std::cout << record.dump() << '\n';
}

void cmd_cost(const std::string& plans_path) {
  const std::vector<ems::PipelinePlan> plans = plans_path.empty() ? ems::bundled_plans() : ems::load_plans(plans_path);
  auto find = [&](const std::string& name) -> const ems::PipelinePlan& {
    for (const auto& plan : plans)
      if (plan.name == name) return plan;
    throw ems::Error("cost plan references unknown baseline '" + name + "'");
  };
  std::cout << "plan\tcost_mt\trelative\n";
  for (const auto& plan : plans) {
    const ems::PipelinePlan& baseline = plan.baseline.empty() ? plan : find(plan.baseline);
    std::ostringstream cost;
    cost << ems::estimate_cost(plan);
    std::cout << plan.name << '\t' << cost.str() << '\t' << ems::relative_cost(plan, baseline) << '\n';
  }
}

void cmd_stats(const std::string& corpus, const CorpusArgs& args) {
  const ems::CorpusSplit split = read_corpus(corpus, args, ems::SplitKind::kAnnotatedTrain);
  const ems::ValidationReport report = ems::validate_corpus(split);
  ordered_json out;
  out["split"] = ems::to_string(split.kind);
  out["documents"] = report.documents;
  out["instances"] = report.instances;
  out["na_instances"] = report.na_instances;
  out["feature_dim"] = split.feature_dim;
  out["classes"] = split.schema.size();
  out["distinct_gold_classes"] = report.distinct_gold_classes();
  out["distinct_ds_classes"] = report.distinct_ds_classes();
  out["gold_histogram"] = report.gold_histogram;
  out["ds_histogram"] = report.ds_histogram;
  out["violations"] = report.violations;
  std::cout << out.dump() << '\n';
}

std::string one_line(std::string text) {
  for (char& ch : text)
    if (ch == '\n' || ch == '\r') ch = ' ';
  return text;
}

void add_corpus_options(CLI::App* cmd, CorpusArgs& args) {
  cmd->add_option("--format", args.format, "Corpus format: native or docred")->check(CLI::IsMember({"native", "docred"}));
  cmd->add_option("--split", args.split, "Split kind for DocRED files (annotated_train, ds, dev, test)");
  cmd->add_option("--schema", args.schema, "DocRED relation schema (rel_info.json, rel2id.json or id array)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Efficient multi-supervision for document-level relation extraction"};
  app.require_subcommand(1);
  app.fallthrough();
  int threads = ems::default_thread_count();
  app.add_option("--threads", threads, "Worker thread cap")->check(CLI::PositiveNumber);

  GenArgs gen;
  auto* gen_cmd = app.add_subcommand("gen", "Generate a synthetic corpus (all four splits)");
  gen_cmd->add_option("--config", gen.config, "Config file");
  gen_cmd->add_option("--out", gen.out, "Output directory")->required();

  TrainExpertArgs te;
  auto* te_cmd = app.add_subcommand("train-expert", "Train the expert on annotated data");
  te_cmd->add_option("--config", te.config, "Config file");
  te_cmd->add_option("--annotated", te.annotated, "Annotated training corpus")->required();
  te_cmd->add_option("--dev", te.dev, "Dev corpus for model selection");
  te_cmd->add_option("--out", te.out, "Output directory")->required();

  PredictArgs pr;
  auto* pr_cmd = app.add_subcommand("predict", "Write expert predictions for a corpus");
  pr_cmd->add_option("--model", pr.model, "Model checkpoint")->required();
  pr_cmd->add_option("--corpus", pr.corpus, "Corpus to label")->required();
  pr_cmd->add_option("--out", pr.out, "Prediction file")->required();
  add_corpus_options(pr_cmd, pr.corpus_args);

  RankArgs rk;
  auto* rk_cmd = app.add_subcommand("rank", "Rank DS documents by informativeness and select the augmentation set");
  rk_cmd->add_option("--config", rk.config, "Config file");
  rk_cmd->add_option("--corpus", rk.corpus, "DS corpus")->required();
  rk_cmd->add_option("--annotated", rk.annotated, "Annotated corpus for class weights");
  rk_cmd->add_option("--predictions", rk.predictions, "Expert prediction file");
  rk_cmd->add_option("--model", rk.model, "Expert checkpoint");
  rk_cmd->add_option("--fraction", rk.fraction, "Override selection.fraction");
  rk_cmd->add_option("--seed", rk.seed, "Override selection.seed");
  rk_cmd->add_flag("--random", rk.random, "Select uniformly at random instead of by informativeness");
  add_corpus_options(rk_cmd, rk.corpus_args);

  rk_cmd->add_option("--out", rk.out, "Output directory")->required();

  TrainArgs tr;
  auto* tr_cmd = app.add_subcommand("train", "Train on annotated data plus the augmentation set");
  tr_cmd->add_option("--config", tr.config, "Config file");
  tr_cmd->add_option("--annotated", tr.annotated, "Annotated training corpus")->required();
  tr_cmd->add_option("--augmentation", tr.augmentation, "Augmentation corpus");
  tr_cmd->add_option("--predictions", tr.predictions, "Expert predictions covering the augmentation corpus");
  tr_cmd->add_option("--expert", tr.expert, "Expert checkpoint (alternative to --predictions)");
  tr_cmd->add_option("--dev", tr.dev, "Dev corpus for model selection");
  tr_cmd->add_option("--out", tr.out, "Output directory")->required();
  tr_cmd->add_flag("--no-self-sup", tr.no_self_sup, "Ablation: constant class weights");
  tr_cmd->add_flag("--no-expert-sup", tr.no_expert_sup, "Ablation: partition from DS labels only");
  tr_cmd->add_flag("--no-distant-sup", tr.no_distant_sup, "Ablation: partition from expert labels only");
  tr_cmd->add_flag("--plain", tr.plain, "All class weights exactly 1 (adaptive-thresholding loss)");

  EvalArgs ev;
  auto* ev_cmd = app.add_subcommand("eval", "Evaluate F1 and Ign F1");
  ev_cmd->add_option("--model", ev.model, "Model checkpoint")->required();
  ev_cmd->add_option("--corpus", ev.corpus, "Corpus with gold labels")->required();
  ev_cmd->add_option("--train-facts", ev.train_facts, "Annotated training corpus for the Ign filter");
  ev_cmd->add_option("--out", ev.out, "Write the metrics record here as well");

  std::string plans;
  auto* cost_cmd = app.add_subcommand("cost", "Print relative time costs of pipeline plans");
  cost_cmd->add_option("--plans", plans, "Plan file (defaults to the bundled plans)");

  std::string stats_corpus;
  CorpusArgs stats_args;
  auto* stats_cmd = app.add_subcommand("stats", "Validate a corpus and print statistics");
  stats_cmd->add_option("--corpus", stats_corpus, "Corpus file")->required();
  add_corpus_options(stats_cmd, stats_args);

  std::string command = "ems";
  try {
    app.parse(argc, argv);
    for (auto* sub : app.get_subcommands()) command = sub->get_name();
    if (*gen_cmd) cmd_gen(gen);
    if (*te_cmd) cmd_train_expert(te);
    if (*pr_cmd) cmd_predict(pr, threads);
    if (*rk_cmd) cmd_rank(rk, threads);
    if (*tr_cmd) cmd_train(tr, threads);
    if (*ev_cmd) cmd_eval(ev, threads);
    if (*cost_cmd) cmd_cost(plans);
    if (*stats_cmd) cmd_stats(stats_corpus, stats_args);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << ordered_json{{"status", "error"}, {"command", command}, {"kind", "usage"}, {"message", one_line(e.what())}}.dump()
              << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << ordered_json{{"status", "error"}, {"command", command}, {"kind", "runtime"}, {"message", one_line(e.what())}}.dump()
              << '\n';
    return 1;
  }
  return 0;
}
