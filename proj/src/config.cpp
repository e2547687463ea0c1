// Copyright 2026 The EMS-DocRE Authors
// SPDX-License-Identifier: Apache-2.0

#include "ems/config.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include <json.hpp>

extern char** environ;

namespace ems {

using nlohmann::json;

namespace {

template <typename T>
std::function<void(const json&)> bind(T& target) {
  return [&target](const json& v) { target = v.get<T>(); };
}

using Binder = std::map<std::string, std::map<std::string, std::function<void(const json&)>>>;

Binder binders(RunConfig& c) {
  Binder b;
  auto& s = b["synth"];
  s["num_classes"] = bind(c.synth.num_classes);
  s["feature_dim"] = bind(c.synth.feature_dim);
  s["annotated_docs"] = bind(c.synth.annotated_docs);
  s["ds_docs"] = bind(c.synth.ds_docs);
  s["dev_docs"] = bind(c.synth.dev_docs);
  s["test_docs"] = bind(c.synth.test_docs);
  s["min_instances"] = bind(c.synth.min_instances);
  s["max_instances"] = bind(c.synth.max_instances);
  s["zipf_exponent"] = bind(c.synth.zipf_exponent);
  s["positive_rate"] = bind(c.synth.positive_rate);
  s["extra_label_rate"] = bind(c.synth.extra_label_rate);
  s["p_fp"] = bind(c.synth.p_fp);
  s["p_fn"] = bind(c.synth.p_fn);
  s["prototype_scale"] = bind(c.synth.prototype_scale);
  s["sigma"] = bind(c.synth.sigma);
  s["entity_pool"] = bind(c.synth.entity_pool);
  s["seed"] = bind(c.synth.seed);
  auto& t = b["train"];
  t["expert_epochs"] = bind(c.train.expert_epochs);
  t["main_epochs"] = bind(c.train.main_epochs);
  t["batch_size"] = bind(c.train.batch_size);
  t["learning_rate"] = bind(c.train.learning_rate);
  t["warmup_fraction"] = bind(c.train.warmup_fraction);
  t["seed"] = bind(c.train.seed);
  auto& l = b["loss"];
  l["gamma_a"] = bind(c.train.loss.gamma_a);
  l["gamma_b"] = bind(c.train.loss.gamma_b);
  l["self_supervision"] = bind(c.train.loss.self_supervision);
  l["plain_mode"] = bind(c.train.loss.plain_mode);
  auto& sel = b["selection"];
  sel["fraction"] = bind(c.fraction);
  sel["seed"] = bind(c.selection_seed);
  return b;
}

void assign(Binder& b, const std::string& section, const std::string& key, const json& value,
            const std::string& origin) {
  auto sit = b.find(section);
  if (sit == b.end()) throw Error(origin + ": unknown config section '" + section + "'");
  auto kit = sit->second.find(key);
  if (kit == sit->second.end()) throw Error(origin + ": unknown config key '" + section + "." + key + "'");
  try {
    kit->second(value);
  } catch (const json::exception&) {
    throw Error(origin + ": bad value for config key '" + section + "." + key + "': " + value.dump());
  }
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
  return s;
}

}  // namespace

void RunConfig::validate() const {
  synth.validate();
  train.validate();
  if (!(fraction > 0 && fraction <= 1)) throw Error("config: selection.fraction must be in (0, 1]");
}

RunConfig parse_config(const std::string& json_text, const EnvList& env) {
  RunConfig config;
  Binder b = binders(config);
  json root;
  try {
    root = json_text.empty() ? json::object() : json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw Error(std::string("config: parse failure: ") + e.what());
  }
  if (!root.is_object()) throw Error("config: top level must be an object");
  for (auto& [section, body] : root.items()) {
    if (!b.count(section)) throw Error("config: unknown config section '" + section + "'");
    if (!body.is_object()) throw Error("config: section '" + section + "' must be an object");
    for (auto& [key, value] : body.items()) assign(b, section, key, value, "config");
  }
  for (const auto& [name, raw] : env) {
    if (name.rfind(kEnvPrefix, 0) != 0) continue;
    const std::string rest = name.substr(std::char_traits<char>::length(kEnvPrefix));
    const size_t sep = rest.find("__");
    if (sep == std::string::npos) throw Error("environment: malformed override '" + name + "' (expected EMS_<SECTION>__<KEY>)");
    json value = json::parse(raw, nullptr, false);
    if (value.is_discarded()) value = raw;
    assign(b, lower(rest.substr(0, sep)), lower(rest.substr(sep + 2)), value, "environment " + name);
  }
  config.validate();
  return config;
}

RunConfig load_config(const std::filesystem::path& path, const EnvList& env) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  try {
    return parse_config(buffer.str(), env);
  } catch (const Error& e) {
    throw Error(path.string() + ": " + e.what());
  }
}

EnvList process_environment() {
  EnvList out;
  for (char** e = environ; e && *e; ++e) {
    std::string entry(*e);
    if (entry.rfind(kEnvPrefix, 0) != 0) continue;
    const size_t eq = entry.find('=');
    if (eq == std::string::npos) continue;
    out.emplace_back(entry.substr(0, eq), entry.substr(eq + 1));
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::string dump_config(const RunConfig& c) {
  nlohmann::ordered_json out;
  out["synth"] = {{"num_classes", c.synth.num_classes},       {"feature_dim", c.synth.feature_dim},
                  {"annotated_docs", c.synth.annotated_docs}, {"ds_docs", c.synth.ds_docs},
                  {"dev_docs", c.synth.dev_docs},             {"test_docs", c.synth.test_docs},
                  {"min_instances", c.synth.min_instances},   {"max_instances", c.synth.max_instances},
                  {"zipf_exponent", c.synth.zipf_exponent},   {"positive_rate", c.synth.positive_rate},
                  {"extra_label_rate", c.synth.extra_label_rate}, {"p_fp", c.synth.p_fp},
                  {"p_fn", c.synth.p_fn},                     {"prototype_scale", c.synth.prototype_scale},
                  {"sigma", c.synth.sigma},                   {"entity_pool", c.synth.entity_pool},
                  {"seed", c.synth.seed}};
  out["train"] = {{"expert_epochs", c.train.expert_epochs}, {"main_epochs", c.train.main_epochs},
                  {"batch_size", c.train.batch_size},       {"learning_rate", c.train.learning_rate},
                  {"warmup_fraction", c.train.warmup_fraction}, {"seed", c.train.seed}};
  out["loss"] = {{"gamma_a", c.train.loss.gamma_a},
                 {"gamma_b", c.train.loss.gamma_b},
                 {"self_supervision", c.train.loss.self_supervision},
                 {"plain_mode", c.train.loss.plain_mode}};
  out["selection"] = {{"fraction", c.fraction}, {"seed", c.selection_seed}};
  return out.dump(2);
}

std::string config_hash(const RunConfig& config) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : dump_config(config)) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buffer[17];
  std::snprintf(buffer, sizeof buffer, "%016llx", static_cast<unsigned long long>(h));
  return buffer;
}

}  // namespace ems
