// Copyright 2026 The EMS-DocRE Authors
// SPDX-License-Identifier: Apache-2.0

#include "ems/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

namespace ems {

using nlohmann::json;

namespace {

constexpr const char* kNativeFormatTag = "ems-native-corpus";
constexpr int kNativeVersion = 1;

std::string doc_context(const std::string& doc_id) { return "document '" + doc_id + "'"; }

}  // namespace

std::string to_string(SplitKind kind) {
  switch (kind) {
    case SplitKind::kAnnotatedTrain: return "annotated_train";
    case SplitKind::kDistant: return "ds";
    case SplitKind::kDev: return "dev";
    case SplitKind::kTest: return "test";
  }
  return "unknown";
}

SplitKind parse_split_kind(const std::string& name) {
  if (name == "annotated_train") return SplitKind::kAnnotatedTrain;
  if (name == "ds") return SplitKind::kDistant;
  if (name == "dev") return SplitKind::kDev;
  if (name == "test") return SplitKind::kTest;
  throw Error("unknown split name '" + name + "' (expected annotated_train, ds, dev or test)");
}

size_t CorpusSplit::instance_count() const {
  size_t total = 0;
  for (const Document& doc : documents) total += doc.instances.size();
  return total;
}

int ValidationReport::distinct_gold_classes() const {
  return static_cast<int>(std::count_if(gold_histogram.begin(), gold_histogram.end(), [](size_t c) { return c > 0; }));
}

int ValidationReport::distinct_ds_classes() const {
  return static_cast<int>(std::count_if(ds_histogram.begin(), ds_histogram.end(), [](size_t c) { return c > 0; }));
}

ValidationReport validate_corpus(const CorpusSplit& split) {
  ValidationReport report;
  const int num_classes = split.schema.size();
  report.gold_histogram.assign(static_cast<size_t>(num_classes), 0);
  report.ds_histogram.assign(static_cast<size_t>(num_classes), 0);
  auto violation = [&](const std::string& doc_id, const std::string& what) {
    report.violations.push_back(doc_context(doc_id) + ": " + what);
  };
  auto count = [&](std::vector<size_t>& histogram, const LabelSet& labels) {
    for (int r : labels)
      if (r >= 0 && r < num_classes) ++histogram[static_cast<size_t>(r)];
  };

  if (split.feature_dim < 0) report.violations.push_back("split: negative feature dimension");
  const bool needs_gold = split.kind != SplitKind::kDistant;
  std::set<std::string> seen_ids;
  for (const Document& doc : split.documents) {
    ++report.documents;
    if (!seen_ids.insert(doc.doc_id).second) violation(doc.doc_id, "duplicate doc_id");
    if (doc.entity_count <= 0) violation(doc.doc_id, "entity_count must be positive");
    if (!doc.entity_names.empty() && static_cast<int>(doc.entity_names.size()) != doc.entity_count)
      violation(doc.doc_id, "entity_names length differs from entity_count");
    if (needs_gold && !doc.gold_labels) violation(doc.doc_id, "missing gold labels on " + to_string(split.kind) + " split");
    if (doc.gold_labels && doc.gold_labels->size() != doc.instances.size())
      violation(doc.doc_id, "gold_labels length " + std::to_string(doc.gold_labels->size()) +
                                " differs from instance count " + std::to_string(doc.instances.size()));

    for (size_t i = 0; i < doc.instances.size(); ++i) {
      const Instance& inst = doc.instances[i];
      const std::string where = "instance " + std::to_string(i);
      ++report.instances;
      if (inst.head < 0 || inst.head >= doc.entity_count || inst.tail < 0 || inst.tail >= doc.entity_count)
        violation(doc.doc_id, where + ": entity index out of range");
      if (inst.head == inst.tail) violation(doc.doc_id, where + ": head equals tail");
      if (i > 0) {
        const Instance& prev = doc.instances[i - 1];
        if (std::pair(prev.head, prev.tail) >= std::pair(inst.head, inst.tail))
          violation(doc.doc_id, where + ": instances not in strictly increasing (head, tail) order");
      }
      if (inst.features.size() != split.feature_dim)
        violation(doc.doc_id, where + ": feature dimension " + std::to_string(inst.features.size()) + " != " +
                                  std::to_string(split.feature_dim));
      else if (!inst.features.allFinite())
        violation(doc.doc_id, where + ": non-finite feature");
      if (!inst.ds_labels.within(num_classes)) violation(doc.doc_id, where + ": ds label outside schema");
      count(report.ds_histogram, inst.ds_labels);

      const LabelSet* gold = nullptr;
      if (doc.gold_labels && i < doc.gold_labels->size()) gold = &(*doc.gold_labels)[i];
      if (gold) {
        if (!gold->within(num_classes)) violation(doc.doc_id, where + ": gold label outside schema");
        count(report.gold_histogram, *gold);
      }
      const LabelSet& reference = (split.kind == SplitKind::kDistant || !gold) ? inst.ds_labels : *gold;
      if (reference.empty()) ++report.na_instances;
    }
  }
  return report;
}

void require_valid(const CorpusSplit& split) {
  ValidationReport report = validate_corpus(split);
  if (!report.valid()) throw Error("invalid corpus: " + report.violations.front());
}

// ---------------------------------------------------------------------------
// Native format

namespace {

json labels_to_json(const LabelSet& labels) { return json(labels.indices()); }

LabelSet labels_from_json(const json& value) {
  if (!value.is_array()) throw Error("label list is not an array");
  std::vector<int> indices;
  for (const json& v : value) {
    if (!v.is_number_integer()) throw Error("label index is not an integer");
    indices.push_back(v.get<int>());
  }
  return LabelSet(std::move(indices));
}

json document_to_json(const Document& doc) {
  json out;
  out["doc_id"] = doc.doc_id;
  out["entity_count"] = doc.entity_count;
  if (!doc.entity_names.empty()) out["entity_names"] = doc.entity_names;
  json instances = json::array();
  for (size_t i = 0; i < doc.instances.size(); ++i) {
    const Instance& inst = doc.instances[i];
    json record;
    record["head"] = inst.head;
    record["tail"] = inst.tail;
    record["features"] = std::vector<double>(inst.features.data(), inst.features.data() + inst.features.size());
    record["ds_labels"] = labels_to_json(inst.ds_labels);
    if (doc.gold_labels) record["gold_labels"] = labels_to_json((*doc.gold_labels)[i]);
    instances.push_back(std::move(record));
  }
  out["instances"] = std::move(instances);
  return out;
}

Document document_from_json(const json& record) {
  Document doc;
  if (!record.is_object()) throw Error("document record is not an object");
  if (!record.contains("doc_id") || !record["doc_id"].is_string()) throw Error("missing string doc_id");
  doc.doc_id = record["doc_id"].get<std::string>();
  try {
    doc.entity_count = record.at("entity_count").get<int>();
    if (record.contains("entity_names"))
      doc.entity_names = record["entity_names"].get<std::vector<std::vector<std::string>>>();
    const json& instances = record.at("instances");
    if (!instances.is_array()) throw Error("instances is not an array");
    bool any_gold = false;
    bool all_gold = true;
    std::vector<LabelSet> gold;
    for (const json& item : instances) {
      Instance inst;
      inst.head = item.at("head").get<int>();
      inst.tail = item.at("tail").get<int>();
      const auto features = item.at("features").get<std::vector<double>>();
      inst.features = Eigen::Map<const Eigen::VectorXd>(features.data(), static_cast<Eigen::Index>(features.size()));
      inst.ds_labels = labels_from_json(item.at("ds_labels"));
      if (item.contains("gold_labels")) {
        any_gold = true;
        gold.push_back(labels_from_json(item["gold_labels"]));
      } else {
        all_gold = false;
      }
      doc.instances.push_back(std::move(inst));
    }
    if (any_gold && !all_gold) throw Error("gold_labels present on some instances only");
    if (any_gold) doc.gold_labels = std::move(gold);
  } catch (const json::exception& e) {
    throw Error(doc_context(doc.doc_id) + ": " + e.what());
  } catch (const Error& e) {
    throw Error(doc_context(doc.doc_id) + ": " + e.what());
  }
  return doc;
}

}  // namespace

void write_native(const CorpusSplit& split, std::ostream& out, const std::string& provenance) {
  json header;
  header["format"] = kNativeFormatTag;
  header["version"] = kNativeVersion;
  header["split"] = to_string(split.kind);
  header["feature_dim"] = split.feature_dim;
  header["classes"] = split.schema.classes();
  if (!provenance.empty()) header["provenance"] = provenance;
  out << header.dump() << '\n';
  for (const Document& doc : split.documents) out << document_to_json(doc).dump() << '\n';
}

std::string to_native_string(const CorpusSplit& split) {
  std::ostringstream out;
  write_native(split, out);
  return out.str();
}

CorpusSplit read_native(std::istream& in, const std::string& source) {
  std::string line;
  size_t line_no = 0;
  CorpusSplit split;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json record;
    try {
      record = json::parse(line);
    } catch (const json::parse_error& e) {
      throw Error(source + ":" + std::to_string(line_no) + ": parse failure: " + e.what());
    }
    if (!have_header) {
      if (!record.is_object() || record.value("format", "") != kNativeFormatTag)
        throw Error(source + ":1: missing native corpus header record");
      if (record.value("version", 0) != kNativeVersion)
        throw Error(source + ":1: unsupported native corpus version");
      try {
        split.kind = parse_split_kind(record.at("split").get<std::string>());
        split.feature_dim = record.at("feature_dim").get<int>();
        split.schema = RelationSchema(record.at("classes").get<std::vector<std::string>>());
      } catch (const json::exception& e) {
        throw Error(source + ":1: bad header: " + e.what());
      }
      have_header = true;
      continue;
    }
    try {
      split.documents.push_back(document_from_json(record));
    } catch (const Error& e) {
      throw Error(source + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (!have_header) throw Error(source + ": empty file (no native corpus header)");
  ValidationReport report = validate_corpus(split);
  if (!report.valid()) throw Error(source + ": schema violation: " + report.violations.front());
  return split;
}

void save_corpus(const CorpusSplit& split, const std::filesystem::path& path, const std::string& provenance) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  write_native(split, out, provenance);
  if (!out) throw Error("write failure on " + path.string());
}

CorpusSplit load_corpus(const std::filesystem::path& path, CorpusFormat format, const DocredOptions& docred) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open corpus file " + path.string());
  if (format == CorpusFormat::kDocred) return read_docred(in, docred, path.string());
  return read_native(in, path.string());
}

// ---------------------------------------------------------------------------
// DocRED format

RelationSchema load_schema_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open schema file " + path.string());
  nlohmann::ordered_json value;
  try {
    value = nlohmann::ordered_json::parse(in);
  } catch (const nlohmann::ordered_json::parse_error& e) {
    throw Error(path.string() + ": parse failure: " + e.what());
  }
  std::vector<std::string> ids;
  if (value.is_array()) {
    ids = value.get<std::vector<std::string>>();
  } else if (value.is_object()) {
    const bool indexed = !value.empty() && value.begin()->is_number_integer();
    if (indexed) {
      // rel2id style: {"Na": 0, "P1376": 1, ...}
      std::map<int, std::string> by_index;
      for (auto it = value.begin(); it != value.end(); ++it) {
        if (it.key() == "Na" || it.key() == "NA") continue;
        by_index[it.value().get<int>()] = it.key();
      }
      for (auto& [index, id] : by_index) ids.push_back(id);
    } else {
      for (auto it = value.begin(); it != value.end(); ++it) ids.push_back(it.key());
    }
  } else {
    throw Error(path.string() + ": schema must be a JSON array or object");
  }
  return RelationSchema(std::move(ids));
}

CorpusSplit read_docred(std::istream& in, const DocredOptions& options, const std::string& source) {
  json root;
  try {
    root = json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(source + ": parse failure: " + e.what());
  }
  if (!root.is_array()) throw Error(source + ": DocRED file must be a JSON array of documents");

  RelationSchema schema;
  if (options.schema) {
    schema = *options.schema;
  } else {
    std::set<std::string> ids;
    for (const json& doc : root)
      if (doc.is_object() && doc.contains("labels"))
        for (const json& label : doc["labels"])
          if (label.contains("r") && label["r"].is_string()) ids.insert(label["r"].get<std::string>());
    schema = RelationSchema(std::vector<std::string>(ids.begin(), ids.end()));
  }

  CorpusSplit split;
  split.kind = options.kind;
  split.schema = schema;
  split.feature_dim = 0;
  std::map<std::string, int> title_uses;
  const bool distant = options.kind == SplitKind::kDistant;

  for (size_t position = 0; position < root.size(); ++position) {
    const json& record = root[position];
    std::string title = "#" + std::to_string(position);
    try {
      if (record.contains("title") && record["title"].is_string()) title = record["title"].get<std::string>();
      Document doc;
      doc.doc_id = title;
      if (title_uses[title]++ > 0) doc.doc_id = title + "#" + std::to_string(position);

      const json& vertex_set = record.at("vertexSet");
      doc.entity_count = static_cast<int>(vertex_set.size());
      for (const json& mentions : vertex_set) {
        std::vector<std::string> names;
        for (const json& mention : mentions) {
          std::string name = mention.at("name").get<std::string>();
          if (std::find(names.begin(), names.end(), name) == names.end()) names.push_back(std::move(name));
        }
        doc.entity_names.push_back(std::move(names));
      }

      std::map<std::pair<int, int>, LabelSet> labels;
      if (record.contains("labels")) {
        for (const json& label : record["labels"]) {
          const int h = label.at("h").get<int>();
          const int t = label.at("t").get<int>();
          const std::string r = label.at("r").get<std::string>();
          if (h < 0 || h >= doc.entity_count || t < 0 || t >= doc.entity_count)
            throw Error("label entity index out of range (h=" + std::to_string(h) + ", t=" + std::to_string(t) + ")");
          if (h == t) throw Error("label with head == tail (" + std::to_string(h) + ")");
          auto index = schema.index_of(r);
          if (!index) throw Error("unknown relation id '" + r + "'");
          labels[{h, t}].insert(*index);
        }
      }

      std::vector<LabelSet> gold;
      for (int h = 0; h < doc.entity_count; ++h) {
        for (int t = 0; t < doc.entity_count; ++t) {
          if (h == t) continue;
          Instance inst;
          inst.head = h;
          inst.tail = t;
          auto it = labels.find({h, t});
          LabelSet set = it == labels.end() ? LabelSet{} : it->second;
          if (distant) {
            inst.ds_labels = std::move(set);
          } else {
            gold.push_back(std::move(set));
          }
          doc.instances.push_back(std::move(inst));
        }
      }
      if (!distant) doc.gold_labels = std::move(gold);
      split.documents.push_back(std::move(doc));
    } catch (const json::exception& e) {
      throw Error(source + ": " + doc_context(title) + ": " + e.what());
    } catch (const Error& e) {
      throw Error(source + ": " + doc_context(title) + ": " + e.what());
    }
  }
  ValidationReport report = validate_corpus(split);
  if (!report.valid()) throw Error(source + ": schema violation: " + report.violations.front());
  return split;
}

}  // namespace ems
