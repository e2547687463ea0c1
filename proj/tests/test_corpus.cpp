// Copyright 2026 The EMS-DocRE Authors
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <sstream>

#include "ems/corpus.hpp"

namespace fs = std::filesystem;

namespace {

const fs::path kData = EMS_TEST_DATA;

ems::SynthConfig small_config() {
  ems::SynthConfig c;
  c.num_classes = 6;
  c.feature_dim = 8;
  c.annotated_docs = 20;
  c.ds_docs = 60;
  c.dev_docs = 10;
  c.test_docs = 10;
  return c;
}

ems::Instance make_instance(int h, int t, int dim) {
  ems::Instance inst;
  inst.head = h;
  inst.tail = t;
  inst.features = Eigen::VectorXd::Zero(dim);
  return inst;
}

}  // namespace

TEST_CASE("split names round trip") {
  for (auto kind : {ems::SplitKind::kAnnotatedTrain, ems::SplitKind::kDistant, ems::SplitKind::kDev,
                    ems::SplitKind::kTest})
    CHECK(ems::parse_split_kind(ems::to_string(kind)) == kind);
  CHECK_THROWS_AS(ems::parse_split_kind("train"), ems::Error);
}

TEST_CASE("generator is deterministic in its seed") {
  const auto a = ems::generate_synthetic(small_config());
  const auto b = ems::generate_synthetic(small_config());
  CHECK(ems::to_native_string(a.ds) == ems::to_native_string(b.ds));
  CHECK(ems::to_native_string(a.annotated_train) == ems::to_native_string(b.annotated_train));
  CHECK(a.prototypes == b.prototypes);

  auto other = small_config();
  other.seed = 2;
  CHECK(ems::to_native_string(ems::generate_synthetic(other).ds) != ems::to_native_string(a.ds));
}

TEST_CASE("generated splits are valid and shaped by the config") {
  const auto corpus = ems::generate_synthetic(small_config());
  CHECK(corpus.annotated_train.documents.size() == 20);
  CHECK(corpus.ds.documents.size() == 60);
  CHECK(corpus.dev.documents.size() == 10);
  CHECK(corpus.test.documents.size() == 10);
  CHECK(corpus.prototypes.rows() == 6);
  CHECK(corpus.prototypes.cols() == 8);
  CHECK(corpus.class_prior.sum() == doctest::Approx(1.0));
  for (const auto* split : {&corpus.annotated_train, &corpus.ds, &corpus.dev, &corpus.test}) {
    const auto report = ems::validate_corpus(*split);
    CHECK(report.valid());
    CHECK(split->feature_dim == 8);
    for (const auto& doc : split->documents) {
      CHECK(doc.instances.size() >= 2);
      CHECK(doc.instances.size() <= 20);
      CHECK(static_cast<int>(doc.entity_names.size()) == doc.entity_count);
    }
  }
  // Zipfian prior: class 0 is the most frequent.
  for (int r = 1; r < 6; ++r) CHECK(corpus.class_prior[0] > corpus.class_prior[r]);
}

TEST_CASE("noiseless distant labels equal gold") {
  auto c = small_config();
  c.p_fp = 0.0;
  c.p_fn = 0.0;
  const auto corpus = ems::generate_synthetic(c);
  for (const auto& doc : corpus.ds.documents)
    for (size_t i = 0; i < doc.instances.size(); ++i) CHECK(doc.instances[i].ds_labels == (*doc.gold_labels)[i]);
}

TEST_CASE("false negative rate matches p_fn") {
  auto c = small_config();
  c.ds_docs = 3000;
  c.p_fp = 0.0;
  c.p_fn = 0.3;
  const auto corpus = ems::generate_synthetic(c);
  size_t gold = 0, dropped = 0;
  for (const auto& doc : corpus.ds.documents) {
    for (size_t i = 0; i < doc.instances.size(); ++i) {
      for (int r : (*doc.gold_labels)[i]) {
        ++gold;
        if (!doc.instances[i].ds_labels.contains(r)) ++dropped;
      }
    }
  }
  REQUIRE(gold > 5000);
  CHECK(std::abs(static_cast<double>(dropped) / static_cast<double>(gold) - 0.3) < 0.02);
}

TEST_CASE("bad generator configs are rejected") {
  auto c = small_config();
  c.p_fn = 1.5;
  CHECK_THROWS_AS(ems::generate_synthetic(c), ems::Error);
  c = small_config();
  c.min_instances = 30;
  CHECK_THROWS_AS(ems::generate_synthetic(c), ems::Error);
}

TEST_CASE("native format round trips") {
  const auto corpus = ems::generate_synthetic(small_config());
  for (const auto* split : {&corpus.annotated_train, &corpus.ds}) {
    std::stringstream buffer;
    ems::write_native(*split, buffer, "unit test");
    const auto back = ems::read_native(buffer);
    CHECK(back == *split);
    CHECK(ems::to_native_string(back) == ems::to_native_string(*split));
  }

  const fs::path path = fs::temp_directory_path() / "ems_corpus_roundtrip.jsonl";
  ems::save_corpus(corpus.dev, path);
  CHECK(ems::load_corpus(path) == corpus.dev);
  fs::remove(path);
}

TEST_CASE("empty corpus round trips") {
  ems::CorpusSplit empty;
  empty.kind = ems::SplitKind::kDistant;
  empty.schema = ems::RelationSchema::numbered(3);
  empty.feature_dim = 4;
  std::stringstream buffer;
  ems::write_native(empty, buffer);
  CHECK(ems::read_native(buffer) == empty);
}

TEST_CASE("empty file is an error") {
  std::stringstream nothing;
  CHECK_THROWS_WITH_AS(ems::read_native(nothing, "empty.jsonl"), doctest::Contains("empty file"), ems::Error);
}

TEST_CASE("head equal to tail is a schema violation") {
  ems::CorpusSplit split;
  split.kind = ems::SplitKind::kDistant;
  split.schema = ems::RelationSchema::numbered(2);
  split.feature_dim = 2;
  ems::Document doc;
  doc.doc_id = "d0";
  doc.entity_count = 3;
  doc.instances = {make_instance(0, 1, 2), make_instance(1, 1, 2)};
  split.documents.push_back(doc);
  const auto report = ems::validate_corpus(split);
  REQUIRE_FALSE(report.valid());
  CHECK(report.violations.front().find("head equals tail") != std::string::npos);
  CHECK(report.violations.front().find("d0") != std::string::npos);

  std::stringstream buffer;
  ems::write_native(split, buffer);
  CHECK_THROWS_WITH_AS(ems::read_native(buffer), doctest::Contains("head equals tail"), ems::Error);
}

TEST_CASE("violations are reported") {
  ems::CorpusSplit split;
  split.kind = ems::SplitKind::kDev;
  split.schema = ems::RelationSchema::numbered(2);
  split.feature_dim = 2;
  ems::Document doc;
  doc.doc_id = "d1";
  doc.entity_count = 2;
  doc.instances = {make_instance(0, 5, 2)};
  doc.gold_labels = std::vector<ems::LabelSet>{ems::LabelSet{7}};
  split.documents = {doc, doc};
  const auto report = ems::validate_corpus(split);
  auto mentions = [&](const std::string& what, const ems::ValidationReport* other = nullptr) {
    for (const auto& v : (other ? *other : report).violations)
      if (v.find(what) != std::string::npos) return true;
    return false;
  };
  CHECK(mentions("out of range"));
  CHECK(mentions("gold label outside schema"));
  CHECK(mentions("duplicate doc_id"));
  CHECK_THROWS_AS(ems::require_valid(split), ems::Error);

  split.documents.resize(1);
  split.documents[0].instances[0] = make_instance(0, 1, 3);
  split.documents[0].gold_labels = std::vector<ems::LabelSet>{{}};
  CHECK(ems::validate_corpus(split).violations.front().find("feature dimension") != std::string::npos);
  split.documents[0].gold_labels.reset();
  const auto missing = ems::validate_corpus(split);
  CHECK(mentions("missing gold labels", &missing));
}

TEST_CASE("DocRED fixture") {
  const auto schema = ems::load_schema_file(kData / "rel_info.json");
  CHECK(schema.classes() == std::vector<std::string>{"P17", "P131", "P50", "P27"});

  ems::DocredOptions options;
  options.kind = ems::SplitKind::kAnnotatedTrain;
  options.schema = schema;
  const auto split = ems::load_corpus(kData / "docred_mini.json", ems::CorpusFormat::kDocred, options);
  REQUIRE(split.documents.size() == 3);
  CHECK(split.feature_dim == 0);
  const auto& first = split.documents[0];
  CHECK(first.doc_id == "Skaftafell");
  CHECK(first.entity_count == 3);
  CHECK(first.instances.size() == 6);
  CHECK(first.entity_names[1] == std::vector<std::string>{"Iceland", "Republic of Iceland"});
  // Instances enumerate (h, t) in row-major order: (0,1) (0,2) (1,0) (1,2) (2,0) (2,1).
  const auto& gold = *first.gold_labels;
  CHECK(gold[0] == ems::LabelSet{0});
  CHECK(gold[1] == ems::LabelSet{1});
  CHECK(gold[5] == ems::LabelSet{0});
  CHECK(gold[2].empty());
  CHECK(split.documents[1].doc_id == "Lark Rise");
  CHECK(split.documents[2].doc_id == "Lark Rise#2");
  CHECK((*split.documents[1].gold_labels)[1] == ems::LabelSet{2});

  const auto report = ems::validate_corpus(split);
  CHECK(report.instances == 10);
  CHECK(report.na_instances == 6);
  CHECK(report.distinct_gold_classes() == 3);
}

TEST_CASE("DocRED distant file carries distant labels") {
  ems::DocredOptions options;
  options.kind = ems::SplitKind::kDistant;
  const auto split = ems::load_corpus(kData / "docred_mini.json", ems::CorpusFormat::kDocred, options);
  CHECK(split.schema.classes() == std::vector<std::string>{"P131", "P17", "P50"});
  CHECK_FALSE(split.documents[0].gold_labels.has_value());
  CHECK(split.documents[0].instances[0].ds_labels == ems::LabelSet{1});
}

TEST_CASE("DocRED errors name the document") {
  ems::DocredOptions options;
  CHECK_THROWS_WITH_AS(ems::load_corpus(kData / "docred_bad_head.json", ems::CorpusFormat::kDocred, options),
                       doctest::Contains("Broken"), ems::Error);
  CHECK_THROWS_WITH_AS(ems::load_corpus(kData / "docred_bad_head.json", ems::CorpusFormat::kDocred, options),
                       doctest::Contains("head == tail"), ems::Error);
  CHECK_THROWS_WITH_AS(ems::load_corpus(kData / "docred_bad_index.json", ems::CorpusFormat::kDocred, options),
                       doctest::Contains("out of range"), ems::Error);

  ems::DocredOptions narrow;
  narrow.schema = ems::RelationSchema({"P50"});
  CHECK_THROWS_WITH_AS(ems::load_corpus(kData / "docred_mini.json", ems::CorpusFormat::kDocred, narrow),
                       doctest::Contains("unknown relation id 'P17'"), ems::Error);
}

TEST_CASE("missing files are errors") {
  CHECK_THROWS_AS(ems::load_corpus(kData / "does_not_exist.jsonl"), ems::Error);
}
