// Copyright 2026 The EMS-DocRE Authors
// SPDX-License-Identifier: Apache-2.0

// Runs against a local DocRED checkout when EMS_DOCRED_DIR points at a
// directory with train_annotated.json, dev.json and rel_info.json.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>

#include "ems/corpus.hpp"
#include "ems/metrics.hpp"

namespace fs = std::filesystem;

TEST_CASE("DocRED release files") {
  const char* dir = std::getenv("EMS_DOCRED_DIR");
  if (!dir || !*dir) {
    MESSAGE("EMS_DOCRED_DIR not set; skipping");
    return;
  }
  const fs::path root(dir);
  const auto schema = ems::load_schema_file(root / "rel_info.json");
  CHECK(schema.size() == 96);

  ems::DocredOptions options;
  options.kind = ems::SplitKind::kAnnotatedTrain;
  options.schema = schema;
  const auto train = ems::load_corpus(root / "train_annotated.json", ems::CorpusFormat::kDocred, options);
  CHECK(train.documents.size() == 3053);
  const auto report = ems::validate_corpus(train);
  CHECK(report.valid());
  CHECK(report.distinct_gold_classes() == 96);
  CHECK(ems::train_fact_projections(train).size() > 0);

  if (fs::exists(root / "dev.json")) {
    options.kind = ems::SplitKind::kDev;
    CHECK(ems::load_corpus(root / "dev.json", ems::CorpusFormat::kDocred, options).documents.size() == 1000);
  }
}
