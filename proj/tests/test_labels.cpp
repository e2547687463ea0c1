// Copyright 2026 The EMS-DocRE Authors
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ems/labels.hpp"
#include "ems/partition.hpp"
#include "oracle.hpp"

using ems::LabelSet;

namespace {

LabelSet from_mask(unsigned mask, int n) {
  LabelSet out;
  for (int r = 0; r < n; ++r)
    if (oracle::bit(mask, r)) out.insert(r);
  return out;
}

}  // namespace

TEST_CASE("label sets stay sorted and unique") {
  LabelSet s{3, 1, 3, 0};
  CHECK(s.indices() == std::vector<int>{0, 1, 3});
  s.insert(2);
  s.insert(2);
  CHECK(s.size() == 4);
  CHECK(s.contains(2));
  CHECK_FALSE(s.contains(7));
  CHECK(LabelSet{}.empty());
  CHECK(LabelSet::all(3) == LabelSet{0, 1, 2});
  CHECK(s.within(4));
  CHECK_FALSE(s.within(3));
  CHECK(ems::to_string(LabelSet{}) == "{}");
  CHECK(ems::to_string(LabelSet{2, 0}) == "{0,2}");
}

TEST_CASE("set algebra") {
  const LabelSet a{0, 1, 4}, b{1, 2, 4};
  CHECK(ems::intersection(a, b) == LabelSet{1, 4});
  CHECK(ems::set_union(a, b) == LabelSet{0, 1, 2, 4});
  CHECK(ems::difference(a, b) == LabelSet{0});
  CHECK(ems::symmetric_difference(a, b) == LabelSet{0, 2});
}

TEST_CASE("relation schema") {
  const auto schema = ems::RelationSchema::numbered(3);
  CHECK(schema.size() == 3);
  CHECK(schema.threshold_index() == 3);
  CHECK(schema.name(2) == "r2");
  CHECK(schema.index_of("r1") == 1);
  CHECK_FALSE(schema.index_of("P17").has_value());
  CHECK_THROWS_AS(ems::RelationSchema({"a", "a"}), ems::Error);
  CHECK_THROWS_AS(ems::RelationSchema({""}), ems::Error);
}

TEST_CASE("partition examples") {
  const auto p = ems::partition_classes({0, 1}, {1, 2}, 4);
  CHECK(p.agreements == LabelSet{1});
  CHECK(p.recommendations == LabelSet{0, 2});
  CHECK(p.others == LabelSet{3});

  const auto na = ems::partition_classes({}, {}, 3);
  CHECK(na.agreements.empty());
  CHECK(na.recommendations.empty());
  CHECK(na.others == LabelSet{0, 1, 2});

  const auto same = ems::partition_classes({2}, {2}, 3);
  CHECK(same.agreements == LabelSet{2});
  CHECK(same.recommendations.empty());

  const auto gold = ems::annotated_partition({0, 2}, 3);
  CHECK(gold.agreements == LabelSet{0, 2});
  CHECK(gold.recommendations.empty());
  CHECK(gold.others == LabelSet{1});

  CHECK_THROWS_AS(ems::partition_classes({5}, {}, 3), ems::Error);
}

TEST_CASE("partition matches the bitmask oracle on every pair at four classes") {
  constexpr int n = 4;
  int checked = 0;
  for (unsigned ds = 0; ds < 16; ++ds) {
    for (unsigned ex = 0; ex < 16; ++ex) {
      const auto expect = oracle::group(ds, ex, n);
      const auto got = ems::partition_classes(from_mask(ds, n), from_mask(ex, n), n);
      CHECK(got.agreements == from_mask(expect.agg, n));
      CHECK(got.recommendations == from_mask(expect.rec, n));
      CHECK(got.others == from_mask(expect.oth, n));
      CHECK(ems::is_valid_partition(got, n));
      ++checked;
    }
  }
  CHECK(checked == 256);
}

TEST_CASE("invalid partitions are detected") {
  ems::ClassPartition overlap{{0}, {0}, {1}};
  CHECK_FALSE(ems::is_valid_partition(overlap, 2));
  ems::ClassPartition missing{{0}, {}, {}};
  CHECK_FALSE(ems::is_valid_partition(missing, 2));
}
