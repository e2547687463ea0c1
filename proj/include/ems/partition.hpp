// Copyright 2026 The EMS-DocRE Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "ems/labels.hpp"

namespace ems {

/// Per-instance split of R by consistency between two label sources.
struct ClassPartition {
  LabelSet agreements;
  LabelSet recommendations;
  LabelSet others;

  bool operator==(const ClassPartition& other) const = default;
};

/// Agg = ds ∩ ex, Rec = ds △ ex, Oth = R \ (ds ∪ ex).
ClassPartition partition_classes(const LabelSet& ds, const LabelSet& ex, int num_classes);

/// Human-annotated instances have a single trusted source: Agg = gold, Rec = ∅.
ClassPartition annotated_partition(const LabelSet& gold, int num_classes);

/// Disjoint and covering {0, ..., num_classes-1}.
bool is_valid_partition(const ClassPartition& part, int num_classes);

}  // namespace ems
