// Copyright 2026 The EMS-DocRE Authors
// SPDX-License-Identifier: Apache-2.0

#include "ems/partition.hpp"

namespace ems {

ClassPartition partition_classes(const LabelSet& ds, const LabelSet& ex, int num_classes) {
  if (!ds.within(num_classes)) throw Error("partition_classes: DS label outside schema: " + to_string(ds));
  if (!ex.within(num_classes)) throw Error("partition_classes: expert label outside schema: " + to_string(ex));
  ClassPartition part;
  part.agreements = intersection(ds, ex);
  part.recommendations = symmetric_difference(ds, ex);
  part.others = difference(LabelSet::all(num_classes), set_union(ds, ex));
  return part;
}

ClassPartition annotated_partition(const LabelSet& gold, int num_classes) {
  return partition_classes(gold, gold, num_classes);
}

bool is_valid_partition(const ClassPartition& part, int num_classes) {
  if (!part.agreements.within(num_classes) || !part.recommendations.within(num_classes) ||
      !part.others.within(num_classes))
    return false;
  if (!intersection(part.agreements, part.recommendations).empty()) return false;
  if (!intersection(part.agreements, part.others).empty()) return false;
  if (!intersection(part.recommendations, part.others).empty()) return false;
  return part.agreements.size() + part.recommendations.size() + part.others.size() == num_classes;
}

}  // namespace ems
