// Copyright 2026 The EMS-DocRE Authors
// SPDX-License-Identifier: Apache-2.0

#include "ems/labels.hpp"

#include <algorithm>
#include <iterator>

namespace ems {

RelationSchema::RelationSchema(std::vector<std::string> classes) : classes_(std::move(classes)) {
  for (int i = 0; i < size(); ++i) {
    const std::string& name = classes_[static_cast<size_t>(i)];
    if (name.empty()) throw Error("relation schema: empty class identifier at index " + std::to_string(i));
    if (!index_.emplace(name, i).second) throw Error("relation schema: duplicate class identifier '" + name + "'");
  }
}

RelationSchema RelationSchema::numbered(int num_classes) {
  if (num_classes <= 0) throw Error("relation schema: class count must be positive");
  std::vector<std::string> names;
  names.reserve(static_cast<size_t>(num_classes));
  for (int i = 0; i < num_classes; ++i) names.push_back("r" + std::to_string(i));
  return RelationSchema(std::move(names));
}

std::optional<int> RelationSchema::index_of(std::string_view name) const {
  auto it = index_.find(std::string(name));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

LabelSet::LabelSet(std::initializer_list<int> indices) : LabelSet(std::vector<int>(indices)) {}

LabelSet::LabelSet(std::vector<int> indices) : indices_(std::move(indices)) {
  std::sort(indices_.begin(), indices_.end());
  indices_.erase(std::unique(indices_.begin(), indices_.end()), indices_.end());
}

LabelSet LabelSet::all(int num_classes) {
  LabelSet out;
  out.indices_.reserve(static_cast<size_t>(std::max(num_classes, 0)));
  for (int i = 0; i < num_classes; ++i) out.indices_.push_back(i);
  return out;
}

bool LabelSet::contains(int index) const {
  return std::binary_search(indices_.begin(), indices_.end(), index);
}

void LabelSet::insert(int index) {
  auto it = std::lower_bound(indices_.begin(), indices_.end(), index);
  if (it == indices_.end() || *it != index) indices_.insert(it, index);
}

bool LabelSet::within(int num_classes) const {
  return indices_.empty() || (indices_.front() >= 0 && indices_.back() < num_classes);
}

namespace {

template <typename Op>
LabelSet combine(const LabelSet& a, const LabelSet& b, Op op) {
  std::vector<int> out;
  op(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return LabelSet(std::move(out));
}

}  // namespace

LabelSet intersection(const LabelSet& a, const LabelSet& b) {
  return combine(a, b, [](auto... args) { return std::set_intersection(args...); });
}

LabelSet set_union(const LabelSet& a, const LabelSet& b) {
  return combine(a, b, [](auto... args) { return std::set_union(args...); });
}

LabelSet difference(const LabelSet& a, const LabelSet& b) {
  return combine(a, b, [](auto... args) { return std::set_difference(args...); });
}

LabelSet symmetric_difference(const LabelSet& a, const LabelSet& b) {
  return combine(a, b, [](auto... args) { return std::set_symmetric_difference(args...); });
}

std::string to_string(const LabelSet& labels) {
  std::string out = "{";
  for (int index : labels) {
    if (out.size() > 1) out += ",";
    out += std::to_string(index);
  }
  return out + "}";
}

}  // namespace ems
