// Copyright 2026 The EMS-DocRE Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <initializer_list>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace ems {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Ordered relation classes R. NA is the empty label set and the threshold
/// class TH lives in the extra logit slot at index size().
class RelationSchema {
 public:
  RelationSchema() = default;
  explicit RelationSchema(std::vector<std::string> classes);

  /// Classes named "r0" .. "r{n-1}".
  static RelationSchema numbered(int num_classes);

  int size() const { return static_cast<int>(classes_.size()); }
  int threshold_index() const { return size(); }
  const std::string& name(int index) const { return classes_.at(static_cast<size_t>(index)); }
  const std::vector<std::string>& classes() const { return classes_; }
  std::optional<int> index_of(std::string_view name) const;

  bool operator==(const RelationSchema& other) const { return classes_ == other.classes_; }

 private:
  std::vector<std::string> classes_;
  std::unordered_map<std::string, int> index_;
};

/// A set of class indices kept sorted and unique. Empty means NA.
class LabelSet {
 public:
  LabelSet() = default;
  LabelSet(std::initializer_list<int> indices);
  explicit LabelSet(std::vector<int> indices);

  /// All classes 0 .. num_classes-1.
  static LabelSet all(int num_classes);

  bool contains(int index) const;
  void insert(int index);
  bool empty() const { return indices_.empty(); }
  int size() const { return static_cast<int>(indices_.size()); }
  const std::vector<int>& indices() const { return indices_; }
  auto begin() const { return indices_.begin(); }
  auto end() const { return indices_.end(); }

  /// True when every index is in [0, num_classes).
  bool within(int num_classes) const;

  bool operator==(const LabelSet& other) const = default;

 private:
  std::vector<int> indices_;
};

LabelSet intersection(const LabelSet& a, const LabelSet& b);
LabelSet set_union(const LabelSet& a, const LabelSet& b);
LabelSet difference(const LabelSet& a, const LabelSet& b);
LabelSet symmetric_difference(const LabelSet& a, const LabelSet& b);

std::string to_string(const LabelSet& labels);

}  // namespace ems
