// Copyright 2026 The EMS-DocRE Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <limits>
#include <vector>

#include <Eigen/Core>

#include "ems/model.hpp"
#include "ems/partition.hpp"

namespace ems {

struct LossConfig {
  double gamma_a = 1.0;
  double gamma_b = 0.9;
  bool self_supervision = true;
  /// All weights exactly 1; the loss reduces to adaptive thresholding.
  bool plain_mode = false;

  void validate() const {
    if (!(gamma_a >= 0) || !(gamma_b >= 0)) throw Error("loss config: gamma_a and gamma_b must be >= 0");
    if (!plain_mode && (gamma_a <= 0 || gamma_b <= 0))
      throw Error("loss config: gamma_a and gamma_b must be > 0 unless plain_mode is set");
  }
};

/// P^a (support Agg) and P^b (support Rec ∪ {TH}), both laid out like the logits.
template <typename Scalar>
struct PartitionedProbabilities {
  VectorX<Scalar> agreement;
  VectorX<Scalar> remaining;
};

template <typename Scalar>
struct ClassWeights {
  VectorX<Scalar> agreement;
  VectorX<Scalar> remaining;
};

template <typename Scalar>
struct LossOutput {
  Scalar loss = 0;
  /// -Σ_{Agg} log(w^a P^a)
  Scalar agreement_term = 0;
  /// -Σ_{Rec ∪ TH} log(w^b P^b)
  Scalar remaining_term = 0;
  VectorX<Scalar> p_a;
  VectorX<Scalar> p_b;
  VectorX<Scalar> w_a;
  VectorX<Scalar> w_b;
  /// dL/dO with weights and self labels held constant.
  VectorX<Scalar> gradient;
};

namespace detail {

// Max-shifted softmax restricted to a support list.
template <typename Scalar>
struct RestrictedSoftmax {
  Scalar shift = -std::numeric_limits<Scalar>::infinity();
  Scalar log_normalizer = 0;

  template <typename Derived>
  RestrictedSoftmax(const Eigen::MatrixBase<Derived>& logits, const std::vector<int>& support) {
    for (int s : support) shift = std::max(shift, logits[s]);
    Scalar z = 0;
    for (int s : support) z += std::exp(logits[s] - shift);
    log_normalizer = std::log(z);
  }

  template <typename Derived>
  Scalar log_prob(const Eigen::MatrixBase<Derived>& logits, int index) const {
    return logits[index] - shift - log_normalizer;
  }
};

// Agg ∪ {TH} in ascending order.
inline std::vector<int> agreement_support(const ClassPartition& part, int threshold) {
  std::vector<int> out(part.agreements.begin(), part.agreements.end());
  out.push_back(threshold);
  return out;
}

// Rec ∪ Oth ∪ {TH} in ascending order, i.e. everything outside Agg.
inline std::vector<int> remaining_support(const ClassPartition& part, int threshold) {
  std::vector<int> out;
  out.reserve(static_cast<size_t>(threshold + 1 - part.agreements.size()));
  for (int r = 0; r < threshold; ++r)
    if (!part.agreements.contains(r)) out.push_back(r);
  out.push_back(threshold);
  return out;
}

inline std::vector<int> recommendation_targets(const ClassPartition& part, int threshold) {
  std::vector<int> out(part.recommendations.begin(), part.recommendations.end());
  out.push_back(threshold);
  return out;
}

template <typename Derived>
void check_partition(const Eigen::MatrixBase<Derived>& logits, const ClassPartition& part) {
  const int num_classes = static_cast<int>(logits.size()) - 1;
  if (num_classes < 1) throw Error("msrl: logit vector needs at least one class plus TH");
  if (!is_valid_partition(part, num_classes)) throw Error("msrl: partition does not cover R exactly");
}

}  // namespace detail

template <typename Derived>
PartitionedProbabilities<typename Derived::Scalar> partition_probabilities(const Eigen::MatrixBase<Derived>& logits,
                                                                           const ClassPartition& part) {
  using Scalar = typename Derived::Scalar;
  detail::check_partition(logits, part);
  const int th = static_cast<int>(logits.size()) - 1;
  const detail::RestrictedSoftmax<Scalar> first(logits, detail::agreement_support(part, th));
  const detail::RestrictedSoftmax<Scalar> second(logits, detail::remaining_support(part, th));
  PartitionedProbabilities<Scalar> out{VectorX<Scalar>::Zero(logits.size()), VectorX<Scalar>::Zero(logits.size())};
  for (int r : part.agreements) out.agreement[r] = std::exp(first.log_prob(logits, r));
  for (int r : detail::recommendation_targets(part, th)) out.remaining[r] = std::exp(second.log_prob(logits, r));
  return out;
}

/// w^a_r = γ_a + (1 − y_r)(1 − P^a_r) on Agg; w^b_r = γ_b + y_r P^b_r on Rec ∪ {TH}.
/// Zero outside each support.
template <typename Scalar>
ClassWeights<Scalar> msrl_weights(const PartitionedProbabilities<Scalar>& probs, const SelfLabels& self,
                                  const ClassPartition& part, const LossConfig& config) {
  const Eigen::Index n = probs.agreement.size();
  const int th = static_cast<int>(n) - 1;
  ClassWeights<Scalar> w{VectorX<Scalar>::Zero(n), VectorX<Scalar>::Zero(n)};
  const bool variable = config.self_supervision && !config.plain_mode;
  const Scalar gamma_a = config.plain_mode ? Scalar(1) : Scalar(config.gamma_a);
  const Scalar gamma_b = config.plain_mode ? Scalar(1) : Scalar(config.gamma_b);
  for (int r : part.agreements) {
    w.agreement[r] = gamma_a;
    if (variable && !self[r]) w.agreement[r] += Scalar(1) - probs.agreement[r];
  }
  for (int r : detail::recommendation_targets(part, th)) {
    w.remaining[r] = gamma_b;
    if (variable && self[r]) w.remaining[r] += probs.remaining[r];
  }
  return w;
}

/// L = −Σ_{Agg} log(w^a P^a) − Σ_{Rec ∪ TH} log(w^b P^b) for one instance.
template <typename Derived>
LossOutput<typename Derived::Scalar> msrl_loss(const Eigen::MatrixBase<Derived>& logits, const ClassPartition& part,
                                               const LossConfig& config) {
  using Scalar = typename Derived::Scalar;
  config.validate();
  detail::check_partition(logits, part);
  const Eigen::Index n = logits.size();
  const int th = static_cast<int>(n) - 1;

  const std::vector<int> first_support = detail::agreement_support(part, th);
  const std::vector<int> second_support = detail::remaining_support(part, th);
  const std::vector<int> second_targets = detail::recommendation_targets(part, th);
  const detail::RestrictedSoftmax<Scalar> first(logits, first_support);
  const detail::RestrictedSoftmax<Scalar> second(logits, second_support);

  LossOutput<Scalar> out;
  out.p_a = VectorX<Scalar>::Zero(n);
  out.p_b = VectorX<Scalar>::Zero(n);
  for (int r : part.agreements) out.p_a[r] = std::exp(first.log_prob(logits, r));
  for (int r : second_targets) out.p_b[r] = std::exp(second.log_prob(logits, r));

  const ClassWeights<Scalar> w =
      msrl_weights(PartitionedProbabilities<Scalar>{out.p_a, out.p_b}, self_labels(logits), part, config);
  out.w_a = w.agreement;
  out.w_b = w.remaining;

  for (int r : part.agreements) out.agreement_term += -std::log(out.w_a[r]) - first.log_prob(logits, r);
  for (int r : second_targets) out.remaining_term += -std::log(out.w_b[r]) - second.log_prob(logits, r);
  out.loss = out.agreement_term + out.remaining_term;

  out.gradient = VectorX<Scalar>::Zero(n);
  const Scalar first_count = static_cast<Scalar>(part.agreements.size());
  if (!part.agreements.empty())
    for (int s : first_support) out.gradient[s] += first_count * std::exp(first.log_prob(logits, s));
  for (int r : part.agreements) out.gradient[r] -= Scalar(1);
  const Scalar second_count = static_cast<Scalar>(second_targets.size());
  for (int s : second_support) out.gradient[s] += second_count * std::exp(second.log_prob(logits, s));
  for (int r : second_targets) out.gradient[r] -= Scalar(1);
  return out;
}

/// Adaptive-thresholding loss: positives ranked above TH, TH above negatives.
template <typename Derived>
LossOutput<typename Derived::Scalar> atl_loss(const Eigen::MatrixBase<Derived>& logits, const LabelSet& positives) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index n = logits.size();
  const int th = static_cast<int>(n) - 1;
  if (th < 1) throw Error("atl: logit vector needs at least one class plus TH");
  if (!positives.within(th)) throw Error("atl: positive label outside schema");

  std::vector<int> positive_support(positives.begin(), positives.end());
  positive_support.push_back(th);
  std::vector<int> negative_support;
  for (int r = 0; r < th; ++r)
    if (!positives.contains(r)) negative_support.push_back(r);
  negative_support.push_back(th);
  const detail::RestrictedSoftmax<Scalar> first(logits, positive_support);
  const detail::RestrictedSoftmax<Scalar> second(logits, negative_support);

  LossOutput<Scalar> out;
  out.p_a = VectorX<Scalar>::Zero(n);
  out.p_b = VectorX<Scalar>::Zero(n);
  out.w_a = VectorX<Scalar>::Zero(n);
  out.w_b = VectorX<Scalar>::Zero(n);
  for (int r : positives) {
    out.p_a[r] = std::exp(first.log_prob(logits, r));
    out.w_a[r] = 1;
    out.agreement_term += -first.log_prob(logits, r);
  }
  out.p_b[th] = std::exp(second.log_prob(logits, th));
  out.w_b[th] = 1;
  out.remaining_term = -second.log_prob(logits, th);
  out.loss = out.agreement_term + out.remaining_term;

  out.gradient = VectorX<Scalar>::Zero(n);
  if (!positives.empty()) {
    const Scalar count = static_cast<Scalar>(positives.size());
    for (int s : positive_support) out.gradient[s] += count * std::exp(first.log_prob(logits, s));
    for (int r : positives) out.gradient[r] -= Scalar(1);
  }
  for (int s : negative_support) out.gradient[s] += std::exp(second.log_prob(logits, s));
  out.gradient[th] -= Scalar(1);
  return out;
}

}  // namespace ems
