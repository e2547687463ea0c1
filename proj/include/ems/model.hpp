// Copyright 2026 The EMS-DocRE Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <type_traits>

#include <Eigen/Core>

#include "ems/labels.hpp"

namespace ems {

template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

/// Linear multi-label scorer. Row N_r of the weight matrix is the TH class.
template <typename Scalar>
struct ModelParams {
  MatrixX<Scalar> weight;
  VectorX<Scalar> bias;

  static ModelParams zeros(int num_classes, int feature_dim) {
    return {MatrixX<Scalar>::Zero(num_classes + 1, feature_dim), VectorX<Scalar>::Zero(num_classes + 1)};
  }

  int num_classes() const { return static_cast<int>(weight.rows()) - 1; }
  int feature_dim() const { return static_cast<int>(weight.cols()); }
  bool all_finite() const { return weight.allFinite() && bias.allFinite(); }
};

using ModelParamsd = ModelParams<double>;

/// Logits O_r for r in R followed by O_TH.
template <typename Scalar, typename Derived>
VectorX<Scalar> forward(const ModelParams<Scalar>& params, const Eigen::MatrixBase<Derived>& features) {
  static_assert(std::is_same_v<Scalar, typename Derived::Scalar>, "forward: scalar type mismatch");
  if (features.size() != params.weight.cols())
    throw Error("forward: feature dimension " + std::to_string(features.size()) + " != model dimension " +
                std::to_string(params.weight.cols()));
  return params.weight * features + params.bias;
}

template <typename Derived>
typename Derived::Scalar threshold_logit(const Eigen::MatrixBase<Derived>& logits) {
  return logits[logits.size() - 1];
}

/// { r : O_r > O_TH }. Ties go to NA.
template <typename Derived>
LabelSet predict_labels(const Eigen::MatrixBase<Derived>& logits) {
  const auto th = threshold_logit(logits);
  std::vector<int> out;
  for (Eigen::Index r = 0; r + 1 < logits.size(); ++r)
    if (logits[r] > th) out.push_back(static_cast<int>(r));
  return LabelSet(std::move(out));
}

/// Softmax over all N_r + 1 logits.
template <typename Derived>
VectorX<typename Derived::Scalar> predict_distribution(const Eigen::MatrixBase<Derived>& logits) {
  using Scalar = typename Derived::Scalar;
  const Scalar shift = logits.maxCoeff();
  VectorX<Scalar> p = (logits.array() - shift).exp().matrix();
  return p / p.sum();
}

/// Self labels y_r = 1(O_r > O_TH), with y_TH = 1 exactly when no class is above TH.
/// Stored with the TH entry in the last slot, matching the logit layout.
using SelfLabels = Eigen::Array<bool, Eigen::Dynamic, 1>;

template <typename Derived>
SelfLabels self_labels(const Eigen::MatrixBase<Derived>& logits) {
  const Eigen::Index n = logits.size();
  SelfLabels y(n);
  const auto th = threshold_logit(logits);
  bool any = false;
  for (Eigen::Index r = 0; r + 1 < n; ++r) {
    y[r] = logits[r] > th;
    any = any || y[r];
  }
  y[n - 1] = !any;
  return y;
}

// Checkpoint: "EMSCKPT1" magic, u32 version, u32 num_classes, u32 feature_dim,
// then (N_r+1)*d row-major f64 weights and N_r+1 f64 biases, little-endian.
void write_checkpoint(const ModelParamsd& params, std::ostream& out);
ModelParamsd read_checkpoint(std::istream& in, const std::string& source = "<stream>");
std::string checkpoint_bytes(const ModelParamsd& params);

/// Writes `path` and the metadata sidecar `path` + ".meta.json".
void save_checkpoint(const ModelParamsd& params, const std::filesystem::path& path, const std::string& metadata_json);
ModelParamsd load_checkpoint(const std::filesystem::path& path);

}  // namespace ems
