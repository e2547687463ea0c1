// Copyright 2026 The EMS-DocRE Authors
// SPDX-License-Identifier: Apache-2.0

// Reference implementations for the tests, written against plain std::vector
// and bitmasks without calling into the library.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace oracle {

using Vec = std::vector<double>;

inline bool bit(unsigned mask, int r) { return (mask >> r) & 1u; }

struct Groups {
  unsigned agg = 0;
  unsigned rec = 0;
  unsigned oth = 0;
};

inline Groups group(unsigned ds, unsigned ex, int n) {
  const unsigned full = (1u << n) - 1u;
  return {ds & ex, (ds ^ ex) & full, ~(ds | ex) & full};
}

// Scalar evaluation of the multi-supervision loss. `logits` has n+1 entries,
// the threshold last. Weights are computed from the same logits unless
// `frozen` supplies them (index r for agreements, n for TH, rest for Rec).
struct ScalarLoss {
  double loss = 0;
  double agreement_term = 0;
  double remaining_term = 0;
  Vec p_a, p_b, w_a, w_b;
  double z_a = 0, z_b = 0;
};

struct Weighting {
  double gamma_a = 1.0;
  double gamma_b = 0.9;
  bool self = true;
  bool plain = false;
};

inline ScalarLoss scalar_loss(const Vec& o, unsigned agg, unsigned rec, const Weighting& cfg,
                              const ScalarLoss* frozen = nullptr) {
  const int n = static_cast<int>(o.size()) - 1;
  ScalarLoss out;
  out.p_a.assign(n + 1, 0.0);
  out.p_b.assign(n + 1, 0.0);
  out.w_a.assign(n + 1, 0.0);
  out.w_b.assign(n + 1, 0.0);
  out.z_a = std::exp(o[n]);
  for (int r = 0; r < n; ++r)
    if (bit(agg, r)) out.z_a += std::exp(o[r]);
  out.z_b = std::exp(o[n]);
  for (int r = 0; r < n; ++r)
    if (!bit(agg, r)) out.z_b += std::exp(o[r]);

  bool any_above = false;
  for (int r = 0; r < n; ++r) any_above = any_above || o[r] > o[n];
  auto positive = [&](int r) { return r < n ? o[r] > o[n] : !any_above; };
  const double ga = cfg.plain ? 1.0 : cfg.gamma_a;
  const double gb = cfg.plain ? 1.0 : cfg.gamma_b;
  const bool variable = cfg.self && !cfg.plain;
  for (int r = 0; r <= n; ++r) {
    const bool in_a = r < n && bit(agg, r);
    const bool in_b = r == n || bit(rec, r);
    if (in_a) {
      out.p_a[r] = std::exp(o[r]) / out.z_a;
      out.w_a[r] = frozen ? frozen->w_a[r] : ga + (variable && !positive(r) ? 1.0 - out.p_a[r] : 0.0);
      out.agreement_term -= std::log(out.w_a[r] * out.p_a[r]);
    }
    if (in_b) {
      out.p_b[r] = std::exp(o[r]) / out.z_b;
      out.w_b[r] = frozen ? frozen->w_b[r] : gb + (variable && positive(r) ? out.p_b[r] : 0.0);
      out.remaining_term -= std::log(out.w_b[r] * out.p_b[r]);
    }
  }
  out.loss = out.agreement_term + out.remaining_term;
  return out;
}

// Central finite differences of the loss with weights frozen at `base`.
inline Vec finite_difference(const Vec& o, unsigned agg, unsigned rec, const Weighting& cfg, const ScalarLoss& base,
                             double h) {
  Vec g(o.size());
  for (size_t s = 0; s < o.size(); ++s) {
    Vec plus = o, minus = o;
    plus[s] += h;
    minus[s] -= h;
    g[s] = (scalar_loss(plus, agg, rec, cfg, &base).loss - scalar_loss(minus, agg, rec, cfg, &base).loss) / (2 * h);
  }
  return g;
}

// Adaptive thresholding loss straight from its definition.
inline double scalar_atl(const Vec& o, unsigned positives) {
  const int n = static_cast<int>(o.size()) - 1;
  double zp = std::exp(o[n]), zn = std::exp(o[n]);
  for (int r = 0; r < n; ++r) (bit(positives, r) ? zp : zn) += std::exp(o[r]);
  double loss = 0;
  for (int r = 0; r < n; ++r)
    if (bit(positives, r)) loss -= std::log(std::exp(o[r]) / zp);
  return loss - std::log(std::exp(o[n]) / zn);
}

// Document score: instances in order, agreement classes ascending.
struct OracleInstance {
  std::vector<int> ds;
  std::vector<int> ex;
  Vec distribution;
};

inline double score(const std::vector<OracleInstance>& doc, const Vec& weights) {
  double total = 0;
  for (const auto& inst : doc)
    for (int r : inst.ds)
      if (std::find(inst.ex.begin(), inst.ex.end(), r) != inst.ex.end()) total += weights[r] * inst.distribution[r];
  return total;
}

// Reference order: score descending, then doc_id ascending, by insertion sort.
inline std::vector<std::pair<std::string, double>> reference_sort(std::vector<std::pair<std::string, double>> items) {
  for (size_t i = 1; i < items.size(); ++i) {
    for (size_t j = i; j > 0; --j) {
      const auto& a = items[j - 1];
      const auto& b = items[j];
      const bool swap = b.second > a.second || (b.second == a.second && b.first < a.first);
      if (!swap) break;
      std::swap(items[j - 1], items[j]);
    }
  }
  return items;
}

// Set-based precision/recall with the train-overlap discount.
struct Prf {
  double p = 0, r = 0, f = 0;
};

inline Prf prf(double correct, double predicted, double gold) {
  Prf out;
  out.p = predicted > 0 ? correct / predicted : 0.0;
  out.r = gold > 0 ? correct / gold : 0.0;
  out.f = out.p + out.r > 0 ? 2 * out.p * out.r / (out.p + out.r) : 0.0;
  return out;
}

}  // namespace oracle
