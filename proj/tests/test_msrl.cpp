// Copyright 2026 The EMS-DocRE Authors
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "ems/msrl.hpp"
#include "oracle.hpp"

using ems::ClassPartition;
using ems::LossConfig;
using Eigen::VectorXd;

namespace {

VectorXd running_logits() {
  VectorXd o(4);
  o << 2.0, 1.0, 0.0, 0.5;
  return o;
}

const ClassPartition kRunning{{0}, {1}, {2}};

oracle::Vec to_vec(const VectorXd& v) { return {v.data(), v.data() + v.size()}; }

}  // namespace

TEST_CASE("partitioned probabilities of the running example") {
  const auto p = ems::partition_probabilities(running_logits(), kRunning);
  CHECK(p.agreement[0] == doctest::Approx(0.8175744762).epsilon(1e-9));
  CHECK(p.agreement[1] == 0.0);
  CHECK(p.agreement[3] == 0.0);
  CHECK(p.remaining[1] == doctest::Approx(0.5064803911).epsilon(1e-9));
  CHECK(p.remaining[3] == doctest::Approx(0.3071958857).epsilon(1e-9));
  CHECK(p.remaining[0] == 0.0);
  CHECK(p.remaining[2] == 0.0);
}

TEST_CASE("weights of the running example") {
  const auto out = ems::msrl_loss(running_logits(), kRunning, LossConfig{});
  CHECK(out.w_a[0] == 1.0);
  CHECK(out.w_b[1] == doctest::Approx(1.4064803911).epsilon(1e-9));
  CHECK(out.w_b[3] == doctest::Approx(0.9));
}

TEST_CASE("loss of the running example") {
  const auto out = ems::msrl_loss(running_logits(), kRunning, LossConfig{});
  // 30-digit recomputation: 0.2014132780 + 0.3391792635 + 1.2856301863.
  CHECK(out.agreement_term == doctest::Approx(0.2014132780).epsilon(1e-9));
  CHECK(out.remaining_term == doctest::Approx(0.3391792635 + 1.2856301863).epsilon(1e-9));
  CHECK(out.loss == doctest::Approx(1.8262227277).epsilon(1e-9));

  const auto ref = oracle::scalar_loss(to_vec(running_logits()), 0b001, 0b010, {});
  CHECK(out.loss == doctest::Approx(ref.loss).epsilon(1e-14));
}

TEST_CASE("empty agreement set") {
  VectorXd o(3);
  o << 0.3, -1.0, 0.2;
  const ClassPartition part{{}, {0}, {1}};
  const auto out = ems::msrl_loss(o, part, LossConfig{});
  CHECK(out.p_a.isZero(0));
  CHECK(out.agreement_term == 0.0);
}

TEST_CASE("pure NA instance") {
  VectorXd o(3);
  o << 0.0, 0.0, 0.0;
  const ClassPartition part{{}, {}, {0, 1}};
  const LossConfig cfg{};
  const auto out = ems::msrl_loss(o, part, cfg);
  // y_TH = 1 at all-zero logits, so w_TH = 0.9 + 1/3.
  CHECK(out.w_b[2] == doctest::Approx(0.9 + 1.0 / 3.0));
  CHECK(out.loss == doctest::Approx(-std::log((0.9 + 1.0 / 3.0) / 3.0)));
  o[2] = 5.0;
  CHECK(ems::msrl_loss(o, part, cfg).loss < out.loss);
}

TEST_CASE("under-fitted agreement weight tends to gamma_a + 1") {
  VectorXd o(3);
  o << -30.0, 0.0, 0.0;
  const auto out = ems::msrl_loss(o, ClassPartition{{0}, {}, {1}}, LossConfig{});
  CHECK(out.w_a[0] == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("plain mode weights are exactly one") {
  LossConfig cfg;
  cfg.plain_mode = true;
  cfg.gamma_a = 0.0;
  cfg.gamma_b = 0.0;
  const auto out = ems::msrl_loss(running_logits(), kRunning, cfg);
  CHECK(out.w_a[0] == 1.0);
  CHECK(out.w_b[1] == 1.0);
  CHECK(out.w_b[3] == 1.0);
}

TEST_CASE("disabled self supervision keeps the offsets only") {
  LossConfig cfg;
  cfg.self_supervision = false;
  const auto out = ems::msrl_loss(running_logits(), kRunning, cfg);
  CHECK(out.w_a[0] == 1.0);
  CHECK(out.w_b[1] == 0.9);
  CHECK(out.w_b[3] == 0.9);
}

TEST_CASE("zero gamma is rejected outside plain mode") {
  LossConfig cfg;
  cfg.gamma_b = 0.0;
  CHECK_THROWS_AS(ems::msrl_loss(running_logits(), kRunning, cfg), ems::Error);
  cfg.gamma_b = -1.0;
  cfg.plain_mode = true;
  CHECK_THROWS_AS(cfg.validate(), ems::Error);
}

TEST_CASE("malformed partitions are rejected") {
  CHECK_THROWS_AS(ems::msrl_loss(running_logits(), ClassPartition{{0}, {1}, {}}, LossConfig{}), ems::Error);
  CHECK_THROWS_AS(ems::atl_loss(running_logits(), ems::LabelSet{3}), ems::Error);
}

TEST_CASE("shift invariance") {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> gauss(0.0, 3.0);
  for (int trial = 0; trial < 50; ++trial) {
    VectorXd o(6);
    for (auto& x : o) x = gauss(rng);
    const ClassPartition part = ems::partition_classes({0, 2}, {2, 3}, 5);
    const auto a = ems::msrl_loss(o, part, LossConfig{});
    const VectorXd shifted = (o.array() + 100.0).matrix();
    const auto b = ems::msrl_loss(shifted, part, LossConfig{});
    CHECK(std::abs(a.loss - b.loss) < 1e-9);
    CHECK((a.gradient - b.gradient).cwiseAbs().maxCoeff() < 1e-9);
    CHECK((a.p_a - b.p_a).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((a.p_b - b.p_b).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("analytic gradient agrees with finite differences") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> gauss(0.0, 3.0);
  std::uniform_int_distribution<int> pick(0, 2);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 1 + trial % 6;
    VectorXd o(n + 1);
    for (auto& x : o) x = gauss(rng);
    unsigned agg = 0, rec = 0;
    ClassPartition part;
    for (int r = 0; r < n; ++r) {
      const int g = pick(rng);
      if (g == 0) agg |= 1u << r, part.agreements.insert(r);
      if (g == 1) rec |= 1u << r, part.recommendations.insert(r);
      if (g == 2) part.others.insert(r);
    }
    const auto out = ems::msrl_loss(o, part, LossConfig{});
    const auto base = oracle::scalar_loss(to_vec(o), agg, rec, {});
    const auto fd = oracle::finite_difference(to_vec(o), agg, rec, {}, base, 1e-5);
    for (int s = 0; s <= n; ++s) CHECK(out.gradient[s] == doctest::Approx(fd[s]).epsilon(1e-6).scale(1.0));
  }
}

TEST_CASE("gradient sums to zero") {
  VectorXd o(5);
  o << 0.4, -2.0, 1.3, 0.1, 0.0;
  const auto out = ems::msrl_loss(o, ems::partition_classes({0, 1}, {1, 2}, 4), LossConfig{});
  CHECK(std::abs(out.gradient.sum()) < 1e-12);
}

TEST_CASE("raising an agreement logit lowers the first term") {
  VectorXd o = running_logits();
  double prev = ems::msrl_loss(o, kRunning, LossConfig{}).agreement_term;
  for (int step = 0; step < 5; ++step) {
    o[0] += 0.5;
    const double next = ems::msrl_loss(o, kRunning, LossConfig{}).agreement_term;
    CHECK(next < prev);
    prev = next;
  }
}

TEST_CASE("adaptive thresholding baseline") {
  VectorXd o(4);
  o << 0.7, -0.2, 1.1, 0.3;
  CHECK(ems::atl_loss(o, {0, 2}).loss == doctest::Approx(oracle::scalar_atl(to_vec(o), 0b101)).epsilon(1e-14));
  const double negative = ems::atl_loss(o, {}).loss;
  const double z = std::exp(0.7) + std::exp(-0.2) + std::exp(1.1) + std::exp(0.3);
  CHECK(negative == doctest::Approx(-std::log(std::exp(0.3) / z)).epsilon(1e-14));

  LossConfig plain;
  plain.plain_mode = true;
  CHECK(ems::msrl_loss(o, ems::annotated_partition({0, 2}, 3), plain).loss == ems::atl_loss(o, {0, 2}).loss);
}

TEST_CASE("float instantiation") {
  Eigen::VectorXf o(4);
  o << 2.0f, 1.0f, 0.0f, 0.5f;
  const auto out = ems::msrl_loss(o, kRunning, LossConfig{});
  CHECK(out.loss == doctest::Approx(1.8262227).epsilon(1e-5));
}
