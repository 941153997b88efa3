#include <doctest.h>

#include <cmath>

#include "dropneuron/errors.hpp"
#include "dropneuron/regularizers.hpp"
#include "oracles.hpp"

using namespace dropneuron;

namespace {

Network single(const Matrix& w, std::vector<double> b = {}) {
  if (b.empty()) b.assign(w.cols(), 0.0);
  return Network({Layer{w, std::move(b), Activation::linear}});
}

double rel_diff(double a, double b) { return std::fabs(a - b) / std::max({std::fabs(a), std::fabs(b), 1e-300}); }

}  // namespace

TEST_CASE("l1 and l2 hand values") {
  const Network net = single(Matrix::from_rows({{1, -2}, {3, 0}}));
  CHECK(l1_value(net, 1.0) == 6.0);
  CHECK(l2_value(net, 1.0) == 14.0);
  CHECK(l1_value(net, 0.5) == 3.0);

  const Network zero = single(Matrix(3, 2));
  CHECK(l1_value(zero, 1.0) == 0.0);
  CHECK(l2_value(zero, 1.0) == 0.0);

  const Network with_bias = single(Matrix::from_rows({{1, -2}, {3, 0}}), {-1, 2});
  CHECK(l1_value(with_bias, 1.0) == 9.0);
  CHECK(l1_value(with_bias, 1.0, false) == 6.0);
  CHECK(l2_value(with_bias, 1.0) == 19.0);
}

TEST_CASE("li and lo hand values") {
  CHECK(li_value(single(Matrix::from_rows({{3, 0}, {4, 0}})), 1.0) == 5.0);
  CHECK(lo_value(single(Matrix::from_rows({{3, 4}, {0, 0}})), 1.0) == 5.0);
  CHECK(li_value(single(Matrix(4, 4)), 1.0) == 0.0);
  Rng rng(1);
  CHECK(lo_value(oracle::random_net(rng, {4, 3, 2}, {Activation::relu, Activation::linear}), 0.0) == 0.0);
  // Biases are not part of either group.
  CHECK(li_value(single(Matrix::from_rows({{3, 0}, {4, 0}}), {7, 7}), 1.0) == 5.0);
}

TEST_CASE("worked example matrices") {
  const Network net = oracle::worked_net();
  const Network w1 = Network({net.layer(0)});
  const Network w2 = Network({net.layer(1)});
  CHECK(std::fabs(li_value(w1, 1.0) - 1.574951) < 1e-6);
  CHECK(std::fabs(li_value(w1, 1.0) - std::hypot(0.6687693, 1.42591035)) < 1e-15);
  CHECK(lo_value(w2, 1.0) == 5.74600601);

  const auto c = group_l0_counts(w1, 0.0);
  REQUIRE(c.size() == 1);
  CHECK(c[0].nonzero_columns == 1);
  CHECK(c[0].nonzero_rows == 2);
}

TEST_CASE("group_l0_counts") {
  CHECK(group_l0_counts(single(Matrix(3, 4)), 0.0)[0].nonzero_columns == 0);
  CHECK(group_l0_counts(single(Matrix(3, 4)), 0.0)[0].nonzero_rows == 0);
  Rng rng(2);
  const Network dense = single(oracle::random_matrix(rng, 6, 4));
  CHECK(group_l0_counts(dense, 0.0)[0].nonzero_columns == 4);
  CHECK(group_l0_counts(dense, 0.0)[0].nonzero_rows == 6);
  CHECK(group_l0_counts(single(Matrix::from_rows({{3, 0}, {4, 0}})), 5.0)[0].nonzero_columns == 0);
  CHECK_THROWS_AS(group_l0_counts(dense, -1.0), ArgumentError);
}

TEST_CASE("group penalty properties on random matrices") {
  Rng rng(13);
  for (int t = 0; t < 50; ++t) {
    const std::size_t r = 1 + rng.below(7), c = 1 + rng.below(7);
    const Matrix a = oracle::random_matrix(rng, r, c, 3.0);
    const Matrix b = oracle::random_matrix(rng, r, c, 3.0);
    const double k = rng.uniform(-5.0, 5.0);

    CHECK(rel_diff(li_value(single(scale(a, k)), 1.0), std::fabs(k) * li_value(single(a), 1.0)) < 1e-12);
    CHECK(rel_diff(lo_value(single(scale(a, k)), 1.0), std::fabs(k) * lo_value(single(a), 1.0)) < 1e-12);
    CHECK(rel_diff(li_value(single(a), 1.0), lo_value(single(transpose(a)), 1.0)) < 1e-12);
    CHECK(li_value(single(add(a, b)), 1.0) <= li_value(single(a), 1.0) + li_value(single(b), 1.0) + 1e-12);
    CHECK(lo_value(single(add(a, b)), 1.0) <= lo_value(single(a), 1.0) + lo_value(single(b), 1.0) + 1e-12);

    // One populated column: the group sum is the Frobenius norm.
    Matrix col(r, c);
    const std::size_t j = rng.below(c);
    for (std::size_t i = 0; i < r; ++i) col(i, j) = a(i, j);
    CHECK(li_value(single(col), 1.0) == frobenius_norm(col));
    CHECK(lo_value(single(transpose(col)), 1.0) == frobenius_norm(col));
  }
}

TEST_CASE("penalty values agree with the loop oracle") {
  Rng rng(4);
  const Network net = oracle::random_net(rng, {5, 4, 3}, {Activation::relu, Activation::linear});
  RegularizerConfig cfg;
  cfg.lambda_l1 = 0.3;
  cfg.lambda_l2 = 0.2;
  cfg.lambda_li = 0.7;
  cfg.lambda_lo = 1.1;
  const PenaltyBreakdown p = penalty_values(net, cfg);
  CHECK(rel_diff(p.l1, 0.3 * oracle::l1(net)) < 1e-13);
  CHECK(rel_diff(p.l2, 0.2 * oracle::l2(net)) < 1e-13);
  CHECK(rel_diff(p.li, 0.7 * oracle::li(net)) < 1e-13);
  CHECK(rel_diff(p.lo, 1.1 * oracle::lo(net)) < 1e-13);
  CHECK(p.total() == p.l1 + p.l2 + p.li + p.lo);
}

TEST_CASE("regularizer gradient hand values") {
  RegularizerConfig cfg;
  cfg.lambda_li = 1.0;
  const Gradient g = regularizer_grad(single(Matrix::from_rows({{3, 0}, {4, 0}})), cfg);
  CHECK(g[0].weights(0, 0) == doctest::Approx(0.6));
  CHECK(g[0].weights(1, 0) == doctest::Approx(0.8));
  CHECK(g[0].weights(0, 1) == 0.0);
  CHECK(g[0].weights(1, 1) == 0.0);

  RegularizerConfig all;
  all.lambda_l1 = all.lambda_l2 = all.lambda_li = all.lambda_lo = 1.0;
  const Gradient z = regularizer_grad(single(Matrix(3, 2)), all);
  for (double v : z[0].weights.values()) CHECK(v == 0.0);
  for (double v : z[0].biases) CHECK(v == 0.0);
}

TEST_CASE("regularizer gradient matches finite differences") {
  Rng rng(23);
  for (int t = 0; t < 20; ++t) {
    Network net = oracle::random_net(rng, {4, 3, 2}, {Activation::linear, Activation::linear});
    RegularizerConfig cfg;
    cfg.lambda_l1 = rng.uniform(0.0, 1.0);
    cfg.lambda_l2 = rng.uniform(0.0, 1.0);
    cfg.lambda_li = rng.uniform(0.0, 1.0);
    cfg.lambda_lo = rng.uniform(0.0, 1.0);
    if (t % 2) cfg.layer_scale = {0.5, 2.0};
    // Keep every weight away from the l1 kink.
    oracle::for_each_param(net, [&](double& p) {
      if (std::fabs(p) < 0.05) p = 0.05;
    });

    const auto fd = oracle::fd_gradient(net, [&](const Network& n) { return penalty_values(n, cfg).total(); });
    const Gradient g = regularizer_grad(net, cfg);
    std::size_t idx = 0;
    for (const auto& lg : g) {
      for (double v : lg.weights.values()) CHECK(oracle::close_rel(v, fd[idx++], 1e-6, 1e-8));
      for (double v : lg.biases) CHECK(oracle::close_rel(v, fd[idx++], 1e-6, 1e-8));
    }
  }
}

TEST_CASE("per-layer scale multiplies each layer's share") {
  Rng rng(9);
  const Network net = oracle::random_net(rng, {3, 4, 2}, {Activation::relu, Activation::linear});
  RegularizerConfig cfg;
  cfg.lambda_l1 = cfg.lambda_li = cfg.lambda_lo = 1.0;
  cfg.layer_scale = {0.0, 1.0};
  const Network second = Network({net.layer(1)});
  CHECK(rel_diff(penalty_values(net, cfg).l1, oracle::l1(second)) < 1e-13);
  CHECK(rel_diff(penalty_values(net, cfg).li, oracle::li(second)) < 1e-13);
  CHECK(rel_diff(penalty_values(net, cfg).lo, oracle::lo(second)) < 1e-13);
  const Gradient g = regularizer_grad(net, cfg);
  for (double v : g[0].weights.values()) CHECK(v == 0.0);
}

TEST_CASE("regularizer config validation") {
  RegularizerConfig cfg;
  CHECK_NOTHROW(cfg.validate(2));
  cfg.lambda_lo = -1.0;
  CHECK_THROWS_AS(cfg.validate(2), ArgumentError);
  cfg.lambda_lo = 0.0;
  cfg.group_eps = 0.0;
  CHECK_THROWS_AS(cfg.validate(2), ArgumentError);
  cfg.group_eps = 1e-8;
  cfg.layer_scale = {1.0};
  CHECK_THROWS_AS(cfg.validate(2), ArgumentError);
  cfg.layer_scale = {1.0, -1.0};
  CHECK_THROWS_AS(cfg.validate(2), ArgumentError);
}
