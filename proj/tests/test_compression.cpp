#include <doctest.h>

#include <cmath>
#include <limits>

#include "dropneuron/compression.hpp"
#include "dropneuron/errors.hpp"
#include "oracles.hpp"

using namespace dropneuron;

namespace {

std::size_t nonzero_weights(const Network& net) {
  std::size_t n = 0;
  for (const Layer& l : net.layers()) n += l.weights.count_nonzero();
  return n;
}

}  // namespace

TEST_CASE("prune hand cases") {
  const Network net({Layer{Matrix::from_rows({{0.005, 0.5}}), {0.001, -0.2}, Activation::linear}});
  const Network p = prune(net, PruneSpec{0.01});
  CHECK(p.layer(0).weights == Matrix::from_rows({{0.0, 0.5}}));
  CHECK(p.layer(0).biases == std::vector<double>{0.0, -0.2});

  CHECK(prune(net, PruneSpec{0.0}) == net);
  const Network gone = prune(net, PruneSpec{std::numeric_limits<double>::infinity()});
  CHECK(nonzero_weights(gone) == 0);
  CHECK(gone.dims() == net.dims());

  CHECK_THROWS_AS(prune(net, PruneSpec{-1.0}), ArgumentError);
  CHECK_THROWS_AS(prune(net, PruneSpec{0.1, {0.1, 0.2}}), ArgumentError);
}

TEST_CASE("per-layer prune thresholds") {
  const Network net({Layer{Matrix::from_rows({{0.05}}), {0.0}, Activation::linear},
                     Layer{Matrix::from_rows({{0.05}}), {0.0}, Activation::linear}});
  const Network p = prune(net, PruneSpec{0.0, {0.01, 0.1}});
  CHECK(p.layer(0).weights(0, 0) == 0.05);
  CHECK(p.layer(1).weights(0, 0) == 0.0);
}

TEST_CASE("prune is idempotent and monotone") {
  Rng rng(41);
  for (int t = 0; t < 10; ++t) {
    const Network net = oracle::random_net(rng, {6, 5, 3}, {Activation::relu, Activation::linear});
    std::size_t previous = std::numeric_limits<std::size_t>::max();
    for (int k = 0; k <= 9; ++k) {
      const PruneSpec spec{0.1 * k};
      const Network p = prune(net, spec);
      CHECK(prune(p, spec) == p);
      CHECK(nonzero_weights(p) <= previous);
      previous = nonzero_weights(p);
    }
  }
}

TEST_CASE("neuron survival on the worked example net") {
  const NeuronSurvival s = analyze_neurons(oracle::worked_net());
  CHECK(s.alive_count(0) == 2);
  CHECK(s.total(0) == 20);
  CHECK(s.alive[0][2]);
  CHECK(s.alive[0][9]);
  CHECK(s.alive_count(1) == 1);
  CHECK(s.alive[1][1]);
  CHECK(s.alive_count(2) == 1);
  CHECK(s.output_connected_count() == 1);
}

TEST_CASE("neuron survival edge cases") {
  Rng rng(3);
  const Network dense = oracle::random_net(rng, {4, 3, 2}, {Activation::relu, Activation::linear});
  const NeuronSurvival all = analyze_neurons(dense);
  for (std::size_t p = 0; p < 3; ++p) CHECK(all.alive_count(p) == all.total(p));

  Network z = dense;
  z.mutable_layer(0).weights = Matrix(4, 3);
  const NeuronSurvival none = analyze_neurons(z);
  CHECK(none.alive_count(0) == 0);
  CHECK(none.alive_count(1) == 0);
  CHECK(none.alive_count(2) == 2);

  // Outputs with no incoming weights are reported but kept unless asked.
  Network dead_out = dense;
  for (std::size_t i = 0; i < 3; ++i) dead_out.mutable_layer(1).weights(i, 1) = 0.0;
  CHECK(analyze_neurons(dead_out).alive_count(2) == 2);
  CHECK(analyze_neurons(dead_out).output_connected_count() == 1);
  CHECK(analyze_neurons(dead_out, true).alive_count(2) == 1);
}

TEST_CASE("compact on the worked example net") {
  const CompactResult c = compact(oracle::worked_net());
  CHECK(c.net.dims() == std::vector<std::size_t>{2, 1, 1});
  CHECK(c.index_maps[0] == std::vector<std::size_t>{2, 9});
  CHECK(c.index_maps[1] == std::vector<std::size_t>{1});
  const double a = c.net.layer(0).weights(0, 0) * c.net.layer(1).weights(0, 0);
  const double b = c.net.layer(0).weights(1, 0) * c.net.layer(1).weights(0, 0);
  CHECK(a == doctest::Approx(3.84275).epsilon(1e-5));
  CHECK(b == doctest::Approx(-8.19329).epsilon(1e-5));
  const auto& x0 = oracle::worked_x0();
  CHECK(std::fabs(a - x0[2]) / std::fabs(x0[2]) < 0.01);
  CHECK(std::fabs(b - x0[9]) / std::fabs(x0[9]) < 0.01);
}

TEST_CASE("compact of a dense net is the identity") {
  Rng rng(5);
  const Network net = oracle::random_net(rng, {4, 3, 2}, {Activation::logistic, Activation::linear});
  const CompactResult c = compact(net);
  CHECK(c.net == net);
}

TEST_CASE("compact folds the constant output of an input-disconnected neuron") {
  Rng rng(8);
  Network net = oracle::random_net(rng, {3, 4, 2}, {Activation::logistic, Activation::linear});
  for (std::size_t i = 0; i < 3; ++i) net.mutable_layer(0).weights(i, 1) = 0.0;
  net.mutable_layer(0).biases[1] = 0.3;
  const std::vector<double> r = {net.layer(1).weights(1, 0), net.layer(1).weights(1, 1)};

  const CompactResult c = compact(net);
  CHECK(c.net.dims() == std::vector<std::size_t>{3, 3, 2});
  const double sig = 1.0 / (1.0 + std::exp(-0.3));
  for (std::size_t j = 0; j < 2; ++j) {
    CHECK(c.net.layer(1).biases[j] == doctest::Approx(net.layer(1).biases[j] + sig * r[j]).epsilon(1e-14));
  }
  const Matrix x = oracle::random_matrix(rng, 100, 3, 3.0);
  const Matrix a = oracle::forward(net, x), b = oracle::forward(c.net, restrict_inputs(x, c.index_maps[0]));
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(std::fabs(a.values()[i] - b.values()[i]) <= 1e-12);
}

TEST_CASE("compact is exact on randomly pruned nets") {
  Rng rng(19);
  const std::vector<Activation> acts = {Activation::relu, Activation::logistic, Activation::linear};
  for (int t = 0; t < 30; ++t) {
    Network net = oracle::random_net(rng, {8, 6, 5, 3}, acts);
    for (std::size_t k = 0; k < net.depth(); ++k) {
      Matrix& w = net.mutable_layer(k).weights;
      for (std::size_t j = 1; j < w.cols(); ++j) {
        if (rng.uniform() < 0.3)
          for (std::size_t i = 0; i < w.rows(); ++i) w(i, j) = 0.0;
      }
      for (std::size_t i = 1; i < w.rows(); ++i) {
        if (rng.uniform() < 0.3)
          for (std::size_t j = 0; j < w.cols(); ++j) w(i, j) = 0.0;
      }
    }
    CompactResult c;
    try {
      c = compact(net);
    } catch (const DegenerateNetworkError&) {
      continue;
    }
    const Matrix x = oracle::random_matrix(rng, 100, 8, 2.0);
    const Matrix a = forward(net, x), b = forward(c.net, restrict_inputs(x, c.index_maps[0]));
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(std::fabs(a.values()[i] - b.values()[i]) <= 1e-12);
  }
}

TEST_CASE("compact rejects a net with an empty layer") {
  Network net = oracle::worked_net();
  net.mutable_layer(1).weights = Matrix(5, 1);
  CHECK_THROWS_AS(compact(net), DegenerateNetworkError);
}

TEST_CASE("restrict_inputs") {
  const Matrix x = Matrix::from_rows({{1, 2, 3}, {4, 5, 6}});
  CHECK(restrict_inputs(x, {2, 0}) == Matrix::from_rows({{3, 1}, {6, 4}}));
  CHECK_THROWS_AS(restrict_inputs(x, {3}), DimensionError);
}

TEST_CASE("compression rate on the worked example net") {
  Rng rng(1);
  const Network dense = oracle::random_net(rng, {20, 5, 1}, {Activation::linear, Activation::linear});
  const Network pruned = oracle::worked_net();
  const CompressionReport r = compression_stats(dense, pruned, analyze_neurons(pruned), 0.1, 0.2);
  CHECK(r.dense_weight_count == 105);
  CHECK(r.surviving_weight_count == 3);
  CHECK(r.compression_rate == 35.0);
  CHECK(r.neurons[0].alive == 2);
  CHECK(r.neurons[1].alive == 1);
  CHECK(r.layers[0].nonzero == 2);
  CHECK(r.layers[1].nonzero == 1);
  CHECK(r.metric_before == 0.1);
  CHECK(r.metric_after == 0.2);
}

TEST_CASE("compression rate for the large fully connected shapes") {
  // Fill each layer with the given fraction of nonzeros, every neuron kept.
  Matrix w1(3136, 512), w2(512, 10);
  const auto n1 = static_cast<std::size_t>(std::llround(0.0144 * 3136 * 512));
  const auto n2 = static_cast<std::size_t>(std::llround(0.1682 * 512 * 10));
  for (std::size_t i = 0; i < n1; ++i) w1.values()[i * (w1.size() / n1)] = 1.0;
  for (std::size_t i = 0; i < n2; ++i) w2.values()[i * (w2.size() / n2)] = 1.0;
  const Network pruned({Layer{w1, std::vector<double>(512), Activation::relu},
                        Layer{w2, std::vector<double>(10), Activation::linear}});
  NeuronSurvival all;
  all.alive = {std::vector<bool>(3136, true), std::vector<bool>(512, true), std::vector<bool>(10, true)};
  all.output_connected = std::vector<bool>(10, true);
  const CompressionReport r = compression_stats(pruned, pruned, all, 0, 0);
  CHECK(r.surviving_weight_count == n1 + n2);
  CHECK(std::fabs(r.compression_rate - 67.0) <= 0.5);
}

TEST_CASE("compression rate edge cases") {
  Rng rng(2);
  const Network net = oracle::random_net(rng, {4, 3, 2}, {Activation::relu, Activation::linear});
  const CompressionReport r = compression_stats(net, net, analyze_neurons(net), 0, 0);
  CHECK(r.compression_rate == 1.0);
  CHECK(r.weights_total.fraction() == 1.0);
  CHECK(r.neurons_total.fraction() == 1.0);
  CHECK(std::isinf(compression_rate(10, 0)));

  const Network other = oracle::random_net(rng, {4, 2, 2}, {Activation::relu, Activation::linear});
  CHECK_THROWS_AS(compression_stats(net, other, analyze_neurons(other), 0, 0), DimensionError);
}

TEST_CASE("weights into a dead neuron do not count as surviving") {
  // Hidden neuron 0 has incoming weights but no outgoing ones.
  const Network net({Layer{Matrix::from_rows({{1, 1}, {1, 0}}), {0, 0}, Activation::linear},
                     Layer{Matrix::from_rows({{0}, {1}}), {0}, Activation::linear}});
  const CompressionReport r = compression_stats(net, net, analyze_neurons(net), 0, 0);
  CHECK(r.weights_total.nonzero == 4);
  CHECK(r.surviving_weight_count == 2);
  CHECK(r.compression_rate == 3.0);
}

TEST_CASE("sparsity_pattern") {
  const Network net({Layer{Matrix::from_rows({{0, 2}, {-3, 0}}), {0, 0}, Activation::linear}});
  CHECK(sparsity_pattern(net, 0) == Matrix::from_rows({{0, 1}, {1, 0}}));
  CHECK_THROWS_AS(sparsity_pattern(net, 1), ArgumentError);

  const Matrix s = sparsity_pattern(oracle::worked_net(), 0);
  CHECK(s.count_nonzero() == 2);
  CHECK(s(2, 1) == 1.0);
  CHECK(s(9, 1) == 1.0);
  CHECK(sparsity_pattern(Network({Layer{Matrix(3, 2), {0, 0}, Activation::linear}}), 0) == Matrix(3, 2));
}
