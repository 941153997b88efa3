#include "dropneuron/sampling.hpp"

#include <cmath>
#include <sstream>

#include "dropneuron/errors.hpp"

namespace dropneuron {

double MagnitudeDist::draw(Rng& rng) const {
  const double v = kind == Kind::uniform ? rng.uniform(a, b) : rng.normal(a, b);
  if (random_sign && rng.bernoulli(0.5)) return -v;
  return v;
}

std::string MagnitudeDist::describe() const {
  std::ostringstream os;
  os << (random_sign ? "+-" : "") << (kind == Kind::uniform ? "uniform(" : "gaussian(") << a << ", " << b << ")";
  return os.str();
}

Matrix unit_sphere_columns(Rng& rng, std::size_t m, std::size_t n) {
  if (m == 0 || n == 0) {
    throw DimensionError("unit_sphere_columns: zero dimension " + std::to_string(m) + "x" + std::to_string(n));
  }
  Matrix out(m, n);
  for (std::size_t j = 0; j < n; ++j) {
    double norm = 0.0;
    // A zero Gaussian vector has probability zero; redraw if it ever happens.
    while (norm == 0.0) {
      double s = 0.0;
      for (std::size_t i = 0; i < m; ++i) {
        const double g = rng.normal();
        out(i, j) = g;
        s += g * g;
      }
      norm = std::sqrt(s);
    }
    for (std::size_t i = 0; i < m; ++i) out(i, j) /= norm;
  }
  return out;
}

std::vector<double> sparse_vector(Rng& rng, std::size_t n, std::size_t d, const MagnitudeDist& magnitude) {
  if (d > n) {
    throw ArgumentError("sparse_vector: d=" + std::to_string(d) + " exceeds n=" + std::to_string(n));
  }
  std::vector<double> x(n, 0.0);
  for (std::size_t pos : rng.sample_without_replacement(n, d)) {
    double v = 0.0;
    // "d nonzeros" is exact, so a draw of exactly 0 is rejected.
    while (v == 0.0) v = magnitude.draw(rng);
    x[pos] = v;
  }
  return x;
}

}  // namespace dropneuron
