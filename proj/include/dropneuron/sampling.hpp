#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "dropneuron/matrix.hpp"
#include "dropneuron/rng.hpp"

namespace dropneuron {

/// Distribution of the nonzero magnitudes of a sparse vector.
/// With `random_sign`, each draw is multiplied by an independent fair +-1.
struct MagnitudeDist {
  enum class Kind { uniform, gaussian };
  Kind kind = Kind::gaussian;
  double a = 0.0;  // uniform: lower bound; gaussian: mean
  double b = 1.0;  // uniform: upper bound; gaussian: standard deviation
  bool random_sign = false;

  static MagnitudeDist uniform(double lo, double hi, bool random_sign = false) {
    return {Kind::uniform, lo, hi, random_sign};
  }
  static MagnitudeDist gaussian(double mean, double stddev, bool random_sign = false) {
    return {Kind::gaussian, mean, stddev, random_sign};
  }

  double draw(Rng& rng) const;
  std::string describe() const;
};

/// m x n matrix whose columns are i.i.d. uniform on the unit sphere in R^m.
Matrix unit_sphere_columns(Rng& rng, std::size_t m, std::size_t n);

/// Length-n vector with exactly d nonzeros at uniformly chosen positions.
std::vector<double> sparse_vector(Rng& rng, std::size_t n, std::size_t d, const MagnitudeDist& magnitude);

}  // namespace dropneuron
