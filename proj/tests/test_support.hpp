#pragma once

#include <random>
#include <vector>

#include "superrad/core.hpp"
#include "superrad/model.hpp"

namespace superrad::testing {

// Ginibre-distributed density matrix of dimension d.
inline ComplexMatrix random_density(std::mt19937& rng, Eigen::Index d) {
  std::normal_distribution<double> n(0.0, 1.0);
  ComplexMatrix g(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) g(i, j) = Complex(n(rng), n(rng));
  }
  ComplexMatrix rho = g * g.adjoint();
  rho /= rho.trace().real();
  return 0.5 * (rho + rho.adjoint());
}

inline ComplexMatrix random_matrix(std::mt19937& rng, Eigen::Index rows, Eigen::Index cols) {
  std::normal_distribution<double> n(0.0, 1.0);
  ComplexMatrix g(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) g(i, j) = Complex(n(rng), n(rng));
  }
  return g;
}

// Cycles through every InitialState family for n atoms.
inline InitialState random_state(std::mt19937& rng, int n, int family) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const int twice_j = n;
  switch (family % 6) {
    case 0: {
      std::uniform_int_distribution<int> k(0, n);
      return Dicke{HalfInt::from_twice(twice_j), HalfInt::from_twice(n - 2 * k(rng))};
    }
    case 1: {
      std::uniform_int_distribution<int> k(0, n);
      return DephasedDicke{HalfInt::from_twice(twice_j), HalfInt::from_twice(n - 2 * k(rng)), u(rng)};
    }
    case 2: {
      std::vector<double> p(static_cast<std::size_t>(n + 1));
      double total = 0.0;
      for (auto& w : p) total += (w = u(rng));
      for (auto& w : p) w /= total;
      double s = 0.0;
      for (std::size_t i = 0; i + 1 < p.size(); ++i) s += p[i];
      p.back() = 1.0 - s;
      return DickeMixture{p};
    }
    case 3: {
      const double ee = u(rng);
      const double r = std::sqrt(ee * (1.0 - ee)) * u(rng);
      const double phi = 2.0 * 3.141592653589793 * u(rng);
      return FactorizedIdentical{n, ee, std::polar(r, phi)};
    }
    case 4: {
      const double ee = u(rng);
      const double phi = 2.0 * 3.141592653589793 * u(rng);
      return FactorizedIdentical{n, ee, std::polar(std::sqrt(ee * (1.0 - ee)), phi)};
    }
    default:
      return RawState{DensityMatrix(random_density(rng, static_cast<Eigen::Index>(atom_dim(n))), atom_layout(n))};
  }
}

}  // namespace superrad::testing
