#pragma once

// Seeded random quantum states for property tests.

#include <cmath>
#include <complex>
#include <vector>

#include "phaselink/quantum.hpp"
#include "phaselink/rng.hpp"

namespace phaselink::test {

inline double gaussian(Rng& rng) {
  const double u1 = 1.0 - rng.uniform();  // (0, 1]
  const double u2 = rng.uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
}

/// Ginibre-ensemble density matrix: G G^dag / tr(G G^dag).
inline DensityMatrix random_density(int dim, Rng& rng) {
  Mat g(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) g(i, j) = cxd(gaussian(rng), gaussian(rng));
  Mat m = g * g.adjoint();
  m /= m.trace();
  m = 0.5 * (m + m.adjoint().eval());
  return DensityMatrix::from_matrix(std::move(m));
}

inline PureState random_pure(int dim, Rng& rng) {
  Vec v(dim);
  for (int i = 0; i < dim; ++i) v(i) = cxd(gaussian(rng), gaussian(rng));
  v.normalize();
  return PureState::from_amplitudes(std::move(v));
}

/// Row-major copy of a density matrix, for feeding the test oracles.
inline std::vector<std::complex<double>> flatten(const DensityMatrix& rho) {
  std::vector<std::complex<double>> out;
  const int n = rho.dim();
  out.reserve(n * n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) out.push_back(rho.matrix()(r, c));
  return out;
}

}  // namespace phaselink::test
