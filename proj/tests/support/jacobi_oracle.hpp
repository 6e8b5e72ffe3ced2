#pragma once

// Test-only dense Hermitian eigensolver, independent of the library's
// linear algebra: classical cyclic Jacobi with complex rotations. Used as
// the brute-force reference for entropy/negativity/fidelity checks.

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

namespace phaselink::test {

/// Eigenvalues (ascending) of the row-major n x n Hermitian matrix `a`.
inline std::vector<double> jacobi_hermitian_eigenvalues(
    std::vector<std::complex<double>> a, int n) {
  using cd = std::complex<double>;
  auto at = [&](int r, int c) -> cd& { return a[r * n + c]; };

  for (int sweep = 0; sweep < 128; ++sweep) {
    double off = 0.0;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) off += std::norm(at(p, q));
    if (off < 1e-30) break;

    for (int p = 0; p < n; ++p) {
      for (int q = p + 1; q < n; ++q) {
        const cd apq = at(p, q);
        const double h = std::abs(apq);
        if (h < 1e-300) continue;
        const double app = at(p, p).real();
        const double aqq = at(q, q).real();
        // Diagonalize [[app, h e^{i alpha}], [h e^{-i alpha}, aqq]] with
        // G = [[c, -s e^{i alpha}], [s e^{-i alpha}, c]]: tan(2 theta) =
        // 2h / (app - aqq).
        const double alpha = std::arg(apq);
        const double tau = (app - aqq) / (2.0 * h);
        const double t =
            (tau >= 0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        const cd eia = std::polar(1.0, alpha);

        for (int r = 0; r < n; ++r) {  // A <- A G
          const cd arp = at(r, p), arq = at(r, q);
          at(r, p) = c * arp + s * std::conj(eia) * arq;
          at(r, q) = -s * eia * arp + c * arq;
        }
        for (int col = 0; col < n; ++col) {  // A <- G^dag A
          const cd apc = at(p, col), aqc = at(q, col);
          at(p, col) = c * apc + s * eia * aqc;
          at(q, col) = -s * std::conj(eia) * apc + c * aqc;
        }
      }
    }
  }

  std::vector<double> ev(n);
  for (int i = 0; i < n; ++i) ev[i] = at(i, i).real();
  std::sort(ev.begin(), ev.end());
  return ev;
}

/// Reference negativity: partial transpose on the second qubit by direct
/// index shuffling, then trace norm from the Jacobi spectrum.
inline double oracle_negativity(const std::vector<std::complex<double>>& rho4) {
  std::vector<std::complex<double>> pt(16);
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int a2 = 0; a2 < 2; ++a2)
        for (int b2 = 0; b2 < 2; ++b2)
          pt[(2 * a + b) * 4 + (2 * a2 + b2)] = rho4[(2 * a + b2) * 4 + (2 * a2 + b)];
  double trace_norm = 0.0;
  for (double ev : jacobi_hermitian_eigenvalues(std::move(pt), 4)) {
    trace_norm += std::abs(ev);
  }
  return std::max(0.0, trace_norm - 1.0);
}

/// Reference von Neumann entropy in bits from the Jacobi spectrum.
inline double oracle_entropy_bits(std::vector<std::complex<double>> rho, int n) {
  double bits = 0.0;
  for (double ev : jacobi_hermitian_eigenvalues(std::move(rho), n)) {
    if (ev > 0.0) bits -= ev * std::log2(ev);
  }
  return std::max(0.0, bits);
}

}  // namespace phaselink::test
