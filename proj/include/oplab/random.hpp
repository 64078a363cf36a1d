#pragma once

// Seeded random matrices. Every generator takes the engine by reference so a
// trial can draw several objects from one reproducible stream.

#include <cmath>
#include <cstdint>
#include <random>

#include "oplab/linalg.hpp"

namespace oplab {

using Rng = std::mt19937_64;

/// splitmix64 finalizer, used to derive per-trial seeds.
constexpr std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline Index uniform_index(Rng& rng, Index lo, Index hi) {
  std::uniform_int_distribution<Index> d(lo, hi);
  return d(rng);
}

/// i.i.d. standard complex Gaussian entries (E|z|^2 = 1).
inline ComplexMatrix ginibre(Index rows, Index cols, Rng& rng) {
  if (rows < 1 || cols < 1) throw Error(ErrorKind::InvalidDims, "ginibre: dimensions must be >= 1");
  std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
  ComplexMatrix g(rows, cols);
  for (Index j = 0; j < cols; ++j) {
    for (Index i = 0; i < rows; ++i) {
      const double re = normal(rng);
      const double im = normal(rng);
      g(i, j) = Complex(re, im);
    }
  }
  return g;
}

/// G*G with G square Ginibre.
inline ComplexMatrix random_psd(Index n, Rng& rng) {
  const ComplexMatrix g = ginibre(n, n, rng);
  return hermitian_part(g.adjoint() * g);
}

/// Haar unitary: QR of a Ginibre matrix with R's diagonal made positive.
inline ComplexMatrix random_unitary(Index n, Rng& rng) {
  const ComplexMatrix g = ginibre(n, n, rng);
  Eigen::HouseholderQR<ComplexMatrix> qr(g);
  ComplexMatrix q = qr.householderQ() * ComplexMatrix::Identity(n, n);
  const ComplexMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Index j = 0; j < n; ++j) {
    const Complex d = r(j, j);
    if (std::abs(d) > 0.0) q.col(j) *= d / std::abs(d);
  }
  return q;
}

/// U diag(z) U* with Haar U and complex Gaussian z.
inline ComplexMatrix random_normal(Index n, Rng& rng) {
  const ComplexMatrix u = random_unitary(n, rng);
  const ComplexMatrix z = ginibre(n, 1, rng);
  return u * z.col(0).asDiagonal() * u.adjoint();
}

/// Ginibre matrix rescaled to largest singular value `sigma_max`.
inline ComplexMatrix random_contraction(Index n, Rng& rng, double sigma_max = 0.9) {
  const ComplexMatrix g = ginibre(n, n, rng);
  return g * (sigma_max / spectral_norm(g));
}

}  // namespace oplab
