#pragma once

// Matrix geometric mean A # B for positive definite pairs and its
// regularized extension to positive semidefinite pairs.

#include <cmath>
#include <utility>
#include <vector>

#include "oplab/linalg.hpp"

namespace oplab {

struct RegularizationStep {
  double r;
  double distance;  // spectral-norm distance to the previous iterate
};

struct MeanResult {
  PsdMatrix value;
  std::vector<RegularizationStep> regularization_trace;
  bool converged = false;
  double scale = 1.0;  // 1 + ||A|| + ||B||
  bool limit_formula = false;

  double final_distance() const {
    return regularization_trace.empty() ? 0.0 : regularization_trace.back().distance;
  }
  /// Schedule exhausted with an iterate distance above 1e-6 * scale.
  bool no_convergence() const { return !converged && final_distance() > 1e-6 * scale; }
};

namespace detail {

// A^{1/2} (A^{-1/2} B A^{-1/2})^{1/2} A^{1/2} evaluated in A's eigenbasis.
// A must have strictly positive eigenvalues.
inline PsdMatrix mean_in_eigenbasis(const PsdMatrix& a, const ComplexMatrix& b) {
  const ComplexMatrix& u = a.eigenvectors();
  const RealVector half = a.eigenvalues().array().sqrt();
  const RealVector inv_half = half.cwiseInverse();
  ComplexMatrix c = inv_half.cast<Complex>().asDiagonal() * (u.adjoint() * b * u) *
                    inv_half.cast<Complex>().asDiagonal();
  c = hermitian_part(c);
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(c);
  // Eigenvalues at roundoff level would otherwise contribute sqrt(eps).
  const double noise = 16.0 * static_cast<double>(c.rows()) * kMachineEpsilon * solver.eigenvalues().cwiseAbs().maxCoeff();
  const RealVector root = solver.eigenvalues().unaryExpr([noise](double x) { return x > noise ? std::sqrt(x) : 0.0; });
  const ComplexMatrix c_half =
      solver.eigenvectors() * root.cast<Complex>().asDiagonal() * solver.eigenvectors().adjoint();
  ComplexMatrix inner = half.cast<Complex>().asDiagonal() * c_half * half.cast<Complex>().asDiagonal();
  ComplexMatrix mean = hermitian_part(u * inner * u.adjoint());
  // The mean of two positive operators is positive; clamp roundoff.
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> fin(mean);
  return PsdMatrix::from_eigensystem(fin.eigenvalues().cwiseMax(0.0), fin.eigenvectors());
}

}  // namespace detail

/// A # B for positive definite A and B. Either argument with smallest
/// eigenvalue <= cutoff is rejected.
inline PsdMatrix geometric_mean_pd(const PsdMatrix& a, const PsdMatrix& b, double cutoff) {
  if (a.dim() != b.dim()) {
    throw Error(ErrorKind::DimensionMismatch, "geometric_mean_pd: dimensions differ");
  }
  if (a.min_eigenvalue() <= cutoff || b.min_eigenvalue() <= cutoff) {
    throw Error(ErrorKind::NotPositiveDefinite,
                "geometric_mean_pd: smallest eigenvalue at or below cutoff " + std::to_string(cutoff));
  }
  return detail::mean_in_eigenbasis(a, b.matrix());
}

inline PsdMatrix geometric_mean_pd(const PsdMatrix& a, const PsdMatrix& b, const Tolerance& tol = {}) {
  const double cutoff = tol.rel * std::max(a.max_eigenvalue(), b.max_eigenvalue());
  return geometric_mean_pd(a, b, cutoff);
}

namespace detail {

// Limit of (A+rI) # (B+rI) for rank-deficient pairs. With M = ran A,
// A # B = A_M # [M]B where [M]B = B11 - B12 B22^+ B21 is the shorted
// operator of B onto M; A_M is invertible on M, so no regularization is
// needed. Eigenvalues at or below `cutoff` count as zero.
inline PsdMatrix singular_mean_limit(const PsdMatrix& a, const PsdMatrix& b, double cutoff) {
  const Index n = a.dim();
  const Index m = a.rank(cutoff);
  if (m == 0) return PsdMatrix::from_eigensystem(RealVector::Zero(n), ComplexMatrix::Identity(n, n));
  const ComplexMatrix& u = a.eigenvectors();
  const ComplexMatrix q = u.leftCols(m);
  ComplexMatrix shorted = q.adjoint() * b.matrix() * q;
  // The Schur complement cancels; its roundoff scales with both terms.
  double magnitude = hermitian_norm(shorted);
  if (m < n) {
    const ComplexMatrix p = u.rightCols(n - m);
    const ComplexMatrix b12 = q.adjoint() * b.matrix() * p;
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> b22(hermitian_part(p.adjoint() * b.matrix() * p));
    RealVector inv = b22.eigenvalues();
    for (Index i = 0; i < inv.size(); ++i) inv(i) = inv(i) > cutoff ? 1.0 / inv(i) : 0.0;
    const ComplexMatrix w = b12 * b22.eigenvectors();
    const ComplexMatrix correction = w * inv.cast<Complex>().asDiagonal() * w.adjoint();
    magnitude += hermitian_norm(correction);
    shorted -= correction;
  }
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> s(hermitian_part(shorted));
  const double noise = 64.0 * static_cast<double>(n) * kMachineEpsilon * magnitude;
  const RealVector short_values = s.eigenvalues().unaryExpr([noise](double x) { return x > noise ? x : 0.0; });
  const PsdMatrix short_b = PsdMatrix::from_eigensystem(short_values, s.eigenvectors());
  const PsdMatrix a_m =
      PsdMatrix::from_eigensystem(a.eigenvalues().head(m), ComplexMatrix::Identity(m, m));
  const PsdMatrix reduced = mean_in_eigenbasis(a_m, short_b.matrix());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> fin(hermitian_part(q * reduced.matrix() * q.adjoint()));
  return PsdMatrix::from_eigensystem(fin.eigenvalues().cwiseMax(0.0), fin.eigenvectors());
}

}  // namespace detail

/// Eigenvalues at or below this are treated as exact zeros by geometric_mean.
inline double singular_cutoff(const PsdMatrix& a, const PsdMatrix& b) {
  return 64.0 * static_cast<double>(a.dim()) * kMachineEpsilon * std::max(a.max_eigenvalue(), b.max_eigenvalue());
}

/// (A+rI) # (B+rI) along r_k = (1 + ||A|| + ||B||) 2^{-k}, k = 4..60,
/// stopping once two successive iterates agree to 1e-10 * (1 + ||A|| + ||B||).
/// Converges like r when both arguments are positive definite or their
/// supports are nested, and like sqrt(r) otherwise.
inline MeanResult regularized_mean(const PsdMatrix& a, const PsdMatrix& b) {
  if (a.dim() != b.dim()) {
    throw Error(ErrorKind::DimensionMismatch, "geometric_mean: dimensions differ");
  }
  const double scale = 1.0 + a.max_eigenvalue() + b.max_eigenvalue();
  const double stop = 1e-10 * scale;
  constexpr int kFirst = 4;
  constexpr int kLast = 60;

  std::vector<RegularizationStep> trace;
  double r = std::ldexp(scale, -kFirst);
  PsdMatrix current = detail::mean_in_eigenbasis(a.shifted(r), b.shifted(r).matrix());
  for (int k = kFirst + 1; k <= kLast; ++k) {
    r = std::ldexp(scale, -k);
    PsdMatrix next = detail::mean_in_eigenbasis(a.shifted(r), b.shifted(r).matrix());
    const double distance = hermitian_norm(next.matrix() - current.matrix());
    trace.push_back({r, distance});
    current = std::move(next);
    if (distance <= stop) {
      return {std::move(current), std::move(trace), true, scale};
    }
  }
  return {std::move(current), std::move(trace), false, scale};
}

/// A # B for positive semidefinite A and B. Positive definite pairs run the
/// regularization schedule; pairs with an eigenvalue at or below
/// singular_cutoff() get the exact limit through the shorted operator,
/// with `limit_formula` set and an empty trace.
inline MeanResult geometric_mean(const PsdMatrix& a, const PsdMatrix& b) {
  if (a.dim() != b.dim()) {
    throw Error(ErrorKind::DimensionMismatch, "geometric_mean: dimensions differ");
  }
  const double cutoff = singular_cutoff(a, b);
  if (a.min_eigenvalue() > cutoff && b.min_eigenvalue() > cutoff) return regularized_mean(a, b);
  MeanResult out{detail::singular_mean_limit(a, b, cutoff), {}, true, 1.0 + a.max_eigenvalue() + b.max_eigenvalue()};
  out.limit_formula = true;
  return out;
}

}  // namespace oplab
