#pragma once

// Dense complex linear algebra with explicit numerical contracts:
// Hermitian eigendecomposition, functional calculus on the PSD cone,
// polar decomposition, generalized inverses and the Loewner order.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "oplab/error.hpp"

namespace oplab {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;
using Index = Eigen::Index;

inline constexpr double kMachineEpsilon = std::numeric_limits<double>::epsilon();

/// Relative and absolute tolerances shared by every numerical predicate.
struct Tolerance {
  double rel = 1e-8;
  double abs = 1e-12;

  void validate() const {
    if (!(rel > 0.0) || !(abs > 0.0) || !std::isfinite(rel) || !std::isfinite(abs)) {
      throw Error(ErrorKind::InvalidArgument, "tolerances must be positive and finite");
    }
  }
};

// ---------------------------------------------------------------------------
// basic checks and norms
// ---------------------------------------------------------------------------

inline void require_finite(const ComplexMatrix& a, const char* where) {
  if (a.size() == 0) {
    throw Error(ErrorKind::InvalidDims, std::string(where) + ": empty matrix");
  }
  for (Index j = 0; j < a.cols(); ++j) {
    for (Index i = 0; i < a.rows(); ++i) {
      if (!std::isfinite(a(i, j).real()) || !std::isfinite(a(i, j).imag())) {
        throw Error(ErrorKind::NonFinite, std::string(where) + ": entry (" + std::to_string(i) +
                                              ", " + std::to_string(j) + ") is not finite");
      }
    }
  }
}

inline void require_square(const ComplexMatrix& a, const char* where) {
  if (a.rows() != a.cols()) {
    throw Error(ErrorKind::DimensionMismatch,
                std::string(where) + ": expected a square matrix, got " + std::to_string(a.rows()) +
                    "x" + std::to_string(a.cols()));
  }
}

inline void require_same_shape(const ComplexMatrix& a, const ComplexMatrix& b, const char* where) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw Error(ErrorKind::DimensionMismatch,
                std::string(where) + ": shapes " + std::to_string(a.rows()) + "x" +
                    std::to_string(a.cols()) + " and " + std::to_string(b.rows()) + "x" +
                    std::to_string(b.cols()) + " differ");
  }
}

inline ComplexMatrix hermitian_part(const ComplexMatrix& a) { return 0.5 * (a + a.adjoint()); }

/// Largest singular value.
inline double spectral_norm(const ComplexMatrix& a) {
  if (a.size() == 0) return 0.0;
  Eigen::JacobiSVD<ComplexMatrix> svd(a);
  return svd.singularValues()(0);
}

/// Eigenvalues of the Hermitian part, ascending.
inline RealVector hermitian_eigenvalues(const ComplexMatrix& a) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(hermitian_part(a), Eigen::EigenvaluesOnly);
  return solver.eigenvalues();
}

/// Spectral norm of the Hermitian part (max |eigenvalue|).
inline double hermitian_norm(const ComplexMatrix& a) {
  const RealVector ev = hermitian_eigenvalues(a);
  return std::max(std::abs(ev(0)), std::abs(ev(ev.size() - 1)));
}

// ---------------------------------------------------------------------------
// Hermitian eigendecomposition
// ---------------------------------------------------------------------------

struct EigenSystem {
  RealVector values;      // descending
  ComplexMatrix vectors;  // unitary, columns match values
};

namespace detail {

// Rotate a column so its (first) largest-magnitude entry is real positive.
inline void normalize_phase(Eigen::Ref<Eigen::VectorXcd> v) {
  double best = 0.0;
  for (Index i = 0; i < v.size(); ++i) best = std::max(best, std::abs(v(i)));
  if (best == 0.0) return;
  for (Index i = 0; i < v.size(); ++i) {
    if (std::abs(v(i)) >= best * (1.0 - 1e-6)) {
      v *= std::conj(v(i)) / std::abs(v(i));
      return;
    }
  }
}

inline bool rounded_less(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b) {
  for (Index i = 0; i < a.size(); ++i) {
    const auto ra = std::llround(a(i).real() * 1e8), rb = std::llround(b(i).real() * 1e8);
    if (ra != rb) return ra < rb;
    const auto ia = std::llround(a(i).imag() * 1e8), ib = std::llround(b(i).imag() * 1e8);
    if (ia != ib) return ia < ib;
  }
  return false;
}

// Fix phases, then order eigenvectors inside each eigenvalue cluster
// lexicographically so identical input always yields identical output.
inline void canonicalize(const RealVector& values, ComplexMatrix& vectors) {
  const Index n = values.size();
  for (Index j = 0; j < n; ++j) normalize_phase(vectors.col(j));
  const double scale = n > 0 ? std::max(std::abs(values(0)), std::abs(values(n - 1))) : 0.0;
  const double cluster = 4.0 * static_cast<double>(n) * kMachineEpsilon * scale;
  Index start = 0;
  while (start < n) {
    Index end = start + 1;
    while (end < n && values(end - 1) - values(end) <= cluster) ++end;
    if (end - start > 1) {
      std::vector<Eigen::VectorXcd> cols;
      for (Index j = start; j < end; ++j) cols.emplace_back(vectors.col(j));
      std::stable_sort(cols.begin(), cols.end(), rounded_less);
      for (Index j = start; j < end; ++j) vectors.col(j) = cols[static_cast<std::size_t>(j - start)];
    }
    start = end;
  }
}

}  // namespace detail

/// Eigendecomposition of a Hermitian matrix, eigenvalues descending.
/// The input is symmetrized as (A+A*)/2 after the symmetry check.
inline EigenSystem hermitian_eig(const ComplexMatrix& a, const Tolerance& tol = {}) {
  require_finite(a, "hermitian_eig");
  require_square(a, "hermitian_eig");
  const double asym = (a - a.adjoint()).norm();
  if (asym > tol.rel * a.norm() + tol.abs) {
    throw Error(ErrorKind::NotHermitian,
                "hermitian_eig: ||A - A*|| = " + std::to_string(asym) + " exceeds tolerance");
  }
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(hermitian_part(a));
  const Index n = a.rows();
  EigenSystem out{RealVector(n), ComplexMatrix(n, n)};
  for (Index i = 0; i < n; ++i) {
    out.values(i) = solver.eigenvalues()(n - 1 - i);
    out.vectors.col(i) = solver.eigenvectors().col(n - 1 - i);
  }
  detail::canonicalize(out.values, out.vectors);
  return out;
}

// ---------------------------------------------------------------------------
// PSD matrices
// ---------------------------------------------------------------------------

/// Hermitian positive semidefinite matrix held with its eigendecomposition.
class PsdMatrix {
 public:
  /// Tiny negative eigenvalues (>= -(rel*scale + abs)) are clamped to zero.
  static PsdMatrix from_hermitian(const ComplexMatrix& a, const Tolerance& tol = {}) {
    EigenSystem es = hermitian_eig(a, tol);
    const Index n = es.values.size();
    const double scale = std::max(std::abs(es.values(0)), std::abs(es.values(n - 1)));
    const double floor = tol.rel * scale + tol.abs;
    for (Index i = 0; i < n; ++i) {
      if (es.values(i) < 0.0) {
        if (es.values(i) < -floor) {
          throw Error(ErrorKind::NotPsd, "eigenvalue " + std::to_string(es.values(i)) +
                                             " below clamp floor -" + std::to_string(floor));
        }
        es.values(i) = 0.0;
      }
    }
    return PsdMatrix(std::move(es.values), std::move(es.vectors));
  }

  /// Trusted constructor: `vectors` must be unitary; values are sorted here.
  static PsdMatrix from_eigensystem(RealVector values, ComplexMatrix vectors) {
    if (values.size() != vectors.cols() || vectors.rows() != vectors.cols() || values.size() == 0) {
      throw Error(ErrorKind::DimensionMismatch, "PsdMatrix: eigensystem shape mismatch");
    }
    for (Index i = 0; i < values.size(); ++i) {
      if (!(values(i) >= 0.0) || !std::isfinite(values(i))) {
        throw Error(ErrorKind::NotPsd, "PsdMatrix: eigenvalue " + std::to_string(values(i)));
      }
      values(i) = std::max(values(i), 0.0);  // drops -0.0
    }
    return PsdMatrix(std::move(values), std::move(vectors));
  }

  static PsdMatrix identity(Index n) {
    return PsdMatrix(RealVector::Ones(n), ComplexMatrix::Identity(n, n));
  }

  Index dim() const { return values_.size(); }
  const RealVector& eigenvalues() const { return values_; }
  const ComplexMatrix& eigenvectors() const { return vectors_; }
  const ComplexMatrix& matrix() const { return dense_; }
  double max_eigenvalue() const { return values_(0); }
  double min_eigenvalue() const { return values_(values_.size() - 1); }

  Index rank(double cutoff) const {
    return static_cast<Index>((values_.array() > cutoff).count());
  }

  /// f applied to the spectrum; f must map [0, inf) into [0, inf).
  template <class F>
  PsdMatrix map_spectrum(F&& f) const {
    RealVector mapped(values_.size());
    for (Index i = 0; i < values_.size(); ++i) mapped(i) = f(values_(i));
    return from_eigensystem(std::move(mapped), vectors_);
  }

  PsdMatrix shifted(double r) const {
    return map_spectrum([r](double x) { return x + r; });
  }

  PsdMatrix scaled(double c) const {
    return map_spectrum([c](double x) { return c * x; });
  }

  /// W A W* for a unitary W, kept exactly PSD by transporting the eigenbasis.
  PsdMatrix unitary_congruence(const ComplexMatrix& w) const {
    return PsdMatrix(values_, w * vectors_);
  }

 private:
  PsdMatrix(RealVector values, ComplexMatrix vectors)
      : values_(std::move(values)), vectors_(std::move(vectors)) {
    sort_descending();
    dense_ = hermitian_part(vectors_ * values_.cast<Complex>().asDiagonal() * vectors_.adjoint());
  }

  void sort_descending() {
    const Index n = values_.size();
    std::vector<Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Index{0});
    std::stable_sort(order.begin(), order.end(),
                     [this](Index a, Index b) { return values_(a) > values_(b); });
    if (std::is_sorted(order.begin(), order.end())) return;
    RealVector v(n);
    ComplexMatrix u(vectors_.rows(), n);
    for (Index i = 0; i < n; ++i) {
      v(i) = values_(order[static_cast<std::size_t>(i)]);
      u.col(i) = vectors_.col(order[static_cast<std::size_t>(i)]);
    }
    values_ = std::move(v);
    vectors_ = std::move(u);
  }

  RealVector values_;
  ComplexMatrix vectors_;
  ComplexMatrix dense_;
};

/// Positive square root.
inline PsdMatrix psd_sqrt(const PsdMatrix& a) {
  return a.map_spectrum([](double x) { return std::sqrt(x); });
}

/// |X| = (X*X)^{1/2}, assembled from the singular value decomposition of X.
inline PsdMatrix operator_abs(const ComplexMatrix& x) {
  require_finite(x, "operator_abs");
  Eigen::JacobiSVD<ComplexMatrix> svd(x, Eigen::ComputeFullV);
  RealVector values = RealVector::Zero(x.cols());
  values.head(svd.singularValues().size()) = svd.singularValues();
  return PsdMatrix::from_eigensystem(std::move(values), svd.matrixV());
}

/// Generalized inverse square root: eigenvalues above `cutoff` map to
/// lambda^{-1/2}, the rest to zero.
inline PsdMatrix generalized_inverse_half(const PsdMatrix& a, double cutoff) {
  if (!(cutoff > 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "generalized_inverse_half: cutoff must be positive");
  }
  return a.map_spectrum([cutoff](double x) { return x > cutoff ? 1.0 / std::sqrt(x) : 0.0; });
}

inline PsdMatrix generalized_inverse_half(const PsdMatrix& a, const Tolerance& tol = {}) {
  const double cutoff = tol.rel * a.max_eigenvalue();
  return generalized_inverse_half(a, cutoff > 0.0 ? cutoff : tol.abs);
}

// ---------------------------------------------------------------------------
// partial isometries and polar decomposition
// ---------------------------------------------------------------------------

/// V with V*V and VV* orthogonal projections. The projections keep their
/// eigenbases so the kernel and cokernel bases are available for completion.
class PartialIsometry {
 public:
  /// Left factor `u` and right factor `w` unitary; V = u_r w_r^*.
  static PartialIsometry from_factors(ComplexMatrix u, ComplexMatrix w, Index rank) {
    const Index n = u.rows();
    for (Index j = rank; j < n; ++j) {
      detail::normalize_phase(u.col(j));
      detail::normalize_phase(w.col(j));
    }
    RealVector ones = RealVector::Zero(n);
    ones.head(rank).setOnes();
    ComplexMatrix v = u.leftCols(rank) * w.leftCols(rank).adjoint();
    return PartialIsometry(std::move(v), PsdMatrix::from_eigensystem(ones, std::move(w)),
                           PsdMatrix::from_eigensystem(ones, std::move(u)), rank);
  }

  /// Validates that `m` is a partial isometry (singular values 0 or 1).
  static PartialIsometry from_matrix(const ComplexMatrix& m, const Tolerance& tol = {});

  const ComplexMatrix& matrix() const { return matrix_; }
  const PsdMatrix& initial_projection() const { return initial_; }
  const PsdMatrix& final_projection() const { return final_; }
  Index rank() const { return rank_; }
  Index dim() const { return matrix_.rows(); }

 private:
  PartialIsometry(ComplexMatrix m, PsdMatrix initial, PsdMatrix final_proj, Index rank)
      : matrix_(std::move(m)), initial_(std::move(initial)), final_(std::move(final_proj)),
        rank_(rank) {}

  ComplexMatrix matrix_;
  PsdMatrix initial_;
  PsdMatrix final_;
  Index rank_;
};

struct PolarDecomposition {
  PartialIsometry isometry;  // vanishes on ker|X|
  PsdMatrix modulus;         // |X|
};

/// X = V |X| with V a partial isometry whose initial space is the support
/// of |X|. Numerical rank uses the cutoff tol.rel * sigma_max.
inline PolarDecomposition polar_decompose(const ComplexMatrix& x, const Tolerance& tol = {}) {
  require_finite(x, "polar_decompose");
  require_square(x, "polar_decompose");
  Eigen::JacobiSVD<ComplexMatrix> svd(x, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const RealVector& sigma = svd.singularValues();
  const double cutoff = tol.rel * sigma(0);
  const Index rank = sigma(0) > 0.0 ? static_cast<Index>((sigma.array() > cutoff).count()) : 0;
  PsdMatrix modulus = PsdMatrix::from_eigensystem(sigma, svd.matrixV());
  return {PartialIsometry::from_factors(svd.matrixU(), svd.matrixV(), rank), std::move(modulus)};
}

inline PartialIsometry PartialIsometry::from_matrix(const ComplexMatrix& m, const Tolerance& tol) {
  PolarDecomposition polar = polar_decompose(m, tol);
  const RealVector& s = polar.modulus.eigenvalues();
  for (Index i = 0; i < polar.isometry.rank(); ++i) {
    if (std::abs(s(i) - 1.0) > tol.rel) {
      throw Error(ErrorKind::NotPartialIsometry,
                  "singular value " + std::to_string(s(i)) + " is neither 0 nor 1");
    }
  }
  return std::move(polar.isometry);
}

/// Unitary W with W * initial_projection = V: the orthonormal kernel basis is
/// paired with the orthonormal cokernel basis column by column.
inline ComplexMatrix extend_to_unitary(const PartialIsometry& v) {
  const Index n = v.dim();
  const Index k = n - v.rank();
  const ComplexMatrix& coker = v.final_projection().eigenvectors();
  const ComplexMatrix& ker = v.initial_projection().eigenvectors();
  if (coker.cols() != n || ker.cols() != n) {
    throw Error(ErrorKind::DimensionMismatch, "extend_to_unitary: kernel/cokernel sizes differ");
  }
  return v.matrix() + coker.rightCols(k) * ker.rightCols(k).adjoint();
}

// ---------------------------------------------------------------------------
// Loewner order
// ---------------------------------------------------------------------------

/// lambda_min of the Hermitian part of (rhs - lhs); "lhs <= rhs" iff >= 0.
inline double loewner_margin(const ComplexMatrix& lhs, const ComplexMatrix& rhs) {
  require_square(lhs, "loewner_margin");
  require_same_shape(lhs, rhs, "loewner_margin");
  return hermitian_eigenvalues(rhs - lhs)(0);
}

inline double loewner_scale(const ComplexMatrix& lhs, const ComplexMatrix& rhs) {
  return std::max(1.0, hermitian_norm(lhs) + hermitian_norm(rhs));
}

inline bool loewner_accepts(double margin, double scale, const Tolerance& tol = {}) {
  return margin >= -tol.rel * scale;
}

inline bool loewner_leq(const ComplexMatrix& lhs, const ComplexMatrix& rhs,
                        const Tolerance& tol = {}) {
  return loewner_accepts(loewner_margin(lhs, rhs), loewner_scale(lhs, rhs), tol);
}

// ---------------------------------------------------------------------------
// operator classes
// ---------------------------------------------------------------------------

enum class OperatorClass { normal, contraction, semi_hyponormal, psd, unitary, projection };

inline bool classify(const ComplexMatrix& x, OperatorClass kind, const Tolerance& tol = {}) {
  require_finite(x, "classify");
  require_square(x, "classify");
  const double n = static_cast<double>(x.rows());
  const ComplexMatrix id = ComplexMatrix::Identity(x.rows(), x.cols());
  switch (kind) {
    case OperatorClass::normal: {
      // Loose enough that semi-hyponormal (|X*| <= |X| at tolerance) implies
      // normal: the trace argument amplifies the slack by at most 2 n^2.
      const double s = std::max(1.0, spectral_norm(x));
      const double commutator = (x * x.adjoint() - x.adjoint() * x).norm();
      return commutator <= 4.0 * n * n * tol.rel * s * s + tol.abs;
    }
    case OperatorClass::contraction:
      return spectral_norm(x) <= 1.0 + tol.rel;
    case OperatorClass::semi_hyponormal: {
      const double s = std::max(1.0, spectral_norm(x));
      const double m = loewner_margin(operator_abs(x.adjoint()).matrix(), operator_abs(x).matrix());
      return m >= -tol.rel * s;
    }
    case OperatorClass::psd: {
      if ((x - x.adjoint()).norm() > tol.rel * x.norm() + tol.abs) return false;
      const RealVector ev = hermitian_eigenvalues(x);
      return ev(0) >= -tol.rel * std::max(1.0, hermitian_norm(x));
    }
    case OperatorClass::unitary:
      return (x.adjoint() * x - id).norm() <= tol.rel * n + tol.abs;
    case OperatorClass::projection:
      if ((x - x.adjoint()).norm() > tol.rel * x.norm() + tol.abs) return false;
      return (x * x - x).norm() <= tol.rel * n + tol.abs;
  }
  return false;
}

}  // namespace oplab
