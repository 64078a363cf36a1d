#pragma once

// Certificate-producing verifiers. Each certifier builds the comparison
// isometry exactly as the corresponding proof does (adjoint of the unitary
// part of the polar decomposition of the mapped operator), assembles both
// sides and records the Loewner margin.

#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "oplab/linalg.hpp"
#include "oplab/means.hpp"
#include "oplab/posmaps.hpp"

namespace oplab {

enum class TheoremId {
  ThmBH,
  CorCons2Plus,
  CorCons2Minus,
  CorRD1,
  ThmSemi,
  CorGeo1,
  BetaFamily,
  SchurProduct,
  EigSchur,
  NuBound,
  RussoDyeNorm,
  MuDoubling,
};

inline constexpr TheoremId kAllTheorems[] = {
    TheoremId::ThmBH,        TheoremId::CorCons2Plus, TheoremId::CorCons2Minus, TheoremId::CorRD1,
    TheoremId::ThmSemi,      TheoremId::CorGeo1,      TheoremId::BetaFamily,    TheoremId::SchurProduct,
    TheoremId::EigSchur,     TheoremId::NuBound,      TheoremId::RussoDyeNorm,  TheoremId::MuDoubling,
};

constexpr std::string_view to_string(TheoremId id) {
  switch (id) {
    case TheoremId::ThmBH: return "ThmBH";
    case TheoremId::CorCons2Plus: return "CorCons2Plus";
    case TheoremId::CorCons2Minus: return "CorCons2Minus";
    case TheoremId::CorRD1: return "CorRD1";
    case TheoremId::ThmSemi: return "ThmSemi";
    case TheoremId::CorGeo1: return "CorGeo1";
    case TheoremId::BetaFamily: return "BetaFamily";
    case TheoremId::SchurProduct: return "SchurProduct";
    case TheoremId::EigSchur: return "EigSchur";
    case TheoremId::NuBound: return "NuBound";
    case TheoremId::RussoDyeNorm: return "RussoDyeNorm";
    case TheoremId::MuDoubling: return "MuDoubling";
  }
  return "Unknown";
}

inline std::optional<TheoremId> theorem_from_string(std::string_view name) {
  for (TheoremId id : kAllTheorems) {
    if (to_string(id) == name) return id;
  }
  return std::nullopt;
}

/// Right-hand side shape: geometric mean A # VAV*, or beta*A + VAV*/(4 beta).
enum class RhsForm { geometric, beta };

struct InequalityCertificate {
  TheoremId theorem = TheoremId::ThmBH;
  RhsForm form = RhsForm::geometric;
  std::optional<double> beta;
  ComplexMatrix lhs;
  ComplexMatrix rhs;
  ComplexMatrix V;
  double margin = 0.0;
  double scale = 1.0;  // max(1, ||lhs|| + ||rhs||)
  bool accepted = false;
  std::map<std::string, double> aux;

  /// margin / scale, the quantity the acceptance threshold is stated in.
  double relative_margin() const { return margin / scale; }
};

inline void finalize(InequalityCertificate& cert, const Tolerance& tol) {
  cert.margin = loewner_margin(cert.lhs, cert.rhs);
  cert.scale = loewner_scale(cert.lhs, cert.rhs);
  cert.accepted = loewner_accepts(cert.margin, cert.scale, tol);
}

// ---------------------------------------------------------------------------
// Halmos dilation
// ---------------------------------------------------------------------------

struct HalmosDilation {
  ComplexMatrix Z;
  ComplexMatrix U;  // [[Z, -(I - ZZ*)^{1/2}], [(I - Z*Z)^{1/2}, Z*]]
};

inline HalmosDilation halmos_dilate(const ComplexMatrix& z, const Tolerance& tol = {}) {
  require_finite(z, "halmos_dilate");
  require_square(z, "halmos_dilate");
  const double sigma = spectral_norm(z);
  if (sigma > 1.0 + tol.rel) {
    throw Error(ErrorKind::NotContraction, "halmos_dilate: sigma_max = " + std::to_string(sigma));
  }
  const Index n = z.rows();
  const ComplexMatrix id = ComplexMatrix::Identity(n, n);
  // Defect eigenvalues at roundoff level are zeroed before the square root.
  const double noise = 8.0 * static_cast<double>(n) * kMachineEpsilon;
  auto defect_root = [&](const ComplexMatrix& d) {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(hermitian_part(d));
    RealVector root = solver.eigenvalues();
    for (Index i = 0; i < n; ++i) root(i) = root(i) > noise ? std::sqrt(root(i)) : 0.0;
    return ComplexMatrix(solver.eigenvectors() * root.cast<Complex>().asDiagonal() *
                         solver.eigenvectors().adjoint());
  };
  HalmosDilation out{z, ComplexMatrix(2 * n, 2 * n)};
  out.U.topLeftCorner(n, n) = z;
  out.U.topRightCorner(n, n) = -defect_root(id - z * z.adjoint());
  out.U.bottomLeftCorner(n, n) = defect_root(id - z.adjoint() * z);
  out.U.bottomRightCorner(n, n) = z.adjoint();
  return out;
}

// ---------------------------------------------------------------------------
// normal operators
// ---------------------------------------------------------------------------

namespace detail {

struct ComparisonPair {
  PsdMatrix modulus;  // |Phi(N)|
  PsdMatrix base;     // Phi(|N|)
  PsdMatrix rotated;  // V Phi(|N|) V*
  ComplexMatrix V;
};

// Phi(N) = W |Phi(N)| with W the unitary completion of the polar part; the
// comparison isometry is V = W*.
inline ComparisonPair comparison_pair(const PositiveMap& map, const ComplexMatrix& n, const Tolerance& tol) {
  const ComplexMatrix image = map.apply(n);
  PolarDecomposition polar = polar_decompose(image, tol);
  const ComplexMatrix v = extend_to_unitary(polar.isometry).adjoint();
  PsdMatrix base = PsdMatrix::from_hermitian(map.apply(operator_abs(n).matrix()), tol);
  PsdMatrix rotated = base.unitary_congruence(v);
  return {std::move(polar.modulus), std::move(base), std::move(rotated), v};
}

inline void require_normal(const ComplexMatrix& n, const Tolerance& tol, const char* where) {
  require_finite(n, where);
  require_square(n, where);
  if (!classify(n, OperatorClass::normal, tol)) {
    throw Error(ErrorKind::NotNormal, std::string(where) + ": operand is not normal");
  }
}

inline void require_input_dim(const PositiveMap& map, const ComplexMatrix& x, const char* where) {
  if (x.rows() != map.input_dim() || x.cols() != map.input_dim()) {
    throw Error(ErrorKind::DimensionMismatch, std::string(where) + ": operand is " + std::to_string(x.rows()) +
                                                  "x" + std::to_string(x.cols()) + ", map input is " +
                                                  std::to_string(map.input_dim()));
  }
}

inline ComplexMatrix beta_rhs(const ComparisonPair& p, double beta) {
  return beta * p.base.matrix() + (0.25 / beta) * p.rotated.matrix();
}

}  // namespace detail

/// |Phi(N)| <= Phi(|N|) # V Phi(|N|) V* for normal N.
inline InequalityCertificate certify_normal_geo(const PositiveMap& map, const ComplexMatrix& n,
                                                const Tolerance& tol = {}) {
  detail::require_normal(n, tol, "certify_normal_geo");
  detail::require_input_dim(map, n, "certify_normal_geo");
  detail::ComparisonPair pair = detail::comparison_pair(map, n, tol);
  MeanResult mean = geometric_mean(pair.base, pair.rotated);

  InequalityCertificate cert;
  cert.theorem = TheoremId::ThmBH;
  cert.form = RhsForm::geometric;
  cert.lhs = pair.modulus.matrix();
  cert.rhs = mean.value.matrix();
  cert.V = pair.V;
  finalize(cert, tol);

  // The arithmetic mean dominates the geometric one.
  const ComplexMatrix arith = detail::beta_rhs(pair, 0.5);
  cert.aux["arithmetic_margin"] = loewner_margin(cert.lhs, arith);
  cert.aux["chain_margin"] = loewner_margin(cert.rhs, arith);
  cert.aux["chain_scale"] = loewner_scale(cert.rhs, arith);
  cert.aux["mean_converged"] = mean.converged ? 1.0 : 0.0;
  cert.aux["mean_final_distance"] = mean.final_distance();
  return cert;
}

/// |Phi(N)| <= beta Phi(|N|) + 1/(4 beta) V Phi(|N|) V* for normal N.
inline InequalityCertificate certify_normal_beta(const PositiveMap& map, const ComplexMatrix& n, double beta,
                                                 const Tolerance& tol = {}) {
  if (!(beta > 0.0) || !std::isfinite(beta)) {
    throw Error(ErrorKind::InvalidArgument, "certify_normal_beta: beta must be positive");
  }
  detail::require_normal(n, tol, "certify_normal_beta");
  detail::require_input_dim(map, n, "certify_normal_beta");
  detail::ComparisonPair pair = detail::comparison_pair(map, n, tol);

  InequalityCertificate cert;
  cert.theorem = TheoremId::BetaFamily;
  cert.form = RhsForm::beta;
  cert.beta = beta;
  cert.lhs = pair.modulus.matrix();
  cert.rhs = detail::beta_rhs(pair, beta);
  cert.V = pair.V;
  finalize(cert, tol);
  return cert;
}

// ---------------------------------------------------------------------------
// Hermitian and skew parts
// ---------------------------------------------------------------------------

enum class Sign { plus, minus };

/// |Phi(X +- X*)| against Phi(|X| + |X*|): beta = 1/2 is the arithmetic
/// form, beta = 1 the "A + B/4" form. Certified through the lift
/// Psi([[A, B], [C, D]]) = Phi(A + B + C + D) applied to [[0, X], [X*, 0]]
/// (X replaced by iX for the minus sign).
inline InequalityCertificate certify_hermitian_parts(const PositiveMap& map, const ComplexMatrix& x, Sign sign,
                                                     double beta = 0.5, const Tolerance& tol = {}) {
  require_finite(x, "certify_hermitian_parts");
  detail::require_input_dim(map, x, "certify_hermitian_parts");
  const Index n = x.rows();
  const ComplexMatrix y = sign == Sign::plus ? x : ComplexMatrix(Complex(0.0, 1.0) * x);
  ComplexMatrix block = ComplexMatrix::Zero(2 * n, 2 * n);
  block.topRightCorner(n, n) = y;
  block.bottomLeftCorner(n, n) = y.adjoint();

  InequalityCertificate cert = certify_normal_beta(PositiveMap::lift_sum(map), block, beta, tol);
  cert.theorem = sign == Sign::plus ? TheoremId::CorCons2Plus : TheoremId::CorCons2Minus;
  const ComplexMatrix direct =
      operator_abs(map.apply(sign == Sign::plus ? ComplexMatrix(x + x.adjoint()) : ComplexMatrix(x - x.adjoint())))
          .matrix();
  cert.aux["lift_discrepancy"] = (direct - cert.lhs).norm();
  return cert;
}

// ---------------------------------------------------------------------------
// contractions
// ---------------------------------------------------------------------------

enum class ContractionForm { geometric, arithmetic };

/// |Phi(Z)| <= Phi(I) # V Phi(I) V* (or the arithmetic form) for a
/// contraction Z, via the Halmos dilation and Psi([[A, B], [C, D]]) = Phi(A).
inline InequalityCertificate certify_contraction(const PositiveMap& map, const ComplexMatrix& z,
                                                 ContractionForm form = ContractionForm::geometric,
                                                 const Tolerance& tol = {}) {
  detail::require_input_dim(map, z, "certify_contraction");
  const HalmosDilation dilation = halmos_dilate(z, tol);
  const PositiveMap corner = PositiveMap::lift_corner(map);
  InequalityCertificate cert = form == ContractionForm::geometric
                                   ? certify_normal_geo(corner, dilation.U, tol)
                                   : certify_normal_beta(corner, dilation.U, 0.5, tol);
  cert.theorem = TheoremId::CorRD1;
  const double norm_image = spectral_norm(map.apply(z));
  const double norm_unit = hermitian_norm(map.apply(ComplexMatrix::Identity(z.rows(), z.cols())));
  cert.aux["norm_phi_z"] = norm_image;
  cert.aux["norm_phi_identity"] = norm_unit;
  cert.aux["russo_dye_gap"] = norm_unit - norm_image;
  return cert;
}

/// Classical Russo-Dye bound ||Phi(Z)|| <= ||Phi(I)|| as a 1x1 certificate.
inline InequalityCertificate certify_russo_dye_norm(const PositiveMap& map, const ComplexMatrix& z,
                                                    const Tolerance& tol = {}) {
  detail::require_input_dim(map, z, "certify_russo_dye_norm");
  if (!classify(z, OperatorClass::contraction, tol)) {
    throw Error(ErrorKind::NotContraction, "certify_russo_dye_norm: operand is not a contraction");
  }
  InequalityCertificate cert;
  cert.theorem = TheoremId::RussoDyeNorm;
  cert.lhs = ComplexMatrix::Constant(1, 1, spectral_norm(map.apply(z)));
  cert.rhs = ComplexMatrix::Constant(1, 1, hermitian_norm(map.apply(ComplexMatrix::Identity(z.rows(), z.cols()))));
  cert.V = ComplexMatrix::Identity(1, 1);
  finalize(cert, tol);
  return cert;
}

// ---------------------------------------------------------------------------
// sums of semi-hyponormal operators
// ---------------------------------------------------------------------------

/// |Phi(sum S_k)| <= Phi(sum |S_k|) # V Phi(sum |S_k|) V*.
/// Follows the proof: S = S_1 (+) ... (+) S_m, Psi(X) = Phi(sum of diagonal
/// blocks), Lambda(X) = Psi(|S|^{1/2} X |S|^{1/2}) and the contraction
/// Y = |S|^{-1/2} S |S|^{-1/2}, then the contraction certificate for
/// (Lambda, Y). aux["y_sigma_max"] records ||Y||.
inline InequalityCertificate certify_sum_normals(const PositiveMap& map, const std::vector<ComplexMatrix>& terms,
                                                 const Tolerance& tol = {}) {
  if (terms.empty()) throw Error(ErrorKind::InvalidArgument, "certify_sum_normals: empty family");
  const Index n = map.input_dim();
  const auto m = static_cast<Index>(terms.size());
  for (const auto& s : terms) {
    detail::require_input_dim(map, s, "certify_sum_normals");
    require_finite(s, "certify_sum_normals");
    if (!classify(s, OperatorClass::semi_hyponormal, tol)) {
      throw Error(ErrorKind::NotSemiHyponormal, "certify_sum_normals: |S*| <= |S| fails");
    }
  }
  ComplexMatrix direct_sum = ComplexMatrix::Zero(m * n, m * n);
  std::vector<ComplexMatrix> embeddings;
  for (Index k = 0; k < m; ++k) {
    direct_sum.block(k * n, k * n, n, n) = terms[static_cast<std::size_t>(k)];
    ComplexMatrix e = ComplexMatrix::Zero(m * n, n);
    e.block(k * n, 0, n, n).setIdentity();
    embeddings.push_back(std::move(e));
  }
  const PositiveMap summing = PositiveMap::compose(map, PositiveMap::kraus(std::move(embeddings)));

  const PsdMatrix modulus = operator_abs(direct_sum);
  const ComplexMatrix root = psd_sqrt(modulus).matrix();
  const ComplexMatrix inv_root = generalized_inverse_half(modulus, tol).matrix();
  const ComplexMatrix y = inv_root * direct_sum * inv_root;
  const double y_norm = spectral_norm(y);
  if (y_norm > 1.0 + tol.rel) {
    throw Error(ErrorKind::NotContraction, "certify_sum_normals: ||Y|| = " + std::to_string(y_norm));
  }
  const PositiveMap weighted = PositiveMap::compose(summing, PositiveMap::kraus({root}));

  InequalityCertificate cert = certify_contraction(weighted, y, ContractionForm::geometric, tol);
  cert.theorem = TheoremId::ThmSemi;
  cert.aux.erase("norm_phi_z");
  cert.aux.erase("norm_phi_identity");
  cert.aux.erase("russo_dye_gap");
  cert.aux["y_sigma_max"] = y_norm;

  ComplexMatrix sum = ComplexMatrix::Zero(n, n);
  ComplexMatrix abs_sum = ComplexMatrix::Zero(n, n);
  for (const auto& s : terms) {
    sum += s;
    abs_sum += operator_abs(s).matrix();
  }
  cert.aux["lhs_discrepancy"] = (operator_abs(map.apply(sum)).matrix() - cert.lhs).norm();
  cert.aux["unit_discrepancy"] = (weighted.apply(ComplexMatrix::Identity(m * n, m * n)) - map.apply(abs_sum)).norm();
  return cert;
}

/// Cartesian decomposition Z = X + iY:
/// |Phi(Z)| <= Phi(|X| + |Y|) # V Phi(|X| + |Y|) V*.
/// aux["arithmetic_margin"] is the arithmetic-mean form with the same V,
/// which for the identity map is |Z| <= (|X|+|Y| + V(|X|+|Y|)V*)/2.
inline InequalityCertificate certify_cartesian(const PositiveMap& map, const ComplexMatrix& z,
                                               const Tolerance& tol = {}) {
  require_finite(z, "certify_cartesian");
  detail::require_input_dim(map, z, "certify_cartesian");
  const ComplexMatrix real_part = hermitian_part(z);
  const ComplexMatrix imag_part = (z - z.adjoint()) / Complex(0.0, 2.0);
  InequalityCertificate cert =
      certify_sum_normals(map, {real_part, ComplexMatrix(Complex(0.0, 1.0) * imag_part)}, tol);
  cert.theorem = TheoremId::CorGeo1;

  // Arithmetic form against Phi(|X| + |Y|) directly.
  const PsdMatrix base = PsdMatrix::from_hermitian(
      map.apply(operator_abs(real_part).matrix() + operator_abs(imag_part).matrix()), tol);
  const ComplexMatrix arith = 0.5 * (base.matrix() + base.unitary_congruence(cert.V).matrix());
  cert.aux["arithmetic_margin"] = loewner_margin(cert.lhs, arith);
  return cert;
}

// ---------------------------------------------------------------------------
// Schur products
// ---------------------------------------------------------------------------

/// |A o B| <= |A| o |B| + 1/4 V (|A| o |B|) V* for normal A, B.
inline InequalityCertificate certify_schur_product(const ComplexMatrix& a, const ComplexMatrix& b,
                                                   const Tolerance& tol = {}) {
  detail::require_normal(a, tol, "certify_schur_product");
  detail::require_normal(b, tol, "certify_schur_product");
  require_same_shape(a, b, "certify_schur_product");
  const ComplexMatrix product = a.cwiseProduct(b);
  PolarDecomposition polar = polar_decompose(product, tol);
  const PsdMatrix base =
      PsdMatrix::from_hermitian(operator_abs(a).matrix().cwiseProduct(operator_abs(b).matrix()), tol);

  InequalityCertificate cert;
  cert.theorem = TheoremId::SchurProduct;
  cert.form = RhsForm::beta;
  cert.beta = 1.0;
  cert.V = extend_to_unitary(polar.isometry).adjoint();
  cert.lhs = polar.modulus.matrix();
  cert.rhs = base.matrix() + 0.25 * base.unitary_congruence(cert.V).matrix();
  finalize(cert, tol);
  return cert;
}

struct EigSchurResult {
  double lhs = 0.0;  // lambda_k(|S o Z|)
  double rhs = 0.0;  // delta_j(S)
  bool pass = false;
};

/// lambda_k(|S o Z|) <= delta_j(S) for a contraction Z, where lambda_k is the
/// k-th largest eigenvalue and delta_j the j-th largest diagonal entry
/// (defaults k = 3, j = 2).
inline EigSchurResult check_eig_schur(const PsdMatrix& s, const ComplexMatrix& z, const Tolerance& tol = {},
                                      Index lambda_index = 3, Index delta_index = 2) {
  const Index n = s.dim();
  if (n < 3 || n < lambda_index || n < delta_index) {
    throw Error(ErrorKind::DimensionTooSmall, "check_eig_schur: dimension " + std::to_string(n));
  }
  if (lambda_index < 1 || delta_index < 1) {
    throw Error(ErrorKind::InvalidArgument, "check_eig_schur: indices are 1-based");
  }
  if (z.rows() != n || z.cols() != n) {
    throw Error(ErrorKind::DimensionMismatch, "check_eig_schur: Z shape differs from S");
  }
  if (!classify(z, OperatorClass::contraction, tol)) {
    throw Error(ErrorKind::NotContraction, "check_eig_schur: Z is not a contraction");
  }
  const PsdMatrix modulus = operator_abs(s.matrix().cwiseProduct(z));
  std::vector<double> diag(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) diag[static_cast<std::size_t>(i)] = s.matrix()(i, i).real();
  std::sort(diag.begin(), diag.end(), std::greater<>());

  EigSchurResult out;
  out.lhs = modulus.eigenvalues()(lambda_index - 1);
  out.rhs = diag[static_cast<std::size_t>(delta_index - 1)];
  out.pass = out.lhs <= out.rhs + tol.rel * std::max(1.0, diag.front());
  return out;
}

// ---------------------------------------------------------------------------
// hyponormal-type bound for invertible operators
// ---------------------------------------------------------------------------

struct NuBoundResult {
  double nu = 0.0;                              // ||A* A^{-1}||
  InequalityCertificate certificate;            // |A*| <= nu |A|
  InequalityCertificate squared_certificate;    // A A* <= nu^2 A* A
};

inline NuBoundResult nu_bound(const ComplexMatrix& a, const Tolerance& tol = {}) {
  require_finite(a, "nu_bound");
  require_square(a, "nu_bound");
  Eigen::JacobiSVD<ComplexMatrix> svd(a);
  const RealVector& sigma = svd.singularValues();
  if (sigma(sigma.size() - 1) <= tol.rel * sigma(0)) {
    throw Error(ErrorKind::Singular, "nu_bound: sigma_min = " + std::to_string(sigma(sigma.size() - 1)));
  }
  const ComplexMatrix ratio = a.adjoint() * a.partialPivLu().inverse();
  NuBoundResult out;
  out.nu = spectral_norm(ratio);

  out.certificate.theorem = TheoremId::NuBound;
  out.certificate.form = RhsForm::beta;
  out.certificate.lhs = operator_abs(a.adjoint()).matrix();
  out.certificate.rhs = out.nu * operator_abs(a).matrix();
  out.certificate.V = ComplexMatrix::Identity(a.rows(), a.cols());
  out.certificate.aux["nu"] = out.nu;
  finalize(out.certificate, tol);

  out.squared_certificate.theorem = TheoremId::NuBound;
  out.squared_certificate.form = RhsForm::beta;
  out.squared_certificate.lhs = hermitian_part(a * a.adjoint());
  out.squared_certificate.rhs = out.nu * out.nu * hermitian_part(a.adjoint() * a);
  out.squared_certificate.V = out.certificate.V;
  out.squared_certificate.aux["nu"] = out.nu;
  finalize(out.squared_certificate, tol);
  return out;
}

}  // namespace oplab
