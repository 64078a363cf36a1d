#pragma once

// Positive linear maps between matrix algebras in constructive form: Kraus
// sums, Schur multipliers, pinchings, the 2x2 block lifts and composition.

#include <memory>
#include <numeric>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "oplab/linalg.hpp"
#include "oplab/random.hpp"

namespace oplab {

class PositiveMap {
 public:
  /// X -> sum_i K_i^* X K_i, every K_i of shape input_dim x output_dim.
  struct Kraus {
    std::vector<ComplexMatrix> weights;
  };
  /// X -> S o X (entrywise). `checked` is false only for the unsafe bypass.
  struct Schur {
    ComplexMatrix multiplier;
    bool checked = true;
  };
  /// X -> sum_b P_b X P_b over an orthogonal partition of the coordinates.
  struct Pinching {
    std::vector<std::vector<Index>> partition;
  };
  /// [[A, B], [C, D]] -> inner(A + B + C + D).
  struct LiftSum {
    std::shared_ptr<const PositiveMap> inner;
  };
  /// [[A, B], [C, D]] -> inner(A).
  struct LiftCorner {
    std::shared_ptr<const PositiveMap> inner;
  };
  /// X -> outer(inner(X)).
  struct Compose {
    std::shared_ptr<const PositiveMap> outer;
    std::shared_ptr<const PositiveMap> inner;
  };
  using Variant = std::variant<Kraus, Schur, Pinching, LiftSum, LiftCorner, Compose>;

  static PositiveMap kraus(std::vector<ComplexMatrix> weights) {
    if (weights.empty()) throw Error(ErrorKind::InvalidArgument, "Kraus map needs at least one weight");
    const Index in = weights.front().rows(), out = weights.front().cols();
    for (const auto& k : weights) {
      require_finite(k, "Kraus weight");
      if (k.rows() != in || k.cols() != out) {
        throw Error(ErrorKind::DimensionMismatch, "Kraus weights must share one shape");
      }
    }
    return PositiveMap(Kraus{std::move(weights)}, in, out);
  }

  static PositiveMap schur(const PsdMatrix& multiplier) {
    return PositiveMap(Schur{multiplier.matrix(), true}, multiplier.dim(), multiplier.dim());
  }

  /// Accepts any square multiplier. Only for negative tests: the result need
  /// not be a positive map.
  static PositiveMap schur_unchecked(ComplexMatrix multiplier) {
    require_finite(multiplier, "Schur multiplier");
    require_square(multiplier, "Schur multiplier");
    const Index n = multiplier.rows();
    return PositiveMap(Schur{std::move(multiplier), false}, n, n);
  }

  static PositiveMap pinching(std::vector<std::vector<Index>> partition, Index dim) {
    if (dim < 1) throw Error(ErrorKind::InvalidDims, "pinching: dimension must be >= 1");
    std::vector<int> seen(static_cast<std::size_t>(dim), 0);
    for (const auto& block : partition) {
      if (block.empty()) throw Error(ErrorKind::InvalidArgument, "pinching: empty block");
      for (Index i : block) {
        if (i < 0 || i >= dim) {
          throw Error(ErrorKind::InvalidArgument, "pinching: index " + std::to_string(i) + " out of range");
        }
        if (seen[static_cast<std::size_t>(i)]++) {
          throw Error(ErrorKind::InvalidArgument, "pinching: index " + std::to_string(i) + " repeated");
        }
      }
    }
    for (Index i = 0; i < dim; ++i) {
      if (!seen[static_cast<std::size_t>(i)]) {
        throw Error(ErrorKind::InvalidArgument, "pinching: index " + std::to_string(i) + " not covered");
      }
    }
    return PositiveMap(Pinching{std::move(partition)}, dim, dim);
  }

  /// The identity map, as the Schur multiplier with all-ones matrix.
  static PositiveMap identity(Index n) {
    return PositiveMap(Schur{ComplexMatrix::Ones(n, n), true}, n, n);
  }

  static PositiveMap lift_sum(PositiveMap inner) {
    const Index in = 2 * inner.input_dim(), out = inner.output_dim();
    return PositiveMap(LiftSum{std::make_shared<const PositiveMap>(std::move(inner))}, in, out);
  }

  static PositiveMap lift_corner(PositiveMap inner) {
    const Index in = 2 * inner.input_dim(), out = inner.output_dim();
    return PositiveMap(LiftCorner{std::make_shared<const PositiveMap>(std::move(inner))}, in, out);
  }

  static PositiveMap compose(PositiveMap outer, PositiveMap inner) {
    if (outer.input_dim() != inner.output_dim()) {
      throw Error(ErrorKind::DimensionMismatch, "compose: outer input " + std::to_string(outer.input_dim()) +
                                                    " != inner output " + std::to_string(inner.output_dim()));
    }
    const Index in = inner.input_dim(), out = outer.output_dim();
    return PositiveMap(Compose{std::make_shared<const PositiveMap>(std::move(outer)),
                               std::make_shared<const PositiveMap>(std::move(inner))},
                       in, out);
  }

  Index input_dim() const { return input_dim_; }
  Index output_dim() const { return output_dim_; }
  const Variant& variant() const { return variant_; }

  ComplexMatrix apply(const ComplexMatrix& x) const {
    if (x.rows() != input_dim_ || x.cols() != input_dim_) {
      throw Error(ErrorKind::DimensionMismatch,
                  "apply: expected " + std::to_string(input_dim_) + "x" + std::to_string(input_dim_) +
                      " input, got " + std::to_string(x.rows()) + "x" + std::to_string(x.cols()));
    }
    return std::visit([&x](const auto& v) { return apply_variant(v, x); }, variant_);
  }

 private:
  PositiveMap(Variant v, Index in, Index out) : variant_(std::move(v)), input_dim_(in), output_dim_(out) {}

  static ComplexMatrix apply_variant(const Kraus& k, const ComplexMatrix& x) {
    ComplexMatrix out = ComplexMatrix::Zero(k.weights.front().cols(), k.weights.front().cols());
    for (const auto& w : k.weights) out.noalias() += w.adjoint() * x * w;
    return out;
  }

  static ComplexMatrix apply_variant(const Schur& s, const ComplexMatrix& x) {
    return s.multiplier.cwiseProduct(x);
  }

  static ComplexMatrix apply_variant(const Pinching& p, const ComplexMatrix& x) {
    ComplexMatrix out = ComplexMatrix::Zero(x.rows(), x.cols());
    for (const auto& block : p.partition) {
      for (Index i : block) {
        for (Index j : block) out(i, j) = x(i, j);
      }
    }
    return out;
  }

  static ComplexMatrix apply_variant(const LiftSum& l, const ComplexMatrix& x) {
    const Index n = x.rows() / 2;
    return l.inner->apply(x.topLeftCorner(n, n) + x.topRightCorner(n, n) + x.bottomLeftCorner(n, n) +
                          x.bottomRightCorner(n, n));
  }

  static ComplexMatrix apply_variant(const LiftCorner& l, const ComplexMatrix& x) {
    const Index n = x.rows() / 2;
    return l.inner->apply(x.topLeftCorner(n, n));
  }

  static ComplexMatrix apply_variant(const Compose& c, const ComplexMatrix& x) {
    return c.outer->apply(c.inner->apply(x));
  }

  Variant variant_;
  Index input_dim_;
  Index output_dim_;
};

inline ComplexMatrix apply(const PositiveMap& map, const ComplexMatrix& x) { return map.apply(x); }

/// Phi(I), certified positive semidefinite.
inline PsdMatrix unit_image(const PositiveMap& map, const Tolerance& tol = {}) {
  const ComplexMatrix id = ComplexMatrix::Identity(map.input_dim(), map.input_dim());
  return PsdMatrix::from_hermitian(map.apply(id), tol);
}

struct PositivityReport {
  bool pass = true;
  double worst_margin = 0.0;  // smallest lambda_min(Phi(G*G)) / max(1, ||Phi(G*G)||)
};

/// Samples G*G inputs and checks that their images stay positive.
inline PositivityReport positivity_sample_test(const PositiveMap& map, int trials, std::uint64_t seed,
                                               const Tolerance& tol = {}) {
  if (trials < 1) throw Error(ErrorKind::InvalidArgument, "positivity_sample_test: trials must be >= 1");
  Rng rng(seed);
  PositivityReport report;
  report.worst_margin = std::numeric_limits<double>::infinity();
  for (int t = 0; t < trials; ++t) {
    const ComplexMatrix image = map.apply(random_psd(map.input_dim(), rng));
    const RealVector ev = hermitian_eigenvalues(image);
    const double scale = std::max(1.0, hermitian_norm(image));
    report.worst_margin = std::min(report.worst_margin, ev(0) / scale);
    if (ev(0) < -tol.rel * scale) report.pass = false;
  }
  return report;
}

/// The 2x2 direct summands of the Schur-multiplier counterexample,
/// n = 1..N: S_n = [[1/n^2, 1/n], [1/n, 1]], A_n = [[0, 0], [1, 0]].
struct SchurBlockCounterexample {
  std::vector<Eigen::Matrix2cd> multiplier;    // S_n
  std::vector<Eigen::Matrix2cd> operand;       // A_n
  std::vector<Eigen::Matrix2cd> image_abs;     // S_n o |A_n|
  std::vector<Eigen::Matrix2cd> image_raw;     // S_n o A_n
  double trace_norm_abs = 0.0;        // || (+)_n S_n o |A_n| ||_1
  double trace_norm_raw_lower = 0.0;  // || (+)_n S_n o A_n ||_1
};

inline double trace_norm(const Eigen::Matrix2cd& m) {
  Eigen::JacobiSVD<Eigen::Matrix2cd> svd(m);
  return svd.singularValues().sum();
}

/// Builds the first `n_blocks` summands and sums block trace norms; the trace
/// norm of a direct sum is the sum of the blockwise trace norms.
inline SchurBlockCounterexample schur_block_counterexample(Index n_blocks) {
  if (n_blocks < 1) throw Error(ErrorKind::InvalidArgument, "schur_block_counterexample: n_blocks >= 1");
  SchurBlockCounterexample out;
  const auto count = static_cast<std::size_t>(n_blocks);
  out.multiplier.reserve(count);
  out.operand.reserve(count);
  out.image_abs.reserve(count);
  out.image_raw.reserve(count);
  for (Index n = 1; n <= n_blocks; ++n) {
    const double inv = 1.0 / static_cast<double>(n);
    Eigen::Matrix2cd s;
    s << inv * inv, inv, inv, 1.0;
    Eigen::Matrix2cd a;
    a << 0.0, 0.0, 1.0, 0.0;
    const Eigen::Matrix2cd abs_a = operator_abs(a).matrix();
    out.multiplier.push_back(s);
    out.operand.push_back(a);
    out.image_abs.push_back(s.cwiseProduct(abs_a));
    out.image_raw.push_back(s.cwiseProduct(a));
    out.trace_norm_abs += trace_norm(out.image_abs.back());
    out.trace_norm_raw_lower += trace_norm(out.image_raw.back());
  }
  return out;
}

}  // namespace oplab
