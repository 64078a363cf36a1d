#pragma once

// Spectral scales t -> lambda_t(A) of Hermitian matrices viewed in a finite
// factor (normalized trace tr/n) or with the unnormalized trace, generalized
// s-numbers, and spectral-dominance certificates.

#include <algorithm>
#include <cmath>
#include <optional>
#include <string_view>
#include <vector>

#include "oplab/linalg.hpp"
#include "oplab/posmaps.hpp"

namespace oplab {

enum class TraceMode { normalized, unnormalized };

constexpr std::string_view to_string(TraceMode mode) {
  return mode == TraceMode::normalized ? "normalized" : "unnormalized";
}

/// Right-continuous, non-increasing step function on (0, T): value
/// values[k] on [breakpoints[k-1], breakpoints[k]) with breakpoints k/n
/// (normalized, T = 1) or k (unnormalized, T = n).
class SpectralScale {
 public:
  SpectralScale(RealVector descending_values, TraceMode mode) : values_(std::move(descending_values)), mode_(mode) {
    const Index n = values_.size();
    if (n < 1) throw Error(ErrorKind::InvalidDims, "SpectralScale: empty spectrum");
    for (Index i = 1; i < n; ++i) {
      if (values_(i) > values_(i - 1)) {
        throw Error(ErrorKind::InvalidArgument, "SpectralScale: values must be non-increasing");
      }
    }
    breakpoints_.resize(static_cast<std::size_t>(n - 1));
    for (Index k = 1; k < n; ++k) breakpoints_[static_cast<std::size_t>(k - 1)] = unit() * static_cast<double>(k);
  }

  TraceMode mode() const { return mode_; }
  Index size() const { return values_.size(); }
  double total() const { return mode_ == TraceMode::normalized ? 1.0 : static_cast<double>(values_.size()); }
  const std::vector<double>& breakpoints() const { return breakpoints_; }
  const RealVector& values() const { return values_; }

  /// lambda_t for t in (0, T).
  double eval(double t) const {
    if (!(t > 0.0) || !(t < total())) {
      throw Error(ErrorKind::InvalidArgument, "SpectralScale::eval: t outside (0, T)");
    }
    const auto k = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), t) - breakpoints_.begin();
    return values_(static_cast<Index>(k));
  }

  /// lim_{t -> 0+}: the largest eigenvalue.
  double at_zero() const { return values_(0); }
  /// lim_{t -> T-}: the smallest eigenvalue.
  double at_end() const { return values_(values_.size() - 1); }

  bool is_breakpoint(double t, double slack) const {
    return std::any_of(breakpoints_.begin(), breakpoints_.end(),
                       [&](double b) { return std::abs(b - t) <= slack; });
  }

 private:
  double unit() const { return mode_ == TraceMode::normalized ? 1.0 / static_cast<double>(values_.size()) : 1.0; }

  RealVector values_;
  TraceMode mode_;
  std::vector<double> breakpoints_;
};

inline SpectralScale spectral_scale(const ComplexMatrix& a, TraceMode mode, const Tolerance& tol = {}) {
  return SpectralScale(hermitian_eig(a, tol).values, mode);
}

/// mu_t(X) = lambda_t(|X|).
inline SpectralScale s_numbers(const ComplexMatrix& x, TraceMode mode) {
  require_square(x, "s_numbers");
  return SpectralScale(operator_abs(x).eigenvalues(), mode);
}

// ---------------------------------------------------------------------------
// dominance
// ---------------------------------------------------------------------------

struct DominanceReport {
  bool dominated = false;
  std::optional<ComplexMatrix> unitary;  // U with U A U* <= B
  std::optional<double> margin;          // loewner_margin(U A U*, B)
  std::optional<double> witness_t;       // t with lambda_t(A) > lambda_t(B) + tol
  double worst_gap = 0.0;                // max_k lambda_k(A) - lambda_k(B)
  double epsilon = 0.0;                  // finite dimension needs no slack
  TraceMode mode = TraceMode::normalized;
};

/// lambda_t(A) <= lambda_t(B) for all t, certified by U = U_B U_A^* when it holds.
inline DominanceReport dominance_check(const ComplexMatrix& a, const ComplexMatrix& b, TraceMode mode,
                                       const Tolerance& tol = {}) {
  require_square(a, "dominance_check");
  require_same_shape(a, b, "dominance_check");
  const EigenSystem ea = hermitian_eig(a, tol);
  const EigenSystem eb = hermitian_eig(b, tol);
  const Index n = ea.values.size();
  const double slack = tol.rel * std::max(1.0, std::abs(ea.values(0)) + std::abs(eb.values(0)) +
                                                   std::abs(ea.values(n - 1)) + std::abs(eb.values(n - 1)));
  DominanceReport report;
  report.mode = mode;
  report.worst_gap = -std::numeric_limits<double>::infinity();
  Index worst = 0;
  for (Index k = 0; k < n; ++k) {
    const double gap = ea.values(k) - eb.values(k);
    if (gap > report.worst_gap) {
      report.worst_gap = gap;
      worst = k;
    }
  }
  report.dominated = report.worst_gap <= slack;
  if (report.dominated) {
    ComplexMatrix u = eb.vectors * ea.vectors.adjoint();
    report.margin = loewner_margin(u * a * u.adjoint(), b);
    report.unitary = std::move(u);
  } else {
    const double unit = mode == TraceMode::normalized ? 1.0 / static_cast<double>(n) : 1.0;
    report.witness_t = (static_cast<double>(worst) + 0.5) * unit;
  }
  return report;
}

// ---------------------------------------------------------------------------
// convergence of spectral scales
// ---------------------------------------------------------------------------

struct ConvergencePoint {
  double t = 0.0;
  bool breakpoint = false;          // reported only, never asserted
  std::vector<double> deviation;    // |lambda_t(A_n) - lambda_t(A)|
  std::vector<double> tail_sup;     // sup_{m >= n} deviation[m]
  bool converges = true;
};

struct ConvergenceReport {
  std::vector<ConvergencePoint> points;
  std::vector<double> distance;  // ||A_n - A||, the Weyl bound for every off-breakpoint t
  bool converges = true;         // over off-breakpoint points
};

/// Pointwise convergence of lambda_t(A_n) to lambda_t(A). Off-breakpoint grid:
/// quarter points of every interval of A's step function. Breakpoints are
/// reported without a verdict. A point "converges" when its last deviation
/// is <= `decay` times max_n ||A_n - A||, or below the absolute tolerance.
inline ConvergenceReport measure_convergence_probe(const std::vector<ComplexMatrix>& sequence,
                                                   const ComplexMatrix& a, TraceMode mode,
                                                   const Tolerance& tol = {}, double decay = 0.1) {
  if (sequence.empty()) throw Error(ErrorKind::InvalidArgument, "measure_convergence_probe: empty sequence");
  for (const auto& m : sequence) require_same_shape(m, a, "measure_convergence_probe");
  const SpectralScale limit = spectral_scale(a, mode, tol);
  std::vector<SpectralScale> scales;
  scales.reserve(sequence.size());
  ConvergenceReport report;
  for (const auto& m : sequence) {
    scales.push_back(spectral_scale(m, mode, tol));
    report.distance.push_back(spectral_norm(m - a));
  }

  const double reference = *std::max_element(report.distance.begin(), report.distance.end());
  const double unit = limit.total() / static_cast<double>(limit.size());
  std::vector<std::pair<double, bool>> grid;
  for (Index k = 0; k < limit.size(); ++k) {
    if (k > 0) grid.emplace_back(unit * static_cast<double>(k), true);
    for (double f : {0.25, 0.5, 0.75}) grid.emplace_back(unit * (static_cast<double>(k) + f), false);
  }
  for (const auto& [t, on_break] : grid) {
    ConvergencePoint p;
    p.t = t;
    p.breakpoint = on_break;
    const double target = limit.eval(t);
    for (const auto& s : scales) p.deviation.push_back(std::abs(s.eval(t) - target));
    p.tail_sup = p.deviation;
    for (std::size_t i = p.tail_sup.size() - 1; i-- > 0;) p.tail_sup[i] = std::max(p.tail_sup[i], p.tail_sup[i + 1]);
    const double last = p.deviation.back();
    p.converges = last <= tol.abs || last <= decay * reference;
    if (!on_break && !p.converges) report.converges = false;
    report.points.push_back(std::move(p));
  }
  return report;
}

// ---------------------------------------------------------------------------
// s-number doubling
// ---------------------------------------------------------------------------

struct MuDoublingResult {
  bool pass = true;
  double worst_gap = -std::numeric_limits<double>::infinity();  // max mu_{2t}(Phi(Z)) - mu_t(Phi(I))
  std::vector<double> grid;                                      // grid actually used
};

/// t_j = (j + 1/2) / (2 points), j = 0..points-1, inside (0, 1/2).
inline std::vector<double> mu_doubling_grid(int points = 16) {
  std::vector<double> grid;
  for (int j = 0; j < points; ++j) grid.push_back((j + 0.5) / (2.0 * points));
  return grid;
}

/// mu_{2t}(Phi(Z)) <= mu_t(Phi(I)) on a grid in (0, 1/2), normalized trace.
/// Grid points that hit a breakpoint of either scale are shifted by 1e-9.
inline MuDoublingResult mu_doubling_check(const PositiveMap& map, const ComplexMatrix& z,
                                          const std::vector<double>& grid, const Tolerance& tol = {}) {
  if (z.rows() != map.input_dim() || z.cols() != map.input_dim()) {
    throw Error(ErrorKind::DimensionMismatch, "mu_doubling_check: operand does not match map input");
  }
  if (!classify(z, OperatorClass::contraction, tol)) {
    throw Error(ErrorKind::NotContraction, "mu_doubling_check: Z is not a contraction");
  }
  const SpectralScale image = s_numbers(map.apply(z), TraceMode::normalized);
  const SpectralScale unit =
      s_numbers(map.apply(ComplexMatrix::Identity(z.rows(), z.cols())), TraceMode::normalized);
  constexpr double kShift = 1e-9;
  const double slack = tol.rel * std::max(1.0, unit.at_zero());

  MuDoublingResult out;
  for (double t : grid) {
    if (!(t > 0.0) || !(t < 0.5)) throw Error(ErrorKind::InvalidArgument, "mu_doubling_check: t outside (0, 1/2)");
    while (unit.is_breakpoint(t, 0.5 * kShift) || image.is_breakpoint(2.0 * t, 0.5 * kShift)) t += kShift;
    out.grid.push_back(t);
    const double gap = image.eval(2.0 * t) - unit.eval(t);
    out.worst_gap = std::max(out.worst_gap, gap);
    if (gap > slack) out.pass = false;
  }
  return out;
}

}  // namespace oplab
