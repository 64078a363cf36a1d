// Acceptance gate: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>

#include "oplab/oplab.hpp"
#include "oracles.hpp"

using namespace oplab;

namespace {

int failures = 0;

void report(int id, const std::string& name, bool pass, const std::string& detail) {
  std::printf("[%s] C%-2d %-28s %s\n", pass ? "PASS" : "FAIL", id, name.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

std::string fmt(const char* f, double a) {
  char buf[96];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

SuiteConfig suite(std::vector<TheoremId> ids, int trials, Index lo = 2, Index hi = 10) {
  SuiteConfig c;
  c.master_seed = 20240601;
  c.trials = trials;
  c.dim_min = lo;
  c.dim_max = hi;
  c.theorems = std::move(ids);
  return c;
}

std::string summary(const SuiteReport& r) {
  std::string out;
  for (const auto& s : r.theorems) {
    out += s.label + " " + std::to_string(s.accepted) + "/" + std::to_string(s.trials) +
           fmt(" min %.2e; ", s.min_margin);
  }
  return out;
}

ComplexMatrix random_pd(Index n, Rng& rng) { return random_psd(n, rng) + 0.1 * ComplexMatrix::Identity(n, n); }

PsdMatrix psd(const ComplexMatrix& m) { return PsdMatrix::from_hermitian(m); }

void thm_bh() {
  const SuiteConfig c = suite({TheoremId::ThmBH}, 500);
  const SuiteReport r = run_suite(c);
  report(1, "normal-map suite", r.all_accepted() && r.elapsed_seconds <= 60.0,
         summary(r) + fmt("%.2f s", r.elapsed_seconds));
}

void beta_family() {
  SuiteConfig c = suite({TheoremId::BetaFamily}, 500);
  const SuiteReport r = run_suite(c);
  // beta = 1/2 and 1 against the closed forms rebuilt from Phi(|N|) and V.
  double worst = 0.0;
  for (int i = 0; i < c.trials; ++i) {
    const TrialInput in = make_trial_input(TheoremId::BetaFamily, trial_seed(c.master_seed, TheoremId::BetaFamily, i), c);
    const InequalityCertificate half = certify_normal_beta(*in.map, in.operands[0], 0.5);
    const InequalityCertificate one = certify_normal_beta(*in.map, in.operands[0], 1.0);
    const ComplexMatrix base = in.map->apply(oracle::modulus(in.operands[0]));
    const ComplexMatrix rotated = half.V * base * half.V.adjoint();
    const double s = std::max(1.0, base.norm());
    worst = std::max(worst, oracle::max_abs(half.rhs - 0.5 * (base + rotated)) / s);
    worst = std::max(worst, oracle::max_abs(one.rhs - (base + 0.25 * rotated)) / s);
    if (!half.accepted || !one.accepted) worst = std::max(worst, 1.0);
  }
  report(2, "beta family", r.all_accepted() && worst <= 1e-12, summary(r) + fmt("closed-form dev %.2e", worst));
}

void corollaries() {
  const SuiteConfig c = suite({TheoremId::CorCons2Plus, TheoremId::CorCons2Minus, TheoremId::CorRD1,
                               TheoremId::RussoDyeNorm, TheoremId::ThmSemi, TheoremId::CorGeo1},
                              300);
  const SuiteReport r = run_suite(c);
  report(3, "corollaries", r.all_accepted(), summary(r));
}

void eig_schur() {
  const SuiteReport r = run_suite(suite({TheoremId::EigSchur}, 10000, 3, 8));
  // Negative controls: lambda_2 <= delta_1 cannot fail; lambda_2 <= delta_2 can.
  int violations = 0, shifted = 0;
  const int budget = 10000;
  for (int i = 0; i < budget; ++i) {
    Rng rng(mix_seed(0xC0417 + static_cast<std::uint64_t>(i)));
    const Index n = uniform_index(rng, 3, 8);
    const PsdMatrix s = psd(random_psd(n, rng));
    const ComplexMatrix z = random_contraction(n, rng, 1.0);
    violations += !check_eig_schur(s, z, {}, 2, 1).pass;
    shifted += !check_eig_schur(s, z, {}, 2, 2).pass;
  }
  // S = [[1, 1/2], [1/2, 1/4]] (+) 0 with Z a swap: |S o Z| has 1/2 twice, delta_2 = 1/4.
  ComplexMatrix s3 = ComplexMatrix::Zero(3, 3), swap = ComplexMatrix::Identity(3, 3);
  s3 << 1.0, 0.5, 0.0, 0.5, 0.25, 0.0, 0.0, 0.0, 0.0;
  swap.topLeftCorner(2, 2) << 0.0, 1.0, 1.0, 0.0;
  const bool witness = !check_eig_schur(psd(s3), swap, {}, 2, 2).pass && check_eig_schur(psd(s3), swap).pass;
  const std::string control =
      (violations > 0 ? "control: violation found" : "control: not falsified in " + std::to_string(budget)) +
      "; lambda2/delta2: " + std::to_string(shifted) + " random, witness " + (witness ? "violates" : "holds");
  report(4, "eigenvalue/diagonal schur", r.all_accepted() && witness, summary(r) + control);
}

void schur_product() {
  const SuiteReport r = run_suite(suite({TheoremId::SchurProduct}, 10000, 2, 8));
  report(5, "schur product quarter", r.all_accepted(), summary(r));
}

void means() {
  int bad = 0;
  double worst = 0.0;
  auto check = [&](double err, double scale) {
    worst = std::max(worst, err / scale);
    bad += err > 1e-8 * scale;
  };
  for (int i = 0; i < 500; ++i) {
    Rng rng(mix_seed(0x3EA7 + static_cast<std::uint64_t>(i)));
    const Index n = uniform_index(rng, 2, 10);
    const ComplexMatrix a = random_pd(n, rng);
    const ComplexMatrix b = random_pd(n, rng);
    const ComplexMatrix a2 = a + random_psd(n, rng);
    const ComplexMatrix b2 = b + random_psd(n, rng);
    const ComplexMatrix t = ginibre(n, n, rng) + 2.0 * ComplexMatrix::Identity(n, n);
    const ComplexMatrix g = geometric_mean(psd(a), psd(b)).value.matrix();
    const double s = 1.0 + a.norm() + b.norm();
    check((g - geometric_mean(psd(b), psd(a)).value.matrix()).norm(), s);
    check(std::max(0.0, -loewner_margin(g, 0.5 * (a + b))), s);
    check(std::max(0.0, -loewner_margin(g, a + 0.25 * b)), s);
    const ComplexMatrix ta = t.adjoint() * a * t, tb = t.adjoint() * b * t;
    check((t.adjoint() * g * t - geometric_mean(psd(ta), psd(tb)).value.matrix()).norm(), 1.0 + ta.norm() + tb.norm());
    const double s2 = 1.0 + a2.norm() + b2.norm();
    check(std::max(0.0, -loewner_margin(g, geometric_mean(psd(a2), psd(b2)).value.matrix())), s2);
    check((g * a.inverse() * g - b).norm(), s);
  }
  double singular_worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    Rng rng(mix_seed(0x5196 + static_cast<std::uint64_t>(i)));
    const Index n = uniform_index(rng, 3, 10);
    const Index r = uniform_index(rng, 1, n - 1);
    const ComplexMatrix q = random_unitary(n, rng).leftCols(r);
    const ComplexMatrix ca = random_pd(r, rng), cb = random_pd(r, rng);
    const ComplexMatrix expected = q * geometric_mean_pd(psd(ca), psd(cb)).matrix() * q.adjoint();
    const ComplexMatrix got = geometric_mean(psd(q * ca * q.adjoint()), psd(q * cb * q.adjoint())).value.matrix();
    singular_worst = std::max(singular_worst, (got - expected).norm());
  }
  report(6, "geometric mean", bad == 0 && singular_worst <= 1e-7,
         fmt("worst rel %.2e; ", worst) + fmt("singular dev %.2e", singular_worst));
}

void nu() {
  const SuiteReport r = run_suite(suite({TheoremId::NuBound}, 300));
  double worst = 0.0;
  for (int i = 0; i < 300; ++i) {
    Rng rng(mix_seed(0x7E + static_cast<std::uint64_t>(i)));
    worst = std::max(worst, std::abs(nu_bound(random_normal(uniform_index(rng, 2, 10), rng)).nu - 1.0));
  }
  report(7, "nu bound", r.all_accepted() && worst <= 1e-10, summary(r) + fmt("normal |nu-1| %.2e", worst));
}

void dominance() {
  double worst_margin = std::numeric_limits<double>::infinity();
  int constructed_ok = 0;
  for (int i = 0; i < 300; ++i) {
    Rng rng(mix_seed(0xD0 + static_cast<std::uint64_t>(i)));
    const Index n = uniform_index(rng, 2, 10);
    const ComplexMatrix a = hermitian_part(ginibre(n, n, rng));
    const auto eig = oracle::eig_desc(a);
    std::exponential_distribution<double> lift(1.0);
    RealVector d(n);
    for (Index k = 0; k < n; ++k) d(k) = eig[static_cast<std::size_t>(k)] + lift(rng);
    const ComplexMatrix u = random_unitary(n, rng);
    const DominanceReport rep = dominance_check(a, u * d.cast<Complex>().asDiagonal() * u.adjoint(), TraceMode::normalized);
    if (rep.dominated && rep.epsilon == 0.0) {
      ++constructed_ok;
      worst_margin = std::min(worst_margin, *rep.margin);
    }
  }
  int agree = 0;
  for (int i = 0; i < 300; ++i) {
    Rng rng(mix_seed(0xD1 + static_cast<std::uint64_t>(i)));
    const Index n = uniform_index(rng, 2, 10);
    const ComplexMatrix a = hermitian_part(ginibre(n, n, rng));
    const ComplexMatrix b = hermitian_part(ginibre(n, n, rng)) + ComplexMatrix::Identity(n, n);
    const auto ea = oracle::eig_desc(a), eb = oracle::eig_desc(b);
    bool expected = true;
    for (std::size_t k = 0; k < ea.size(); ++k) expected = expected && ea[k] <= eb[k];
    agree += dominance_check(a, b, TraceMode::normalized).dominated == expected;
  }
  report(8, "spectral dominance", constructed_ok == 300 && worst_margin >= -1e-10 && agree == 300,
         std::to_string(constructed_ok) + "/300 certified" + fmt(", min margin %.2e, ", worst_margin) +
             std::to_string(agree) + "/300 agree");
}

void mu_doubling() {
  const SuiteReport r = run_suite(suite({TheoremId::MuDoubling}, 200));
  report(9, "mu doubling", r.all_accepted(), summary(r));
}

void convergence() {
  int bad = 0, converging = 0;
  const int sequences = 100;
  for (int i = 0; i < sequences; ++i) {
    Rng rng(mix_seed(0xC0 + static_cast<std::uint64_t>(i)));
    const Index n = uniform_index(rng, 2, 10);
    const ComplexMatrix a = hermitian_part(ginibre(n, n, rng));
    std::vector<ComplexMatrix> seq;
    for (int k = 1; k <= 50; ++k) seq.push_back(a + hermitian_part(ginibre(n, n, rng)) / static_cast<double>(k));
    const ConvergenceReport rep = measure_convergence_probe(seq, a, TraceMode::normalized);
    converging += rep.converges;
    for (const auto& p : rep.points) {
      if (p.breakpoint) continue;
      for (std::size_t k = 0; k < seq.size(); ++k) bad += p.deviation[k] > rep.distance[k] + 1e-12;
    }
  }
  report(10, "convergence probe", bad == 0 && converging == sequences,
         std::to_string(converging) + "/" + std::to_string(sequences) + " converge, " + std::to_string(bad) +
             " Weyl violations");
}

void divergence() {
  const SchurBlockCounterexample c = schur_block_counterexample(10000);
  const double basel = c.trace_norm_abs, harmonic = c.trace_norm_raw_lower;
  const bool pass = basel >= 1.6448 && basel <= 1.6450 && harmonic >= 9.787 && harmonic <= 9.788 &&
                    harmonic / basel > 5.0;
  report(11, "divergence experiment", pass,
         fmt("sum 1/n^2 %.6f, ", basel) + fmt("sum 1/n %.6f, ", harmonic) + fmt("ratio %.4f", harmonic / basel));
}

void loewner_implies_dominance() {
  SuiteConfig c = suite({std::begin(kAllTheorems), std::end(kAllTheorems)}, 100, 3, 10);
  c.keep_certificates = true;
  const SuiteReport r = run_suite(c);
  int checked = 0, violations = 0;
  for (const auto& trial : r.trials) {
    for (const auto& cert : trial.certificates) {
      if (!cert.accepted) continue;
      ++checked;
      // Weyl: lhs <= rhs + m I gives lambda_k(lhs) <= lambda_k(rhs) + m.
      const DominanceReport d = dominance_check(cert.lhs, cert.rhs, TraceMode::normalized);
      violations += d.worst_gap > std::max(0.0, -cert.margin) + 1e-12 * cert.scale;
    }
  }
  report(12, "loewner implies dominance", checked > 0 && violations == 0,
         std::to_string(checked) + " certificates, " + std::to_string(violations) + " violations");
}

}  // namespace

int main() {
  const auto start = std::chrono::steady_clock::now();
  const std::vector<std::function<void()>> criteria = {
      thm_bh, beta_family, corollaries, eig_schur, schur_product, means,
      nu,     dominance,   mu_doubling, convergence, divergence,  loewner_implies_dominance,
  };
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    try {
      criteria[i]();
    } catch (const std::exception& e) {
      report(static_cast<int>(i + 1), "error", false, e.what());
    }
  }
  std::printf("%d/%zu criteria passed in %.1f s\n", static_cast<int>(criteria.size()) - failures, criteria.size(),
              seconds_since(start));
  return failures == 0 ? 0 : 1;
}
