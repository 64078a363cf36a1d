#pragma once

// Per-theorem verification suites over seeded ensembles.
//
// A trial is a pure function of (theorem, trial seed, config): the seed
// drives the ensemble draw that produces a TrialInput, and certify_input
// turns the input into certificates. The CLI replays a trial through the
// same two functions, so stored seeds reproduce margins exactly.

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "oplab/certify.hpp"
#include "oplab/ensemble.hpp"
#include "oplab/io.hpp"
#include "oplab/spectral.hpp"

namespace oplab {

inline constexpr std::string_view kVersion = "0.1.0";

struct SuiteConfig {
  std::uint64_t master_seed = 1;
  int trials = 100;
  Index dim_min = 2;
  Index dim_max = 10;
  std::vector<double> beta_grid{0.25, 0.5, 1.0, 2.0, 4.0};
  Tolerance tolerance;
  std::vector<TheoremId> theorems{std::begin(kAllTheorems), std::end(kAllTheorems)};
  std::string output_path;
  int threads = 1;
  bool keep_certificates = false;
  /// Contractions on the unit sphere for the CorRD1 boundary rows.
  double boundary_margin_floor = 1e-7;

  bool selects(TheoremId id) const { return std::find(theorems.begin(), theorems.end(), id) != theorems.end(); }

  void validate() const {
    auto fail = [](const std::string& m) { throw Error(ErrorKind::ConfigInvalid, m); };
    if (trials < 1) fail("trials must be >= 1");
    if (dim_min < 2) fail("dim_range.min must be >= 2");
    if (dim_max < dim_min) fail("dim_range.max must be >= dim_range.min");
    if (selects(TheoremId::EigSchur) && dim_min < 3) fail("dim_range.min must be >= 3 when EigSchur is selected");
    if (theorems.empty()) fail("no theorems selected");
    if (beta_grid.empty()) fail("beta_grid is empty");
    for (double b : beta_grid) {
      if (!(b > 0.0) || !std::isfinite(b)) fail("beta_grid entries must be positive");
    }
    if (threads < 1) fail("threads must be >= 1");
    try {
      tolerance.validate();
    } catch (const Error& e) {
      fail(e.what());
    }
  }
};

// ---------------------------------------------------------------------------
// trial inputs
// ---------------------------------------------------------------------------

/// Operands by theorem: ThmBH/BetaFamily {N normal}; CorCons2* and CorGeo1
/// {X}; CorRD1/RussoDyeNorm/MuDoubling {Z contraction}; ThmSemi {S_1..S_m};
/// SchurProduct {A, B}; EigSchur {S psd, Z contraction}; NuBound {A}.
struct TrialInput {
  std::optional<PositiveMap> map;
  std::vector<ComplexMatrix> operands;
};

inline io::Json to_json(const TrialInput& in) {
  io::Json j;
  if (in.map) j["map"] = io::to_json(*in.map);
  j["operands"] = io::Json::array();
  for (const auto& m : in.operands) j["operands"].push_back(io::to_json(m));
  return j;
}

inline TrialInput trial_input_from_json(const io::Json& j, const Tolerance& tol = {}) {
  if (!j.is_object()) throw Error(ErrorKind::ParseError, ": expected an object");
  TrialInput in;
  if (j.contains("map")) in.map = io::map_from_json(j["map"], "/map", tol);
  if (j.contains("operands")) {
    const io::Json& ops = j["operands"];
    if (!ops.is_array()) throw Error(ErrorKind::ParseError, "/operands: expected an array");
    for (std::size_t i = 0; i < ops.size(); ++i) {
      in.operands.push_back(io::matrix_from_json(ops[i], "/operands/" + std::to_string(i)));
    }
  } else if (j.contains("operand")) {
    in.operands.push_back(io::matrix_from_json(j["operand"], "/operand"));
  } else {
    throw Error(ErrorKind::ParseError, "/operands: missing field");
  }
  return in;
}

inline std::uint64_t trial_seed(std::uint64_t master_seed, TheoremId theorem, int index, bool boundary = false) {
  const auto ordinal = static_cast<std::uint64_t>(theorem) + (boundary ? 64u : 0u);
  return master_seed ^ mix_seed((ordinal << 32) | static_cast<std::uint32_t>(index));
}

inline TrialInput make_trial_input(TheoremId theorem, std::uint64_t seed, const SuiteConfig& config,
                                   bool boundary = false) {
  Rng rng(seed);
  const Index n = uniform_index(rng, config.dim_min, config.dim_max);
  auto draw_map = [&]() {
    const auto kind = static_cast<MapKind>(uniform_index(rng, 0, 2));
    const Index n_out = kind == MapKind::kraus ? uniform_index(rng, 1, config.dim_max) : n;
    return random_map(kind, n, n_out, rng);
  };
  TrialInput in;
  switch (theorem) {
    case TheoremId::ThmBH:
    case TheoremId::BetaFamily:
      in.map = draw_map();
      in.operands.push_back(random_normal(n, rng));
      break;
    case TheoremId::CorCons2Plus:
    case TheoremId::CorCons2Minus:
    case TheoremId::CorGeo1:
      in.map = draw_map();
      in.operands.push_back(ginibre(n, n, rng));
      break;
    case TheoremId::CorRD1:
    case TheoremId::RussoDyeNorm:
    case TheoremId::MuDoubling:
      in.map = draw_map();
      in.operands.push_back(random_contraction(n, rng, boundary ? 1.0 : 0.9));
      break;
    case TheoremId::ThmSemi: {
      in.map = draw_map();
      const Index m = uniform_index(rng, 1, 4);
      for (Index k = 0; k < m; ++k) in.operands.push_back(random_normal(n, rng));
      break;
    }
    case TheoremId::SchurProduct:
      in.operands.push_back(random_normal(n, rng));
      in.operands.push_back(random_normal(n, rng));
      break;
    case TheoremId::EigSchur:
      in.operands.push_back(random_psd(n, rng));
      in.operands.push_back(random_contraction(n, rng, 0.9));
      break;
    case TheoremId::NuBound:
      in.operands.push_back(ginibre(n, n, rng));
      break;
  }
  return in;
}

// ---------------------------------------------------------------------------
// certification of one input
// ---------------------------------------------------------------------------

struct CertifyOptions {
  std::vector<double> betas{0.25, 0.5, 1.0, 2.0, 4.0};  // BetaFamily
  std::optional<ContractionForm> contraction_form;      // CorRD1: both when absent
  std::optional<double> beta;                           // CorCons2*: both 1/2 and 1 when absent
  std::vector<double> mu_grid = mu_doubling_grid(16);
};

inline InequalityCertificate diagonal_certificate(TheoremId id, const std::vector<double>& lhs,
                                                  const std::vector<double>& rhs, const Tolerance& tol) {
  InequalityCertificate c;
  c.theorem = id;
  c.form = RhsForm::beta;
  const auto k = static_cast<Index>(lhs.size());
  c.lhs = ComplexMatrix::Zero(k, k);
  c.rhs = ComplexMatrix::Zero(k, k);
  for (Index i = 0; i < k; ++i) {
    c.lhs(i, i) = lhs[static_cast<std::size_t>(i)];
    c.rhs(i, i) = rhs[static_cast<std::size_t>(i)];
  }
  c.V = ComplexMatrix::Identity(k, k);
  finalize(c, tol);
  return c;
}

inline std::vector<InequalityCertificate> certify_input(TheoremId theorem, const TrialInput& in,
                                                        const CertifyOptions& opt, const Tolerance& tol) {
  auto need_map = [&]() -> const PositiveMap& {
    if (!in.map) throw Error(ErrorKind::ParseError, "/map: missing field");
    return *in.map;
  };
  auto operand = [&](std::size_t i) -> const ComplexMatrix& {
    if (in.operands.size() <= i) {
      throw Error(ErrorKind::ParseError, "/operands: expected at least " + std::to_string(i + 1) + " operand(s)");
    }
    return in.operands[i];
  };
  std::vector<InequalityCertificate> out;
  switch (theorem) {
    case TheoremId::ThmBH:
      out.push_back(certify_normal_geo(need_map(), operand(0), tol));
      break;
    case TheoremId::BetaFamily:
      for (double b : opt.betas) out.push_back(certify_normal_beta(need_map(), operand(0), b, tol));
      break;
    case TheoremId::CorCons2Plus:
    case TheoremId::CorCons2Minus: {
      const Sign sign = theorem == TheoremId::CorCons2Plus ? Sign::plus : Sign::minus;
      const std::vector<double> betas = opt.beta ? std::vector<double>{*opt.beta} : std::vector<double>{0.5, 1.0};
      for (double b : betas) out.push_back(certify_hermitian_parts(need_map(), operand(0), sign, b, tol));
      break;
    }
    case TheoremId::CorRD1: {
      std::vector<ContractionForm> forms{ContractionForm::geometric, ContractionForm::arithmetic};
      if (opt.contraction_form) forms = {*opt.contraction_form};
      for (auto f : forms) out.push_back(certify_contraction(need_map(), operand(0), f, tol));
      break;
    }
    case TheoremId::RussoDyeNorm:
      out.push_back(certify_russo_dye_norm(need_map(), operand(0), tol));
      break;
    case TheoremId::ThmSemi:
      out.push_back(certify_sum_normals(need_map(), in.operands, tol));
      break;
    case TheoremId::CorGeo1:
      out.push_back(certify_cartesian(need_map(), operand(0), tol));
      break;
    case TheoremId::SchurProduct:
      out.push_back(certify_schur_product(operand(0), operand(1), tol));
      break;
    case TheoremId::EigSchur: {
      const PsdMatrix s = PsdMatrix::from_hermitian(operand(0), tol);
      const EigSchurResult r = check_eig_schur(s, operand(1), tol);
      out.push_back(diagonal_certificate(TheoremId::EigSchur, {r.lhs}, {r.rhs}, tol));
      break;
    }
    case TheoremId::NuBound: {
      NuBoundResult r = nu_bound(operand(0), tol);
      out.push_back(std::move(r.certificate));
      out.push_back(std::move(r.squared_certificate));
      break;
    }
    case TheoremId::MuDoubling: {
      const PositiveMap& map = need_map();
      const MuDoublingResult r = mu_doubling_check(map, operand(0), opt.mu_grid, tol);
      const SpectralScale image = s_numbers(map.apply(operand(0)), TraceMode::normalized);
      const SpectralScale unit = s_numbers(map.apply(ComplexMatrix::Identity(map.input_dim(), map.input_dim())),
                                           TraceMode::normalized);
      std::vector<double> lhs, rhs;
      for (double t : r.grid) {
        lhs.push_back(image.eval(2.0 * t));
        rhs.push_back(unit.eval(t));
      }
      out.push_back(diagonal_certificate(TheoremId::MuDoubling, lhs, rhs, tol));
      break;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// suites
// ---------------------------------------------------------------------------

struct TrialResult {
  TheoremId theorem = TheoremId::ThmBH;
  bool boundary = false;
  int index = 0;
  std::uint64_t seed = 0;
  bool accepted = false;
  double min_margin = std::numeric_limits<double>::infinity();  // smallest margin / scale
  std::string error;
  std::vector<InequalityCertificate> certificates;
};

inline CertifyOptions options_for(const SuiteConfig& config) {
  CertifyOptions opt;
  opt.betas = config.beta_grid;
  return opt;
}

inline Tolerance tolerance_for(const SuiteConfig& config, bool boundary) {
  Tolerance tol = config.tolerance;
  if (boundary) tol.rel = std::max(tol.rel, config.boundary_margin_floor);
  return tol;
}

inline TrialResult run_trial(TheoremId theorem, std::uint64_t seed, const SuiteConfig& config,
                             bool boundary = false) {
  TrialResult r;
  r.theorem = theorem;
  r.boundary = boundary;
  r.seed = seed;
  try {
    const TrialInput in = make_trial_input(theorem, seed, config, boundary);
    r.certificates = certify_input(theorem, in, options_for(config), tolerance_for(config, boundary));
    r.accepted = true;
    for (const auto& c : r.certificates) {
      r.accepted = r.accepted && c.accepted;
      r.min_margin = std::min(r.min_margin, c.relative_margin());
    }
  } catch (const Error& e) {
    r.accepted = false;
    r.error = e.what();
  }
  return r;
}

struct TheoremSummary {
  std::string label;  // theorem id, with "@boundary" for the unit-sphere rows
  TheoremId theorem = TheoremId::ThmBH;
  int trials = 0;
  int accepted = 0;
  double min_margin = std::numeric_limits<double>::infinity();
  std::uint64_t argmin_seed = 0;
  std::vector<std::uint64_t> failing_seeds;
  std::vector<std::string> errors;
};

struct SuiteReport {
  std::uint64_t master_seed = 0;
  std::vector<TheoremSummary> theorems;
  std::vector<TrialResult> trials;  // only with keep_certificates
  double elapsed_seconds = 0.0;

  bool all_accepted() const {
    return std::all_of(theorems.begin(), theorems.end(),
                       [](const TheoremSummary& s) { return s.accepted == s.trials; });
  }
};

/// Runs `config.trials` trials per selected theorem (plus boundary rows for
/// CorRD1). Trials are independent; results are identical for any thread count.
inline SuiteReport run_suite(const SuiteConfig& config) {
  config.validate();
  const auto start = std::chrono::steady_clock::now();

  struct Job {
    TheoremId theorem;
    bool boundary;
    int index;
  };
  std::vector<Job> jobs;
  std::vector<std::pair<TheoremId, bool>> rows;
  for (TheoremId id : config.theorems) {
    rows.emplace_back(id, false);
    if (id == TheoremId::CorRD1) rows.emplace_back(id, true);
  }
  for (const auto& [id, boundary] : rows) {
    for (int i = 0; i < config.trials; ++i) jobs.push_back({id, boundary, i});
  }

  std::vector<TrialResult> results(jobs.size());
  auto work = [&](std::size_t begin, std::size_t step) {
    for (std::size_t k = begin; k < jobs.size(); k += step) {
      const Job& j = jobs[k];
      results[k] = run_trial(j.theorem, trial_seed(config.master_seed, j.theorem, j.index, j.boundary), config,
                             j.boundary);
      results[k].index = j.index;
    }
  };
  if (config.threads == 1) {
    work(0, 1);
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < config.threads; ++t) pool.emplace_back(work, static_cast<std::size_t>(t), config.threads);
    for (auto& th : pool) th.join();
  }

  SuiteReport report;
  report.master_seed = config.master_seed;
  std::size_t k = 0;
  for (const auto& [id, boundary] : rows) {
    TheoremSummary s;
    s.theorem = id;
    s.label = std::string(to_string(id)) + (boundary ? "@boundary" : "");
    for (int i = 0; i < config.trials; ++i, ++k) {
      TrialResult& r = results[k];
      ++s.trials;
      if (r.accepted) {
        ++s.accepted;
      } else {
        s.failing_seeds.push_back(r.seed);
        if (!r.error.empty()) s.errors.push_back(r.error);
      }
      if (r.min_margin < s.min_margin || s.trials == 1) {
        s.min_margin = r.min_margin;
        s.argmin_seed = r.seed;
      }
      if (config.keep_certificates) report.trials.push_back(std::move(r));
    }
    report.theorems.push_back(std::move(s));
  }
  report.elapsed_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

// ---------------------------------------------------------------------------
// config and report files
// ---------------------------------------------------------------------------

/// Keys: master_seed, trials, dim_range [min, max], beta_grid, tolerance
/// {rel, abs}, theorems (names or "all"), output_path, threads.
inline SuiteConfig config_from_json(const io::Json& j) {
  SuiteConfig c;
  if (!j.is_object()) throw Error(ErrorKind::ConfigInvalid, "config must be an object");
  try {
    if (j.contains("master_seed")) c.master_seed = j["master_seed"].get<std::uint64_t>();
    if (j.contains("trials")) c.trials = j["trials"].get<int>();
    if (j.contains("dim_range")) {
      const auto r = j["dim_range"].get<std::vector<Index>>();
      if (r.size() != 2) throw Error(ErrorKind::ConfigInvalid, "dim_range must be [min, max]");
      c.dim_min = r[0];
      c.dim_max = r[1];
    }
    if (j.contains("beta_grid")) c.beta_grid = j["beta_grid"].get<std::vector<double>>();
    if (j.contains("tolerance")) {
      c.tolerance.rel = j["tolerance"].value("rel", c.tolerance.rel);
      c.tolerance.abs = j["tolerance"].value("abs", c.tolerance.abs);
    }
    if (j.contains("theorems")) {
      const auto& t = j["theorems"];
      if (!(t.is_string() && t.get<std::string>() == "all")) {
        c.theorems.clear();
        for (const auto& name : t.get<std::vector<std::string>>()) {
          const auto id = theorem_from_string(name);
          if (!id) throw Error(ErrorKind::ConfigInvalid, "unknown theorem '" + name + "'");
          c.theorems.push_back(*id);
        }
      }
    }
    if (j.contains("output_path")) c.output_path = j["output_path"].get<std::string>();
    if (j.contains("threads")) c.threads = j["threads"].get<int>();
  } catch (const io::Json::exception& e) {
    throw Error(ErrorKind::ConfigInvalid, e.what());
  }
  return c;
}

/// Line-delimited report: a header line, one line per theorem row, a footer.
/// Only the footer's elapsed_seconds varies between identical runs.
inline std::string report_to_text(const SuiteReport& report, const SuiteConfig& config) {
  std::string out;
  io::Json header{{"type", "header"},
                  {"version", std::string(kVersion)},
                  {"precision", "binary64"},
                  {"master_seed", report.master_seed},
                  {"trials", config.trials},
                  {"dim_range", {config.dim_min, config.dim_max}},
                  {"tolerance", {{"rel", config.tolerance.rel}, {"abs", config.tolerance.abs}}}};
  out += io::dump(header, 0) + "\n";
  for (const auto& s : report.theorems) {
    io::Json line{{"type", "theorem"},
                  {"theorem_id", s.label},
                  {"trials", s.trials},
                  {"accepted", s.accepted},
                  {"min_margin", std::isfinite(s.min_margin) ? s.min_margin : 0.0},
                  {"argmin_seed", s.argmin_seed},
                  {"failing_seeds", s.failing_seeds}};
    if (!s.errors.empty()) line["errors"] = s.errors;
    out += io::dump(line, 0) + "\n";
  }
  io::Json footer{{"type", "footer"}, {"all_accepted", report.all_accepted()}, {"elapsed_seconds", report.elapsed_seconds}};
  out += io::dump(footer, 0) + "\n";
  return out;
}

}  // namespace oplab
