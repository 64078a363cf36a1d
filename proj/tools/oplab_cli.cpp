// oplab command line: suite runs, single certificates, experiment tables and
// spectral dominance checks. Exit status 0 = accepted, 1 = rejected,
// 2 = usage, parse or precondition error.

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include "oplab/oplab.hpp"

using namespace oplab;

namespace {

constexpr int kAccepted = 0;
constexpr int kRejected = 1;
constexpr int kUsage = 2;

std::optional<double> env_double(const char* name) {
  const char* raw = std::getenv(name);
  if (raw == nullptr || *raw == '\0') return std::nullopt;
  char* end = nullptr;
  const double v = std::strtod(raw, &end);
  if (end == raw || *end != '\0' || !(v > 0.0) || !std::isfinite(v)) {
    throw Error(ErrorKind::ConfigInvalid, std::string(name) + ": expected a positive number, got '" + raw + "'");
  }
  return v;
}

// Defaults, overridable through OPLAB_TOL_REL / OPLAB_TOL_ABS.
Tolerance default_tolerance() {
  Tolerance tol;
  if (auto v = env_double("OPLAB_TOL_REL")) tol.rel = *v;
  if (auto v = env_double("OPLAB_TOL_ABS")) tol.abs = *v;
  return tol;
}

void emit(const std::string& text, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << text;
  } else {
    io::write_file(path, text);
  }
}

SuiteConfig load_config(const std::string& path) {
  const io::Json j = io::load_document(path);
  SuiteConfig c = config_from_json(j);
  if (!j.contains("tolerance")) c.tolerance = default_tolerance();
  c.validate();
  return c;
}

// ---------------------------------------------------------------------------

struct VerifyArgs {
  std::string config;
  std::string out;
  std::optional<int> threads;
};

int run_verify(const VerifyArgs& a) {
  SuiteConfig c = load_config(a.config);
  if (a.threads) c.threads = *a.threads;
  c.validate();
  const SuiteReport r = run_suite(c);
  const std::string text = report_to_text(r, c);
  const std::string out = a.out.empty() ? c.output_path : a.out;
  emit(text, out);
  if (!out.empty() && out != "-") {
    for (const auto& s : r.theorems) {
      std::printf("%-18s %d/%d  min margin %s\n", s.label.c_str(), s.accepted, s.trials,
                  io::format_double(s.min_margin).c_str());
    }
  }
  return r.all_accepted() ? kAccepted : kRejected;
}

// ---------------------------------------------------------------------------

struct CertifyArgs {
  std::string theorem;
  std::string input;
  std::string config;
  std::optional<std::uint64_t> seed;
  bool boundary = false;
  std::optional<double> beta;
  std::string form;
  std::string out;
  std::string dump_input;
};

int run_certify(const CertifyArgs& a) {
  const auto theorem = theorem_from_string(a.theorem);
  if (!theorem) throw Error(ErrorKind::InvalidArgument, "unknown theorem '" + a.theorem + "'");

  Tolerance tol = default_tolerance();
  CertifyOptions opt;
  TrialInput in;
  if (!a.input.empty()) {
    in = trial_input_from_json(io::load_document(a.input), tol);
  } else {
    if (a.config.empty() || !a.seed) throw Error(ErrorKind::InvalidArgument, "give --input, or --config with --seed");
    const SuiteConfig c = load_config(a.config);
    in = make_trial_input(*theorem, *a.seed, c, a.boundary);
    tol = tolerance_for(c, a.boundary);
    opt = options_for(c);
  }
  if (!a.dump_input.empty()) io::write_file(a.dump_input, io::dump(to_json(in)) + "\n");

  if (a.beta) {
    opt.betas = {*a.beta};
    opt.beta = *a.beta;
  }
  if (a.form == "geo") opt.contraction_form = ContractionForm::geometric;
  if (a.form == "arith") opt.contraction_form = ContractionForm::arithmetic;

  const auto certs = certify_input(*theorem, in, opt, tol);
  bool all = true;
  io::Json out = io::Json::array();
  for (const auto& c : certs) {
    all = all && c.accepted;
    const std::string beta = c.beta ? " beta " + io::format_double(*c.beta) : "";
    std::printf("%s%s margin %s scale %s relative_margin %s accepted %s\n", std::string(to_string(c.theorem)).c_str(),
                beta.c_str(), io::format_double(c.margin).c_str(), io::format_double(c.scale).c_str(),
                io::format_double(c.relative_margin()).c_str(), c.accepted ? "true" : "false");
    out.push_back(io::to_json(c));
  }
  if (!a.out.empty()) io::write_file(a.out, io::dump(certs.size() == 1 ? out[0] : out) + "\n");
  return all ? kAccepted : kRejected;
}

// ---------------------------------------------------------------------------

std::vector<Index> log_schedule(Index n) {
  std::vector<Index> out;
  for (Index decade = 1; decade <= n; decade *= 10) {
    for (Index m : {1, 2, 5}) {
      if (m * decade <= n) out.push_back(m * decade);
    }
  }
  if (out.back() != n) out.push_back(n);
  return out;
}

int run_schur_divergence(Index blocks, const std::string& out) {
  if (blocks < 1) throw Error(ErrorKind::InvalidArgument, "--blocks must be >= 1");
  const SchurBlockCounterexample full = schur_block_counterexample(blocks);
  // Partial sums from the constructed blocks, in block order.
  std::map<Index, std::pair<double, double>> sums;
  double abs_sum = 0.0, raw_sum = 0.0;
  const auto schedule = log_schedule(blocks);
  std::size_t next = 0;
  for (Index k = 0; k < blocks; ++k) {
    abs_sum += trace_norm(full.image_abs[static_cast<std::size_t>(k)]);
    raw_sum += trace_norm(full.image_raw[static_cast<std::size_t>(k)]);
    if (k + 1 == schedule[next]) {
      sums[k + 1] = {abs_sum, raw_sum};
      ++next;
    }
  }
  std::string csv = "N,sum_inv_sq,sum_inv,ratio\n";
  for (const auto& [n, s] : sums) {
    char line[160];
    std::snprintf(line, sizeof line, "%lld,%.15g,%.15g,%.15g\n", static_cast<long long>(n), s.first, s.second,
                  s.second / s.first);
    csv += line;
  }
  emit(csv, out);
  return kAccepted;
}

// ---------------------------------------------------------------------------

int run_dominance(const std::string& a_path, const std::string& b_path, const std::string& mode,
                  const std::string& out) {
  const ComplexMatrix a = io::matrix_from_json(io::load_document(a_path));
  const ComplexMatrix b = io::matrix_from_json(io::load_document(b_path));
  const TraceMode m = mode == "unnormalized" ? TraceMode::unnormalized : TraceMode::normalized;
  const DominanceReport r = dominance_check(a, b, m, default_tolerance());
  emit(io::dump(io::to_json(r)) + "\n", out);
  return r.dominated ? kAccepted : kRejected;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical certificates for positive-map operator inequalities"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  VerifyArgs verify;
  auto* verify_cmd = app.add_subcommand("verify", "Run the seeded theorem suite");
  verify_cmd->add_option("--config", verify.config, "Suite configuration (JSON)")->required()->check(CLI::ExistingFile);
  verify_cmd->add_option("--out", verify.out, "Report path (default: config output_path, else stdout)");
  verify_cmd->add_option("--threads", verify.threads, "Worker threads")->check(CLI::PositiveNumber);

  CertifyArgs cert;
  auto* cert_cmd = app.add_subcommand("certify", "Certify one input, or replay a suite trial");
  cert_cmd->add_option("--theorem", cert.theorem, "Theorem id, e.g. ThmBH")->required();
  auto* input_opt = cert_cmd->add_option("--input", cert.input, "Input file with map and operands");
  auto* config_opt = cert_cmd->add_option("--config", cert.config, "Suite configuration for replay");
  cert_cmd->add_option("--seed", cert.seed, "Trial seed to replay")->needs(config_opt);
  cert_cmd->add_flag("--boundary", cert.boundary, "Replay a boundary-row trial");
  input_opt->excludes(config_opt);
  cert_cmd->add_option("--beta", cert.beta, "Single beta")->check(CLI::PositiveNumber);
  cert_cmd->add_option("--form", cert.form, "Contraction form")->check(CLI::IsMember({"geo", "arith"}));
  cert_cmd->add_option("--out", cert.out, "Certificate output path");
  cert_cmd->add_option("--dump-input", cert.dump_input, "Write the certified input here");

  Index blocks = 0;
  std::string table_out;
  auto* exp_cmd = app.add_subcommand("experiment", "Experiment tables");
  exp_cmd->require_subcommand(1);
  auto* div_cmd = exp_cmd->add_subcommand("schur-divergence", "Trace norms of truncated block sums");
  div_cmd->add_option("--blocks", blocks, "Number of blocks N")->required();
  div_cmd->add_option("--out", table_out, "CSV path (default stdout)");

  std::string a_path, b_path, mode = "normalized", dom_out;
  auto* spec_cmd = app.add_subcommand("spectral", "Spectral scale tools");
  spec_cmd->require_subcommand(1);
  auto* dom_cmd = spec_cmd->add_subcommand("dominance", "Check lambda_t(A) <= lambda_t(B) for all t");
  dom_cmd->add_option("--a", a_path, "Matrix A (JSON)")->required();
  dom_cmd->add_option("--b", b_path, "Matrix B (JSON)")->required();
  dom_cmd->add_option("--mode", mode, "Trace mode")->check(CLI::IsMember({"normalized", "unnormalized"}));
  dom_cmd->add_option("--out", dom_out, "Report path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsage;
  }

  try {
    if (*verify_cmd) return run_verify(verify);
    if (*cert_cmd) return run_certify(cert);
    if (*div_cmd) return run_schur_divergence(blocks, table_out);
    if (*dom_cmd) return run_dominance(a_path, b_path, mode, dom_out);
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kUsage;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kUsage;
  }
  return kUsage;
}
