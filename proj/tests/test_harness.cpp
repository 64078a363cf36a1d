#include <gtest/gtest.h>

#include <cstdlib>
#include <regex>

#include "oplab/oplab.hpp"

using namespace oplab;

namespace {

std::string strip_elapsed(const std::string& report) {
  return std::regex_replace(report, std::regex("\"elapsed_seconds\":[^,}]*"), "");
}

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorKind::InvalidArgument;
}

}  // namespace

TEST(Io, FormatDouble) {
  EXPECT_EQ(io::format_double(0.1), "1.0000000000000001e-01");
  EXPECT_EQ(io::format_double(-2.0), "-2.0000000000000000e+00");
  EXPECT_THROW(io::format_double(std::nan("")), Error);
}

TEST(Io, MatrixRoundTripIsBitExact) {
  Rng rng(1);
  const ComplexMatrix m = ginibre(3, 4, rng);
  const ComplexMatrix back = io::matrix_from_json(io::parse_document(io::dump(io::to_json(m))));
  EXPECT_EQ(back, m);
}

TEST(Io, MapRoundTrip) {
  Rng rng(2);
  const ComplexMatrix x = ginibre(4, 4, rng);
  const std::vector<PositiveMap> maps = {
      random_map(MapKind::kraus, 4, 2, rng),
      random_map(MapKind::schur, 4, 4, rng),
      random_map(MapKind::pinching, 4, 4, rng),
      PositiveMap::identity(4),
      PositiveMap::compose(random_map(MapKind::schur, 4, 4, rng), random_map(MapKind::pinching, 4, 4, rng)),
  };
  for (const auto& map : maps) {
    const PositiveMap back = io::map_from_json(io::parse_document(io::dump(io::to_json(map))));
    EXPECT_EQ(back.input_dim(), map.input_dim());
    EXPECT_LT((back.apply(x) - map.apply(x)).norm(), 1e-13);
  }
  const PositiveMap lifted = PositiveMap::lift_sum(PositiveMap::lift_corner(random_map(MapKind::kraus, 2, 3, rng)));
  const PositiveMap back = io::map_from_json(io::to_json(lifted));
  const ComplexMatrix y = ginibre(8, 8, rng);
  EXPECT_LT((back.apply(y) - lifted.apply(y)).norm(), 1e-13);
}

TEST(Io, ParseErrorsCarryLocation) {
  try {
    io::parse_document("{\n  \"rows\": 2,\n  oops\n}", "in.json");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ParseError);
    EXPECT_NE(std::string(e.what()).find("in.json:3"), std::string::npos) << e.what();
  }
  try {
    io::matrix_from_json(io::parse_document(R"({"rows": 1, "cols": 2, "data": [[1, 0], [2]]})"), "/operands/0");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ParseError);
    EXPECT_NE(std::string(e.what()).find("/operands/0/data/1"), std::string::npos) << e.what();
  }
  EXPECT_EQ(kind_of([] { io::map_from_json(io::parse_document(R"({"variant": "nope"})")); }),
            ErrorKind::ParseError);
  EXPECT_EQ(kind_of([] { io::read_file("/nonexistent/file.json"); }), ErrorKind::IoError);
}

TEST(Io, CertificateRoundTrip) {
  Rng rng(3);
  const InequalityCertificate c =
      certify_normal_beta(random_map(MapKind::kraus, 3, 3, rng), random_normal(3, rng), 2.0);
  const InequalityCertificate back = io::certificate_from_json(io::parse_document(io::dump(io::to_json(c))));
  EXPECT_EQ(back.theorem, c.theorem);
  EXPECT_EQ(back.margin, c.margin);
  EXPECT_EQ(*back.beta, 2.0);
  EXPECT_EQ(back.accepted, c.accepted);
  EXPECT_EQ(back.lhs, c.lhs);
  EXPECT_EQ(back.rhs, c.rhs);
  EXPECT_EQ(back.V, c.V);
}

TEST(Io, SpectralScaleSerialization) {
  ComplexMatrix a = ComplexMatrix::Zero(2, 2);
  a(0, 0) = 3.0;
  a(1, 1) = 1.0;
  const io::Json j = io::to_json(spectral_scale(a, TraceMode::normalized));
  EXPECT_EQ(j["trace_mode"], "normalized");
  EXPECT_EQ(j["pieces"].size(), 2u);
  EXPECT_EQ(j["pieces"][1][0].get<double>(), 0.5);
  EXPECT_EQ(j["pieces"][1][1].get<double>(), 1.0);
}

TEST(SuiteConfigTest, Validation) {
  SuiteConfig c;
  c.trials = 0;
  EXPECT_EQ(kind_of([&] { c.validate(); }), ErrorKind::ConfigInvalid);
  c = SuiteConfig{};
  c.dim_min = 2;
  c.theorems = {TheoremId::EigSchur};
  EXPECT_EQ(kind_of([&] { c.validate(); }), ErrorKind::ConfigInvalid);
  c.dim_min = 3;
  EXPECT_NO_THROW(c.validate());
  c.dim_max = 2;
  EXPECT_EQ(kind_of([&] { c.validate(); }), ErrorKind::ConfigInvalid);
}

TEST(SuiteConfigTest, FromJson) {
  const SuiteConfig c = config_from_json(io::parse_document(R"({
    "master_seed": 7, "trials": 3, "dim_range": [3, 5], "beta_grid": [1, 2],
    "tolerance": {"rel": 1e-9}, "theorems": ["ThmBH", "EigSchur"], "threads": 2})"));
  EXPECT_EQ(c.master_seed, 7u);
  EXPECT_EQ(c.trials, 3);
  EXPECT_EQ(c.dim_min, 3);
  EXPECT_EQ(c.dim_max, 5);
  EXPECT_EQ(c.beta_grid, (std::vector<double>{1, 2}));
  EXPECT_EQ(c.tolerance.rel, 1e-9);
  EXPECT_EQ(c.tolerance.abs, 1e-12);
  EXPECT_EQ(c.theorems.size(), 2u);
  EXPECT_EQ(kind_of([] { config_from_json(io::parse_document(R"({"theorems": ["Nope"]})")); }),
            ErrorKind::ConfigInvalid);
  EXPECT_EQ(kind_of([] { config_from_json(io::parse_document(R"({"trials": "many"})")); }),
            ErrorKind::ConfigInvalid);
}

TEST(Suite, ThmBhTenTrials) {
  SuiteConfig c;
  c.master_seed = 1;
  c.trials = 10;
  c.theorems = {TheoremId::ThmBH};
  const SuiteReport r = run_suite(c);
  ASSERT_EQ(r.theorems.size(), 1u);
  EXPECT_EQ(r.theorems[0].trials, 10);
  EXPECT_EQ(r.theorems[0].accepted, 10);
  EXPECT_TRUE(r.all_accepted());
}

TEST(Suite, EveryTheoremRuns) {
  SuiteConfig c;
  c.master_seed = 3;
  c.trials = 4;
  c.dim_min = 3;
  c.dim_max = 6;
  const SuiteReport r = run_suite(c);
  EXPECT_EQ(r.theorems.size(), std::size(kAllTheorems) + 1);  // plus the boundary row
  for (const auto& s : r.theorems) {
    EXPECT_EQ(s.accepted, s.trials) << s.label << (s.errors.empty() ? "" : ": " + s.errors.front());
  }
}

TEST(Suite, ParallelRunsMatchSequential) {
  SuiteConfig c;
  c.master_seed = 99;
  c.trials = 6;
  c.dim_min = 3;
  c.dim_max = 6;
  c.theorems = {TheoremId::ThmBH, TheoremId::CorRD1, TheoremId::EigSchur};
  const std::string sequential = report_to_text(run_suite(c), c);
  c.threads = 3;
  const std::string parallel = report_to_text(run_suite(c), c);
  c.threads = 1;
  EXPECT_EQ(strip_elapsed(sequential), strip_elapsed(parallel));
  EXPECT_EQ(strip_elapsed(sequential), strip_elapsed(report_to_text(run_suite(c), c)));
}

TEST(Suite, ReplayThroughSerializedInput) {
  SuiteConfig c;
  c.master_seed = 5;
  c.trials = 5;
  c.theorems = {TheoremId::ThmSemi, TheoremId::CorCons2Minus};
  c.keep_certificates = true;
  const SuiteReport r = run_suite(c);
  for (const auto& trial : r.trials) {
    const TrialInput in = make_trial_input(trial.theorem, trial.seed, c);
    const auto direct = certify_input(trial.theorem, in, options_for(c), c.tolerance);
    const TrialInput back = trial_input_from_json(io::parse_document(io::dump(to_json(in))));
    const auto loaded = certify_input(trial.theorem, back, options_for(c), c.tolerance);
    ASSERT_EQ(direct.size(), trial.certificates.size());
    ASSERT_EQ(loaded.size(), trial.certificates.size());
    for (std::size_t k = 0; k < direct.size(); ++k) {
      const double m = trial.certificates[k].margin;
      EXPECT_EQ(io::format_double(direct[k].margin), io::format_double(m));
      EXPECT_NEAR(loaded[k].margin, m, 1e-12 * (1.0 + std::abs(m))) << to_string(trial.theorem);
    }
  }
}

TEST(Suite, SeedsDifferPerTheoremAndTrial) {
  EXPECT_NE(trial_seed(1, TheoremId::ThmBH, 0), trial_seed(1, TheoremId::ThmBH, 1));
  EXPECT_NE(trial_seed(1, TheoremId::ThmBH, 0), trial_seed(1, TheoremId::CorRD1, 0));
  EXPECT_NE(trial_seed(1, TheoremId::CorRD1, 0), trial_seed(1, TheoremId::CorRD1, 0, true));
  EXPECT_EQ(trial_seed(1, TheoremId::ThmBH, 0) ^ 1u, trial_seed(0, TheoremId::ThmBH, 0));
}

TEST(Suite, ReportLines) {
  SuiteConfig c;
  c.trials = 2;
  c.theorems = {TheoremId::NuBound};
  const std::string text = report_to_text(run_suite(c), c);
  std::istringstream lines(text);
  std::string line;
  std::vector<io::Json> parsed;
  while (std::getline(lines, line)) parsed.push_back(io::parse_document(line));
  ASSERT_EQ(parsed.size(), 3u);
  EXPECT_EQ(parsed[0]["type"], "header");
  EXPECT_EQ(parsed[0]["precision"], "binary64");
  EXPECT_EQ(parsed[1]["theorem_id"], "NuBound");
  EXPECT_EQ(parsed[1]["accepted"], 2);
  EXPECT_EQ(parsed[2]["type"], "footer");
}
