#include <gtest/gtest.h>

#include <cmath>

#include "oplab/ensemble.hpp"
#include "oplab/posmaps.hpp"
#include "oracles.hpp"

using namespace oplab;

namespace {

ComplexMatrix diag(std::initializer_list<double> v) {
  RealVector d(static_cast<Index>(v.size()));
  Index i = 0;
  for (double x : v) d(i++) = x;
  return d.cast<Complex>().asDiagonal();
}

ComplexMatrix unit_column(Index n, Index k) {
  ComplexMatrix e = ComplexMatrix::Zero(n, 1);
  e(k, 0) = 1.0;
  return e;
}

}  // namespace

TEST(Apply, PinchingTwoBlocks) {
  ComplexMatrix x(2, 2);
  x << 1.0, 2.0, 3.0, 4.0;
  const ComplexMatrix y = PositiveMap::pinching({{0}, {1}}, 2).apply(x);
  EXPECT_EQ(y, diag({1, 4}));
}

TEST(Apply, AllOnesSchurIsIdentity) {
  Rng rng(1);
  const ComplexMatrix x = ginibre(4, 4, rng);
  const PositiveMap map = PositiveMap::schur(PsdMatrix::from_hermitian(ComplexMatrix::Ones(4, 4)));
  EXPECT_LT((map.apply(x) - x).norm(), 1e-14);
  EXPECT_EQ(PositiveMap::identity(4).apply(x), x);
}

TEST(Apply, KrausVectorState) {
  Rng rng(2);
  const ComplexMatrix x = ginibre(3, 3, rng);
  const PositiveMap map = PositiveMap::kraus({unit_column(3, 0)});
  EXPECT_EQ(map.output_dim(), 1);
  EXPECT_EQ(map.apply(x)(0, 0), x(0, 0));
}

TEST(Apply, TraceFunctional) {
  Rng rng(3);
  const ComplexMatrix x = ginibre(4, 4, rng);
  std::vector<ComplexMatrix> columns;
  for (Index k = 0; k < 4; ++k) columns.push_back(unit_column(4, k));
  EXPECT_LT(std::abs(PositiveMap::kraus(columns).apply(x)(0, 0) - x.trace()), 1e-14);
}

TEST(Apply, Lifts) {
  Rng rng(4);
  const ComplexMatrix x = ginibre(6, 6, rng);
  const PositiveMap inner = random_map(MapKind::kraus, 3, 2, rng);
  const ComplexMatrix sum = x.topLeftCorner(3, 3) + x.topRightCorner(3, 3) + x.bottomLeftCorner(3, 3) +
                            x.bottomRightCorner(3, 3);
  EXPECT_LT((PositiveMap::lift_sum(inner).apply(x) - inner.apply(sum)).norm(), 1e-13);
  EXPECT_LT((PositiveMap::lift_corner(inner).apply(x) - inner.apply(x.topLeftCorner(3, 3))).norm(), 1e-13);
}

TEST(Apply, ComposeAndDimensionErrors) {
  Rng rng(5);
  const PositiveMap inner = random_map(MapKind::kraus, 4, 3, rng);
  const PositiveMap outer = random_map(MapKind::schur, 3, 3, rng);
  const PositiveMap both = PositiveMap::compose(outer, inner);
  const ComplexMatrix x = ginibre(4, 4, rng);
  EXPECT_LT((both.apply(x) - outer.apply(inner.apply(x))).norm(), 1e-13);
  EXPECT_THROW(PositiveMap::compose(inner, outer), Error);
  try {
    both.apply(ginibre(3, 3, rng));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::DimensionMismatch);
  }
}

TEST(Pinching, RejectsBadPartitions) {
  EXPECT_THROW(PositiveMap::pinching({{0}, {0, 1}}, 2), Error);
  EXPECT_THROW(PositiveMap::pinching({{0}}, 2), Error);
  EXPECT_THROW(PositiveMap::pinching({{0, 2}}, 2), Error);
  EXPECT_THROW(PositiveMap::pinching({{0}, {}, {1}}, 2), Error);
}

TEST(UnitImage, Examples) {
  Rng rng(6);
  const ComplexMatrix s = random_psd(4, rng);
  EXPECT_LT((unit_image(PositiveMap::schur(PsdMatrix::from_hermitian(s))).matrix() -
             ComplexMatrix(s.diagonal().asDiagonal()))
                .norm(),
            1e-13);
  EXPECT_LT((unit_image(PositiveMap::pinching({{0, 2}, {1}, {3}}, 4)).matrix() - ComplexMatrix::Identity(4, 4)).norm(),
            1e-15);
  const ComplexMatrix k = ginibre(4, 2, rng);
  EXPECT_LT((unit_image(PositiveMap::kraus({k})).matrix() - k.adjoint() * k).norm(), 1e-13);
}

TEST(Positivity, PinchingAndKrausPass) {
  const PositivityReport pinch = positivity_sample_test(PositiveMap::pinching({{0, 1}, {2}}, 3), 100, 1);
  EXPECT_TRUE(pinch.pass);
  EXPECT_GE(pinch.worst_margin, -1e-12);
  Rng rng(7);
  EXPECT_TRUE(positivity_sample_test(random_map(MapKind::kraus, 5, 3, rng), 100, 2).pass);
  EXPECT_TRUE(positivity_sample_test(random_map(MapKind::schur, 5, 5, rng), 100, 3).pass);
}

TEST(Positivity, NonPsdMultiplier) {
  ComplexMatrix s(2, 2);
  s << 1.0, 2.0, 2.0, 1.0;
  EXPECT_THROW(PositiveMap::schur(PsdMatrix::from_hermitian(s)), Error);
  const PositiveMap bad = PositiveMap::schur_unchecked(s);
  // Explicit witness: S o [[1,1],[1,1]] = S has eigenvalue -1.
  EXPECT_NEAR(oracle::eig_desc(bad.apply(ComplexMatrix::Ones(2, 2))).back(), -1.0, 1e-15);
  EXPECT_FALSE(positivity_sample_test(bad, 200, 4).pass);
}

TEST(SchurCounterexample, SmallTruncations) {
  const SchurBlockCounterexample one = schur_block_counterexample(1);
  EXPECT_NEAR(one.trace_norm_abs, 1.0, 1e-15);
  EXPECT_NEAR(one.trace_norm_raw_lower, 1.0, 1e-15);
  const SchurBlockCounterexample two = schur_block_counterexample(2);
  EXPECT_NEAR(two.trace_norm_abs, 1.25, 1e-15);
  EXPECT_NEAR(two.trace_norm_raw_lower, 1.5, 1e-15);
}

TEST(SchurCounterexample, BlocksMatchDisplays) {
  const SchurBlockCounterexample c = schur_block_counterexample(5);
  for (std::size_t k = 0; k < 5; ++k) {
    const double n = static_cast<double>(k + 1);
    Eigen::Matrix2cd abs_block = Eigen::Matrix2cd::Zero();
    abs_block(0, 0) = 1.0 / (n * n);
    Eigen::Matrix2cd raw_block = Eigen::Matrix2cd::Zero();
    raw_block(1, 0) = 1.0 / n;
    EXPECT_LT((c.image_abs[k] - abs_block).norm(), 1e-15);
    EXPECT_LT((c.image_raw[k] - raw_block).norm(), 1e-15);
  }
}

TEST(SchurCounterexample, DenseTruncationAgrees) {
  // Assemble the 2N x 2N direct sums and sum singular values from eig(X*X).
  const Index blocks = 6;
  const SchurBlockCounterexample c = schur_block_counterexample(blocks);
  ComplexMatrix abs_sum = ComplexMatrix::Zero(2 * blocks, 2 * blocks);
  ComplexMatrix raw_sum = abs_sum;
  for (Index k = 0; k < blocks; ++k) {
    abs_sum.block(2 * k, 2 * k, 2, 2) = c.image_abs[static_cast<std::size_t>(k)];
    raw_sum.block(2 * k, 2 * k, 2, 2) = c.image_raw[static_cast<std::size_t>(k)];
  }
  double abs_norm = 0.0, raw_norm = 0.0;
  for (double s : oracle::singular_values(abs_sum)) abs_norm += s;
  for (double s : oracle::singular_values(raw_sum)) raw_norm += s;
  EXPECT_NEAR(c.trace_norm_abs, abs_norm, 1e-12);
  EXPECT_NEAR(c.trace_norm_raw_lower, raw_norm, 1e-12);
}

TEST(SchurCounterexample, PartialSums) {
  const SchurBlockCounterexample hundred = schur_block_counterexample(100);
  EXPECT_NEAR(hundred.trace_norm_abs, 1.63498390018489, 1e-12);
  EXPECT_NEAR(hundred.trace_norm_raw_lower, 5.18737751763962, 1e-12);
}

TEST(Ensembles, Shapes) {
  Rng rng(8);
  EXPECT_TRUE(classify(random_matrix(MatrixKind::unitary, 4, rng), OperatorClass::unitary));
  EXPECT_TRUE(classify(random_matrix(MatrixKind::normal, 5, rng), OperatorClass::normal));
  EXPECT_NEAR(oracle::singular_values(random_matrix(MatrixKind::contraction, 6, rng)).front(), 0.9, 1e-12);
  EXPECT_TRUE(classify(random_matrix(MatrixKind::psd, 3, rng), OperatorClass::psd));
  const PositiveMap k = random_map(MapKind::kraus, 5, 2, rng);
  EXPECT_EQ(k.input_dim(), 5);
  EXPECT_EQ(k.output_dim(), 2);
  const PositiveMap s = random_map(MapKind::schur, 4, 4, rng);
  const auto& mult = std::get<PositiveMap::Schur>(s.variant()).multiplier;
  EXPECT_NEAR(mult.diagonal().real().maxCoeff(), 1.0, 1e-15);
  EXPECT_THROW(random_map(MapKind::pinching, 3, 2, rng), Error);
  EXPECT_THROW(random_matrix(MatrixKind::ginibre, 0, rng), Error);
}

TEST(Ensembles, BitIdenticalBySeed) {
  EXPECT_EQ(random_matrix(MatrixKind::normal, 6, 42), random_matrix(MatrixKind::normal, 6, 42));
  const PositiveMap a = random_map(MapKind::pinching, 7, 7, 9);
  const PositiveMap b = random_map(MapKind::pinching, 7, 7, 9);
  EXPECT_EQ(std::get<PositiveMap::Pinching>(a.variant()).partition,
            std::get<PositiveMap::Pinching>(b.variant()).partition);
}
