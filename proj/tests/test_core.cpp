#include <gtest/gtest.h>

#include <random>

#include "superrad/core.hpp"
#include "test_support.hpp"

using namespace superrad;
using superrad::testing::random_density;
using superrad::testing::random_matrix;

namespace {

// Reference partial trace by explicit index arithmetic over a bipartition.
ComplexMatrix trace_second(const ComplexMatrix& op, Eigen::Index da, Eigen::Index db) {
  ComplexMatrix out = ComplexMatrix::Zero(da, da);
  for (Eigen::Index a = 0; a < da; ++a)
    for (Eigen::Index c = 0; c < da; ++c)
      for (Eigen::Index b = 0; b < db; ++b) out(a, c) += op(a * db + b, c * db + b);
  return out;
}

ComplexMatrix trace_first(const ComplexMatrix& op, Eigen::Index da, Eigen::Index db) {
  ComplexMatrix out = ComplexMatrix::Zero(db, db);
  for (Eigen::Index b = 0; b < db; ++b)
    for (Eigen::Index d = 0; d < db; ++d)
      for (Eigen::Index a = 0; a < da; ++a) out(b, d) += op(a * db + b, a * db + d);
  return out;
}

}  // namespace

TEST(TensorProduct, KroneckerEntries) {
  std::mt19937 rng(1);
  const ComplexMatrix a = random_matrix(rng, 2, 3), b = random_matrix(rng, 3, 2);
  const ComplexMatrix k = tensor_product(a, b);
  ASSERT_EQ(k.rows(), 6);
  ASSERT_EQ(k.cols(), 6);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 3; ++j)
      for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 2; ++c) EXPECT_EQ(k(i * 3 + r, j * 2 + c), a(i, j) * b(r, c));
}

TEST(TensorProduct, MixedProductProperty) {
  std::mt19937 rng(2);
  const ComplexMatrix a = random_matrix(rng, 2, 2), b = random_matrix(rng, 3, 3);
  const ComplexMatrix c = random_matrix(rng, 2, 2), d = random_matrix(rng, 3, 3);
  const ComplexMatrix lhs = tensor_product(a, b) * tensor_product(c, d);
  const ComplexMatrix rhs = tensor_product(a * c, b * d);
  EXPECT_LT(max_abs(lhs - rhs), 1e-12);
}

TEST(TensorProduct, CapacityGuard) {
  const ComplexMatrix a = ComplexMatrix::Identity(64, 64);
  EXPECT_THROW(tensor_product(a, a, 1024), CapacityError);
}

TEST(PartialTrace, MatchesExplicitSumOnRandomOperators) {
  std::mt19937 rng(3);
  for (int trial = 0; trial < 10; ++trial) {
    const ComplexMatrix op = random_matrix(rng, 12, 12);
    const Layout layout{3, 4};
    const std::size_t keep_a[] = {0}, keep_b[] = {1};
    EXPECT_LT(max_abs(partial_trace(op, layout, keep_a) - trace_second(op, 3, 4)), 1e-12);
    EXPECT_LT(max_abs(partial_trace(op, layout, keep_b) - trace_first(op, 3, 4)), 1e-12);
  }
}

TEST(PartialTrace, ProductStateFactorizes) {
  std::mt19937 rng(4);
  const ComplexMatrix a = random_density(rng, 2), b = random_density(rng, 3), c = random_density(rng, 2);
  const ComplexMatrix abc = tensor_product(tensor_product(a, b), c);
  const DensityMatrix rho(abc, {2, 3, 2});
  const std::size_t keep_ac[] = {2, 0};
  const DensityMatrix ac = partial_trace(rho, keep_ac);
  EXPECT_EQ(ac.layout(), (Layout{2, 2}));
  EXPECT_LT(max_abs(ac.matrix() - tensor_product(a, c)), 1e-12);
}

TEST(PartialTrace, TraceOutLastAgrees) {
  std::mt19937 rng(5);
  const ComplexMatrix op = random_matrix(rng, 15, 15);
  EXPECT_LT(max_abs(trace_out_last(op, 5) - trace_second(op, 3, 5)), 1e-12);
}

TEST(PartialTrace, RejectsBadArguments) {
  const ComplexMatrix op = ComplexMatrix::Identity(6, 6);
  const Layout layout{2, 3};
  const std::size_t bad[] = {2};
  EXPECT_THROW(partial_trace(op, layout, bad), UsageError);
  EXPECT_THROW(partial_trace(op, layout, std::span<const std::size_t>{}), UsageError);
  const Layout wrong{2, 2};
  const std::size_t keep[] = {0};
  EXPECT_THROW(partial_trace(op, wrong, keep), UsageError);
}

TEST(TraceNorm, MatchesSingularValuesForGeneralMatrices) {
  std::mt19937 rng(6);
  for (int trial = 0; trial < 5; ++trial) {
    const ComplexMatrix a = random_matrix(rng, 5, 5);
    Eigen::JacobiSVD<ComplexMatrix> svd(a);
    EXPECT_NEAR(trace_norm(a), svd.singularValues().sum(), 1e-10);
    const ComplexMatrix h = a + a.adjoint();
    Eigen::JacobiSVD<ComplexMatrix> svd_h(h);
    EXPECT_NEAR(trace_norm(h), svd_h.singularValues().sum(), 1e-10);
  }
}

TEST(TraceDistance, BoundsAndOrthogonalStates) {
  std::mt19937 rng(7);
  for (int trial = 0; trial < 10; ++trial) {
    const ComplexMatrix r = random_density(rng, 4), s = random_density(rng, 4);
    const double d = trace_distance(r, s);
    EXPECT_GE(d, 0.0);
    EXPECT_LE(d, 1.0 + 1e-12);
    EXPECT_NEAR(trace_distance(r, s), trace_distance(s, r), 1e-14);
  }
  ComplexMatrix up = ComplexMatrix::Zero(2, 2), down = ComplexMatrix::Zero(2, 2);
  up(0, 0) = 1.0;
  down(1, 1) = 1.0;
  EXPECT_NEAR(trace_distance(up, down), 1.0, 1e-14);
  EXPECT_NEAR(trace_distance(up, up), 0.0, 1e-14);
}

TEST(HermitianEigenvalues, AscendingAndRejectsNonHermitian) {
  std::mt19937 rng(8);
  const ComplexMatrix r = random_density(rng, 6);
  const auto ev = hermitian_eigenvalues(r);
  EXPECT_TRUE(std::is_sorted(ev.begin(), ev.end()));
  double s = 0.0;
  for (double v : ev) s += v;
  EXPECT_NEAR(s, 1.0, 1e-12);
  EXPECT_THROW(hermitian_eigenvalues(random_matrix(rng, 3, 3)), UsageError);
}

TEST(DensityMatrix, ValidatesInvariants) {
  std::mt19937 rng(9);
  EXPECT_NO_THROW(DensityMatrix(random_density(rng, 4), {2, 2}));
  EXPECT_THROW(DensityMatrix(random_density(rng, 4), {2, 3}), UsageError);
  EXPECT_THROW(DensityMatrix(ComplexMatrix::Identity(2, 3)), UsageError);
  EXPECT_THROW(DensityMatrix(ComplexMatrix::Identity(2, 2)), UsageError);  // trace 2
  ComplexMatrix nh = random_density(rng, 2);
  nh(0, 1) += 1e-6;
  EXPECT_THROW(DensityMatrix{nh}, UsageError);
  ComplexMatrix inf = random_density(rng, 2);
  inf(0, 0) = std::numeric_limits<double>::infinity();
  EXPECT_THROW(DensityMatrix{inf}, UsageError);
}

TEST(DensityMatrix, PositivityReported) {
  ComplexMatrix m = ComplexMatrix::Zero(2, 2);
  m(0, 0) = 1.2;
  m(1, 1) = -0.2;
  const DensityMatrix d(m);
  EXPECT_NEAR(d.min_eigenvalue(), -0.2, 1e-14);
  EXPECT_FALSE(d.is_positive());
  std::mt19937 rng(10);
  EXPECT_TRUE(DensityMatrix(random_density(rng, 3)).is_positive());
}

TEST(CoreExamples, BasisBookkeeping) {
  EXPECT_LT(max_abs(tensor_product(ComplexMatrix::Identity(2, 2), ComplexMatrix::Identity(2, 2)) -
                    ComplexMatrix::Identity(4, 4)),
            1e-15);
  ComplexMatrix e = ComplexMatrix::Zero(2, 2), vac = ComplexMatrix::Zero(2, 2);
  e(0, 0) = 1.0;
  vac(0, 0) = 1.0;
  const ComplexMatrix k = tensor_product(e, vac);
  EXPECT_EQ(k(0, 0), Complex(1.0));
  EXPECT_NEAR(k.cwiseAbs().sum(), 1.0, 1e-15);
}

TEST(CoreExamples, BellStateReducesToMaximallyMixed) {
  ComplexVector bell = ComplexVector::Zero(4);
  bell(0) = bell(3) = 1.0 / std::sqrt(2.0);
  const DensityMatrix rho(projector(bell), {2, 2});
  const std::size_t keep[] = {0};
  EXPECT_LT(max_abs(partial_trace(rho, keep).matrix() - 0.5 * ComplexMatrix::Identity(2, 2)), 1e-15);
}

TEST(CoreExamples, RandomThreeFactorTracePreserved) {
  std::mt19937 rng(11);
  const DensityMatrix rho(random_density(rng, 12), {2, 3, 2});
  for (std::size_t k = 0; k < 3; ++k) {
    const std::size_t keep[] = {k};
    EXPECT_NEAR(partial_trace(rho, keep).matrix().trace().real(), 1.0, 1e-12);
  }
}

TEST(CoreExamples, TraceNormValues) {
  ComplexMatrix d = ComplexMatrix::Zero(2, 2);
  d(0, 0) = 1.0;
  d(1, 1) = -1.0;
  EXPECT_NEAR(trace_norm(d), 2.0, 1e-15);
  std::mt19937 rng(12);
  ComplexVector psi = random_matrix(rng, 5, 1);
  psi.normalize();
  EXPECT_NEAR(trace_norm(projector(psi)), 1.0, 1e-12);
  EXPECT_THROW(trace_norm(ComplexMatrix::Zero(2, 3)), UsageError);
}

TEST(CoreExamples, EigenvalueExamples) {
  const auto id = hermitian_eigenvalues(ComplexMatrix::Identity(3, 3));
  for (double v : id) EXPECT_NEAR(v, 1.0, 1e-15);
  ComplexMatrix x = ComplexMatrix::Zero(2, 2);
  x(0, 1) = x(1, 0) = 1.0;
  const auto px = hermitian_eigenvalues(x);
  EXPECT_NEAR(px[0], -1.0, 1e-15);
  EXPECT_NEAR(px[1], 1.0, 1e-15);
  std::mt19937 rng(13);
  const ComplexMatrix g = random_matrix(rng, 8, 8);
  const ComplexMatrix h = g + g.adjoint();
  double s = 0.0;
  for (double v : hermitian_eigenvalues(h)) s += v;
  EXPECT_NEAR(s, h.trace().real(), 1e-12);
}

TEST(CoreExamples, TraceDistanceMatchesEigensolve) {
  std::mt19937 rng(14);
  const ComplexMatrix r = random_density(rng, 2), s = random_density(rng, 2);
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(r - s);
  EXPECT_NEAR(trace_distance(r, s), 0.5 * es.eigenvalues().cwiseAbs().sum(), 1e-14);
  EXPECT_THROW(trace_distance(r, random_density(rng, 3)), UsageError);
}
