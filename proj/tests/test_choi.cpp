#include <gtest/gtest.h>

#include "superrad/choi.hpp"

using namespace superrad;

namespace {

HalfInt half(int twice) { return HalfInt::from_twice(twice); }

ComplexMatrix maximally_entangled(int n) {
  const auto d = static_cast<Eigen::Index>(atom_dim(n));
  ComplexVector psi = ComplexVector::Zero(d * d);
  for (Eigen::Index i = 0; i < d; ++i) psi(i * d + i) = 1.0;
  psi /= std::sqrt(static_cast<double>(d));
  return projector(psi);
}

}  // namespace

TEST(Choi, IdentityMapGivesMaximallyEntangledState) {
  for (int n = 1; n <= 3; ++n) {
    const ChoiMatrix c = choi_of_map([](const ComplexMatrix& r) { return r; }, n);
    EXPECT_EQ(c.dim, atom_dim(n) * atom_dim(n));
    EXPECT_LT(max_abs(c.matrix - maximally_entangled(n)), 1e-14);
  }
}

TEST(Choi, QuadraticMapAtZeroIsIdentity) {
  const ChoiMatrix c = choi_quadratic(SystemSpec::common(2, 3.0), 0.0);
  EXPECT_LT(max_abs(c.matrix - maximally_entangled(2)), 1e-14);
  EXPECT_EQ(c.source, ChoiSource::Quadratic);
  EXPECT_EQ(choi_error(SystemSpec::common(2, 3.0), 0.0), 0.0);
}

TEST(Choi, ExactMapIsCompletelyPositive) {
  const ChoiMatrix c = choi_exact(SystemSpec::common(1, 0.0), 0.5);
  EXPECT_NEAR(c.matrix.trace().real(), 1.0, 1e-9);
  EXPECT_LT(hermiticity_error(c.matrix), 1e-10);
  EXPECT_GE(c.min_eigenvalue, -1e-9);
  const ChoiMatrix c2 = choi_exact(SystemSpec::common(2, 1.0), 0.8);
  EXPECT_NEAR(c2.matrix.trace().real(), 1.0, 1e-9);
  EXPECT_GE(c2.min_eigenvalue, -1e-9);
}

TEST(Choi, SingleAtomAgreesWithPairChannel) {
  const double gt = 0.7;
  const ChoiMatrix c = choi_exact(SystemSpec::common(1, 0.0), gt, {1e-12});
  const PairChannel ch = single_pair_channel(0.0, gt, {1e-12});
  // (1/2) sum_ab Phi(|a><b|) (x) |a><b|.
  ComplexMatrix ref = ComplexMatrix::Zero(4, 4);
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int r = 0; r < 2; ++r)
        for (int s = 0; s < 2; ++s) ref(2 * r + a, 2 * s + b) = 0.5 * ch(2 * r + s, 2 * a + b);
  EXPECT_LT(max_abs(c.matrix - ref), 1e-9);
}

TEST(Choi, ParallelAssemblyIsDeterministic) {
  const SystemSpec spec = SystemSpec::common(2, 0.5);
  const ChoiMatrix a = choi_exact(spec, 0.3, {}, 1);
  const ChoiMatrix b = choi_exact(spec, 0.3, {}, 3);
  EXPECT_EQ(max_abs(a.matrix - b.matrix), 0.0);
}

TEST(Choi, CapacityGuard) { EXPECT_THROW(choi_error(SystemSpec::common(7, 0.0), 0.01), CapacityError); }

TEST(ChoiError, SmallAtEarlyTimes) {
  EXPECT_LT(choi_error(SystemSpec::common(2, 10.0), 0.01), 1e-5);
  EXPECT_LT(choi_error(SystemSpec::common(2, 0.0), 1e-4), choi_error(SystemSpec::common(2, 0.0), 1e-3));
}

TEST(ChoiError, GrowsWithLoss) {
  for (double gt : {0.005, 0.01}) {
    const double e0 = choi_error(SystemSpec::common(2, 0.0), gt);
    const double e1 = choi_error(SystemSpec::common(2, 1.0), gt);
    const double e10 = choi_error(SystemSpec::common(2, 10.0), gt);
    EXPECT_LE(e0, e1);
    EXPECT_LE(e1, e10);
  }
}

TEST(ChoiError, LossyCurveScalesAsCube) {
  const double times[] = {0.003, 0.01, 0.03};
  const ErrorCurve c = choi_error_curve(SystemSpec::common(2, 1.0), times);
  EXPECT_NEAR(c.log_slope, 3.0, 0.5);
}

TEST(LogLogSlope, RecoversPowerLaws) {
  const double x[] = {0.1, 0.2, 0.4, 0.8};
  double y[4];
  for (int i = 0; i < 4; ++i) y[i] = 7.0 * std::pow(x[i], 2.5);
  EXPECT_NEAR(log_log_slope(x, y), 2.5, 1e-12);
}

TEST(ExcitationError, Examples) {
  for (double gamma : {0.0, 1.0, 10.0}) {
    EXPECT_LT(excitation_error(SystemSpec::common(2, gamma), Dicke{half(2), half(2)}, 0.01), 1e-5);
  }
  EXPECT_EQ(excitation_error(SystemSpec::common(2, 1.0), Dicke{half(2), half(2)}, 0.0), 0.0);
  EXPECT_GT(excitation_error(SystemSpec::common(6, 0.0), Dicke{half(6), half(6)}, 0.01),
            excitation_error(SystemSpec::common(2, 0.0), Dicke{half(2), half(2)}, 0.01));
}

TEST(ExcitationError, LadderMatchesFullSpaceConstruction) {
  const SystemSpec spec = SystemSpec::common(3, 2.0);
  const Dicke d{half(3), half(1)};
  const double gt = 0.05;
  const DensityMatrix rho = build_initial(spec, d);
  EvolveOptions opts;
  opts.probe_times = {gt};
  const Trajectory tr = evolve_common(spec, rho, gt, {}, opts);
  const DensityMatrix quad = quad_map(rho, gt, Topology::CommonCavity);
  const RealVector exc = excitation_diagonal(3);
  const double full = std::abs(excitation_number(quad.matrix(), exc) - excitation_number(tr.atom_states[0].matrix(), exc));
  EXPECT_NEAR(excitation_error(spec, d, gt), full, 1e-10);
}
