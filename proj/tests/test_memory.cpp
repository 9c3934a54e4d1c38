#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "superrad/closed_form.hpp"
#include "superrad/memory.hpp"
#include "test_support.hpp"

using namespace superrad;

namespace {

HalfInt half(int twice) { return HalfInt::from_twice(twice); }

DensityMatrix excited_atom() {
  ComplexMatrix e = ComplexMatrix::Zero(2, 2);
  e(0, 0) = 1.0;
  return DensityMatrix(e, {2});
}

// (1/4) || sum_K L_K[rho] ||_1 built directly from dense operators.
double dissipator_quarter_norm(const InitialState& init, Topology topology) {
  const int n = atom_count(init);
  const ComplexMatrix rho = build_initial(SystemSpec::common(n, 0.0), init).matrix();
  ComplexMatrix gen = ComplexMatrix::Zero(rho.rows(), rho.cols());
  auto add = [&](const ComplexMatrix& k) {
    const ComplexMatrix kd = k.adjoint();
    gen += k * rho * kd - 0.5 * (kd * k * rho + rho * kd * k);
  };
  if (topology == Topology::CommonCavity) {
    add(collective_lowering(n));
  } else {
    for (int s = 0; s < n; ++s) add(atomic_lowering(n, s));
  }
  return 0.25 * trace_norm(gen);
}

MemoryGridOptions small_grid(int k) {
  MemoryGridOptions o;
  o.grid_points = k;
  o.refine = false;
  return o;
}

}  // namespace

TEST(EvolutionTriplet, AxesGiveIdenticalStates) {
  const SystemSpec spec = SystemSpec::common(2, 0.5);
  const DensityMatrix rho = build_initial(spec, Dicke{half(2), half(2)});
  auto [a, b] = evolution_triplet(spec, rho, 0.0, 0.7);
  EXPECT_LT(trace_distance(a.matrix(), b.matrix()), 1e-12);
  auto [c, d] = evolution_triplet(spec, rho, 0.7, 0.0);
  EXPECT_LT(trace_distance(c.matrix(), d.matrix()), 1e-12);
  EXPECT_THROW(evolution_triplet(spec, rho, -0.1, 0.1), UsageError);
}

TEST(EvolutionTriplet, OneAtomEarlyTimeDifference) {
  const SystemSpec spec = SystemSpec::common(1, 0.0);
  auto [a, b] = evolution_triplet(spec, excited_atom(), 0.005, 0.005);
  EXPECT_NEAR(trace_distance(a.matrix(), b.matrix()), 5e-5, 5e-6);
}

TEST(EvolutionTriplet, ResetKeepsMoreExcitationEarly) {
  const SystemSpec spec = SystemSpec::common(2, 0.0);
  const PreparedDynamics p = prepare_dynamics(spec, Dicke{half(2), half(2)});
  const Triplet t = evolution_triplet(*p.engine, p.rho0, 0.005, 0.005);
  EXPECT_GT(t.delta_n_ex, 0.0);
}

TEST(MemoryGrid, Invariants) {
  const SystemSpec spec = SystemSpec::common(3, 1.0);
  const MemoryGrid g = memory_grid(spec, Dicke{half(3), half(1)}, 2.0, small_grid(11));
  ASSERT_EQ(g.taus.size(), 11u);
  for (int i = 0; i < 11; ++i) {
    for (int j = 0; j < 11; ++j) {
      const double d = g.D(i, j);
      if (i + j > 10) {
        EXPECT_TRUE(std::isnan(d));
        continue;
      }
      EXPECT_GE(d, 0.0);
      EXPECT_LE(d, 1.0);
      if (i == 0 || j == 0) EXPECT_LE(d, 1e-10);
    }
  }
  EXPECT_GT(g.max_D, 0.0);
}

TEST(MemoryGrid, EarlyTimeArgmaxAtEqualSplit) {
  const SystemSpec spec = SystemSpec::common(2, 0.0);
  const MemoryGrid g = memory_grid(spec, Dicke{half(2), half(0)}, 0.01, small_grid(21));
  const double cell = 0.01 / 20;
  EXPECT_NEAR(g.argmax.first, 0.005, cell + 1e-12);
  EXPECT_NEAR(g.argmax.second, 0.005, cell + 1e-12);
}

TEST(MemoryGrid, RefinementNeverLowersTheMaximum) {
  const SystemSpec spec = SystemSpec::common(2, 0.3);
  MemoryGridOptions o = small_grid(9);
  const MemoryGrid coarse = memory_grid(spec, Dicke{half(2), half(2)}, 3.0, o);
  o.refine = true;
  const MemoryGrid fine = memory_grid(spec, Dicke{half(2), half(2)}, 3.0, o);
  EXPECT_GE(fine.max_D, coarse.max_D - 1e-15);
  EXPECT_EQ(fine.grid_max_D, coarse.max_D);
  EXPECT_LE(fine.argmax.first + fine.argmax.second, 3.0 + 1e-12);
}

TEST(MemoryGrid, DiagonalOnlyAutomaticForLargeLoss) {
  const SystemSpec spec = SystemSpec::common(1, 200.0);
  const MemoryGrid g = memory_grid(spec, Dicke{half(1), half(1)}, 0.5, small_grid(11));
  EXPECT_TRUE(g.diagonal_only);
  EXPECT_TRUE(std::isnan(g.D(2, 3)));
  EXPECT_FALSE(std::isnan(g.D(3, 3)));
  EXPECT_DOUBLE_EQ(g.argmax.first, g.argmax.second);
}

TEST(MemoryGrid, ThreadCountDoesNotChangeResults) {
  const SystemSpec spec = SystemSpec::common(2, 0.7);
  MemoryGridOptions o = small_grid(9);
  o.jobs = 1;
  const MemoryGrid a = memory_grid(spec, Dicke{half(2), half(0)}, 2.0, o);
  o.jobs = 3;
  const MemoryGrid b = memory_grid(spec, Dicke{half(2), half(0)}, 2.0, o);
  for (int i = 0; i < 9; ++i)
    for (int j = 0; i + j < 9; ++j) EXPECT_EQ(a.D(i, j), b.D(i, j));
}

TEST(MemoryGrid, SingleAtomTopologiesCoincide) {
  const MemoryGrid a = memory_grid(SystemSpec::common(1, 0.4), Dicke{half(1), half(1)}, 2.0, small_grid(9));
  const MemoryGrid b = memory_grid(SystemSpec::independent(1, 0.4), Dicke{half(1), half(1)}, 2.0, small_grid(9));
  EXPECT_NEAR(a.max_D, b.max_D, 1e-8);
}

TEST(MemoryMeasure, GroundStateHasNoMemory) {
  const MemoryReport r = memory_measure(SystemSpec::common(3, 1.0), ground_state(3), 1.0, small_grid(7));
  EXPECT_LE(r.n_m, 1e-10);
  EXPECT_LE(r.n_m_ind, 1e-10);
  EXPECT_FALSE(r.enhancement.has_value());
}

TEST(MemoryMeasure, EarlyTimeMatchesClosedForms) {
  std::mt19937 rng(41);
  for (int family = 0; family < 6; ++family) {
    const int n = 1 + family % 3;
    const InitialState s = superrad::testing::random_state(rng, n, family);
    const double gt = 0.01;
    const MemoryReport r = memory_measure(SystemSpec::common(n, 0.0), s, gt, small_grid(21));
    const double closed = gt * gt * nm_early_closed(s);
    const double closed_ind = gt * gt * nm_early_independent(s);
    if (closed > 0.0) EXPECT_NEAR(r.n_m / closed, 1.0, 0.01) << "family " << family;
    if (closed_ind > 0.0) EXPECT_NEAR(r.n_m_ind / closed_ind, 1.0, 0.01) << "family " << family;
  }
}

TEST(MemoryMeasure, ManifestationIsHalfThePhotonNumber) {
  const SystemSpec spec = SystemSpec::common(4, 0.0);
  const InitialState s{Dicke{half(4), half(0)}};
  const MemoryGrid g = memory_grid(spec, s, 0.01, small_grid(21));
  const Trajectory tr = evolve_symmetric(spec, s, 0.01);
  EXPECT_NEAR(g.max_dNex / (0.5 * tr.n_photon.back()), 1.0, 0.02);
}

TEST(ClosedForm, MemoryExamples) {
  EXPECT_DOUBLE_EQ(nm_early_closed(Dicke{half(4), half(0)}), 3.0);
  EXPECT_DOUBLE_EQ(nm_early_closed(DephasedDicke{half(4), half(0), 0.5}), 2.0);
  EXPECT_NEAR(nm_early_closed(DickeMixture{{0.5, 0.5}}), 0.25, 1e-15);
  EXPECT_DOUBLE_EQ(nm_early_independent(Dicke{half(4), half(0)}), 1.0);
  for (double lambda : {0.0, 0.3, 1.0}) {
    EXPECT_DOUBLE_EQ(nm_early_independent(DephasedDicke{half(5), half(1), lambda}), 1.5);
  }
  EXPECT_DOUBLE_EQ(nm_early_independent(Dicke{half(1), half(1)}), 0.5);
}

TEST(ClosedForm, MatchesExplicitDissipatorNorms) {
  std::mt19937 rng(42);
  for (int trial = 0; trial < 24; ++trial) {
    const int n = 1 + trial % 4;
    const InitialState s = superrad::testing::random_state(rng, n, trial);
    EXPECT_NEAR(nm_early_closed(s), dissipator_quarter_norm(s, Topology::CommonCavity), 1e-10) << "trial " << trial;
    EXPECT_NEAR(nm_early_independent(s), dissipator_quarter_norm(s, Topology::IndependentCavities), 1e-10)
        << "trial " << trial;
  }
}

TEST(ClosedForm, MemoryIsHalfThePhotonNumberForDickeFamilies) {
  for (int n = 1; n <= 6; ++n) {
    for (int tm = -n; tm <= n; tm += 2) {
      const Dicke d{half(n), half(tm)};
      EXPECT_NEAR(nm_early_closed(d), 0.5 * np_early(d), 1e-14);
      const DephasedDicke dd{half(n), half(tm), 0.37};
      EXPECT_NEAR(nm_early_closed(dd), 0.5 * np_early(dd), 1e-14);
    }
  }
}

TEST(ClosedForm, EnhancementEqualsDegree) {
  for (int n = 1; n <= 6; ++n) {
    for (int tm = -n + 2; tm <= n; tm += 2) {
      const TableRow row = table_evaluator(DephasedDicke{half(n), half(tm), 0.6}, TableRegime::EarlyTime);
      ASSERT_TRUE(row.s && row.enhancement);
      EXPECT_NEAR(*row.enhancement, *row.s, 1e-14);
    }
  }
}

TEST(ClosedForm, PhaseIndependence) {
  for (int n : {2, 3}) {
    const double ree = 0.3, r = 0.35;
    const double ref = nm_early_closed(FactorizedIdentical{n, ree, r});
    for (int k = 1; k < 8; ++k) {
      const double phi = 2.0 * 3.141592653589793 * k / 8.0;
      EXPECT_NEAR(nm_early_closed(FactorizedIdentical{n, ree, std::polar(r, phi)}), ref, 1e-10);
    }
  }
}

TEST(TableEvaluator, Examples) {
  const TableRow markov = table_evaluator(DephasedDicke{half(4), half(0), 1.0}, TableRegime::EarlyStageMarkov);
  EXPECT_DOUBLE_EQ(markov.n_m, 48.0);
  const TableRow fact = table_evaluator(FactorizedIdentical{2, 0.5, 0.5}, TableRegime::EarlyTime);
  EXPECT_DOUBLE_EQ(fact.n_p, 1.5);
  EXPECT_FALSE(table_evaluator(FactorizedIdentical{3, 0.0, 0.0}, TableRegime::EarlyTime).s.has_value());
  EXPECT_THROW(table_evaluator(DickeMixture{{0.5, 0.5}}, TableRegime::EarlyTime), UsageError);
}

TEST(TableEvaluator, RegimeScaling) {
  std::mt19937 rng(43);
  for (int trial = 0; trial < 12; ++trial) {
    const int n = 1 + trial % 4;
    const InitialState s = superrad::testing::random_state(rng, n, trial % 2 == 0 ? 1 : 3);
    const TableRow e = table_evaluator(s, TableRegime::EarlyTime);
    const TableRow m = table_evaluator(s, TableRegime::EarlyStageMarkov);
    if (e.n_p > 0.0) EXPECT_DOUBLE_EQ(m.n_p / e.n_p, 4.0);
    if (e.n_m > 0.0) EXPECT_DOUBLE_EQ(m.n_m / e.n_m, 16.0);
    if (e.n_p_ind > 0.0) EXPECT_DOUBLE_EQ(m.n_p_ind / e.n_p_ind, 4.0);
    if (e.n_m_ind > 0.0) EXPECT_DOUBLE_EQ(m.n_m_ind / e.n_m_ind, 16.0);
  }
}

TEST(Plateau, SingleAtomSteadyValues) {
  const double gamma = 1000.0;
  const SystemSpec spec = SystemSpec::common(1, gamma);
  const MarkovWindows w = default_markov_windows(gamma);
  EXPECT_DOUBLE_EQ(w.plateau_start, 0.05);
  EXPECT_DOUBLE_EQ(w.plateau_end, 0.2);
  EvolveOptions opts;
  opts.sample_dt = 1e-4;
  const Trajectory tr = evolve_common(spec, excited_atom(), w.plateau_end, {}, opts);
  const PlateauReport p = plateau_extract(tr, w.plateau_start, w.plateau_end);
  // N_P -> 4 (g / gamma)^2 for one excited atom.
  EXPECT_NEAR(p.n_p_steady / 4e-6, 1.0, 0.02);
  EXPECT_NEAR(p.r_steady / p.n_p_steady, 1.0, 0.02);
  EXPECT_TRUE(p.plateau);
  EXPECT_FALSE(p.dnex_steady.has_value());
}

TEST(Plateau, GroundStateIsZero) {
  const Trajectory tr = evolve_symmetric(SystemSpec::common(2, 1000.0), InitialState{ground_state(2)}, 0.06);
  const PlateauReport p = plateau_extract(tr, 0.01, 0.06);
  EXPECT_EQ(p.n_p_steady, 0.0);
  EXPECT_EQ(p.r_steady, 0.0);
  EXPECT_TRUE(p.plateau);
}

TEST(Plateau, RejectsBadWindows) {
  const Trajectory lossless = evolve_common(SystemSpec::common(1, 0.0), excited_atom(), 1.0);
  EXPECT_THROW(plateau_extract(lossless, 0.1, 0.5), UsageError);
  const Trajectory lossy = evolve_common(SystemSpec::common(1, 10.0), excited_atom(), 3.0);
  EXPECT_THROW(plateau_extract(lossy, 0.5, 2.0), UsageError);  // starts before 10 tau_E
  EXPECT_THROW(plateau_extract(lossy, 1.0, 4.0), UsageError);
  EXPECT_THROW(plateau_extract(lossy, 2.0, 1.5), UsageError);
  // At gamma/g = 10 the photon number still moves across the window.
  EXPECT_FALSE(plateau_extract(lossy, 1.0, 3.0).plateau);
}
