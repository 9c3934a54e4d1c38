// Memory measure and photon number of |J=2, M=0> at early time and in the
// strongly non-Markovian regime, next to the closed-form early-time values.

#include <cstdio>

#include "superrad/closed_form.hpp"
#include "superrad/memory.hpp"
#include "superrad/superradiance.hpp"

int main() {
  using namespace superrad;
  const Dicke d{HalfInt::from_twice(4), HalfInt::from_twice(0)};

  const double gt = 0.01;
  MemoryGridOptions opts;
  opts.grid_points = 21;
  const MemoryReport early = memory_measure(SystemSpec::common(4, 0.0), d, gt, opts);
  std::printf("early time, gt = %g\n", gt);
  std::printf("  N_M/(gt)^2      numeric %.6f  closed form %.6f\n", early.n_m / (gt * gt), nm_early_closed(d));
  std::printf("  N_M_ind/(gt)^2  numeric %.6f  closed form %.6f\n", early.n_m_ind / (gt * gt),
              nm_early_independent(d));
  std::printf("  S = %.6f\n", degree_early(d).value_or(0.0));

  const SystemSpec strong = SystemSpec::common(4, 0.5);
  opts.grid_points = 11;
  const MemoryReport late = memory_measure(strong, d, 10.0, opts);
  const StrongDegree s = degree_strong(strong, d, 20.0, {}, 0.01);
  std::printf("gamma/g = 0.5, window 10/g\n");
  std::printf("  N_M %.4f at (%.3f, %.3f), N_M_ind %.4f\n", late.n_m, late.argmax.first, late.argmax.second,
              late.n_m_ind);
  std::printf("  R_max %.4f at gt = %.3f, N_P max at gt = %.3f, S = %.4f\n", s.r_max.value, s.r_max.time,
              s.n_p_max.time, s.s.value_or(0.0));
}
