#pragma once

// Memory-effect measure conditioned on the initial atomic state.
//
// For t0 = 0 < t1 < t2 the uninterrupted reduced state rho(t2) is compared
// with rho'(t2), obtained by tracing out the cavity at t1, re-attaching a
// fresh vacuum and evolving for the remaining tau21. The measure is the
// largest trace distance over the triangle tau10 + tau21 <= window.

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <utility>
#include <vector>

#include "superrad/closed_form.hpp"
#include "superrad/core.hpp"
#include "superrad/dynamics.hpp"
#include "superrad/model.hpp"
#include "superrad/parallel.hpp"

namespace superrad {

// Engine plus initial state expressed in that engine's basis.
struct PreparedDynamics {
  std::shared_ptr<const AtomDynamics> engine;
  ComplexMatrix rho0;
};

// Common cavity: the ladder engine whenever the state lives in J = N/2,
// otherwise the full computational space. Independent cavities: the
// single-pair channel power.
inline PreparedDynamics prepare_dynamics(const SystemSpec& spec, const InitialState& init,
                                         const IntegratorConfig& config = {}) {
  spec.validate();
  validate(init);
  if (atom_count(init) != spec.n_atoms) throw UsageError("prepare_dynamics: state does not match n_atoms");
  if (spec.topology == Topology::IndependentCavities) {
    const DensityMatrix rho = build_initial(spec, init);
    return {std::make_shared<ChannelPowerDynamics>(spec.n_atoms, spec.gamma_over_g(), config), rho.matrix()};
  }
  if (auto ladder = ladder_state(init)) {
    return {JointCavityDynamics::symmetric(spec, config), std::move(*ladder)};
  }
  require_capacity(atom_dim(spec.n_atoms) * static_cast<std::size_t>(spec.fock_levels()), "common cavity full space");
  const DensityMatrix rho = build_initial(spec, init);
  return {JointCavityDynamics::full(spec, config), rho.matrix()};
}

inline double excitation_number(const ComplexMatrix& rho, const RealVector& excitations) {
  double acc = 0.0;
  for (Eigen::Index i = 0; i < excitations.size(); ++i) acc += excitations(i) * rho(i, i).real();
  return acc;
}

struct Triplet {
  ComplexMatrix rho_t2;
  ComplexMatrix rho_t2_prime;
  double distance = 0.0;
  // N_ex(rho') - N_ex(rho): the reset discards photons that would be
  // reabsorbed, so this is >= 0 at early times.
  double delta_n_ex = 0.0;
};

inline Triplet evolution_triplet(const AtomDynamics& engine, const ComplexMatrix& rho0, double tau10, double tau21) {
  if (tau10 < 0.0 || tau21 < 0.0) throw UsageError("evolution_triplet: negative time");
  const double times[] = {tau10, tau10 + tau21};
  auto a = engine.propagate(rho0, times);
  const double restart[] = {tau21};
  auto c = engine.propagate(a[0], restart);
  Triplet out;
  out.rho_t2 = std::move(a[1]);
  out.rho_t2_prime = std::move(c[0]);
  out.distance = trace_distance(out.rho_t2, out.rho_t2_prime);
  out.delta_n_ex = excitation_number(out.rho_t2_prime, engine.excitations()) -
                   excitation_number(out.rho_t2, engine.excitations());
  return out;
}

// Computational-basis convenience form returning validated states.
inline std::pair<DensityMatrix, DensityMatrix> evolution_triplet(const SystemSpec& spec, const DensityMatrix& rho0,
                                                                 double tau10, double tau21,
                                                                 const IntegratorConfig& config = {}) {
  spec.validate();
  if (rho0.dim() != atom_dim(spec.n_atoms)) throw UsageError("evolution_triplet: state dimension mismatch");
  std::unique_ptr<AtomDynamics> engine;
  if (spec.topology == Topology::CommonCavity) {
    engine = JointCavityDynamics::full(spec, config);
  } else {
    engine = std::make_unique<ChannelPowerDynamics>(spec.n_atoms, spec.gamma_over_g(), config);
  }
  Triplet t = evolution_triplet(*engine, rho0.matrix(), tau10, tau21);
  return {DensityMatrix(std::move(t.rho_t2), atom_layout(spec.n_atoms)),
          DensityMatrix(std::move(t.rho_t2_prime), atom_layout(spec.n_atoms))};
}

struct MemoryGridOptions {
  int grid_points = 41;
  // Restrict the maximum search to tau10 = tau21; empty selects it
  // automatically when gamma/g >= 100.
  std::optional<bool> diagonal_only;
  bool refine = true;
  double refine_rel_tol = 1e-4;
  unsigned jobs = default_jobs();
};

struct MemoryGrid {
  // Shared axis for tau10 (rows) and tau21 (columns), units 1/g.
  std::vector<double> taus;
  // NaN outside the evaluated domain.
  Eigen::MatrixXd D;
  Eigen::MatrixXd dNex;
  double max_D = 0.0;
  std::pair<double, double> argmax{0.0, 0.0};
  double grid_max_D = 0.0;
  double max_dNex = 0.0;
  bool diagonal_only = false;
  double window = 0.0;
};

namespace detail {

// Golden-section maximization of f on [a, b]; returns (x, f(x)).
template <class Fn>
std::pair<double, double> golden_max(Fn&& f, double a, double b, double x_tol) {
  constexpr double r = 0.6180339887498949;
  double c = b - r * (b - a), d = a + r * (b - a);
  double fc = f(c), fd = f(d);
  for (int it = 0; it < 60 && (b - a) > x_tol; ++it) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - r * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + r * (b - a);
      fd = f(d);
    }
  }
  return fc >= fd ? std::pair{c, fc} : std::pair{d, fd};
}

}  // namespace detail

inline MemoryGrid memory_grid(const AtomDynamics& engine, const ComplexMatrix& rho0, double window,
                              const MemoryGridOptions& options, bool diagonal_only) {
  const int k = options.grid_points;
  if (k < 2) throw UsageError("memory_grid: grid_points must be >= 2");
  if (!(window > 0.0)) throw UsageError("memory_grid: window must be positive");
  if (rho0.rows() != engine.excitations().size()) throw UsageError("memory_grid: state dimension mismatch");

  MemoryGrid grid;
  grid.window = window;
  grid.diagonal_only = diagonal_only;
  grid.taus.resize(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) grid.taus[static_cast<std::size_t>(i)] = window * i / (k - 1);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  grid.D = Eigen::MatrixXd::Constant(k, k, nan);
  grid.dNex = Eigen::MatrixXd::Constant(k, k, nan);

  const std::vector<ComplexMatrix> run_a = engine.propagate(rho0, grid.taus);
  const RealVector& exc = engine.excitations();
  for (int j = 0; j < k; ++j) {
    grid.D(0, j) = 0.0;
    grid.dNex(0, j) = 0.0;
  }

  // Row i restarts from rho_A(t_i) with a fresh vacuum.
  const int rows = diagonal_only ? (k - 1) / 2 : k - 1;
  parallel_for(static_cast<std::size_t>(rows), options.jobs, [&](std::size_t r) {
    const int i = static_cast<int>(r) + 1;
    const int span = diagonal_only ? i : k - 1 - i;
    std::vector<double> times(grid.taus.begin(), grid.taus.begin() + span + 1);
    const std::vector<ComplexMatrix> run_c = engine.propagate(run_a[static_cast<std::size_t>(i)], times);
    for (int j = 0; j <= span; ++j) {
      const ComplexMatrix& uninterrupted = run_a[static_cast<std::size_t>(i + j)];
      const ComplexMatrix& reset = run_c[static_cast<std::size_t>(j)];
      grid.D(i, j) = std::clamp(trace_distance(uninterrupted, reset), 0.0, 1.0);
      grid.dNex(i, j) = excitation_number(reset, exc) - excitation_number(uninterrupted, exc);
    }
  });

  grid.max_dNex = 0.0;
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) {
      const double d = grid.D(i, j);
      if (std::isnan(d)) continue;
      grid.max_dNex = std::max(grid.max_dNex, grid.dNex(i, j));
      if (diagonal_only && i != j) continue;
      if (d > grid.max_D) {
        grid.max_D = d;
        grid.argmax = {grid.taus[static_cast<std::size_t>(i)], grid.taus[static_cast<std::size_t>(j)]};
      }
    }
  }
  grid.grid_max_D = grid.max_D;
  if (!options.refine || grid.max_D <= 0.0) return grid;

  const double delta = window / (k - 1);
  auto objective = [&](double t10, double t21) { return evolution_triplet(engine, rho0, t10, t21).distance; };
  const double x_tol = 1e-3 * delta;
  if (diagonal_only) {
    const double centre = grid.argmax.first;
    const auto [x, fx] = detail::golden_max([&](double t) { return objective(t, t); }, std::max(0.0, centre - delta),
                                            std::min(0.5 * window, centre + delta), x_tol);
    if (fx > grid.max_D) {
      grid.max_D = fx;
      grid.argmax = {x, x};
    }
    return grid;
  }
  for (int round = 0; round < 8; ++round) {
    const double before = grid.max_D;
    {
      const double t21 = grid.argmax.second;
      const double c = grid.argmax.first;
      const auto [x, fx] = detail::golden_max([&](double t) { return objective(t, t21); }, std::max(0.0, c - delta),
                                              std::min(window - t21, c + delta), x_tol);
      if (fx > grid.max_D) {
        grid.max_D = fx;
        grid.argmax.first = x;
      }
    }
    {
      const double t10 = grid.argmax.first;
      const double c = grid.argmax.second;
      const auto [x, fx] = detail::golden_max([&](double t) { return objective(t10, t); }, std::max(0.0, c - delta),
                                              std::min(window - t10, c + delta), x_tol);
      if (fx > grid.max_D) {
        grid.max_D = fx;
        grid.argmax.second = x;
      }
    }
    if (grid.max_D - before < options.refine_rel_tol * grid.max_D) break;
  }
  grid.max_D = std::min(grid.max_D, 1.0);
  return grid;
}

inline MemoryGrid memory_grid(const SystemSpec& spec, const InitialState& init, double window,
                              const MemoryGridOptions& options = {}, const IntegratorConfig& config = {}) {
  const PreparedDynamics prepared = prepare_dynamics(spec, init, config);
  const bool diagonal = options.diagonal_only.value_or(spec.gamma_over_g() >= 100.0);
  return memory_grid(*prepared.engine, prepared.rho0, window, options, diagonal);
}

struct MemoryReport {
  double n_m = 0.0;
  double n_m_ind = 0.0;
  // N_M / N_M_ind; empty when N_M_ind vanishes.
  std::optional<double> enhancement;
  double manifestation_max = 0.0;
  std::pair<double, double> argmax{0.0, 0.0};
  Regime regime = Regime::EarlyTime;
  double window = 0.0;
};

struct MemoryGridPair {
  MemoryGrid common;
  std::optional<MemoryGrid> independent;
};

inline MemoryGridPair memory_grids(const SystemSpec& spec, const InitialState& init, double window,
                                   const MemoryGridOptions& options = {}, const IntegratorConfig& config = {},
                                   bool with_independent = true) {
  SystemSpec common = spec;
  common.topology = Topology::CommonCavity;
  common.n_fock = spec.topology == Topology::CommonCavity ? spec.n_fock : 0;
  MemoryGridPair out{memory_grid(common, init, window, options, config), std::nullopt};
  if (with_independent) {
    const SystemSpec ind = SystemSpec::independent(spec.n_atoms, spec.gamma_over_g());
    out.independent = memory_grid(ind, init, window, options, config);
  }
  return out;
}

inline MemoryReport report_from_grids(const MemoryGridPair& grids, double gamma_over_g) {
  MemoryReport r;
  r.n_m = grids.common.max_D;
  r.argmax = grids.common.argmax;
  r.manifestation_max = grids.common.max_dNex;
  r.window = grids.common.window;
  r.regime = classify_regime(gamma_over_g, r.window);
  if (grids.independent) {
    r.n_m_ind = grids.independent->max_D;
    if (r.n_m_ind > 0.0) r.enhancement = r.n_m / r.n_m_ind;
  }
  return r;
}

inline MemoryReport memory_measure(const SystemSpec& spec, const InitialState& init, double window,
                                   const MemoryGridOptions& options = {}, const IntegratorConfig& config = {}) {
  return report_from_grids(memory_grids(spec, init, window, options, config, true), spec.gamma_over_g());
}

// Default windows: the early-stage plateau [50, 200] tau_E and the memory
// search window 200 tau_E, in units of 1/g.
struct MarkovWindows {
  double plateau_start;
  double plateau_end;
  double memory_window;
};

inline MarkovWindows default_markov_windows(double gamma_over_g) {
  if (!(gamma_over_g > 0.0)) throw UsageError("default_markov_windows: gamma must be positive");
  const double tau_e = 1.0 / gamma_over_g;
  return {50.0 * tau_e, 200.0 * tau_e, 200.0 * tau_e};
}

struct PlateauReport {
  double n_p_steady = 0.0;
  // Atomic emission rate in units of gamma.
  double r_steady = 0.0;
  std::optional<double> dnex_steady;
  // Relative change between the first and last tenth of the window.
  double drift = 0.0;
  bool plateau = true;
};

inline PlateauReport plateau_extract(const Trajectory& traj, double t_a, double t_b,
                                     const MemoryGrid* grid = nullptr) {
  if (traj.times.empty()) throw UsageError("plateau_extract: empty trajectory");
  if (!(traj.gamma_over_g > 0.0)) throw UsageError("plateau_extract: requires gamma > 0");
  if (!(t_a < t_b) || t_a < traj.times.front() || t_b > traj.times.back() * (1.0 + 1e-12)) {
    throw UsageError("plateau_extract: window outside trajectory");
  }
  const double tau_e = 1.0 / traj.gamma_over_g;
  if (t_a < 10.0 * tau_e * (1.0 - 1e-12)) throw UsageError("plateau_extract: window must start at >= 10 tau_E");

  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    if (traj.times[i] >= t_a * (1.0 - 1e-12) && traj.times[i] <= t_b * (1.0 + 1e-12)) idx.push_back(i);
  }
  if (idx.size() < 2) throw UsageError("plateau_extract: window holds fewer than two samples");

  PlateauReport out;
  double np = 0.0, rate = 0.0;
  for (std::size_t i : idx) {
    np += traj.n_photon[i];
    rate += traj.emission_rate[i];
  }
  out.n_p_steady = np / static_cast<double>(idx.size());
  out.r_steady = rate / static_cast<double>(idx.size()) / traj.gamma_over_g;

  const std::size_t tenth = std::max<std::size_t>(1, idx.size() / 10);
  double head = 0.0, tail = 0.0;
  for (std::size_t k = 0; k < tenth; ++k) {
    head += traj.n_photon[idx[k]];
    tail += traj.n_photon[idx[idx.size() - 1 - k]];
  }
  head /= static_cast<double>(tenth);
  tail /= static_cast<double>(tenth);
  out.drift = out.n_p_steady > 0.0 ? std::abs(tail - head) / out.n_p_steady : 0.0;
  out.plateau = out.drift <= 0.01;
  if (grid) out.dnex_steady = grid->max_dNex;
  return out;
}

}  // namespace superrad
