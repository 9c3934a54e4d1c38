#pragma once

// Radiation observables and the degree of superradiance outside the
// early-time limit. Independent-cavity references come from a single
// atom-cavity pair started in |e>: photon number and emission rate are
// additive over pairs and only the excited population feeds each cavity.

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "superrad/closed_form.hpp"
#include "superrad/dynamics.hpp"
#include "superrad/memory.hpp"
#include "superrad/model.hpp"

namespace superrad {

// Common-cavity trajectory on the cheapest exact representation.
inline Trajectory evolve_auto(const SystemSpec& spec, const InitialState& init, double duration,
                              const IntegratorConfig& config = {}, const EvolveOptions& options = {}) {
  if (spec.topology != Topology::CommonCavity) throw UsageError("evolve_auto: topology must be CommonCavity");
  if (atom_count(init) != spec.n_atoms) throw UsageError("evolve_auto: state does not match n_atoms");
  if (auto ladder = ladder_state(init)) return evolve_symmetric(spec, *ladder, duration, config, options);
  return evolve_common(spec, build_initial(spec, init), duration, config, options);
}

// One atom, one cavity, initially |e> (x) |0>.
inline Trajectory single_pair_trajectory(double gamma_over_g, double duration, const IntegratorConfig& config = {},
                                         const EvolveOptions& options = {}) {
  const SystemSpec pair = SystemSpec::common(1, gamma_over_g, 2);
  ComplexMatrix excited = ComplexMatrix::Zero(2, 2);
  excited(0, 0) = 1.0;
  return evolve_symmetric(pair, excited, duration, config, options);
}

// Independent-cavity observables scaled from the single-pair run.
inline Trajectory independent_trajectory(const InitialState& init, double gamma_over_g, double duration,
                                         const IntegratorConfig& config = {}, const EvolveOptions& options = {}) {
  const double excited = np_early_independent(init);
  EvolveOptions plain = options;
  plain.probe_times.clear();
  plain.store_joint = false;
  Trajectory t = single_pair_trajectory(gamma_over_g, duration, config, plain);
  for (auto& v : t.n_ex_atom) v *= excited;
  for (auto& v : t.n_photon) v *= excited;
  for (auto& v : t.emission_rate) v *= excited;
  return t;
}

struct NearMarkovDegree {
  std::optional<double> s;
  PlateauReport common;
  PlateauReport independent;
  bool plateau = true;
};

inline NearMarkovDegree degree_near_markovian(const SystemSpec& spec, const InitialState& init, double t_a,
                                              double t_b, const IntegratorConfig& config = {}) {
  const double g = spec.gamma_over_g();
  if (!(g > 0.0)) throw UsageError("degree_near_markovian: requires gamma > 0");
  NearMarkovDegree out;
  out.common = plateau_extract(evolve_auto(spec, init, t_b, config), t_a, t_b);
  out.independent = plateau_extract(independent_trajectory(init, g, t_b, config), t_a, t_b);
  out.plateau = out.common.plateau && out.independent.plateau;
  if (out.independent.n_p_steady > 0.0) out.s = out.common.n_p_steady / out.independent.n_p_steady;
  return out;
}

struct Peak {
  double value = 0.0;
  double time = 0.0;
  // Discrete maximum sits on the first or last sample.
  bool at_boundary = false;
};

// Global maximum refined by a parabola through the three samples around it.
inline Peak locate_peak(std::span<const double> times, std::span<const double> values) {
  if (times.size() != values.size() || times.empty()) throw UsageError("locate_peak: bad input");
  const auto it = std::max_element(values.begin(), values.end());
  const auto i = static_cast<std::size_t>(it - values.begin());
  Peak p{*it, times[i], i == 0 || i + 1 == values.size()};
  if (p.at_boundary) return p;
  const double y0 = values[i - 1], y1 = values[i], y2 = values[i + 1];
  const double denom = y0 - 2.0 * y1 + y2;
  if (denom >= 0.0) return p;
  const double h = times[i + 1] - times[i];
  const double offset = 0.5 * (y0 - y2) / denom;
  p.time = times[i] + offset * h;
  p.value = y1 - 0.25 * (y0 - y2) * offset;
  return p;
}

struct StrongDegree {
  std::optional<double> s;
  Peak r_max;
  Peak r_max_ind;
  Peak n_p_max;
  bool boundary = false;
  // First local minimum of N_ex followed by growth (photon reabsorption).
  std::optional<double> backflow_time;
};

inline std::optional<double> first_backflow(const Trajectory& traj, double tol = 1e-9) {
  for (std::size_t i = 1; i + 1 < traj.n_ex_atom.size(); ++i) {
    const double prev = traj.n_ex_atom[i - 1], cur = traj.n_ex_atom[i], next = traj.n_ex_atom[i + 1];
    if (cur < prev - tol && next > cur + tol) return traj.times[i];
  }
  return std::nullopt;
}

inline StrongDegree degree_strong(const Trajectory& common, const Trajectory& independent) {
  StrongDegree out;
  out.r_max = locate_peak(common.times, common.emission_rate);
  out.n_p_max = locate_peak(common.times, common.n_photon);
  out.r_max_ind = locate_peak(independent.times, independent.emission_rate);
  out.boundary = out.r_max.at_boundary || out.n_p_max.at_boundary || out.r_max_ind.at_boundary;
  if (out.r_max_ind.value > 0.0) out.s = out.r_max.value / out.r_max_ind.value;
  out.backflow_time = first_backflow(common);
  return out;
}

inline StrongDegree degree_strong(const SystemSpec& spec, const InitialState& init, double horizon,
                                  const IntegratorConfig& config = {}, double sample_dt = 0.0) {
  EvolveOptions opts;
  opts.sample_dt = sample_dt;
  return degree_strong(evolve_auto(spec, init, horizon, config, opts),
                       independent_trajectory(init, spec.gamma_over_g(), horizon, config, opts));
}

}  // namespace superrad
