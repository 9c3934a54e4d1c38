#pragma once

// Validity of the early-time quadratic map against the exact reduced
// dynamics, through normalized Choi-Jamiolkowski matrices and through the
// atomic excitation number.

#include <cmath>
#include <functional>
#include <vector>

#include "superrad/core.hpp"
#include "superrad/dynamics.hpp"
#include "superrad/memory.hpp"
#include "superrad/model.hpp"
#include "superrad/parallel.hpp"

namespace superrad {

enum class ChoiSource { Quadratic, Exact, Other };

struct ChoiMatrix {
  std::size_t dim = 0;  // d^2
  ComplexMatrix matrix;
  ChoiSource source = ChoiSource::Other;
  double min_eigenvalue = 0.0;
};

using LinearMap = std::function<ComplexMatrix(const ComplexMatrix&)>;

// (1/d) sum_ij Phi(|i><j|) (x) |i><j|. Phi is only ever called on Hermitian
// arguments: |i><j| = (X + iY)/2 with X, Y Hermitian, and
// Phi(|j><i|) = Phi(|i><j|)^dag for Hermiticity-preserving maps.
inline ChoiMatrix choi_of_map(const LinearMap& map, int n_atoms, ChoiSource source = ChoiSource::Other,
                              unsigned jobs = 1) {
  const std::size_t d = atom_dim(n_atoms);
  require_capacity(d * d, "choi_of_map");
  const auto di = static_cast<Eigen::Index>(d);
  std::vector<std::pair<Eigen::Index, Eigen::Index>> pairs;
  for (Eigen::Index i = 0; i < di; ++i) {
    for (Eigen::Index j = i; j < di; ++j) pairs.emplace_back(i, j);
  }
  std::vector<ComplexMatrix> images(pairs.size());
  parallel_for(pairs.size(), jobs, [&](std::size_t p) {
    const auto [i, j] = pairs[p];
    if (i == j) {
      ComplexMatrix e = ComplexMatrix::Zero(di, di);
      e(i, i) = 1.0;
      images[p] = map(e);
      return;
    }
    ComplexMatrix x = ComplexMatrix::Zero(di, di), y = ComplexMatrix::Zero(di, di);
    x(i, j) = 1.0;
    x(j, i) = 1.0;
    y(i, j) = -kI;
    y(j, i) = kI;
    images[p] = 0.5 * (map(x) + kI * map(y));
  });

  ChoiMatrix out;
  out.dim = d * d;
  out.source = source;
  out.matrix = ComplexMatrix::Zero(di * di, di * di);
  const double norm = 1.0 / static_cast<double>(d);
  // Index of (system a, ancilla b) is a * d + b.
  auto place = [&](const ComplexMatrix& image, Eigen::Index i, Eigen::Index j) {
    for (Eigen::Index a = 0; a < di; ++a) {
      for (Eigen::Index b = 0; b < di; ++b) out.matrix(a * di + i, b * di + j) = norm * image(a, b);
    }
  };
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    const auto [i, j] = pairs[p];
    place(images[p], i, j);
    if (i != j) place(images[p].adjoint(), j, i);
  }
  out.matrix = 0.5 * (out.matrix + out.matrix.adjoint()).eval();
  out.min_eigenvalue = hermitian_eigenvalues(out.matrix).front();
  return out;
}

// Exact reduced map T(t, 0) on the computational space.
inline LinearMap exact_map(const SystemSpec& spec, double gt, const IntegratorConfig& config = {}) {
  std::shared_ptr<AtomDynamics> engine;
  if (spec.topology == Topology::CommonCavity) {
    engine = JointCavityDynamics::full(spec, config);
  } else {
    engine = std::make_shared<ChannelPowerDynamics>(spec.n_atoms, spec.gamma_over_g(), config);
  }
  return [engine, gt](const ComplexMatrix& rho) {
    const double t[] = {gt};
    return engine->propagate(rho, t).front();
  };
}

inline LinearMap quadratic_map(const SystemSpec& spec, double gt) {
  auto ops = std::make_shared<std::vector<SparseOperator>>(lowering_operators(spec.n_atoms, spec.topology));
  return [ops, gt](const ComplexMatrix& rho) { return quad_map(rho, gt, *ops); };
}

inline ChoiMatrix choi_exact(const SystemSpec& spec, double gt, const IntegratorConfig& config = {},
                             unsigned jobs = 1) {
  return choi_of_map(exact_map(spec, gt, config), spec.n_atoms, ChoiSource::Exact, jobs);
}

inline ChoiMatrix choi_quadratic(const SystemSpec& spec, double gt) {
  return choi_of_map(quadratic_map(spec, gt), spec.n_atoms, ChoiSource::Quadratic);
}

// Trace distance between the quadratic-map and exact-map Choi matrices.
inline double choi_error(const SystemSpec& spec, double gt, const IntegratorConfig& config = {},
                         unsigned jobs = 1) {
  if (gt < 0.0) throw UsageError("choi_error: negative time");
  require_capacity(atom_dim(spec.n_atoms) * atom_dim(spec.n_atoms), "choi_error");
  return trace_distance(choi_quadratic(spec, gt).matrix, choi_exact(spec, gt, config, jobs).matrix);
}

struct ErrorCurve {
  std::vector<double> times;
  std::vector<double> errors;
  // Least-squares slope of log(error) against log(gt).
  double log_slope = 0.0;
};

inline double log_log_slope(std::span<const double> x, std::span<const double> y) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) continue;
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++n;
  }
  if (n < 2) return 0.0;
  const double nn = static_cast<double>(n);
  return (nn * sxy - sx * sy) / (nn * sxx - sx * sx);
}

inline ErrorCurve choi_error_curve(const SystemSpec& spec, std::span<const double> times,
                                   const IntegratorConfig& config = {}, unsigned jobs = 1) {
  ErrorCurve c;
  c.times.assign(times.begin(), times.end());
  for (double t : times) c.errors.push_back(choi_error(spec, t, config, jobs));
  c.log_slope = log_log_slope(c.times, c.errors);
  return c;
}

// |<N_ex>_quad - <N_ex>_exact| at time gt.
inline double excitation_error(const SystemSpec& spec, const InitialState& init, double gt,
                               const IntegratorConfig& config = {}) {
  if (gt < 0.0) throw UsageError("excitation_error: negative time");
  const PreparedDynamics prepared = prepare_dynamics(spec, init, config);
  const double t[] = {gt};
  const ComplexMatrix exact = prepared.engine->propagate(prepared.rho0, t).front();
  std::vector<SparseOperator> ops;
  if (prepared.engine->basis() == AtomBasis::Ladder) {
    ops.push_back(ladder_lowering_sparse(spec.n_atoms));
  } else {
    ops = lowering_operators(spec.n_atoms, spec.topology);
  }
  const ComplexMatrix quad = quad_map(prepared.rho0, gt, ops);
  const RealVector& exc = prepared.engine->excitations();
  return std::abs(excitation_number(quad, exc) - excitation_number(exact, exc));
}

inline ErrorCurve excitation_error_curve(const SystemSpec& spec, const InitialState& init,
                                         std::span<const double> times, const IntegratorConfig& config = {}) {
  ErrorCurve c;
  c.times.assign(times.begin(), times.end());
  for (double t : times) c.errors.push_back(excitation_error(spec, init, t, config));
  c.log_slope = log_log_slope(c.times, c.errors);
  return c;
}

}  // namespace superrad
