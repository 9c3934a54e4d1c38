#pragma once

// Time evolution: controlled RK4 on the joint atom-cavity state (full
// computational space or the symmetric ladder), the single atom-cavity pair
// channel and its tensor powers, and the early-time quadratic map.
//
// Times are dimensionless (g t). A nominal step h0 is fixed per run and
// every output interval is cut into equal sub-steps of at most h0, so two
// runs over the same grid take bit-identical steps.

#include <algorithm>
#include <bit>
#include <cmath>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <vector>

#include "superrad/core.hpp"
#include "superrad/model.hpp"

namespace superrad {

enum class Regime { EarlyTime, NearMarkovian, StronglyNonMarkovian };

inline const char* to_string(Regime r) {
  switch (r) {
    case Regime::EarlyTime: return "early-time";
    case Regime::NearMarkovian: return "near-markovian";
    case Regime::StronglyNonMarkovian: return "strongly-non-markovian";
  }
  return "unknown";
}

// Early time when the window stays inside g t <= 0.1; near-Markovian once
// gamma/g >= 100.
inline Regime classify_regime(double gamma_over_g, double window_gt) {
  if (window_gt <= 0.1) return Regime::EarlyTime;
  if (gamma_over_g >= 100.0) return Regime::NearMarkovian;
  return Regime::StronglyNonMarkovian;
}

enum class AtomBasis { Computational, Ladder };

struct IntegratorConfig {
  double rel_tol = 1e-9;
  // 0 selects 0.01 / max(1, gamma/g, |H|/g).
  double max_step = 0.0;
  int max_refinements = 16;

  double nominal_step(double gamma_over_g, double coherent_rate = 1.0) const {
    if (max_step > 0.0) return max_step;
    return 0.01 / std::max({1.0, gamma_over_g, coherent_rate});
  }
  void validate() const {
    if (!(rel_tol > 0.0)) throw UsageError("IntegratorConfig: rel_tol must be positive");
    if (max_step < 0.0) throw UsageError("IntegratorConfig: max_step must be >= 0");
  }
};

// Fixed-step RK4 with step-doubling error control on a linear generator.
class Propagator {
 public:
  using Generator = std::function<ComplexMatrix(const ComplexMatrix&)>;

  Propagator(Generator rhs, double nominal_step, IntegratorConfig config, bool hermitian)
      : rhs_(std::move(rhs)), h0_(nominal_step), config_(config), hermitian_(hermitian) {
    config_.validate();
    if (!(h0_ > 0.0)) throw UsageError("Propagator: step must be positive");
  }

  static Propagator for_equation(const MasterEquation& eq, double gamma_over_g, IntegratorConfig config,
                                 bool hermitian = true) {
    auto shared = std::make_shared<MasterEquation>(eq);
    Generator rhs = hermitian ? Generator([shared](const ComplexMatrix& r) { return shared->apply_hermitian(r); })
                              : Generator([shared](const ComplexMatrix& r) { return shared->apply(r); });
    return Propagator(std::move(rhs), config.nominal_step(gamma_over_g, eq.coherent_rate()), config, hermitian);
  }

  double nominal_step() const { return h0_; }

  // Advances `y` from t0 by `duration`.
  void advance(ComplexMatrix& y, double t0, double duration) const {
    if (duration < 0.0) throw UsageError("Propagator: negative duration");
    if (duration == 0.0) return;
    const auto n = static_cast<long>(std::ceil(duration / h0_ - 1e-9));
    const long substeps = std::max(1L, n);
    const double h = duration / static_cast<double>(substeps);
    for (long s = 0; s < substeps; ++s) controlled_step(y, t0 + static_cast<double>(s) * h, h, 0);
  }

 private:
  ComplexMatrix rk4(const ComplexMatrix& y, double h, const ComplexMatrix& k1) const {
    const ComplexMatrix k2 = rhs_(y + (0.5 * h) * k1);
    const ComplexMatrix k3 = rhs_(y + (0.5 * h) * k2);
    const ComplexMatrix k4 = rhs_(y + h * k3);
    return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }

  void controlled_step(ComplexMatrix& y, double t, double h, int depth) const {
    const ComplexMatrix k1 = rhs_(y);
    const ComplexMatrix full = rk4(y, h, k1);
    const ComplexMatrix mid = rk4(y, 0.5 * h, k1);
    ComplexMatrix fine = rk4(mid, 0.5 * h, rhs_(mid));
    const double err = max_abs(fine - full) / 15.0;
    const double scale = std::max({max_abs(fine), max_abs(y), 1e-300});
    if (!fine.allFinite()) throw IntegrationError("non-finite state", t, h, err);
    if (err <= config_.rel_tol * scale) {
      // Local Richardson extrapolation: fifth-order accurate step.
      fine += (fine - full) / 15.0;
      if (hermitian_) fine = 0.5 * (fine + fine.adjoint()).eval();
      y = std::move(fine);
      return;
    }
    if (depth >= config_.max_refinements) {
      throw IntegrationError("step controller could not meet rel_tol", t, h, err / scale);
    }
    controlled_step(y, t, 0.5 * h, depth + 1);
    controlled_step(y, t + 0.5 * h, 0.5 * h, depth + 1);
  }

  Generator rhs_;
  double h0_;
  IntegratorConfig config_;
  bool hermitian_;
};

// Uniform sample grid 0, dt, ..., duration (last point exactly `duration`).
inline std::vector<double> uniform_grid(double duration, double dt) {
  if (duration < 0.0) throw UsageError("uniform_grid: negative duration");
  if (duration == 0.0) return {0.0};
  const auto n = std::max(1L, static_cast<long>(std::ceil(duration / dt - 1e-9)));
  std::vector<double> out(static_cast<std::size_t>(n) + 1);
  for (long k = 0; k <= n; ++k) out[static_cast<std::size_t>(k)] = duration * static_cast<double>(k) / static_cast<double>(n);
  return out;
}

// First derivative on a uniform grid: five-point centred stencil in the
// interior, fourth-order one-sided stencils at the two ends.
inline std::vector<double> five_point_derivative(std::span<const double> times, std::span<const double> values) {
  const std::size_t n = values.size();
  std::vector<double> d(n, 0.0);
  if (n < 2) return d;
  const double h = (times.back() - times.front()) / static_cast<double>(n - 1);
  if (n < 5) {
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t a = i == 0 ? 0 : i - 1;
      const std::size_t b = i + 1 < n ? i + 1 : n - 1;
      d[i] = (values[b] - values[a]) / (static_cast<double>(b - a) * h);
    }
    return d;
  }
  auto v = [&](std::size_t i) { return values[i]; };
  for (std::size_t i = 2; i + 2 < n; ++i) {
    d[i] = (v(i - 2) - 8.0 * v(i - 1) + 8.0 * v(i + 1) - v(i + 2)) / (12.0 * h);
  }
  auto forward = [&](std::size_t i) {
    return (-25.0 * v(i) + 48.0 * v(i + 1) - 36.0 * v(i + 2) + 16.0 * v(i + 3) - 3.0 * v(i + 4)) / (12.0 * h);
  };
  auto backward = [&](std::size_t i) {
    return (25.0 * v(i) - 48.0 * v(i - 1) + 36.0 * v(i - 2) - 16.0 * v(i - 3) + 3.0 * v(i - 4)) / (12.0 * h);
  };
  d[0] = forward(0);
  d[1] = (-3.0 * v(0) - 10.0 * v(1) + 18.0 * v(2) - 6.0 * v(3) + v(4)) / (12.0 * h);
  d[n - 1] = backward(n - 1);
  d[n - 2] = (3.0 * v(n - 1) + 10.0 * v(n - 2) - 18.0 * v(n - 3) + 6.0 * v(n - 4) - v(n - 5)) / (12.0 * h);
  return d;
}

struct Trajectory {
  std::vector<double> times;
  std::vector<double> n_ex_atom;
  std::vector<double> n_photon;
  // R = -d N_ex_atom / dt, positive while the atoms emit (units of g).
  std::vector<double> emission_rate;
  std::vector<double> probe_times;
  std::vector<DensityMatrix> atom_states;
  std::vector<ComplexMatrix> joint_states;
  AtomBasis basis = AtomBasis::Computational;
  Regime regime = Regime::EarlyTime;
  double gamma_over_g = 0.0;
};

struct EvolveOptions {
  // Observable spacing; 0 samples once per nominal step.
  double sample_dt = 0.0;
  // Reduced atom states are stored at these times (within [0, duration]).
  std::vector<double> probe_times;
  bool store_joint = false;
};

namespace detail {

inline double diagonal_expectation(const ComplexMatrix& rho, const RealVector& diag) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < diag.size(); ++i) s += diag(i) * rho(i, i).real();
  return s;
}

// Integrates rho_atoms (x) |0><0| and records observables.
inline Trajectory run_joint(const MasterEquation& eq, const ComplexMatrix& rho_atoms, const RealVector& atom_excitations,
                            int n_fock, double gamma_over_g, double duration, const IntegratorConfig& config,
                            const EvolveOptions& options, AtomBasis basis) {
  if (duration < 0.0) throw UsageError("evolve: negative duration");
  const Propagator prop = Propagator::for_equation(eq, gamma_over_g, config, true);
  const double dt = options.sample_dt > 0.0 ? options.sample_dt : prop.nominal_step();
  const std::vector<double> samples = uniform_grid(duration, dt);

  std::vector<double> probes = options.probe_times;
  for (double p : probes) {
    if (p < 0.0 || p > duration * (1.0 + 1e-12)) throw UsageError("evolve: probe time outside the run");
  }
  std::sort(probes.begin(), probes.end());

  // Merge sample and probe times into one ordered breakpoint list.
  std::vector<double> breaks(samples);
  breaks.insert(breaks.end(), probes.begin(), probes.end());
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end(), [](double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(a)); }),
               breaks.end());

  const Eigen::Index nf = n_fock;
  RealVector joint_excitation(atom_excitations.size() * nf);
  RealVector joint_photons(atom_excitations.size() * nf);
  for (Eigen::Index i = 0; i < atom_excitations.size(); ++i) {
    for (Eigen::Index k = 0; k < nf; ++k) {
      joint_excitation(i * nf + k) = atom_excitations(i);
      joint_photons(i * nf + k) = static_cast<double>(k);
    }
  }

  Trajectory traj;
  traj.basis = basis;
  traj.gamma_over_g = gamma_over_g;
  traj.regime = classify_regime(gamma_over_g, duration);

  ComplexMatrix rho = tensor_product(rho_atoms, vacuum(n_fock));
  const Layout atom_part{static_cast<std::size_t>(rho_atoms.rows())};
  double t = 0.0;
  std::size_t next_sample = 0, next_probe = 0;
  auto matches = [](double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(a)); };
  for (double tb : breaks) {
    prop.advance(rho, t, tb - t);
    t = tb;
    if (next_sample < samples.size() && matches(samples[next_sample], tb)) {
      traj.times.push_back(samples[next_sample]);
      traj.n_ex_atom.push_back(diagonal_expectation(rho, joint_excitation));
      traj.n_photon.push_back(diagonal_expectation(rho, joint_photons));
      ++next_sample;
    }
    while (next_probe < probes.size() && matches(probes[next_probe], tb)) {
      ComplexMatrix reduced = trace_out_last(rho, static_cast<std::size_t>(n_fock));
      reduced = 0.5 * (reduced + reduced.adjoint()).eval();
      traj.probe_times.push_back(probes[next_probe]);
      traj.atom_states.emplace_back(std::move(reduced), Layout{});
      if (options.store_joint) traj.joint_states.push_back(rho);
      ++next_probe;
    }
  }
  const std::vector<double> d = five_point_derivative(traj.times, traj.n_ex_atom);
  traj.emission_rate.resize(d.size());
  std::transform(d.begin(), d.end(), traj.emission_rate.begin(), [](double x) { return -x; });
  return traj;
}

}  // namespace detail

// Common cavity on the full computational space from rho_atoms (x) |0><0|.
inline Trajectory evolve_common(const SystemSpec& spec, const DensityMatrix& rho_atoms, double duration,
                                const IntegratorConfig& config = {}, const EvolveOptions& options = {}) {
  if (spec.topology != Topology::CommonCavity) throw UsageError("evolve_common: topology must be CommonCavity");
  if (rho_atoms.dim() != atom_dim(spec.n_atoms)) throw UsageError("evolve_common: state dimension mismatch");
  const MasterEquation eq = common_cavity_equation(spec);
  Trajectory traj = detail::run_joint(eq, rho_atoms.matrix(), excitation_diagonal(spec.n_atoms), spec.fock_levels(),
                                      spec.gamma_over_g(), duration, config, options, AtomBasis::Computational);
  for (auto& s : traj.atom_states) s = DensityMatrix(s.matrix(), atom_layout(spec.n_atoms));
  return traj;
}

// Common cavity inside the J = N/2 ladder; `rho_ladder` is (N+1)x(N+1) in
// the basis |J, J - k>.
inline Trajectory evolve_symmetric(const SystemSpec& spec, const ComplexMatrix& rho_ladder, double duration,
                                   const IntegratorConfig& config = {}, const EvolveOptions& options = {}) {
  if (spec.topology != Topology::CommonCavity) throw UsageError("evolve_symmetric: topology must be CommonCavity");
  if (rho_ladder.rows() != spec.n_atoms + 1 || rho_ladder.cols() != spec.n_atoms + 1) {
    throw UsageError("evolve_symmetric: ladder state dimension mismatch");
  }
  const MasterEquation eq = symmetric_sector_equation(spec);
  return detail::run_joint(eq, rho_ladder, ladder_excitation_diagonal(spec.n_atoms), spec.fock_levels(),
                           spec.gamma_over_g(), duration, config, options, AtomBasis::Ladder);
}

inline Trajectory evolve_symmetric(const SystemSpec& spec, const InitialState& init, double duration,
                                   const IntegratorConfig& config = {}, const EvolveOptions& options = {}) {
  if (atom_count(init) != spec.n_atoms) throw UsageError("evolve_symmetric: state does not match n_atoms");
  const auto ladder = ladder_state(init);
  if (!ladder) throw UsageError("evolve_symmetric: initial state is not in the J = N/2 sector");
  return evolve_symmetric(spec, *ladder, duration, config, options);
}

// ---------------------------------------------------------------------------
// Single atom-cavity pair channel and its tensor powers.

// Superoperator on vec(rho) with row-major pairing (a, b) -> 2a + b.
using PairChannel = Eigen::Matrix<Complex, 4, 4>;

inline std::vector<PairChannel> single_pair_channels(double gamma_over_g, std::span<const double> times,
                                                     const IntegratorConfig& config = {}) {
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (times[i] < 0.0 || (i > 0 && times[i] < times[i - 1])) throw UsageError("single_pair_channels: times must be ascending and >= 0");
  }
  const SystemSpec pair = SystemSpec::common(1, gamma_over_g, 2);
  const MasterEquation eq = common_cavity_equation(pair);
  const Propagator prop = Propagator::for_equation(eq, gamma_over_g, config, false);
  std::vector<PairChannel> out(times.size(), PairChannel::Zero());
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      ComplexMatrix basis = ComplexMatrix::Zero(2, 2);
      basis(a, b) = 1.0;
      ComplexMatrix rho = tensor_product(basis, vacuum(2));
      double t = 0.0;
      for (std::size_t k = 0; k < times.size(); ++k) {
        prop.advance(rho, t, times[k] - t);
        t = times[k];
        const ComplexMatrix reduced = trace_out_last(rho, 2);
        for (int r = 0; r < 2; ++r) {
          for (int c = 0; c < 2; ++c) out[k](2 * r + c, 2 * a + b) = reduced(r, c);
        }
      }
    }
  }
  return out;
}

inline PairChannel single_pair_channel(double gamma_over_g, double duration, const IntegratorConfig& config = {}) {
  if (duration < 0.0) throw UsageError("single_pair_channel: negative duration");
  const double t[] = {duration};
  return single_pair_channels(gamma_over_g, t, config).front();
}

inline ComplexMatrix apply_pair_channel(const PairChannel& channel, const ComplexMatrix& rho) {
  if (rho.rows() != 2 || rho.cols() != 2) throw UsageError("apply_pair_channel: expects a 2x2 matrix");
  Eigen::Matrix<Complex, 4, 1> v;
  v << rho(0, 0), rho(0, 1), rho(1, 0), rho(1, 1);
  const Eigen::Matrix<Complex, 4, 1> w = channel * v;
  ComplexMatrix out(2, 2);
  out << w(0), w(1), w(2), w(3);
  return out;
}

// Phi^{(x)N} applied site by site.
inline ComplexMatrix apply_channel_power(const PairChannel& channel, const ComplexMatrix& rho_atoms) {
  const auto d = static_cast<std::size_t>(rho_atoms.rows());
  if (rho_atoms.cols() != rho_atoms.rows() || d < 2 || !std::has_single_bit(d)) {
    throw UsageError("apply_channel_power: state dimension must be 2^N");
  }
  const int n = std::countr_zero(d);
  ComplexMatrix out = rho_atoms;
  for (int site = 0; site < n; ++site) {
    const std::size_t m = site_mask(n, site);
    for (std::size_t c = 0; c < d; ++c) {
      if (c & m) continue;
      for (std::size_t r = 0; r < d; ++r) {
        if (r & m) continue;
        const auto R0 = static_cast<Eigen::Index>(r), R1 = static_cast<Eigen::Index>(r | m);
        const auto C0 = static_cast<Eigen::Index>(c), C1 = static_cast<Eigen::Index>(c | m);
        const Complex x0 = out(R0, C0), x1 = out(R0, C1), x2 = out(R1, C0), x3 = out(R1, C1);
        out(R0, C0) = channel(0, 0) * x0 + channel(0, 1) * x1 + channel(0, 2) * x2 + channel(0, 3) * x3;
        out(R0, C1) = channel(1, 0) * x0 + channel(1, 1) * x1 + channel(1, 2) * x2 + channel(1, 3) * x3;
        out(R1, C0) = channel(2, 0) * x0 + channel(2, 1) * x1 + channel(2, 2) * x2 + channel(2, 3) * x3;
        out(R1, C1) = channel(3, 0) * x0 + channel(3, 1) * x1 + channel(3, 2) * x2 + channel(3, 3) * x3;
      }
    }
  }
  return out;
}

inline DensityMatrix apply_channel_power(const PairChannel& channel, const DensityMatrix& rho_atoms) {
  ComplexMatrix out = apply_channel_power(channel, rho_atoms.matrix());
  out = 0.5 * (out + out.adjoint()).eval();
  return DensityMatrix(std::move(out), rho_atoms.layout());
}

// ---------------------------------------------------------------------------
// Early-time quadratic map rho + (g t)^2 sum_K L_K[rho].

inline ComplexMatrix quad_map(const ComplexMatrix& rho, double gt, std::span<const SparseOperator> lowering_ops) {
  ComplexMatrix gen = ComplexMatrix::Zero(rho.rows(), rho.cols());
  for (const auto& k : lowering_ops) gen += lindblad_dissipator(k, rho);
  return rho + (gt * gt) * gen;
}

inline std::vector<SparseOperator> lowering_operators(int n_atoms, Topology topology) {
  std::vector<SparseOperator> ops;
  if (topology == Topology::CommonCavity) {
    ops.push_back(collective_lowering_sparse(n_atoms));
  } else {
    for (int n = 0; n < n_atoms; ++n) ops.push_back(atomic_lowering_sparse(n_atoms, n));
  }
  return ops;
}

inline DensityMatrix quad_map(const DensityMatrix& rho_atoms, double gt, Topology topology) {
  const auto d = rho_atoms.dim();
  if (d < 2 || !std::has_single_bit(d)) throw UsageError("quad_map: state dimension must be 2^N");
  const int n = std::countr_zero(d);
  const auto ops = lowering_operators(n, topology);
  ComplexMatrix out = quad_map(rho_atoms.matrix(), gt, ops);
  out = 0.5 * (out + out.adjoint()).eval();
  return DensityMatrix(std::move(out), rho_atoms.layout());
}

// ---------------------------------------------------------------------------
// Memoryless reduced dynamics T(t, 0) from a fresh vacuum environment,
// abstracted over the representation used to compute it.

class AtomDynamics {
 public:
  virtual ~AtomDynamics() = default;
  virtual AtomBasis basis() const = 0;
  // Diagonal of sum_n s_n^+ s_n^- in this engine's atom basis.
  virtual const RealVector& excitations() const = 0;
  // T(t_k, 0)[rho] for ascending t_k >= 0.
  virtual std::vector<ComplexMatrix> propagate(const ComplexMatrix& rho_atoms, std::span<const double> times) const = 0;
};

// Joint atom-cavity integration followed by a trace over the cavity.
class JointCavityDynamics final : public AtomDynamics {
 public:
  JointCavityDynamics(MasterEquation eq, RealVector excitations, int n_fock, double gamma_over_g,
                      IntegratorConfig config, AtomBasis basis)
      : propagator_(Propagator::for_equation(eq, gamma_over_g, config, true)),
        excitations_(std::move(excitations)),
        n_fock_(n_fock),
        basis_(basis) {}

  static std::unique_ptr<JointCavityDynamics> full(const SystemSpec& spec, IntegratorConfig config = {}) {
    return std::make_unique<JointCavityDynamics>(common_cavity_equation(spec), excitation_diagonal(spec.n_atoms),
                                                 spec.fock_levels(), spec.gamma_over_g(), config,
                                                 AtomBasis::Computational);
  }
  static std::unique_ptr<JointCavityDynamics> symmetric(const SystemSpec& spec, IntegratorConfig config = {}) {
    return std::make_unique<JointCavityDynamics>(symmetric_sector_equation(spec), ladder_excitation_diagonal(spec.n_atoms),
                                                 spec.fock_levels(), spec.gamma_over_g(), config, AtomBasis::Ladder);
  }

  AtomBasis basis() const override { return basis_; }
  const RealVector& excitations() const override { return excitations_; }

  std::vector<ComplexMatrix> propagate(const ComplexMatrix& rho_atoms, std::span<const double> times) const override {
    if (rho_atoms.rows() != excitations_.size()) throw UsageError("JointCavityDynamics: state dimension mismatch");
    std::vector<ComplexMatrix> out;
    out.reserve(times.size());
    ComplexMatrix rho = tensor_product(rho_atoms, vacuum(n_fock_));
    double t = 0.0;
    for (double tk : times) {
      if (tk < t) throw UsageError("JointCavityDynamics: times must be ascending");
      propagator_.advance(rho, t, tk - t);
      t = tk;
      ComplexMatrix reduced = trace_out_last(rho, static_cast<std::size_t>(n_fock_));
      out.push_back(0.5 * (reduced + reduced.adjoint()));
    }
    return out;
  }

 private:
  Propagator propagator_;
  RealVector excitations_;
  int n_fock_;
  AtomBasis basis_;
};

// Independent cavities: Phi_t^{(x)N} with Phi_t the single-pair channel.
class ChannelPowerDynamics final : public AtomDynamics {
 public:
  ChannelPowerDynamics(int n_atoms, double gamma_over_g, IntegratorConfig config = {})
      : n_atoms_(n_atoms), gamma_over_g_(gamma_over_g), config_(config), excitations_(excitation_diagonal(n_atoms)) {}

  AtomBasis basis() const override { return AtomBasis::Computational; }
  const RealVector& excitations() const override { return excitations_; }

  // Channels are memoized by time so grid restarts reuse run-A results.
  std::vector<PairChannel> channels(std::span<const double> times) const {
    std::vector<double> missing;
    {
      std::lock_guard lock(cache_mutex_);
      for (double t : times) {
        if (!cache_.contains(t)) missing.push_back(t);
      }
    }
    std::sort(missing.begin(), missing.end());
    missing.erase(std::unique(missing.begin(), missing.end()), missing.end());
    if (!missing.empty()) {
      const auto fresh = single_pair_channels(gamma_over_g_, missing, config_);
      std::lock_guard lock(cache_mutex_);
      for (std::size_t k = 0; k < missing.size(); ++k) cache_.emplace(missing[k], fresh[k]);
    }
    std::vector<PairChannel> out;
    out.reserve(times.size());
    std::lock_guard lock(cache_mutex_);
    for (double t : times) out.push_back(cache_.at(t));
    return out;
  }

  std::vector<ComplexMatrix> propagate(const ComplexMatrix& rho_atoms, std::span<const double> times) const override {
    if (rho_atoms.rows() != excitations_.size()) throw UsageError("ChannelPowerDynamics: state dimension mismatch");
    const auto chans = channels(times);
    std::vector<ComplexMatrix> out;
    out.reserve(times.size());
    for (const auto& c : chans) out.push_back(apply_channel_power(c, rho_atoms));
    return out;
  }

  int n_atoms() const { return n_atoms_; }

 private:
  int n_atoms_;
  double gamma_over_g_;
  IntegratorConfig config_;
  RealVector excitations_;
  mutable std::map<double, PairChannel> cache_;
  mutable std::mutex cache_mutex_;
};

}  // namespace superrad
