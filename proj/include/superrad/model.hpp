#pragma once

// Operators, master-equation generators and initial-state families for N
// resonant two-level atoms coupled to vacuum cavity modes.
//
// All generators are written in the interaction picture with unit coupling,
// so time is measured as the dimensionless product g*t and the cavity loss
// enters only through gamma/g.

#include <Eigen/SparseCore>

#include <bit>
#include <cmath>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "superrad/core.hpp"

namespace superrad {

using SparseOperator = Eigen::SparseMatrix<Complex>;

enum class Topology { CommonCavity, IndependentCavities };

inline const char* to_string(Topology t) {
  return t == Topology::CommonCavity ? "common" : "independent";
}

struct SystemSpec {
  int n_atoms = 1;
  double g = 1.0;
  double gamma = 0.0;
  // Fock levels kept per cavity; 0 selects the exact default (N+1 for a
  // common cavity, 2 per pair for independent cavities).
  int n_fock = 0;
  Topology topology = Topology::CommonCavity;

  static SystemSpec common(int n_atoms, double gamma_over_g, int n_fock = 0) {
    SystemSpec s{n_atoms, 1.0, gamma_over_g, n_fock, Topology::CommonCavity};
    s.validate();
    return s;
  }
  static SystemSpec independent(int n_atoms, double gamma_over_g, int n_fock = 0) {
    SystemSpec s{n_atoms, 1.0, gamma_over_g, n_fock, Topology::IndependentCavities};
    s.validate();
    return s;
  }

  double gamma_over_g() const { return gamma / g; }

  int fock_levels() const {
    if (n_fock > 0) return n_fock;
    return topology == Topology::CommonCavity ? n_atoms + 1 : 2;
  }

  void validate() const {
    if (n_atoms < 1) throw UsageError("SystemSpec: n_atoms must be >= 1");
    if (!(g > 0.0)) throw UsageError("SystemSpec: g must be positive");
    if (!(gamma >= 0.0) || !std::isfinite(gamma)) throw UsageError("SystemSpec: gamma must be >= 0");
    const int nf = fock_levels();
    if (nf < 2) throw UsageError("SystemSpec: n_fock must be >= 2");
    if (topology == Topology::CommonCavity && nf < n_atoms + 1) {
      throw UsageError("SystemSpec: common cavity needs n_fock >= n_atoms + 1");
    }
  }
};

// Half-integer quantum number stored as twice its value.
class HalfInt {
 public:
  constexpr HalfInt() = default;
  static constexpr HalfInt from_twice(int twice) {
    HalfInt h;
    h.twice_ = twice;
    return h;
  }
  static HalfInt from_double(double v) {
    const double t = 2.0 * v;
    if (std::abs(t - std::round(t)) > 1e-9) throw UsageError("value is not a half-integer: " + std::to_string(v));
    return from_twice(static_cast<int>(std::lround(t)));
  }
  constexpr int twice() const { return twice_; }
  constexpr double value() const { return 0.5 * twice_; }
  constexpr auto operator<=>(const HalfInt&) const = default;

 private:
  int twice_ = 0;
};

struct Dicke {
  HalfInt j;
  HalfInt m;
};
struct DephasedDicke {
  HalfInt j;
  HalfInt m;
  double lambda = 1.0;
};
// p[i] is the weight of |J, -J + i>, J = (p.size() - 1) / 2.
struct DickeMixture {
  std::vector<double> p;
};
struct FactorizedIdentical {
  int n_atoms = 1;
  double rho_ee = 0.0;
  Complex rho_eg = 0.0;
};
struct RawState {
  DensityMatrix rho;
};

using InitialState = std::variant<Dicke, DephasedDicke, DickeMixture, FactorizedIdentical, RawState>;

inline int atom_count(const InitialState& init) {
  return std::visit(
      [](const auto& s) -> int {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Dicke> || std::is_same_v<T, DephasedDicke>) {
          return s.j.twice();
        } else if constexpr (std::is_same_v<T, DickeMixture>) {
          return static_cast<int>(s.p.size()) - 1;
        } else if constexpr (std::is_same_v<T, FactorizedIdentical>) {
          return s.n_atoms;
        } else {
          const auto d = s.rho.dim();
          if (d == 0 || !std::has_single_bit(d)) throw UsageError("RawState: dimension is not a power of two");
          return std::countr_zero(d);
        }
      },
      init);
}

inline void check_dicke_numbers(HalfInt j, HalfInt m) {
  if (j.twice() < 1) throw UsageError("Dicke: J must be >= 1/2");
  if (m.twice() < -j.twice() || m.twice() > j.twice()) throw UsageError("Dicke: |M| > J");
  if ((j.twice() - m.twice()) % 2 != 0) throw UsageError("Dicke: J - M must be an integer");
}

inline void validate(const InitialState& init) {
  std::visit(
      [](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Dicke>) {
          check_dicke_numbers(s.j, s.m);
        } else if constexpr (std::is_same_v<T, DephasedDicke>) {
          check_dicke_numbers(s.j, s.m);
          if (!(s.lambda >= 0.0 && s.lambda <= 1.0)) throw UsageError("DephasedDicke: lambda outside [0, 1]");
        } else if constexpr (std::is_same_v<T, DickeMixture>) {
          if (s.p.size() < 2) throw UsageError("DickeMixture: need at least two weights");
          double total = 0.0;
          for (double w : s.p) {
            if (!(w >= 0.0)) throw UsageError("DickeMixture: negative weight");
            total += w;
          }
          if (std::abs(total - 1.0) > 1e-12) throw UsageError("DickeMixture: weights do not sum to one");
        } else if constexpr (std::is_same_v<T, FactorizedIdentical>) {
          if (s.n_atoms < 1) throw UsageError("FactorizedIdentical: n_atoms must be >= 1");
          if (!(s.rho_ee >= 0.0 && s.rho_ee <= 1.0)) throw UsageError("FactorizedIdentical: rho_ee outside [0, 1]");
          if (std::norm(s.rho_eg) > s.rho_ee * (1.0 - s.rho_ee) + 1e-14) {
            throw UsageError("FactorizedIdentical: |rho_eg|^2 > rho_ee (1 - rho_ee)");
          }
        } else {
          (void)atom_count(InitialState{s});
        }
      },
      init);
}

// Ground state of N atoms as a Dicke state.
inline Dicke ground_state(int n_atoms) {
  return Dicke{HalfInt::from_twice(n_atoms), HalfInt::from_twice(-n_atoms)};
}

// ---------------------------------------------------------------------------
// Computational-basis bookkeeping.

inline Layout atom_layout(int n_atoms) { return Layout(static_cast<std::size_t>(n_atoms), 2); }

inline std::size_t atom_dim(int n_atoms) {
  if (n_atoms < 1 || n_atoms > 30) throw UsageError("atom count out of range");
  return std::size_t{1} << n_atoms;
}

// Bit of atom `site` (0-based, site 0 slowest) inside a basis index.
inline std::size_t site_mask(int n_atoms, int site) { return std::size_t{1} << (n_atoms - 1 - site); }

// Number of excited atoms in basis state `index` (bit 0 = excited).
inline int excitation_count(std::size_t index, int n_atoms) {
  return n_atoms - std::popcount(static_cast<std::uint64_t>(index));
}

inline RealVector excitation_diagonal(int n_atoms) {
  const std::size_t d = atom_dim(n_atoms);
  RealVector out(static_cast<Eigen::Index>(d));
  for (std::size_t i = 0; i < d; ++i) out(static_cast<Eigen::Index>(i)) = excitation_count(i, n_atoms);
  return out;
}

inline SparseOperator sparse_identity(std::size_t d) {
  SparseOperator id(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  id.setIdentity();
  return id;
}

inline SparseOperator sparse_kron(const SparseOperator& a, const SparseOperator& b) {
  std::vector<Eigen::Triplet<Complex>> trips;
  trips.reserve(static_cast<std::size_t>(a.nonZeros() * b.nonZeros()));
  for (int ka = 0; ka < a.outerSize(); ++ka) {
    for (SparseOperator::InnerIterator ia(a, ka); ia; ++ia) {
      for (int kb = 0; kb < b.outerSize(); ++kb) {
        for (SparseOperator::InnerIterator ib(b, kb); ib; ++ib) {
          trips.emplace_back(ia.row() * b.rows() + ib.row(), ia.col() * b.cols() + ib.col(), ia.value() * ib.value());
        }
      }
    }
  }
  SparseOperator out(a.rows() * b.rows(), a.cols() * b.cols());
  out.setFromTriplets(trips.begin(), trips.end());
  return out;
}

inline SparseOperator atomic_lowering_sparse(int n_atoms, int site) {
  if (site < 0 || site >= n_atoms) throw UsageError("atomic_lowering: site out of range");
  const std::size_t d = atom_dim(n_atoms);
  const std::size_t mask = site_mask(n_atoms, site);
  std::vector<Eigen::Triplet<Complex>> trips;
  for (std::size_t i = 0; i < d; ++i) {
    if ((i & mask) == 0) trips.emplace_back(static_cast<int>(i | mask), static_cast<int>(i), 1.0);
  }
  SparseOperator out(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  out.setFromTriplets(trips.begin(), trips.end());
  return out;
}

inline SparseOperator collective_lowering_sparse(int n_atoms) {
  SparseOperator sum = atomic_lowering_sparse(n_atoms, 0);
  for (int n = 1; n < n_atoms; ++n) sum += atomic_lowering_sparse(n_atoms, n);
  return sum;
}

inline SparseOperator cavity_annihilator_sparse(int n_fock) {
  if (n_fock < 1) throw UsageError("cavity_annihilator: n_fock must be >= 1");
  SparseOperator b(n_fock, n_fock);
  std::vector<Eigen::Triplet<Complex>> trips;
  for (int k = 1; k < n_fock; ++k) trips.emplace_back(k - 1, k, std::sqrt(static_cast<double>(k)));
  b.setFromTriplets(trips.begin(), trips.end());
  return b;
}

inline ComplexMatrix atomic_lowering(int n_atoms, int site) {
  require_capacity(atom_dim(n_atoms), "atomic_lowering");
  return ComplexMatrix(atomic_lowering_sparse(n_atoms, site));
}
inline ComplexMatrix collective_lowering(int n_atoms) {
  require_capacity(atom_dim(n_atoms), "collective_lowering");
  return ComplexMatrix(collective_lowering_sparse(n_atoms));
}
inline ComplexMatrix cavity_annihilator(int n_fock) { return ComplexMatrix(cavity_annihilator_sparse(n_fock)); }

// ---------------------------------------------------------------------------
// Symmetric (J = N/2) ladder: index k = J - M, so k = 0 is fully excited.

inline double ladder_factor(HalfInt j, HalfInt m) {
  // f(M) = (J + M)(J - M + 1)
  const double jv = j.value(), mv = m.value();
  return (jv + mv) * (jv - mv + 1.0);
}

inline SparseOperator ladder_lowering_sparse(int n_atoms) {
  std::vector<Eigen::Triplet<Complex>> trips;
  for (int k = 0; k < n_atoms; ++k) {
    trips.emplace_back(k + 1, k, std::sqrt(static_cast<double>((n_atoms - k) * (k + 1))));
  }
  SparseOperator out(n_atoms + 1, n_atoms + 1);
  out.setFromTriplets(trips.begin(), trips.end());
  return out;
}

inline RealVector ladder_excitation_diagonal(int n_atoms) {
  RealVector out(n_atoms + 1);
  for (int k = 0; k <= n_atoms; ++k) out(k) = n_atoms - k;
  return out;
}

// |J, M> following the raising-from-the-top construction: repeated
// collective lowering of |e...e>, normalized by sqrt((J+M)! / (N! (J-M)!)).
inline ComplexVector dicke_state(int n_atoms, HalfInt m) {
  const HalfInt j = HalfInt::from_twice(n_atoms);
  check_dicke_numbers(j, m);
  const std::size_t d = atom_dim(n_atoms);
  const int lowerings = (j.twice() - m.twice()) / 2;
  const int excited = n_atoms - lowerings;
  ComplexVector psi = ComplexVector::Zero(static_cast<Eigen::Index>(d));
  psi(0) = 1.0;
  const SparseOperator lower = collective_lowering_sparse(n_atoms);
  for (int i = 0; i < lowerings; ++i) psi = (lower * psi).eval();
  const double log_norm = 0.5 * (std::lgamma(excited + 1.0) - std::lgamma(n_atoms + 1.0) - std::lgamma(lowerings + 1.0));
  return psi * std::exp(log_norm);
}

// Columns are |J, J - k>, k = 0..N: the isometry from the ladder into the
// computational basis.
inline ComplexMatrix symmetric_isometry(int n_atoms) {
  const std::size_t d = atom_dim(n_atoms);
  require_capacity(d, "symmetric_isometry");
  ComplexMatrix v = ComplexMatrix::Zero(static_cast<Eigen::Index>(d), n_atoms + 1);
  for (int k = 0; k <= n_atoms; ++k) {
    v.col(k) = dicke_state(n_atoms, HalfInt::from_twice(n_atoms - 2 * k));
  }
  return v;
}

inline ComplexMatrix single_atom_matrix(double rho_ee, Complex rho_eg) {
  ComplexMatrix r(2, 2);
  r << rho_ee, rho_eg, std::conj(rho_eg), 1.0 - rho_ee;
  return r;
}

// Atom-only density matrix (dimension 2^N, layout [2]*N).
inline DensityMatrix build_initial(const SystemSpec& spec, const InitialState& init) {
  spec.validate();
  validate(init);
  const int n = spec.n_atoms;
  if (atom_count(init) != n) throw UsageError("build_initial: state does not match n_atoms");
  const std::size_t d = atom_dim(n);
  require_capacity(d, "build_initial");

  ComplexMatrix rho = std::visit(
      [&](const auto& s) -> ComplexMatrix {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Dicke>) {
          return projector(dicke_state(n, s.m));
        } else if constexpr (std::is_same_v<T, DephasedDicke>) {
          const ComplexMatrix p = projector(dicke_state(n, s.m));
          ComplexMatrix dephased = p.diagonal().asDiagonal();
          return s.lambda * p + (1.0 - s.lambda) * dephased;
        } else if constexpr (std::is_same_v<T, DickeMixture>) {
          ComplexMatrix acc = ComplexMatrix::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
          for (std::size_t i = 0; i < s.p.size(); ++i) {
            if (s.p[i] == 0.0) continue;
            acc += s.p[i] * projector(dicke_state(n, HalfInt::from_twice(2 * static_cast<int>(i) - n)));
          }
          return acc;
        } else if constexpr (std::is_same_v<T, FactorizedIdentical>) {
          const ComplexMatrix one = single_atom_matrix(s.rho_ee, s.rho_eg);
          ComplexMatrix acc = one;
          for (int k = 1; k < n; ++k) acc = tensor_product(acc, one);
          return acc;
        } else {
          return s.rho.matrix();
        }
      },
      init);
  rho = 0.5 * (rho + rho.adjoint()).eval();
  return DensityMatrix(std::move(rho), atom_layout(n));
}

// Ladder-basis matrix when the state lives in the J = N/2 sector; built
// without touching the 2^N space for the Dicke-family constructors.
inline std::optional<ComplexMatrix> ladder_state(const InitialState& init) {
  validate(init);
  const int n = atom_count(init);
  return std::visit(
      [&](const auto& s) -> std::optional<ComplexMatrix> {
        using T = std::decay_t<decltype(s)>;
        ComplexMatrix out = ComplexMatrix::Zero(n + 1, n + 1);
        if constexpr (std::is_same_v<T, Dicke>) {
          const int k = (s.j.twice() - s.m.twice()) / 2;
          out(k, k) = 1.0;
          return out;
        } else if constexpr (std::is_same_v<T, DephasedDicke>) {
          // Dephasing leaves the J sector unless the state is |J, +-J>.
          const int k = (s.j.twice() - s.m.twice()) / 2;
          if (s.lambda == 1.0 || k == 0 || k == n) {
            out(k, k) = 1.0;
            return out;
          }
          return std::nullopt;
        } else if constexpr (std::is_same_v<T, DickeMixture>) {
          for (int i = 0; i <= n; ++i) out(n - i, n - i) = s.p[static_cast<std::size_t>(i)];
          return out;
        } else if constexpr (std::is_same_v<T, FactorizedIdentical>) {
          const double purity_gap = s.rho_ee * (1.0 - s.rho_ee) - std::norm(s.rho_eg);
          if (std::abs(purity_gap) > 1e-14) return std::nullopt;
          // |phi> = a|e> + b|g> with |a|^2 = rho_ee and a b* = rho_eg.
          Complex a = std::sqrt(s.rho_ee);
          Complex b = s.rho_ee > 0.0 ? std::conj(s.rho_eg) / a : Complex(1.0);
          ComplexVector v(n + 1);
          for (int k = 0; k <= n; ++k) {
            const double log_binom = std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
            Complex amp = std::exp(0.5 * log_binom);
            for (int i = 0; i < n - k; ++i) amp *= a;
            for (int i = 0; i < k; ++i) amp *= b;
            v(k) = amp;
          }
          return projector(v);
        } else {
          const std::size_t d = atom_dim(n);
          if (d > 1024) return std::nullopt;
          const ComplexMatrix iso = symmetric_isometry(n);
          ComplexMatrix proj = iso.adjoint() * s.rho.matrix() * iso;
          if (max_abs(iso * proj * iso.adjoint() - s.rho.matrix()) > 1e-10) return std::nullopt;
          return proj;
        }
      },
      init);
}

inline std::optional<ComplexMatrix> ladder_state(const DensityMatrix& rho_atoms) {
  return ladder_state(InitialState{RawState{rho_atoms}});
}

// ---------------------------------------------------------------------------
// Master-equation generators.

// drho/dt = -i[H, rho] + sum_k L_k rho L_k^dag - 1/2 {L_k^dag L_k, rho},
// stored as K = -iH - 1/2 sum L^dag L so that the coherent plus
// anticommutator part is K rho + rho K^dag.
class MasterEquation {
 public:
  MasterEquation(const SparseOperator& hamiltonian, std::vector<SparseOperator> jumps, Layout layout)
      : jumps_(std::move(jumps)), layout_(std::move(layout)) {
    const Eigen::Index d = hamiltonian.rows();
    if (static_cast<std::size_t>(d) != layout_dim(layout_)) throw UsageError("MasterEquation: layout mismatch");
    SparseOperator k = Complex(0.0, -1.0) * hamiltonian;
    for (const auto& l : jumps_) {
      SparseOperator ldl = SparseOperator(l.adjoint()) * l;
      k -= 0.5 * ldl;
      jumps_adj_.emplace_back(l.adjoint());
    }
    k.makeCompressed();
    effective_ = k;
    effective_adj_ = SparseOperator(k.adjoint());
    coherent_rate_ = spectral_norm_estimate(hamiltonian);
  }

  // Largest |eigenvalue| of H, the fastest coherent frequency (units of g).
  double coherent_rate() const { return coherent_rate_; }

  std::size_t dim() const { return layout_dim(layout_); }
  const Layout& layout() const { return layout_; }

  // General (possibly non-Hermitian) argument.
  ComplexMatrix apply(const ComplexMatrix& rho) const {
    ComplexMatrix out = effective_ * rho;
    out.noalias() += rho * effective_adj_;
    add_jumps(rho, out);
    return out;
  }

  // Hermitian argument: the coherent part is A + A^dag with A = K rho.
  ComplexMatrix apply_hermitian(const ComplexMatrix& rho) const {
    ComplexMatrix a = effective_ * rho;
    ComplexMatrix out = a + a.adjoint();
    add_jumps(rho, out);
    return out;
  }

 private:
  void add_jumps(const ComplexMatrix& rho, ComplexMatrix& out) const {
    for (std::size_t k = 0; k < jumps_.size(); ++k) {
      ComplexMatrix tmp = rho * jumps_adj_[k];
      out.noalias() += jumps_[k] * tmp;
    }
  }

  // Power iteration on H^2 from a fixed start vector; deterministic.
  static double spectral_norm_estimate(const SparseOperator& h) {
    const Eigen::Index d = h.rows();
    if (d == 0 || h.nonZeros() == 0) return 0.0;
    ComplexVector v(d);
    for (Eigen::Index i = 0; i < d; ++i) v(i) = Complex(1.0 + 0.5 * std::sin(1.0 + static_cast<double>(i)), 0.0);
    v.normalize();
    double lambda2 = 0.0;
    for (int it = 0; it < 200; ++it) {
      const ComplexVector w = h * (h * v);
      const double next = w.norm();
      if (next == 0.0) return 0.0;
      v = w / next;
      if (std::abs(next - lambda2) <= 1e-10 * next) {
        lambda2 = next;
        break;
      }
      lambda2 = next;
    }
    return std::sqrt(lambda2);
  }

  SparseOperator effective_;
  SparseOperator effective_adj_;
  std::vector<SparseOperator> jumps_;
  std::vector<SparseOperator> jumps_adj_;
  Layout layout_;
  double coherent_rate_ = 0.0;
};

// Tavis-Cummings coupling H = sum_n (s_n^+ b + s_n^- b^dag) from a lowering
// operator on the atomic factor and b on the cavity factor.
inline SparseOperator exchange_hamiltonian(const SparseOperator& atom_lowering, const SparseOperator& b) {
  const SparseOperator raise = SparseOperator(atom_lowering.adjoint());
  const SparseOperator bdag = SparseOperator(b.adjoint());
  SparseOperator h = sparse_kron(raise, b);
  h += sparse_kron(atom_lowering, bdag);
  return h;
}

// Common cavity on the full computational space, layout [2]*N + [n_fock].
inline MasterEquation common_cavity_equation(const SystemSpec& spec) {
  spec.validate();
  const int n = spec.n_atoms;
  const int nf = spec.fock_levels();
  const std::size_t d = atom_dim(n);
  require_capacity(d * static_cast<std::size_t>(nf), "common_cavity_equation");
  const SparseOperator b = cavity_annihilator_sparse(nf);
  const SparseOperator h = exchange_hamiltonian(collective_lowering_sparse(n), b);
  std::vector<SparseOperator> jumps;
  if (spec.gamma_over_g() > 0.0) {
    jumps.push_back(std::sqrt(spec.gamma_over_g()) * sparse_kron(sparse_identity(d), b));
  }
  Layout layout = atom_layout(n);
  layout.push_back(static_cast<std::size_t>(nf));
  return MasterEquation(h, std::move(jumps), std::move(layout));
}

// Independent cavities on the full space, layout [2]*N + [n_fock]*N. Used
// as a brute-force reference; production dynamics go through the
// single-pair channel.
inline MasterEquation independent_cavities_equation(const SystemSpec& spec) {
  spec.validate();
  const int n = spec.n_atoms;
  const int nf = spec.fock_levels();
  const std::size_t da = atom_dim(n);
  std::size_t dc = 1;
  for (int k = 0; k < n; ++k) dc *= static_cast<std::size_t>(nf);
  require_capacity(da * dc, "independent_cavities_equation");
  const SparseOperator b = cavity_annihilator_sparse(nf);
  SparseOperator h(static_cast<Eigen::Index>(da * dc), static_cast<Eigen::Index>(da * dc));
  std::vector<SparseOperator> jumps;
  for (int site = 0; site < n; ++site) {
    // b on cavity `site` inside the cavity register.
    SparseOperator bn = sparse_identity(1);
    for (int k = 0; k < n; ++k) bn = sparse_kron(bn, k == site ? b : sparse_identity(static_cast<std::size_t>(nf)));
    h += exchange_hamiltonian(atomic_lowering_sparse(n, site), bn);
    if (spec.gamma_over_g() > 0.0) {
      jumps.push_back(std::sqrt(spec.gamma_over_g()) * sparse_kron(sparse_identity(da), bn));
    }
  }
  Layout layout = atom_layout(n);
  for (int k = 0; k < n; ++k) layout.push_back(static_cast<std::size_t>(nf));
  return MasterEquation(h, std::move(jumps), std::move(layout));
}

// Common cavity restricted to the J = N/2 ladder, layout [N+1, n_fock].
inline MasterEquation symmetric_sector_equation(const SystemSpec& spec) {
  spec.validate();
  if (spec.topology != Topology::CommonCavity) throw UsageError("symmetric sector requires a common cavity");
  const int n = spec.n_atoms;
  const int nf = spec.fock_levels();
  const SparseOperator b = cavity_annihilator_sparse(nf);
  const SparseOperator h = exchange_hamiltonian(ladder_lowering_sparse(n), b);
  std::vector<SparseOperator> jumps;
  if (spec.gamma_over_g() > 0.0) {
    jumps.push_back(std::sqrt(spec.gamma_over_g()) * sparse_kron(sparse_identity(static_cast<std::size_t>(n + 1)), b));
  }
  return MasterEquation(h, std::move(jumps), Layout{static_cast<std::size_t>(n + 1), static_cast<std::size_t>(nf)});
}

inline MasterEquation full_space_equation(const SystemSpec& spec) {
  return spec.topology == Topology::CommonCavity ? common_cavity_equation(spec) : independent_cavities_equation(spec);
}

// Time derivative of the joint atom-cavity state for the given topology.
inline ComplexMatrix lindblad_rhs(const SystemSpec& spec, const DensityMatrix& rho_se) {
  const MasterEquation eq = full_space_equation(spec);
  if (rho_se.dim() != eq.dim()) throw UsageError("lindblad_rhs: state dimension does not match the system");
  return eq.apply_hermitian(rho_se.matrix());
}

// Vacuum projector of one cavity with n_fock levels.
inline ComplexMatrix vacuum(int n_fock) {
  ComplexMatrix v = ComplexMatrix::Zero(n_fock, n_fock);
  v(0, 0) = 1.0;
  return v;
}

// Free-space Dicke emission rate W = Gamma (J + M)(J - M + 1).
inline double markov_emission_rate(HalfInt j, HalfInt m, double big_gamma) {
  check_dicke_numbers(j, m);
  return big_gamma * ladder_factor(j, m);
}

// Lindblad dissipator L_K[rho] = K rho K^dag - 1/2 {K^dag K, rho}.
inline ComplexMatrix lindblad_dissipator(const SparseOperator& k, const ComplexMatrix& rho) {
  const SparseOperator kdag = SparseOperator(k.adjoint());
  const SparseOperator kdk = kdag * k;
  ComplexMatrix tmp = rho * kdag;
  ComplexMatrix out = k * tmp;
  out.noalias() -= 0.5 * (kdk * rho);
  out.noalias() -= 0.5 * (rho * kdk);
  return out;
}

}  // namespace superrad
