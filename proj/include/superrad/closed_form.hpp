#pragma once

// Early-time closed forms for photon number, memory measure and the degree
// of superradiance, normalized by (g t)^2, plus the table evaluator that
// maps them onto the early-stage Markovian scaling (units (g tau_E)^2).
//
// Families with a closed form use it directly; everything else falls back to
// explicit operators on the 2^N computational space.

#include <cmath>
#include <optional>
#include <variant>

#include "superrad/core.hpp"
#include "superrad/dynamics.hpp"
#include "superrad/model.hpp"

namespace superrad {

namespace detail {

inline double f_ladder(double j, double m) { return (j + m) * (j - m + 1.0); }

// M value of mixture index i.
inline double mixture_m(const DickeMixture& s, std::size_t i) {
  return static_cast<double>(i) - 0.5 * static_cast<double>(s.p.size() - 1);
}

inline double explicit_dissipator_norm(const InitialState& init, Topology topology) {
  const int n = atom_count(init);
  if (topology == Topology::CommonCavity) {
    // The ladder isometry preserves the trace norm.
    if (auto ladder = ladder_state(init)) return trace_norm(lindblad_dissipator(ladder_lowering_sparse(n), *ladder));
  }
  const DensityMatrix rho = build_initial(SystemSpec::common(n, 0.0), init);
  const auto ops = lowering_operators(n, topology);
  ComplexMatrix gen = ComplexMatrix::Zero(rho.matrix().rows(), rho.matrix().cols());
  for (const auto& k : ops) gen += lindblad_dissipator(k, rho.matrix());
  return trace_norm(gen);
}

inline double explicit_expectation(const InitialState& init, const SparseOperator& op) {
  const int n = atom_count(init);
  const DensityMatrix rho = build_initial(SystemSpec::common(n, 0.0), init);
  return (op * rho.matrix()).trace().real();
}

}  // namespace detail

// N_P / (g t)^2 = Tr[s^+ s^- rho(0)] for a common cavity.
inline double np_early(const InitialState& init) {
  validate(init);
  return std::visit(
      [&](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Dicke>) {
          return detail::f_ladder(s.j.value(), s.m.value());
        } else if constexpr (std::is_same_v<T, DephasedDicke>) {
          const double j = s.j.value(), m = s.m.value();
          return (j + m) * ((j - m) * s.lambda + 1.0);
        } else if constexpr (std::is_same_v<T, DickeMixture>) {
          const double j = 0.5 * static_cast<double>(s.p.size() - 1);
          double acc = 0.0;
          for (std::size_t i = 0; i < s.p.size(); ++i) acc += s.p[i] * detail::f_ladder(j, detail::mixture_m(s, i));
          return acc;
        } else if constexpr (std::is_same_v<T, FactorizedIdentical>) {
          const double n = s.n_atoms;
          return n * (n - 1.0) * std::norm(s.rho_eg) + n * s.rho_ee;
        } else {
          const int n = atom_count(init);
          const SparseOperator lower = collective_lowering_sparse(n);
          return detail::explicit_expectation(init, SparseOperator(lower.adjoint()) * lower);
        }
      },
      init);
}

// Independent cavities: sum_n Tr[s_n^+ s_n^- rho(0)] = <N_ex>.
inline double np_early_independent(const InitialState& init) {
  validate(init);
  return std::visit(
      [&](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Dicke> || std::is_same_v<T, DephasedDicke>) {
          return s.j.value() + s.m.value();
        } else if constexpr (std::is_same_v<T, DickeMixture>) {
          const double j = 0.5 * static_cast<double>(s.p.size() - 1);
          double acc = 0.0;
          for (std::size_t i = 0; i < s.p.size(); ++i) acc += s.p[i] * (j + detail::mixture_m(s, i));
          return acc;
        } else if constexpr (std::is_same_v<T, FactorizedIdentical>) {
          return s.n_atoms * s.rho_ee;
        } else {
          const RealVector diag = excitation_diagonal(atom_count(init));
          double acc = 0.0;
          for (Eigen::Index i = 0; i < diag.size(); ++i) acc += diag(i) * s.rho.matrix()(i, i).real();
          return acc;
        }
      },
      init);
}

// Degree of superradiance; empty when no atom is excited.
inline std::optional<double> degree_early(const InitialState& init) {
  const double denominator = np_early_independent(init);
  if (!(denominator > 0.0)) return std::nullopt;
  if (const auto* f = std::get_if<FactorizedIdentical>(&init)) {
    return 1.0 + (f->n_atoms - 1.0) * std::norm(f->rho_eg) / f->rho_ee;
  }
  if (const auto* d = std::get_if<Dicke>(&init)) return d->j.value() - d->m.value() + 1.0;
  if (const auto* d = std::get_if<DephasedDicke>(&init)) return (d->j.value() - d->m.value()) * d->lambda + 1.0;
  return np_early(init) / denominator;
}

// N_M / (g t)^2 for a common cavity: (1/4) || L_{s^-}[rho(0)] ||_1.
inline double nm_early_closed(const InitialState& init) {
  validate(init);
  return std::visit(
      [&](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Dicke>) {
          return 0.5 * detail::f_ladder(s.j.value(), s.m.value());
        } else if constexpr (std::is_same_v<T, DephasedDicke>) {
          const double j = s.j.value(), m = s.m.value();
          return 0.5 * (j + m) * ((j - m) * s.lambda + 1.0);
        } else if constexpr (std::is_same_v<T, DickeMixture>) {
          const double j = 0.5 * static_cast<double>(s.p.size() - 1);
          const std::size_t top = s.p.size() - 1;
          auto w = [&](std::size_t i) { return s.p[i] * detail::f_ladder(j, detail::mixture_m(s, i)); };
          double acc = w(top);
          for (std::size_t i = 0; i < top; ++i) acc += std::abs(w(i + 1) - w(i));
          return 0.25 * acc;
        } else {
          return 0.25 * detail::explicit_dissipator_norm(init, Topology::CommonCavity);
        }
      },
      init);
}

// Independent cavities: (1/4) || sum_n L_{s_n^-}[rho(0)] ||_1.
inline double nm_early_independent(const InitialState& init) {
  validate(init);
  if (const auto* d = std::get_if<Dicke>(&init)) return 0.5 * (d->j.value() + d->m.value());
  if (const auto* d = std::get_if<DephasedDicke>(&init)) return 0.5 * (d->j.value() + d->m.value());
  return 0.25 * detail::explicit_dissipator_norm(init, Topology::IndependentCavities);
}

enum class TableRegime { EarlyTime, EarlyStageMarkov };

struct TableRow {
  // EarlyTime: units (g t)^2. EarlyStageMarkov: units (g tau_E)^2, with
  // N_P read as the steady photon number.
  double n_p = 0.0;
  double n_m = 0.0;
  double n_p_ind = 0.0;
  double n_m_ind = 0.0;
  std::optional<double> s;
  std::optional<double> enhancement;
};

// Only the dephased-Dicke (Dicke when lambda = 1) and factorized-identical
// families have tabulated characteristics.
inline TableRow table_evaluator(const InitialState& init, TableRegime regime) {
  if (!std::holds_alternative<DephasedDicke>(init) && !std::holds_alternative<FactorizedIdentical>(init) &&
      !std::holds_alternative<Dicke>(init)) {
    throw UsageError("table_evaluator: family must be dephased Dicke or factorized identical");
  }
  TableRow row;
  row.n_p = np_early(init);
  row.n_m = nm_early_closed(init);
  row.n_p_ind = np_early_independent(init);
  row.n_m_ind = nm_early_independent(init);
  row.s = degree_early(init);
  if (row.n_m_ind > 0.0) row.enhancement = row.n_m / row.n_m_ind;
  if (regime == TableRegime::EarlyStageMarkov) {
    row.n_p *= 4.0;
    row.n_p_ind *= 4.0;
    row.n_m *= 16.0;
    row.n_m_ind *= 16.0;
  }
  return row;
}

}  // namespace superrad
