#pragma once

// Dense complex linear algebra shared by every other module.
//
// Basis convention (global): atoms first with atom 1 as the slowest index,
// the cavity (or cavities) last; within an atom |e> has index 0 and |g>
// index 1; Fock states ascend from the vacuum.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "superrad/errors.hpp"

namespace superrad {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using Layout = std::vector<std::size_t>;

inline constexpr Complex kI{0.0, 1.0};

struct Tolerances {
  static constexpr double hermiticity = 1e-12;
  static constexpr double psd = -1e-9;
  static constexpr double trace = 1e-10;
  // Looser gate used when deciding whether an input may take the Hermitian
  // eigensolver path.
  static constexpr double hermitian_input = 1e-10;
};

// Largest dense square dimension any operation will allocate.
inline constexpr std::size_t kMaxDenseDim = 4096;

inline std::size_t layout_dim(std::span<const std::size_t> layout) {
  return std::accumulate(layout.begin(), layout.end(), std::size_t{1}, std::multiplies<>());
}

inline void require_capacity(std::size_t dim, const char* what, std::size_t max_dim = kMaxDenseDim) {
  if (dim > max_dim) {
    throw CapacityError(std::string(what) + ": dimension " + std::to_string(dim) +
                        " exceeds dense budget " + std::to_string(max_dim));
  }
}

inline double max_abs(const ComplexMatrix& a) { return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff(); }

// max |a - a^dagger| entrywise.
inline double hermiticity_error(const ComplexMatrix& a) {
  if (a.rows() != a.cols()) return std::numeric_limits<double>::infinity();
  return max_abs(a - a.adjoint());
}

inline bool all_finite(const ComplexMatrix& a) { return a.allFinite(); }

inline std::vector<double> hermitian_eigenvalues(const ComplexMatrix& a) {
  if (a.rows() != a.cols()) throw UsageError("hermitian_eigenvalues: matrix is not square");
  const double scale = std::max(1.0, max_abs(a));
  if (hermiticity_error(a) > Tolerances::hermitian_input * scale) {
    throw UsageError("hermitian_eigenvalues: input is not Hermitian");
  }
  if (a.rows() == 0) return {};
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(a, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw UsageError("hermitian_eigenvalues: eigensolver failed");
  const RealVector& ev = solver.eigenvalues();
  std::vector<double> out(ev.data(), ev.data() + ev.size());
  std::sort(out.begin(), out.end());
  return out;
}

// Sum of singular values. Hermitian inputs go through the eigensolver.
inline double trace_norm(const ComplexMatrix& a) {
  if (a.rows() != a.cols()) throw UsageError("trace_norm: matrix is not square");
  if (a.rows() == 0) return 0.0;
  const double scale = std::max(1.0, max_abs(a));
  if (hermiticity_error(a) <= Tolerances::hermitian_input * scale) {
    const ComplexMatrix h = 0.5 * (a + a.adjoint());
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(h, Eigen::EigenvaluesOnly);
    return solver.eigenvalues().cwiseAbs().sum();
  }
  Eigen::BDCSVD<ComplexMatrix> svd(a);
  return svd.singularValues().sum();
}

inline ComplexMatrix tensor_product(const ComplexMatrix& a, const ComplexMatrix& b,
                                    std::size_t max_dim = kMaxDenseDim) {
  const auto rows = static_cast<std::size_t>(a.rows()) * static_cast<std::size_t>(b.rows());
  const auto cols = static_cast<std::size_t>(a.cols()) * static_cast<std::size_t>(b.cols());
  require_capacity(std::max(rows, cols), "tensor_product", max_dim);
  ComplexMatrix out(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

// Partial trace of a (not necessarily Hermitian) operator on a multipartite
// space. `keep` lists the factor indices that survive, in any order; the
// output keeps them in ascending factor order.
inline ComplexMatrix partial_trace(const ComplexMatrix& op, std::span<const std::size_t> layout,
                                   std::span<const std::size_t> keep) {
  if (layout.empty()) throw UsageError("partial_trace: empty layout");
  if (keep.empty()) throw UsageError("partial_trace: keep set is empty");
  const std::size_t dim = layout_dim(layout);
  if (static_cast<std::size_t>(op.rows()) != dim || static_cast<std::size_t>(op.cols()) != dim) {
    throw UsageError("partial_trace: operator dimension does not match layout");
  }
  std::vector<bool> kept(layout.size(), false);
  for (std::size_t k : keep) {
    if (k >= layout.size()) throw UsageError("partial_trace: factor index out of range");
    kept[k] = true;
  }

  // Mixed-radix split of every full index into (kept index, traced index).
  std::size_t kept_dim = 1;
  std::size_t traced_dim = 1;
  for (std::size_t f = 0; f < layout.size(); ++f) (kept[f] ? kept_dim : traced_dim) *= layout[f];
  std::vector<std::size_t> kept_of(dim), traced_of(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    std::size_t rem = i;
    std::size_t kidx = 0, kmul = 1, tidx = 0, tmul = 1;
    for (std::size_t f = layout.size(); f-- > 0;) {
      const std::size_t digit = rem % layout[f];
      rem /= layout[f];
      if (kept[f]) {
        kidx += digit * kmul;
        kmul *= layout[f];
      } else {
        tidx += digit * tmul;
        tmul *= layout[f];
      }
    }
    kept_of[i] = kidx;
    traced_of[i] = tidx;
  }
  std::vector<std::vector<std::size_t>> groups(traced_dim);
  for (std::size_t i = 0; i < dim; ++i) groups[traced_of[i]].push_back(i);

  ComplexMatrix out = ComplexMatrix::Zero(static_cast<Eigen::Index>(kept_dim), static_cast<Eigen::Index>(kept_dim));
  for (const auto& group : groups) {
    for (std::size_t i : group) {
      for (std::size_t j : group) {
        out(static_cast<Eigen::Index>(kept_of[i]), static_cast<Eigen::Index>(kept_of[j])) +=
            op(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      }
    }
  }
  return out;
}

// Fast path for the ubiquitous "trace out the last factor" case.
inline ComplexMatrix trace_out_last(const ComplexMatrix& op, std::size_t last_dim) {
  const Eigen::Index d = static_cast<Eigen::Index>(last_dim);
  if (d == 0 || op.rows() % d != 0 || op.rows() != op.cols()) {
    throw UsageError("trace_out_last: dimension mismatch");
  }
  const Eigen::Index keep = op.rows() / d;
  ComplexMatrix out = ComplexMatrix::Zero(keep, keep);
  for (Eigen::Index j = 0; j < keep; ++j) {
    for (Eigen::Index i = 0; i < keep; ++i) {
      Complex s = 0.0;
      for (Eigen::Index k = 0; k < d; ++k) s += op(i * d + k, j * d + k);
      out(i, j) = s;
    }
  }
  return out;
}

// A validated density matrix together with its tensor-factor layout.
// Construction checks Hermiticity and unit trace; positivity is reported
// by `min_eigenvalue()` since it needs an eigensolve.
class DensityMatrix {
 public:
  explicit DensityMatrix(ComplexMatrix matrix) : DensityMatrix(std::move(matrix), Layout{}) {}

  DensityMatrix(ComplexMatrix matrix, Layout layout) : matrix_(std::move(matrix)), layout_(std::move(layout)) {
    if (matrix_.rows() != matrix_.cols()) throw UsageError("DensityMatrix: matrix is not square");
    if (layout_.empty()) layout_ = {static_cast<std::size_t>(matrix_.rows())};
    if (layout_dim(layout_) != static_cast<std::size_t>(matrix_.rows())) {
      throw UsageError("DensityMatrix: layout does not match dimension");
    }
    if (!matrix_.allFinite()) throw UsageError("DensityMatrix: non-finite entries");
    if (hermiticity_error(matrix_) > Tolerances::hermiticity) {
      throw UsageError("DensityMatrix: not Hermitian (err " + std::to_string(hermiticity_error(matrix_)) + ")");
    }
    if (std::abs(matrix_.trace() - Complex(1.0)) > Tolerances::trace) {
      throw UsageError("DensityMatrix: trace differs from one");
    }
  }

  const ComplexMatrix& matrix() const noexcept { return matrix_; }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(matrix_.rows()); }
  const Layout& layout() const noexcept { return layout_; }

  double min_eigenvalue() const { return hermitian_eigenvalues(matrix_).front(); }
  bool is_positive() const { return min_eigenvalue() >= Tolerances::psd; }

 private:
  ComplexMatrix matrix_;
  Layout layout_;
};

inline DensityMatrix partial_trace(const DensityMatrix& rho, std::span<const std::size_t> keep) {
  ComplexMatrix reduced = partial_trace(rho.matrix(), rho.layout(), keep);
  std::vector<std::size_t> sorted(keep.begin(), keep.end());
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  Layout kept_layout;
  for (std::size_t k : sorted) kept_layout.push_back(rho.layout()[k]);
  reduced = 0.5 * (reduced + reduced.adjoint()).eval();
  return DensityMatrix(std::move(reduced), std::move(kept_layout));
}

inline double trace_distance(const ComplexMatrix& rho, const ComplexMatrix& sigma) {
  if (rho.rows() != sigma.rows() || rho.cols() != sigma.cols()) {
    throw UsageError("trace_distance: dimension mismatch");
  }
  return 0.5 * trace_norm(rho - sigma);
}

inline double trace_distance(const DensityMatrix& rho, const DensityMatrix& sigma) {
  return trace_distance(rho.matrix(), sigma.matrix());
}

inline ComplexMatrix projector(const ComplexVector& psi) { return psi * psi.adjoint(); }

}  // namespace superrad
