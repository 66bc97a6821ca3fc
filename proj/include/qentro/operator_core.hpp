#pragma once

// Dense operators on finite-dimensional Hilbert spaces.
//
// Composite systems are always ordered A (x) B with row-major composite
// index i * dB + j, where i indexes A and j indexes B.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numeric>
#include <vector>

#include "qentro/error.hpp"

namespace qentro {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

/// Max-entry deviation from Hermitian symmetry that is absorbed by symmetrization.
inline constexpr double tol_herm = 1e-10;
/// Eigenvalues in [-tol_psd, 0) are clipped to zero; anything lower is rejected.
inline constexpr double tol_psd = 1e-10;
/// Eigenvalues closer than this are treated as degenerate when ordering eigenvectors.
inline constexpr double tol_degenerate = 1e-12;

inline double max_abs_entry(const Matrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

inline Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

class HermitianOperator {
 public:
  /// Symmetrizes `m` as (M + M^dagger)/2; throws NotHermitian beyond tol_herm.
  explicit HermitianOperator(const Matrix& m) {
    if (m.rows() != m.cols())
      throw Error(ErrorKind::DimMismatch, "operator is not square (" + std::to_string(m.rows()) +
                                              "x" + std::to_string(m.cols()) + ")");
    if (m.rows() == 0) throw Error(ErrorKind::DimMismatch, "operator has dimension 0");
    const Matrix adj = m.adjoint();
    const double dev = max_abs_entry(m - adj);
    if (!(dev <= tol_herm))
      throw Error(ErrorKind::NotHermitian,
                  "Hermitian symmetry deviation " + std::to_string(dev) + " exceeds tolerance");
    m_ = (m + adj) / 2.0;
  }

  static HermitianOperator identity(Eigen::Index d) {
    return HermitianOperator(Matrix::Identity(d, d));
  }

  Eigen::Index dim() const { return m_.rows(); }
  const Matrix& matrix() const { return m_; }
  double trace() const { return m_.trace().real(); }

 private:
  Matrix m_;
};

/// Eigen-decomposition with non-increasing eigenvalues.
///
/// Within a degenerate group (eigenvalues within tol_degenerate) the
/// eigenvectors are ordered by lexicographic comparison of their
/// absolute-value component vectors, so the output is deterministic.
struct Spectrum {
  RealVector eigenvalues;
  Matrix eigenvectors;  // column j pairs with eigenvalues[j]

  Matrix reconstruct() const {
    return eigenvectors * eigenvalues.cast<cplx>().asDiagonal() * eigenvectors.adjoint();
  }
};

namespace detail {

inline bool abs_lex_less(const Vector& a, const Vector& b) {
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    const double x = std::abs(a[i]);
    const double y = std::abs(b[i]);
    if (x < y) return true;
    if (y < x) return false;
  }
  return false;
}

/// Spectrum of a matrix already known to be Hermitian (only the lower triangle is read).
inline Spectrum hermitian_spectrum(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(m);
  if (solver.info() != Eigen::Success)
    throw Error(ErrorKind::ConvergenceFailure, "Hermitian eigensolver did not converge");
  const auto n = m.rows();
  const RealVector& ev = solver.eigenvalues();  // ascending
  const Matrix& vecs = solver.eigenvectors();

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  for (Eigen::Index j = 0; j < n; ++j) order[static_cast<std::size_t>(j)] = n - 1 - j;

  // Groups are formed by chaining neighbours closer than tol_degenerate.
  std::size_t start = 0;
  while (start < order.size()) {
    std::size_t end = start + 1;
    while (end < order.size() &&
           std::abs(ev[order[end - 1]] - ev[order[end]]) <= tol_degenerate)
      ++end;
    if (end - start > 1) {
      std::stable_sort(order.begin() + static_cast<std::ptrdiff_t>(start),
                       order.begin() + static_cast<std::ptrdiff_t>(end),
                       [&](Eigen::Index a, Eigen::Index b) {
                         return abs_lex_less(vecs.col(a), vecs.col(b));
                       });
    }
    start = end;
  }

  Spectrum s;
  s.eigenvalues.resize(n);
  s.eigenvectors.resize(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    s.eigenvalues[j] = ev[order[static_cast<std::size_t>(j)]];
    s.eigenvectors.col(j) = vecs.col(order[static_cast<std::size_t>(j)]);
  }
  return s;
}

}  // namespace detail

inline Spectrum spectrum(const HermitianOperator& op) {
  return detail::hermitian_spectrum(op.matrix());
}

/// Positive semidefinite operator with cached trace and spectrum.
class PositiveOperator {
 public:
  const HermitianOperator& hermitian() const { return base_; }
  const Matrix& matrix() const { return base_.matrix(); }
  Eigen::Index dim() const { return base_.dim(); }
  double trace() const { return trace_; }
  const Spectrum& spectrum() const { return spectrum_; }
  const RealVector& eigenvalues() const { return spectrum_.eigenvalues; }

  /// Number of eigenvalues above `tol`.
  Eigen::Index rank(double tol = tol_psd) const {
    return static_cast<Eigen::Index>((spectrum_.eigenvalues.array() > tol).count());
  }

  bool is_subnormalized() const { return trace_ <= 1.0 + 1e-10; }
  bool is_state() const { return std::abs(trace_ - 1.0) <= 1e-10; }

 private:
  PositiveOperator(HermitianOperator base, Spectrum s)
      : base_(std::move(base)), spectrum_(std::move(s)) {
    trace_ = base_.trace();
  }

  friend PositiveOperator validate_positive(const HermitianOperator& op);

  HermitianOperator base_;
  Spectrum spectrum_;
  double trace_ = 0.0;
};

/// Checks positivity; eigenvalues in [-tol_psd, 0) are clipped and the
/// matrix is re-assembled from the clipped spectrum.
inline PositiveOperator validate_positive(const HermitianOperator& op) {
  Spectrum s = spectrum(op);
  const auto n = s.eigenvalues.size();
  const double min_ev = s.eigenvalues[n - 1];
  if (min_ev < -tol_psd)
    throw Error(ErrorKind::NotPositive,
                "eigenvalue " + std::to_string(min_ev) + " is below -tol_psd");
  bool clipped = false;
  for (Eigen::Index j = 0; j < n; ++j) {
    if (s.eigenvalues[j] < 0.0) {
      s.eigenvalues[j] = 0.0;
      clipped = true;
    }
  }
  if (!clipped) return PositiveOperator(op, std::move(s));
  HermitianOperator rebuilt(s.reconstruct());
  return PositiveOperator(std::move(rebuilt), std::move(s));
}

inline PositiveOperator validate_positive(const Matrix& m) {
  return validate_positive(HermitianOperator(m));
}

/// Pure state |psi><psi| from a (not necessarily normalized) vector.
inline PositiveOperator projector(const Vector& psi) {
  return validate_positive(Matrix(psi * psi.adjoint()));
}

inline PositiveOperator diagonal_operator(const std::vector<double>& diag) {
  Matrix m = Matrix::Zero(static_cast<Eigen::Index>(diag.size()),
                          static_cast<Eigen::Index>(diag.size()));
  for (std::size_t i = 0; i < diag.size(); ++i)
    m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = diag[i];
  return validate_positive(m);
}

inline PositiveOperator maximally_mixed(Eigen::Index d) {
  return validate_positive(Matrix(Matrix::Identity(d, d) / static_cast<double>(d)));
}

enum class Keep { A, B };

/// Partial trace of an arbitrary (dA*dB)-square matrix.
inline Matrix partial_trace(const Matrix& m, Eigen::Index dA, Eigen::Index dB, Keep keep) {
  if (dA <= 0 || dB <= 0 || m.rows() != dA * dB || m.cols() != dA * dB)
    throw Error(ErrorKind::DimMismatch, "partial trace: dims " + std::to_string(dA) + "x" +
                                            std::to_string(dB) + " do not match operator of size " +
                                            std::to_string(m.rows()));
  if (keep == Keep::A) {
    Matrix out = Matrix::Zero(dA, dA);
    for (Eigen::Index j = 0; j < dB; ++j)
      for (Eigen::Index a = 0; a < dA; ++a)
        for (Eigen::Index b = 0; b < dA; ++b) out(a, b) += m(a * dB + j, b * dB + j);
    return out;
  }
  Matrix out = Matrix::Zero(dB, dB);
  for (Eigen::Index i = 0; i < dA; ++i) out += m.block(i * dB, i * dB, dB, dB);
  return out;
}

inline PositiveOperator partial_trace(const PositiveOperator& op, Eigen::Index dA,
                                      Eigen::Index dB, Keep keep) {
  return validate_positive(partial_trace(op.matrix(), dA, dB, keep));
}

inline HermitianOperator tensor(const HermitianOperator& a, const HermitianOperator& b) {
  return HermitianOperator(kron(a.matrix(), b.matrix()));
}

inline PositiveOperator tensor(const PositiveOperator& a, const PositiveOperator& b) {
  return validate_positive(kron(a.matrix(), b.matrix()));
}

/// Max-entry deviation of B^dagger B from the identity, for a matrix of column vectors.
inline double orthonormality_defect(const Matrix& basis) {
  return max_abs_entry(basis.adjoint() * basis -
                       Matrix::Identity(basis.cols(), basis.cols()));
}

}  // namespace qentro
