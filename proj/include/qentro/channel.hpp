#pragma once

// Quantum operations given by finite Kraus sets.

#include <cmath>
#include <numbers>
#include <utility>
#include <vector>

#include "qentro/operator_core.hpp"

namespace qentro {

/// Completely positive trace non-increasing map rho -> sum_i V_i rho V_i^dagger.
///
/// The Kraus set is kept exactly as supplied; no minimization is done, so
/// size() is a property of the representation rather than of the map.
class KrausOperation {
 public:
  explicit KrausOperation(std::vector<Matrix> kraus) : kraus_(std::move(kraus)) {
    if (kraus_.empty()) throw Error(ErrorKind::EmptyInput, "Kraus set is empty");
    const auto rows = kraus_.front().rows();
    const auto cols = kraus_.front().cols();
    if (rows == 0 || cols == 0) throw Error(ErrorKind::DimMismatch, "Kraus operator is empty");
    Matrix gram = Matrix::Zero(cols, cols);
    for (const auto& v : kraus_) {
      if (v.rows() != rows || v.cols() != cols)
        throw Error(ErrorKind::DimMismatch, "Kraus operators have inconsistent shapes");
      gram += v.adjoint() * v;
    }
    defect_ = Matrix::Identity(cols, cols) - gram;
    defect_ = (defect_ + defect_.adjoint()) / 2.0;
    const RealVector ev = detail::hermitian_spectrum(defect_).eigenvalues;
    const double min_ev = ev.minCoeff();
    defect_norm_ = ev.cwiseAbs().maxCoeff();
    if (min_ev < -1e-10)
      throw Error(ErrorKind::NotContraction,
                  "sum of V_i^dagger V_i exceeds the identity (defect eigenvalue " +
                      std::to_string(min_ev) + ")");
  }

  Eigen::Index dim_in() const { return kraus_.front().cols(); }
  Eigen::Index dim_out() const { return kraus_.front().rows(); }
  std::size_t size() const { return kraus_.size(); }
  const std::vector<Matrix>& kraus() const { return kraus_; }

  /// I - sum_i V_i^dagger V_i.
  const Matrix& defect() const { return defect_; }
  /// Trace preserving: operator norm of the defect at most 1e-10.
  bool is_channel() const { return defect_norm_ <= 1e-10; }

 private:
  std::vector<Matrix> kraus_;
  Matrix defect_;
  double defect_norm_ = 0.0;
};

namespace detail {

inline Matrix apply_raw(const KrausOperation& phi, const Matrix& a) {
  Matrix out = Matrix::Zero(phi.dim_out(), phi.dim_out());
  for (const auto& v : phi.kraus()) out.noalias() += v * a * v.adjoint();
  return out;
}

inline Matrix dual_raw(const KrausOperation& phi, const Matrix& x) {
  Matrix out = Matrix::Zero(phi.dim_in(), phi.dim_in());
  for (const auto& v : phi.kraus()) out.noalias() += v.adjoint() * x * v;
  return out;
}

}  // namespace detail

inline PositiveOperator apply(const KrausOperation& phi, const PositiveOperator& a) {
  if (a.dim() != phi.dim_in())
    throw Error(ErrorKind::DimMismatch, "apply: input dimension " + std::to_string(a.dim()) +
                                            " but operation expects " +
                                            std::to_string(phi.dim_in()));
  return validate_positive(detail::apply_raw(phi, a.matrix()));
}

/// Dual (Heisenberg-picture) map X -> sum_i V_i^dagger X V_i.
class DualMap {
 public:
  explicit DualMap(KrausOperation phi) : phi_(std::move(phi)) {}

  Matrix operator()(const Matrix& x) const {
    if (x.rows() != phi_.dim_out() || x.cols() != phi_.dim_out())
      throw Error(ErrorKind::DimMismatch, "dual: argument dimension does not match output space");
    return detail::dual_raw(phi_, x);
  }
  HermitianOperator operator()(const HermitianOperator& x) const {
    return HermitianOperator((*this)(x.matrix()));
  }

 private:
  KrausOperation phi_;
};

inline DualMap dual(const KrausOperation& phi) { return DualMap(phi); }

/// Contraction V : H -> H' (x) H'' with V|phi> = sum_i V_i|phi> (x) |i>.
struct StinespringDilation {
  Matrix isometry;  // (dim_out * dim_env) x dim_in
  Eigen::Index dim_out = 0;
  Eigen::Index dim_env = 0;
};

inline StinespringDilation stinespring(const KrausOperation& phi) {
  const auto d_out = phi.dim_out();
  const auto d_env = static_cast<Eigen::Index>(phi.size());
  Matrix v = Matrix::Zero(d_out * d_env, phi.dim_in());
  for (Eigen::Index i = 0; i < d_env; ++i) {
    const Matrix& k = phi.kraus()[static_cast<std::size_t>(i)];
    for (Eigen::Index row = 0; row < d_out; ++row) v.row(row * d_env + i) = k.row(row);
  }
  return {std::move(v), d_out, d_env};
}

/// Complementary operation A -> sum_{ij} Tr[V_i A V_j^dagger] |i><j|.
///
/// Its k-th Kraus operator has entries (W_k)_{i,m} = (V_i)_{k,m}.
inline KrausOperation complement(const KrausOperation& phi) {
  const auto n_env = static_cast<Eigen::Index>(phi.size());
  std::vector<Matrix> out;
  out.reserve(static_cast<std::size_t>(phi.dim_out()));
  for (Eigen::Index k = 0; k < phi.dim_out(); ++k) {
    Matrix w(n_env, phi.dim_in());
    for (Eigen::Index i = 0; i < n_env; ++i) w.row(i) = phi.kraus()[static_cast<std::size_t>(i)].row(k);
    out.push_back(std::move(w));
  }
  return KrausOperation(std::move(out));
}

/// psi o phi with Kraus set {W_j V_i}.
inline KrausOperation compose(const KrausOperation& psi, const KrausOperation& phi) {
  if (phi.dim_out() != psi.dim_in())
    throw Error(ErrorKind::DimMismatch, "compose: inner output dimension " +
                                            std::to_string(phi.dim_out()) +
                                            " differs from outer input dimension " +
                                            std::to_string(psi.dim_in()));
  std::vector<Matrix> out;
  out.reserve(phi.size() * psi.size());
  for (const auto& v : phi.kraus())
    for (const auto& w : psi.kraus()) out.emplace_back(w * v);
  return KrausOperation(std::move(out));
}

/// phi (x) psi with Kraus set {V_i (x) W_j}.
inline KrausOperation tensor_op(const KrausOperation& phi, const KrausOperation& psi) {
  std::vector<Matrix> out;
  out.reserve(phi.size() * psi.size());
  for (const auto& v : phi.kraus())
    for (const auto& w : psi.kraus()) out.push_back(kron(v, w));
  return KrausOperation(std::move(out));
}

// ---------------------------------------------------------------------------
// Constructors

inline KrausOperation identity_channel(Eigen::Index d) {
  return KrausOperation({Matrix::Identity(d, d)});
}

inline KrausOperation unitary_channel(const Matrix& u) { return KrausOperation({u}); }

/// Qubit dephasing {sqrt(1-p) I, sqrt(p) Z}.
inline KrausOperation dephasing_channel(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw Error(ErrorKind::DomainError, "dephasing: p outside [0,1]");
  Matrix z = Matrix::Zero(2, 2);
  z(0, 0) = 1.0;
  z(1, 1) = -1.0;
  return KrausOperation({std::sqrt(1.0 - p) * Matrix::Identity(2, 2), std::sqrt(p) * z});
}

/// rho -> (1-p) rho + p Tr(rho) I/d.
inline KrausOperation depolarizing_channel(Eigen::Index d, double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw Error(ErrorKind::DomainError, "depolarizing: p outside [0,1]");
  std::vector<Matrix> ks;
  if (p < 1.0) ks.push_back(std::sqrt(1.0 - p) * Matrix::Identity(d, d));
  if (p > 0.0) {
    const double s = std::sqrt(p / static_cast<double>(d));
    for (Eigen::Index a = 0; a < d; ++a)
      for (Eigen::Index b = 0; b < d; ++b) {
        Matrix k = Matrix::Zero(d, d);
        k(a, b) = s;
        ks.push_back(std::move(k));
      }
  }
  return KrausOperation(std::move(ks));
}

/// Partial trace over B (keep = A) or over A (keep = B) as a channel on A (x) B.
inline KrausOperation partial_trace_channel(Eigen::Index dA, Eigen::Index dB, Keep keep) {
  std::vector<Matrix> ks;
  if (keep == Keep::A) {
    for (Eigen::Index j = 0; j < dB; ++j) {
      Matrix bra = Matrix::Zero(1, dB);
      bra(0, j) = 1.0;
      ks.push_back(kron(Matrix::Identity(dA, dA), bra));
    }
  } else {
    for (Eigen::Index i = 0; i < dA; ++i) {
      Matrix bra = Matrix::Zero(1, dA);
      bra(0, i) = 1.0;
      ks.push_back(kron(bra, Matrix::Identity(dB, dB)));
    }
  }
  return KrausOperation(std::move(ks));
}

/// Sup of the output entropy over pure inputs of the qubit dephasing channel: h2(p).
inline double dephasing_pure_output_sup(double p) {
  auto eta = [](double x) { return x > 0.0 ? -x * std::log(x) : 0.0; };
  return eta(p) + eta(1.0 - p);
}

/// Constant output entropy of depolarizing_channel(d, p) on pure inputs.
inline double depolarizing_pure_output_sup(Eigen::Index d, double p) {
  auto eta = [](double x) { return x > 0.0 ? -x * std::log(x) : 0.0; };
  const double dd = static_cast<double>(d);
  return eta(1.0 - p + p / dd) + (dd - 1.0) * eta(p / dd);
}

/// Measure-and-prepare map rho -> sum_g V_g sigma V_g^dagger Tr(rho M_g)
/// for a finite group {V_g} and POVM {M_g}.
///
/// Kraus factors are sqrt(s_a m_b)|e_a><f_b| from the eigenpairs (s_a, e_a)
/// of V_g sigma V_g^dagger and (m_b, f_b) of M_g, so they are rank one but
/// their number grows with the ranks involved.
inline KrausOperation group_average_channel(const std::vector<Matrix>& group_unitaries,
                                            const std::vector<PositiveOperator>& povm,
                                            const PositiveOperator& sigma) {
  if (group_unitaries.empty() || group_unitaries.size() != povm.size())
    throw Error(ErrorKind::DimMismatch, "group average: need one POVM element per group element");
  if (!sigma.is_state()) throw Error(ErrorKind::DomainError, "group average: sigma is not a state");
  const auto d_in = povm.front().dim();
  const auto d_out = sigma.dim();
  Matrix total = Matrix::Zero(d_in, d_in);
  for (const auto& m : povm) {
    if (m.dim() != d_in) throw Error(ErrorKind::DimMismatch, "group average: POVM dims differ");
    total += m.matrix();
  }
  if (max_abs_entry(total - Matrix::Identity(d_in, d_in)) > 1e-9)
    throw Error(ErrorKind::PovmIncomplete, "POVM elements do not sum to the identity");

  std::vector<Matrix> ks;
  for (std::size_t g = 0; g < group_unitaries.size(); ++g) {
    const Matrix& u = group_unitaries[g];
    if (u.rows() != d_out || u.cols() != d_out)
      throw Error(ErrorKind::DimMismatch, "group average: unitary dimension mismatch");
    if (max_abs_entry(u.adjoint() * u - Matrix::Identity(d_out, d_out)) > 1e-9)
      throw Error(ErrorKind::DomainError, "group average: V_g is not unitary");
    const Spectrum rotated = detail::hermitian_spectrum(u * sigma.matrix() * u.adjoint());
    const Spectrum& effect = povm[g].spectrum();
    for (Eigen::Index a = 0; a < rotated.eigenvalues.size(); ++a) {
      const double s = rotated.eigenvalues[a];
      if (s <= tol_psd) continue;
      for (Eigen::Index b = 0; b < effect.eigenvalues.size(); ++b) {
        const double w = effect.eigenvalues[b];
        if (w <= tol_psd) continue;
        ks.emplace_back(std::sqrt(s * w) * rotated.eigenvectors.col(a) *
                        effect.eigenvectors.col(b).adjoint());
      }
    }
  }
  return KrausOperation(std::move(ks));
}

/// Average state (1/|G|) sum_g V_g sigma V_g^dagger of a finite group orbit.
inline PositiveOperator group_orbit_average(const std::vector<Matrix>& group_unitaries,
                                            const PositiveOperator& sigma) {
  if (group_unitaries.empty()) throw Error(ErrorKind::EmptyInput, "empty group");
  Matrix acc = Matrix::Zero(sigma.dim(), sigma.dim());
  for (const auto& u : group_unitaries) acc += u * sigma.matrix() * u.adjoint();
  return validate_positive(Matrix(acc / static_cast<double>(group_unitaries.size())));
}

struct PhaseShift {
  double t = 0.0;  // shift parameter
  double p = 0.0;  // probability
};

/// Random-unitary channel sum_k p_k U_k rho U_k^dagger with U_k = diag(exp(-i t_k x_m)).
inline KrausOperation random_phase_channel(const std::vector<PhaseShift>& phases,
                                           const std::vector<double>& grid) {
  if (phases.empty()) throw Error(ErrorKind::BadDistribution, "no phases given");
  if (grid.empty()) throw Error(ErrorKind::DimMismatch, "empty grid");
  double total = 0.0;
  for (const auto& ph : phases) {
    if (!(ph.p >= 0.0)) throw Error(ErrorKind::BadDistribution, "negative phase probability");
    total += ph.p;
  }
  if (std::abs(total - 1.0) > 1e-9)
    throw Error(ErrorKind::BadDistribution, "phase probabilities do not sum to 1");
  const auto d = static_cast<Eigen::Index>(grid.size());
  std::vector<Matrix> ks;
  for (const auto& ph : phases) {
    if (ph.p == 0.0) continue;
    Matrix u = Matrix::Zero(d, d);
    for (Eigen::Index m = 0; m < d; ++m)
      u(m, m) = std::sqrt(ph.p) * std::exp(cplx(0.0, -ph.t * grid[static_cast<std::size_t>(m)]));
    ks.push_back(std::move(u));
  }
  return KrausOperation(std::move(ks));
}

/// Uniform grid of d points on [-a, a] (d = 1 gives {0}).
inline std::vector<double> symmetric_grid(Eigen::Index d, double a) {
  std::vector<double> g(static_cast<std::size_t>(d));
  for (Eigen::Index m = 0; m < d; ++m)
    g[static_cast<std::size_t>(m)] =
        d == 1 ? 0.0 : -a + 2.0 * a * static_cast<double>(m) / static_cast<double>(d - 1);
  return g;
}

}  // namespace qentro
