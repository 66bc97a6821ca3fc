#pragma once

// Entropy functionals on the positive cone, in nats.
//
// The quantum entropy is extended to unnormalized operators as
// H(A) = Tr eta(A) - eta(Tr A), which makes it homogeneous of degree one.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qentro/channel.hpp"
#include "qentro/operator_core.hpp"

namespace qentro {

/// eta(x) = -x ln x, continuously extended by eta(0) = 0.
inline double eta(double x) {
  if (x < 0.0) throw Error(ErrorKind::DomainError, "eta: negative argument");
  return x > 0.0 ? -x * std::log(x) : 0.0;
}

/// Nonnegative real or +infinity.
class ExtendedReal {
 public:
  constexpr ExtendedReal() = default;
  constexpr explicit ExtendedReal(double v) : value_(v) {}
  static constexpr ExtendedReal infinity() {
    ExtendedReal r;
    r.infinite_ = true;
    return r;
  }

  constexpr bool is_finite() const { return !infinite_; }
  constexpr bool is_infinite() const { return infinite_; }
  /// Finite value; throws DomainError when infinite.
  double value() const {
    if (infinite_) throw Error(ErrorKind::DomainError, "value requested from +infinity");
    return value_;
  }
  /// Finite value or +inf as a double, for comparisons and display.
  double as_double() const {
    return infinite_ ? std::numeric_limits<double>::infinity() : value_;
  }

 private:
  double value_ = 0.0;
  bool infinite_ = false;
};

namespace detail {

/// sum eta(x_i) - eta(sum x_i); entries at or below `zero_tol` count as exact zeros.
inline double cone_entropy(std::span<const double> weights, double zero_tol = 0.0) {
  double sum_eta = 0.0;
  double total = 0.0;
  for (double w : weights) {
    if (w <= zero_tol) continue;
    sum_eta += -w * std::log(w);
    total += w;
  }
  const double h = sum_eta - (total > 0.0 ? -total * std::log(total) : 0.0);
  return h > 0.0 ? h : 0.0;
}

inline double cone_entropy(const RealVector& ev, double zero_tol) {
  return cone_entropy(std::span<const double>(ev.data(), static_cast<std::size_t>(ev.size())),
                      zero_tol);
}

/// Entropy of a Hermitian matrix assumed positive up to rounding.
inline double matrix_entropy(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(m, Eigen::EigenvaluesOnly);
  return cone_entropy(solver.eigenvalues(), tol_psd);
}

/// Gradient of H at a positive matrix B: ln(Tr B) I - ln B.
///
/// Eigenvalues are floored at 1e-13 * Tr B so that the gradient stays finite
/// at the boundary of the cone.
inline Matrix entropy_gradient(const Matrix& b) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(b);
  const RealVector& ev = solver.eigenvalues();
  double tr = 0.0;
  for (Eigen::Index i = 0; i < ev.size(); ++i) tr += std::max(ev[i], 0.0);
  tr = std::max(tr, 1e-300);
  const double floor = 1e-13 * tr;
  RealVector g(ev.size());
  for (Eigen::Index i = 0; i < ev.size(); ++i) g[i] = std::log(tr) - std::log(std::max(ev[i], floor));
  const Matrix& u = solver.eigenvectors();
  return u * g.cast<cplx>().asDiagonal() * u.adjoint();
}

}  // namespace detail

inline double quantum_entropy(const PositiveOperator& a) {
  return detail::cone_entropy(a.eigenvalues(), tol_psd);
}

inline double classical_entropy(std::span<const double> weights) {
  for (double w : weights)
    if (!(w >= 0.0)) throw Error(ErrorKind::DomainError, "classical entropy: negative weight");
  return detail::cone_entropy(weights);
}

inline double classical_entropy(const std::vector<double>& weights) {
  return classical_entropy(std::span<const double>(weights));
}

/// h2(x) = eta(x) + eta(1 - x).
inline double binary_h2(double x) {
  if (!(x >= 0.0 && x <= 1.0)) throw Error(ErrorKind::DomainError, "h2: argument outside [0,1]");
  return eta(x) + eta(1.0 - x);
}

/// H(A||B) = Tr(A ln A - A ln B + B - A), +infinity unless supp A is inside supp B.
inline ExtendedReal relative_entropy(const PositiveOperator& a, const PositiveOperator& b) {
  if (a.dim() != b.dim()) throw Error(ErrorKind::DimMismatch, "relative entropy: dimensions differ");
  const Spectrum& sa = a.spectrum();
  const Spectrum& sb = b.spectrum();
  const auto n = a.dim();
  // overlap(i, j) = |<a_i|b_j>|^2
  const Eigen::MatrixXd overlap = (sa.eigenvectors.adjoint() * sb.eigenvectors).cwiseAbs2();

  double a_log_a = 0.0;
  double a_log_b = 0.0;
  double leak = 0.0;  // Tr A P_ker(B)
  for (Eigen::Index i = 0; i < n; ++i) {
    const double ai = sa.eigenvalues[i];
    if (ai <= tol_psd) continue;
    a_log_a += ai * std::log(ai);
    for (Eigen::Index j = 0; j < n; ++j) {
      const double bj = sb.eigenvalues[j];
      if (bj <= tol_psd)
        leak += ai * overlap(i, j);
      else
        a_log_b += ai * overlap(i, j) * std::log(bj);
    }
  }
  if (leak > 1e-9 * std::max(1.0, a.trace())) return ExtendedReal::infinity();
  const double value = a_log_a - a_log_b + b.trace() - a.trace();
  // Klein's inequality: the value is nonnegative; negatives are rounding.
  return ExtendedReal(std::max(value, 0.0));
}

inline double output_entropy(const KrausOperation& phi, const PositiveOperator& a) {
  return quantum_entropy(apply(phi, a));
}

/// H_Phi(rho) - H_{complement Phi}(rho).
inline double coherent_information(const KrausOperation& phi, const PositiveOperator& rho) {
  if (rho.dim() != phi.dim_in())
    throw Error(ErrorKind::DimMismatch, "coherent information: input dimension mismatch");
  return output_entropy(phi, rho) - output_entropy(complement(phi), rho);
}

// ---------------------------------------------------------------------------
// Inequality checkers. Each returns the evaluated sides of every bound it
// certifies; `passed` means every slack (rhs - lhs) is at least -tolerance.

struct Bound {
  std::string label;
  double lhs = 0.0;
  double rhs = 0.0;
  double slack() const { return rhs - lhs; }
};

struct InequalityReport {
  std::string name;
  std::vector<Bound> bounds;
  bool certified = true;  // false when the checker cannot evaluate the bound honestly
  double tolerance = 1e-9;

  double min_slack() const {
    double s = std::numeric_limits<double>::infinity();
    for (const auto& b : bounds) s = std::min(s, b.slack());
    return s;
  }
  bool passed() const { return certified && min_slack() >= -tolerance; }
};

/// H(A) + H(B - A) <= H(B) <= H(A) + H(B - A) + Tr B h2(Tr A / Tr B) for A <= B.
inline InequalityReport check_sandwich(const PositiveOperator& a, const PositiveOperator& b) {
  if (a.dim() != b.dim()) throw Error(ErrorKind::DimMismatch, "sandwich: dimensions differ");
  std::optional<PositiveOperator> diff;
  try {
    diff = validate_positive(Matrix(b.matrix() - a.matrix()));
  } catch (const Error&) {
    throw Error(ErrorKind::HypothesisViolated, "sandwich: B - A is not positive");
  }
  const double ha = quantum_entropy(a);
  const double hb = quantum_entropy(b);
  const double hd = quantum_entropy(*diff);
  const double tb = b.trace();
  const double mix = tb > 0.0 ? tb * binary_h2(std::clamp(a.trace() / tb, 0.0, 1.0)) : 0.0;
  return {"sandwich",
          {{"H(A)+H(B-A) <= H(B)", ha + hd, hb}, {"H(B) <= H(A)+H(B-A)+TrB h2", hb, ha + hd + mix}}};
}

namespace detail {

inline void require_subnormalized(const std::vector<PositiveOperator>& ops, const char* who) {
  if (ops.empty()) throw Error(ErrorKind::HypothesisViolated, std::string(who) + ": no operators");
  for (const auto& op : ops) {
    if (!op.is_subnormalized())
      throw Error(ErrorKind::HypothesisViolated, std::string(who) + ": operator trace exceeds 1");
    if (op.dim() != ops.front().dim())
      throw Error(ErrorKind::DimMismatch, std::string(who) + ": dimensions differ");
  }
}

}  // namespace detail

/// sum l_i H(A_i) <= H(sum l_i A_i) <= sum l_i H(A_i) + H({l_i}), A_i in T_1.
inline InequalityReport check_mixing(const std::vector<double>& weights,
                                     const std::vector<PositiveOperator>& ops) {
  detail::require_subnormalized(ops, "mixing");
  if (weights.size() != ops.size())
    throw Error(ErrorKind::HypothesisViolated, "mixing: weight count differs from operator count");
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) throw Error(ErrorKind::HypothesisViolated, "mixing: negative weight");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-10)
    throw Error(ErrorKind::HypothesisViolated, "mixing: weights are not a probability distribution");
  Matrix mix = Matrix::Zero(ops.front().dim(), ops.front().dim());
  double avg = 0.0;
  for (std::size_t i = 0; i < ops.size(); ++i) {
    mix += weights[i] * ops[i].matrix();
    avg += weights[i] * quantum_entropy(ops[i]);
  }
  const double hm = quantum_entropy(validate_positive(mix));
  const double shannon = classical_entropy(weights);
  return {"mixing", {{"sum l_i H(A_i) <= H(mix)", avg, hm}, {"H(mix) <= sum l_i H(A_i) + H(l)", hm, avg + shannon}}};
}

/// sum H(A_i) <= H(sum A_i) <= sum H(A_i) + H({Tr A_i}), A_i in T_1.
inline InequalityReport check_additive_mixing(const std::vector<PositiveOperator>& ops) {
  detail::require_subnormalized(ops, "additive mixing");
  Matrix sum = Matrix::Zero(ops.front().dim(), ops.front().dim());
  double sum_h = 0.0;
  std::vector<double> traces;
  for (const auto& op : ops) {
    sum += op.matrix();
    sum_h += quantum_entropy(op);
    traces.push_back(op.trace());
  }
  const double hs = quantum_entropy(validate_positive(sum));
  return {"additive_mixing",
          {{"sum H(A_i) <= H(sum A_i)", sum_h, hs},
           {"H(sum A_i) <= sum H(A_i) + H({Tr A_i})", hs, sum_h + classical_entropy(traces)}}};
}

/// H(A) <= H({<i|A|i>}) for the orthonormal basis given by the columns of `basis`.
inline InequalityReport check_pinching(const PositiveOperator& a, const Matrix& basis) {
  if (basis.rows() != a.dim() || basis.cols() != a.dim())
    throw Error(ErrorKind::DimMismatch, "pinching: basis shape mismatch");
  if (orthonormality_defect(basis) > 1e-9)
    throw Error(ErrorKind::HypothesisViolated, "pinching: basis is not orthonormal");
  std::vector<double> diag(static_cast<std::size_t>(a.dim()));
  for (Eigen::Index i = 0; i < a.dim(); ++i)
    diag[static_cast<std::size_t>(i)] =
        std::max(0.0, (basis.col(i).adjoint() * a.matrix() * basis.col(i))(0, 0).real());
  return {"pinching", {{"H(A) <= H(diag)", quantum_entropy(a), classical_entropy(diag)}}};
}

/// |H(Tr_B C) - H(Tr_A C)| <= H(C) for C on A (x) B.
inline InequalityReport check_triangle(const PositiveOperator& c, Eigen::Index dA, Eigen::Index dB) {
  const double ha = quantum_entropy(partial_trace(c, dA, dB, Keep::A));
  const double hb = quantum_entropy(partial_trace(c, dA, dB, Keep::B));
  return {"triangle", {{"|H(C_A) - H(C_B)| <= H(C)", std::abs(ha - hb), quantum_entropy(c)}}};
}

/// H(Phi(A)) <= S Tr A + H(A) where S is the sup of the output entropy over
/// pure inputs. Without a known S the report is marked not certified.
inline InequalityReport check_output_entropy_estimate(const KrausOperation& phi,
                                                      const PositiveOperator& a,
                                                      std::optional<double> pure_output_sup) {
  const double lhs = output_entropy(phi, a);
  if (!pure_output_sup) {
    InequalityReport r{"output_entropy_estimate", {{"H(Phi(A)) <= S TrA + H(A)", lhs, lhs}}};
    r.certified = false;
    return r;
  }
  return {"output_entropy_estimate",
          {{"H(Phi(A)) <= S TrA + H(A)", lhs, *pure_output_sup * a.trace() + quantum_entropy(a)}}};
}

/// Profile of y -> sup_{x in [0,1]} (x+y) h2(y/(x+y)) on a grid of y values.
///
/// The sup is taken over an x-grid of `x_steps` + 1 points; `bounds` compares
/// successive grid values so that the profile is certified non-increasing as
/// y decreases towards 0.
struct VanishingProfile {
  std::vector<double> y;
  std::vector<double> sup_value;
  InequalityReport report;
};

inline VanishingProfile vanishing_mixture_profile(std::vector<double> y_grid, int x_steps = 10000) {
  std::sort(y_grid.begin(), y_grid.end(), std::greater<>());
  VanishingProfile out;
  out.report.name = "vanishing_mixture";
  for (double y : y_grid) {
    if (!(y > 0.0)) throw Error(ErrorKind::DomainError, "vanishing profile: y must be positive");
    double best = 0.0;
    for (int s = 0; s <= x_steps; ++s) {
      const double x = static_cast<double>(s) / x_steps;
      best = std::max(best, (x + y) * binary_h2(y / (x + y)));
    }
    if (!out.y.empty())
      out.report.bounds.push_back({"g(y) non-increasing as y decreases", best, out.sup_value.back()});
    out.y.push_back(y);
    out.sup_value.push_back(best);
  }
  return out;
}

}  // namespace qentro
