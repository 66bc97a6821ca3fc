#pragma once

// Output-entropy bounds and continuity diagnostics for quantum operations.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qentro/channel.hpp"
#include "qentro/detail/decomposition.hpp"
#include "qentro/entropy.hpp"
#include "qentro/operator_core.hpp"
#include "qentro/random.hpp"

namespace qentro {

// ---------------------------------------------------------------------------
// lambda*

/// Non-increasing list of nonnegative singular values.
class SingularProfile {
 public:
  SingularProfile() = default;
  explicit SingularProfile(std::vector<double> values) : values_(std::move(values)) {
    for (double v : values_)
      if (!(v >= 0.0)) throw Error(ErrorKind::DomainError, "singular profile: negative value");
    std::sort(values_.begin(), values_.end(), std::greater<>());
  }

  const std::vector<double>& values() const { return values_; }
  double max() const { return values_.empty() ? 0.0 : values_.front(); }
  bool is_contraction() const { return max() <= 1.0 + 1e-10; }

 private:
  std::vector<double> values_;
};

namespace detail {

/// Root of sum_i exp(-lambda / pi_i) = 1 over the positive pi_i, by bisection.
inline double exp_sum_root(const std::vector<double>& pi) {
  std::vector<double> p;
  for (double x : pi)
    if (x > 1e-14) p.push_back(x);
  if (p.size() <= 1) return 0.0;
  const double pmax = *std::max_element(p.begin(), p.end());
  auto excess = [&](double lam) {
    double s = 0.0;
    for (double x : p) s += std::exp(-lam / x);
    return s - 1.0;
  };
  double lo = 0.0;
  double hi = pmax * (std::log(static_cast<double>(p.size())) + 1.0);
  while (excess(hi) > 0.0) {
    lo = hi;
    hi *= 2.0;
  }
  for (int it = 0; it < 200 && hi - lo > 1e-12; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (excess(mid) > 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace detail

/// Unique root of sum_i exp(-lambda / nu_i^2) = 1; zero values contribute nothing.
inline double lambda_star(const SingularProfile& profile) {
  std::vector<double> pi;
  for (double v : profile.values()) pi.push_back(v * v);
  return detail::exp_sum_root(pi);
}

struct ClassicalMaximizer {
  std::vector<double> distribution;
  double value = 0.0;
};

/// argmax of H({pi_i x_i}) over probability vectors x: x_i ~ exp(-lambda*/pi_i) / pi_i.
inline ClassicalMaximizer classical_max_distribution(const std::vector<double>& pi) {
  if (pi.empty()) throw Error(ErrorKind::EmptyInput, "classical maximizer: empty list");
  for (double x : pi)
    if (!(x > 0.0)) throw Error(ErrorKind::DomainError, "classical maximizer: weights must be positive");
  ClassicalMaximizer out;
  out.value = detail::exp_sum_root(pi);
  double total = 0.0;
  for (double x : pi) {
    out.distribution.push_back(std::exp(-out.value / x) / x);
    total += out.distribution.back();
  }
  for (auto& x : out.distribution) x /= total;
  return out;
}

inline SingularProfile singular_profile(const Matrix& v) {
  const Spectrum s = detail::hermitian_spectrum(v.adjoint() * v);
  std::vector<double> nu;
  for (Eigen::Index i = 0; i < s.eigenvalues.size(); ++i)
    nu.push_back(std::sqrt(std::max(s.eigenvalues[i], 0.0)));
  return SingularProfile(std::move(nu));
}

struct OutputEntropySup {
  double value = 0.0;
  SingularProfile profile;
  PositiveOperator witness;
};

/// sup over states of H(V rho V^dagger), with a state attaining it.
inline OutputEntropySup sup_output_entropy_vrv(const Matrix& v) {
  if (v.size() == 0) throw Error(ErrorKind::DimMismatch, "empty matrix");
  const Spectrum s = detail::hermitian_spectrum(v.adjoint() * v);
  std::vector<double> nu;
  std::vector<double> pi;
  for (Eigen::Index i = 0; i < s.eigenvalues.size(); ++i) {
    const double e = std::max(s.eigenvalues[i], 0.0);
    nu.push_back(std::sqrt(e));
    if (e > 1e-14) pi.push_back(e);
  }
  SingularProfile profile(nu);
  if (!profile.is_contraction())
    throw Error(ErrorKind::NotContraction,
                "largest singular value " + std::to_string(profile.max()) + " exceeds 1");
  Matrix w = Matrix::Zero(v.cols(), v.cols());
  double value = 0.0;
  if (pi.empty()) {
    w = s.eigenvectors.col(0) * s.eigenvectors.col(0).adjoint();
  } else {
    const ClassicalMaximizer cm = classical_max_distribution(pi);
    value = cm.value;
    // eigenvalues of V^dagger V are non-increasing, so the positive ones come first
    for (std::size_t i = 0; i < pi.size(); ++i) {
      const auto j = static_cast<Eigen::Index>(i);
      w += cm.distribution[i] * s.eigenvectors.col(j) * s.eigenvectors.col(j).adjoint();
    }
  }
  return {value, std::move(profile), validate_positive(w)};
}

// ---------------------------------------------------------------------------
// Energy-type condition on an output basis

struct ConditionIvReport {
  double operator_norm = 0.0;  // || sum_i h_i Phi^*(|b_i><b_i|) ||
  double exp_sum = 0.0;        // sum_i exp(-h_i)
  /// sup_rho H(Phi(rho)) <= operator_norm + max(0, ln exp_sum)  (Gibbs variational bound)
  double entropy_bound = 0.0;
  bool certified = true;
};

inline ConditionIvReport theorem1_condition_iv_check(const KrausOperation& phi, const Matrix& basis,
                                                     const std::vector<double>& h) {
  if (basis.rows() != phi.dim_out() || basis.cols() != phi.dim_out())
    throw Error(ErrorKind::DimMismatch, "basis must be a square matrix on the output space");
  if (orthonormality_defect(basis) > 1e-9)
    throw Error(ErrorKind::BasisNotOrthonormal, "basis columns are not orthonormal");
  if (h.size() != static_cast<std::size_t>(basis.cols()))
    throw Error(ErrorKind::DimMismatch, "h must have one entry per basis vector");
  Matrix obs = Matrix::Zero(phi.dim_out(), phi.dim_out());
  ConditionIvReport r;
  for (std::size_t i = 0; i < h.size(); ++i) {
    if (!(h[i] >= 0.0)) throw Error(ErrorKind::DomainError, "h must be nonnegative");
    const auto b = basis.col(static_cast<Eigen::Index>(i));
    obs += h[i] * b * b.adjoint();
    r.exp_sum += std::exp(-h[i]);
  }
  const Matrix m = detail::dual_raw(phi, obs);
  Eigen::SelfAdjointEigenSolver<Matrix> solver((m + m.adjoint()) / 2.0, Eigen::EigenvaluesOnly);
  r.operator_norm = solver.eigenvalues().cwiseAbs().maxCoeff();
  // output traces are at most 1, so t ln Z <= max(0, ln Z)
  r.entropy_bound = r.operator_norm + std::max(0.0, std::log(r.exp_sum));
  return r;
}

// ---------------------------------------------------------------------------
// Analytic Kraus families

enum class Verdict { ContinuousCertified, NotContinuous, Undecided };

inline std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::ContinuousCertified: return "ContinuousCertified";
    case Verdict::NotContinuous: return "NotContinuous";
    case Verdict::Undecided: return "Undecided";
  }
  return "Undecided";
}

/// ||V_i||^2 as a function of the index i.
struct NormLaw {
  enum class Kind { Constant, Power, LogPower, Unsupported };
  Kind kind = Kind::Constant;
  double c = 1.0;
  double exponent = 0.0;  // beta for Power, alpha for LogPower
  std::string name = "constant";

  static NormLaw constant(double c) { return {Kind::Constant, c, 0.0, "constant"}; }
  static NormLaw power(double c, double beta) { return {Kind::Power, c, beta, "power"}; }
  static NormLaw log_power(double c, double alpha) { return {Kind::LogPower, c, alpha, "log_power"}; }

  /// First admissible index (log laws start at 2).
  std::int64_t first_index() const { return kind == Kind::LogPower ? 2 : 1; }

  double value(std::int64_t i) const {
    const double x = static_cast<double>(i);
    switch (kind) {
      case Kind::Constant: return c;
      case Kind::Power: return c * std::pow(x, -exponent);
      case Kind::LogPower: return c * std::pow(std::log(x), -exponent);
      case Kind::Unsupported: break;
    }
    throw Error(ErrorKind::DomainError, "unsupported norm law '" + name + "'");
  }
};

/// Rank d_i of the i-th Kraus operator.
struct RankLaw {
  enum class Kind { Constant, Poly, Unsupported };
  Kind kind = Kind::Constant;
  double param = 1.0;  // d for Constant, n for Poly
  std::string name = "constant";

  static RankLaw constant(double d) { return {Kind::Constant, d, "constant"}; }
  static RankLaw poly(double n) { return {Kind::Poly, n, "poly"}; }

  /// Polynomial degree bounding d_i (0 for a constant rank).
  double degree() const { return kind == Kind::Poly ? param : 0.0; }

  std::int64_t value(std::int64_t i) const {
    switch (kind) {
      case Kind::Constant: return static_cast<std::int64_t>(std::llround(param));
      case Kind::Poly:
        return std::max<std::int64_t>(
            1, static_cast<std::int64_t>(std::floor(std::pow(static_cast<double>(i), param) + 1e-9)));
      case Kind::Unsupported: break;
    }
    throw Error(ErrorKind::DomainError, "unsupported rank law '" + name + "'");
  }
};

struct AnalyticKrausFamily {
  NormLaw norm;
  RankLaw rank;
  bool ranges_orthogonal = false;
  bool corange_orthogonal = false;
  bool projector_multiples = false;

  bool supported() const {
    return norm.kind != NormLaw::Kind::Unsupported && rank.kind != RankLaw::Kind::Unsupported;
  }

  /// Throws DomainError on out-of-range parameters of a supported law.
  void validate() const {
    if (norm.kind != NormLaw::Kind::Unsupported) {
      if (!(norm.c > 0.0)) throw Error(ErrorKind::DomainError, "norm law: c must be positive");
      if (!(norm.exponent >= 0.0)) throw Error(ErrorKind::DomainError, "norm law: exponent must be >= 0");
    }
    if (rank.kind == RankLaw::Kind::Constant &&
        !(rank.param >= 1.0 && std::floor(rank.param) == rank.param))
      throw Error(ErrorKind::DomainError, "rank law: d must be a positive integer");
    if (rank.kind == RankLaw::Kind::Poly && !(rank.param >= 0.0))
      throw Error(ErrorKind::DomainError, "rank law: n must be >= 0");
  }
};

struct ClassifierReport {
  Verdict operation = Verdict::Undecided;
  Verdict complement = Verdict::Undecided;
  std::vector<std::string> reasons;
};

namespace detail {

// Is there K > 0 with sum_i i^n exp(-K / ||V_i||^2) < inf? Polynomial weights do
// not change the answer for the catalog laws.
inline bool exp_series_converges(const NormLaw& law) {
  switch (law.kind) {
    case NormLaw::Kind::Constant: return false;
    case NormLaw::Kind::Power: return law.exponent > 0.0;
    case NormLaw::Kind::LogPower: return law.exponent >= 1.0;
    case NormLaw::Kind::Unsupported: break;
  }
  return false;
}

inline bool norms_summable(const NormLaw& law) {
  return law.kind == NormLaw::Kind::Power && law.exponent > 1.0;
}

inline std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%g", x);
  return buf;
}

}  // namespace detail

/// Rule-based verdicts for the output entropy of the operation and of its complement.
inline ClassifierReport series_classifier(const AnalyticKrausFamily& f) {
  ClassifierReport r;
  if (!f.supported()) {
    r.reasons.push_back("law outside the catalog (norm '" + f.norm.name + "', rank '" + f.rank.name +
                        "'): no rule applies");
    return r;
  }
  f.validate();

  const bool coranges = f.corange_orthogonal || f.projector_multiples;
  const bool ranges = f.ranges_orthogonal || f.projector_multiples;
  const bool expo = detail::exp_series_converges(f.norm);
  const bool summable = detail::norms_summable(f.norm);
  const double n = f.rank.degree();

  // complement: sum e^{-h_i} < inf with ||sum h_i V_i^* V_i|| < inf, or H({||V_i||^2}) < inf
  std::optional<bool> comp_cond;
  if (coranges) {
    comp_cond = expo;
    r.reasons.push_back(std::string("orthogonal coranges: ||sum h_i V_i^*V_i|| = sup_i h_i ||V_i||^2, so h_i <= K/||V_i||^2 and ") +
                        (expo ? "h_i = 2 log i gives sum e^{-h_i} < inf" : "sum_i e^{-K/||V_i||^2} diverges for every K"));
  } else if (summable) {
    comp_cond = true;
    r.reasons.push_back("sum ||V_i||^2 < inf with ||V_i||^2 = c i^-" + detail::fmt(f.norm.exponent) +
                        ": H({||V_i||^2}) < inf");
  } else if (ranges && !expo) {
    comp_cond = false;
    r.reasons.push_back("||sum h_i V_i^*V_i|| >= sup_i h_i ||V_i||^2 and sum_i e^{-K/||V_i||^2} diverges for every K");
  }

  if (comp_cond == true) {
    r.complement = Verdict::ContinuousCertified;
  } else if (comp_cond == false && ranges) {
    r.complement = Verdict::NotContinuous;
    r.reasons.push_back("orthogonal ranges: the complement condition is necessary");
  }

  // operation: sum d_i e^{-h_i} < inf with ||sum h_i V_i^* V_i|| < inf
  std::optional<bool> op_cond;
  if (coranges) {
    op_cond = expo;
    if (expo)
      r.reasons.push_back("h_i = " + detail::fmt(n + 2.0) + " log i: h_i ||V_i||^2 bounded and sum d_i e^{-h_i} <= sum i^-2 < inf");
    else
      r.reasons.push_back("sum_i d_i e^{-K/||V_i||^2} diverges for every K");
  } else if (summable) {
    op_cond = true;
    r.reasons.push_back("h_i = i^g with 0 < g < " + detail::fmt(f.norm.exponent - 1.0) +
                        ": sum h_i ||V_i||^2 < inf and sum d_i e^{-h_i} < inf");
  }

  if (op_cond == true) {
    r.operation = Verdict::ContinuousCertified;
  } else if (r.complement == Verdict::ContinuousCertified && summable) {
    r.operation = Verdict::ContinuousCertified;
    r.reasons.push_back("complement continuous and sum log(d_i) ||V_i||^2 < inf");
  } else if (op_cond == false && f.projector_multiples) {
    r.operation = Verdict::NotContinuous;
    r.reasons.push_back("multiples of orthogonal projectors: the condition on the operation is necessary");
  } else if (r.complement == Verdict::NotContinuous) {
    r.operation = Verdict::NotContinuous;
    r.reasons.push_back("orthogonal ranges: the complement condition is also necessary for the operation");
  }
  return r;
}

// ---------------------------------------------------------------------------
// k-order approximator

struct ApproximatorBounds {
  double lower_bound = 0.0;
  double gap_certificate = 0.0;
  std::vector<double> block_traces;  // lambda_i^k(A)
};

namespace detail {

/// Spectral blocks P_i A of k consecutive positive eigenvalues.
inline std::vector<Matrix> spectral_blocks(const PositiveOperator& a, Eigen::Index k) {
  if (k < 1) throw Error(ErrorKind::DomainError, "k must be >= 1");
  const Spectrum& s = a.spectrum();
  const Eigen::Index r = a.rank();
  std::vector<Matrix> blocks;
  for (Eigen::Index start = 0; start < r; start += k) {
    Matrix b = Matrix::Zero(a.dim(), a.dim());
    for (Eigen::Index j = start; j < std::min(start + k, r); ++j)
      b += s.eigenvalues[j] * s.eigenvectors.col(j) * s.eigenvectors.col(j).adjoint();
    blocks.push_back(std::move(b));
  }
  return blocks;
}

}  // namespace detail

/// lower_bound <= H^k_Phi(A) <= H_Phi(A) <= lower_bound + gap_certificate.
inline ApproximatorBounds approximator(const KrausOperation& phi, const PositiveOperator& a,
                                       Eigen::Index k) {
  if (a.dim() != phi.dim_in()) throw Error(ErrorKind::DimMismatch, "approximator: input dimension mismatch");
  ApproximatorBounds out;
  for (const Matrix& b : detail::spectral_blocks(a, k)) {
    out.lower_bound += detail::matrix_entropy(detail::apply_raw(phi, b));
    out.block_traces.push_back(b.trace().real());
  }
  out.gap_certificate = classical_entropy(out.block_traces);
  return out;
}

struct HkResult {
  double value = 0.0;
  std::vector<Matrix> parts;
  int restart = 0;
};

/// Best sum_i H(Phi(A_i)) found over decompositions of A into m parts of rank <= k.
inline HkResult brute_force_hk(const KrausOperation& phi, const PositiveOperator& a, Eigen::Index k,
                               Eigen::Index m, int restarts = 20, std::uint64_t seed = 0,
                               double tol = 1e-10) {
  if (a.dim() > 4 || m > 8)
    throw Error(ErrorKind::ScaleExceeded, "hk search is limited to dim <= 4 and m <= 8");
  if (a.dim() != phi.dim_in()) throw Error(ErrorKind::DimMismatch, "hk: input dimension mismatch");
  if (k < 1 || m < 1) throw Error(ErrorKind::DomainError, "hk: k and m must be >= 1");
  if (a.rank() == 0) return {};
  if (m * k < a.rank())
    throw Error(ErrorKind::DomainError, "hk: m * k is below rank(A); no decomposition exists");
  const detail::DecompositionSearch search(detail::spectral_factor(a), m, k, phi, true);
  detail::DecompositionOptions opt;
  opt.restarts = restarts;
  opt.seed = seed;
  opt.tol = tol;
  const auto best = search.search(opt);
  return {best.value, search.parts(best.coisometry), best.restart};
}

/// sum_i pi_i H(pi_i^-1 P_i A || A) for the spectral blocks: an upper bound on Delta_k(A).
inline double delta_k_bound(const PositiveOperator& a, Eigen::Index k) {
  if (a.trace() > 1.0 + 1e-9) throw Error(ErrorKind::DomainError, "delta_k: Tr A exceeds 1");
  double total = 0.0;
  for (const Matrix& b : detail::spectral_blocks(a, k)) {
    const double p = b.trace().real();
    const ExtendedReal d = relative_entropy(validate_positive(Matrix(b / p)), a);
    total += p * d.value();  // finite: the block lives inside supp A
  }
  return total;
}

// ---------------------------------------------------------------------------
// Spectral truncation

struct TruncationResult {
  Eigen::Index k_eps = 0;
  PositiveOperator head;
  PositiveOperator tail;
  double tail_trace = 0.0;
  double tail_entropy = 0.0;
};

/// Smallest k with Tr P^k rho > 1 - eps/2 and H(rho) - H(P^k rho) < eps/3.
inline TruncationResult spectral_truncate(const PositiveOperator& rho, double eps) {
  if (!rho.is_state()) throw Error(ErrorKind::DomainError, "truncation: input is not a state");
  if (!(eps > 0.0)) throw Error(ErrorKind::DomainError, "truncation: eps must be positive");
  const Spectrum& s = rho.spectrum();
  const double h = quantum_entropy(rho);
  Matrix head = Matrix::Zero(rho.dim(), rho.dim());
  double trace = 0.0;
  for (Eigen::Index k = 1; k <= rho.dim(); ++k) {
    const double l = std::max(s.eigenvalues[k - 1], 0.0);
    head += l * s.eigenvectors.col(k - 1) * s.eigenvectors.col(k - 1).adjoint();
    trace += l;
    if (k < rho.dim() && !(trace > 1.0 - eps / 2.0 && h - detail::matrix_entropy(head) < eps / 3.0))
      continue;
    PositiveOperator tail = validate_positive(Matrix(rho.matrix() - head));
    const double tt = tail.trace();
    const double te = quantum_entropy(tail);
    return {k, validate_positive(head), std::move(tail), tt, te};
  }
  throw Error(ErrorKind::DomainError, "truncation: empty operator");
}

// ---------------------------------------------------------------------------
// Divergence center

struct DivergenceCenter {
  PositiveOperator center;
  double radius = 0.0;        // max_i H(rho_i || center)
  double lower = 0.0;         // sum_i p_i H(rho_i || center), a lower bound on the optimal radius
  std::vector<double> weights;
  int iterations = 0;
  bool converged = false;
};

/// State minimizing max_i H(rho_i || Omega), as a mixture of the inputs (Blahut-Arimoto).
inline DivergenceCenter divergence_center(const std::vector<PositiveOperator>& states, double tol = 1e-9,
                                          int max_iter = 200000) {
  if (states.empty()) throw Error(ErrorKind::EmptyInput, "divergence center: no states");
  for (const auto& s : states) {
    if (s.dim() != states.front().dim())
      throw Error(ErrorKind::DimMismatch, "divergence center: dimensions differ");
    if (!s.is_state()) throw Error(ErrorKind::DomainError, "divergence center: inputs must be states");
  }
  const std::size_t n = states.size();
  std::vector<double> p(n, 1.0 / static_cast<double>(n));
  std::vector<double> d(n);
  const Eigen::Index dim = states.front().dim();
  for (int it = 1;; ++it) {
    Matrix omega = Matrix::Zero(dim, dim);
    for (std::size_t i = 0; i < n; ++i) omega += p[i] * states[i].matrix();
    PositiveOperator center = validate_positive(omega);
    double mean = 0.0;
    double dmax = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      d[i] = relative_entropy(states[i], center).as_double();
      if (!std::isfinite(d[i])) d[i] = 700.0;  // weight underflowed; push it back up
      mean += p[i] * d[i];
      dmax = std::max(dmax, d[i]);
    }
    const bool done = dmax - mean < tol;
    if (done || it >= max_iter) return {std::move(center), dmax, mean, p, it, done};
    double z = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      p[i] *= std::exp(d[i] - dmax);
      z += p[i];
    }
    for (auto& x : p) x /= z;
  }
}

// ---------------------------------------------------------------------------
// Complementary entropy gap

struct GapBoundReport {
  double bound = 0.0;
  double max_gap = 0.0;
  int samples = 0;
  int violations = 0;
};

/// lambda* of the singular profile of sqrt(Phi^*(I)).
inline double complement_gap_bound(const KrausOperation& phi) {
  const Matrix m = detail::dual_raw(phi, Matrix::Identity(phi.dim_out(), phi.dim_out()));
  const Spectrum s = detail::hermitian_spectrum((m + m.adjoint()) / 2.0);
  std::vector<double> pi;
  for (Eigen::Index i = 0; i < s.eigenvalues.size(); ++i) pi.push_back(std::max(s.eigenvalues[i], 0.0));
  return detail::exp_sum_root(pi);
}

inline double complement_gap(const KrausOperation& phi, const PositiveOperator& a) {
  return std::abs(output_entropy(phi, a) - output_entropy(complement(phi), a));
}

/// Samples random A in T_1 (mixed ranks, including pure) and compares the gap with the bound.
inline GapBoundReport complement_gap_bound_check(const KrausOperation& phi, int samples,
                                                 std::uint64_t seed = 0) {
  GapBoundReport r;
  r.bound = complement_gap_bound(phi);
  const KrausOperation comp = complement(phi);
  const Eigen::Index d = phi.dim_in();
  for (int s = 0; s < samples; ++s) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(s)));
    std::uniform_int_distribution<Eigen::Index> rank(1, d);
    const PositiveOperator a = random_subnormalized(d, rng, 1.0, rank(rng));
    const double gap = std::abs(output_entropy(phi, a) - output_entropy(comp, a));
    r.max_gap = std::max(r.max_gap, gap);
    if (gap > r.bound + 1e-9) ++r.violations;
    ++r.samples;
  }
  return r;
}

// ---------------------------------------------------------------------------
// Truncation sweeps over analytic families

/// Block structure of the first N operators: V_i = sqrt(c_i) P_i, rank P_i = d_i.
struct TruncatedFamily {
  std::int64_t first_index = 1;
  std::vector<double> coefficients;  // c_i = ||V_i||^2
  std::vector<std::int64_t> ranks;   // d_i
  std::int64_t dim = 0;              // sum d_i
};

inline constexpr std::int64_t sweep_dim_limit = 4096;

/// Starts at the first index where the norm law is <= 1, so every operator is a contraction.
inline TruncatedFamily truncate_family(const AnalyticKrausFamily& f, std::int64_t n) {
  if (!f.supported()) throw Error(ErrorKind::DomainError, "sweep: unsupported law");
  f.validate();
  if (n < 1) throw Error(ErrorKind::DomainError, "sweep: N must be >= 1");
  TruncatedFamily t;
  t.first_index = f.norm.first_index();
  while (f.norm.value(t.first_index) > 1.0) {
    if (f.norm.kind == NormLaw::Kind::Constant || f.norm.exponent == 0.0 || t.first_index > 10000000)
      throw Error(ErrorKind::DomainError, "sweep: norm law never drops to 1");
    ++t.first_index;
  }
  for (std::int64_t i = t.first_index; i < t.first_index + n; ++i) {
    t.coefficients.push_back(f.norm.value(i));
    t.ranks.push_back(f.rank.value(i));
    t.dim += t.ranks.back();
    if (t.dim > sweep_dim_limit)
      throw Error(ErrorKind::ScaleExceeded, "sweep: total dimension exceeds " + std::to_string(sweep_dim_limit));
  }
  return t;
}

/// Dense Kraus set {sqrt(c_i) P_i} on the block space (small dimensions only).
inline KrausOperation materialize(const TruncatedFamily& t) {
  if (t.dim > 256) throw Error(ErrorKind::ScaleExceeded, "materialize: dimension above 256");
  std::vector<Matrix> ks;
  std::int64_t offset = 0;
  for (std::size_t i = 0; i < t.ranks.size(); ++i) {
    Matrix v = Matrix::Zero(t.dim, t.dim);
    for (std::int64_t j = 0; j < t.ranks[i]; ++j) v(offset + j, offset + j) = std::sqrt(t.coefficients[i]);
    offset += t.ranks[i];
    ks.push_back(std::move(v));
  }
  return KrausOperation(std::move(ks));
}

enum class InputRule { Uniform, Custom, Maximizing };

struct SweepRow {
  std::int64_t n = 0;
  std::int64_t dim = 0;
  double entropy = 0.0;  // H({Tr V_i rho V_i^dagger})
  double increment = std::numeric_limits<double>::quiet_NaN();
  double tail_trace = 0.0;    // weights with i in the second half
  double tail_entropy = 0.0;  // H of those weights
};

/// Block probabilities q_i of the input rho = (+)_i q_i I_{d_i} / d_i.
inline std::vector<double> sweep_input(const TruncatedFamily& t, InputRule rule,
                                       const std::vector<double>& custom = {}) {
  const std::size_t n = t.ranks.size();
  std::vector<double> q(n);
  switch (rule) {
    case InputRule::Uniform:
      for (std::size_t i = 0; i < n; ++i) q[i] = static_cast<double>(t.ranks[i]) / static_cast<double>(t.dim);
      break;
    case InputRule::Custom: {
      if (custom.size() < n) throw Error(ErrorKind::BadDistribution, "sweep: fewer custom weights than N");
      double total = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (!(custom[i] >= 0.0)) throw Error(ErrorKind::BadDistribution, "sweep: negative weight");
        total += custom[i];
      }
      if (!(total > 0.0)) throw Error(ErrorKind::BadDistribution, "sweep: weights sum to zero");
      for (std::size_t i = 0; i < n; ++i) q[i] = custom[i] / total;
      break;
    }
    case InputRule::Maximizing:
      q = classical_max_distribution(t.coefficients).distribution;
      break;
  }
  return q;
}

inline std::vector<SweepRow> truncation_sweep(const AnalyticKrausFamily& f, const std::vector<std::int64_t>& n_list,
                                              InputRule rule, const std::vector<double>& custom = {}) {
  if (n_list.empty()) throw Error(ErrorKind::EmptyInput, "sweep: empty N list");
  std::vector<SweepRow> rows;
  for (std::int64_t n : n_list) {
    const TruncatedFamily t = truncate_family(f, n);
    const std::vector<double> q = sweep_input(t, rule, custom);
    std::vector<double> w(q.size());
    for (std::size_t i = 0; i < q.size(); ++i) w[i] = t.coefficients[i] * q[i];
    SweepRow row;
    row.n = n;
    row.dim = t.dim;
    row.entropy = classical_entropy(w);
    const std::vector<double> tail(w.begin() + static_cast<std::ptrdiff_t>(w.size() / 2), w.end());
    for (double x : tail) row.tail_trace += x;
    row.tail_entropy = classical_entropy(tail);
    if (!rows.empty()) row.increment = row.entropy - rows.back().entropy;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace qentro
