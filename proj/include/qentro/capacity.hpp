#pragma once

// Holevo quantity and constrained capacity over finite ensembles, and
// entanglement of formation over finite pure-state decompositions.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "qentro/channel.hpp"
#include "qentro/detail/decomposition.hpp"
#include "qentro/entropy.hpp"
#include "qentro/operator_core.hpp"
#include "qentro/random.hpp"

namespace qentro {

class Ensemble {
 public:
  Ensemble(std::vector<double> weights, std::vector<PositiveOperator> states)
      : weights_(std::move(weights)), states_(std::move(states)) {
    if (states_.empty()) throw Error(ErrorKind::EmptyInput, "ensemble: no parts");
    if (weights_.size() != states_.size())
      throw Error(ErrorKind::DimMismatch, "ensemble: weight count differs from state count");
    double total = 0.0;
    for (double w : weights_) {
      if (!(w >= 0.0)) throw Error(ErrorKind::BadDistribution, "ensemble: negative weight");
      total += w;
    }
    if (std::abs(total - 1.0) > 1e-10)
      throw Error(ErrorKind::BadDistribution, "ensemble: weights sum to " + std::to_string(total));
    for (const auto& s : states_) {
      if (s.dim() != states_.front().dim()) throw Error(ErrorKind::DimMismatch, "ensemble: dimensions differ");
      if (!s.is_state()) throw Error(ErrorKind::DomainError, "ensemble: part is not a state");
    }
  }

  std::size_t size() const { return states_.size(); }
  Eigen::Index dim() const { return states_.front().dim(); }
  const std::vector<double>& weights() const { return weights_; }
  const std::vector<PositiveOperator>& states() const { return states_; }

  PositiveOperator barycenter() const {
    Matrix m = Matrix::Zero(dim(), dim());
    for (std::size_t i = 0; i < size(); ++i) m += weights_[i] * states_[i].matrix();
    return validate_positive(m);
  }

 private:
  std::vector<double> weights_;
  std::vector<PositiveOperator> states_;
};

/// sum_i p_i H(Phi(rho_i) || Phi(rho_bar)).
inline double holevo_quantity(const KrausOperation& phi, const Ensemble& ens) {
  if (ens.dim() != phi.dim_in()) throw Error(ErrorKind::DimMismatch, "holevo: input dimension mismatch");
  const PositiveOperator bar = apply(phi, ens.barycenter());
  double chi = 0.0;
  for (std::size_t i = 0; i < ens.size(); ++i) {
    if (ens.weights()[i] <= 0.0) continue;
    chi += ens.weights()[i] * relative_entropy(apply(phi, ens.states()[i]), bar).value();
  }
  return chi;
}

struct ConstraintSet {
  enum class Kind { Unconstrained, MeanObservable, FixedBarycenter };
  Kind kind = Kind::Unconstrained;
  std::optional<HermitianOperator> observable;  // MeanObservable: Tr H rho_bar <= bound
  double bound = 0.0;
  std::optional<PositiveOperator> barycenter;  // FixedBarycenter

  static ConstraintSet unconstrained() { return {}; }
  static ConstraintSet mean_observable(HermitianOperator h, double bound) {
    ConstraintSet c;
    c.kind = Kind::MeanObservable;
    c.observable = std::move(h);
    c.bound = bound;
    return c;
  }
  static ConstraintSet fixed_barycenter(PositiveOperator rho) {
    ConstraintSet c;
    c.kind = Kind::FixedBarycenter;
    c.barycenter = std::move(rho);
    return c;
  }
};

struct OptimizerOptions {
  int m = 0;  // 0 selects the default size
  int restarts = 20;
  double tol = 1e-10;
  std::uint64_t seed = 0;
  int max_iter = 5000;
};

struct CapacityResult {
  double value = 0.0;  // a lower bound on the constrained capacity
  Ensemble ensemble;
  int restart = 0;
};

namespace detail {

/// ln C with eigenvalues floored at 1e-13 Tr C.
inline Matrix log_floor(const Matrix& c) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(c);
  const RealVector& ev = solver.eigenvalues();
  double tr = 0.0;
  for (Eigen::Index i = 0; i < ev.size(); ++i) tr += std::max(ev[i], 0.0);
  const double floor = 1e-13 * std::max(tr, 1e-300);
  RealVector l(ev.size());
  for (Eigen::Index i = 0; i < ev.size(); ++i) l[i] = std::log(std::max(ev[i], floor));
  const Matrix& u = solver.eigenvectors();
  return u * l.cast<cplx>().asDiagonal() * u.adjoint();
}

/// Pure-state ensemble search state: weights p, unit vectors psi.
class HolevoSearch {
 public:
  HolevoSearch(const KrausOperation& phi, const ConstraintSet& c) : phi_(phi), c_(c) {}

  struct Point {
    std::vector<double> p;
    std::vector<Vector> psi;
  };

  struct Eval {
    double chi = 0.0;
    std::vector<double> d;  // H(Phi(rho_i) || Phi(rho_bar))
    std::vector<Matrix> g;  // Phi^*(ln Phi(rho_i) - ln Phi(rho_bar))
  };

  Eval evaluate(const Point& x, bool with_gradient) const {
    const Eigen::Index dout = phi_.dim_out();
    std::vector<Matrix> outs;
    Matrix bar = Matrix::Zero(dout, dout);
    for (std::size_t i = 0; i < x.psi.size(); ++i) {
      outs.push_back(apply_raw(phi_, x.psi[i] * x.psi[i].adjoint()));
      bar += x.p[i] * outs.back();
    }
    const Matrix log_bar = log_floor(bar);
    Eval e;
    for (std::size_t i = 0; i < outs.size(); ++i) {
      const Matrix diff = log_floor(outs[i]) - log_bar;
      // Tr rho (ln rho - ln bar) + Tr bar - Tr rho; the trace terms cancel in the weighted sum
      const double di = std::max(0.0, (outs[i] * diff).trace().real());
      e.d.push_back(di);
      e.chi += x.p[i] * di;
      if (with_gradient) e.g.push_back(dual_raw(phi_, diff));
    }
    return e;
  }

  double energy(const Vector& psi) const {
    return (psi.adjoint() * c_.observable->matrix() * psi)(0, 0).real();
  }

  /// Arimoto update p_i ~ p_i exp(D_i - mu E_i), with mu >= 0 the smallest multiplier that
  /// keeps the mean energy within the bound.
  void update_weights(Point& x, const std::vector<double>& d) const {
    const std::size_t n = x.p.size();
    const double dmax = *std::max_element(d.begin(), d.end());
    std::vector<double> base(n);
    for (std::size_t i = 0; i < n; ++i) base[i] = x.p[i] * std::exp(d[i] - dmax);
    if (c_.kind != ConstraintSet::Kind::MeanObservable) {
      normalize(base);
      x.p = base;
      return;
    }
    std::vector<double> e(n);
    for (std::size_t i = 0; i < n; ++i) e[i] = energy(x.psi[i]);
    const double emin = *std::min_element(e.begin(), e.end());
    auto tilt = [&](double mu) {
      std::vector<double> q(n);
      for (std::size_t i = 0; i < n; ++i) q[i] = base[i] * std::exp(-mu * (e[i] - emin));
      normalize(q);
      return q;
    };
    auto mean = [&](const std::vector<double>& q) {
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) s += q[i] * e[i];
      return s;
    };
    std::vector<double> q = tilt(0.0);
    if (mean(q) > c_.bound) {
      double lo = 0.0;
      double hi = 1.0;
      while (mean(tilt(hi)) > c_.bound && hi < 1e12) hi *= 2.0;
      for (int it = 0; it < 100; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mean(tilt(mid)) > c_.bound)
          lo = mid;
        else
          hi = mid;
      }
      q = tilt(hi);
    }
    x.p = q;
    project(x);
  }

  /// Moves weight onto the lowest-energy state until the mean energy meets the bound.
  /// Returns false when no reweighting can.
  bool project(Point& x) const {
    if (c_.kind != ConstraintSet::Kind::MeanObservable) return true;
    const std::size_t n = x.p.size();
    std::vector<double> e(n);
    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      e[i] = energy(x.psi[i]);
      mean += x.p[i] * e[i];
    }
    if (mean <= c_.bound) return true;
    const auto j = static_cast<std::size_t>(std::min_element(e.begin(), e.end()) - e.begin());
    if (e[j] > c_.bound) return false;
    const double s = std::min(1.0, (mean - c_.bound) / (mean - e[j]) * (1.0 + 1e-12));
    for (auto& w : x.p) w *= 1.0 - s;
    x.p[j] += s;
    return true;
  }

  /// Alternating weight updates and projected state ascent from x; returns chi.
  double optimize(Point& x, double tol, int max_iter) const {
    Eval e = evaluate(x, true);
    double step = 0.5;
    int quiet = 0;
    for (int it = 0; it < max_iter; ++it) {
      const double before = e.chi;
      update_weights(x, e.d);
      e = evaluate(x, true);

      const double mu = multiplier(x, e);
      std::vector<Vector> dir(x.psi.size());
      double dn2 = 0.0;
      for (std::size_t i = 0; i < x.psi.size(); ++i) {
        Matrix g = e.g[i];
        if (mu > 0.0) g -= mu * c_.observable->matrix();
        Vector gv = x.p[i] * (g * x.psi[i]);
        gv -= x.psi[i] * (x.psi[i].adjoint() * gv)(0, 0);
        dir[i] = gv;
        dn2 += gv.squaredNorm();
      }
      if (dn2 > 1e-26) {
        for (int tries = 0; tries < 30; ++tries) {
          Point y = x;
          for (std::size_t i = 0; i < y.psi.size(); ++i) {
            y.psi[i] += step * dir[i];
            y.psi[i].normalize();
          }
          if (project(y)) {
            Eval ey = evaluate(y, true);
            if (ey.chi > e.chi) {
              x = std::move(y);
              e = std::move(ey);
              step = std::min(step * 2.0, 1e3);
              break;
            }
          }
          step *= 0.5;
        }
      }
      const double gain = e.chi - before;
      quiet = (std::abs(gain) < tol && kkt_gap(x, e) < std::max(tol, 1e-9)) ? quiet + 1 : 0;
      if (quiet >= 3) break;
    }
    return e.chi;
  }

 private:
  static void normalize(std::vector<double>& q) {
    double z = 0.0;
    for (double w : q) z += w;
    for (auto& w : q) w /= z;
  }

  // max_i (D_i - mu E_i) - sum_i p_i (D_i - mu E_i); zero at a stationary ensemble
  double kkt_gap(const Point& x, const Eval& e) const {
    const double mu = multiplier(x, e);
    double top = -std::numeric_limits<double>::infinity();
    double avg = 0.0;
    for (std::size_t i = 0; i < x.p.size(); ++i) {
      const double l = e.d[i] - (mu > 0.0 ? mu * energy(x.psi[i]) : 0.0);
      top = std::max(top, l);
      avg += x.p[i] * l;
    }
    return top - avg;
  }

  // Multiplier of the energy constraint implied by the current weights:
  // the slope of D_i against E_i over the weighted states, clipped at 0.
  double multiplier(const Point& x, const Eval& e) const {
    if (c_.kind != ConstraintSet::Kind::MeanObservable) return 0.0;
    double mean_e = 0.0;
    double mean_d = 0.0;
    for (std::size_t i = 0; i < x.p.size(); ++i) {
      mean_e += x.p[i] * energy(x.psi[i]);
      mean_d += x.p[i] * e.d[i];
    }
    if (mean_e < c_.bound - 1e-9) return 0.0;
    double cov = 0.0;
    double var = 0.0;
    for (std::size_t i = 0; i < x.p.size(); ++i) {
      const double de = energy(x.psi[i]) - mean_e;
      cov += x.p[i] * de * (e.d[i] - mean_d);
      var += x.p[i] * de * de;
    }
    return var > 1e-14 ? std::max(0.0, cov / var) : 0.0;
  }

  const KrausOperation& phi_;
  const ConstraintSet& c_;
};

}  // namespace detail

/// Best Holevo quantity found over ensembles of at most m pure states meeting the constraint.
inline CapacityResult holevo_capacity(const KrausOperation& phi, const ConstraintSet& constraint,
                                      const OptimizerOptions& opt = {}) {
  const Eigen::Index d = phi.dim_in();
  if (d > 4) throw Error(ErrorKind::ScaleExceeded, "holevo capacity is limited to input dimension <= 4");
  const int m = opt.m > 0 ? opt.m : static_cast<int>(d * d);

  if (constraint.kind == ConstraintSet::Kind::FixedBarycenter) {
    if (!phi.is_channel())
      throw Error(ErrorKind::DomainError, "fixed-barycenter capacity requires a channel");
    const PositiveOperator& rho = *constraint.barycenter;
    if (rho.dim() != d) throw Error(ErrorKind::DimMismatch, "barycenter dimension mismatch");
    if (!rho.is_state()) throw Error(ErrorKind::DomainError, "barycenter must be a state");
    const Eigen::Index parts = std::max<Eigen::Index>(m, rho.rank());
    const detail::DecompositionSearch search(detail::spectral_factor(rho), parts, 1, phi, false);
    detail::DecompositionOptions dopt;
    dopt.restarts = opt.restarts;
    dopt.seed = opt.seed;
    dopt.tol = opt.tol;
    const auto best = search.search(dopt);
    std::vector<double> w;
    std::vector<PositiveOperator> states;
    for (const Matrix& b : search.parts(best.coisometry)) {
      const double t = b.trace().real();
      if (t <= 1e-15) continue;
      w.push_back(t);
      states.push_back(validate_positive(Matrix(b / t)));
    }
    double total = 0.0;
    for (double x : w) total += x;
    for (auto& x : w) x /= total;
    return {output_entropy(phi, rho) - best.value, Ensemble(std::move(w), std::move(states)), best.restart};
  }

  std::optional<Vector> ground;
  if (constraint.kind == ConstraintSet::Kind::MeanObservable) {
    const HermitianOperator& h = *constraint.observable;
    if (h.dim() != d) throw Error(ErrorKind::DimMismatch, "observable dimension mismatch");
    const Spectrum s = spectrum(h);
    const double emin = s.eigenvalues[d - 1];
    if (constraint.bound < emin - 1e-12)
      throw Error(ErrorKind::InfeasibleConstraint,
                  "bound " + std::to_string(constraint.bound) + " is below the least eigenvalue " +
                      std::to_string(emin));
    ground = s.eigenvectors.col(d - 1);
  }

  const detail::HolevoSearch search(phi, constraint);
  double best = -1.0;
  detail::HolevoSearch::Point best_point;
  int best_restart = 0;
  for (int r = 0; r < std::max(opt.restarts, 1); ++r) {
    Rng rng(derive_seed(opt.seed, static_cast<std::uint64_t>(r)));
    detail::HolevoSearch::Point x;
    x.p.assign(static_cast<std::size_t>(m), 1.0 / m);
    for (int i = 0; i < m; ++i) x.psi.push_back(random_unit_vector(d, rng));
    if (ground) x.psi[0] = *ground;
    if (!search.project(x)) continue;
    const double chi = search.optimize(x, opt.tol, opt.max_iter);
    if (chi > best) {
      best = chi;
      best_point = x;
      best_restart = r;
    }
  }
  std::vector<PositiveOperator> states;
  for (const auto& v : best_point.psi) states.push_back(projector(v));
  std::vector<double> w = best_point.p;
  double total = 0.0;
  for (double x : w) total += x;
  for (auto& x : w) x /= total;
  return {std::max(best, 0.0), Ensemble(std::move(w), std::move(states)), best_restart};
}

struct EnsembleReport {
  double value = 0.0;
  std::vector<double> divergences;  // H(Phi(rho_i) || Phi(rho_bar))
  std::vector<std::size_t> flagged;  // parts with weight > 1e-6 whose divergence differs from value
  bool optimal() const { return flagged.empty(); }
};

/// Checks the equal-divergence property of an optimal ensemble.
inline EnsembleReport optimal_ensemble_report(const KrausOperation& phi, const Ensemble& ens,
                                              double tol = 1e-4) {
  EnsembleReport r;
  r.value = holevo_quantity(phi, ens);
  const PositiveOperator bar = apply(phi, ens.barycenter());
  for (std::size_t i = 0; i < ens.size(); ++i) {
    const double d = relative_entropy(apply(phi, ens.states()[i]), bar).as_double();
    r.divergences.push_back(d);
    if (ens.weights()[i] > 1e-6 && std::abs(d - r.value) > tol) r.flagged.push_back(i);
  }
  return r;
}

// ---------------------------------------------------------------------------
// Entanglement of formation

struct EofResult {
  double value = 0.0;  // an upper bound on E_F
  std::vector<double> weights;
  std::vector<Vector> states;
  int restart = 0;
};

/// Least average marginal entropy found over pure decompositions of omega on A (x) B.
inline EofResult eof(const PositiveOperator& omega, Eigen::Index dA, Eigen::Index dB,
                     const OptimizerOptions& opt = {}) {
  if (dA * dB > 16) throw Error(ErrorKind::ScaleExceeded, "eof is limited to dA * dB <= 16");
  if (omega.dim() != dA * dB) throw Error(ErrorKind::DimMismatch, "eof: state dimension is not dA * dB");
  if (!omega.is_state()) throw Error(ErrorKind::DomainError, "eof: input is not a state");
  const Eigen::Index r = omega.rank();
  const Eigen::Index m = opt.m > 0 ? std::max<Eigen::Index>(opt.m, r) : r * r;
  const detail::DecompositionSearch search(detail::spectral_factor(omega), m, 1,
                                           partial_trace_channel(dA, dB, Keep::A), false);
  detail::DecompositionOptions dopt;
  dopt.restarts = opt.restarts;
  dopt.seed = opt.seed;
  dopt.tol = opt.tol;
  dopt.max_iter = opt.max_iter;
  const auto best = search.search(dopt);
  EofResult out;
  out.value = std::max(best.value, 0.0);
  out.restart = best.restart;
  const Matrix y = detail::spectral_factor(omega) * best.coisometry;  // column i is sqrt(p_i) psi_i
  for (Eigen::Index i = 0; i < y.cols(); ++i) {
    const double p = y.col(i).squaredNorm();
    if (p <= 1e-15) continue;
    out.weights.push_back(p);
    out.states.push_back(y.col(i) / std::sqrt(p));
  }
  return out;
}

struct LocalOperationProbe {
  double before = 0.0;
  double after = 0.0;
  double trace = 0.0;  // Tr (Phi (x) Psi)(omega) before renormalization
};

inline LocalOperationProbe eof_local_operation_probe(const PositiveOperator& omega, Eigen::Index dA,
                                                     Eigen::Index dB, const KrausOperation& phiA,
                                                     const KrausOperation& psiB,
                                                     const OptimizerOptions& opt = {}) {
  if (phiA.dim_in() != dA || psiB.dim_in() != dB)
    throw Error(ErrorKind::DimMismatch, "local operations do not match the subsystem dimensions");
  const Matrix out = detail::apply_raw(tensor_op(phiA, psiB), omega.matrix());
  const double t = out.trace().real();
  if (!(t > 1e-9)) throw Error(ErrorKind::VanishingOutput, "local operation output has trace " + std::to_string(t));
  LocalOperationProbe p;
  p.trace = t;
  p.before = eof(omega, dA, dB, opt).value;
  p.after = eof(validate_positive(Matrix(out / t)), phiA.dim_out(), psiB.dim_out(), opt).value;
  return p;
}

}  // namespace qentro
