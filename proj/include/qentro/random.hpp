#pragma once

// Seeded generators for random states, unitaries and operations.

#include <cstdint>
#include <random>
#include <vector>

#include "qentro/channel.hpp"
#include "qentro/operator_core.hpp"

namespace qentro {

using Rng = std::mt19937_64;

/// splitmix64 mix of (seed, stream); used to derive one generator per restart.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

inline Matrix ginibre(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Matrix g(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) {
      const double re = n(rng);
      const double im = n(rng);
      g(i, j) = cplx(re, im);
    }
  return g;
}

/// rows x cols matrix with orthonormal columns (rows >= cols), Haar distributed.
inline Matrix random_isometry(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  const Matrix g = ginibre(rows, cols, rng);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ() * Matrix::Identity(rows, cols);
  const Matrix r = qr.matrixQR();
  for (Eigen::Index j = 0; j < cols; ++j) {
    const cplx d = r(j, j);
    const double a = std::abs(d);
    if (a > 0.0) q.col(j) *= d / a;
  }
  return q;
}

inline Matrix random_unitary(Eigen::Index d, Rng& rng) { return random_isometry(d, d, rng); }

inline Vector random_unit_vector(Eigen::Index d, Rng& rng) {
  Vector v = ginibre(d, 1, rng).col(0);
  return v / v.norm();
}

inline PositiveOperator random_pure_state(Eigen::Index d, Rng& rng) {
  return projector(random_unit_vector(d, rng));
}

/// Induced-measure random state of the given rank (rank <= 0 means full rank).
inline PositiveOperator random_state(Eigen::Index d, Rng& rng, Eigen::Index rank = 0) {
  if (rank <= 0 || rank > d) rank = d;
  const Matrix g = ginibre(d, rank, rng);
  Matrix rho = g * g.adjoint();
  rho /= rho.trace().real();
  return validate_positive(rho);
}

/// Random positive operator with trace drawn uniformly from (0, max_trace].
inline PositiveOperator random_subnormalized(Eigen::Index d, Rng& rng, double max_trace = 1.0,
                                             Eigen::Index rank = 0) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double t = max_trace * (1.0 - u(rng));
  return validate_positive(Matrix(t * random_state(d, rng, rank).matrix()));
}

/// Random channel with `n_kraus` Kraus operators, from a Haar isometry into out (x) env.
inline KrausOperation random_channel(Eigen::Index d_in, Eigen::Index d_out, Eigen::Index n_kraus,
                                     Rng& rng) {
  const Matrix v = random_isometry(d_out * n_kraus, d_in, rng);
  std::vector<Matrix> ks;
  for (Eigen::Index i = 0; i < n_kraus; ++i) ks.push_back(v.block(i * d_out, 0, d_out, d_in));
  return KrausOperation(std::move(ks));
}

/// Random trace non-increasing operation: a random channel precomposed with a
/// random contraction sqrt(D), 0 <= D <= I.
inline KrausOperation random_operation(Eigen::Index d_in, Eigen::Index d_out,
                                       Eigen::Index n_kraus, Rng& rng) {
  const KrausOperation ch = random_channel(d_in, d_out, n_kraus, rng);
  const Matrix u = random_unitary(d_in, rng);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  RealVector s(d_in);
  for (Eigen::Index i = 0; i < d_in; ++i) s[i] = std::sqrt(unif(rng));
  const Matrix contraction = u * s.cast<cplx>().asDiagonal() * u.adjoint();
  std::vector<Matrix> ks;
  for (const auto& k : ch.kraus()) ks.push_back(k * contraction);
  return KrausOperation(std::move(ks));
}

/// Random probability vector (flat Dirichlet).
inline std::vector<double> random_distribution(std::size_t n, Rng& rng) {
  std::exponential_distribution<double> e(1.0);
  std::vector<double> w(n);
  double total = 0.0;
  for (auto& x : w) {
    x = e(rng);
    total += x;
  }
  for (auto& x : w) x /= total;
  return w;
}

}  // namespace qentro
