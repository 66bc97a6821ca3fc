#pragma once

// Local search over finite decompositions A = sum_i B_i with rank(B_i) <= k.
//
// Write A = Y Y^dagger with Y = [sqrt(l_j) v_j] (d x r). Every decomposition
// into m parts of rank <= k is B_i = Y Z_i Z_i^dagger Y^dagger for a
// co-isometry Z = [Z_1 ... Z_m] (r x mk, Z Z^dagger = I), and conversely.
// The objective sum_i H(Phi(B_i)) is optimized over Z by Riemannian gradient
// steps with a polar retraction.

#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "qentro/channel.hpp"
#include "qentro/entropy.hpp"
#include "qentro/operator_core.hpp"
#include "qentro/random.hpp"

namespace qentro::detail {

/// Y with A = Y Y^dagger, one column per eigenvalue above tol_psd (non-increasing).
inline Matrix spectral_factor(const PositiveOperator& a) {
  const Spectrum& s = a.spectrum();
  const Eigen::Index r = a.rank();
  Matrix y(a.dim(), r);
  for (Eigen::Index j = 0; j < r; ++j) y.col(j) = std::sqrt(s.eigenvalues[j]) * s.eigenvectors.col(j);
  return y;
}

/// (W W^dagger)^{-1/2} W
inline Matrix polar_coisometry(const Matrix& w) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(w * w.adjoint());
  RealVector inv(solver.eigenvalues().size());
  for (Eigen::Index i = 0; i < inv.size(); ++i)
    inv[i] = 1.0 / std::sqrt(std::max(solver.eigenvalues()[i], 1e-300));
  const Matrix& u = solver.eigenvectors();
  return u * inv.cast<cplx>().asDiagonal() * u.adjoint() * w;
}

struct DecompositionOptions {
  int restarts = 20;
  double tol = 1e-10;
  std::uint64_t seed = 0;
  int max_iter = 4000;
  bool spectral_start = true;  // restart 0 starts from the spectral blocks
};

struct DecompositionResult {
  double value = 0.0;
  Matrix coisometry;
  int restart = 0;
};

class DecompositionSearch {
 public:
  DecompositionSearch(Matrix factor, Eigen::Index parts, Eigen::Index part_rank,
                      const KrausOperation& phi, bool maximize)
      : y_(std::move(factor)), m_(parts), k_(part_rank), maximize_(maximize) {
    if (y_.cols() > m_ * k_)
      throw Error(ErrorKind::DomainError, "decomposition: parts * rank below rank of the operator");
    if (phi.dim_in() != y_.rows())
      throw Error(ErrorKind::DimMismatch, "decomposition: operation input dimension mismatch");
    for (const auto& v : phi.kraus()) x_.push_back(v * y_);
  }

  Eigen::Index rank() const { return y_.cols(); }

  /// Parts B_i for a given co-isometry.
  std::vector<Matrix> parts(const Matrix& z) const {
    std::vector<Matrix> out;
    for (Eigen::Index i = 0; i < m_; ++i) {
      const Matrix yz = y_ * z.middleCols(i * k_, k_);
      out.push_back(yz * yz.adjoint());
    }
    return out;
  }

  double value(const Matrix& z) const {
    double f = 0.0;
    for (Eigen::Index i = 0; i < m_; ++i) f += matrix_entropy(output(z.middleCols(i * k_, k_)));
    return f;
  }

  Matrix spectral_start() const {
    const Eigen::Index r = rank();
    Matrix z = Matrix::Zero(r, m_ * k_);
    for (Eigen::Index j = 0; j < r; ++j) z(j, j) = 1.0;  // block i holds eigenvectors ik..ik+k-1
    return z;
  }

  Matrix random_start(Rng& rng) const { return random_isometry(m_ * k_, rank(), rng).adjoint(); }

  /// Local ascent (or descent) from z; returns the final value and updates z.
  double optimize(Matrix& z, double tol, int max_iter) const {
    const double sign = maximize_ ? 1.0 : -1.0;
    double f = value(z);
    double step = 0.5;
    int quiet = 0;
    Matrix grad(z.rows(), z.cols());
    for (int it = 0; it < max_iter; ++it) {
      gradient(z, grad);
      Matrix d = sign * grad;
      d -= 0.5 * (d * z.adjoint() + z * d.adjoint()) * z;
      const double dn2 = d.squaredNorm();
      if (dn2 < 1e-24) break;
      bool accepted = false;
      for (int tries = 0; tries < 40; ++tries) {
        Matrix zn = polar_coisometry(z + step * d);
        const double fn = value(zn);
        if (sign * (fn - f) >= 1e-4 * step * dn2) {
          const double gain = sign * (fn - f);
          z = std::move(zn);
          f = fn;
          accepted = true;
          step = std::min(step * 2.0, 1e3);
          quiet = gain < tol ? quiet + 1 : 0;
          break;
        }
        step *= 0.5;
      }
      if (!accepted || quiet >= 5) break;
    }
    return f;
  }

  DecompositionResult search(const DecompositionOptions& opt) const {
    DecompositionResult best;
    best.value = maximize_ ? -std::numeric_limits<double>::infinity()
                           : std::numeric_limits<double>::infinity();
    for (int r = 0; r < std::max(opt.restarts, 1); ++r) {
      Matrix z;
      if (r == 0 && opt.spectral_start) {
        z = spectral_start();
      } else {
        Rng rng(derive_seed(opt.seed, static_cast<std::uint64_t>(r)));
        z = random_start(rng);
      }
      const double f = optimize(z, opt.tol, opt.max_iter);
      // strict comparison keeps the lowest restart index on ties
      if (maximize_ ? f > best.value : f < best.value) {
        best.value = f;
        best.coisometry = z;
        best.restart = r;
      }
    }
    return best;
  }

 private:
  Matrix output(const Matrix& zi) const {
    Matrix c = Matrix::Zero(x_.front().rows(), x_.front().rows());
    for (const auto& x : x_) {
      const Matrix xz = x * zi;
      c += xz * xz.adjoint();
    }
    return c;
  }

  void gradient(const Matrix& z, Matrix& grad) const {
    for (Eigen::Index i = 0; i < m_; ++i) {
      const auto zi = z.middleCols(i * k_, k_);
      const Matrix c = output(zi);
      Matrix g = Matrix::Zero(z.rows(), z.rows());
      if (c.trace().real() > 1e-300) {
        const Matrix dh = entropy_gradient(c);
        for (const auto& x : x_) g += x.adjoint() * dh * x;
      }
      grad.middleCols(i * k_, k_) = 2.0 * g * zi;
    }
  }

  Matrix y_;
  Eigen::Index m_;
  Eigen::Index k_;
  bool maximize_;
  std::vector<Matrix> x_;  // V_l Y
};

}  // namespace qentro::detail
