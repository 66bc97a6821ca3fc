#pragma once

// Reference computations used only by the tests. None of them call into the
// library's entropy or spectral code.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <vector>

namespace oracle {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;

inline double eta(double x) { return x > 0.0 ? -x * std::log(x) : 0.0; }

inline double h2(double x) { return eta(x) + eta(1.0 - x); }

/// Explicit index sum: (Tr_B C)_{ab} = sum_j C_{(a,j),(b,j)}, (Tr_A C)_{jk} = sum_i C_{(i,j),(i,k)}.
inline Mat partial_trace(const Mat& c, int dA, int dB, bool keep_a) {
  if (keep_a) {
    Mat out = Mat::Zero(dA, dA);
    for (int a = 0; a < dA; ++a)
      for (int b = 0; b < dA; ++b)
        for (int j = 0; j < dB; ++j) out(a, b) += c(a * dB + j, b * dB + j);
    return out;
  }
  Mat out = Mat::Zero(dB, dB);
  for (int j = 0; j < dB; ++j)
    for (int k = 0; k < dB; ++k)
      for (int i = 0; i < dA; ++i) out(j, k) += c(i * dB + j, i * dB + k);
  return out;
}

/// Eigenvalues of a 2x2 Hermitian matrix in closed form.
inline std::pair<double, double> eig2(const Mat& m) {
  const double a = m(0, 0).real();
  const double d = m(1, 1).real();
  const double off = std::abs(m(0, 1));
  const double mid = 0.5 * (a + d);
  const double rad = std::sqrt(0.25 * (a - d) * (a - d) + off * off);
  return {mid + rad, mid - rad};
}

/// Extended entropy of a 2x2 positive matrix.
inline double entropy2(const Mat& m) {
  const auto [l1, l2] = eig2(m);
  const double a = std::max(l1, 0.0);
  const double b = std::max(l2, 0.0);
  return eta(a) + eta(b) - eta(a + b);
}

/// Entropy of a qubit state from its Bloch vector length r.
inline double bloch_entropy(double r) { return h2(0.5 * (1.0 + std::min(r, 1.0))); }

/// Wootters formula for two-qubit states, in nats.
inline double wootters_eof(const Mat& rho) {
  Mat sy(2, 2);
  sy << 0, cplx(0, -1), cplx(0, 1), 0;
  Mat yy(4, 4);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) yy.block(2 * i, 2 * j, 2, 2) = sy(i, j) * sy;
  const Mat tilde = yy * rho.conjugate() * yy;
  Eigen::ComplexEigenSolver<Mat> es(rho * tilde);
  std::vector<double> l;
  for (int i = 0; i < 4; ++i) l.push_back(std::sqrt(std::max(es.eigenvalues()[i].real(), 0.0)));
  std::sort(l.begin(), l.end(), std::greater<>());
  const double c = std::max(0.0, l[0] - l[1] - l[2] - l[3]);
  return h2(0.5 * (1.0 + std::sqrt(1.0 - c * c)));
}

/// Best Holevo quantity of the qubit depolarizing map rho -> (1-p) rho + p I/2 over
/// two pure inputs with weights 1/2, on a 2-degree grid of Bloch directions.
/// Outputs are built as matrices and their entropies taken from eig2.
inline double depolarizing_holevo_grid(double p) {
  const double pi = std::acos(-1.0);
  auto state = [](double theta, double phi) {
    Mat psi(2, 1);
    psi << std::cos(theta / 2), std::polar(std::sin(theta / 2), phi);
    return Mat(psi * psi.adjoint());
  };
  auto channel = [p](const Mat& r) { return Mat((1.0 - p) * r + p * Mat::Identity(2, 2) / 2.0); };
  double best = 0.0;
  const Mat a = channel(state(0.0, 0.0));
  for (int t = 0; t <= 90; ++t)
    for (int f = 0; f < 180; ++f) {
      const Mat b = channel(state(t * 2.0 * pi / 180.0, f * 2.0 * pi / 180.0));
      const double chi = entropy2(0.5 * (a + b)) - 0.5 * (entropy2(a) + entropy2(b));
      best = std::max(best, chi);
    }
  return best;
}

/// H(A || B) for positive matrices via eigen-decompositions, assuming supp A in supp B.
inline double relative_entropy(const Mat& a, const Mat& b) {
  Eigen::SelfAdjointEigenSolver<Mat> ea(a), eb(b);
  auto logm = [](const Eigen::SelfAdjointEigenSolver<Mat>& e) {
    Eigen::VectorXd l = e.eigenvalues();
    for (int i = 0; i < l.size(); ++i) l[i] = l[i] > 1e-300 ? std::log(l[i]) : 0.0;
    return Mat(e.eigenvectors() * l.cast<cplx>().asDiagonal() * e.eigenvectors().adjoint());
  };
  return (a * (logm(ea) - logm(eb))).trace().real() + b.trace().real() - a.trace().real();
}

/// min over the simplex grid (step 1/n) of max_i H(rho_i || sum_j w_j rho_j), for three states.
inline double divergence_radius_grid3(const std::vector<Mat>& s, int n) {
  double best = 1e300;
  for (int i = 1; i < n; ++i)
    for (int j = 1; i + j < n; ++j) {
      const double wi = double(i) / n, wj = double(j) / n, wk = 1.0 - wi - wj;
      const Mat c = wi * s[0] + wj * s[1] + wk * s[2];
      double r = 0.0;
      for (const auto& x : s) r = std::max(r, relative_entropy(x, c));
      best = std::min(best, r);
    }
  return best;
}

/// max over a simplex grid (step 1/n, two or three coordinates) of sum eta(pi_i x_i) - eta(sum pi_i x_i).
inline double classical_max_grid(const std::vector<double>& pi, int n) {
  auto h = [&](const std::vector<double>& x) {
    double s = 0.0, t = 0.0;
    for (std::size_t i = 0; i < pi.size(); ++i) {
      s += eta(pi[i] * x[i]);
      t += pi[i] * x[i];
    }
    return s - eta(t);
  };
  double best = 0.0;
  if (pi.size() == 2) {
    for (int i = 0; i <= n; ++i) best = std::max(best, h({double(i) / n, 1.0 - double(i) / n}));
  } else {
    for (int i = 0; i <= n; ++i)
      for (int j = 0; i + j <= n; ++j) best = std::max(best, h({double(i) / n, double(j) / n, 1.0 - double(i + j) / n}));
  }
  return best;
}

}  // namespace oracle
