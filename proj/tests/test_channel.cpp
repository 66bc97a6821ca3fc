#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "qentro/channel.hpp"
#include "qentro/entropy.hpp"
#include "qentro/random.hpp"

using namespace qentro;

namespace {

Matrix pauli(char c) {
  Matrix m = Matrix::Zero(2, 2);
  if (c == 'x') m << 0, 1, 1, 0;
  if (c == 'y') m << 0, cplx(0, -1), cplx(0, 1), 0;
  if (c == 'z') m << 1, 0, 0, -1;
  if (c == 'i') m = Matrix::Identity(2, 2);
  return m;
}

// sum_i V_i A V_i^dagger written out with explicit loops
Matrix apply_by_hand(const std::vector<Matrix>& ks, const Matrix& a) {
  Matrix out = Matrix::Zero(ks.front().rows(), ks.front().rows());
  for (const auto& k : ks)
    for (Eigen::Index r = 0; r < k.rows(); ++r)
      for (Eigen::Index c = 0; c < k.rows(); ++c)
        for (Eigen::Index x = 0; x < a.rows(); ++x)
          for (Eigen::Index y = 0; y < a.cols(); ++y) out(r, c) += k(r, x) * a(x, y) * std::conj(k(c, y));
  return out;
}

}  // namespace

TEST(KrausOperation, ConstructionChecks) {
  EXPECT_THROW(KrausOperation({}), Error);
  try {
    KrausOperation({Matrix::Identity(2, 2), Matrix::Identity(3, 3)});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::DimMismatch);
  }
  try {
    KrausOperation({Matrix(Matrix::Identity(2, 2) * 1.1)});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NotContraction);
  }
  const KrausOperation half({Matrix(Matrix::Identity(2, 2) * 0.5)});
  EXPECT_FALSE(half.is_channel());
  EXPECT_NEAR(half.defect()(0, 0).real(), 0.75, 1e-15);
  EXPECT_TRUE(dephasing_channel(0.3).is_channel());
}

TEST(Apply, IdentityAndDephasing) {
  Rng rng(1);
  const auto rho = random_state(3, rng);
  EXPECT_LE(max_abs_entry(apply(identity_channel(3), rho).matrix() - rho.matrix()), 1e-15);
  Vector plus(2);
  plus << 1.0, 1.0;
  const auto out = apply(dephasing_channel(0.5), projector(plus / std::sqrt(2.0)));
  EXPECT_LE(max_abs_entry(out.matrix() - Matrix::Identity(2, 2) / 2.0), 1e-15);
}

TEST(Apply, MatchesExplicitSumAndPreservesTrace) {
  for (int s = 0; s < 30; ++s) {
    Rng rng(derive_seed(2, s));
    const auto phi = random_channel(3, 2, 2 + s % 3, rng);
    const auto a = random_subnormalized(3, rng, 2.0);
    const auto out = apply(phi, a);
    EXPECT_LE(max_abs_entry(out.matrix() - apply_by_hand(phi.kraus(), a.matrix())), 1e-12);
    EXPECT_NEAR(out.trace(), a.trace(), 1e-12);
  }
}

TEST(Apply, RejectsWrongDimension) {
  try {
    apply(identity_channel(3), maximally_mixed(2));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::DimMismatch);
  }
}

TEST(Dual, TracePairing) {
  for (int s = 0; s < 30; ++s) {
    Rng rng(derive_seed(3, s));
    const auto phi = random_operation(3, 4, 1 + s % 3, rng);
    const Matrix a = ginibre(3, 3, rng);
    const Matrix b = ginibre(4, 4, rng);
    const cplx lhs = (b * detail::apply_raw(phi, a)).trace();
    const cplx rhs = (dual(phi)(b) * a).trace();
    EXPECT_LE(std::abs(lhs - rhs), 1e-10);
  }
}

TEST(Dual, UnitalForChannels) {
  Rng rng(4);
  const auto phi = random_channel(3, 2, 3, rng);
  EXPECT_LE(max_abs_entry(dual(phi)(Matrix(Matrix::Identity(2, 2))) - Matrix::Identity(3, 3)), 1e-12);
}

TEST(Stinespring, MarginalsGiveChannelAndComplement) {
  for (int s = 0; s < 20; ++s) {
    Rng rng(derive_seed(5, s));
    const auto phi = random_operation(2, 3, 2 + s % 3, rng);
    const auto st = stinespring(phi);
    const auto a = random_state(2, rng);
    const Matrix big = st.isometry * a.matrix() * st.isometry.adjoint();
    const Matrix out_b = oracle::partial_trace(big, int(st.dim_out), int(st.dim_env), true);
    const Matrix out_e = oracle::partial_trace(big, int(st.dim_out), int(st.dim_env), false);
    EXPECT_LE(max_abs_entry(out_b - apply(phi, a).matrix()), 1e-12);
    EXPECT_LE(max_abs_entry(out_e - apply(complement(phi), a).matrix()), 1e-12);
    const Matrix gram = st.isometry.adjoint() * st.isometry;
    EXPECT_LE(max_abs_entry(gram + phi.defect() - Matrix::Identity(2, 2)), 1e-12);
  }
}

TEST(Complement, IdentityComplementIsTrace) {
  Rng rng(6);
  const auto c = complement(identity_channel(3));
  EXPECT_EQ(c.dim_out(), 1);
  const auto rho = random_subnormalized(3, rng);
  EXPECT_NEAR(apply(c, rho).matrix()(0, 0).real(), rho.trace(), 1e-14);
}

TEST(Complement, PureInputsHaveEqualEntropies) {
  for (int s = 0; s < 30; ++s) {
    Rng rng(derive_seed(7, s));
    const auto phi = random_channel(3, 3, 2 + s % 3, rng);
    const auto psi = random_pure_state(3, rng);
    EXPECT_NEAR(output_entropy(phi, psi), output_entropy(complement(phi), psi), 1e-9);
  }
}

TEST(Complement, TwiceRecoversOutputs) {
  Rng rng(8);
  const auto phi = random_channel(2, 3, 2, rng);
  const auto cc = complement(complement(phi));
  for (int s = 0; s < 5; ++s) {
    const auto a = random_state(2, rng);
    EXPECT_LE(max_abs_entry(apply(cc, a).matrix() - apply(phi, a).matrix()), 1e-12);
  }
}

TEST(Compose, AssociativeAndMatchesSequentialApply) {
  for (int s = 0; s < 10; ++s) {
    Rng rng(derive_seed(9, s));
    const auto a = random_channel(2, 3, 2, rng);
    const auto b = random_channel(3, 2, 2, rng);
    const auto c = random_channel(2, 2, 2, rng);
    const auto rho = random_state(2, rng);
    EXPECT_LE(max_abs_entry(apply(compose(b, a), rho).matrix() - apply(b, apply(a, rho)).matrix()), 1e-12);
    EXPECT_LE(max_abs_entry(apply(compose(c, compose(b, a)), rho).matrix() -
                            apply(compose(compose(c, b), a), rho).matrix()),
              1e-12);
  }
  EXPECT_THROW(compose(identity_channel(2), identity_channel(3)), Error);
}

TEST(TensorOp, ActsOnProducts) {
  Rng rng(10);
  const auto a = random_channel(2, 2, 2, rng);
  const auto b = random_channel(3, 2, 3, rng);
  const auto r = random_state(2, rng), s = random_state(3, rng);
  const auto out = apply(tensor_op(a, b), tensor(r, s));
  EXPECT_LE(max_abs_entry(out.matrix() - tensor(apply(a, r), apply(b, s)).matrix()), 1e-12);
}

TEST(Depolarizing, MatchesFormula) {
  for (int s = 0; s < 10; ++s) {
    Rng rng(derive_seed(11, s));
    const Eigen::Index d = 2 + s % 3;
    const double p = 0.1 * s;
    const auto a = random_subnormalized(d, rng);
    const Matrix want = (1 - p) * a.matrix() + p * a.trace() * Matrix::Identity(d, d) / double(d);
    EXPECT_LE(max_abs_entry(apply(depolarizing_channel(d, p), a).matrix() - want), 1e-12);
  }
  EXPECT_THROW(depolarizing_channel(2, 1.5), Error);
}

TEST(PartialTraceChannel, MatchesPartialTrace) {
  Rng rng(12);
  const auto c = random_state(6, rng);
  EXPECT_LE(max_abs_entry(apply(partial_trace_channel(2, 3, Keep::A), c).matrix() -
                          partial_trace(c, 2, 3, Keep::A).matrix()),
            1e-14);
  EXPECT_LE(max_abs_entry(apply(partial_trace_channel(2, 3, Keep::B), c).matrix() -
                          partial_trace(c, 2, 3, Keep::B).matrix()),
            1e-14);
}

TEST(GroupAverage, PauliTwirlIsFullyDepolarizing) {
  const std::vector<Matrix> g = {pauli('i'), pauli('x'), pauli('y'), pauli('z')};
  const auto sigma = maximally_mixed(2);
  Rng rng(13);
  const auto rho = random_state(2, rng);
  EXPECT_LE(max_abs_entry(group_orbit_average(g, rho).matrix() - Matrix::Identity(2, 2) / 2.0), 1e-14);
  std::vector<PositiveOperator> povm(4, validate_positive(Matrix(Matrix::Identity(2, 2) / 4.0)));
  const auto phi = group_average_channel(g, povm, sigma);
  EXPECT_TRUE(phi.is_channel());
  EXPECT_LE(max_abs_entry(apply(phi, rho).matrix() - Matrix::Identity(2, 2) / 2.0), 1e-12);
}

TEST(GroupAverage, MeasureAndPrepare) {
  // Z2 = {I, X} with the computational measurement maps |0> to sigma and |1> to X sigma X
  const std::vector<Matrix> g = {pauli('i'), pauli('x')};
  const std::vector<PositiveOperator> povm = {diagonal_operator({1, 0}), diagonal_operator({0, 1})};
  Rng rng(14);
  const auto sigma = random_state(2, rng);
  const auto phi = group_average_channel(g, povm, sigma);
  const auto rho = random_state(2, rng);
  const double p0 = rho.matrix()(0, 0).real();
  const Matrix want = p0 * sigma.matrix() + (1 - p0) * pauli('x') * sigma.matrix() * pauli('x');
  EXPECT_LE(max_abs_entry(apply(phi, rho).matrix() - want), 1e-12);
}

TEST(GroupAverage, IncompletePovm) {
  const std::vector<Matrix> g = {pauli('i'), pauli('x')};
  const std::vector<PositiveOperator> povm = {diagonal_operator({1, 0}), diagonal_operator({0, 0.5})};
  try {
    group_average_channel(g, povm, maximally_mixed(2));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::PovmIncomplete);
  }
}

TEST(RandomPhase, DephasesOffDiagonals) {
  const auto grid = symmetric_grid(3, 1.0);
  ASSERT_EQ(grid.size(), 3u);
  EXPECT_DOUBLE_EQ(grid[0], -1.0);
  EXPECT_DOUBLE_EQ(grid[2], 1.0);
  const auto phi = random_phase_channel({{0.3, 0.5}, {-0.7, 0.5}}, grid);
  EXPECT_TRUE(phi.is_channel());
  Rng rng(15);
  const auto rho = random_state(3, rng);
  const Matrix out = apply(phi, rho).matrix();
  for (int m = 0; m < 3; ++m)
    for (int n = 0; n < 3; ++n) {
      const double dx = grid[m] - grid[n];
      const cplx f = 0.5 * std::exp(cplx(0, -0.3 * dx)) + 0.5 * std::exp(cplx(0, 0.7 * dx));
      EXPECT_LE(std::abs(out(m, n) - f * rho.matrix()(m, n)), 1e-12);
    }
  EXPECT_THROW(random_phase_channel({{0.1, 0.4}}, grid), Error);
}
