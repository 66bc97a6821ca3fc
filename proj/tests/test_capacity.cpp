#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "qentro/capacity.hpp"
#include "qentro/continuity.hpp"
#include "qentro/random.hpp"

using namespace qentro;

namespace {

const double ln2 = std::log(2.0);

PositiveOperator ket(std::initializer_list<cplx> v) {
  Vector x(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (cplx c : v) x[i++] = c;
  return projector(x.normalized());
}

PositiveOperator bell() {
  const double s = 1.0 / std::sqrt(2.0);
  return ket({s, 0, 0, s});
}

PositiveOperator werner(double f) {
  return validate_positive(Matrix(f * bell().matrix() + (1 - f) * Matrix::Identity(4, 4) / 4.0));
}

OptimizerOptions quick(int restarts = 5) {
  OptimizerOptions o;
  o.restarts = restarts;
  return o;
}

}  // namespace

TEST(Ensemble, Validation) {
  const auto a = ket({1, 0}), b = ket({0, 1});
  EXPECT_THROW(Ensemble({}, {}), Error);
  try {
    Ensemble({0.5, 0.6}, {a, b});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::BadDistribution);
  }
  EXPECT_THROW(Ensemble({1.0}, {a, b}), Error);
  EXPECT_THROW(Ensemble({1.0}, {diagonal_operator({0.5, 0.2})}), Error);
  const Ensemble e({0.25, 0.75}, {a, b});
  EXPECT_LE(max_abs_entry(e.barycenter().matrix() - diagonal_operator({0.25, 0.75}).matrix()), 1e-15);
}

TEST(HolevoQuantity, MatchesEntropyDifferenceOnQubits) {
  for (int s = 0; s < 20; ++s) {
    Rng rng(derive_seed(1, s));
    const auto phi = random_channel(2, 2, 2, rng);
    const auto p = random_distribution(3, rng);
    std::vector<PositiveOperator> st = {random_state(2, rng), random_state(2, rng), random_state(2, rng)};
    const Ensemble e(p, st);
    double avg = 0.0;
    for (int i = 0; i < 3; ++i) avg += p[i] * oracle::entropy2(apply(phi, st[i]).matrix());
    const double want = oracle::entropy2(apply(phi, e.barycenter()).matrix()) - avg;
    EXPECT_NEAR(holevo_quantity(phi, e), want, 1e-10);
  }
}

TEST(HolevoCapacity, ClosedForms) {
  EXPECT_NEAR(holevo_capacity(identity_channel(2), ConstraintSet::unconstrained()).value, ln2, 1e-6);
  EXPECT_NEAR(holevo_capacity(dephasing_channel(0.3), ConstraintSet::unconstrained()).value, ln2, 1e-6);
  EXPECT_NEAR(holevo_capacity(depolarizing_channel(2, 0.25), ConstraintSet::unconstrained()).value,
              ln2 - binary_h2(0.125), 1e-6);
  EXPECT_NEAR(holevo_capacity(identity_channel(3), ConstraintSet::unconstrained(), quick()).value, std::log(3.0),
              1e-6);
}

TEST(HolevoCapacity, DepolarizingAgainstGridOracle) {
  const double grid = oracle::depolarizing_holevo_grid(0.25);
  const double found = holevo_capacity(depolarizing_channel(2, 0.25), ConstraintSet::unconstrained()).value;
  EXPECT_NEAR(found, grid, 1e-3);
  EXPECT_GE(found, grid - 1e-9);
}

TEST(HolevoCapacity, RandomChannelsNeverExceedLogD) {
  for (int s = 0; s < 5; ++s) {
    Rng rng(derive_seed(2, s));
    const auto phi = random_channel(2, 3, 2, rng);
    const auto r = holevo_capacity(phi, ConstraintSet::unconstrained(), quick());
    EXPECT_LE(r.value, ln2 + 1e-9);
    EXPECT_NEAR(r.value, holevo_quantity(phi, r.ensemble), 1e-9);
    // restricted two-state ensembles never beat the search
    for (int t = 0; t < 20; ++t) {
      const Ensemble e({0.5, 0.5}, {random_pure_state(2, rng), random_pure_state(2, rng)});
      EXPECT_LE(holevo_quantity(phi, e), r.value + 1e-9);
    }
  }
}

TEST(HolevoCapacity, OptimalEnsembleHasEqualDivergences) {
  const auto phi = depolarizing_channel(2, 0.25);
  const auto r = holevo_capacity(phi, ConstraintSet::unconstrained());
  const auto rep = optimal_ensemble_report(phi, r.ensemble);
  EXPECT_TRUE(rep.optimal());
  EXPECT_NEAR(rep.value, r.value, 1e-9);
  const Ensemble bad({0.5, 0.5}, {ket({1, 0}), ket({1, 1})});
  EXPECT_FALSE(optimal_ensemble_report(phi, Ensemble({0.9, 0.1}, {ket({1, 0}), ket({0, 1})})).optimal());
  EXPECT_GE(optimal_ensemble_report(phi, bad).value, 0.0);
}

TEST(HolevoCapacity, MeanEnergyConstraint) {
  // identity with Tr H rho <= 1/4 for H = diag(0, 1): the best barycenter is diag(3/4, 1/4)
  const auto c = ConstraintSet::mean_observable(HermitianOperator(diagonal_operator({0, 1}).matrix()), 0.25);
  const auto r = holevo_capacity(identity_channel(2), c, quick());
  EXPECT_NEAR(r.value, binary_h2(0.25), 1e-6);
  EXPECT_LE(r.ensemble.barycenter().matrix()(1, 1).real(), 0.25 + 1e-9);
  // a loose bound behaves as unconstrained
  const auto loose = ConstraintSet::mean_observable(HermitianOperator(diagonal_operator({0, 1}).matrix()), 0.9);
  EXPECT_NEAR(holevo_capacity(identity_channel(2), loose, quick()).value, ln2, 1e-6);
}

TEST(HolevoCapacity, InfeasibleConstraint) {
  const auto c = ConstraintSet::mean_observable(HermitianOperator(diagonal_operator({1, 2}).matrix()), 0.5);
  try {
    holevo_capacity(identity_channel(2), c);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::InfeasibleConstraint);
  }
}

TEST(HolevoCapacity, FixedBarycenter) {
  const auto half = ConstraintSet::fixed_barycenter(maximally_mixed(2));
  EXPECT_NEAR(holevo_capacity(identity_channel(2), half, quick()).value, ln2, 1e-6);
  const double p = 0.25;
  EXPECT_NEAR(holevo_capacity(depolarizing_channel(2, p), half, quick()).value,
              ln2 - depolarizing_pure_output_sup(2, p), 1e-6);
  // identity at a fixed barycenter: the pure decomposition is spectral, so the value is H(rho)
  Rng rng(3);
  const auto rho = random_state(3, rng);
  EXPECT_NEAR(holevo_capacity(identity_channel(3), ConstraintSet::fixed_barycenter(rho), quick()).value,
              quantum_entropy(rho), 1e-6);
  const KrausOperation lossy({Matrix(0.5 * Matrix::Identity(2, 2))});
  EXPECT_THROW(holevo_capacity(lossy, half), Error);
}

TEST(HolevoCapacity, DivergenceRadiusForSymmetricPair) {
  // for a symmetric pair the uniform ensemble is optimal, so both values coincide
  for (double theta : {0.2, 0.5, 0.7}) {
    const auto a = ket({std::cos(theta), std::sin(theta)});
    const auto b = ket({std::cos(theta), -std::sin(theta)});
    const double chi = holevo_quantity(identity_channel(2), Ensemble({0.5, 0.5}, {a, b}));
    EXPECT_NEAR(divergence_center({a, b}).radius, chi, 1e-6);
  }
}

TEST(HolevoCapacity, Deterministic) {
  Rng rng(4);
  const auto phi = random_channel(2, 2, 3, rng);
  OptimizerOptions o = quick();
  o.seed = 17;
  const auto a = holevo_capacity(phi, ConstraintSet::unconstrained(), o);
  const auto b = holevo_capacity(phi, ConstraintSet::unconstrained(), o);
  EXPECT_EQ(a.value, b.value);
  EXPECT_EQ(a.restart, b.restart);
}

TEST(HolevoCapacity, ScaleLimit) {
  try {
    holevo_capacity(identity_channel(5), ConstraintSet::unconstrained());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ScaleExceeded);
  }
}

TEST(Eof, ClosedForms) {
  EXPECT_NEAR(eof(tensor(ket({1, 0}), ket({0.6, 0.8})), 2, 2).value, 0.0, 1e-9);
  EXPECT_NEAR(eof(bell(), 2, 2).value, ln2, 1e-6);
  EXPECT_NEAR(eof(werner(0.8), 2, 2).value, oracle::wootters_eof(werner(0.8).matrix()), 1e-3);
}

TEST(Eof, RandomTwoQubitStatesAgainstWootters) {
  for (int s = 0; s < 4; ++s) {
    Rng rng(derive_seed(5, s));
    const auto rho = random_state(4, rng, 2);
    const auto r = eof(rho, 2, 2, quick(10));
    const double w = oracle::wootters_eof(rho.matrix());
    EXPECT_GE(r.value, w - 1e-7);
    EXPECT_NEAR(r.value, w, 1e-3);
    Matrix sum = Matrix::Zero(4, 4);
    double avg = 0.0;
    for (std::size_t i = 0; i < r.states.size(); ++i) {
      sum += r.weights[i] * r.states[i] * r.states[i].adjoint();
      avg += r.weights[i] * quantum_entropy(partial_trace(projector(r.states[i]), 2, 2, Keep::A));
    }
    EXPECT_LE(max_abs_entry(sum - rho.matrix()), 1e-9);
    EXPECT_NEAR(avg, r.value, 1e-9);
  }
}

TEST(Eof, PureStateIsMarginalEntropy) {
  Rng rng(6);
  const auto psi = random_pure_state(6, rng);
  EXPECT_NEAR(eof(psi, 2, 3).value, quantum_entropy(partial_trace(psi, 2, 3, Keep::A)), 1e-9);
}

TEST(Eof, InputChecks) {
  Rng rng(7);
  try {
    eof(random_state(20, rng), 5, 4);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ScaleExceeded);
  }
  EXPECT_THROW(eof(random_state(4, rng), 2, 3), Error);
}

TEST(Eof, LocalUnitaryLeavesValueUnchanged) {
  Rng rng(8);
  const auto probe = eof_local_operation_probe(werner(0.8), 2, 2, unitary_channel(random_unitary(2, rng)),
                                               unitary_channel(random_unitary(2, rng)), quick());
  EXPECT_NEAR(probe.trace, 1.0, 1e-12);
  EXPECT_NEAR(probe.after, probe.before, 1e-6);
}

TEST(Eof, LocalChannelDoesNotIncrease) {
  Rng rng(9);
  const auto probe =
      eof_local_operation_probe(bell(), 2, 2, depolarizing_channel(2, 0.3), identity_channel(2), quick());
  EXPECT_LE(probe.after, probe.before + 1e-6);
}

TEST(Eof, VanishingOutput) {
  const KrausOperation keep0({diagonal_operator({1, 0}).matrix()});
  try {
    eof_local_operation_probe(tensor(ket({0, 1}), ket({0, 1})), 2, 2, keep0, identity_channel(2));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::VanishingOutput);
  }
}
