#include "stochq/correspondence.hpp"
#include "stochq/random.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace stochq;
using namespace stochq::correspondence;

namespace {

const Complex I1(0.0, 1.0);

ComplexMatrix c2(Complex a, Complex b, Complex c, Complex d) {
  ComplexMatrix m(2, 2);
  m << a, b, c, d;
  return m;
}

RealMatrix squared_moduli(const ComplexMatrix& m) { return m.cwiseAbs2(); }

RealMatrix fixture_3x3() {
  RealMatrix g(3, 3);
  g << 0.5, 0.5, 0.0,
       0.0, 0.5, 0.5,
       0.5, 0.0, 0.5;
  return g;
}

}  // namespace

TEST(QuantumToStochastic, Examples) {
  EXPECT_EQ(quantum_to_stochastic(UnitaryMatrix(ComplexMatrix::Identity(3, 3))).matrix(),
            RealMatrix::Identity(3, 3));

  const double h = 1.0 / std::sqrt(2.0);
  const auto g = quantum_to_stochastic(UnitaryMatrix(c2(h, h, h, -h))).matrix();
  EXPECT_LE((g - RealMatrix::Constant(2, 2, 0.5)).cwiseAbs().maxCoeff(), 1e-15);

  const auto x = quantum_to_stochastic(UnitaryMatrix(c2(0, 1, 1, 0))).matrix();
  EXPECT_EQ(x, squared_moduli(c2(0, 1, 1, 0)));

  EXPECT_THROW(UnitaryMatrix(c2(1, 1, 0, 1)), ValidationError);
}

TEST(QuantumToStochastic, RandomUnitariesAreDoublyStochastic) {
  random::Rng rng(41);
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = 1 + trial % 8;
    const UnitaryMatrix U(random::unitary(n, rng), 1.0, 0.0);
    const auto g = quantum_to_stochastic(U);
    ASSERT_TRUE(stochastic::is_doubly_stochastic(g.matrix(), 1e-12));
    ASSERT_EQ(g.t(), 1.0);
    ASSERT_EQ(g.t0(), 0.0);
  }
}

TEST(QuantumToStochastic, ConjugationInvariance) {
  random::Rng rng(42);
  for (int trial = 0; trial < 100; ++trial) {
    const ComplexMatrix u = random::unitary(2 + trial % 5, rng);
    const auto a = quantum_to_stochastic(UnitaryMatrix(u)).matrix();
    const auto b = quantum_to_stochastic(UnitaryMatrix(ComplexMatrix(u.conjugate()))).matrix();
    ASSERT_EQ(a, b);
  }
}

TEST(Potential, Examples) {
  const TransitionMatrix half(RealMatrix::Constant(2, 2, 0.5));
  RealMatrix phases = RealMatrix::Zero(2, 2);
  phases(1, 1) = std::numbers::pi;
  const auto theta = potential_from_transition(half, phases).matrix();
  const double h = std::sqrt(0.5);
  EXPECT_LE((theta - c2(h, h, h, -h)).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_LE(unitarity_defect(theta), 1e-15);

  EXPECT_THROW(PotentialMatrix(c2(1, 0, 1, 1)), ValidationError);
  EXPECT_THROW(potential_from_transition(half, RealMatrix::Zero(3, 3)), ValidationError);
}

TEST(Potential, SquaredModuliRecoverTheTransitionMatrix) {
  random::Rng rng(43);
  std::uniform_real_distribution<double> angle(-std::numbers::pi, std::numbers::pi);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + trial % 6;
    const TransitionMatrix g(random::column_stochastic(n, rng));
    RealMatrix phases(n, n);
    for (auto& v : phases.reshaped()) v = angle(rng);
    const auto theta = potential_from_transition(g, phases);
    ASSERT_LE((squared_moduli(theta.matrix()) - g.matrix()).cwiseAbs().maxCoeff(), 1e-15);
  }
}

TEST(PhaseObjective, GradientMatchesFiniteDifferences) {
  random::Rng rng(44);
  std::uniform_real_distribution<double> angle(-std::numbers::pi, std::numbers::pi);
  const int n = 4;
  const RealMatrix amp = quantum_to_stochastic(UnitaryMatrix(random::unitary(n, rng))).matrix().cwiseSqrt();
  RealMatrix phases(n, n);
  for (auto& v : phases.reshaped()) v = angle(rng);
  RealMatrix grad(n, n);
  const double f = phase_objective(amp, phases, &grad);
  EXPECT_GT(f, 0.0);
  const double h = 1e-6;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      RealMatrix up = phases, dn = phases;
      up(i, j) += h;
      dn(i, j) -= h;
      const double fd = (phase_objective(amp, up, nullptr) - phase_objective(amp, dn, nullptr)) / (2 * h);
      EXPECT_NEAR(grad(i, j), fd, 1e-7);
    }
  }
}

TEST(Unistochastic, HalfMatrixIsFound) {
  const auto r = unistochastic_search(TransitionMatrix(RealMatrix::Constant(2, 2, 0.5)));
  ASSERT_EQ(r.outcome, SearchOutcome::found);
  EXPECT_LE(unitarity_defect(r.unitary->matrix()), 1e-10);
  EXPECT_LE((squared_moduli(r.unitary->matrix()) - RealMatrix::Constant(2, 2, 0.5)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Unistochastic, PermutationComesBackExactly) {
  RealMatrix p = RealMatrix::Zero(4, 4);
  p(1, 0) = p(3, 1) = p(0, 2) = p(2, 3) = 1.0;
  const auto r = unistochastic_search(TransitionMatrix(p));
  ASSERT_EQ(r.outcome, SearchOutcome::found);
  EXPECT_EQ(r.starts_used, 1);
  EXPECT_EQ(squared_moduli(r.unitary->matrix()), p);
}

TEST(Unistochastic, NonUnistochasticFixtureIsCertified) {
  const auto r = unistochastic_search(TransitionMatrix(fixture_3x3()));
  EXPECT_EQ(r.outcome, SearchOutcome::not_unistochastic);
  EXPECT_FALSE(r.unitary.has_value());
  EXPECT_FALSE(r.certificate.empty());
  EXPECT_TRUE(overlap_certificate(fixture_3x3()).has_value());
}

TEST(Unistochastic, NotDoublyStochastic) {
  RealMatrix g(2, 2);
  g << 1.0, 0.5, 0.0, 0.5;
  const auto r = unistochastic_search(TransitionMatrix(g));
  EXPECT_EQ(r.outcome, SearchOutcome::not_unistochastic);
  EXPECT_EQ(r.starts_used, 0);
}

TEST(Unistochastic, RandomUnitariesRoundTrip) {
  random::Rng rng(45);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 3 + trial % 4;  // N = 3..6
    const auto g = quantum_to_stochastic(UnitaryMatrix(random::unitary(n, rng)));
    EXPECT_FALSE(overlap_certificate(g.matrix()).has_value());
    const auto r = unistochastic_search(g);
    ASSERT_EQ(r.outcome, SearchOutcome::found) << "trial " << trial << " residual " << r.best_residual;
    EXPECT_LE(unitarity_defect(r.unitary->matrix()), 1e-8);
    EXPECT_LE((squared_moduli(r.unitary->matrix()) - g.matrix()).cwiseAbs().maxCoeff(), 1e-8);
  }
}

TEST(Unistochastic, ExhaustedSearchIsNotAProof) {
  UnistochasticOptions opt;
  opt.starts = 1;
  opt.max_iters = 1;
  random::Rng rng(46);
  const auto g = quantum_to_stochastic(UnitaryMatrix(random::unitary(5, rng)));
  RealMatrix phases = RealMatrix::Zero(5, 5);
  if (phase_objective(g.matrix().cwiseSqrt(), phases, nullptr) > 1e-4) {
    const auto r = unistochastic_search(g, opt);
    EXPECT_EQ(r.outcome, SearchOutcome::no_completion_found);
    EXPECT_GT(r.best_residual, opt.tol);
  }
}

TEST(Unistochastic, DeterministicForFixedSeed) {
  random::Rng rng(47);
  const auto g = quantum_to_stochastic(UnitaryMatrix(random::unitary(4, rng)));
  const auto a = unistochastic_search(g);
  const auto b = unistochastic_search(g);
  ASSERT_EQ(a.outcome, SearchOutcome::found);
  EXPECT_EQ(a.unitary->matrix(), b.unitary->matrix());
  EXPECT_EQ(a.starts_used, b.starts_used);
}

TEST(Orthostochastic, Examples) {
  const auto half = orthostochastic_check(TransitionMatrix(RealMatrix::Constant(2, 2, 0.5)));
  ASSERT_TRUE(half.orthogonal.has_value());
  const RealMatrix& O = *half.orthogonal;
  EXPECT_LE((O.transpose() * O - RealMatrix::Identity(2, 2)).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LE((O.cwiseAbs2() - RealMatrix::Constant(2, 2, 0.5)).cwiseAbs().maxCoeff(), 1e-15);

  // The uniform 3x3 matrix is unistochastic (Fourier) but not orthostochastic.
  const auto uniform = orthostochastic_check(TransitionMatrix(RealMatrix::Constant(3, 3, 1.0 / 3.0)));
  EXPECT_FALSE(uniform.orthogonal.has_value());
  EXPECT_FALSE(uniform.reason.empty());

  const auto fixture = orthostochastic_check(TransitionMatrix(fixture_3x3()));
  EXPECT_FALSE(fixture.orthogonal.has_value());

  EXPECT_THROW(orthostochastic_check(TransitionMatrix(RealMatrix::Identity(5, 5))), DomainError);
}

TEST(Orthostochastic, RealRotationsAreFound) {
  random::Rng rng(48);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 2 + trial % 3;
    const RealMatrix q = random::unitary(n, rng).real().householderQr().householderQ();
    const auto r = orthostochastic_check(TransitionMatrix(RealMatrix(q.cwiseAbs2())));
    ASSERT_TRUE(r.orthogonal.has_value());
    ASSERT_LE((r.orthogonal->cwiseAbs2() - q.cwiseAbs2()).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Kraus, FromPotentialExamples) {
  const double h = std::sqrt(0.5);
  const PotentialMatrix theta(c2(h, h, h, -h));
  const auto kraus = kraus_from_potential(theta);
  ASSERT_EQ(kraus.size(), 2u);
  EXPECT_EQ(kraus.operators()[0], c2(h, 0, h, 0));
  EXPECT_EQ(kraus.operators()[1], c2(0, h, 0, -h));
  EXPECT_LE(kraus_identity_residual(kraus.operators()), 1e-15);
  EXPECT_LE((kraus_transition(kraus) - RealMatrix::Constant(2, 2, 0.5)).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Kraus, RandomPotentialsSatisfyCompleteness) {
  random::Rng rng(49);
  std::uniform_real_distribution<double> angle(-std::numbers::pi, std::numbers::pi);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + trial % 6;
    const TransitionMatrix g(random::column_stochastic(n, rng));
    RealMatrix phases(n, n);
    for (auto& v : phases.reshaped()) v = angle(rng);
    const auto kraus = kraus_from_potential(potential_from_transition(g, phases));
    ASSERT_LE(kraus_identity_residual(kraus.operators()), 1e-12);
    ASSERT_LE((kraus_transition(kraus) - g.matrix()).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Kraus, Validation) {
  EXPECT_THROW(KrausSet({}), ValidationError);
  EXPECT_THROW(KrausSet({ComplexMatrix::Identity(2, 2), ComplexMatrix::Identity(2, 2)}), ValidationError);
  EXPECT_THROW(KrausSet({ComplexMatrix::Identity(2, 2), ComplexMatrix::Zero(3, 3)}), ValidationError);
}

TEST(Dilation, Identity) {
  const auto d = stinespring_dilate(kraus_from_potential(PotentialMatrix(ComplexMatrix::Identity(2, 2))));
  EXPECT_EQ(d.system_dim, 2);
  EXPECT_EQ(d.ancilla_dim, 2);
  EXPECT_EQ(d.unitary.dim(), 4);
  EXPECT_LE(unitarity_defect(d.unitary.matrix()), 1e-12);
  EXPECT_LE((dilation_marginal(d) - RealMatrix::Identity(2, 2)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Dilation, FixtureThreeStates) {
  const TransitionMatrix g(fixture_3x3());
  const auto d = stinespring_dilate(kraus_from_potential(potential_from_transition(g, RealMatrix::Zero(3, 3))));
  EXPECT_EQ(d.unitary.dim(), 9);
  EXPECT_LE(d.unitary.dim(), 27);
  EXPECT_LE(unitarity_defect(d.unitary.matrix()), 1e-10);
  EXPECT_LE((dilation_marginal(d) - g.matrix()).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Dilation, RandomStochasticMatrices) {
  random::Rng rng(50);
  std::uniform_real_distribution<double> angle(-std::numbers::pi, std::numbers::pi);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 1 + trial % 6;
    const TransitionMatrix g(random::column_stochastic(n, rng));
    RealMatrix phases(n, n);
    for (auto& v : phases.reshaped()) v = angle(rng);
    const auto d = stinespring_dilate(kraus_from_potential(potential_from_transition(g, phases)));
    ASSERT_LE(d.unitary.dim(), n * n * n);
    ASSERT_LE(unitarity_defect(d.unitary.matrix()), 1e-10);
    ASSERT_LE((dilation_marginal(d) - g.matrix()).cwiseAbs().maxCoeff(), 1e-10);
    // Columns with ancilla input 0 carry the Kraus action.
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i < n; ++i) {
        for (int b = 0; b < n; ++b) {
          const Complex expected = b == j ? std::polar(std::sqrt(g.matrix()(i, j)), phases(i, j)) : Complex(0.0);
          ASSERT_LE(std::abs(d.unitary.matrix()(d.index(i, b), d.index(j, 0)) - expected), 1e-12);
        }
      }
    }
  }
}

TEST(Density, FromDistributionAndBornRule) {
  RealVector p(3);
  p << 0.2, 0.3, 0.5;
  const auto rho = density_from_distribution(Distribution(p));
  EXPECT_TRUE(rho.matrix().isDiagonal());
  EXPECT_EQ(RealVector(rho.matrix().diagonal().real()), p);

  random::Rng rng(51);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + trial % 7;
    const UnitaryMatrix U(random::unitary(n, rng));
    const Distribution p0(random::distribution(n, rng));
    const auto evolved = evolve_density(U, density_from_distribution(p0));
    const RealVector born = evolved.matrix().diagonal().real();
    const RealVector markov = stochastic::propagate(quantum_to_stochastic(U), p0).probabilities();
    ASSERT_LE((born - markov).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Density, PermutationKeepsItDiagonal) {
  ComplexMatrix perm = ComplexMatrix::Zero(3, 3);
  perm(1, 0) = perm(2, 1) = perm(0, 2) = 1.0;
  RealVector p(3);
  p << 0.6, 0.3, 0.1;
  const auto rho = evolve_density(UnitaryMatrix(perm), density_from_distribution(Distribution(p)));
  EXPECT_TRUE(rho.matrix().isDiagonal(0.0));
  EXPECT_EQ(rho.matrix()(1, 1).real(), 0.6);
}

TEST(Density, Validation) {
  EXPECT_THROW(DensityMatrix(ComplexMatrix::Identity(2, 2)), ValidationError);
  EXPECT_THROW(DensityMatrix(c2(0.5, 1.0, 0.0, 0.5)), ValidationError);
  EXPECT_THROW(DensityMatrix(c2(1.5, 0.0, 0.0, -0.5)), ValidationError);
  EXPECT_NO_THROW(DensityMatrix(c2(0.5, 0.5 * I1, -0.5 * I1, 0.5)));
}

TEST(RankOne, PureStatesFactor) {
  const auto e0 = rank_one_factor(DensityMatrix(c2(1, 0, 0, 0)));
  ASSERT_TRUE(std::holds_alternative<StateVector>(e0));
  EXPECT_LE((std::get<StateVector>(e0) - ComplexVector::Unit(2, 0)).norm(), 1e-12);

  random::Rng rng(52);
  for (int trial = 0; trial < 50; ++trial) {
    const ComplexVector psi = random::unit_vector(2 + trial % 5, rng);
    const auto f = rank_one_factor(DensityMatrix(ComplexMatrix(psi * psi.adjoint())));
    ASSERT_TRUE(std::holds_alternative<StateVector>(f));
    const auto& v = std::get<StateVector>(f);
    ASSERT_NEAR(std::abs(v.dot(psi)), 1.0, 1e-10);
    const Eigen::Index k = [&] {
      Eigen::Index i = 0;
      while (std::abs(v(i)) < 1e-12) ++i;
      return i;
    }();
    ASSERT_GT(v(k).real(), 0.0);
    ASSERT_NEAR(v(k).imag(), 0.0, 1e-12);
  }
}

TEST(RankOne, MixedStatesAreRejected) {
  const auto mixed = rank_one_factor(DensityMatrix(c2(0.5, 0, 0, 0.5)));
  ASSERT_TRUE(std::holds_alternative<NotRankOne>(mixed));
  const auto& s = std::get<NotRankOne>(mixed).spectrum;
  EXPECT_NEAR(s(0), 0.5, 1e-15);
  EXPECT_NEAR(s(1), 0.5, 1e-15);
}

TEST(Stone, PauliZ) {
  const sh::HermitianMatrix H(c2(1, 0, 0, -1));
  const sh::Propagator prop(H);
  const Evolution U = [&](double t) { return UnitaryMatrix(prop.unitary(t), t, 0.0); };
  const auto x = hamiltonian_from_evolution(U, 0.7, 1e-4);
  EXPECT_LE((x.H.matrix() - H.matrix()).cwiseAbs().maxCoeff(), 1e-6);
  EXPECT_LE(x.anti_hermitian_residual, 1e-6);
}

TEST(Stone, ConstantEvolutionGivesZero) {
  const Evolution U = [](double t) { return UnitaryMatrix(ComplexMatrix::Identity(3, 3), t, 0.0); };
  const auto x = hamiltonian_from_evolution(U, 1.0, 1e-4);
  EXPECT_EQ(x.H.matrix(), ComplexMatrix::Zero(3, 3));
}

TEST(Stone, RandomHamiltoniansConvergeQuadratically) {
  random::Rng rng(53);
  for (int trial = 0; trial < 10; ++trial) {
    const sh::HermitianMatrix H(random::hermitian(4, rng));
    const sh::Propagator prop(H);
    const Evolution U = [&](double t) { return UnitaryMatrix(prop.unitary(t), t, 0.0); };
    const double e1 = (hamiltonian_from_evolution(U, 0.5, 1e-2).H.matrix() - H.matrix()).cwiseAbs().maxCoeff();
    const double e2 = (hamiltonian_from_evolution(U, 0.5, 5e-3).H.matrix() - H.matrix()).cwiseAbs().maxCoeff();
    const double fine = (hamiltonian_from_evolution(U, 0.5, 1e-4).H.matrix() - H.matrix()).cwiseAbs().maxCoeff();
    EXPECT_LE(fine, 5e-6);
    EXPECT_GE(e1 / e2, 3.5);
  }
}

TEST(Stone, Errors) {
  const Evolution U = [](double t) { return UnitaryMatrix(ComplexMatrix::Identity(2, 2), t, 0.0); };
  EXPECT_THROW(hamiltonian_from_evolution(U, 0.0, 0.0), ValidationError);
  EXPECT_THROW(hamiltonian_from_evolution(U, 0.0, -1.0), ValidationError);
}
