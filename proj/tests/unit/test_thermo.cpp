#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include <unsupported/Eigen/MatrixFunctions>

#include "qds/davies.hpp"
#include "qds/errors.hpp"
#include "qds/models.hpp"
#include "qds/propagation.hpp"
#include "qds/thermo.hpp"
#include "test_support.hpp"

namespace qds {
namespace {

using testing::max_abs;
using testing::Rng;

constexpr Complex kI{0.0, 1.0};

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> out;
  for (int k = 0; k < n; ++k) out.push_back(a + (b - a) * k / (n - 1));
  return out;
}

GklsGenerator thermal_qubit(double omega, double temperature, double gamma = 0.5) {
  models::TwoLevelParams p;
  p.omega = omega;
  p.gamma_down = gamma;
  p.gamma_up = gamma * std::exp(-omega / temperature);
  return models::two_level_generator(p);
}

TEST(Entropy, Examples) {
  EXPECT_NEAR(von_neumann_entropy(DensityMatrix::basis_state(3, 1)), 0.0, 1e-15);
  EXPECT_NEAR(von_neumann_entropy(DensityMatrix::maximally_mixed(2)), std::log(2.0), 1e-15);
  EXPECT_NEAR(von_neumann_entropy(DensityMatrix::maximally_mixed(5)), std::log(5.0), 1e-14);
  const DensityMatrix g = gibbs_state(0.5 * qubit::sigma3(), std::log(2.0));
  const double expected = -(2.0 / 3.0) * std::log(2.0 / 3.0) - (1.0 / 3.0) * std::log(1.0 / 3.0);
  EXPECT_NEAR(von_neumann_entropy(g), expected, 1e-15);
}

TEST(Entropy, UnitaryInvariance) {
  Rng rng(1);
  const DensityMatrix rho = testing::random_state(4, rng);
  const Matrix u = (testing::random_hermitian(4, rng) * kI).exp();
  EXPECT_NEAR(von_neumann_entropy(Operator(u * rho.matrix() * u.adjoint())), von_neumann_entropy(rho),
              1e-13);
}

TEST(Entropy, ClippingOnlyAbsorbsRoundoff) {
  Operator tiny = Operator::Zero(2, 2);
  tiny(0, 0) = 1.0 + 1e-14;
  tiny(1, 1) = -1e-14;
  EXPECT_NEAR(von_neumann_entropy(tiny), 0.0, 1e-12);
  Operator negative = Operator::Zero(2, 2);
  negative(0, 0) = 1.1;
  negative(1, 1) = -0.1;
  EXPECT_THROW(von_neumann_entropy(negative), ValidationError);
}

TEST(RelativeEntropy, Examples) {
  const DensityMatrix mixed = DensityMatrix::maximally_mixed(2);
  EXPECT_NEAR(relative_entropy(mixed, mixed), 0.0, 1e-15);
  EXPECT_NEAR(relative_entropy(DensityMatrix::basis_state(2, 0), mixed), std::log(2.0), 1e-14);
  EXPECT_EQ(relative_entropy(mixed, DensityMatrix::basis_state(2, 0)),
            std::numeric_limits<double>::infinity());
  // Commuting diagonal states reduce to the classical formula.
  Operator a = Operator::Zero(2, 2);
  a(0, 0) = 0.3;
  a(1, 1) = 0.7;
  Operator b = Operator::Zero(2, 2);
  b(0, 0) = 0.6;
  b(1, 1) = 0.4;
  EXPECT_NEAR(relative_entropy(DensityMatrix(a), DensityMatrix(b)),
              0.3 * std::log(0.3 / 0.6) + 0.7 * std::log(0.7 / 0.4), 1e-14);
}

TEST(RelativeEntropy, KleinInequality) {
  Rng rng(2);
  for (int trial = 0; trial < 30; ++trial) {
    const DensityMatrix a = testing::random_state(3, rng);
    const DensityMatrix b = testing::random_state(3, rng);
    const double d = relative_entropy(a, b);
    EXPECT_GE(d, 0.0);
    // Pinsker: D >= ||a - b||_1^2 / 2.
    const double tn = trace_norm(a.matrix() - b.matrix());
    EXPECT_GE(d + 1e-12, 0.5 * tn * tn);
  }
}

TEST(Contractivity, ExamplesAndMonotonicity) {
  Rng rng(3);
  const DensityMatrix a = testing::random_state(2, rng);
  const DensityMatrix b = testing::random_state(2, rng);
  const ContractivityReport id = contractivity_check(Superoperator::identity(HilbertDim(2)), a, b);
  EXPECT_TRUE(id.holds);
  EXPECT_NEAR(id.margin, 0.0, 1e-15);

  const double p = 0.4;
  // rho -> (1 - p) rho + p Tr(rho) I / 2
  const Vector id_vec = vectorize(Operator::Identity(2, 2));
  const Superoperator depol = Superoperator::identity(HilbertDim(2)) * Complex(1.0 - p) +
                              Superoperator(Matrix(0.5 * id_vec * id_vec.adjoint())) * Complex(p);
  const ContractivityReport r = contractivity_check(depol, a, b);
  EXPECT_TRUE(r.holds);
  EXPECT_GT(r.margin, 0.0);

  const GklsGenerator g = thermal_qubit(1.0, 0.7);
  const Superoperator l = generator_superoperator(g);
  const DensityMatrix gibbs = models::two_level_stationary({1.0, 0.5, 0.5 * std::exp(-1.0 / 0.7)});
  double previous = relative_entropy(a, gibbs);
  for (double t : {0.2, 0.5, 1.0, 2.0}) {
    const ContractivityReport step = contractivity_check(propagator_exact(l, t), a, gibbs);
    EXPECT_TRUE(step.holds);
    EXPECT_LE(step.after, previous + 1e-12);
    previous = step.after;
  }
}

TEST(Contractivity, NonCptpRejected) {
  const DensityMatrix a = DensityMatrix::maximally_mixed(2);
  EXPECT_THROW(contractivity_check(transposition_map(HilbertDim(2)), a, a), ContractViolation);
  EXPECT_THROW(contractivity_check(Superoperator::identity(HilbertDim(2)) * Complex(0.5), a, a),
               ContractViolation);
}

TEST(HTheorem, DephasingFromPlus) {
  models::TwoLevelParams p;
  p.delta = 0.8;
  const DensityMatrix plus(Operator::Constant(2, 2, 0.5));
  const HTheoremReport r = h_theorem_check(models::two_level_generator(p), plus, linspace(0.0, 5.0, 11));
  EXPECT_TRUE(r.holds);
  EXPECT_NEAR(r.entropies.front(), 0.0, 1e-12);
  const std::vector<double> times = linspace(0.0, 5.0, 11);
  for (std::size_t k = 0; k < times.size(); ++k) {
    const double c = 0.5 * std::exp(-models::two_level_coherence_decay_rate(p) * times[k]);
    const double lo = 0.5 - c;
    const double hi = 0.5 + c;
    const double expected = -(lo > 0.0 ? lo * std::log(lo) : 0.0) - hi * std::log(hi);
    EXPECT_NEAR(r.entropies[k], expected, 1e-10);
  }
  for (std::size_t k = 1; k < r.entropies.size(); ++k) EXPECT_GE(r.entropies[k], r.entropies[k - 1]);
}

TEST(HTheorem, FixedPointsAndUnitary) {
  Rng rng(4);
  const GklsGenerator unital = testing::random_unital_generator(3, 2, rng);
  const HTheoremReport mixed = h_theorem_check(unital, DensityMatrix::maximally_mixed(3), {0.0, 1.0, 2.0});
  for (double s : mixed.entropies) EXPECT_NEAR(s, std::log(3.0), 1e-12);

  const DensityMatrix rho = testing::random_state(3, rng);
  const HTheoremReport closed =
      h_theorem_check(GklsGenerator(testing::random_hermitian(3, rng), {}), rho, {0.0, 0.5, 3.0});
  for (double s : closed.entropies) EXPECT_NEAR(s, von_neumann_entropy(rho), 1e-12);
  EXPECT_TRUE(closed.holds);
}

TEST(HTheorem, RequiresBistochasticGenerator) {
  models::TwoLevelParams p;
  p.gamma_down = 1.0;
  EXPECT_THROW(h_theorem_check(models::two_level_generator(p), DensityMatrix::maximally_mixed(2), {1.0}),
               PreconditionError);
}

TEST(Ledger, ConstantHamiltonianDoesNoWork) {
  const GklsGenerator g = thermal_qubit(1.0, 0.5);
  const Schedule schedule([&](double) { return g; }, {0.0}, ScheduleMode::kContinuous);
  const DensityMatrix rho0 = DensityMatrix::basis_state(2, 1);
  LedgerOptions options;
  options.hamiltonian_derivative = [](double) { return Operator(Operator::Zero(2, 2)); };
  const ThermoLedger ledger = first_law_ledger(schedule, rho0, linspace(0.0, 3.0, 7), options);
  const Superoperator l = generator_superoperator(g);
  for (std::size_t k = 0; k < ledger.t.size(); ++k) {
    EXPECT_EQ(ledger.W[k], 0.0);
    const DensityMatrix exact = evolve_exact(l, ledger.t[k], rho0);
    const double e = (exact.matrix() * g.hamiltonian()).trace().real();
    EXPECT_NEAR(ledger.E[k], e, 1e-10);
    EXPECT_NEAR(ledger.Q[k], e - ledger.E[0], 1e-10);
  }
  EXPECT_LT(ledger.max_closure_defect(), 1e-12);
  EXPECT_TRUE(std::isnan(ledger.sigma.front()));
}

TEST(Ledger, ClosedDrivenSystemExchangesNoHeat) {
  auto h = [](double t) { return Operator(0.5 * (1.0 + 0.3 * t) * qubit::sigma3() + 0.4 * qubit::sigma1()); };
  const Schedule schedule([&](double t) { return GklsGenerator(h(t), {}); }, {0.0},
                          ScheduleMode::kContinuous);
  const DensityMatrix rho0 = DensityMatrix::basis_state(2, 0);
  const ThermoLedger ledger = first_law_ledger(schedule, rho0, linspace(0.0, 2.0, 5));
  for (std::size_t k = 0; k < ledger.t.size(); ++k) {
    EXPECT_NEAR(ledger.Q[k], 0.0, 1e-10);
    EXPECT_NEAR(ledger.W[k], ledger.E[k] - ledger.E[0], 1e-10);
    EXPECT_NEAR(ledger.S[k], 0.0, 1e-6);
  }
  EXPECT_GT(std::abs(ledger.W.back()), 1e-3);
}

TEST(Ledger, PiecewiseQuenchBooksJumpAsWork) {
  const Operator h0 = 0.5 * qubit::sigma3();
  const Operator h1 = 0.7 * qubit::sigma1();
  const Schedule schedule(
      [&](double t) { return GklsGenerator(t < 1.0 ? h0 : h1, {}); }, {0.0, 1.0},
      ScheduleMode::kPiecewiseConstant);
  const DensityMatrix rho0(Operator::Constant(2, 2, 0.5));
  const ThermoLedger ledger = first_law_ledger(schedule, rho0, {0.0, 0.5, 1.5, 2.0});
  const Matrix u = (h0 * (-kI * 1.0)).exp();
  const Operator rho1 = u * rho0.matrix() * u.adjoint();
  const double jump = (rho1 * (h1 - h0)).trace().real();
  EXPECT_NEAR(ledger.W[1], 0.0, 1e-12);
  EXPECT_NEAR(ledger.W[2], jump, 1e-10);
  EXPECT_NEAR(ledger.W[3], jump, 1e-10);
  for (double q : ledger.Q) EXPECT_NEAR(q, 0.0, 1e-12);
  EXPECT_LT(ledger.max_closure_defect(), 1e-10);
}

TEST(Ledger, CsvFormat) {
  const Schedule schedule([](double) { return thermal_qubit(1.0, 1.0); }, {0.0});
  LedgerOptions options;
  options.temperature = 1.0;
  const ThermoLedger ledger =
      first_law_ledger(schedule, DensityMatrix::maximally_mixed(2), {0.0, 0.5, 1.0}, options);
  std::ostringstream out;
  ledger.write_csv(out);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "t,E,W,Q,S,sigma,closure_defect");
  int rows = 0;
  while (std::getline(in, line)) {
    EXPECT_EQ(std::count(line.begin(), line.end(), ','), 6);
    ++rows;
  }
  EXPECT_EQ(rows, 3);
}

TEST(Ledger, InputValidation) {
  const Schedule schedule([](double) { return thermal_qubit(1.0, 1.0); }, {0.0});
  const DensityMatrix rho = DensityMatrix::maximally_mixed(2);
  EXPECT_THROW(first_law_ledger(schedule, rho, {}), ValidationError);
  EXPECT_THROW(first_law_ledger(schedule, rho, {0.0, 0.0}), ValidationError);
  EXPECT_THROW(first_law_ledger(schedule, DensityMatrix::maximally_mixed(3), {0.0, 1.0}),
               DimensionError);
  LedgerOptions bad;
  bad.step = 0.0;
  EXPECT_THROW(first_law_ledger(schedule, rho, {0.0, 1.0}, bad), ValidationError);
}

TEST(EntropyProduction, ExactForQuadraticData) {
  const std::vector<double> t = {0.0, 0.3, 0.5, 1.2, 2.0};
  std::vector<double> s;
  std::vector<double> q;
  for (double x : t) {
    s.push_back(0.1 + 0.4 * x - 0.05 * x * x);
    q.push_back(-0.2 * x + 0.03 * x * x);
  }
  const double temperature = 0.5;
  const std::vector<double> sigma = entropy_production(t, s, q, temperature);
  ASSERT_EQ(sigma.size(), t.size());
  for (std::size_t k = 0; k < t.size(); ++k) {
    const double expected = (0.4 - 0.1 * t[k]) - (-0.2 + 0.06 * t[k]) / temperature;
    EXPECT_NEAR(sigma[k], expected, 1e-12) << "t = " << t[k];
  }
  EXPECT_THROW(entropy_production(t, s, q, 0.0), ValidationError);
}

TEST(EntropyBalance, EquilibriumProducesNoEntropy) {
  const double temperature = 0.6;
  const GklsGenerator g = thermal_qubit(1.0, temperature);
  const Schedule schedule([&](double) { return g; }, {0.0}, ScheduleMode::kContinuous);
  const DensityMatrix gibbs = gibbs_state(g.hamiltonian(), 1.0 / temperature);
  const ThermoLedger ledger = entropy_balance(schedule, gibbs, linspace(0.0, 2.0, 5), temperature);
  for (double s : ledger.sigma) EXPECT_NEAR(s, 0.0, 1e-10);
}

TEST(EntropyBalance, RelaxationProducesPositiveEntropy) {
  const double temperature = 0.6;
  const GklsGenerator g = thermal_qubit(1.0, temperature);
  const Schedule schedule([&](double) { return g; }, {0.0}, ScheduleMode::kContinuous);
  const ThermoLedger ledger =
      entropy_balance(schedule, DensityMatrix::basis_state(2, 1), linspace(0.0, 3.0, 61), temperature);
  for (double s : ledger.sigma) EXPECT_GT(s, 0.0);
}

TEST(EntropyBalance, RequiresGibbsStationaryGenerator) {
  const GklsGenerator g = thermal_qubit(1.0, 0.6);
  const Schedule schedule([&](double) { return g; }, {0.0});
  EXPECT_THROW(entropy_balance(schedule, DensityMatrix::maximally_mixed(2), {0.0, 1.0}, 2.0),
               PreconditionError);
}

}  // namespace
}  // namespace qds
