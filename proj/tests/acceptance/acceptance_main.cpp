// Acceptance suite. Each check prints one PASS/FAIL line with its measured
// figures; the exit status is the number of failing checks.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include <unsupported/Eigen/MatrixFunctions>

#include "qds/davies.hpp"
#include "qds/errors.hpp"
#include "qds/gkls.hpp"
#include "qds/models.hpp"
#include "qds/operators.hpp"
#include "qds/propagation.hpp"
#include "qds/thermo.hpp"
#include "qds/unraveling.hpp"
#include "test_support.hpp"

using namespace qds;
using namespace qds::testing;

namespace {

constexpr Complex kI{0.0, 1.0};

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::string sci(double v) { return fmt("%.3e", v); }

double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

// ---------------------------------------------------------------------------

Outcome two_level_exact() {
  Rng rng(101);
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    models::TwoLevelParams p;
    p.omega = uniform(rng, 0.05, 2.0);
    p.gamma_down = uniform(rng, 0.05, 2.0);
    p.gamma_up = uniform(rng, 0.05, 2.0);
    p.delta = uniform(rng, 0.0, 1.0);
    const double g_min = std::min(p.gamma_down, p.gamma_up);
    const Superoperator l = generator_superoperator(models::two_level_generator(p));
    const DensityMatrix rho0 = random_state(2, rng);
    const double t_end = 20.0 / g_min;
    for (int k = 0; k <= 40; ++k) {
      const double t = t_end * k / 40.0;
      const Matrix diff =
          evolve_exact(l, t, rho0).matrix() - models::two_level_analytic(p, rho0, t).matrix();
      worst = std::max(worst, max_abs(diff));
    }
  }
  return {worst <= 1e-8, "20 parameter sets, max entry error " + sci(worst)};
}

Outcome gibbs_ratio() {
  double worst = 0.0;
  double p1 = 0.0;
  double p2 = 0.0;
  const std::vector<std::pair<double, double>> cases = {
      {1.0, 1.0 / std::log(2.0)}, {0.7, 0.3}, {2.0, 5.0}, {1.3, 1.0}};
  for (std::size_t c = 0; c < cases.size(); ++c) {
    const auto [omega, temperature] = cases[c];
    models::TwoLevelParams p;
    p.omega = omega;
    p.gamma_down = 0.4;
    p.gamma_up = 0.4 * std::exp(-omega / temperature);
    const GklsGenerator g = models::two_level_generator(p);
    const Operator stationary = stationary_by_lu(generator_superoperator(g).matrix(), 2);
    const Operator gibbs = ((-1.0 / temperature) * g.hamiltonian()).exp();
    const Operator expected = gibbs / gibbs.trace();
    worst = std::max(worst, trace_norm(stationary - expected));
    if (c == 0) {
      p1 = stationary(0, 0).real();
      p2 = stationary(1, 1).real();
    }
  }
  const bool populations =
      std::abs(p1 - 2.0 / 3.0) <= 1e-10 && std::abs(p2 - 1.0 / 3.0) <= 1e-10;
  return {worst <= 1e-10 && populations,
          "trace-norm distance " + sci(worst) + ", omega/T = ln 2 gives p1 = " +
              fmt("%.12f", p1) + ", p2 = " + fmt("%.12f", p2)};
}

Complex displacement_expectation(const Operator& rho, Complex z, Index pad) {
  // e^{z a - conj(z) a+} on a padded space so the truncation edge is far away.
  const Index n = rho.rows() + pad;
  const Operator a = fock::annihilation(n);
  const Operator d = (z * a - std::conj(z) * a.adjoint()).exp();
  return (rho * d.topLeftCorner(rho.rows(), rho.rows())).trace();
}

Outcome oscillator_moments() {
  models::OscillatorParams p;
  p.omega = 1.3;
  p.gamma_down = 1.0;
  p.gamma_up = 0.3;
  p.n_trunc = 40;
  const Index n = p.n_trunc;
  const GklsGenerator g = models::oscillator_generator(p);
  const Superoperator l = generator_superoperator(g);
  const double dt = 0.25;
  const Superoperator step = propagator_exact(l, dt);
  const Operator number = fock::number(n);
  const std::vector<Complex> zs = {{0.3, 0.0}, {0.0, 0.5}, {0.6, -0.6}, {-1.0, 0.0}};

  double worst_n = 0.0;
  double worst_f = 0.0;
  double worst_leak = 0.0;
  for (const auto& init : {models::OscillatorInitialState::coherent({0.8, 0.4}),
                           models::OscillatorInitialState::thermal(0.6)}) {
    Operator rho = init.truncated(n).matrix();
    const double n0 = std::real((rho * number).trace());
    for (int k = 0; k <= 16; ++k) {
      const double t = k * dt;
      if (k > 0) rho = step.apply(rho);
      const DensityMatrix state = DensityMatrix::unchecked(rho);
      worst_leak = std::max(worst_leak, models::truncation_leakage(state).top_population);
      const double mean = std::real((rho * number).trace());
      worst_n = std::max(worst_n, std::abs(mean - models::oscillator_mean_number(p, n0, t)));
      for (Complex z : zs) {
        const Complex f = displacement_expectation(rho, z, 40);
        worst_f = std::max(worst_f, std::abs(f - models::generating_function_oracle(p, init, z, t)));
      }
    }
  }

  // Stationary state against p_n ~ (g_up / g_down)^n.
  const Operator stationary = stationary_by_lu(l.matrix(), n);
  RealVector expected(n);
  const double q = p.gamma_up / p.gamma_down;
  for (Index k = 0; k < n; ++k) expected(k) = std::pow(q, static_cast<double>(k));
  expected /= expected.sum();
  const double stat_err = trace_norm(stationary - expected.cast<Complex>().asDiagonal().toDenseMatrix());

  const bool ok = worst_n <= 1e-6 && worst_f <= 1e-6 && worst_leak < 1e-10 && stat_err <= 1e-8;
  return {ok, "<n> error " + sci(worst_n) + ", F_t error " + sci(worst_f) + ", leakage " +
                  sci(worst_leak) + ", stationary error " + sci(stat_err)};
}

Outcome semigroup_cp() {
  Rng rng(404);
  int failures = 0;
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const Index d = 2 + trial % 3;
    const GklsGenerator g = random_generator(d, 1 + trial % 3, rng);
    const Superoperator l = generator_superoperator(g);
    for (double t : {0.1, 1.0, 10.0}) {
      const CpReport r = is_completely_positive(propagator_exact(l, t), 1e-10);
      worst = std::min(worst, r.min_eigenvalue / std::max(r.choi_norm, 1e-300));
      if (!r.completely_positive) ++failures;
    }
  }
  const CpReport transpose = is_completely_positive(transposition_map(HilbertDim(2)));
  const bool ok = failures == 0 && !transpose.completely_positive && transpose.min_eigenvalue < 0;
  return {ok, "300 propagators, " + std::to_string(failures) +
                  " failures, worst lambda_min/||C|| " + sci(worst) +
                  "; transposition lambda_min " + fmt("%.3f", transpose.min_eigenvalue)};
}

Outcome kraus_round_trip() {
  Rng rng(505);
  double worst_map = 0.0;
  double worst_comp = 0.0;
  for (int trial = 0; trial < 60; ++trial) {
    const Index d = 2 + trial % 4;
    const Superoperator s = trial % 2 == 0
                                ? random_cptp(d, 1 + trial % 5, rng)
                                : propagator_exact(generator_superoperator(random_generator(d, 2, rng)),
                                                   uniform(rng, 0.05, 3.0));
    const KrausSet k = kraus_from_choi(choi_of(s));
    worst_map = std::max(worst_map, max_abs(super_from_kraus(k).matrix() - s.matrix()));
    worst_comp = std::max(worst_comp, max_abs(k.completeness() - Matrix::Identity(d, d)));
  }
  return {worst_map <= 1e-10 && worst_comp <= 1e-10,
          "60 maps, reconstruction error " + sci(worst_map) + ", completeness error " +
              sci(worst_comp)};
}

Outcome dyson_agreement() {
  models::TwoLevelParams p;
  p.omega = 1.0;
  p.gamma_down = 1.0;
  const GklsGenerator g = models::two_level_generator(p);
  const double t = 0.1 / p.gamma_down;
  const DensityMatrix rho0 = DensityMatrix::pure(Vector::Constant(2, 1.0 / std::sqrt(2.0)));
  const auto sums = dyson_partial_sums(g, t, rho0, 6);
  const DensityMatrix exact = evolve_exact(generator_superoperator(g), t, rho0);
  const double err = max_abs(sums.back().matrix() - exact.matrix());
  bool monotone = true;
  double previous = -1.0;
  for (const auto& s : sums) {
    const double tr = s.matrix().trace().real();
    if (tr < previous) monotone = false;
    previous = tr;
  }
  return {err <= 1e-6 && monotone,
          "order 6 error " + sci(err) + ", partial-sum traces " +
              (monotone ? "nondecreasing" : "NOT monotone") + " (last " + fmt("%.12f", previous) + ")"};
}

struct UnravelResult {
  std::size_t exceptions = 0;
  std::size_t total = 0;
  double exponent = 0.0;
  double c = 0.0;
};

UnravelResult unravel_case(const GklsGenerator& g, const DensityMatrix& rho0, double gamma,
                           std::uint64_t seed) {
  const double dt = 1e-3 / gamma;
  std::vector<double> grid;
  for (int k = 1; k <= 20; ++k) grid.push_back(k * 0.1 / gamma);
  const Superoperator l = generator_superoperator(g);

  // Weak bias of the scheme itself under dt halving.
  auto bias = [&](double h) {
    const auto means = em_mean_recursion(g, rho0, grid, h);
    double b = 0.0;
    for (std::size_t k = 0; k < grid.size(); ++k) {
      b = std::max(b, max_abs(means[k] - evolve_exact(l, grid[k], rho0).matrix()));
    }
    return b;
  };
  const double b1 = bias(dt);
  const double b2 = bias(dt / 2.0);

  TrajectoryConfig cfg;
  cfg.dt = dt;
  cfg.n_traj = 10000;
  cfg.seed = seed;
  const EnsembleEstimate est = ensemble_density(g, rho0, grid, cfg);

  UnravelResult r;
  r.exponent = std::log2(b1 / b2);
  r.c = b1 / dt;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const Matrix exact = evolve_exact(l, grid[k], rho0).matrix();
    for (Index i = 0; i < exact.rows(); ++i)
      for (Index j = 0; j < exact.cols(); ++j) {
        ++r.total;
        const double err = std::abs(est.mean[k](i, j) - exact(i, j));
        if (err > 3.0 * est.standard_error[k](i, j) + r.c * dt) ++r.exceptions;
      }
  }
  return r;
}

Outcome unraveling_consistency() {
  const DensityMatrix plus = DensityMatrix::pure(Vector::Constant(2, 1.0 / std::sqrt(2.0)));
  models::TwoLevelParams dephasing;
  dephasing.omega = 1.0;
  dephasing.delta = 1.0;
  models::TwoLevelParams damping;
  damping.omega = 1.0;
  damping.gamma_down = 1.0;

  const UnravelResult a = unravel_case(models::two_level_generator(dephasing), plus, 1.0, 7);
  const UnravelResult b = unravel_case(models::two_level_generator(damping), plus, 1.0, 8);
  const double rate = static_cast<double>(a.exceptions + b.exceptions) /
                      static_cast<double>(a.total + b.total);
  const bool exponents = a.exponent >= 0.7 && a.exponent <= 1.3 && b.exponent >= 0.7 &&
                         b.exponent <= 1.3;
  return {rate <= 0.01 && exponents,
          "exceptions " + std::to_string(a.exceptions + b.exceptions) + "/" +
              std::to_string(a.total + b.total) + ", weak-order exponents " +
              fmt("%.3f", a.exponent) + " (dephasing), " + fmt("%.3f", b.exponent) + " (damping)"};
}

Superoperator literal_qubit_davies(double eps, double lambda, double r_plus, double r_minus) {
  // -i eps/2 [s3, .] + lambda^2/2 (R(eps)([s-, . s+] + [s- ., s+])
  //                                + R(-eps)([s+, . s-] + [s+ ., s-]))
  const Operator sp = qubit::sigma_plus();
  const Operator sm = qubit::sigma_minus();
  const Operator id = Operator::Identity(2, 2);
  auto pair = [&](const Operator& a, const Operator& b) {
    // [a, . b] + [a ., b] = 2 a . b - . b a - b a .
    return super_from_left_right(a, b) * 2.0 - super_from_left_right(id, b * a) -
           super_from_left_right(b * a, id);
  };
  Superoperator l = commutator_super(qubit::sigma3()) * Complex(0.0, -eps / 2.0);
  l += (pair(sm, sp) * (lambda * lambda / 2.0 * r_plus));
  l += (pair(sp, sm) * (lambda * lambda / 2.0 * r_minus));
  return l;
}

Outcome davies_construction() {
  const double eps = 1.2;
  const double lambda = 0.3;
  const double beta = 0.8;
  const Operator h = 0.5 * eps * qubit::sigma3();
  const std::vector<Operator> s = {qubit::sigma1()};

  // Generic spectral data (no KMS) against the literal qubit generator.
  const SpectralFunction lor = spectral_preset("lorentzian", {{"amplitude", 1.0}, {"tau", 0.7}});
  const DaviesGenerator generic = build_davies(h, s, lor, lambda);
  const double literal_err =
      max_abs(generator_superoperator(generic.generator).matrix() -
              literal_qubit_davies(eps, lambda, lor(eps)(0, 0).real(), lor(-eps)(0, 0).real()).matrix());

  // KMS data.
  const SpectralFunction kms =
      spectral_preset("ohmic-cubed-exp", {{"amplitude", 1.0}, {"omega_c", 2.0}, {"beta", beta}});
  const DaviesGenerator dg = build_davies(h, s, kms, lambda);
  const Superoperator l = generator_superoperator(dg.generator);
  const Operator gibbs_raw = ((-beta) * h).exp();
  const Operator gibbs = gibbs_raw / gibbs_raw.trace();
  const double gibbs_defect = max_abs(l.apply(gibbs));
  const Superoperator ham = commutator_super(h) * (-kI);
  const Superoperator dissipator = l - ham;
  const double commute = max_abs((dissipator * ham - ham * dissipator).matrix());

  const double r_max = std::max(kms(eps)(0, 0).real(), kms(-eps)(0, 0).real());
  const double t_relax = 50.0 / (lambda * lambda * r_max);
  Rng rng(808);
  double relax = 0.0;
  for (int k = 0; k < 5; ++k) {
    const DensityMatrix rho0 = k == 0 ? DensityMatrix::basis_state(2, 1) : random_state(2, rng);
    relax = std::max(relax, trace_norm(evolve_exact(l, t_relax, rho0).matrix() - gibbs));
  }
  const bool ok = literal_err <= 1e-12 && gibbs_defect <= 1e-10 && commute <= 1e-10 && relax <= 1e-6;
  return {ok, "literal generator error " + sci(literal_err) + ", L(Gibbs) " + sci(gibbs_defect) +
                  ", [D, H] " + sci(commute) + ", relaxation distance " + sci(relax)};
}

Operator ramp_hamiltonian(double t, double eps0, double span, double tau) {
  const double eps = eps0 + 0.5 * span * (1.0 - std::cos(std::numbers::pi * t / tau));
  return 0.5 * eps * qubit::sigma3();
}

Operator ramp_derivative(double t, double span, double tau) {
  const double d = 0.5 * span * std::numbers::pi / tau * std::sin(std::numbers::pi * t / tau);
  return 0.5 * d * qubit::sigma3();
}

Outcome thermodynamics() {
  Rng rng(909);
  std::vector<std::string> notes;
  bool ok = true;

  // (a) H-theorem on bistochastic generators.
  double worst_drop = 0.0;
  {
    models::TwoLevelParams deph;
    deph.delta = 0.5;
    std::vector<double> grid;
    for (int k = 0; k <= 60; ++k) grid.push_back(0.2 * k);
    const DensityMatrix plus = DensityMatrix::pure(Vector::Constant(2, 1.0 / std::sqrt(2.0)));
    auto r = h_theorem_check(models::two_level_generator(deph), plus, grid);
    worst_drop = std::max(worst_drop, r.worst_drop);
    ok = ok && r.holds;
    for (int trial = 0; trial < 10; ++trial) {
      const Index d = 2 + trial % 3;
      r = h_theorem_check(random_unital_generator(d, 2, rng), random_pure_state(d, rng), grid);
      worst_drop = std::max(worst_drop, r.worst_drop);
      ok = ok && r.holds;
    }
  }
  notes.push_back("(a) worst entropy drop " + sci(worst_drop));

  // (b) contractivity of relative entropy.
  double worst_margin = 1.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const Index d = 2 + trial % 7;
    const Superoperator map = random_cptp(d, 1 + trial % 4, rng);
    const ContractivityReport r = contractivity_check(map, random_state(d, rng), random_state(d, rng));
    worst_margin = std::min(worst_margin, r.margin);
    ok = ok && r.holds;
  }
  notes.push_back("(b) worst margin " + sci(worst_margin));

  // (c) first-law closure for the driven Davies qubit.
  const double beta = 1.0;
  const double lambda = 0.4;
  const double eps0 = 1.0;
  const double span = 0.8;
  const double tau = 10.0;
  const SpectralFunction kms =
      spectral_preset("ohmic-cubed-exp", {{"amplitude", 1.0}, {"omega_c", 2.0}, {"beta", beta}});
  const Schedule driven(
      [&](double t) {
        return build_davies(ramp_hamiltonian(t, eps0, span, tau), {qubit::sigma1()}, kms, lambda)
            .generator;
      },
      {0.0, tau}, ScheduleMode::kContinuous);
  const DensityMatrix excited = DensityMatrix::basis_state(2, 1);
  std::vector<double> grid;
  for (int k = 0; k <= 20; ++k) grid.push_back(tau * k / 20.0);
  auto closure = [&](double step) {
    LedgerOptions o;
    o.step = step;
    o.hamiltonian_derivative = [&](double t) { return ramp_derivative(t, span, tau); };
    return first_law_ledger(driven, excited, grid, o).max_closure_defect();
  };
  const double fine = closure(1e-3);
  const double c1 = closure(0.5);
  const double c2 = closure(0.25);
  const double c3 = closure(0.125);
  const double order = 0.5 * (std::log2(c1 / c2) + std::log2(c2 / c3));
  const bool closure_ok = fine <= 1e-6 && order >= 3.5 && order <= 4.5;
  ok = ok && closure_ok;
  notes.push_back("(c) closure " + sci(fine) + " at step 1e-3, measured order " + fmt("%.2f", order));

  // (d) entropy production on the relaxing qubit.
  const Operator h_fixed = 0.5 * eps0 * qubit::sigma3();
  const GklsGenerator relaxing = build_davies(h_fixed, {qubit::sigma1()}, kms, lambda).generator;
  const Schedule constant([&](double) { return relaxing; }, {0.0});
  std::vector<double> sgrid;
  for (int k = 0; k <= 200; ++k) sgrid.push_back(0.25 * k);
  double worst_sigma = 1.0;
  for (int k = 0; k < 4; ++k) {
    const DensityMatrix rho0 = k == 0 ? excited : random_state(2, rng);
    const ThermoLedger ledger = entropy_balance(constant, rho0, sgrid, 1.0 / beta, 1e-2);
    for (double s : ledger.sigma) worst_sigma = std::min(worst_sigma, s);
  }
  ok = ok && worst_sigma >= -1e-6;
  notes.push_back("(d) min sigma " + sci(worst_sigma));

  std::string detail;
  for (const auto& n : notes) detail += (detail.empty() ? "" : "; ") + n;
  return {ok, detail};
}

Outcome kick_decoherence() {
  models::KickModelParams p;
  p.lattice_size = 8;
  p.kick_rates = {{1, 0.3}, {-1, 0.3}, {2, 0.15}, {3, 0.05}};
  const Index n = p.lattice_size;
  const Superoperator l = generator_superoperator(models::kick_decoherence_generator(p));
  Rng rng(1010);
  const DensityMatrix rho0 = random_state(n, rng);
  double worst = 0.0;
  double worst_pop = 0.0;
  for (double t : {0.1, 0.5, 1.0, 3.0, 7.5}) {
    const Matrix rho = evolve_exact(l, t, rho0).matrix();
    for (Index x = 0; x < n; ++x)
      for (Index y = 0; y < n; ++y) {
        Complex exponent = 0.0;
        for (const auto& [m, rate] : p.kick_rates) {
          const double k = 2.0 * std::numbers::pi * m / static_cast<double>(n);
          exponent += rate * (1.0 - std::exp(-kI * k * static_cast<double>(x - y)));
        }
        const Complex expected = rho0(x, y) * std::exp(-t * exponent);
        worst = std::max(worst, std::abs(rho(x, y) - expected));
        if (x == y) worst_pop = std::max(worst_pop, std::abs(rho(x, x) - rho0(x, x)));
      }
  }
  return {worst <= 1e-10 && worst_pop <= 1e-13,
          "closed-form error " + sci(worst) + ", population drift " + sci(worst_pop)};
}

Outcome bloch_boltzmann() {
  Rng rng(1111);
  using models::BlochBoltzmannDiscrete;
  const std::vector<Operator> units = models::matrix_unit_basis(2);

  // Quantum case: diagonal PSD kernel on the matrix-unit basis, nonzero drift.
  BlochBoltzmannDiscrete m;
  m.n_levels = 2;
  m.velocities = {-0.5, 0.5};
  m.dv = 1.0;
  m.basis = units;
  // h on E_11 and E_22 only keeps the drift hermitian.
  m.drift = {{0.4, 0.0, 0.0, -0.4}, {1.1, 0.0, 0.0, -1.1}};
  m.kernel.assign(2, std::vector<Matrix>(2));
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      RealVector diag(4);
      for (Index a = 0; a < 4; ++a) diag(a) = uniform(rng, 0.05, 0.6);
      m.kernel[i][j] = diag.cast<Complex>().asDiagonal();
    }
  models::VelocityState state = {random_state(2, rng).matrix() * 0.3,
                                 random_state(2, rng).matrix() * 0.7};
  double worst_trace = 0.0;
  double worst_psd = 0.0;
  for (int step = 0; step < 1000; ++step) {
    state = models::bloch_boltzmann_step(m, state, 0.01);
    worst_trace = std::max(worst_trace, std::abs(models::total_trace(m, state) - 1.0));
    for (const auto& block : state) worst_psd = std::min(worst_psd, hermitian_eigenvalues(block)(0));
  }

  // Classical reduction: diagonal drift and diagonal initial blocks. The
  // populations q(i, c) then follow a Pauli equation with rates
  // (j, d) -> (i, c) equal to K_aa(i, j) dv for S_a = |c><d|.
  BlochBoltzmannDiscrete c = m;
  c.velocities = {-1.0, 0.0, 1.0};
  c.dv = 0.5;
  c.drift = {{0.3, 0, 0, -0.3}, {0.0, 0, 0, 0.0}, {-0.2, 0, 0, 0.2}};
  c.kernel.assign(3, std::vector<Matrix>(3));
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      RealVector diag(4);
      for (Index a = 0; a < 4; ++a) diag(a) = uniform(rng, 0.0, 0.8);
      c.kernel[i][j] = diag.cast<Complex>().asDiagonal();
    }
  const int nv = 3;
  RealMatrix pauli = RealMatrix::Zero(2 * nv, 2 * nv);  // index i*2 + level
  for (int i = 0; i < nv; ++i)
    for (int j = 0; j < nv; ++j)
      for (int cl = 0; cl < 2; ++cl)
        for (int dl = 0; dl < 2; ++dl) {
          const double rate = c.kernel[i][j](cl * 2 + dl, cl * 2 + dl).real() * c.dv;
          pauli(i * 2 + cl, j * 2 + dl) += rate;
          pauli(j * 2 + dl, j * 2 + dl) -= rate;
        }
  RealVector q(2 * nv);
  for (Index k = 0; k < q.size(); ++k) q(k) = uniform(rng, 0.1, 1.0);
  q /= q.sum() * c.dv;
  models::VelocityState cs;
  for (int i = 0; i < nv; ++i) {
    Operator block = Operator::Zero(2, 2);
    block(0, 0) = q(i * 2);
    block(1, 1) = q(i * 2 + 1);
    cs.push_back(block);
  }
  const double dt = 0.01;
  for (int step = 0; step < 300; ++step) cs = models::bloch_boltzmann_step(c, cs, dt);
  const RealVector q_t = (pauli * 3.0).exp() * q;
  double worst_pauli = 0.0;
  double worst_block = 0.0;
  for (int i = 0; i < nv; ++i) {
    for (int cl = 0; cl < 2; ++cl) {
      worst_pauli = std::max(worst_pauli, std::abs(cs[i](cl, cl).real() - q_t(i * 2 + cl)));
    }
    worst_block = std::max(worst_block,
                           std::abs(cs[i].trace().real() - q_t(i * 2) - q_t(i * 2 + 1)));
  }

  const bool ok = worst_trace <= 1e-10 && worst_psd >= -1e-8 && worst_pauli <= 1e-8 &&
                  worst_block <= 1e-8;
  return {ok, "trace drift " + sci(worst_trace) + " over 1000 steps, min block eigenvalue " +
                  sci(worst_psd) + ", Pauli reduction error " + sci(worst_pauli) +
                  " (block traces " + sci(worst_block) + ")"};
}

Outcome spin_boson() {
  const double lambda = 0.7;
  const double omega_c = 2.0;
  models::SpinBosonCoupling super;
  super.lambda = lambda;
  super.omega_c = omega_c;
  super.s = 2.0;
  super.f = [omega_c](double w) { return Complex(w * std::exp(-w / omega_c), 0.0); };
  const models::SpinBosonOverlap o = models::spin_boson_overlap(super, 1e-8);
  const double norm_exact = lambda * lambda * omega_c / 2.0;
  const double norm_err = o.norm_g_sq ? std::abs(*o.norm_g_sq - norm_exact) / norm_exact : 1.0;
  const double overlap_err = std::abs(o.overlap - std::exp(-lambda * lambda * omega_c)) /
                             std::exp(-lambda * lambda * omega_c);

  bool divergent = true;
  for (double s : {1.0, 0.5, 0.0}) {
    models::SpinBosonCoupling c = super;
    c.s = s;
    c.f = [s, omega_c](double w) {
      return Complex(std::pow(w, s / 2.0) * std::exp(-w / omega_c), 0.0);
    };
    const auto r = models::spin_boson_overlap(c);
    divergent = divergent && !r.norm_g_sq.has_value() && r.overlap == 0.0;
  }

  models::SpinBosonCoupling flat = super;
  flat.s = 0.0;
  flat.f = [omega_c](double w) { return Complex(std::exp(-w / omega_c), 0.0); };
  const auto feas = models::dephasing_feasibility(flat);
  const auto feas_super = models::dephasing_feasibility(super);
  const bool flags = feas.incompatible && feas.markovian_dephasing && !feas.cloud_norm_finite &&
                     !feas_super.incompatible && feas_super.cloud_norm_finite &&
                     !feas_super.markovian_dephasing;

  const bool ok = norm_err <= 1e-8 && overlap_err <= 1e-8 && divergent && flags;
  return {ok, "||g||^2 relative error " + sci(norm_err) + ", overlap relative error " +
                  sci(overlap_err) + ", s <= 1 " + (divergent ? "DIVERGENT" : "not divergent") +
                  ", R(0) > 0 incompatibility " + (flags ? "flagged" : "NOT flagged")};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> checks = {
      {"two-level exact dynamics", two_level_exact},
      {"Gibbs ratio stationary state", gibbs_ratio},
      {"oscillator moments vs generating function", oscillator_moments},
      {"complete positivity of semigroups", semigroup_cp},
      {"Kraus round trip", kraus_round_trip},
      {"Dyson expansion vs exponential", dyson_agreement},
      {"unraveling consistency", unraveling_consistency},
      {"Davies construction", davies_construction},
      {"thermodynamics", thermodynamics},
      {"kick decoherence", kick_decoherence},
      {"discrete Bloch-Boltzmann", bloch_boltzmann},
      {"spin-boson no-go", spin_boson},
  };
  int failed = 0;
  for (std::size_t i = 0; i < checks.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = checks[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s %2zu %s: %s [%.1fs]\n", o.pass ? "PASS" : "FAIL", i + 1,
                checks[i].first.c_str(), o.detail.c_str(), secs);
    std::fflush(stdout);
    if (!o.pass) ++failed;
  }
  std::printf("%d/%zu checks passed\n", static_cast<int>(checks.size()) - failed, checks.size());
  return failed;
}
