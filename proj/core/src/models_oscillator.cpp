#include <cmath>

#include "qds/errors.hpp"
#include "qds/models.hpp"

namespace qds::models {
namespace {

void check(const OscillatorParams& p) {
  if (!std::isfinite(p.omega)) throw ValidationError("omega must be finite");
  if (!std::isfinite(p.gamma_down) || !std::isfinite(p.gamma_up) || p.gamma_up < 0.0 ||
      !(p.gamma_down > p.gamma_up)) {
    throw ValidationError("oscillator needs gamma_down > gamma_up >= 0");
  }
  if (p.n_trunc < 2) throw ValidationError("n_trunc must be >= 2");
}

}  // namespace

GklsGenerator oscillator_generator(const OscillatorParams& p) {
  check(p);
  const Operator a = fock::annihilation(p.n_trunc);
  std::vector<Operator> jumps{std::sqrt(p.gamma_down) * a};
  if (p.gamma_up > 0.0) jumps.push_back(std::sqrt(p.gamma_up) * a.adjoint());
  return GklsGenerator(p.omega * fock::number(p.n_trunc), std::move(jumps));
}

LeakageReport truncation_leakage(const DensityMatrix& rho, double limit) {
  const Index n = rho.dim().value();
  LeakageReport r;
  for (Index k = std::max<Index>(0, n - 2); k < n; ++k) r.top_population += rho(k, k).real();
  r.valid = r.top_population <= limit;
  return r;
}

OscillatorInitialState OscillatorInitialState::coherent(Complex beta) {
  OscillatorInitialState s;
  s.kind = Kind::kCoherent;
  s.amplitude = beta;
  return s;
}

OscillatorInitialState OscillatorInitialState::thermal(double mean_number) {
  if (!(mean_number >= 0.0)) throw ValidationError("thermal mean number must be >= 0");
  OscillatorInitialState s;
  s.kind = Kind::kThermal;
  s.mean_number = mean_number;
  return s;
}

Complex OscillatorInitialState::characteristic(Complex z) const {
  const double z2 = std::norm(z);
  if (kind == Kind::kThermal) return std::exp(-z2 * (mean_number + 0.5));
  // <beta| D(-conj z) |beta>
  return std::exp(-0.5 * z2 - std::conj(z) * std::conj(amplitude) + z * amplitude);
}

DensityMatrix OscillatorInitialState::truncated(Index levels) const {
  const HilbertDim dim(levels);
  if (kind == Kind::kThermal) {
    const double q = mean_number / (mean_number + 1.0);
    Operator rho = Operator::Zero(dim.value(), dim.value());
    double w = 1.0;
    double total = 0.0;
    for (Index n = 0; n < levels; ++n) {
      rho(n, n) = w;
      total += w;
      w *= q;
    }
    return DensityMatrix::unchecked(rho / total);
  }
  Vector psi(levels);
  psi(0) = std::exp(-0.5 * std::norm(amplitude));
  for (Index n = 1; n < levels; ++n) {
    psi(n) = psi(n - 1) * amplitude / std::sqrt(static_cast<double>(n));
  }
  return DensityMatrix::pure(psi);
}

Complex generating_function_oracle(const OscillatorParams& p,
                                   const OscillatorInitialState& initial, Complex z, double t) {
  check(p);
  const double kappa = p.gamma_down - p.gamma_up;
  const Complex z_t = z * std::exp(Complex(-0.5 * kappa * t, -p.omega * t));
  const double a_t = 0.5 * std::norm(z) * (p.gamma_down + p.gamma_up) / kappa *
                     (1.0 - std::exp(-kappa * t));
  return std::exp(-a_t) * initial.characteristic(z_t);
}

double oscillator_mean_number(const OscillatorParams& p, double n0, double t) {
  check(p);
  const double kappa = p.gamma_down - p.gamma_up;
  const double n_inf = p.gamma_up / kappa;
  return n_inf + (n0 - n_inf) * std::exp(-kappa * t);
}

DensityMatrix oscillator_stationary(const OscillatorParams& p) {
  check(p);
  const double q = p.gamma_up / p.gamma_down;
  Operator rho = Operator::Zero(p.n_trunc, p.n_trunc);
  double w = 1.0;
  double total = 0.0;
  for (Index n = 0; n < p.n_trunc; ++n) {
    rho(n, n) = w;
    total += w;
    w *= q;
  }
  return DensityMatrix::unchecked(rho / total);
}

}  // namespace qds::models
