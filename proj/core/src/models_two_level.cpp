#include <cmath>

#include "qds/errors.hpp"
#include "qds/models.hpp"

namespace qds::models {
namespace {

void check_rate(double r, const char* name) {
  if (!std::isfinite(r) || r < 0.0) {
    throw ValidationError(std::string(name) + " must be finite and >= 0");
  }
}

void check(const TwoLevelParams& p) {
  if (!std::isfinite(p.omega)) throw ValidationError("omega must be finite");
  check_rate(p.gamma_down, "gamma_down");
  check_rate(p.gamma_up, "gamma_up");
  check_rate(p.delta, "delta");
}

}  // namespace

GklsGenerator two_level_generator(const TwoLevelParams& p) {
  check(p);
  std::vector<Operator> jumps;
  if (p.gamma_down > 0.0) jumps.push_back(std::sqrt(p.gamma_down) * qubit::sigma_minus());
  if (p.gamma_up > 0.0) jumps.push_back(std::sqrt(p.gamma_up) * qubit::sigma_plus());
  if (p.delta > 0.0) {
    const double scale = p.convention == DephasingConvention::kCoherenceRate
                             ? 0.5 * std::sqrt(p.delta)
                             : std::sqrt(p.delta);
    jumps.push_back(scale * qubit::sigma3());
  }
  return GklsGenerator(0.5 * p.omega * qubit::sigma3(), std::move(jumps));
}

double two_level_coherence_decay_rate(const TwoLevelParams& p) {
  check(p);
  const double relax = 0.5 * (p.gamma_down + p.gamma_up);
  return p.convention == DephasingConvention::kCoherenceRate ? relax + 0.5 * p.delta
                                                             : relax + 2.0 * p.delta;
}

DensityMatrix two_level_analytic(const TwoLevelParams& p, const DensityMatrix& rho0, double t) {
  check(p);
  if (rho0.dim().value() != 2) throw DimensionError("two-level model needs a 2x2 state");
  if (!(t >= 0.0)) throw ValidationError("time must be >= 0");
  const double p1_0 = rho0(0, 0).real();
  const Complex alpha_0 = rho0(1, 0);

  const double total = p.gamma_down + p.gamma_up;
  double p1 = p1_0;
  if (total > 0.0) {
    const double decay = std::exp(-total * t);
    p1 = p1_0 * decay + (p.gamma_down / total) * (1.0 - decay);
  }
  const Complex alpha =
      alpha_0 * std::exp(Complex(-two_level_coherence_decay_rate(p) * t, -p.omega * t));

  Operator rho(2, 2);
  rho(0, 0) = p1;
  rho(1, 1) = 1.0 - p1;
  rho(1, 0) = alpha;
  rho(0, 1) = std::conj(alpha);
  return DensityMatrix::unchecked(std::move(rho));
}

DensityMatrix two_level_stationary(const TwoLevelParams& p) {
  check(p);
  const double total = p.gamma_down + p.gamma_up;
  if (total <= 0.0) throw PreconditionError("no relaxation: stationary state is not unique");
  Operator rho = Operator::Zero(2, 2);
  rho(0, 0) = p.gamma_down / total;
  rho(1, 1) = p.gamma_up / total;
  return DensityMatrix::unchecked(std::move(rho));
}

}  // namespace qds::models
