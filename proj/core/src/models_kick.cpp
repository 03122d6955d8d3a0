#include <cmath>
#include <numbers>

#include "qds/errors.hpp"
#include "qds/models.hpp"

namespace qds::models {
namespace {

void check(const KickModelParams& p) {
  if (p.lattice_size < 1) throw ValidationError("lattice_size must be >= 1");
  for (const auto& [m, rate] : p.kick_rates) {
    if (!std::isfinite(rate) || rate < 0.0) throw ValidationError("kick rates must be finite and >= 0");
  }
  if (p.potential && p.potential->size() != p.lattice_size) {
    throw DimensionError("potential length must equal lattice_size");
  }
  if (p.mass && !(*p.mass > 0.0)) throw ValidationError("mass must be > 0");
}

double momentum(const KickModelParams& p, int m) {
  return 2.0 * std::numbers::pi * m / static_cast<double>(p.lattice_size);
}

}  // namespace

GklsGenerator kick_decoherence_generator(const KickModelParams& p) {
  check(p);
  const Index n = p.lattice_size;
  Operator h = Operator::Zero(n, n);
  if (p.potential) h.diagonal() += p.potential->cast<Complex>();
  if (p.mass && n > 1) {
    Operator shift = Operator::Zero(n, n);
    for (Index x = 0; x < n; ++x) shift((x + 1) % n, x) = 1.0;
    const Operator lap = shift + shift.adjoint() - 2.0 * Operator::Identity(n, n);
    h += (-0.5 / *p.mass) * lap;
  }
  std::vector<Operator> jumps;
  for (const auto& [m, rate] : p.kick_rates) {
    if (rate == 0.0) continue;
    const double k = momentum(p, m);
    Operator u = Operator::Zero(n, n);
    for (Index x = 0; x < n; ++x) u(x, x) = std::polar(std::sqrt(rate), -k * static_cast<double>(x));
    jumps.push_back(std::move(u));
  }
  return GklsGenerator(std::move(h), std::move(jumps));
}

Complex kick_decay_exponent(const KickModelParams& p, Index separation) {
  check(p);
  Complex total = 0.0;
  for (const auto& [m, rate] : p.kick_rates) {
    const double k = momentum(p, m);
    total += rate * (1.0 - std::polar(1.0, -k * static_cast<double>(separation)));
  }
  return total;
}

DensityMatrix kick_analytic(const KickModelParams& p, const DensityMatrix& rho0, double t) {
  check(p);
  if (p.potential || p.mass) {
    throw PreconditionError("closed form holds only without a Hamiltonian");
  }
  const Index n = p.lattice_size;
  if (rho0.dim().value() != n) throw DimensionError("state does not match the lattice");
  Operator rho(n, n);
  for (Index x = 0; x < n; ++x)
    for (Index y = 0; y < n; ++y) rho(x, y) = rho0(x, y) * std::exp(-t * kick_decay_exponent(p, x - y));
  return DensityMatrix::unchecked(std::move(rho));
}

}  // namespace qds::models
