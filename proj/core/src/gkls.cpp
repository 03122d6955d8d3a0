#include "qds/gkls.hpp"

#include <string>

#include "qds/errors.hpp"

namespace qds {
namespace {

constexpr Complex kI{0.0, 1.0};

}  // namespace

GklsGenerator::GklsGenerator(Operator hamiltonian, std::vector<Operator> jumps,
                             double herm_tol)
    : h_(std::move(hamiltonian)), jumps_(std::move(jumps)) {
  if (h_.rows() != h_.cols() || h_.rows() == 0) {
    throw DimensionError("Hamiltonian must be a non-empty square matrix");
  }
  if (!is_hermitian(h_, herm_tol)) throw ValidationError("Hamiltonian is not hermitian");
  for (std::size_t j = 0; j < jumps_.size(); ++j) {
    if (jumps_[j].rows() != h_.rows() || jumps_[j].cols() != h_.cols()) {
      throw DimensionError("jump operator " + std::to_string(j) +
                           " does not match the Hamiltonian dimension");
    }
  }
}

Operator GklsGenerator::jump_sum() const {
  Operator k = Operator::Zero(h_.rows(), h_.cols());
  for (const auto& v : jumps_) k.noalias() += v.adjoint() * v;
  return k;
}

Operator GklsGenerator::apply(const Operator& rho) const {
  if (rho.rows() != h_.rows() || rho.cols() != h_.cols()) {
    throw DimensionError("generator applied to operator of wrong dimension");
  }
  const Operator k = jump_sum();
  Operator out = -kI * (h_ * rho - rho * h_) - 0.5 * (k * rho + rho * k);
  for (const auto& v : jumps_) out.noalias() += v * rho * v.adjoint();
  return out;
}

Superoperator generator_superoperator(const GklsGenerator& g) {
  const Index d = g.dim().value();
  const Operator id = Operator::Identity(d, d);
  const Operator& h = g.hamiltonian();
  const Operator k = g.jump_sum();
  Superoperator s = (super_from_left_right(h, id) - super_from_left_right(id, h)) * (-kI);
  for (const auto& v : g.jumps()) s += super_from_left_right(v, v.adjoint());
  s += (super_from_left_right(k, id) + super_from_left_right(id, k)) * Complex(-0.5);
  return s;
}

Superoperator generator_superoperator_commutator_form(const GklsGenerator& g) {
  Superoperator s = commutator_super(g.hamiltonian()) * (-kI);
  for (const auto& v : g.jumps()) {
    const Operator vd = v.adjoint();
    // [V, rho V^+] = comm(V) o right(V^+),  [V rho, V^+] = -comm(V^+) o left(V)
    const Operator id = Operator::Identity(v.rows(), v.cols());
    const Superoperator right_vd = super_from_left_right(id, vd);
    const Superoperator left_v = super_from_left_right(v, id);
    s += (commutator_super(v) * right_vd - commutator_super(vd) * left_v) * Complex(0.5);
  }
  return s;
}

Superoperator adjoint_generator(const GklsGenerator& g) {
  const Index d = g.dim().value();
  const Operator id = Operator::Identity(d, d);
  const Operator& h = g.hamiltonian();
  const Operator k = g.jump_sum();
  Superoperator s = (super_from_left_right(h, id) - super_from_left_right(id, h)) * kI;
  for (const auto& v : g.jumps()) s += super_from_left_right(v.adjoint(), v);
  s += (super_from_left_right(k, id) + super_from_left_right(id, k)) * Complex(-0.5);
  return s;
}

BistochasticReport is_bistochastic(const GklsGenerator& g, double tol) {
  const Index d = g.dim().value();
  const Operator id = Operator::Identity(d, d);
  BistochasticReport r;
  r.unital_defect = g.apply(id).cwiseAbs().maxCoeff();
  r.trace_defect = adjoint_generator(g).apply(id).cwiseAbs().maxCoeff();
  const double scale = std::max(1.0, g.jump_sum().cwiseAbs().maxCoeff());
  r.bistochastic = r.unital_defect <= tol * scale && r.trace_defect <= tol * scale;
  return r;
}

WhiteNoiseGenerator::WhiteNoiseGenerator(HamiltonianFn hamiltonian,
                                         std::vector<Operator> selfadjoint_jumps,
                                         double herm_tol)
    : h_(std::move(hamiltonian)), jumps_(std::move(selfadjoint_jumps)) {
  if (!h_) throw ValidationError("white-noise generator needs a Hamiltonian provider");
  for (std::size_t j = 0; j < jumps_.size(); ++j) {
    if (!is_hermitian(jumps_[j], herm_tol)) {
      throw ValidationError("white-noise jump " + std::to_string(j) + " is not hermitian");
    }
  }
}

WhiteNoiseGenerator::WhiteNoiseGenerator(const Operator& hamiltonian,
                                         std::vector<Operator> selfadjoint_jumps,
                                         double herm_tol)
    : WhiteNoiseGenerator([hamiltonian](double) { return hamiltonian; },
                          std::move(selfadjoint_jumps), herm_tol) {}

GklsGenerator WhiteNoiseGenerator::at(double t) const { return GklsGenerator(h_(t), jumps_); }

Superoperator white_noise_generator(const WhiteNoiseGenerator& w, double t) {
  const Operator h = w.hamiltonian(t);
  for (const auto& v : w.jumps()) {
    if (v.rows() != h.rows()) throw DimensionError("white-noise jump dimension mismatch");
  }
  if (!is_hermitian(h)) throw ValidationError("Hamiltonian is not hermitian");
  Superoperator s = commutator_super(h) * (-kI);
  for (const auto& v : w.jumps()) {
    const Superoperator c = commutator_super(v);
    s += (c * c) * Complex(-0.5);
  }
  return s;
}

}  // namespace qds
