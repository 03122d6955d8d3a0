#pragma once

#include <functional>
#include <vector>

#include "qds/operators.hpp"

namespace qds {

/// Standard-form Markovian generator
///   L rho = -i[H, rho] + sum_j V_j rho V_j^+ - 1/2 {sum_j V_j^+ V_j, rho}.
/// Rates are folded into the jump operators (units sqrt(1/time)).
class GklsGenerator {
 public:
  /// Throws ValidationError if H is not hermitian, DimensionError if any
  /// jump does not match H.
  GklsGenerator(Operator hamiltonian, std::vector<Operator> jumps,
                double herm_tol = 1e-10);

  HilbertDim dim() const { return HilbertDim(h_.rows()); }
  const Operator& hamiltonian() const { return h_; }
  const std::vector<Operator>& jumps() const { return jumps_; }

  /// sum_j V_j^+ V_j
  Operator jump_sum() const;

  /// L rho evaluated directly, without forming the superoperator.
  Operator apply(const Operator& rho) const;

 private:
  Operator h_;
  std::vector<Operator> jumps_;
};

/// Matrix of L in the anticommutator form
///   -i[H,.] + sum V . V^+ - 1/2 {K, .}.
Superoperator generator_superoperator(const GklsGenerator& g);

/// Matrix of L in the commutator-pair form
///   -i[H,.] + 1/2 sum ([V, . V^+] + [V ., V^+]),
/// assembled independently of generator_superoperator().
Superoperator generator_superoperator_commutator_form(const GklsGenerator& g);

/// Heisenberg-picture generator
///   L^*(A) = i[H, A] + sum V^+ A V - 1/2 {K, A},
/// assembled from its own formula (equals the HS adjoint of L).
Superoperator adjoint_generator(const GklsGenerator& g);

struct BistochasticReport {
  bool bistochastic = false;
  double unital_defect = 0.0;  // max |L(1)|
  double trace_defect = 0.0;   // max |L^*(1)|
};

BistochasticReport is_bistochastic(const GklsGenerator& g, double tol = 1e-12);

/// Double-commutator generator with hermitian noise operators
///   L(t) rho = -i[H(t), rho] - 1/2 sum_j [V_j, [V_j, rho]].
/// The dissipative part is time independent.
class WhiteNoiseGenerator {
 public:
  using HamiltonianFn = std::function<Operator(double)>;

  /// Throws ValidationError if a jump is not hermitian.
  WhiteNoiseGenerator(HamiltonianFn hamiltonian, std::vector<Operator> selfadjoint_jumps,
                      double herm_tol = 1e-10);
  WhiteNoiseGenerator(const Operator& hamiltonian, std::vector<Operator> selfadjoint_jumps,
                      double herm_tol = 1e-10);

  Operator hamiltonian(double t) const { return h_(t); }
  const std::vector<Operator>& jumps() const { return jumps_; }

  /// The same dynamics as a standard-form generator at time t.
  GklsGenerator at(double t) const;

 private:
  HamiltonianFn h_;
  std::vector<Operator> jumps_;
};

/// Superoperator of the double-commutator form at time t.
Superoperator white_noise_generator(const WhiteNoiseGenerator& w, double t);

}  // namespace qds
