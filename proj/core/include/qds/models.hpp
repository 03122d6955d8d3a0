#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qds/gkls.hpp"
#include "qds/operators.hpp"

namespace qds::models {

// ---------------------------------------------------------------------------
// Two-level system. Basis |1> (index 0, lower) and |2> (index 1, upper);
// sigma3 = P2 - P1, H = (omega/2) sigma3, damping sigma-, pumping sigma+.

/// Meaning of the dephasing rate `delta`.
enum class DephasingConvention {
  /// delta adds to the coherence decay: alpha(t) ~ exp(-(g_down + g_up + delta) t / 2).
  /// Jump operator (sqrt(delta)/2) sigma3.
  kCoherenceRate,
  /// Literal double commutator -(delta/2)[sigma3, [sigma3, rho]], which decays
  /// coherences at 2 delta. Jump operator sqrt(delta) sigma3.
  kDoubleCommutator,
};

struct TwoLevelParams {
  double omega = 1.0;
  double gamma_down = 0.0;
  double gamma_up = 0.0;
  double delta = 0.0;
  DephasingConvention convention = DephasingConvention::kCoherenceRate;
};

/// Throws ValidationError for negative or non-finite rates.
GklsGenerator two_level_generator(const TwoLevelParams& p);

/// Closed-form solution rho_t = p1 P1 + (1 - p1) P2 + alpha sigma+ + conj(alpha) sigma-.
DensityMatrix two_level_analytic(const TwoLevelParams& p, const DensityMatrix& rho0, double t);

/// Total coherence decay rate for the params' convention (|alpha| ~ e^{-rate t}).
double two_level_coherence_decay_rate(const TwoLevelParams& p);

/// Stationary state of the populations; Gibbs form when g_up/g_down = e^{-omega/T}.
DensityMatrix two_level_stationary(const TwoLevelParams& p);

// ---------------------------------------------------------------------------
// Damped and pumped harmonic oscillator on a truncated Fock space.

struct OscillatorParams {
  double omega = 1.0;
  double gamma_down = 1.0;
  double gamma_up = 0.0;
  Index n_trunc = 40;
};

/// Jumps sqrt(g_down) a and sqrt(g_up) a+, H = omega a+a on n_trunc levels.
/// Throws ValidationError unless g_down > g_up >= 0 and n_trunc >= 2.
GklsGenerator oscillator_generator(const OscillatorParams& p);

/// Results whose top-two-level population exceeds this are flagged invalid.
inline constexpr double kLeakageLimit = 1e-8;

struct LeakageReport {
  double top_population = 0.0;  // population of the two highest Fock levels
  bool valid = true;
};

LeakageReport truncation_leakage(const DensityMatrix& rho, double limit = kLeakageLimit);

/// Initial states with closed-form characteristic functions.
struct OscillatorInitialState {
  enum class Kind { kCoherent, kThermal } kind = Kind::kCoherent;
  Complex amplitude = 0.0;  // coherent
  double mean_number = 0.0;  // thermal

  static OscillatorInitialState coherent(Complex beta);
  static OscillatorInitialState thermal(double mean_number);

  /// F_0(z) = Tr(rho_0 exp(z a - conj(z) a+)).
  Complex characteristic(Complex z) const;

  /// The state as a truncated density matrix (renormalized).
  DensityMatrix truncated(Index levels) const;
};

/// F_t(z) = Tr(rho_t exp(z a - conj(z) a+)) = e^{-A(t)} F_0(z_t) with
///   z_t  = z exp(-i omega t - (g_down - g_up) t / 2),
///   A(t) = |z|^2/2 * (g_down + g_up)/(g_down - g_up) * (1 - e^{-(g_down - g_up) t}).
Complex generating_function_oracle(const OscillatorParams& p,
                                   const OscillatorInitialState& initial, Complex z, double t);

/// Solution of d<n>/dt = -(g_down - g_up) <n> + g_up.
double oscillator_mean_number(const OscillatorParams& p, double n0, double t);

/// Stationary state (1 - e^{-w/T}) e^{-(w/T) a+a} on the truncated space with
/// w/T = log(g_down / g_up) (vacuum when g_up = 0).
DensityMatrix oscillator_stationary(const OscillatorParams& p);

// ---------------------------------------------------------------------------
// Momentum-kick decoherence on an L-site ring. Position X = diag(0..L-1),
// momenta k = 2 pi m / L, each kick rho -> e^{-ikX} rho e^{ikX}.

struct KickModelParams {
  Index lattice_size = 8;
  /// m -> n(k_m) >= 0, collision rate per unit time for k = 2 pi m / L.
  std::map<int, double> kick_rates;
  /// Optional diagonal potential V(X) (length lattice_size).
  std::optional<RealVector> potential;
  /// Kinetic term P^2/(2M) via the ring Laplacian; absent -> no kinetic term.
  std::optional<double> mass;
};

GklsGenerator kick_decoherence_generator(const KickModelParams& p);

/// Closed-form solution for H = 0:
///   rho_t(x, x') = rho_0(x, x') exp(-t sum_k n(k) (1 - e^{-ik(x - x')})).
DensityMatrix kick_analytic(const KickModelParams& p, const DensityMatrix& rho0, double t);

/// The complex exponent sum_k n(k) (1 - e^{-ik dx}) for separation dx.
Complex kick_decay_exponent(const KickModelParams& p, Index separation);

// ---------------------------------------------------------------------------
// Discrete-velocity Bloch-Boltzmann equation
//   d rho(v_i)/dt = -i sum_a h_a(v_i) [S_a, rho(v_i)]
//                   + sum_{ab} sum_j K_ab(v_i, v_j) S_a rho(v_j) S_b^+ dv
//                   - 1/2 sum_{ab} gamma_ab(v_i) {S_a^+ S_b, rho(v_i)},
//   gamma_ab(v_i) = sum_j K_ba(v_j, v_i) dv.

struct BlochBoltzmannDiscrete {
  Index n_levels = 2;
  std::vector<double> velocities;
  double dv = 1.0;
  std::vector<Operator> basis;  // S_a
  /// drift[i][a] = h_a(v_i)
  std::vector<std::vector<double>> drift;
  /// kernel[i][j] = [K_ab(v_i, v_j)], a PSD matrix over basis indices
  /// (destination v_i, source v_j).
  std::vector<std::vector<Matrix>> kernel;

  /// Validates shapes, hermitian drift and PSD kernel blocks; throws
  /// DimensionError / ContractViolation.
  void validate(double psd_tol = 1e-10) const;

  /// gamma_ab(v_i) as a matrix over (a, b).
  Matrix loss_matrix(std::size_t i) const;
};

using VelocityState = std::vector<Operator>;

/// Total trace sum_i Tr rho(v_i) dv.
double total_trace(const BlochBoltzmannDiscrete& m, const VelocityState& state);

/// Right-hand side of the equation.
VelocityState bloch_boltzmann_rhs(const BlochBoltzmannDiscrete& m, const VelocityState& state);

/// One RK4 step. Throws ContractViolation when the kernel is not PSD, any
/// block is not PSD, or the total trace differs from 1 by more than trace_tol.
VelocityState bloch_boltzmann_step(const BlochBoltzmannDiscrete& m, const VelocityState& state,
                                   double dt, double trace_tol = 1e-8);

/// The full linear generator on the stacked vectorized blocks
/// (block i occupies rows i*n^2 .. (i+1)*n^2 - 1).
Matrix bloch_boltzmann_generator_matrix(const BlochBoltzmannDiscrete& m);

/// Normalized null vector of the assembled generator (unit total trace).
VelocityState bloch_boltzmann_stationary(const BlochBoltzmannDiscrete& m);

/// Matrix units E_ij as a basis of n x n matrices.
std::vector<Operator> matrix_unit_basis(Index n);

// ---------------------------------------------------------------------------
// Spin-boson pure-dephasing model, g(omega) = lambda f(omega) / omega.

struct SpinBosonCoupling {
  double lambda = 0.0;
  std::function<Complex(double)> f;
  /// Declared infrared exponent: |f(omega)|^2 ~ omega^s near 0.
  double s = 2.0;
  double omega_c = 1.0;
};

struct SpinBosonOverlap {
  /// ||g||^2; std::nullopt means divergent.
  std::optional<double> norm_g_sq;
  /// <phi[-g], phi[g]> = exp(-2 ||g||^2); 0 when divergent.
  double overlap = 0.0;
  double error_estimate = 0.0;
};

/// Declared s <= 1 is reported divergent without quadrature. Otherwise
/// ||g||^2 = lambda^2 int_0^inf |f|^2 / omega^2 by adaptive quadrature;
/// throws ContractViolation if the estimated relative error exceeds quad_tol.
SpinBosonOverlap spin_boson_overlap(const SpinBosonCoupling& c, double quad_tol = 1e-8);

struct DephasingFeasibility {
  double markov_dephasing_rate = 0.0;  // R(0) = lambda^2 |f(0)|^2
  SpinBosonOverlap overlap;
  bool cloud_norm_finite = true;
  bool markovian_dephasing = false;  // R(0) > 0
  /// R(0) > 0 forces ||g|| = infinity: the model is either unphysical or
  /// cannot produce exponential dephasing.
  bool incompatible = false;
  std::string verdict;
};

DephasingFeasibility dephasing_feasibility(const SpinBosonCoupling& c, double quad_tol = 1e-8);

}  // namespace qds::models
