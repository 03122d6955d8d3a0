#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "qds/gkls.hpp"
#include "qds/operators.hpp"

namespace qds {

/// Euler-Maruyama discretization of the linear Ito-Schroedinger equation
///   d psi = -iH psi dt - 1/2 sum V^+V psi dt - i sum V psi dB_j.
struct TrajectoryConfig {
  double dt = 1e-3;
  std::size_t n_traj = 1000;
  std::uint64_t seed = 0;
  /// Worker threads; 0 selects std::thread::hardware_concurrency().
  /// Results do not depend on this value.
  unsigned threads = 0;
};

/// Unnormalized state vector at time t.
struct TrajectoryState {
  Vector psi;
  double t = 0.0;
};

/// One Euler-Maruyama step. dW holds one real increment per jump operator,
/// each ~ N(0, dt). Deterministic in (state, dW). Throws DimensionError.
TrajectoryState em_step(const GklsGenerator& g, const TrajectoryState& s,
                        std::span<const double> dW, double dt);

/// Counter-based stream seed: a bijection in `trajectory_index` for every
/// fixed `seed`, so streams of one ensemble never collide.
std::uint64_t split_seed(std::uint64_t seed, std::uint64_t trajectory_index);

struct EnsembleEstimate {
  std::vector<double> times;
  /// E[|psi><psi|] at each time (hermitian by construction).
  std::vector<Matrix> mean;
  /// Standard error of each complex entry: sqrt(E|X - mean|^2 / n).
  std::vector<RealMatrix> standard_error;
};

/// Ensemble estimate of rho(t) on an increasing grid of times >= 0.
/// Initial pure states are drawn from the eigen-ensemble of rho0 with
/// probabilities equal to its eigenvalues. The last step into each grid time
/// is shortened so the estimate lands exactly on it.
EnsembleEstimate ensemble_density(const GklsGenerator& g, const DensityMatrix& rho0,
                                  const std::vector<double>& t_grid,
                                  const TrajectoryConfig& cfg);

/// Exact expectation of the Euler-Maruyama scheme itself,
///   rho <- M rho M^+ + dt sum V rho V^+,   M = 1 - iH dt - K dt/2,
/// using E[dW] = 0, E[dW_i dW_j] = delta_ij dt. The difference between this
/// and the exact semigroup is the scheme's weak bias.
std::vector<Matrix> em_mean_recursion(const GklsGenerator& g, const DensityMatrix& rho0,
                                      const std::vector<double>& t_grid, double dt);

}  // namespace qds
