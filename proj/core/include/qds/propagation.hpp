#pragma once

#include <functional>
#include <vector>

#include "qds/gkls.hpp"
#include "qds/operators.hpp"

namespace qds {

/// e^{tL}, computed by scaling-and-squaring with a Pade approximant.
Superoperator propagator_exact(const Superoperator& generator, double t);

/// rho_t = e^{tL} rho_0. Throws ValidationError for t < 0.
DensityMatrix evolve_exact(const Superoperator& generator, double t, const DensityMatrix& rho0);

/// How a Schedule interprets its generator provider between grid points.
enum class ScheduleMode {
  /// L(grid[i]) held constant on [grid[i], grid[i+1]); beyond the last point
  /// the last generator is held.
  kPiecewiseConstant,
  /// L(t) evaluated at every integrator stage time.
  kContinuous,
};

/// Time-dependent generator t -> L(t) with a strictly increasing time grid.
class Schedule {
 public:
  using GeneratorFn = std::function<GklsGenerator(double)>;

  Schedule(GeneratorFn generator, std::vector<double> grid,
           ScheduleMode mode = ScheduleMode::kPiecewiseConstant);

  const std::vector<double>& grid() const { return grid_; }
  ScheduleMode mode() const { return mode_; }

  /// Generator in effect at time t under the schedule's mode.
  GklsGenerator generator_at(double t) const;

  /// The raw provider, ignoring the mode.
  GklsGenerator raw(double t) const { return generator_(t); }

 private:
  GeneratorFn generator_;
  std::vector<double> grid_;
  ScheduleMode mode_;
};

/// Classical fourth-order Runge-Kutta on the master equation with uniform
/// steps of at most `step`. Throws ValidationError for step <= 0 or t < 0.
DensityMatrix evolve_rk4(const Superoperator& generator, double t, const DensityMatrix& rho0,
                         double step);

/// RK4 from grid().front() to t under a schedule. Integration restarts at
/// every grid point so piecewise-constant generators are never straddled.
DensityMatrix evolve_rk4(const Schedule& schedule, double t, const DensityMatrix& rho0,
                         double step);

/// States at every grid point of the schedule (first entry is rho0).
std::vector<DensityMatrix> evolve_rk4_on_grid(const Schedule& schedule,
                                              const DensityMatrix& rho0, double step);

/// Time-ordered product of exact exponentials for a piecewise-constant
/// schedule, from grid().front() to t.
DensityMatrix evolve_piecewise_exact(const Schedule& schedule, double t,
                                     const DensityMatrix& rho0);

/// Default grid resolution of the Dyson quadrature (intervals per level).
inline constexpr int kDysonGridIntervals = 64;
inline constexpr int kDysonMaxOrder = 8;

/// Partial sums of the expansion
///   Lambda_t = W_t + sum_n int W_{t-t_n} Phi W_{t_n - t_{n-1}} ... Phi W_{t_1},
/// with W_t rho = S_t rho S_t^+, S_t = exp(-itH - t/2 sum V^+V) and
/// Phi rho = sum V rho V^+. Nested integrals use the trapezoid rule on a
/// uniform grid, so every partial sum is a positive combination of
/// completely positive maps. Element n holds the sum of terms 0..n.
std::vector<DensityMatrix> dyson_partial_sums(const GklsGenerator& g, double t,
                                              const DensityMatrix& rho0, int order,
                                              int grid_intervals = kDysonGridIntervals);

/// The order-n partial sum applied to rho0.
DensityMatrix evolve_dyson(const GklsGenerator& g, double t, const DensityMatrix& rho0,
                           int order, int grid_intervals = kDysonGridIntervals);

/// The same partial sums as superoperators (for complete-positivity audits).
std::vector<Superoperator> dyson_partial_maps(const GklsGenerator& g, double t, int order,
                                              int grid_intervals = kDysonGridIntervals);

enum class PropagatorMethod { kExactExponential, kRk4, kDyson };

struct Propagator {
  PropagatorMethod method = PropagatorMethod::kExactExponential;
  double step = 1e-3;  // rk4
  int order = 6;       // dyson
  int grid_intervals = kDysonGridIntervals;
};

/// Lambda_t as a superoperator for the chosen method.
Superoperator propagator_map(const GklsGenerator& g, double t, const Propagator& p);

/// ||Lambda_{t+s} - Lambda_t Lambda_s|| in the operator norm of the
/// superoperator matrix, exact exponentials.
double semigroup_defect(const Superoperator& generator, double t, double s);

double semigroup_defect(const GklsGenerator& g, double t, double s, const Propagator& p);

}  // namespace qds
