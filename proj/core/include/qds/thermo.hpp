#pragma once

#include <functional>
#include <optional>
#include <ostream>
#include <vector>

#include "qds/gkls.hpp"
#include "qds/operators.hpp"
#include "qds/propagation.hpp"

namespace qds {

/// Eigenvalues in (-1e-12, 1e-12] count as zero (0 ln 0 = 0).
inline constexpr double kEntropyClip = 1e-12;

/// -Tr rho ln rho. Throws ValidationError for eigenvalues below -kEntropyClip.
double von_neumann_entropy(const Operator& rho);
double von_neumann_entropy(const DensityMatrix& rho);

/// Tr rho (ln rho - ln sigma); +infinity when supp rho is not inside supp sigma.
double relative_entropy(const DensityMatrix& rho, const DensityMatrix& sigma);

struct ContractivityReport {
  double before = 0.0;  // S(rho | sigma)
  double after = 0.0;   // S(L rho | L sigma)
  double margin = 0.0;
  bool holds = false;   // margin >= -1e-9
};

/// Throws ContractViolation unless the map is CPTP within tolerance.
ContractivityReport contractivity_check(const Superoperator& map, const DensityMatrix& rho,
                                        const DensityMatrix& sigma, double tol = 1e-10);

struct HTheoremReport {
  std::vector<double> entropies;
  double worst_drop = 0.0;  // max S(t_i) - S(t_{i+1})
  bool holds = false;
};

/// Entropy along exact evolution on t_grid must not decrease by more than
/// 1e-9 between consecutive points. Throws PreconditionError unless the
/// generator is bistochastic.
HTheoremReport h_theorem_check(const GklsGenerator& g, const DensityMatrix& rho0,
                               const std::vector<double>& t_grid);

struct ThermoLedger {
  std::vector<double> t;
  std::vector<double> E;
  std::vector<double> W;
  std::vector<double> Q;
  std::vector<double> S;
  std::vector<double> sigma;  // NaN without a temperature
  std::vector<double> closure_defect;  // |E - E(0) - W - Q|

  double max_closure_defect() const;
  void write_csv(std::ostream& os) const;
};

struct LedgerOptions {
  double step = 1e-3;
  /// dH/dt; absent -> five-point finite difference of the schedule's H(t).
  std::function<Operator(double)> hamiltonian_derivative;
  std::optional<double> temperature;
};

/// E(t) = Tr rho_t H(t), W = int Tr(rho dH/ds) ds and Q = int Tr((L rho) H) ds,
/// integrated together with rho by RK4. In piecewise-constant mode the
/// Hamiltonian jumps at schedule grid points and the sudden work
/// Tr(rho (H+ - H-)) is booked to W. The ledger grid must start at or after
/// the schedule's first grid point.
ThermoLedger first_law_ledger(const Schedule& schedule, const DensityMatrix& rho0,
                              const std::vector<double>& grid, const LedgerOptions& options = {});

/// sigma(t) = dS/dt - (1/T) dQ/dt by second-order three-point differences
/// one-sided at the ends) on a ledger grid.
std::vector<double> entropy_production(const std::vector<double>& t, const std::vector<double>& S,
                                       const std::vector<double>& Q, double temperature);

/// Entropy balance on a ledger. Throws PreconditionError unless each L(t) on
/// the grid annihilates Z^{-1} e^{-H(t)/T} within gibbs_tol.
ThermoLedger entropy_balance(const Schedule& schedule, const DensityMatrix& rho0,
                             const std::vector<double>& grid, double temperature,
                             double step = 1e-3, double gibbs_tol = 1e-8);

}  // namespace qds
