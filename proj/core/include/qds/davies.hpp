#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "qds/gkls.hpp"
#include "qds/operators.hpp"

namespace qds {

/// Bath spectral data omega -> [R_kl(omega)] over coupling channels, the
/// Fourier transform R_kl(omega) = int R_kl(t) e^{-i t omega} dt.
///
/// With a KMS inverse temperature set, values at omega < 0 are derived from
///   R_kl(-omega) = e^{-beta omega} R_lk(omega)
/// instead of being read from the evaluator. Unless the function is marked
/// positive-branch-only, the evaluator's own negative-frequency value is
/// compared against the derived one and a mismatch above 1e-8 (relative)
/// throws ContractViolation.
class SpectralFunction {
 public:
  using Evaluator = std::function<Matrix(double)>;

  SpectralFunction(Evaluator evaluator, Index channels);

  SpectralFunction with_kms(double beta, bool positive_branch_only = false) const;

  /// Scalar convenience for single-channel baths.
  static SpectralFunction scalar(std::function<double(double)> fn);

  Index channels() const { return channels_; }
  std::optional<double> beta() const { return beta_; }

  Matrix operator()(double omega) const;

 private:
  Evaluator evaluator_;
  Index channels_;
  std::optional<double> beta_;
  bool positive_branch_only_ = false;
};

/// Spectral presets addressable by name:
///   "lorentzian"       amplitude * 2 tau / (1 + omega^2 tau^2)   {amplitude, tau}
///   "ohmic-cubed-exp"  amplitude * omega^3 e^{-omega/omega_c}, omega > 0,
///                      zero for omega <= 0                        {amplitude, omega_c}
///   "flat"             constant value                             {value}
/// An optional "beta" parameter attaches a KMS extension (derived negative
/// branch). Throws std::out_of_range for unknown names, ValidationError for
/// bad parameters.
SpectralFunction spectral_preset(const std::string& name,
                                 const std::map<std::string, double>& params);

/// Alphabetized preset names with one-line parameter docs.
std::vector<std::pair<std::string, std::string>> spectral_preset_catalog();

/// Symmetric correlation sampling grid [-t_max, t_max] with n_intervals
/// composite-Simpson intervals on each half line (n_intervals is rounded up
/// to even). The kink of |t|-type correlations at t = 0 sits on a node.
struct CorrelationGrid {
  double t_max = 50.0;
  std::size_t n_intervals = 20000;
};

struct PositivityWarning {
  double omega = 0.0;
  double min_eigenvalue = 0.0;
};

struct SpectralEstimate {
  SpectralFunction function;
  std::vector<PositivityWarning> warnings;
};

/// Numerical Fourier transform of sampled correlations. The sampler is called
/// once per grid node. Probe frequencies where the result is not PSD are
/// reported as warnings with the worst eigenvalue.
SpectralEstimate spectral_from_correlation(const std::function<Matrix(double)>& correlation,
                                           Index channels, const CorrelationGrid& grid,
                                           const std::vector<double>& probe_omegas = {});

/// Built-in transform R(omega) = amplitude * omega^3 e^{-omega/omega_c} for
/// omega > 0 (dipole coupling to the vacuum field), zero otherwise.
double ohmic_cubed_exp(double omega, double amplitude, double omega_c);

/// e^{itH} S_k e^{-itH} = sum_omega S_k(omega) e^{-i omega t}.
struct BohrDecomposition {
  RealVector energies;          // ascending
  Matrix eigenvectors;          // columns are eigenvectors of H
  std::vector<double> frequencies;  // distinct, ascending
  /// components[k][f] = S_k(frequencies[f])
  std::vector<std::vector<Operator>> components;

  /// Reconstruct e^{itH} S_k e^{-itH}.
  Operator reconstruct(std::size_t k, double t) const;
};

/// Default Bohr-frequency merging tolerance: 1e-9 * ||H||.
double default_frequency_tolerance(const Operator& h);

/// Frequencies within freq_tol are merged; frequencies whose components
/// vanish for every coupling are dropped. freq_tol < 0 selects the default.
BohrDecomposition bohr_decompose(const Operator& h, const std::vector<Operator>& couplings,
                                 double freq_tol = -1.0);

struct DaviesChannel {
  double omega = 0.0;
  bool pure_decoherence = false;  // omega == 0
  double rate = 0.0;              // lambda^2 * eigenvalue of [R_kl(omega)]
  std::size_t jump_index = 0;
};

struct DaviesGenerator {
  GklsGenerator generator;
  std::vector<DaviesChannel> channels;
  BohrDecomposition decomposition;
};

struct DaviesOptions {
  double freq_tol = -1.0;
  double psd_tol = 1e-10;
  /// Optional caller-supplied Hamiltonian correction; never computed here.
  std::optional<Operator> lamb_shift;
};

/// Weak-coupling generator
///   L rho = -i[H, rho] + lambda^2/2 sum_{omega,k,l} R_kl(omega)
///           ([S_k(omega) rho, S_l(omega)^+] + [S_k(omega), rho S_l(omega)^+]),
/// brought to diagonal standard form by diagonalizing each [R_kl(omega)].
/// Throws ContractViolation when a spectral matrix is not PSD.
DaviesGenerator build_davies(const Operator& h, const std::vector<Operator>& couplings,
                             const SpectralFunction& spectral, double lambda,
                             const DaviesOptions& options = {});

/// The same generator assembled straight from R_kl without diagonalization.
Superoperator davies_superoperator_direct(const Operator& h,
                                          const std::vector<Operator>& couplings,
                                          const SpectralFunction& spectral, double lambda,
                                          double freq_tol = -1.0);

struct ErgodicityReport {
  bool ergodic = false;
  Index commutant_dimension = 0;
};

/// Dimension of {X : [S_k(omega), X] = 0 for all k, omega}.
ErgodicityReport ergodicity_check(const BohrDecomposition& decomposition,
                                  double rank_tol = 1e-10);

struct BlockSplitReport {
  bool nondegenerate_spectrum = false;
  double max_cross_coupling = 0.0;  // population <-> coherence sectors
  bool decoupled = false;
  /// Pauli generator on populations in H's eigenbasis: d p_a/dt = sum_b A(a,b) p_b.
  RealMatrix pauli_generator;
  /// Off-diagonal entries of pauli_generator: rates(a, b) is the rate b -> a.
  RealMatrix rates;
  RealVector stationary_populations;
  std::optional<bool> detailed_balance;  // set when beta is provided
  double detailed_balance_defect = 0.0;
};

/// Population/coherence decoupling in the eigenbasis of H, the extracted
/// Pauli rates, and (given beta) classical detailed balance
///   rates(a,b) e^{-beta e_b} = rates(b,a) e^{-beta e_a}.
BlockSplitReport decoherence_block_split(const Superoperator& generator, const Operator& h,
                                         std::optional<double> beta = std::nullopt,
                                         double tol = 1e-12);

/// Fermi-Golden-Rule transition rates b -> a for a single coupling channel
/// per entry: lambda^2 sum_k R_kk(e_b - e_a) |<a|S_k|b>|^2 (diagonal channels),
/// including cross-channel terms sum_{kl} R_kl <a|S_k|b> conj(<a|S_l|b>).
RealMatrix fermi_golden_rule_rates(const Operator& h, const std::vector<Operator>& couplings,
                                   const SpectralFunction& spectral, double lambda);

/// Gibbs state Z^{-1} e^{-beta H}.
DensityMatrix gibbs_state(const Operator& h, double beta);

}  // namespace qds
