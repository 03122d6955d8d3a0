#include "qds/davies.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "qds/errors.hpp"

namespace qds {
namespace {

constexpr Complex kI{0.0, 1.0};

double max_abs(const Matrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

double param(const std::map<std::string, double>& params, const std::string& key) {
  auto it = params.find(key);
  if (it == params.end()) throw ValidationError("spectral preset needs parameter '" + key + "'");
  if (!std::isfinite(it->second)) throw ValidationError("parameter '" + key + "' must be finite");
  return it->second;
}

void check_known(const std::map<std::string, double>& params,
                 std::initializer_list<const char*> known) {
  for (const auto& [key, value] : params) {
    if (key == "beta") continue;
    if (std::none_of(known.begin(), known.end(), [&](const char* k) { return key == k; })) {
      throw ValidationError("unknown spectral parameter '" + key + "'");
    }
  }
}

struct EigenBasis {
  RealVector energies;
  Matrix vectors;
};

EigenBasis diagonalize(const Operator& h) {
  if (!is_hermitian(h)) throw ValidationError("Hamiltonian is not hermitian");
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (h + h.adjoint()));
  return {es.eigenvalues(), es.eigenvectors()};
}

}  // namespace

SpectralFunction::SpectralFunction(Evaluator evaluator, Index channels)
    : evaluator_(std::move(evaluator)), channels_(channels) {
  if (!evaluator_) throw ValidationError("spectral function needs an evaluator");
  if (channels_ < 1) throw ValidationError("spectral function needs at least one channel");
}

SpectralFunction SpectralFunction::with_kms(double beta, bool positive_branch_only) const {
  if (!std::isfinite(beta) || beta < 0.0) throw ValidationError("beta must be finite and >= 0");
  SpectralFunction out = *this;
  out.beta_ = beta;
  out.positive_branch_only_ = positive_branch_only;
  return out;
}

SpectralFunction SpectralFunction::scalar(std::function<double(double)> fn) {
  if (!fn) throw ValidationError("spectral function needs an evaluator");
  return SpectralFunction(
      [fn = std::move(fn)](double omega) {
        Matrix m(1, 1);
        m(0, 0) = fn(omega);
        return m;
      },
      1);
}

Matrix SpectralFunction::operator()(double omega) const {
  auto checked = [this](Matrix m) {
    if (m.rows() != channels_ || m.cols() != channels_) {
      throw DimensionError("spectral evaluator returned a matrix of the wrong size");
    }
    return m;
  };
  if (!beta_ || omega >= 0.0) return checked(evaluator_(omega));
  const Matrix positive = checked(evaluator_(-omega));
  const Matrix derived = std::exp(-*beta_ * (-omega)) * positive.transpose();
  if (!positive_branch_only_) {
    const Matrix raw = checked(evaluator_(omega));
    const double mismatch = max_abs(raw - derived);
    if (mismatch > 1e-8 * std::max(1.0, max_abs(derived))) {
      throw ContractViolation("spectral function violates KMS at omega = " +
                              std::to_string(omega) + " (mismatch " + std::to_string(mismatch) +
                              ")");
    }
  }
  return derived;
}

double ohmic_cubed_exp(double omega, double amplitude, double omega_c) {
  if (omega <= 0.0) return 0.0;
  return amplitude * omega * omega * omega * std::exp(-omega / omega_c);
}

SpectralFunction spectral_preset(const std::string& name,
                                 const std::map<std::string, double>& params) {
  std::optional<double> beta;
  if (auto it = params.find("beta"); it != params.end()) beta = it->second;

  SpectralFunction base = [&]() -> SpectralFunction {
    if (name == "lorentzian") {
      check_known(params, {"amplitude", "tau"});
      const double amplitude = params.count("amplitude") ? param(params, "amplitude") : 1.0;
      const double tau = param(params, "tau");
      if (tau <= 0.0 || amplitude < 0.0) throw ValidationError("lorentzian needs tau > 0, amplitude >= 0");
      return SpectralFunction::scalar([amplitude, tau](double w) {
        return amplitude * 2.0 * tau / (1.0 + w * w * tau * tau);
      });
    }
    if (name == "ohmic-cubed-exp") {
      check_known(params, {"amplitude", "omega_c"});
      const double amplitude = params.count("amplitude") ? param(params, "amplitude") : 1.0;
      const double omega_c = param(params, "omega_c");
      if (omega_c <= 0.0 || amplitude < 0.0) {
        throw ValidationError("ohmic-cubed-exp needs omega_c > 0, amplitude >= 0");
      }
      return SpectralFunction::scalar(
          [amplitude, omega_c](double w) { return ohmic_cubed_exp(w, amplitude, omega_c); });
    }
    if (name == "flat") {
      check_known(params, {"value"});
      const double value = param(params, "value");
      if (value < 0.0) throw ValidationError("flat spectral value must be >= 0");
      return SpectralFunction::scalar([value](double) { return value; });
    }
    throw std::out_of_range("unknown spectral preset '" + name + "'");
  }();
  if (beta) return base.with_kms(*beta, /*positive_branch_only=*/true);
  return base;
}

std::vector<std::pair<std::string, std::string>> spectral_preset_catalog() {
  return {
      {"flat", "R(w) = value; params {value}; optional beta adds a KMS negative branch"},
      {"lorentzian",
       "R(w) = amplitude * 2 tau / (1 + w^2 tau^2); params {amplitude=1, tau}; optional beta"},
      {"ohmic-cubed-exp",
       "R(w) = amplitude * w^3 exp(-w/omega_c) for w > 0, else 0; params {amplitude=1, "
       "omega_c}; optional beta"},
  };
}

SpectralEstimate spectral_from_correlation(const std::function<Matrix(double)>& correlation,
                                           Index channels, const CorrelationGrid& grid,
                                           const std::vector<double>& probe_omegas) {
  if (!correlation) throw ValidationError("correlation sampler is empty");
  if (!(grid.t_max > 0.0) || grid.n_intervals < 2) {
    throw ValidationError("correlation grid needs t_max > 0 and >= 2 intervals");
  }
  const std::size_t n = grid.n_intervals + (grid.n_intervals % 2);
  const double h = grid.t_max / static_cast<double>(n);

  struct Samples {
    std::vector<double> times;
    std::vector<double> weights;
    std::vector<Matrix> values;
  };
  auto samples = std::make_shared<Samples>();
  // Composite Simpson on [-t_max, 0] and [0, t_max]; the shared node t = 0
  // collects weight from both halves.
  for (std::size_t i = 0; i <= 2 * n; ++i) {
    const auto offset = static_cast<double>(i) - static_cast<double>(n);
    const double t = offset * h;
    const std::size_t local = i <= n ? i : i - n;
    double w = (local == 0 || local == n) ? 1.0 : (local % 2 == 1 ? 4.0 : 2.0);
    if (i == n) w = 2.0;
    samples->times.push_back(t);
    samples->weights.push_back(w * h / 3.0);
    Matrix value = correlation(t);
    if (value.rows() != channels || value.cols() != channels) {
      throw DimensionError("correlation sampler returned a matrix of the wrong size");
    }
    samples->values.push_back(std::move(value));
  }

  SpectralFunction fn(
      [samples, channels](double omega) {
        Matrix acc = Matrix::Zero(channels, channels);
        for (std::size_t i = 0; i < samples->times.size(); ++i) {
          const Complex phase = std::exp(-kI * (samples->times[i] * omega));
          acc += (samples->weights[i] * phase) * samples->values[i];
        }
        return acc;
      },
      channels);

  std::vector<PositivityWarning> warnings;
  for (double omega : probe_omegas) {
    const Matrix value = fn(omega);
    const RealVector ev = hermitian_eigenvalues(value);
    const double scale = std::max(std::abs(ev(0)), std::abs(ev(ev.size() - 1)));
    if (ev(0) < -1e-10 * std::max(scale, 1e-300) || hermiticity_defect(value) > 1e-8 * std::max(1.0, scale)) {
      warnings.push_back({omega, ev(0)});
    }
  }
  return {std::move(fn), std::move(warnings)};
}

Operator BohrDecomposition::reconstruct(std::size_t k, double t) const {
  const auto& parts = components.at(k);
  Operator out = Operator::Zero(eigenvectors.rows(), eigenvectors.cols());
  for (std::size_t f = 0; f < frequencies.size(); ++f) {
    out += std::exp(-kI * (frequencies[f] * t)) * parts[f];
  }
  return out;
}

double default_frequency_tolerance(const Operator& h) { return 1e-9 * operator_norm(h); }

BohrDecomposition bohr_decompose(const Operator& h, const std::vector<Operator>& couplings,
                                 double freq_tol) {
  const EigenBasis basis = diagonalize(h);
  const Index d = h.rows();
  for (const auto& s : couplings) {
    if (s.rows() != d || s.cols() != d) throw DimensionError("coupling dimension mismatch");
  }
  if (freq_tol < 0.0) freq_tol = default_frequency_tolerance(h);

  struct Pair {
    double gap;
    Index a, b;
  };
  std::vector<Pair> pairs;
  for (Index a = 0; a < d; ++a)
    for (Index b = 0; b < d; ++b) pairs.push_back({basis.energies(b) - basis.energies(a), a, b});
  std::stable_sort(pairs.begin(), pairs.end(),
                   [](const Pair& x, const Pair& y) { return x.gap < y.gap; });

  std::vector<std::vector<Pair>> clusters;
  for (const auto& p : pairs) {
    if (clusters.empty() || p.gap - clusters.back().back().gap > freq_tol) clusters.emplace_back();
    clusters.back().push_back(p);
  }

  std::vector<Matrix> in_basis;
  double scale = 0.0;
  for (const auto& s : couplings) {
    in_basis.push_back(basis.vectors.adjoint() * s * basis.vectors);
    scale = std::max(scale, max_abs(s));
  }
  const double drop = 1e-12 * std::max(scale, 1e-300);

  BohrDecomposition out;
  out.energies = basis.energies;
  out.eigenvectors = basis.vectors;
  out.components.resize(couplings.size());
  for (const auto& cluster : clusters) {
    double sum = 0.0;
    for (const auto& p : cluster) sum += p.gap;
    const double omega = sum / static_cast<double>(cluster.size());
    std::vector<Operator> parts;
    bool nonzero = false;
    for (const auto& s : in_basis) {
      Matrix m = Matrix::Zero(d, d);
      for (const auto& p : cluster) m(p.a, p.b) = s(p.a, p.b);
      Operator part = basis.vectors * m * basis.vectors.adjoint();
      if (max_abs(part) > drop) nonzero = true;
      parts.push_back(std::move(part));
    }
    if (!nonzero) continue;
    out.frequencies.push_back(omega == 0.0 ? 0.0 : omega);
    for (std::size_t k = 0; k < parts.size(); ++k) out.components[k].push_back(std::move(parts[k]));
  }
  return out;
}

namespace {

Matrix checked_spectral(const SpectralFunction& spectral, double omega, Index channels,
                        double psd_tol) {
  const Matrix r = spectral(omega);
  if (r.rows() != channels) {
    throw DimensionError("spectral function channels do not match the couplings");
  }
  const double scale = std::max(1.0, max_abs(r));
  if (hermiticity_defect(r) > 1e-10 * scale) {
    throw ContractViolation("spectral matrix is not hermitian at omega = " + std::to_string(omega));
  }
  const RealVector ev = hermitian_eigenvalues(r);
  const double norm = std::max(std::abs(ev(0)), std::abs(ev(ev.size() - 1)));
  if (ev(0) < -psd_tol * std::max(norm, 1e-300)) {
    throw ContractViolation("spectral matrix is not positive semidefinite at omega = " +
                            std::to_string(omega) + " (lambda_min = " + std::to_string(ev(0)) +
                            ")");
  }
  return r;
}

}  // namespace

DaviesGenerator build_davies(const Operator& h, const std::vector<Operator>& couplings,
                             const SpectralFunction& spectral, double lambda,
                             const DaviesOptions& options) {
  BohrDecomposition bohr = bohr_decompose(h, couplings, options.freq_tol);
  const auto channels = static_cast<Index>(couplings.size());
  std::vector<Operator> jumps;
  std::vector<DaviesChannel> tags;
  if (channels > 0) {
    for (std::size_t f = 0; f < bohr.frequencies.size(); ++f) {
      const double omega = bohr.frequencies[f];
      const Matrix r = checked_spectral(spectral, omega, channels, options.psd_tol);
      Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (r + r.adjoint()));
      const double top = std::max(0.0, es.eigenvalues().maxCoeff());
      for (Index m = 0; m < channels; ++m) {
        const double mu = es.eigenvalues()(m);
        if (mu <= 1e-14 * top || mu <= 0.0) continue;
        Operator a = Operator::Zero(h.rows(), h.cols());
        for (Index k = 0; k < channels; ++k) {
          a += es.eigenvectors()(k, m) * bohr.components[static_cast<std::size_t>(k)][f];
        }
        if (max_abs(a) == 0.0) continue;
        tags.push_back({omega, omega == 0.0, lambda * lambda * mu, jumps.size()});
        jumps.push_back(lambda * std::sqrt(mu) * a);
      }
    }
  }
  Operator hamiltonian = h;
  if (options.lamb_shift) {
    if (options.lamb_shift->rows() != h.rows() || options.lamb_shift->cols() != h.cols()) {
      throw DimensionError("Lamb-shift correction dimension mismatch");
    }
    hamiltonian += *options.lamb_shift;
  }
  return {GklsGenerator(std::move(hamiltonian), std::move(jumps)), std::move(tags),
          std::move(bohr)};
}

Superoperator davies_superoperator_direct(const Operator& h,
                                          const std::vector<Operator>& couplings,
                                          const SpectralFunction& spectral, double lambda,
                                          double freq_tol) {
  const BohrDecomposition bohr = bohr_decompose(h, couplings, freq_tol);
  const Index d = h.rows();
  const Operator id = Operator::Identity(d, d);
  Superoperator l = commutator_super(h) * (-kI);
  const double l2 = lambda * lambda;
  for (std::size_t f = 0; f < bohr.frequencies.size(); ++f) {
    const Matrix r = spectral(bohr.frequencies[f]);
    for (std::size_t k = 0; k < couplings.size(); ++k) {
      for (std::size_t q = 0; q < couplings.size(); ++q) {
        const Complex coeff = l2 * r(static_cast<Index>(k), static_cast<Index>(q));
        if (coeff == Complex(0.0)) continue;
        const Operator& sk = bohr.components[k][f];
        const Operator sl_dag = bohr.components[q][f].adjoint();
        const Operator prod = sl_dag * sk;
        // 1/2 ([S_k rho, S_l^+] + [S_k, rho S_l^+])
        const Superoperator term = super_from_left_right(sk, sl_dag) -
                                   (super_from_left_right(prod, id) +
                                    super_from_left_right(id, prod)) *
                                       Complex(0.5);
        l += term * coeff;
      }
    }
  }
  return l;
}

ErgodicityReport ergodicity_check(const BohrDecomposition& decomposition, double rank_tol) {
  const Index d = decomposition.eigenvectors.rows();
  Matrix gram = Matrix::Zero(d * d, d * d);
  for (const auto& parts : decomposition.components) {
    for (const auto& s : parts) {
      const Matrix c = commutator_super(s).matrix();
      gram.noalias() += c.adjoint() * c;
    }
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(gram, Eigen::EigenvaluesOnly);
  const RealVector sv = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  const double top = sv.size() ? sv.maxCoeff() : 0.0;
  Index nullity = 0;
  for (Index i = 0; i < sv.size(); ++i) {
    if (sv(i) <= rank_tol * std::max(top, 1e-300)) ++nullity;
  }
  return {nullity == 1, nullity};
}

BlockSplitReport decoherence_block_split(const Superoperator& generator, const Operator& h,
                                         std::optional<double> beta, double tol) {
  const EigenBasis basis = diagonalize(h);
  const Index d = h.rows();
  if (!(generator.dim() == HilbertDim(d))) {
    throw DimensionError("generator and Hamiltonian dimensions differ");
  }
  BlockSplitReport r;
  const double ftol = std::max(default_frequency_tolerance(h), 1e-12);
  r.nondegenerate_spectrum = true;
  for (Index a = 1; a < d; ++a) {
    if (basis.energies(a) - basis.energies(a - 1) <= ftol) r.nondegenerate_spectrum = false;
  }

  const Matrix t = super_from_left_right(basis.vectors, basis.vectors.adjoint()).matrix();
  const Matrix l = t.adjoint() * generator.matrix() * t;
  auto is_pop = [d](Index idx) { return idx % d == idx / d; };
  for (Index i = 0; i < d * d; ++i) {
    for (Index j = 0; j < d * d; ++j) {
      if (is_pop(i) != is_pop(j)) r.max_cross_coupling = std::max(r.max_cross_coupling, std::abs(l(i, j)));
    }
  }
  r.decoupled = r.max_cross_coupling <= tol * std::max(1.0, max_abs(l));

  r.pauli_generator.resize(d, d);
  for (Index a = 0; a < d; ++a)
    for (Index b = 0; b < d; ++b) r.pauli_generator(a, b) = l(a + d * a, b + d * b).real();
  r.rates = r.pauli_generator;
  r.rates.diagonal().setZero();

  Eigen::JacobiSVD<RealMatrix> svd(r.pauli_generator, Eigen::ComputeFullV);
  RealVector p = svd.matrixV().col(d - 1);
  if (p.sum() != 0.0) p /= p.sum();
  r.stationary_populations = p;

  if (beta) {
    const double e0 = basis.energies(0);
    double defect = 0.0;
    double scale = std::max(1e-300, r.rates.cwiseAbs().maxCoeff());
    for (Index a = 0; a < d; ++a) {
      for (Index b = 0; b < d; ++b) {
        const double lhs = r.rates(a, b) * std::exp(-*beta * (basis.energies(b) - e0));
        const double rhs = r.rates(b, a) * std::exp(-*beta * (basis.energies(a) - e0));
        defect = std::max(defect, std::abs(lhs - rhs));
      }
    }
    r.detailed_balance_defect = defect / scale;
    r.detailed_balance = r.detailed_balance_defect <= 1e-10;
  }
  return r;
}

RealMatrix fermi_golden_rule_rates(const Operator& h, const std::vector<Operator>& couplings,
                                   const SpectralFunction& spectral, double lambda) {
  const EigenBasis basis = diagonalize(h);
  const Index d = h.rows();
  std::vector<Matrix> elements;
  for (const auto& s : couplings) elements.push_back(basis.vectors.adjoint() * s * basis.vectors);
  RealMatrix rates = RealMatrix::Zero(d, d);
  for (Index a = 0; a < d; ++a) {
    for (Index b = 0; b < d; ++b) {
      if (a == b) continue;
      const Matrix r = spectral(basis.energies(b) - basis.energies(a));
      Complex total = 0.0;
      for (std::size_t k = 0; k < elements.size(); ++k)
        for (std::size_t q = 0; q < elements.size(); ++q)
          total += r(static_cast<Index>(k), static_cast<Index>(q)) * elements[k](a, b) *
                   std::conj(elements[q](a, b));
      rates(a, b) = lambda * lambda * total.real();
    }
  }
  return rates;
}

DensityMatrix gibbs_state(const Operator& h, double beta) {
  const EigenBasis basis = diagonalize(h);
  const double e0 = basis.energies(0);
  RealVector w = (-beta * (basis.energies.array() - e0)).exp();
  w /= w.sum();
  Matrix rho = basis.vectors * w.cast<Complex>().asDiagonal() * basis.vectors.adjoint();
  return DensityMatrix::unchecked(0.5 * (rho + rho.adjoint()));
}

}  // namespace qds
