#include "qds/thermo.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <string>

#include "qds/davies.hpp"
#include "qds/errors.hpp"

namespace qds {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kContractivityFloor = 1e-9;
constexpr double kHTheoremFloor = 1e-9;

struct Spectrum {
  RealVector values;
  Matrix vectors;
};

Spectrum spectrum(const Operator& rho) {
  if (rho.rows() != rho.cols()) throw DimensionError("state must be square");
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (rho + rho.adjoint()));
  if (es.eigenvalues()(0) < -kEntropyClip) {
    throw ValidationError("eigenvalue " + std::to_string(es.eigenvalues()(0)) +
                          " is below the clipping floor");
  }
  return {es.eigenvalues(), es.eigenvectors()};
}

double plogp_sum(const RealVector& ev) {
  double s = 0.0;
  for (Index i = 0; i < ev.size(); ++i) {
    if (ev(i) > kEntropyClip) s += ev(i) * std::log(ev(i));
  }
  return s;
}

Operator hamiltonian_derivative_fd(const Schedule& schedule, double t) {
  // Five-point stencil on the provider itself; error O(h^4).
  const double h = 1e-3 * std::max(1.0, std::abs(t));
  auto hm = [&](double s) { return schedule.raw(s).hamiltonian(); };
  return (hm(t - 2 * h) - 8.0 * hm(t - h) + 8.0 * hm(t + h) - hm(t + 2 * h)) / (12.0 * h);
}

struct Augmented {
  Operator rho;
  double w = 0.0;
  double q = 0.0;
};

}  // namespace

double von_neumann_entropy(const Operator& rho) {
  const double s = -plogp_sum(spectrum(rho).values);
  return std::max(0.0, s);
}

double von_neumann_entropy(const DensityMatrix& rho) { return von_neumann_entropy(rho.matrix()); }

double relative_entropy(const DensityMatrix& rho, const DensityMatrix& sigma) {
  if (!(rho.dim() == sigma.dim())) throw DimensionError("states have different dimensions");
  const Spectrum r = spectrum(rho.matrix());
  const Spectrum s = spectrum(sigma.matrix());
  const Index d = rho.dim().value();

  // rho must vanish on the kernel of sigma.
  Matrix log_sigma = Matrix::Zero(d, d);
  double outside = 0.0;
  for (Index k = 0; k < d; ++k) {
    const Vector v = s.vectors.col(k);
    if (s.values(k) > kEntropyClip) {
      log_sigma += std::log(s.values(k)) * (v * v.adjoint());
    } else {
      outside += std::real(v.dot(rho.matrix() * v));
    }
  }
  if (outside > kEntropyClip) return kInf;

  const double cross = std::real((rho.matrix() * log_sigma).trace());
  const double value = plogp_sum(r.values) - cross;
  return value < 0.0 && value > -kEntropyClip ? 0.0 : value;
}

ContractivityReport contractivity_check(const Superoperator& map, const DensityMatrix& rho,
                                        const DensityMatrix& sigma, double tol) {
  if (!(map.dim() == rho.dim()) || !(map.dim() == sigma.dim())) {
    throw DimensionError("map and states have different dimensions");
  }
  const CpReport cp = is_completely_positive(map, tol);
  if (!cp.completely_positive) {
    throw ContractViolation("map is not completely positive (min Choi eigenvalue " +
                            std::to_string(cp.min_eigenvalue) + ")");
  }
  const double tp = trace_preservation_defect(map);
  if (tp > tol) {
    throw ContractViolation("map is not trace preserving (defect " + std::to_string(tp) + ")");
  }
  auto image = [&](const DensityMatrix& x) {
    Operator y = map.apply(x.matrix());
    return DensityMatrix::unchecked(0.5 * (y + y.adjoint()));
  };
  ContractivityReport r;
  r.before = relative_entropy(rho, sigma);
  r.after = relative_entropy(image(rho), image(sigma));
  if (std::isinf(r.before)) {
    r.margin = kInf;
  } else {
    r.margin = r.before - r.after;
  }
  r.holds = r.margin >= -kContractivityFloor;
  return r;
}

HTheoremReport h_theorem_check(const GklsGenerator& g, const DensityMatrix& rho0,
                               const std::vector<double>& t_grid) {
  const BistochasticReport b = is_bistochastic(g);
  if (!b.bistochastic) {
    throw PreconditionError("generator is not bistochastic (unital defect " +
                            std::to_string(b.unital_defect) + ")");
  }
  const Superoperator l = generator_superoperator(g);
  HTheoremReport r;
  for (double t : t_grid) {
    r.entropies.push_back(von_neumann_entropy(evolve_exact(l, t, rho0)));
  }
  for (std::size_t i = 1; i < r.entropies.size(); ++i) {
    r.worst_drop = std::max(r.worst_drop, r.entropies[i - 1] - r.entropies[i]);
  }
  r.holds = r.worst_drop <= kHTheoremFloor;
  return r;
}

double ThermoLedger::max_closure_defect() const {
  double m = 0.0;
  for (double c : closure_defect) m = std::max(m, c);
  return m;
}

void ThermoLedger::write_csv(std::ostream& os) const {
  const auto old = os.precision();
  os << "t,E,W,Q,S,sigma,closure_defect\n" << std::setprecision(17);
  for (std::size_t i = 0; i < t.size(); ++i) {
    os << t[i] << ',' << E[i] << ',' << W[i] << ',' << Q[i] << ',' << S[i] << ',' << sigma[i]
       << ',' << closure_defect[i] << '\n';
  }
  os.precision(old);
}

ThermoLedger first_law_ledger(const Schedule& schedule, const DensityMatrix& rho0,
                              const std::vector<double>& grid, const LedgerOptions& options) {
  if (!(options.step > 0.0) || !std::isfinite(options.step)) {
    throw ValidationError("step must be > 0");
  }
  if (grid.empty()) throw ValidationError("ledger grid is empty");
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (!(grid[i] > grid[i - 1])) throw ValidationError("ledger grid must be strictly increasing");
  }
  if (grid.front() < schedule.grid().front()) {
    throw ValidationError("ledger grid starts before the schedule");
  }
  if (options.temperature && !(*options.temperature > 0.0)) {
    throw ValidationError("temperature must be > 0");
  }
  const bool piecewise = schedule.mode() == ScheduleMode::kPiecewiseConstant;

  // Integration breakpoints: ledger points, plus schedule points in piecewise mode.
  std::vector<double> breaks = grid;
  if (piecewise) {
    for (double s : schedule.grid()) {
      if (s > grid.front() && s < grid.back()) breaks.push_back(s);
    }
  }
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());

  auto is_ledger_point = [&](double t) { return std::binary_search(grid.begin(), grid.end(), t); };
  auto is_schedule_point = [&](double t) {
    return std::binary_search(schedule.grid().begin(), schedule.grid().end(), t);
  };
  auto dh = [&](double t) -> Operator {
    if (options.hamiltonian_derivative) return options.hamiltonian_derivative(t);
    return hamiltonian_derivative_fd(schedule, t);
  };

  const GklsGenerator g0 = schedule.generator_at(grid.front());
  if (!(g0.dim() == rho0.dim())) throw DimensionError("schedule and state dimensions differ");

  ThermoLedger ledger;
  Augmented x{rho0.matrix(), 0.0, 0.0};
  Operator h_current = g0.hamiltonian();
  const double e0 = std::real((x.rho * h_current).trace());

  auto record = [&](double t, const Operator& h) {
    const double e = std::real((x.rho * h).trace());
    ledger.t.push_back(t);
    ledger.E.push_back(e);
    ledger.W.push_back(x.w);
    ledger.Q.push_back(x.q);
    ledger.S.push_back(von_neumann_entropy(x.rho));
    ledger.closure_defect.push_back(std::abs(e - e0 - x.w - x.q));
  };
  record(grid.front(), h_current);

  for (std::size_t b = 1; b < breaks.size(); ++b) {
    const double a = breaks[b - 1];
    const double end = breaks[b];
    // In piecewise mode the generator on [a, end) is the one in effect at a.
    const std::optional<GklsGenerator> frozen =
        piecewise ? std::optional<GklsGenerator>(schedule.generator_at(a)) : std::nullopt;

    auto rhs = [&](double t, const Augmented& y) {
      const GklsGenerator g = frozen ? *frozen : schedule.generator_at(t);
      const Operator& h = g.hamiltonian();
      const Operator lrho = g.apply(y.rho);
      Augmented out;
      out.rho = lrho;
      out.q = std::real((lrho * h).trace());
      out.w = frozen ? 0.0 : std::real((y.rho * dh(t)).trace());
      return out;
    };
    auto axpy = [](const Augmented& y, double c, const Augmented& k) {
      return Augmented{y.rho + c * k.rho, y.w + c * k.w, y.q + c * k.q};
    };

    const double span = end - a;
    const auto n = std::max<long>(1, static_cast<long>(std::ceil(span / options.step - 1e-9)));
    const double h = span / static_cast<double>(n);
    for (long i = 0; i < n; ++i) {
      const double t = a + static_cast<double>(i) * h;
      const Augmented k1 = rhs(t, x);
      const Augmented k2 = rhs(t + 0.5 * h, axpy(x, 0.5 * h, k1));
      const Augmented k3 = rhs(t + 0.5 * h, axpy(x, 0.5 * h, k2));
      const Augmented k4 = rhs(t + h, axpy(x, h, k3));
      x.rho += (h / 6.0) * (k1.rho + 2.0 * k2.rho + 2.0 * k3.rho + k4.rho);
      x.w += (h / 6.0) * (k1.w + 2.0 * k2.w + 2.0 * k3.w + k4.w);
      x.q += (h / 6.0) * (k1.q + 2.0 * k2.q + 2.0 * k3.q + k4.q);
    }

    Operator h_next = frozen ? frozen->hamiltonian() : schedule.generator_at(end).hamiltonian();
    if (piecewise && is_schedule_point(end)) {
      // Sudden quench: the state is unchanged while H jumps.
      const Operator h_after = schedule.generator_at(end).hamiltonian();
      x.w += std::real((x.rho * (h_after - h_next)).trace());
      h_next = h_after;
    }
    h_current = h_next;
    if (is_ledger_point(end)) record(end, h_current);
  }

  if (options.temperature) {
    ledger.sigma = entropy_production(ledger.t, ledger.S, ledger.Q, *options.temperature);
  } else {
    ledger.sigma.assign(ledger.t.size(), kNaN);
  }
  return ledger;
}

std::vector<double> entropy_production(const std::vector<double>& t, const std::vector<double>& S,
                                       const std::vector<double>& Q, double temperature) {
  if (t.size() != S.size() || t.size() != Q.size()) {
    throw DimensionError("ledger columns have different lengths");
  }
  if (!(temperature > 0.0)) throw ValidationError("temperature must be > 0");
  const std::size_t n = t.size();
  std::vector<double> out(n, 0.0);
  if (n < 2) return out;

  auto derivative = [&](const std::vector<double>& y, std::size_t i) {
    if (n == 2) return (y[1] - y[0]) / (t[1] - t[0]);
    // Three-point formulas, second order on nonuniform grids; one-sided at the ends.
    if (i == 0) {
      const double h0 = t[1] - t[0];
      const double h1 = t[2] - t[1];
      return (-(2.0 * h0 + h1) / (h0 * (h0 + h1))) * y[0] + ((h0 + h1) / (h0 * h1)) * y[1] -
             (h0 / (h1 * (h0 + h1))) * y[2];
    }
    if (i == n - 1) {
      const double h0 = t[n - 2] - t[n - 3];
      const double h1 = t[n - 1] - t[n - 2];
      return (h1 / (h0 * (h0 + h1))) * y[n - 3] - ((h0 + h1) / (h0 * h1)) * y[n - 2] +
             ((2.0 * h1 + h0) / (h1 * (h0 + h1))) * y[n - 1];
    }
    const double h0 = t[i] - t[i - 1];
    const double h1 = t[i + 1] - t[i];
    return (-h1 / (h0 * (h0 + h1))) * y[i - 1] + ((h1 - h0) / (h0 * h1)) * y[i] +
           (h0 / (h1 * (h0 + h1))) * y[i + 1];
  };
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = derivative(S, i) - derivative(Q, i) / temperature;
  }
  return out;
}

ThermoLedger entropy_balance(const Schedule& schedule, const DensityMatrix& rho0,
                             const std::vector<double>& grid, double temperature, double step,
                             double gibbs_tol) {
  if (!(temperature > 0.0)) throw ValidationError("temperature must be > 0");
  for (double t : grid) {
    const GklsGenerator g = schedule.generator_at(t);
    const DensityMatrix eq = gibbs_state(g.hamiltonian(), 1.0 / temperature);
    const double defect = g.apply(eq.matrix()).cwiseAbs().maxCoeff();
    if (defect > gibbs_tol) {
      throw PreconditionError("generator at t = " + std::to_string(t) +
                              " does not annihilate the Gibbs state (defect " +
                              std::to_string(defect) + ")");
    }
  }
  LedgerOptions options;
  options.step = step;
  options.temperature = temperature;
  return first_law_ledger(schedule, rho0, grid, options);
}

}  // namespace qds
