#include "qds/propagation.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <unsupported/Eigen/MatrixFunctions>

#include "qds/errors.hpp"

namespace qds {
namespace {

void require_nonnegative_time(double t) {
  if (!(t >= 0.0) || !std::isfinite(t)) throw ValidationError("time must be finite and >= 0");
}

void require_positive_step(double step) {
  if (!(step > 0.0) || !std::isfinite(step)) throw ValidationError("step must be > 0");
}

void require_matching(const Superoperator& l, const DensityMatrix& rho) {
  if (!(l.dim() == rho.dim())) throw DimensionError("generator and state dimensions differ");
}

int step_count(double span, double step) {
  return std::max(1, static_cast<int>(std::ceil(span / step - 1e-9)));
}

template <typename Rhs>
Operator rk4_span(const Rhs& rhs, double t0, double t1, Operator rho, double step) {
  if (t1 <= t0) return rho;
  const int n = step_count(t1 - t0, step);
  const double h = (t1 - t0) / n;
  for (int i = 0; i < n; ++i) {
    const double t = t0 + i * h;
    const Operator k1 = rhs(t, rho);
    const Operator k2 = rhs(t + 0.5 * h, rho + (0.5 * h) * k1);
    const Operator k3 = rhs(t + 0.5 * h, rho + (0.5 * h) * k2);
    const Operator k4 = rhs(t + h, rho + h * k3);
    rho += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return rho;
}

Operator contraction_factor(const GklsGenerator& g, double t) {
  constexpr Complex kI{0.0, 1.0};
  const Matrix exponent = (-kI * t) * g.hamiltonian() - (0.5 * t) * g.jump_sum();
  return exponent.exp();
}

Operator transition(const GklsGenerator& g, const Operator& rho) {
  Operator out = Operator::Zero(rho.rows(), rho.cols());
  for (const auto& v : g.jumps()) out.noalias() += v * rho * v.adjoint();
  return out;
}

void check_dyson_args(double t, int order, int grid_intervals) {
  require_nonnegative_time(t);
  if (order < 0 || order > kDysonMaxOrder) {
    throw ValidationError("Dyson order must be in [0, " + std::to_string(kDysonMaxOrder) + "]");
  }
  if (grid_intervals < 1) throw ValidationError("Dyson grid needs at least one interval");
}

// Trapezoid weight of node j when integrating over [0, k*h].
double trapezoid_weight(int j, int k, double h) {
  if (k == 0) return 0.0;
  return (j == 0 || j == k) ? 0.5 * h : h;
}

// Generic Dyson recursion over values of type T (operators or superoperator
// matrices). `w(k, x)` applies W_{kh}, `phi(x)` applies the transition map.
template <typename T, typename ApplyW, typename ApplyPhi>
std::vector<T> dyson_terms(const T& start, int order, int m, double h, const ApplyW& w,
                           const ApplyPhi& phi, const T& zero) {
  std::vector<T> previous(static_cast<std::size_t>(m + 1));
  for (int k = 0; k <= m; ++k) previous[static_cast<std::size_t>(k)] = w(k, start);
  std::vector<T> finals{previous.back()};
  for (int n = 1; n <= order; ++n) {
    std::vector<T> mapped(previous.size());
    for (int j = 0; j <= m; ++j) mapped[static_cast<std::size_t>(j)] = phi(previous[static_cast<std::size_t>(j)]);
    std::vector<T> current(previous.size(), zero);
    for (int k = 0; k <= m; ++k) {
      T acc = zero;
      for (int j = 0; j <= k; ++j) {
        const double wt = trapezoid_weight(j, k, h);
        if (wt == 0.0) continue;
        acc += wt * w(k - j, mapped[static_cast<std::size_t>(j)]);
      }
      current[static_cast<std::size_t>(k)] = std::move(acc);
    }
    finals.push_back(current.back());
    previous = std::move(current);
  }
  return finals;
}

// Index sets of the connected components of the sparsity graph of m.
std::vector<std::vector<Index>> coupled_blocks(const Matrix& m) {
  const Index n = m.rows();
  std::vector<Index> parent(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) parent[i] = i;
  auto find = [&](Index i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < n; ++i) {
      if (i != j && m(i, j) != Complex(0.0)) parent[find(i)] = find(j);
    }
  std::vector<std::vector<Index>> blocks;
  std::vector<Index> slot(static_cast<std::size_t>(n), -1);
  for (Index i = 0; i < n; ++i) {
    const Index r = find(i);
    if (slot[r] < 0) {
      slot[r] = static_cast<Index>(blocks.size());
      blocks.emplace_back();
    }
    blocks[slot[r]].push_back(i);
  }
  return blocks;
}

}  // namespace

Superoperator propagator_exact(const Superoperator& generator, double t) {
  require_nonnegative_time(t);
  if (t == 0.0) return Superoperator::identity(generator.dim());
  const Matrix scaled = generator.matrix() * t;
  const auto blocks = coupled_blocks(scaled);
  if (blocks.size() == 1) return Superoperator(scaled.exp());
  // exp of a (permuted) block-diagonal matrix is block diagonal.
  Matrix out = Matrix::Zero(scaled.rows(), scaled.cols());
  for (const auto& idx : blocks) {
    const auto n = static_cast<Index>(idx.size());
    Matrix sub(n, n);
    for (Index a = 0; a < n; ++a)
      for (Index b = 0; b < n; ++b) sub(a, b) = scaled(idx[a], idx[b]);
    const Matrix e = sub.exp();
    for (Index a = 0; a < n; ++a)
      for (Index b = 0; b < n; ++b) out(idx[a], idx[b]) = e(a, b);
  }
  return Superoperator(std::move(out));
}

DensityMatrix evolve_exact(const Superoperator& generator, double t, const DensityMatrix& rho0) {
  require_matching(generator, rho0);
  require_nonnegative_time(t);
  if (t == 0.0) return rho0;
  return DensityMatrix::unchecked(propagator_exact(generator, t).apply(rho0.matrix()));
}

Schedule::Schedule(GeneratorFn generator, std::vector<double> grid, ScheduleMode mode)
    : generator_(std::move(generator)), grid_(std::move(grid)), mode_(mode) {
  if (!generator_) throw ValidationError("schedule needs a generator provider");
  if (grid_.empty()) throw ValidationError("schedule grid is empty");
  for (std::size_t i = 0; i < grid_.size(); ++i) {
    if (!std::isfinite(grid_[i])) throw ValidationError("schedule grid has non-finite time");
    if (i > 0 && !(grid_[i] > grid_[i - 1])) {
      throw ValidationError("schedule grid must be strictly increasing");
    }
  }
}

GklsGenerator Schedule::generator_at(double t) const {
  if (mode_ == ScheduleMode::kContinuous) return generator_(t);
  auto it = std::upper_bound(grid_.begin(), grid_.end(), t);
  if (it == grid_.begin()) return generator_(grid_.front());
  return generator_(*std::prev(it));
}

DensityMatrix evolve_rk4(const Superoperator& generator, double t, const DensityMatrix& rho0,
                         double step) {
  require_matching(generator, rho0);
  require_nonnegative_time(t);
  require_positive_step(step);
  const Matrix& l = generator.matrix();
  const Index d = rho0.dim().value();
  auto rhs = [&](double, const Operator& rho) -> Operator {
    const Vector v = l * vectorize(rho);
    return Eigen::Map<const Matrix>(v.data(), d, d);
  };
  return DensityMatrix::unchecked(rk4_span(rhs, 0.0, t, rho0.matrix(), step));
}

DensityMatrix evolve_rk4(const Schedule& schedule, double t, const DensityMatrix& rho0,
                         double step) {
  require_positive_step(step);
  const auto& grid = schedule.grid();
  if (t < grid.front()) throw ValidationError("target time precedes the schedule start");
  Operator rho = rho0.matrix();
  double now = grid.front();
  std::size_t next = 1;
  while (now < t) {
    const double stop = (next < grid.size()) ? std::min(grid[next], t) : t;
    if (schedule.mode() == ScheduleMode::kPiecewiseConstant) {
      const GklsGenerator g = schedule.generator_at(now);
      rho = rk4_span([&g](double, const Operator& r) { return g.apply(r); }, now, stop, rho,
                     step);
    } else {
      rho = rk4_span([&schedule](double s, const Operator& r) { return schedule.raw(s).apply(r); },
                     now, stop, rho, step);
    }
    now = stop;
    ++next;
  }
  return DensityMatrix::unchecked(std::move(rho));
}

std::vector<DensityMatrix> evolve_rk4_on_grid(const Schedule& schedule,
                                              const DensityMatrix& rho0, double step) {
  require_positive_step(step);
  const auto& grid = schedule.grid();
  std::vector<DensityMatrix> out{rho0};
  out.reserve(grid.size());
  Operator rho = rho0.matrix();
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    if (schedule.mode() == ScheduleMode::kPiecewiseConstant) {
      const GklsGenerator g = schedule.generator_at(grid[i]);
      rho = rk4_span([&g](double, const Operator& r) { return g.apply(r); }, grid[i],
                     grid[i + 1], rho, step);
    } else {
      rho = rk4_span([&schedule](double s, const Operator& r) { return schedule.raw(s).apply(r); },
                     grid[i], grid[i + 1], rho, step);
    }
    out.push_back(DensityMatrix::unchecked(rho));
  }
  return out;
}

DensityMatrix evolve_piecewise_exact(const Schedule& schedule, double t,
                                     const DensityMatrix& rho0) {
  const auto& grid = schedule.grid();
  if (t < grid.front()) throw ValidationError("target time precedes the schedule start");
  Operator rho = rho0.matrix();
  double now = grid.front();
  std::size_t next = 1;
  while (now < t) {
    const double stop = (next < grid.size()) ? std::min(grid[next], t) : t;
    const Superoperator l = generator_superoperator(schedule.raw(now));
    rho = propagator_exact(l, stop - now).apply(rho);
    now = stop;
    ++next;
  }
  return DensityMatrix::unchecked(std::move(rho));
}

std::vector<DensityMatrix> dyson_partial_sums(const GklsGenerator& g, double t,
                                              const DensityMatrix& rho0, int order,
                                              int grid_intervals) {
  check_dyson_args(t, order, grid_intervals);
  if (!(g.dim() == rho0.dim())) throw DimensionError("generator and state dimensions differ");
  const int m = grid_intervals;
  const double h = t / m;
  const Operator s1 = contraction_factor(g, h);
  std::vector<Operator> powers{Operator::Identity(s1.rows(), s1.cols())};
  for (int k = 1; k <= m; ++k) powers.push_back(powers.back() * s1);
  auto w = [&powers](int k, const Operator& x) -> Operator {
    const Operator& s = powers[static_cast<std::size_t>(k)];
    return s * x * s.adjoint();
  };
  auto phi = [&g](const Operator& x) { return transition(g, x); };
  const Operator zero = Operator::Zero(s1.rows(), s1.cols());
  const std::vector<Operator> terms = dyson_terms(rho0.matrix(), order, m, h, w, phi, zero);

  std::vector<DensityMatrix> sums;
  Operator acc = zero;
  for (const auto& term : terms) {
    acc += term;
    sums.push_back(DensityMatrix::unchecked(acc));
  }
  return sums;
}

DensityMatrix evolve_dyson(const GklsGenerator& g, double t, const DensityMatrix& rho0, int order,
                           int grid_intervals) {
  return dyson_partial_sums(g, t, rho0, order, grid_intervals).back();
}

std::vector<Superoperator> dyson_partial_maps(const GklsGenerator& g, double t, int order,
                                              int grid_intervals) {
  check_dyson_args(t, order, grid_intervals);
  const int m = grid_intervals;
  const double h = t / m;
  const Operator s1 = contraction_factor(g, h);
  const Index d = s1.rows();
  std::vector<Matrix> w_maps{Matrix::Identity(d * d, d * d)};
  const Matrix w1 = super_from_left_right(s1, s1.adjoint()).matrix();
  for (int k = 1; k <= m; ++k) w_maps.push_back(w1 * w_maps.back());
  Matrix phi_map = Matrix::Zero(d * d, d * d);
  for (const auto& v : g.jumps()) phi_map += super_from_left_right(v, v.adjoint()).matrix();

  auto w = [&w_maps](int k, const Matrix& x) -> Matrix {
    return w_maps[static_cast<std::size_t>(k)] * x;
  };
  auto phi = [&phi_map](const Matrix& x) -> Matrix { return phi_map * x; };
  const Matrix zero = Matrix::Zero(d * d, d * d);
  const std::vector<Matrix> terms =
      dyson_terms(Matrix(Matrix::Identity(d * d, d * d)), order, m, h, w, phi, zero);

  std::vector<Superoperator> sums;
  Matrix acc = zero;
  for (const auto& term : terms) {
    acc += term;
    sums.emplace_back(acc);
  }
  return sums;
}

Superoperator propagator_map(const GklsGenerator& g, double t, const Propagator& p) {
  require_nonnegative_time(t);
  const Superoperator l = generator_superoperator(g);
  switch (p.method) {
    case PropagatorMethod::kExactExponential:
      return propagator_exact(l, t);
    case PropagatorMethod::kRk4: {
      require_positive_step(p.step);
      if (t == 0.0) return Superoperator::identity(l.dim());
      const int n = step_count(t, p.step);
      const Matrix hl = l.matrix() * (t / n);
      const Index dd = hl.rows();
      const Matrix hl2 = hl * hl;
      const Matrix hl3 = hl2 * hl;
      const Matrix one_step =
          Matrix::Identity(dd, dd) + hl + hl2 / 2.0 + hl3 / 6.0 + (hl3 * hl) / 24.0;
      Matrix total = Matrix::Identity(dd, dd);
      for (int i = 0; i < n; ++i) total = one_step * total;
      return Superoperator(std::move(total));
    }
    case PropagatorMethod::kDyson:
      return dyson_partial_maps(g, t, p.order, p.grid_intervals).back();
  }
  throw ValidationError("unknown propagator method");
}

double semigroup_defect(const Superoperator& generator, double t, double s) {
  const Superoperator joint = propagator_exact(generator, t + s);
  const Superoperator split = propagator_exact(generator, t) * propagator_exact(generator, s);
  return operator_norm((joint - split).matrix());
}

double semigroup_defect(const GklsGenerator& g, double t, double s, const Propagator& p) {
  const Superoperator joint = propagator_map(g, t + s, p);
  const Superoperator split = propagator_map(g, t, p) * propagator_map(g, s, p);
  return operator_norm((joint - split).matrix());
}

}  // namespace qds
