#include "qds/unraveling.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <thread>

#include "qds/errors.hpp"

namespace qds {
namespace {

constexpr Complex kI{0.0, 1.0};
constexpr std::size_t kChunk = 64;

std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

void check_grid(const std::vector<double>& t_grid) {
  if (t_grid.empty()) throw ValidationError("time grid is empty");
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    if (!(t_grid[i] >= 0.0) || !std::isfinite(t_grid[i])) {
      throw ValidationError("grid times must be finite and >= 0");
    }
    if (i > 0 && !(t_grid[i] > t_grid[i - 1])) {
      throw ValidationError("time grid must be strictly increasing");
    }
  }
}

// Steps (each of length <= dt) taking `from` to `to`; the last one absorbs the
// remainder. Tiny remainders from floating-point grids are folded in.
std::vector<double> step_lengths(double from, double to, double dt) {
  std::vector<double> steps;
  const double span = to - from;
  if (span <= 0.0) return steps;
  const auto full = static_cast<std::size_t>(std::floor(span / dt + 1e-9));
  double covered = 0.0;
  for (std::size_t i = 0; i < full; ++i) {
    steps.push_back(dt);
    covered += dt;
  }
  const double rest = span - covered;
  if (rest > 1e-9 * dt) {
    steps.push_back(rest);
  } else if (!steps.empty()) {
    steps.back() += rest;
  }
  return steps;
}

struct Accumulator {
  std::vector<Matrix> sum;
  std::vector<RealMatrix> sum_sq;

  Accumulator(std::size_t points, Index d)
      : sum(points, Matrix::Zero(d, d)), sum_sq(points, RealMatrix::Zero(d, d)) {}

  void add(std::size_t k, const Vector& psi) {
    const Matrix outer = psi * psi.adjoint();
    sum[k] += outer;
    sum_sq[k] += outer.cwiseAbs2();
  }

  void merge(const Accumulator& other) {
    for (std::size_t k = 0; k < sum.size(); ++k) {
      sum[k] += other.sum[k];
      sum_sq[k] += other.sum_sq[k];
    }
  }
};

struct EigenEnsemble {
  std::vector<double> cumulative;
  std::vector<Vector> states;
};

EigenEnsemble eigen_ensemble(const DensityMatrix& rho0) {
  const Matrix herm = 0.5 * (rho0.matrix() + rho0.matrix().adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> es(herm);
  EigenEnsemble e;
  double total = 0.0;
  for (Index a = 0; a < es.eigenvalues().size(); ++a) {
    const double p = std::max(0.0, es.eigenvalues()(a));
    if (p == 0.0) continue;
    total += p;
    e.cumulative.push_back(total);
    e.states.push_back(es.eigenvectors().col(a));
  }
  if (e.states.empty()) throw ValidationError("initial state has no positive weight");
  for (auto& c : e.cumulative) c /= total;
  e.cumulative.back() = 1.0;
  return e;
}

}  // namespace

TrajectoryState em_step(const GklsGenerator& g, const TrajectoryState& s,
                        std::span<const double> dW, double dt) {
  const Index d = g.dim().value();
  if (s.psi.size() != d) throw DimensionError("state vector does not match generator");
  if (dW.size() != g.jumps().size()) {
    throw DimensionError("need one Wiener increment per jump operator");
  }
  const Matrix drift = -kI * g.hamiltonian() - 0.5 * g.jump_sum();
  Vector next = s.psi + dt * (drift * s.psi);
  for (std::size_t j = 0; j < dW.size(); ++j) {
    next.noalias() -= (kI * dW[j]) * (g.jumps()[j] * s.psi);
  }
  return {std::move(next), s.t + dt};
}

std::uint64_t split_seed(std::uint64_t seed, std::uint64_t trajectory_index) {
  return mix64(mix64(seed) + (trajectory_index + 1) * 0x9E3779B97F4A7C15ULL);
}

EnsembleEstimate ensemble_density(const GklsGenerator& g, const DensityMatrix& rho0,
                                  const std::vector<double>& t_grid,
                                  const TrajectoryConfig& cfg) {
  if (!(cfg.dt > 0.0) || !std::isfinite(cfg.dt)) throw ValidationError("dt must be > 0");
  if (cfg.n_traj < 1) throw ValidationError("n_traj must be >= 1");
  if (!(g.dim() == rho0.dim())) throw DimensionError("generator and state dimensions differ");
  check_grid(t_grid);

  const Index d = g.dim().value();
  const std::size_t n_jumps = g.jumps().size();
  const EigenEnsemble ensemble = eigen_ensemble(rho0);

  // Step plan shared by every trajectory.
  std::vector<std::vector<double>> plan;
  double from = 0.0;
  for (double t : t_grid) {
    plan.push_back(step_lengths(from, t, cfg.dt));
    from = t;
  }

  const Matrix drift = -kI * g.hamiltonian() - 0.5 * g.jump_sum();
  std::vector<Matrix> noise;
  for (const auto& v : g.jumps()) noise.push_back(-kI * v);

  auto run_trajectory = [&](std::size_t index, Accumulator& acc) {
    std::mt19937_64 rng(split_seed(cfg.seed, index));
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    std::normal_distribution<double> normal(0.0, 1.0);
    const double u = uniform(rng);
    const auto pick = static_cast<std::size_t>(
        std::upper_bound(ensemble.cumulative.begin(), ensemble.cumulative.end() - 1, u) -
        ensemble.cumulative.begin());
    Vector psi = ensemble.states[pick];
    Vector next(d);
    for (std::size_t k = 0; k < plan.size(); ++k) {
      for (double h : plan[k]) {
        const double scale = std::sqrt(h);
        next.noalias() = psi + h * (drift * psi);
        for (std::size_t j = 0; j < n_jumps; ++j) {
          next.noalias() += (normal(rng) * scale) * (noise[j] * psi);
        }
        psi.swap(next);
      }
      acc.add(k, psi);
    }
  };

  const std::size_t n_chunks = (cfg.n_traj + kChunk - 1) / kChunk;
  std::vector<Accumulator> chunks(n_chunks, Accumulator(t_grid.size(), d));
  auto run_chunk = [&](std::size_t c) {
    const std::size_t begin = c * kChunk;
    const std::size_t end = std::min(cfg.n_traj, begin + kChunk);
    for (std::size_t i = begin; i < end; ++i) run_trajectory(i, chunks[c]);
  };

  unsigned workers = cfg.threads != 0 ? cfg.threads : std::thread::hardware_concurrency();
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(n_chunks)));
  if (workers == 1) {
    for (std::size_t c = 0; c < n_chunks; ++c) run_chunk(c);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t c = w; c < n_chunks; c += workers) run_chunk(c);
      });
    }
    for (auto& th : pool) th.join();
  }

  // Reduction in chunk order keeps the result independent of the worker count.
  Accumulator total(t_grid.size(), d);
  for (const auto& c : chunks) total.merge(c);

  const auto n = static_cast<double>(cfg.n_traj);
  EnsembleEstimate out;
  out.times = t_grid;
  for (std::size_t k = 0; k < t_grid.size(); ++k) {
    Matrix mean = total.sum[k] / n;
    mean = 0.5 * (mean + mean.adjoint()).eval();
    RealMatrix se = RealMatrix::Zero(d, d);
    if (cfg.n_traj > 1) {
      const RealMatrix var =
          ((total.sum_sq[k] - n * mean.cwiseAbs2()) / (n - 1.0)).cwiseMax(0.0);
      se = (var / n).cwiseSqrt();
    }
    out.mean.push_back(std::move(mean));
    out.standard_error.push_back(std::move(se));
  }
  return out;
}

std::vector<Matrix> em_mean_recursion(const GklsGenerator& g, const DensityMatrix& rho0,
                                      const std::vector<double>& t_grid, double dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ValidationError("dt must be > 0");
  if (!(g.dim() == rho0.dim())) throw DimensionError("generator and state dimensions differ");
  check_grid(t_grid);
  const Index d = g.dim().value();
  const Matrix drift = -kI * g.hamiltonian() - 0.5 * g.jump_sum();
  Matrix rho = rho0.matrix();
  std::vector<Matrix> out;
  double from = 0.0;
  for (double t : t_grid) {
    for (double h : step_lengths(from, t, dt)) {
      const Matrix m = Matrix::Identity(d, d) + h * drift;
      Matrix next = m * rho * m.adjoint();
      for (const auto& v : g.jumps()) next.noalias() += h * (v * rho * v.adjoint());
      rho = std::move(next);
    }
    out.push_back(rho);
    from = t;
  }
  return out;
}

}  // namespace qds
