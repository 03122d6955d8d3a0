#include <cmath>
#include <string>

#include "qds/errors.hpp"
#include "qds/models.hpp"

namespace qds::models {
namespace {

constexpr Complex kI{0.0, 1.0};

Operator drift_hamiltonian(const BlochBoltzmannDiscrete& m, std::size_t i) {
  Operator h = Operator::Zero(m.n_levels, m.n_levels);
  for (std::size_t a = 0; a < m.basis.size(); ++a) h += m.drift[i][a] * m.basis[a];
  return h;
}

Operator loss_operator(const BlochBoltzmannDiscrete& m, std::size_t i) {
  const Matrix gamma = m.loss_matrix(i);
  Operator g = Operator::Zero(m.n_levels, m.n_levels);
  for (std::size_t a = 0; a < m.basis.size(); ++a)
    for (std::size_t b = 0; b < m.basis.size(); ++b) {
      const Complex c = gamma(static_cast<Index>(a), static_cast<Index>(b));
      if (c != Complex(0.0)) g += c * m.basis[a].adjoint() * m.basis[b];
    }
  return g;
}

Operator gain(const BlochBoltzmannDiscrete& m, std::size_t i, std::size_t j, const Operator& rho) {
  Operator out = Operator::Zero(m.n_levels, m.n_levels);
  const Matrix& k = m.kernel[i][j];
  for (std::size_t a = 0; a < m.basis.size(); ++a)
    for (std::size_t b = 0; b < m.basis.size(); ++b) {
      const Complex c = k(static_cast<Index>(a), static_cast<Index>(b));
      if (c != Complex(0.0)) out += c * m.basis[a] * rho * m.basis[b].adjoint();
    }
  return out * m.dv;
}

void check_state(const BlochBoltzmannDiscrete& m, const VelocityState& state) {
  if (state.size() != m.velocities.size()) {
    throw DimensionError("state needs one block per velocity");
  }
  for (const auto& block : state) {
    if (block.rows() != m.n_levels || block.cols() != m.n_levels) {
      throw DimensionError("velocity block has the wrong dimension");
    }
  }
}

}  // namespace

void BlochBoltzmannDiscrete::validate(double psd_tol) const {
  const std::size_t nv = velocities.size();
  if (nv == 0) throw DimensionError("velocity grid is empty");
  if (n_levels < 1) throw DimensionError("n_levels must be >= 1");
  if (!(dv > 0.0)) throw ValidationError("dv must be > 0");
  for (const auto& s : basis) {
    if (s.rows() != n_levels || s.cols() != n_levels) throw DimensionError("basis element has wrong size");
  }
  const auto nb = static_cast<Index>(basis.size());
  if (drift.size() != nv) throw DimensionError("drift needs one row per velocity");
  for (std::size_t i = 0; i < nv; ++i) {
    if (drift[i].size() != basis.size()) throw DimensionError("drift row needs one entry per basis element");
    if (!is_hermitian(drift_hamiltonian(*this, i))) {
      throw ValidationError("drift Hamiltonian at velocity " + std::to_string(i) + " is not hermitian");
    }
  }
  if (kernel.size() != nv) throw DimensionError("kernel needs N x N blocks");
  for (std::size_t i = 0; i < nv; ++i) {
    if (kernel[i].size() != nv) throw DimensionError("kernel needs N x N blocks");
    for (std::size_t j = 0; j < nv; ++j) {
      const Matrix& k = kernel[i][j];
      if (k.rows() != nb || k.cols() != nb) throw DimensionError("kernel block has wrong size");
      const double scale = std::max(1.0, k.size() ? k.cwiseAbs().maxCoeff() : 0.0);
      if (hermiticity_defect(k) > 1e-10 * scale) {
        throw ContractViolation("kernel block is not hermitian");
      }
      if (nb > 0) {
        const RealVector ev = hermitian_eigenvalues(k);
        const double norm = std::max(std::abs(ev(0)), std::abs(ev(ev.size() - 1)));
        if (ev(0) < -psd_tol * std::max(norm, 1e-300)) {
          throw ContractViolation("kernel block (" + std::to_string(i) + ", " + std::to_string(j) +
                                  ") is not positive semidefinite");
        }
      }
    }
  }
}

Matrix BlochBoltzmannDiscrete::loss_matrix(std::size_t i) const {
  const auto nb = static_cast<Index>(basis.size());
  Matrix sum = Matrix::Zero(nb, nb);
  for (std::size_t j = 0; j < velocities.size(); ++j) sum += kernel[j][i];
  return sum.transpose() * dv;
}

double total_trace(const BlochBoltzmannDiscrete& m, const VelocityState& state) {
  check_state(m, state);
  double total = 0.0;
  for (const auto& block : state) total += block.trace().real();
  return total * m.dv;
}

VelocityState bloch_boltzmann_rhs(const BlochBoltzmannDiscrete& m, const VelocityState& state) {
  check_state(m, state);
  const std::size_t nv = state.size();
  VelocityState out(nv);
  for (std::size_t i = 0; i < nv; ++i) {
    const Operator h = drift_hamiltonian(m, i);
    const Operator g = loss_operator(m, i);
    const Operator& rho = state[i];
    Operator d = -kI * (h * rho - rho * h) - 0.5 * (g * rho + rho * g);
    for (std::size_t j = 0; j < nv; ++j) d += gain(m, i, j, state[j]);
    out[i] = std::move(d);
  }
  return out;
}

VelocityState bloch_boltzmann_step(const BlochBoltzmannDiscrete& m, const VelocityState& state,
                                   double dt, double trace_tol) {
  m.validate();
  if (!(dt > 0.0)) throw ValidationError("dt must be > 0");
  check_state(m, state);
  for (const auto& block : state) {
    const RealVector ev = hermitian_eigenvalues(block);
    if (ev(0) < -1e-8 * std::max(1.0, ev(ev.size() - 1))) {
      throw ContractViolation("velocity block is not positive semidefinite");
    }
  }
  const double trace = total_trace(m, state);
  if (std::abs(trace - 1.0) > trace_tol) {
    throw ContractViolation("total trace " + std::to_string(trace) + " violates the budget");
  }

  auto axpy = [](const VelocityState& x, double a, const VelocityState& y) {
    VelocityState z(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) z[i] = x[i] + a * y[i];
    return z;
  };
  const VelocityState k1 = bloch_boltzmann_rhs(m, state);
  const VelocityState k2 = bloch_boltzmann_rhs(m, axpy(state, 0.5 * dt, k1));
  const VelocityState k3 = bloch_boltzmann_rhs(m, axpy(state, 0.5 * dt, k2));
  const VelocityState k4 = bloch_boltzmann_rhs(m, axpy(state, dt, k3));
  VelocityState next(state.size());
  for (std::size_t i = 0; i < state.size(); ++i) {
    next[i] = state[i] + (dt / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  }
  return next;
}

Matrix bloch_boltzmann_generator_matrix(const BlochBoltzmannDiscrete& m) {
  m.validate();
  const std::size_t nv = m.velocities.size();
  const Index n = m.n_levels;
  const Index nn = n * n;
  const Operator id = Operator::Identity(n, n);
  Matrix big = Matrix::Zero(static_cast<Index>(nv) * nn, static_cast<Index>(nv) * nn);
  for (std::size_t i = 0; i < nv; ++i) {
    const auto row = static_cast<Index>(i) * nn;
    const Operator g = loss_operator(m, i);
    Matrix local = (commutator_super(drift_hamiltonian(m, i)) * (-kI)).matrix();
    local -= 0.5 * (super_from_left_right(g, id).matrix() + super_from_left_right(id, g).matrix());
    big.block(row, row, nn, nn) += local;
    for (std::size_t j = 0; j < nv; ++j) {
      const Matrix& k = m.kernel[i][j];
      Matrix block = Matrix::Zero(nn, nn);
      for (std::size_t a = 0; a < m.basis.size(); ++a)
        for (std::size_t b = 0; b < m.basis.size(); ++b) {
          const Complex c = k(static_cast<Index>(a), static_cast<Index>(b));
          if (c != Complex(0.0)) {
            block += c * super_from_left_right(m.basis[a], m.basis[b].adjoint()).matrix();
          }
        }
      big.block(row, static_cast<Index>(j) * nn, nn, nn) += block * m.dv;
    }
  }
  return big;
}

VelocityState bloch_boltzmann_stationary(const BlochBoltzmannDiscrete& m) {
  const Matrix big = bloch_boltzmann_generator_matrix(m);
  Eigen::JacobiSVD<Matrix> svd(big, Eigen::ComputeFullV);
  const Vector v = svd.matrixV().col(big.cols() - 1);
  const Index nn = m.n_levels * m.n_levels;
  VelocityState out;
  Complex total = 0.0;
  for (std::size_t i = 0; i < m.velocities.size(); ++i) {
    out.push_back(devectorize(v.segment(static_cast<Index>(i) * nn, nn)));
    total += out.back().trace();
  }
  total *= m.dv;
  for (auto& block : out) {
    block /= total;
    block = 0.5 * (block + block.adjoint()).eval();
  }
  return out;
}

std::vector<Operator> matrix_unit_basis(Index n) {
  const HilbertDim dim(n);
  std::vector<Operator> out;
  for (Index i = 0; i < dim.value(); ++i)
    for (Index j = 0; j < dim.value(); ++j) {
      Operator e = Operator::Zero(n, n);
      e(i, j) = 1.0;
      out.push_back(std::move(e));
    }
  return out;
}

}  // namespace qds::models
