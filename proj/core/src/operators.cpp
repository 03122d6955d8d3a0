#include "qds/operators.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qds/errors.hpp"

namespace qds {
namespace {

Index sqrt_dim(Index n) {
  const auto d = static_cast<Index>(std::llround(std::sqrt(static_cast<double>(n))));
  if (d * d != n) {
    throw DimensionError("size " + std::to_string(n) + " is not a perfect square");
  }
  return d;
}

void require_square(const Matrix& m, const char* what) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw DimensionError(std::string(what) + " must be a non-empty square matrix");
  }
}

void require_same_dim(HilbertDim a, HilbertDim b) {
  if (!(a == b)) {
    throw DimensionError("dimension mismatch: " + std::to_string(a.value()) + " vs " +
                         std::to_string(b.value()));
  }
}

Matrix hermitian_part(const Matrix& a) { return 0.5 * (a + a.adjoint()); }

}  // namespace

HilbertDim::HilbertDim(Index d) : d_(d) {
  if (d < 1) throw DimensionError("Hilbert space dimension must be >= 1");
}

double hermiticity_defect(const Operator& a) {
  if (a.size() == 0) return 0.0;
  return (a - a.adjoint()).cwiseAbs().maxCoeff();
}

bool is_hermitian(const Operator& a, double tol) {
  require_square(a, "operator");
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  return hermiticity_defect(a) <= tol * scale;
}

double operator_norm(const Matrix& a) {
  if (a.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(a);
  return svd.singularValues()(0);
}

double trace_norm(const Operator& a) {
  if (a.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(a);
  return svd.singularValues().sum();
}

RealVector hermitian_eigenvalues(const Operator& a) {
  require_square(a, "operator");
  Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian_part(a), Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

StateReport inspect_state(const Operator& rho, const Tolerances& tol) {
  require_square(rho, "density matrix");
  StateReport r;
  r.hermiticity_defect = hermiticity_defect(rho);
  r.trace_defect = std::abs(rho.trace() - Complex(1.0, 0.0));
  const RealVector ev = hermitian_eigenvalues(rho);
  r.min_eigenvalue = ev(0);
  const double norm = std::max(std::abs(ev(0)), std::abs(ev(ev.size() - 1)));
  const double scale = std::max(1.0, rho.cwiseAbs().maxCoeff());
  r.valid = r.hermiticity_defect <= tol.hermitian * scale && r.trace_defect <= tol.trace &&
            r.min_eigenvalue >= -tol.psd * std::max(norm, 1.0);
  return r;
}

DensityMatrix::DensityMatrix(Operator op, const Tolerances& tol) : op_(std::move(op)) {
  const StateReport r = inspect_state(op_, tol);
  if (!r.valid) {
    throw ValidationError("not a density matrix: hermiticity defect " +
                          std::to_string(r.hermiticity_defect) + ", trace defect " +
                          std::to_string(r.trace_defect) + ", min eigenvalue " +
                          std::to_string(r.min_eigenvalue));
  }
}

DensityMatrix DensityMatrix::unchecked(Operator op) {
  require_square(op, "density matrix");
  DensityMatrix d;
  d.op_ = std::move(op);
  return d;
}

DensityMatrix DensityMatrix::pure(const Vector& psi) {
  const double n = psi.norm();
  if (psi.size() == 0 || n == 0.0) throw ValidationError("pure state needs a nonzero vector");
  const Vector u = psi / n;
  return unchecked(u * u.adjoint());
}

DensityMatrix DensityMatrix::maximally_mixed(Index d) {
  const HilbertDim dim(d);
  return unchecked(Operator::Identity(dim.value(), dim.value()) / static_cast<double>(d));
}

DensityMatrix DensityMatrix::basis_state(Index d, Index k) {
  const HilbertDim dim(d);
  if (k < 0 || k >= d) throw ValidationError("basis index out of range");
  Operator op = Operator::Zero(dim.value(), dim.value());
  op(k, k) = 1.0;
  return unchecked(std::move(op));
}

Complex DensityMatrix::expectation(const Operator& a) const {
  if (a.rows() != op_.rows() || a.cols() != op_.cols()) {
    throw DimensionError("observable dimension mismatch");
  }
  return (op_ * a).trace();
}

Superoperator::Superoperator(Matrix m) : dim_(1), m_(std::move(m)) {
  require_square(m_, "superoperator");
  dim_ = HilbertDim(sqrt_dim(m_.rows()));
}

Superoperator Superoperator::identity(HilbertDim dim) {
  return Superoperator(Matrix::Identity(dim.squared(), dim.squared()));
}

Superoperator Superoperator::zero(HilbertDim dim) {
  return Superoperator(Matrix::Zero(dim.squared(), dim.squared()));
}

Operator Superoperator::apply(const Operator& rho) const {
  if (rho.rows() != dim_.value() || rho.cols() != dim_.value()) {
    throw DimensionError("superoperator applied to operator of wrong dimension");
  }
  return devectorize(m_ * vectorize(rho));
}

Superoperator Superoperator::adjoint() const { return Superoperator(m_.adjoint()); }

Superoperator Superoperator::operator*(const Superoperator& rhs) const {
  require_same_dim(dim_, rhs.dim_);
  return Superoperator(m_ * rhs.m_);
}

Superoperator Superoperator::operator+(const Superoperator& rhs) const {
  require_same_dim(dim_, rhs.dim_);
  return Superoperator(m_ + rhs.m_);
}

Superoperator Superoperator::operator-(const Superoperator& rhs) const {
  require_same_dim(dim_, rhs.dim_);
  return Superoperator(m_ - rhs.m_);
}

Superoperator& Superoperator::operator+=(const Superoperator& rhs) {
  require_same_dim(dim_, rhs.dim_);
  m_ += rhs.m_;
  return *this;
}

Superoperator Superoperator::operator*(Complex scale) const { return Superoperator(m_ * scale); }

ChoiMatrix::ChoiMatrix(HilbertDim dim, Matrix m) : dim_(dim), m_(std::move(m)) {
  if (m_.rows() != dim.squared() || m_.cols() != dim.squared()) {
    throw DimensionError("Choi matrix must be d^2 x d^2");
  }
}

Operator KrausSet::apply(const Operator& rho) const {
  if (rho.rows() != dim.value() || rho.cols() != dim.value()) {
    throw DimensionError("Kraus set applied to operator of wrong dimension");
  }
  Operator out = Operator::Zero(dim.value(), dim.value());
  for (const auto& w : operators) out += w * rho * w.adjoint();
  return out;
}

Operator KrausSet::completeness() const {
  Operator out = Operator::Zero(dim.value(), dim.value());
  for (const auto& w : operators) out += w.adjoint() * w;
  return out;
}

Vector vectorize(const Operator& a) {
  return Eigen::Map<const Vector>(a.data(), a.size());
}

Operator devectorize(const Vector& v) {
  const Index d = sqrt_dim(v.size());
  return Eigen::Map<const Matrix>(v.data(), d, d);
}

Superoperator super_from_left_right(const Operator& a, const Operator& b) {
  require_square(a, "left factor");
  require_square(b, "right factor");
  if (a.rows() != b.rows()) throw DimensionError("left/right factors differ in dimension");
  const Index d = a.rows();
  // vec(A rho B) = (B^T (x) A) vec(rho)
  Matrix m(d * d, d * d);
  for (Index p = 0; p < d; ++p) {
    for (Index q = 0; q < d; ++q) {
      m.block(p * d, q * d, d, d) = b(q, p) * a;
    }
  }
  return Superoperator(std::move(m));
}

Superoperator commutator_super(const Operator& a) {
  const Operator id = Operator::Identity(a.rows(), a.cols());
  return super_from_left_right(a, id) - super_from_left_right(id, a);
}

ChoiMatrix choi_of(const Superoperator& s) {
  const Index d = s.dim().value();
  const Matrix& m = s.matrix();
  Matrix c(d * d, d * d);
  for (Index k = 0; k < d; ++k)
    for (Index l = 0; l < d; ++l)
      for (Index i = 0; i < d; ++i)
        for (Index j = 0; j < d; ++j) c(k * d + i, l * d + j) = m(i + d * j, k + d * l);
  return ChoiMatrix(s.dim(), std::move(c));
}

Superoperator super_from_choi(const ChoiMatrix& c) {
  const Index d = c.dim().value();
  const Matrix& cm = c.matrix();
  Matrix m(d * d, d * d);
  for (Index k = 0; k < d; ++k)
    for (Index l = 0; l < d; ++l)
      for (Index i = 0; i < d; ++i)
        for (Index j = 0; j < d; ++j) m(i + d * j, k + d * l) = cm(k * d + i, l * d + j);
  return Superoperator(std::move(m));
}

Superoperator super_from_kraus(const KrausSet& k) {
  Superoperator s = Superoperator::zero(k.dim);
  for (const auto& w : k.operators) s += super_from_left_right(w, w.adjoint());
  return s;
}

CpReport is_completely_positive(const Superoperator& s, double tol) {
  const ChoiMatrix c = choi_of(s);
  CpReport r;
  r.hermiticity_defect = hermiticity_defect(c.matrix());
  Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian_part(c.matrix()), Eigen::EigenvaluesOnly);
  const RealVector& ev = es.eigenvalues();
  r.min_eigenvalue = ev(0);
  r.choi_norm = std::max(std::abs(ev(0)), std::abs(ev(ev.size() - 1)));
  const double scale = std::max(1.0, c.matrix().cwiseAbs().maxCoeff());
  r.completely_positive = r.hermiticity_defect <= tol * scale &&
                          r.min_eigenvalue >= -tol * r.choi_norm;
  return r;
}

double trace_preservation_defect(const Superoperator& s) {
  const Index d = s.dim().value();
  const Operator id = Operator::Identity(d, d);
  return (s.adjoint().apply(id) - id).cwiseAbs().maxCoeff();
}

KrausSet kraus_from_choi(const ChoiMatrix& c, double tol, double cutoff) {
  const Index d = c.dim().value();
  Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian_part(c.matrix()));
  const RealVector& ev = es.eigenvalues();
  const double lmax = ev(ev.size() - 1);
  const double norm = std::max(std::abs(ev(0)), std::abs(lmax));
  if (ev(0) < -tol * norm) {
    throw ContractViolation("Choi matrix is not positive semidefinite: lambda_min = " +
                            std::to_string(ev(0)));
  }
  KrausSet out{c.dim(), {}};
  for (Index a = ev.size() - 1; a >= 0; --a) {
    if (ev(a) <= cutoff * lmax || ev(a) <= 0.0) break;
    const Vector v = es.eigenvectors().col(a) * std::sqrt(ev(a));
    Operator w(d, d);
    for (Index k = 0; k < d; ++k)
      for (Index i = 0; i < d; ++i) w(i, k) = v(k * d + i);
    out.operators.push_back(std::move(w));
  }
  return out;
}

Superoperator transposition_map(HilbertDim dim) {
  const Index d = dim.value();
  Matrix m = Matrix::Zero(d * d, d * d);
  for (Index i = 0; i < d; ++i)
    for (Index j = 0; j < d; ++j) m(j + d * i, i + d * j) = 1.0;
  return Superoperator(std::move(m));
}

Superoperator replacement_map(const Operator& sigma) {
  require_square(sigma, "replacement state");
  const Index d = sigma.rows();
  const Vector out = vectorize(sigma);
  const Vector tr = vectorize(Operator::Identity(d, d));
  return Superoperator(out * tr.transpose());
}

namespace qubit {

Operator sigma_plus() {
  Operator m = Operator::Zero(2, 2);
  m(1, 0) = 1.0;
  return m;
}

Operator sigma_minus() { return sigma_plus().adjoint(); }

Operator sigma1() { return sigma_plus() + sigma_minus(); }

Operator sigma2() {
  Operator m = Operator::Zero(2, 2);
  m(0, 1) = Complex(0.0, -1.0);
  m(1, 0) = Complex(0.0, 1.0);
  return m;
}

Operator sigma3() { return projector(2) - projector(1); }

Operator projector(int level) {
  if (level != 1 && level != 2) throw ValidationError("qubit level must be 1 or 2");
  Operator m = Operator::Zero(2, 2);
  m(level - 1, level - 1) = 1.0;
  return m;
}

}  // namespace qubit

namespace fock {

Operator annihilation(Index levels) {
  const HilbertDim dim(levels);
  Operator a = Operator::Zero(dim.value(), dim.value());
  for (Index n = 1; n < levels; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
  return a;
}

Operator creation(Index levels) { return annihilation(levels).adjoint(); }

Operator number(Index levels) {
  const HilbertDim dim(levels);
  Operator n = Operator::Zero(dim.value(), dim.value());
  for (Index k = 0; k < levels; ++k) n(k, k) = static_cast<double>(k);
  return n;
}

}  // namespace fock

}  // namespace qds
