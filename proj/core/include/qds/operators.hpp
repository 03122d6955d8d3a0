#pragma once

// Finite-dimensional operator algebra: operators, density matrices,
// superoperators, Choi matrices and Kraus sets.
//
// Vectorization is column-stacking everywhere in this library:
//   vec(A)[i + d*j] = A(i, j),   vec(A rho B) = (B^T (x) A) vec(rho).
// Choi matrices use the block layout C = sum_{k,l} E_kl (x) Lambda(E_kl), i.e.
//   C(k*d + i, l*d + j) = <i| Lambda(|k><l|) |j>.
// Lambda is completely positive iff C is positive semidefinite.

#include <complex>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>

namespace qds {

using Complex = std::complex<double>;
using Index = Eigen::Index;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

/// A d x d complex matrix. Hermiticity is a checkable predicate, not a type.
using Operator = Matrix;

/// Dimension of a finite Hilbert space, d >= 1.
class HilbertDim {
 public:
  explicit HilbertDim(Index d);

  Index value() const { return d_; }
  Index squared() const { return d_ * d_; }

  friend bool operator==(HilbertDim, HilbertDim) = default;

 private:
  Index d_;
};

/// Default numerical tolerances; every operation taking them accepts overrides.
struct Tolerances {
  double hermitian = 1e-10;  // relative to max(1, max |entry|)
  double trace = 1e-10;
  double psd = 1e-10;  // relative to the spectral norm
};

bool is_hermitian(const Operator& a, double tol = 1e-10);
double hermiticity_defect(const Operator& a);

/// Largest singular value.
double operator_norm(const Matrix& a);

/// Sum of singular values.
double trace_norm(const Operator& a);

/// Eigenvalues of the hermitian part (A + A^+)/2, ascending.
RealVector hermitian_eigenvalues(const Operator& a);

struct StateReport {
  double hermiticity_defect = 0.0;
  double trace_defect = 0.0;
  double min_eigenvalue = 0.0;
  bool valid = false;
};

StateReport inspect_state(const Operator& rho, const Tolerances& tol = {});

/// Positive semidefinite, unit-trace operator.
class DensityMatrix {
 public:
  /// Validates hermiticity, trace and positivity; throws ValidationError.
  explicit DensityMatrix(Operator op, const Tolerances& tol = {});

  /// Wraps numerically produced states (propagator outputs) without
  /// validation. Use inspect_state() to audit them.
  static DensityMatrix unchecked(Operator op);

  static DensityMatrix pure(const Vector& psi);
  static DensityMatrix maximally_mixed(Index d);
  static DensityMatrix basis_state(Index d, Index k);

  const Operator& matrix() const { return op_; }
  HilbertDim dim() const { return HilbertDim(op_.rows()); }
  Complex operator()(Index i, Index j) const { return op_(i, j); }

  /// Tr(rho A).
  Complex expectation(const Operator& a) const;

 private:
  DensityMatrix() = default;
  Operator op_;
};

/// Linear map on d x d matrices stored as a d^2 x d^2 matrix acting on
/// column-stacked vectorizations.
class Superoperator {
 public:
  explicit Superoperator(Matrix m);

  static Superoperator identity(HilbertDim dim);
  static Superoperator zero(HilbertDim dim);

  HilbertDim dim() const { return dim_; }
  const Matrix& matrix() const { return m_; }

  Operator apply(const Operator& rho) const;

  /// Hilbert-Schmidt adjoint: Tr(A^+ S(B)) = Tr(S^*(A)^+ B).
  Superoperator adjoint() const;

  /// Composition (*this after rhs).
  Superoperator operator*(const Superoperator& rhs) const;
  Superoperator operator+(const Superoperator& rhs) const;
  Superoperator operator-(const Superoperator& rhs) const;
  Superoperator& operator+=(const Superoperator& rhs);
  Superoperator operator*(Complex scale) const;

 private:
  HilbertDim dim_;
  Matrix m_;
};

class ChoiMatrix {
 public:
  ChoiMatrix(HilbertDim dim, Matrix m);

  HilbertDim dim() const { return dim_; }
  const Matrix& matrix() const { return m_; }

 private:
  HilbertDim dim_;
  Matrix m_;
};

struct KrausSet {
  HilbertDim dim;
  std::vector<Operator> operators;

  Operator apply(const Operator& rho) const;

  /// sum_a W_a^+ W_a; equals 1 for trace-preserving maps.
  Operator completeness() const;
};

Vector vectorize(const Operator& a);
Operator devectorize(const Vector& v);

/// rho -> A rho B.
Superoperator super_from_left_right(const Operator& a, const Operator& b);

/// rho -> [A, rho].
Superoperator commutator_super(const Operator& a);

ChoiMatrix choi_of(const Superoperator& s);
Superoperator super_from_choi(const ChoiMatrix& c);
Superoperator super_from_kraus(const KrausSet& k);

struct CpReport {
  bool completely_positive = false;
  double min_eigenvalue = 0.0;
  double choi_norm = 0.0;
  double hermiticity_defect = 0.0;
};

/// True iff lambda_min(Choi) >= -tol * ||Choi||.
CpReport is_completely_positive(const Superoperator& s, double tol = 1e-10);

/// max-entry distance between S^*(1) and 1.
double trace_preservation_defect(const Superoperator& s);

/// Kraus operators from the spectral decomposition of the Choi matrix.
/// Eigenvalues below cutoff * lambda_max are dropped. Throws
/// ContractViolation when lambda_min < -tol * ||C||.
KrausSet kraus_from_choi(const ChoiMatrix& c, double tol = 1e-10,
                         double cutoff = 1e-12);

/// rho -> rho^T, the standard positive but not completely positive map.
Superoperator transposition_map(HilbertDim dim);

/// rho -> Tr(rho) sigma.
Superoperator replacement_map(const Operator& sigma);

namespace qubit {
// Basis |1> = index 0 (lower level), |2> = index 1 (upper level).
Operator sigma_plus();   // |2><1|
Operator sigma_minus();  // |1><2|
Operator sigma1();
Operator sigma2();
Operator sigma3();  // P2 - P1
Operator projector(int level);  // level in {1, 2}
}  // namespace qubit

namespace fock {
Operator annihilation(Index levels);
Operator creation(Index levels);
Operator number(Index levels);
}  // namespace fock

}  // namespace qds
