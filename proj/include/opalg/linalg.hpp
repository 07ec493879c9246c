#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include "opalg/errors.hpp"

namespace opalg {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

struct Triplet {
  Eigen::Index row;
  Eigen::Index col;
  Complex value;
};

/// Sparse complex operator with duplicate-free coordinate storage.
///
/// Construction via from_triplets rejects out-of-range and duplicate
/// coordinates; accumulate() is the permissive builder used internally
/// when summing operators entry-wise.
class SparseOperator {
 public:
  SparseOperator() : mat_(0, 0) {}
  SparseOperator(Eigen::Index rows, Eigen::Index cols) : mat_(rows, cols) {}

  static SparseOperator from_triplets(Eigen::Index rows, Eigen::Index cols,
                                      const std::vector<Triplet>& entries);
  static SparseOperator accumulate(Eigen::Index rows, Eigen::Index cols,
                                   const std::vector<Triplet>& entries);
  static SparseOperator identity(Eigen::Index n);
  static SparseOperator diagonal(const Eigen::VectorXd& d);

  Eigen::Index rows() const { return mat_.rows(); }
  Eigen::Index cols() const { return mat_.cols(); }
  Eigen::Index nonzero_count() const { return mat_.nonZeros(); }

  ComplexVector apply(const ComplexVector& v) const { return mat_ * v; }
  ComplexVector apply_adjoint(const ComplexVector& v) const { return mat_.adjoint() * v; }

  SparseOperator adjoint() const;
  ComplexMatrix to_dense() const { return ComplexMatrix(mat_); }
  std::vector<Triplet> triplets() const;

  const Eigen::SparseMatrix<Complex>& matrix() const { return mat_; }

  SparseOperator operator+(const SparseOperator& o) const;
  SparseOperator operator-(const SparseOperator& o) const;
  SparseOperator operator*(const SparseOperator& o) const;
  SparseOperator scaled(Complex factor) const;

  /// Kronecker product with a dense block: (*this) (x) block.
  SparseOperator kron_dense(const ComplexMatrix& block) const;

 private:
  explicit SparseOperator(Eigen::SparseMatrix<Complex> m) : mat_(std::move(m)) {}
  Eigen::SparseMatrix<Complex> mat_;
};

// Largest singular value.  Dense SVD below the dimension crossover,
// iterative Krylov estimation on M*M above it.  The iterative value is a
// Rayleigh quotient, i.e. always a certified under-estimate of the norm.
double operator_norm(const ComplexMatrix& m, double tol = 1e-10);
double operator_norm(const SparseOperator& m, double tol = 1e-10);

/// Plain power iteration on M*M; deterministic seeded start, stops when
/// the Rayleigh-quotient increment falls below tol, capped at max_iter.
double power_iteration_norm(const SparseOperator& m, double tol = 1e-10, int max_iter = 10000);
double power_iteration_norm(const ComplexMatrix& m, double tol = 1e-10, int max_iter = 10000);

/// Sum of singular values.
double trace_norm(const ComplexMatrix& m);

/// For Hermitian positive semidefinite M returns ||M||^{1/2}, the norm of
/// the positive square root.  Rejects inputs that fail the symmetry or
/// positivity check at tolerance 1e-9 * ||M||_F.
double hermitian_sqrt_norm(const ComplexMatrix& m);

ComplexMatrix direct_sum(const ComplexMatrix& a, const ComplexMatrix& b);

/// sum_i ops[i] (x) coefficients[i] assembled as one sparse operator.
SparseOperator kron_sum(const std::vector<SparseOperator>& ops,
                        const std::vector<ComplexMatrix>& coefficients);

inline constexpr Eigen::Index kDenseNormCrossover = 256;

}  // namespace opalg
