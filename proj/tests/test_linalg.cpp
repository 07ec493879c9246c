#include <doctest.h>

#include <Eigen/SVD>
#include <cmath>

#include "opalg/linalg.hpp"
#include "opalg/rng.hpp"

using namespace opalg;

namespace {

double svd_oracle(const ComplexMatrix& m) {
  Eigen::JacobiSVD<ComplexMatrix> svd(m);
  return svd.singularValues()(0);
}

SparseOperator to_sparse(const ComplexMatrix& m) {
  std::vector<Triplet> ts;
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      if (m(i, j) != Complex(0, 0)) ts.push_back({i, j, m(i, j)});
  return SparseOperator::from_triplets(m.rows(), m.cols(), ts);
}

}  // namespace

TEST_SUITE("linalg") {
  TEST_CASE("operator norm of the identity") {
    CHECK(operator_norm(ComplexMatrix::Identity(3, 3)) == doctest::Approx(1.0).epsilon(1e-12));
  }

  TEST_CASE("operator norm of a rank-one entry") {
    ComplexMatrix m = ComplexMatrix::Zero(3, 3);
    m(0, 1) = 2.0;  // single entry 2 at row 1, column 2
    CHECK(operator_norm(m) == doctest::Approx(2.0).epsilon(1e-12));
  }

  TEST_CASE("power iteration agrees with the dense SVD oracle on 8x8") {
    Rng rng(42);
    const ComplexMatrix m = rng.gaussian_matrix(8, 8);
    const double oracle = svd_oracle(m);
    const double power = power_iteration_norm(to_sparse(m), 1e-12);
    CHECK(std::abs(power - oracle) <= 1e-9 * oracle);
  }

  TEST_CASE("power iteration matches SVD on 100 seeded matrices up to 32x32") {
    for (int trial = 0; trial < 100; ++trial) {
      Rng rng(derive_seed(7, trial));
      const int rows = 2 + static_cast<int>(rng.uniform_index(31));
      const int cols = 2 + static_cast<int>(rng.uniform_index(31));
      const ComplexMatrix m = rng.gaussian_matrix(rows, cols);
      const double oracle = svd_oracle(m);
      const double power = power_iteration_norm(to_sparse(m), 1e-13);
      CHECK(std::abs(power - oracle) <= 1e-9 * std::max(oracle, 1e-12));
    }
  }

  TEST_CASE("norm is adjoint invariant") {
    for (int trial = 0; trial < 20; ++trial) {
      Rng rng(derive_seed(11, trial));
      const ComplexMatrix m = rng.gaussian_matrix(6, 9);
      CHECK(operator_norm(m) ==
            doctest::Approx(operator_norm(ComplexMatrix(m.adjoint()))).epsilon(1e-10));
    }
  }

  TEST_CASE("block diagonal norm is the max of the blocks") {
    for (int trial = 0; trial < 20; ++trial) {
      Rng rng(derive_seed(13, trial));
      const ComplexMatrix a = rng.gaussian_matrix(5, 5);
      const ComplexMatrix b = rng.gaussian_matrix(7, 7);
      const double lhs = operator_norm(direct_sum(a, b));
      const double rhs = std::max(operator_norm(a), operator_norm(b));
      CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
    }
  }

  TEST_CASE("iterative path crosses over and stays within tolerance") {
    Rng rng(99);
    const ComplexMatrix m = rng.gaussian_matrix(300, 300);  // above the dense crossover
    const double oracle = svd_oracle(m);
    const double estimate = operator_norm(m, 1e-12);
    CHECK(estimate <= oracle * (1 + 1e-9));  // Rayleigh quotients never exceed the norm
    CHECK(estimate >= oracle * (1 - 1e-8));
  }

  TEST_CASE("trace norm basics") {
    ComplexMatrix diag = ComplexMatrix::Zero(2, 2);
    diag(0, 0) = 1.0;
    diag(1, 1) = -2.0;
    CHECK(trace_norm(diag) == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(trace_norm(ComplexMatrix::Zero(4, 4)) == doctest::Approx(0.0));
    ComplexMatrix col(2, 1);
    col(0, 0) = 3.0;
    col(1, 0) = 4.0;
    CHECK(trace_norm(col) == doctest::Approx(5.0).epsilon(1e-12));
  }

  TEST_CASE("trace norm dominates operator norm, equality on rank one") {
    for (int trial = 0; trial < 20; ++trial) {
      Rng rng(derive_seed(17, trial));
      const ComplexMatrix m = rng.gaussian_matrix(5, 5);
      CHECK(trace_norm(m) >= operator_norm(m) - 1e-10);
      const ComplexMatrix rank_one = rng.gaussian_vector(5) * rng.gaussian_vector(5).adjoint();
      CHECK(trace_norm(rank_one) == doctest::Approx(operator_norm(rank_one)).epsilon(1e-10));
    }
  }

  TEST_CASE("hermitian sqrt norm") {
    CHECK(hermitian_sqrt_norm(4.0 * ComplexMatrix::Identity(3, 3)) ==
          doctest::Approx(2.0).epsilon(1e-12));
    ComplexMatrix diag = ComplexMatrix::Zero(2, 2);
    diag(0, 0) = 9.0;
    diag(1, 1) = 1.0;
    CHECK(hermitian_sqrt_norm(diag) == doctest::Approx(3.0).epsilon(1e-12));

    // sum of e_{1i}* e_{1i} over i = 1, 2 in M_2 is the identity
    ComplexMatrix gram = ComplexMatrix::Zero(2, 2);
    for (int i = 0; i < 2; ++i) {
      ComplexMatrix a = ComplexMatrix::Zero(2, 2);
      a(0, i) = 1.0;
      gram += a.adjoint() * a;
    }
    CHECK(hermitian_sqrt_norm(gram) == doctest::Approx(1.0).epsilon(1e-12));
  }

  TEST_CASE("hermitian sqrt norm rejects bad input") {
    ComplexMatrix skew = ComplexMatrix::Zero(2, 2);
    skew(0, 1) = 1.0;
    skew(1, 0) = -1.0;
    CHECK_THROWS_AS(hermitian_sqrt_norm(skew), std::invalid_argument);
    ComplexMatrix neg = -ComplexMatrix::Identity(2, 2);
    CHECK_THROWS_AS(hermitian_sqrt_norm(neg), std::invalid_argument);
  }

  TEST_CASE("sparse operator construction guards") {
    std::vector<Triplet> dup{{0, 0, 1.0}, {0, 0, 2.0}};
    CHECK_THROWS_AS(SparseOperator::from_triplets(2, 2, dup), std::invalid_argument);
    std::vector<Triplet> oob{{2, 0, 1.0}};
    CHECK_THROWS_AS(SparseOperator::from_triplets(2, 2, oob), std::invalid_argument);
    // accumulate merges duplicates instead
    const SparseOperator acc = SparseOperator::accumulate(2, 2, dup);
    CHECK(acc.to_dense()(0, 0) == Complex(3.0, 0.0));
  }

  TEST_CASE("sparse apply agrees with dense") {
    Rng rng(23);
    const ComplexMatrix m = rng.gaussian_matrix(6, 4);
    const SparseOperator s = to_sparse(m);
    const ComplexVector v = rng.gaussian_vector(4);
    CHECK((s.apply(v) - m * v).norm() <= 1e-12);
    CHECK((s.adjoint().to_dense() - m.adjoint()).norm() <= 1e-12);
  }

  TEST_CASE("operator norm requires positive tolerance") {
    CHECK_THROWS_AS(operator_norm(ComplexMatrix::Identity(2, 2), 0.0), std::invalid_argument);
  }
}
