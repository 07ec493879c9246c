#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <cmath>

#include "opalg/freegroup.hpp"
#include "opalg/rng.hpp"

using namespace opalg;

namespace {

// Independent count 1 + sum_{m=1..R} 2n (2n-1)^{m-1}.
std::size_t ball_count_oracle(int n, int radius) {
  std::size_t total = 1;
  std::size_t level = 2 * static_cast<std::size_t>(n);
  for (int m = 1; m <= radius; ++m) {
    total += level;
    level *= 2 * n - 1;
  }
  return total;
}

ReducedWord random_word(Rng& rng, int n, int max_len) {
  std::vector<int> letters;
  const int len = static_cast<int>(rng.uniform_index(max_len + 1));
  for (int i = 0; i < len; ++i) {
    const int g = 1 + static_cast<int>(rng.uniform_index(n));
    letters.push_back(rng.uniform() < 0.5 ? g : -g);
  }
  return ReducedWord::from_letters(letters);
}

}  // namespace

TEST_SUITE("freegroup") {
  TEST_CASE("multiplication cancels") {
    const ReducedWord g1 = ReducedWord::generator(1);
    CHECK(multiply(g1, g1.inverse()).is_identity());

    const ReducedWord w1 = ReducedWord::from_letters({1, 2});
    const ReducedWord w2 = ReducedWord::from_letters({-2, 3});
    CHECK(multiply(w1, w2) == ReducedWord::from_letters({1, 3}));

    CHECK(ReducedWord::from_letters({1, 2, -1}).length() == 3);
  }

  TEST_CASE("multiplication is associative with unit") {
    const ReducedWord e;
    for (int trial = 0; trial < 1000; ++trial) {
      Rng rng(derive_seed(101, trial));
      const ReducedWord a = random_word(rng, 3, 6);
      const ReducedWord b = random_word(rng, 3, 6);
      const ReducedWord c = random_word(rng, 3, 6);
      CHECK(multiply(multiply(a, b), c) == multiply(a, multiply(b, c)));
      CHECK(multiply(a, e) == a);
      CHECK(multiply(e, a) == a);
    }
  }

  TEST_CASE("ball sizes") {
    CHECK(GroupBall(2, 0).size() == 1);
    CHECK(GroupBall(2, 1).size() == 5);
    CHECK(GroupBall(2, 3).size() == 53);
    for (int n = 1; n <= 3; ++n)
      for (int r = 0; r <= 4; ++r) CHECK(GroupBall(n, r).size() == ball_count_oracle(n, r));
  }

  TEST_CASE("ball enumeration is breadth-first, duplicate-free, indexed") {
    const GroupBall ball(2, 3);
    CHECK(ball.word(0).is_identity());
    int prev_len = 0;
    for (std::size_t i = 0; i < ball.size(); ++i) {
      CHECK(ball.word(i).length() >= prev_len);  // lengths never decrease
      prev_len = ball.word(i).length();
      const auto idx = ball.index(ball.word(i));
      REQUIRE(idx.has_value());
      CHECK(*idx == i);
    }
    CHECK_FALSE(ball.index(ReducedWord::from_letters({1, 2, 1, 2})).has_value());
  }

  TEST_CASE("ball size guard") {
    CHECK_THROWS_AS(GroupBall(3, 20), SizeLimitError);
  }

  TEST_CASE("translation operator on the rank-one ball") {
    // n=1, R=2: the ball is g^-2..g^2 and translation by g shifts the path
    const GroupBall ball(1, 2);
    const SparseOperator lam = lambda_truncated(ball, ReducedWord::generator(1));
    const ComplexMatrix dense = lam.to_dense();
    for (std::size_t col = 0; col < ball.size(); ++col) {
      const ReducedWord target = multiply(ReducedWord::generator(1), ball.word(col));
      const auto row = ball.index(target);
      for (std::size_t r = 0; r < ball.size(); ++r)
        CHECK(dense(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(col)) ==
              ((row && *row == r) ? Complex(1, 0) : Complex(0, 0)));
    }
    // g^2 leaves the ball
    const auto top = ball.index(ReducedWord::from_letters({1, 1}));
    REQUIRE(top.has_value());
    ComplexVector v = ComplexVector::Zero(static_cast<Eigen::Index>(ball.size()));
    v(static_cast<Eigen::Index>(*top)) = 1.0;
    CHECK(lam.apply(v).norm() == doctest::Approx(0.0));
  }

  TEST_CASE("identity word gives the identity operator") {
    const GroupBall ball(2, 2);
    const SparseOperator lam = lambda_truncated(ball, ReducedWord());
    CHECK((lam.to_dense() - ComplexMatrix::Identity(ball.size(), ball.size())).norm() == 0.0);
  }

  TEST_CASE("translation composes on the safe subspace") {
    const GroupBall ball(2, 4);
    Rng rng(7);
    for (int trial = 0; trial < 10; ++trial) {
      const ReducedWord w1 = random_word(rng, 2, 2);
      const ReducedWord w2 = random_word(rng, 2, 2);
      const SparseOperator composed = lambda_truncated(ball, w1) * lambda_truncated(ball, w2);
      const SparseOperator direct = lambda_truncated(ball, multiply(w1, w2));
      for (std::size_t col = 0; col < ball.size(); ++col) {
        const ReducedWord& g = ball.word(col);
        const ReducedWord w2g = multiply(w2, g);
        if (w2g.length() > ball.radius()) continue;
        if (multiply(w1, w2g).length() > ball.radius()) continue;
        ComplexVector v = ComplexVector::Zero(static_cast<Eigen::Index>(ball.size()));
        v(static_cast<Eigen::Index>(col)) = 1.0;
        CHECK((composed.apply(v) - direct.apply(v)).norm() <= 1e-14);
      }
    }
  }

  TEST_CASE("boundary projections resolve the identity") {
    const GroupBall ball(2, 3);
    const Eigen::Index dim = static_cast<Eigen::Index>(ball.size());
    ComplexMatrix sum = ComplexMatrix::Zero(dim, dim);
    const BoundaryProjections p1 = boundary_projections(ball, 1);
    const BoundaryProjections p2 = boundary_projections(ball, 2);
    sum += p1.e0.to_dense() + p1.e_plus.to_dense() + p1.e_minus.to_dense();
    sum += p2.e_plus.to_dense() + p2.e_minus.to_dense();
    CHECK((sum - ComplexMatrix::Identity(dim, dim)).norm() == 0.0);

    // disjoint supports
    CHECK((p1.e_plus * p1.e_minus).nonzero_count() == 0);
    CHECK((p1.e_plus * p2.e_plus).nonzero_count() == 0);
    CHECK((p1.e_plus * p2.e_minus).nonzero_count() == 0);
  }

  TEST_CASE("rank of a boundary projection at radius one") {
    const GroupBall ball(2, 1);
    const BoundaryProjections p = boundary_projections(ball, 1);
    CHECK(p.e_plus.nonzero_count() == 1);  // only the single generator word
  }

  TEST_CASE("boundary split reproduces the translation") {
    const GroupBall ball(2, 4);
    for (int letter : signed_letters(2)) {
      const HaagerupPair pair = haagerup_decomposition(ball, letter);
      const SparseOperator lam = lambda_truncated(ball, ReducedWord::generator(letter));
      // exact identity on the whole ball for the truncated operators
      CHECK((pair.u.to_dense() + pair.v.to_dense() - lam.to_dense()).norm() <= 1e-15);
    }
  }

  TEST_CASE("boundary split row and column bounds") {
    const GroupBall ball(3, 3);
    const Eigen::Index dim = static_cast<Eigen::Index>(ball.size());
    SparseOperator uu(dim, dim), vv(dim, dim);
    for (int letter : signed_letters(3)) {
      const HaagerupPair pair = haagerup_decomposition(ball, letter);
      uu = uu + pair.u * pair.u.adjoint();
      vv = vv + pair.v.adjoint() * pair.v;
    }
    CHECK(operator_norm(uu) <= 1.0 + 1e-10);
    CHECK(operator_norm(vv) <= 1.0 + 1e-10);
  }

  TEST_CASE("triangle inequality through the boundary split") {
    const GroupBall ball(2, 4);
    Rng rng(31);
    const std::vector<int> letters = signed_letters(2);
    std::vector<SparseOperator> lams, us, vs;
    for (int letter : letters) {
      lams.push_back(lambda_truncated(ball, ReducedWord::generator(letter)));
      const HaagerupPair pair = haagerup_decomposition(ball, letter);
      us.push_back(pair.u);
      vs.push_back(pair.v);
    }
    for (int trial = 0; trial < 5; ++trial) {
      std::vector<ComplexMatrix> a;
      for (std::size_t i = 0; i < letters.size(); ++i) a.push_back(rng.gaussian_matrix(2, 2));
      const double total = operator_norm(kron_sum(lams, a));
      const double split = operator_norm(kron_sum(us, a)) + operator_norm(kron_sum(vs, a));
      CHECK(total <= split + 1e-8);
    }
  }

  TEST_CASE("scalar generator sum lies in the sandwich") {
    const GroupBall ball(2, 6);
    std::vector<SparseOperator> lams;
    std::vector<ComplexMatrix> ones;
    for (int i = 1; i <= 2; ++i) {
      lams.push_back(lambda_truncated(ball, ReducedWord::generator(i)));
      ones.push_back(ComplexMatrix::Identity(1, 1));
    }
    const double norm = operator_norm(kron_sum(lams, ones));
    CHECK(norm >= std::sqrt(2.0) - 1e-8);
    CHECK(norm <= 2.0 * std::sqrt(2.0) + 1e-8);
  }

  TEST_CASE("truncated norms are nondecreasing in the radius") {
    Rng rng(77);
    std::vector<ComplexMatrix> a;
    for (int i = 0; i < 4; ++i) a.push_back(rng.gaussian_matrix(2, 2));
    double prev = 0.0;
    for (int radius = 2; radius <= 5; ++radius) {
      const GroupBall ball(2, radius);
      std::vector<SparseOperator> lams;
      for (int letter : signed_letters(2))
        lams.push_back(lambda_truncated(ball, ReducedWord::generator(letter)));
      const double norm = operator_norm(kron_sum(lams, a));
      CHECK(norm >= prev - 1e-7);
      prev = norm;
    }
  }

  TEST_CASE("sandwich bounds with the in-ball witness") {
    for (int trial = 0; trial < 10; ++trial) {
      Rng rng(derive_seed(55, trial));
      const int n = 2, d = 2;
      const GroupBall ball(n, 3);
      std::vector<SparseOperator> lams;
      std::vector<ComplexMatrix> a;
      for (int letter : signed_letters(n)) {
        lams.push_back(lambda_truncated(ball, ReducedWord::generator(letter)));
        a.push_back(rng.gaussian_matrix(d, d));
      }
      ComplexMatrix col_gram = ComplexMatrix::Zero(d, d);
      ComplexMatrix row_gram = ComplexMatrix::Zero(d, d);
      for (const auto& m : a) {
        col_gram += m.adjoint() * m;
        row_gram += m * m.adjoint();
      }
      const double mx = std::max(hermitian_sqrt_norm(col_gram), hermitian_sqrt_norm(row_gram));
      const SparseOperator total = kron_sum(lams, a);
      const double norm = operator_norm(total);
      CHECK(norm >= mx - 1e-8);
      CHECK(norm <= 2 * mx + 1e-8);

      // witness vector delta_e (x) xi with xi the top eigenvector of the column gram
      Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(col_gram);
      const ComplexVector xi = es.eigenvectors().col(d - 1);
      ComplexVector w = ComplexVector::Zero(total.cols());
      w.segment(0, d) = xi;  // identity word has index 0
      CHECK(total.apply(w).norm() ==
            doctest::Approx(std::sqrt(es.eigenvalues()(d - 1))).epsilon(1e-10));
    }
  }

  TEST_CASE("argument guards") {
    const GroupBall ball(2, 2);
    CHECK_THROWS_AS(lambda_truncated(ball, ReducedWord::generator(3)), std::invalid_argument);
    CHECK_THROWS_AS(boundary_projections(ball, 0), std::invalid_argument);
    CHECK_THROWS_AS(boundary_projections(ball, 3), std::invalid_argument);
    CHECK_THROWS_AS(haagerup_decomposition(ball, 5), std::invalid_argument);
    CHECK_THROWS_AS(haagerup_decomposition(GroupBall(2, 0), 1), std::invalid_argument);
  }
}
