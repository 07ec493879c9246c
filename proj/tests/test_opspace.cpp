#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <cmath>
#include <limits>

#include "opalg/opspace.hpp"
#include "opalg/rng.hpp"

using namespace opalg;

namespace {

OperatorFamily random_family(std::uint64_t seed, int n, int k, int d) {
  Rng rng(seed);
  OperatorFamily fam(n, k, d);
  for (std::size_t i = 0; i < fam.family_size(); ++i) fam.entry_flat(i) = rng.gaussian_matrix(d, d);
  return fam;
}

// Brute-force two-term split search for the k=1 decomposition infimum:
// cost(x) = ||column(x)||_tr + ||row(xi - x)||_tr minimized over a line
// grid through the target plus seeded random perturbations.  Every
// candidate is a valid decomposition, so the minimum upper-bounds the
// true infimum; with enough samples it approximates it.
double dual_split_oracle(const OperatorFamily& xi, int samples, std::uint64_t seed) {
  REQUIRE(xi.degree() == 1);
  const int n = xi.index_range(), d = xi.dim();
  const AlphaMask empty = AlphaMask::empty(1);
  const AlphaMask full = AlphaMask::full(1);
  auto cost = [&](const std::vector<ComplexMatrix>& x) {
    std::vector<ComplexMatrix> y(x.size());
    for (int i = 0; i < n; ++i) y[i] = xi.entry_flat(i) - x[i];
    const OperatorFamily fx = OperatorFamily::from_entries(n, 1, d, x);
    const OperatorFamily fy = OperatorFamily::from_entries(n, 1, d, y);
    return dual_alpha_norm(fx, empty) + dual_alpha_norm(fy, full);
  };

  double best = std::numeric_limits<double>::infinity();
  for (int g = 0; g <= 40; ++g) {
    std::vector<ComplexMatrix> x(n);
    for (int i = 0; i < n; ++i) x[i] = (g / 40.0) * xi.entry_flat(i);
    best = std::min(best, cost(x));
  }
  Rng rng(seed);
  for (int s = 0; s < samples; ++s) {
    const double t = rng.uniform();
    const double spread = 0.5 * rng.uniform();
    std::vector<ComplexMatrix> x(n);
    for (int i = 0; i < n; ++i)
      x[i] = t * xi.entry_flat(i) + spread * rng.gaussian_matrix(d, d);
    best = std::min(best, cost(x));
  }
  return best;
}

}  // namespace

TEST_SUITE("opspace") {
  TEST_CASE("mask bookkeeping") {
    const AlphaMask m = AlphaMask::from_positions(3, {1, 3});
    CHECK(m.bits() == 0b101);
    CHECK(m.contains(1));
    CHECK_FALSE(m.contains(2));
    CHECK(m.complement().positions() == std::vector<int>{2});
    CHECK_THROWS_AS(AlphaMask::from_positions(2, {3}), std::invalid_argument);
  }

  TEST_CASE("flat indexing is lexicographic with the first position major") {
    const OperatorFamily fam(3, 2, 1);
    CHECK(fam.flat_index({1, 1}) == 0);
    CHECK(fam.flat_index({1, 2}) == 1);
    CHECK(fam.flat_index({2, 1}) == 3);
    CHECK(fam.multi_index(5) == std::vector<int>{2, 3});
    CHECK_THROWS_AS(fam.flat_index({0, 1}), std::invalid_argument);
    CHECK_THROWS_AS(fam.flat_index({1}), std::invalid_argument);
  }

  TEST_CASE("matricization shapes at degree one") {
    OperatorFamily fam(2, 1, 2);
    Rng rng(3);
    fam.entry_flat(0) = rng.gaussian_matrix(2, 2);
    fam.entry_flat(1) = rng.gaussian_matrix(2, 2);
    const ComplexMatrix row = matricize(fam, AlphaMask::full(1));
    const ComplexMatrix col = matricize(fam, AlphaMask::empty(1));
    CHECK(row.rows() == 2);
    CHECK(row.cols() == 4);
    CHECK(col.rows() == 4);
    CHECK(col.cols() == 2);
    CHECK((row.block(0, 0, 2, 2) - fam.entry_flat(0)).norm() == 0.0);
    CHECK((col.block(2, 0, 2, 2) - fam.entry_flat(1)).norm() == 0.0);
  }

  TEST_CASE("constant scalar family matricizes to the all-ones block") {
    OperatorFamily fam(2, 2, 1);
    for (std::size_t i = 0; i < 4; ++i) fam.entry_flat(i) = ComplexMatrix::Constant(1, 1, 1.0);
    const ComplexMatrix m = matricize(fam, AlphaMask::from_positions(2, {1}));
    CHECK(m.rows() == 2);
    CHECK(m.cols() == 2);
    CHECK((m - ComplexMatrix::Constant(2, 2, 1.0)).norm() == 0.0);
    for (unsigned bits = 0; bits < 4; ++bits)
      CHECK(alpha_norm(fam, AlphaMask(2, bits)) == doctest::Approx(2.0).epsilon(1e-12));
  }

  TEST_CASE("column and row norms at degree one") {
    // a_i = e_{i1}: column gram 2 e_11, row gram identity
    OperatorFamily fam(2, 1, 2);
    for (int i = 0; i < 2; ++i) {
      ComplexMatrix a = ComplexMatrix::Zero(2, 2);
      a(i, 0) = 1.0;
      fam.entry_flat(i) = a;
    }
    CHECK(alpha_norm(fam, AlphaMask::empty(1)) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
    CHECK(alpha_norm(fam, AlphaMask::full(1)) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(bracket_norm(fam) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
  }

  TEST_CASE("zero family has zero norms") {
    const OperatorFamily fam(2, 2, 2);
    for (unsigned bits = 0; bits < 4; ++bits)
      CHECK(alpha_norm(fam, AlphaMask(2, bits)) == doctest::Approx(0.0));
    CHECK(bracket_norm(fam) == doctest::Approx(0.0));
  }

  TEST_CASE("endpoint masks agree with the gram square roots") {
    for (int trial = 0; trial < 10; ++trial) {
      const OperatorFamily fam = random_family(derive_seed(211, trial), 2, 2, 2);
      ComplexMatrix colg = ComplexMatrix::Zero(2, 2), rowg = ComplexMatrix::Zero(2, 2);
      for (std::size_t i = 0; i < fam.family_size(); ++i) {
        colg += fam.entry_flat(i).adjoint() * fam.entry_flat(i);
        rowg += fam.entry_flat(i) * fam.entry_flat(i).adjoint();
      }
      CHECK(alpha_norm(fam, AlphaMask::empty(2)) ==
            doctest::Approx(hermitian_sqrt_norm(colg)).epsilon(1e-10));
      CHECK(alpha_norm(fam, AlphaMask::full(2)) ==
            doctest::Approx(hermitian_sqrt_norm(rowg)).epsilon(1e-10));
    }
  }

  TEST_CASE("adjoint family swaps a mask with its complement") {
    for (int trial = 0; trial < 10; ++trial) {
      const OperatorFamily fam = random_family(derive_seed(223, trial), 2, 3, 2);
      OperatorFamily adj(2, 3, 2);
      for (std::size_t i = 0; i < fam.family_size(); ++i)
        adj.entry_flat(i) = fam.entry_flat(i).adjoint();
      for (unsigned bits = 0; bits < 8; ++bits) {
        const AlphaMask mask(3, bits);
        CHECK(alpha_norm(fam, mask) ==
              doctest::Approx(alpha_norm(adj, mask.complement())).epsilon(1e-10));
      }
    }
  }

  TEST_CASE("permutation covariance and scaling") {
    const OperatorFamily fam = random_family(229, 2, 2, 2);
    OperatorFamily permuted(2, 2, 2);  // swap 1 <-> 2 in every coordinate
    for (std::size_t flat = 0; flat < fam.family_size(); ++flat) {
      std::vector<int> J = fam.multi_index(flat);
      for (int& j : J) j = 3 - j;
      permuted.entry_flat(permuted.flat_index(J)) = fam.entry_flat(flat);
    }
    for (unsigned bits = 0; bits < 4; ++bits)
      CHECK(alpha_norm(fam, AlphaMask(2, bits)) ==
            doctest::Approx(alpha_norm(permuted, AlphaMask(2, bits))).epsilon(1e-10));

    const Complex c(0.3, -1.2);
    CHECK(bracket_norm(fam.scaled(c)) ==
          doctest::Approx(std::abs(c) * bracket_norm(fam)).epsilon(1e-10));
  }

  TEST_CASE("assembled tensor norm equals the bracket norm") {
    for (int n = 1; n <= 2; ++n)
      for (int k = 1; k <= 3; ++k)
        for (int d = 1; d <= 2; ++d)
          for (int trial = 0; trial < 3; ++trial) {
            const OperatorFamily fam =
                random_family(derive_seed(300 + 16 * n + 4 * k + d, trial), n, k, d);
            const EnAssembly assembly = assemble_en_tensor(fam);
            const double bracket = bracket_norm(fam);
            CHECK(operator_norm(assembly.total) ==
                  doctest::Approx(bracket).epsilon(1e-8));
            double comp_max = 0.0;
            for (unsigned bits = 0; bits < assembly.components.size(); ++bits) {
              const double comp = operator_norm(assembly.components[bits]);
              comp_max = std::max(comp_max, comp);
              CHECK(comp == doctest::Approx(alpha_norm(fam, AlphaMask(k, bits))).epsilon(1e-8));
            }
            CHECK(operator_norm(assembly.total) == doctest::Approx(comp_max).epsilon(1e-8));
          }
  }

  TEST_CASE("assembly size guard") {
    CHECK_THROWS_AS(assemble_en_tensor(OperatorFamily(3, 3, 2), 64), SizeLimitError);
  }

  TEST_CASE("dual column norm of a scalar pair") {
    OperatorFamily fam(2, 1, 1);
    fam.entry_flat(0) = ComplexMatrix::Constant(1, 1, 3.0);
    fam.entry_flat(1) = ComplexMatrix::Constant(1, 1, 4.0);
    CHECK(dual_alpha_norm(fam, AlphaMask::empty(1)) == doctest::Approx(5.0).epsilon(1e-12));
  }

  TEST_CASE("dual column norm equals the trace of the gram square root") {
    for (int trial = 0; trial < 10; ++trial) {
      const OperatorFamily fam = random_family(derive_seed(401, trial), 2, 1, 2);
      ComplexMatrix gram = ComplexMatrix::Zero(2, 2);
      for (std::size_t i = 0; i < fam.family_size(); ++i)
        gram += fam.entry_flat(i).adjoint() * fam.entry_flat(i);
      Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(gram);
      double trace_sqrt = 0.0;
      for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
        trace_sqrt += std::sqrt(std::max(es.eigenvalues()(i), 0.0));
      CHECK(dual_alpha_norm(fam, AlphaMask::empty(1)) ==
            doctest::Approx(trace_sqrt).epsilon(1e-10));
    }
  }

  TEST_CASE("pairing never exceeds the product of dual norms") {
    for (int trial = 0; trial < 100; ++trial) {
      const OperatorFamily xi = random_family(derive_seed(409, 2 * trial), 2, 2, 2);
      const OperatorFamily a = random_family(derive_seed(409, 2 * trial + 1), 2, 2, 2);
      Complex pairing = 0.0;
      for (std::size_t i = 0; i < xi.family_size(); ++i)
        pairing += (xi.entry_flat(i).adjoint() * a.entry_flat(i)).trace();
      for (unsigned bits = 0; bits < 4; ++bits) {
        const AlphaMask mask(2, bits);
        CHECK(std::abs(pairing) <=
              dual_alpha_norm(xi, mask) * alpha_norm(a, mask) + 1e-9);
      }
    }
  }

  TEST_CASE("dual bracket certificate of the zero family") {
    const DualBracketCertificate cert = dual_bracket_norm(OperatorFamily(2, 1, 2));
    CHECK(cert.lower == 0.0);
    CHECK(cert.upper == 0.0);
  }

  TEST_CASE("dual bracket certificate for a single matrix unit") {
    OperatorFamily xi(1, 1, 2);
    ComplexMatrix e11 = ComplexMatrix::Zero(2, 2);
    e11(0, 0) = 1.0;
    xi.entry_flat(0) = e11;
    const DualBracketCertificate cert = dual_bracket_norm(xi);
    CHECK(cert.lower <= cert.upper + 1e-12);
    CHECK(cert.lower == doctest::Approx(1.0).epsilon(1e-3));
    CHECK(cert.upper == doctest::Approx(1.0).epsilon(1e-3));
    const double oracle = dual_split_oracle(xi, 5000, 11);
    CHECK(cert.lower - 1e-9 <= oracle);
    CHECK(oracle <= cert.upper + 1e-9);
  }

  TEST_CASE("dual bracket certificates straddle the split oracle") {
    for (int trial = 0; trial < 6; ++trial) {
      const int n = 1 + trial % 2;
      const int d = 1 + (trial / 2) % 2;
      const OperatorFamily xi = random_family(derive_seed(431, trial), n, 1, d);
      const DualBracketCertificate cert = dual_bracket_norm(xi);
      const double oracle = dual_split_oracle(xi, 20000, derive_seed(433, trial));
      CHECK(cert.lower <= cert.upper + 1e-12);
      CHECK(cert.lower - 1e-9 <= oracle);
      // the oracle is itself an upper bound; allow its grid resolution
      CHECK(oracle <= cert.upper + 0.05 * std::max(1.0, cert.upper));
      CHECK(cert.upper <= oracle + 0.05 * std::max(1.0, oracle));
    }
  }

  TEST_CASE("dual bracket size guard") {
    CHECK_THROWS_AS(dual_bracket_norm(OperatorFamily(8, 3, 4)), SizeLimitError);
  }

  TEST_CASE("degree mismatch is rejected") {
    const OperatorFamily fam(2, 2, 1);
    CHECK_THROWS_AS(matricize(fam, AlphaMask::empty(1)), std::invalid_argument);
  }
}
