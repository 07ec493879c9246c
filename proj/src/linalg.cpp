#include "opalg/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <unordered_set>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "opalg/rng.hpp"

namespace opalg {

namespace {

using MatVec = std::function<ComplexVector(const ComplexVector&)>;

ComplexVector seeded_start(Eigen::Index n, std::uint64_t salt) {
  Rng rng(0x6f70616c67ULL ^ salt);
  ComplexVector v = rng.gaussian_vector(n);
  const double nrm = v.norm();
  if (nrm > 0) v /= nrm;
  return v;
}

// Largest eigenvalue of a Hermitian PSD map by restarted Lanczos with full
// reorthogonalization.  Each Ritz value is a Rayleigh quotient over a
// Krylov subspace, so the returned estimate approaches the top eigenvalue
// from below.
double lanczos_top_eigenvalue(const MatVec& apply_gram, Eigen::Index dim, double tol,
                              int max_matvec, int cycle_hint = 32) {
  if (dim == 0) return 0.0;
  const int cycle = static_cast<int>(std::min<Eigen::Index>(dim, cycle_hint));

  ComplexVector q = seeded_start(dim, static_cast<std::uint64_t>(dim) * 0x9e37ULL + 17);
  double ritz_prev = -1.0;
  double ritz = 0.0;
  double residual = 0.0;
  int matvecs = 0;

  while (matvecs < max_matvec) {
    std::vector<ComplexVector> basis;
    basis.reserve(cycle);
    Eigen::VectorXd alpha(cycle), beta(cycle);
    int m = 0;
    ComplexVector v = q;
    double vnorm = v.norm();
    if (vnorm == 0.0) return 0.0;
    v /= vnorm;

    for (int j = 0; j < cycle; ++j) {
      basis.push_back(v);
      ComplexVector w = apply_gram(v);
      ++matvecs;
      alpha(j) = std::real(v.dot(w));
      // two-pass Gram-Schmidt against the stored basis
      for (int pass = 0; pass < 2; ++pass)
        for (const auto& b : basis) w -= b.dot(w) * b;
      const double bn = w.norm();
      beta(j) = bn;
      m = j + 1;
      if (bn < 1e-14 * std::max(1.0, std::abs(alpha(j)))) break;  // invariant subspace
      v = w / bn;
    }

    Eigen::MatrixXd tri = Eigen::MatrixXd::Zero(m, m);
    for (int j = 0; j < m; ++j) {
      tri(j, j) = alpha(j);
      if (j + 1 < m) tri(j, j + 1) = tri(j + 1, j) = beta(j);
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(tri);
    const int top = m - 1;
    ritz = es.eigenvalues()(top);
    Eigen::VectorXd y = es.eigenvectors().col(top);

    ComplexVector x = ComplexVector::Zero(dim);
    for (int j = 0; j < m; ++j) x += y(j) * basis[j];
    x /= std::max(x.norm(), 1e-300);
    residual = (m > 0 && beta(m - 1) > 0) ? std::abs(beta(m - 1) * y(m - 1)) : 0.0;

    const bool exhausted = (m < cycle) || (beta(m - 1) < 1e-14 * std::max(1.0, ritz));
    if (exhausted) return std::max(ritz, 0.0);
    if (ritz_prev >= 0.0 && std::abs(ritz - ritz_prev) <= tol * std::max(1.0, ritz))
      return std::max(ritz, 0.0);
    ritz_prev = ritz;
    q = x;
  }
  throw ConvergenceError("operator_norm: Krylov iteration did not converge",
                         std::sqrt(std::max(ritz, 0.0)), residual, matvecs);
}

double iterative_norm(const MatVec& apply, const MatVec& apply_adj, Eigen::Index rows,
                      Eigen::Index cols, double tol, Eigen::Index nnz_estimate) {
  const Eigen::Index dim = cols;
  // On large soft-edged spectra the reorthogonalization against the stored
  // basis dominates the matrix applications, so iterate on (M*M)^q: the
  // Krylov polynomial degree per stored vector grows q-fold while the Ritz
  // value stays a Rayleigh quotient (of the power), hence still a certified
  // under-estimate of sigma_max^{2q}.  q balances the per-step cost of the
  // two-pass reorthogonalization (~cycle * dim) against 2q matrix passes.
  const Eigen::Index matvec_cost = std::max<Eigen::Index>(rows + cols + nnz_estimate, 1);
  const int q = static_cast<int>(std::clamp<Eigen::Index>(48 * dim / matvec_cost, 1, 16));
  const int cycle_hint = q >= 8 ? 12 : (q >= 3 ? 16 : 32);
  auto gram_q = [&](const ComplexVector& v) {
    ComplexVector w = v;
    for (int i = 0; i < q; ++i) w = apply_adj(apply(w));
    return w;
  };
  const double lam = lanczos_top_eigenvalue(gram_q, dim, tol, 10000, cycle_hint);
  return std::pow(std::max(lam, 0.0), 0.5 / q);
}

// Top singular value through the Gram spectrum.  BDCSVD is avoided on
// purpose: Eigen 3.4 returns wrong singular values for some complex
// matrices once the divide-and-conquer path engages (dimension >= 16).
double dense_svd_norm(const ComplexMatrix& m) {
  if (m.rows() == 0 || m.cols() == 0) return 0.0;
  if (m.rows() < m.cols()) return dense_svd_norm(ComplexMatrix(m.adjoint()));
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(ComplexMatrix(m.adjoint() * m));
  return std::sqrt(std::max(es.eigenvalues()(es.eigenvalues().size() - 1), 0.0));
}

double power_iteration_impl(const MatVec& apply, const MatVec& apply_adj, Eigen::Index cols,
                            double tol, int max_iter) {
  if (cols == 0) return 0.0;
  ComplexVector v = seeded_start(cols, static_cast<std::uint64_t>(cols) + 0x7049ULL);
  double rayleigh_prev = -1.0;
  double rayleigh = 0.0;
  for (int it = 0; it < max_iter; ++it) {
    ComplexVector w = apply_adj(apply(v));
    rayleigh = std::real(v.dot(w));
    const double wn = w.norm();
    if (wn == 0.0) return 0.0;
    if (rayleigh_prev >= 0.0 && std::abs(rayleigh - rayleigh_prev) <= tol * std::max(1.0, rayleigh))
      return std::sqrt(std::max(rayleigh, 0.0));
    rayleigh_prev = rayleigh;
    v = w / wn;
  }
  const double residual = std::abs(rayleigh - rayleigh_prev);
  throw ConvergenceError("power_iteration_norm: no convergence within iteration cap",
                         std::sqrt(std::max(rayleigh, 0.0)), residual, max_iter);
}

}  // namespace

SparseOperator SparseOperator::from_triplets(Eigen::Index rows, Eigen::Index cols,
                                             const std::vector<Triplet>& entries) {
  std::unordered_set<std::uint64_t> seen;
  seen.reserve(entries.size());
  std::vector<Eigen::Triplet<Complex>> ts;
  ts.reserve(entries.size());
  for (const auto& t : entries) {
    if (t.row < 0 || t.row >= rows || t.col < 0 || t.col >= cols)
      throw std::invalid_argument("SparseOperator: coordinate out of range");
    const std::uint64_t key =
        (static_cast<std::uint64_t>(t.row) << 32) | static_cast<std::uint32_t>(t.col);
    if (!seen.insert(key).second)
      throw std::invalid_argument("SparseOperator: duplicate coordinate");
    ts.emplace_back(static_cast<int>(t.row), static_cast<int>(t.col), t.value);
  }
  Eigen::SparseMatrix<Complex> m(rows, cols);
  m.setFromTriplets(ts.begin(), ts.end());
  m.makeCompressed();
  return SparseOperator(std::move(m));
}

SparseOperator SparseOperator::accumulate(Eigen::Index rows, Eigen::Index cols,
                                          const std::vector<Triplet>& entries) {
  std::vector<Eigen::Triplet<Complex>> ts;
  ts.reserve(entries.size());
  for (const auto& t : entries) {
    if (t.row < 0 || t.row >= rows || t.col < 0 || t.col >= cols)
      throw std::invalid_argument("SparseOperator: coordinate out of range");
    ts.emplace_back(static_cast<int>(t.row), static_cast<int>(t.col), t.value);
  }
  Eigen::SparseMatrix<Complex> m(rows, cols);
  m.setFromTriplets(ts.begin(), ts.end());
  m.prune([](Eigen::Index, Eigen::Index, const Complex& v) { return v != Complex(0, 0); });
  m.makeCompressed();
  return SparseOperator(std::move(m));
}

SparseOperator SparseOperator::identity(Eigen::Index n) {
  Eigen::SparseMatrix<Complex> m(n, n);
  m.setIdentity();
  return SparseOperator(std::move(m));
}

SparseOperator SparseOperator::diagonal(const Eigen::VectorXd& d) {
  std::vector<Eigen::Triplet<Complex>> ts;
  for (Eigen::Index i = 0; i < d.size(); ++i)
    if (d(i) != 0.0) ts.emplace_back(static_cast<int>(i), static_cast<int>(i), Complex(d(i), 0));
  Eigen::SparseMatrix<Complex> m(d.size(), d.size());
  m.setFromTriplets(ts.begin(), ts.end());
  m.makeCompressed();
  return SparseOperator(std::move(m));
}

SparseOperator SparseOperator::adjoint() const {
  Eigen::SparseMatrix<Complex> m = mat_.adjoint();
  m.makeCompressed();
  return SparseOperator(std::move(m));
}

std::vector<Triplet> SparseOperator::triplets() const {
  std::vector<Triplet> out;
  out.reserve(static_cast<std::size_t>(mat_.nonZeros()));
  for (int k = 0; k < mat_.outerSize(); ++k)
    for (Eigen::SparseMatrix<Complex>::InnerIterator it(mat_, k); it; ++it)
      out.push_back({it.row(), it.col(), it.value()});
  return out;
}

SparseOperator SparseOperator::operator+(const SparseOperator& o) const {
  Eigen::SparseMatrix<Complex> m = mat_ + o.mat_;
  m.makeCompressed();
  return SparseOperator(std::move(m));
}

SparseOperator SparseOperator::operator-(const SparseOperator& o) const {
  Eigen::SparseMatrix<Complex> m = mat_ - o.mat_;
  m.makeCompressed();
  return SparseOperator(std::move(m));
}

SparseOperator SparseOperator::operator*(const SparseOperator& o) const {
  Eigen::SparseMatrix<Complex> m = mat_ * o.mat_;
  m.prune([](Eigen::Index, Eigen::Index, const Complex& v) { return v != Complex(0, 0); });
  m.makeCompressed();
  return SparseOperator(std::move(m));
}

SparseOperator SparseOperator::scaled(Complex factor) const {
  Eigen::SparseMatrix<Complex> m = mat_ * factor;
  m.makeCompressed();
  return SparseOperator(std::move(m));
}

SparseOperator SparseOperator::kron_dense(const ComplexMatrix& block) const {
  const Eigen::Index d1 = block.rows(), d2 = block.cols();
  std::vector<Eigen::Triplet<Complex>> ts;
  ts.reserve(static_cast<std::size_t>(mat_.nonZeros()) * d1 * d2);
  for (int k = 0; k < mat_.outerSize(); ++k)
    for (Eigen::SparseMatrix<Complex>::InnerIterator it(mat_, k); it; ++it)
      for (Eigen::Index p = 0; p < d1; ++p)
        for (Eigen::Index q = 0; q < d2; ++q) {
          const Complex v = it.value() * block(p, q);
          if (v != Complex(0, 0))
            ts.emplace_back(static_cast<int>(it.row() * d1 + p),
                            static_cast<int>(it.col() * d2 + q), v);
        }
  Eigen::SparseMatrix<Complex> m(mat_.rows() * d1, mat_.cols() * d2);
  m.setFromTriplets(ts.begin(), ts.end());
  m.makeCompressed();
  return SparseOperator(std::move(m));
}

double operator_norm(const ComplexMatrix& m, double tol) {
  if (tol <= 0) throw std::invalid_argument("operator_norm: tol must be positive");
  if (std::max(m.rows(), m.cols()) < kDenseNormCrossover) return dense_svd_norm(m);
  auto apply = [&](const ComplexVector& v) -> ComplexVector { return m * v; };
  auto apply_adj = [&](const ComplexVector& v) -> ComplexVector { return m.adjoint() * v; };
  return iterative_norm(apply, apply_adj, m.rows(), m.cols(), tol, m.rows() * m.cols());
}

double operator_norm(const SparseOperator& m, double tol) {
  if (tol <= 0) throw std::invalid_argument("operator_norm: tol must be positive");
  if (std::max(m.rows(), m.cols()) < kDenseNormCrossover) return dense_svd_norm(m.to_dense());
  const Eigen::SparseMatrix<Complex> adj = m.matrix().adjoint();
  auto apply = [&](const ComplexVector& v) -> ComplexVector { return m.matrix() * v; };
  auto apply_adj = [&](const ComplexVector& v) -> ComplexVector { return adj * v; };
  return iterative_norm(apply, apply_adj, m.rows(), m.cols(), tol, m.nonzero_count());
}

double power_iteration_norm(const SparseOperator& m, double tol, int max_iter) {
  const Eigen::SparseMatrix<Complex> adj = m.matrix().adjoint();
  auto apply = [&](const ComplexVector& v) -> ComplexVector { return m.matrix() * v; };
  auto apply_adj = [&](const ComplexVector& v) -> ComplexVector { return adj * v; };
  return power_iteration_impl(apply, apply_adj, m.cols(), tol, max_iter);
}

double power_iteration_norm(const ComplexMatrix& m, double tol, int max_iter) {
  auto apply = [&](const ComplexVector& v) -> ComplexVector { return m * v; };
  auto apply_adj = [&](const ComplexVector& v) -> ComplexVector { return m.adjoint() * v; };
  return power_iteration_impl(apply, apply_adj, m.cols(), tol, max_iter);
}

double trace_norm(const ComplexMatrix& m) {
  if (m.rows() == 0 || m.cols() == 0) return 0.0;
  Eigen::JacobiSVD<ComplexMatrix> svd(m);
  return svd.singularValues().sum();
}

double hermitian_sqrt_norm(const ComplexMatrix& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("hermitian_sqrt_norm: matrix not square");
  if (m.rows() == 0) return 0.0;
  const double scale = m.norm();
  const double tol = 1e-9 * std::max(scale, 1e-30);
  if ((m - m.adjoint()).norm() > tol)
    throw std::invalid_argument("hermitian_sqrt_norm: matrix not Hermitian within tolerance");
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es((m + m.adjoint()) * 0.5);
  const auto& ev = es.eigenvalues();
  if (ev(0) < -tol)
    throw std::invalid_argument("hermitian_sqrt_norm: matrix not positive semidefinite");
  return std::sqrt(std::max(ev(ev.size() - 1), 0.0));
}

ComplexMatrix direct_sum(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out = ComplexMatrix::Zero(a.rows() + b.rows(), a.cols() + b.cols());
  out.topLeftCorner(a.rows(), a.cols()) = a;
  out.bottomRightCorner(b.rows(), b.cols()) = b;
  return out;
}

SparseOperator kron_sum(const std::vector<SparseOperator>& ops,
                        const std::vector<ComplexMatrix>& coefficients) {
  if (ops.size() != coefficients.size() || ops.empty())
    throw std::invalid_argument("kron_sum: need equally many operators and coefficients");
  const Eigen::Index rows = ops.front().rows();
  const Eigen::Index cols = ops.front().cols();
  const Eigen::Index d = coefficients.front().rows();
  std::vector<Triplet> ts;
  for (std::size_t i = 0; i < ops.size(); ++i) {
    if (ops[i].rows() != rows || ops[i].cols() != cols || coefficients[i].rows() != d ||
        coefficients[i].cols() != d)
      throw std::invalid_argument("kron_sum: dimension mismatch");
    for (const auto& t : ops[i].triplets())
      for (Eigen::Index p = 0; p < d; ++p)
        for (Eigen::Index q = 0; q < d; ++q) {
          const Complex v = t.value * coefficients[i](p, q);
          if (v != Complex(0, 0)) ts.push_back({t.row * d + p, t.col * d + q, v});
        }
  }
  return SparseOperator::accumulate(rows * d, cols * d, ts);
}

}  // namespace opalg
