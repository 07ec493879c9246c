#include "opalg/fock.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace opalg {

std::size_t FockBasis::predicted_size(int alphabet, int depth, std::size_t max_words) {
  if (alphabet < 1 || depth < 0) throw std::invalid_argument("FockBasis: need m >= 1, depth >= 0");
  long double total = 0.0L;
  long double level = 1.0L;
  for (int len = 0; len <= depth; ++len) {
    total += level;
    if (total > static_cast<long double>(max_words))
      throw SizeLimitError("FockBasis: basis size exceeds limit",
                           static_cast<std::size_t>(std::min<long double>(total, 1e18L)),
                           max_words);
    level *= alphabet;
  }
  return static_cast<std::size_t>(total);
}

FockBasis::FockBasis(int alphabet, int depth, std::size_t max_words)
    : m_(alphabet), depth_(depth), size_(predicted_size(alphabet, depth, max_words)) {
  offsets_.resize(depth_ + 2);
  offsets_[0] = 0;
  std::size_t level = 1;
  for (int len = 0; len <= depth_; ++len) {
    offsets_[len + 1] = offsets_[len] + level;
    level *= m_;
  }
}

std::size_t FockBasis::level_offset(int length) const {
  if (length < 0 || length > depth_) throw std::invalid_argument("FockBasis: bad length");
  return offsets_[length];
}

std::size_t FockBasis::level_size(int length) const {
  level_offset(length);  // range check
  return offsets_[length + 1] - offsets_[length];
}

std::size_t FockBasis::index_of(const std::vector<int>& word) const {
  const int len = static_cast<int>(word.size());
  if (len > depth_) throw std::invalid_argument("FockBasis: word longer than depth");
  std::size_t rank = 0;
  for (int l : word) {
    if (l < 1 || l > m_) throw std::invalid_argument("FockBasis: letter out of range");
    rank = rank * m_ + static_cast<std::size_t>(l - 1);
  }
  return offsets_[len] + rank;
}

std::vector<int> FockBasis::word_at(std::size_t index) const {
  const int len = length_of(index);
  std::size_t rank = index - offsets_[len];
  std::vector<int> word(len);
  for (int t = len - 1; t >= 0; --t) {
    word[t] = static_cast<int>(rank % m_) + 1;
    rank /= m_;
  }
  return word;
}

int FockBasis::length_of(std::size_t index) const {
  if (index >= size_) throw std::invalid_argument("FockBasis: index out of range");
  int len = 0;
  while (offsets_[len + 1] <= index) ++len;
  return len;
}

SparseOperator creation(const FockBasis& basis, int letter) {
  if (letter < 1 || letter > basis.alphabet())
    throw std::invalid_argument("creation: letter out of range");
  std::vector<Triplet> ts;
  ts.reserve(basis.size());
  for (int len = 0; len < basis.depth(); ++len) {
    const std::size_t src = basis.level_offset(len);
    const std::size_t dst = basis.level_offset(len + 1);
    const std::size_t count = basis.level_offset(len + 1) - src;
    // prepending a letter sends rank r at level len to rank
    // (letter-1)*m^len + r at level len+1
    std::size_t block = 1;
    for (int i = 0; i < len; ++i) block *= basis.alphabet();
    for (std::size_t r = 0; r < count; ++r)
      ts.push_back({static_cast<Eigen::Index>(dst + (letter - 1) * block + r),
                    static_cast<Eigen::Index>(src + r), 1.0});
  }
  return SparseOperator::from_triplets(basis.size(), basis.size(), ts);
}

SemicircularSystem semicircular_system(int n, int depth, std::size_t max_words) {
  if (n < 1) throw std::invalid_argument("semicircular_system: n must be >= 1");
  if (depth < 2) throw std::invalid_argument("semicircular_system: depth must be >= 2");
  FockBasis basis(n, depth, max_words);
  std::vector<SparseOperator> x;
  x.reserve(n);
  for (int k = 1; k <= n; ++k) {
    const SparseOperator s = creation(basis, k);
    x.push_back((s + s.adjoint()).scaled(0.5));
  }
  return {std::move(basis), std::move(x)};
}

CircularSystem circular_system(int n, int depth, std::size_t max_words) {
  SemicircularSystem sem = semicircular_system(2 * n, depth, max_words);
  std::vector<SparseOperator> y;
  y.reserve(n);
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  for (int k = 1; k <= n; ++k)
    y.push_back((sem.x[2 * k - 2] + sem.x[2 * k - 1].scaled(Complex(0, 1))).scaled(inv_sqrt2));
  return {std::move(sem.basis), std::move(y)};
}

Complex vacuum_state(const FockBasis& basis, const SparseOperator& m) {
  if (m.rows() != static_cast<Eigen::Index>(basis.size()) || m.rows() != m.cols())
    throw std::invalid_argument("vacuum_state: operator does not act on the basis");
  ComplexVector vac = ComplexVector::Zero(m.cols());
  vac(0) = 1.0;
  return m.apply(vac)(0);
}

namespace {

double jacobi_top_eigenvalue(const std::vector<double>& diag, double offdiag) {
  const int s = static_cast<int>(diag.size());
  Eigen::MatrixXd j = Eigen::MatrixXd::Zero(s, s);
  for (int i = 0; i < s; ++i) {
    j(i, i) = diag[i];
    if (i + 1 < s) j(i, i + 1) = j(i + 1, i) = offdiag;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(j);
  return es.eigenvalues()(s - 1);
}

}  // namespace

double cuntz_witness_value(int n, int depth) {
  if (n < 1) throw std::invalid_argument("cuntz_witness_value: n must be >= 1");
  if (depth < 4) throw std::invalid_argument("cuntz_witness_value: depth must be >= 4");

  // Diagonal of Q at a word of length len: +1 unless the word is empty
  // (some s_i s_i^* fixes it) and +n unless len == depth (every s_i^* s_i
  // fixes it below the top level).
  auto diag_at = [&](int len) {
    return (len > 0 ? 1.0 : 0.0) + (len < depth ? static_cast<double>(n) : 0.0);
  };
  const double offdiag = std::sqrt(static_cast<double>(n));

  double lambda_max = 0.0;
  for (int core_len = 0; core_len <= depth; ++core_len) {
    // cores are words that do not start with a doubled letter
    const bool cores_exist = (core_len == 0) || (n >= 2) || (core_len == 1);
    if (!cores_exist) continue;
    const int chain_levels = (depth - core_len) / 2;  // levels 0..chain_levels
    for (int start = 0; start <= chain_levels; ++start) {
      // start > 0 chains come from non-radial directions, absent for n = 1
      if (start > 0 && n < 2) break;
      std::vector<double> diag;
      diag.reserve(chain_levels - start + 1);
      for (int j = start; j <= chain_levels; ++j) diag.push_back(diag_at(core_len + 2 * j));
      lambda_max = std::max(lambda_max, jacobi_top_eigenvalue(diag, offdiag));
    }
  }
  return 0.5 * std::sqrt(lambda_max);
}

ColumnRowFamily r_map_apply(const ColumnRowFamily& z) {
  if (z.column_part.size() != z.row_part.size())
    throw std::invalid_argument("r_map_apply: tuple length mismatch");
  return {z.row_part, z.column_part};
}

double column_row_norm(const ColumnRowFamily& z) {
  if (z.column_part.size() != z.row_part.size())
    throw std::invalid_argument("column_row_norm: tuple length mismatch");
  if (z.column_part.empty()) return 0.0;
  const Eigen::Index d = z.column_part.front().rows();
  ComplexMatrix col_gram = ComplexMatrix::Zero(d, d);
  ComplexMatrix row_gram = ComplexMatrix::Zero(d, d);
  for (const auto& a : z.column_part) col_gram += a.adjoint() * a;
  for (const auto& b : z.row_part) row_gram += b * b.adjoint();
  return std::max(hermitian_sqrt_norm(col_gram), hermitian_sqrt_norm(row_gram));
}

}  // namespace opalg
