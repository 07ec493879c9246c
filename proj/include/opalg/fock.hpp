#pragma once

#include <vector>

#include "opalg/linalg.hpp"

namespace opalg {

/// Words over an alphabet of m letters (1-based) with length <= depth,
/// no reduction: the basis of a truncated full Fock space.  Index 0 is
/// the empty word (the vacuum).  Enumeration is by length and then
/// lexicographic, and the index arithmetic is closed-form.
class FockBasis {
 public:
  static constexpr std::size_t kDefaultMaxWords = 2'000'000;

  FockBasis(int alphabet, int depth, std::size_t max_words = kDefaultMaxWords);

  int alphabet() const { return m_; }
  int depth() const { return depth_; }
  std::size_t size() const { return size_; }

  std::size_t level_offset(int length) const;  // index of the first word of that length
  std::size_t level_size(int length) const;
  std::size_t index_of(const std::vector<int>& word) const;
  std::vector<int> word_at(std::size_t index) const;
  int length_of(std::size_t index) const;

  static std::size_t predicted_size(int alphabet, int depth,
                                    std::size_t max_words = kDefaultMaxWords);

 private:
  int m_;
  int depth_;
  std::size_t size_;
  std::vector<std::size_t> offsets_;  // offsets_[len] = first index of that length
};

/// Creation operator: prepends the letter when the result still fits,
/// otherwise maps to zero.
SparseOperator creation(const FockBasis& basis, int letter);

struct SemicircularSystem {
  FockBasis basis;
  std::vector<SparseOperator> x;  // x_k = (s_k + s_k^*) / 2
};

SemicircularSystem semicircular_system(int n, int depth,
                                       std::size_t max_words = FockBasis::kDefaultMaxWords);

struct CircularSystem {
  FockBasis basis;                // alphabet size 2n
  std::vector<SparseOperator> y;  // y_k = (x_{2k-1} + i x_{2k}) / sqrt(2)
};

CircularSystem circular_system(int n, int depth,
                               std::size_t max_words = FockBasis::kDefaultMaxWords);

/// <M vacuum, vacuum>.
Complex vacuum_state(const FockBasis& basis, const SparseOperator& m);

/// (1/2) || sum_i (s_i + s_i^*)^2 ||^{1/2} for the truncated creation
/// operators, computed exactly.
///
/// The quadratic form Q = sum (s_i + s_i^*)^2 acts on a word only through
/// prepending or stripping a doubled letter pair plus a level-dependent
/// diagonal, so the basis splits into orbits indexed by the word left
/// after greedily stripping leading pairs.  Each orbit is a rooted n-ary
/// tree on which Q is sqrt(n) (shift + shift^*) + diagonal; the tree in
/// turn splits into finite Jacobi chains (one radial chain from the root,
/// defect chains from each deeper level).  The norm is the maximum of the
/// top eigenvalues of these small tridiagonal matrices, so arbitrarily
/// deep truncations cost O(depth^3) instead of O(n^depth).
double cuntz_witness_value(int n, int depth);

/// Column/row pair of coefficient tuples: an element sum col_i (x) a_i +
/// row_i (x) b_i of the column-plus-row operator space with d x d
/// coefficients.
struct ColumnRowFamily {
  std::vector<ComplexMatrix> column_part;
  std::vector<ComplexMatrix> row_part;
};

/// The flip that exchanges the column and row coefficient tuples.  An
/// involution whose fixed points are the pairs with equal tuples.
ColumnRowFamily r_map_apply(const ColumnRowFamily& z);

/// max{ ||sum a_i^* a_i||^{1/2}, ||sum b_i b_i^*||^{1/2} }.
double column_row_norm(const ColumnRowFamily& z);

}  // namespace opalg
