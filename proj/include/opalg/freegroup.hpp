#pragma once

#include <optional>
#include <unordered_map>
#include <vector>

#include "opalg/linalg.hpp"

namespace opalg {

/// Reduced word in a free group.  Letters are signed generator indices:
/// +i for the i-th generator, -i for its inverse (i >= 1).  The stored
/// sequence never contains an adjacent cancelling pair.
class ReducedWord {
 public:
  ReducedWord() = default;

  static ReducedWord generator(int i);
  /// Reduces the given letter sequence fully.
  static ReducedWord from_letters(const std::vector<int>& letters);

  const std::vector<int>& letters() const { return letters_; }
  int length() const { return static_cast<int>(letters_.size()); }
  bool is_identity() const { return letters_.empty(); }
  int first_letter() const { return letters_.empty() ? 0 : letters_.front(); }
  int max_generator() const;
  ReducedWord inverse() const;

  bool operator==(const ReducedWord&) const = default;

 private:
  std::vector<int> letters_;
};

/// Concatenation with full cancellation.
ReducedWord multiply(const ReducedWord& w1, const ReducedWord& w2);

struct WordHash {
  std::size_t operator()(const std::vector<int>& w) const {
    std::size_t h = 1469598103934665603ULL;
    for (int x : w) {
      h ^= static_cast<std::size_t>(static_cast<std::uint32_t>(x));
      h *= 1099511628211ULL;
    }
    return h;
  }
};

/// All reduced words of length <= radius in the free group on n
/// generators, enumerated breadth-first by length and lexicographically
/// within each length (letter order g1 < g1^-1 < g2 < g2^-1 < ...).
/// Index 0 is the identity.  The indices are the basis order of the
/// truncated ell^2 space every operator in this module acts on.
class GroupBall {
 public:
  static constexpr std::size_t kDefaultMaxWords = 5'000'000;

  GroupBall(int generator_count, int radius, std::size_t max_words = kDefaultMaxWords);

  int generator_count() const { return n_; }
  int radius() const { return radius_; }
  std::size_t size() const { return words_.size(); }
  const ReducedWord& word(std::size_t idx) const { return words_[idx]; }
  std::optional<std::size_t> index(const ReducedWord& w) const;

  /// 1 + sum_{m=1..R} 2n (2n-1)^{m-1}, guarded against overflow.
  static std::size_t predicted_size(int n, int radius, std::size_t max_words = kDefaultMaxWords);

 private:
  int n_;
  int radius_;
  std::vector<ReducedWord> words_;
  std::unordered_map<std::vector<int>, std::size_t, WordHash> index_;
};

/// Compression of the left-translation action to the ball: delta_g maps to
/// delta_{wg} when |wg| <= radius and to 0 otherwise.  A sub-permutation
/// matrix, isometric on the span of the columns it does not annihilate.
SparseOperator lambda_truncated(const GroupBall& ball, const ReducedWord& w);

struct BoundaryProjections {
  SparseOperator e0;       // onto the identity coordinate
  SparseOperator e_plus;   // onto words starting with +i
  SparseOperator e_minus;  // onto words starting with -i
};

BoundaryProjections boundary_projections(const GroupBall& ball, int generator);

struct HaagerupPair {
  SparseOperator u;  // length-increasing part e^+ lambda(g)
  SparseOperator v;  // length-decreasing part lambda(g) e^-
};

/// Splits the truncated translation by the given signed letter into its
/// length-increasing and length-decreasing parts; u + v equals the
/// truncated translation operator on the whole ball.
HaagerupPair haagerup_decomposition(const GroupBall& ball, int letter);

/// Signed letters [+1, -1, +2, -2, ...] up to generator count n.
std::vector<int> signed_letters(int n);

/// sum_i lambda(w_i) (x) a_i as one sparse operator on ball (x) C^d.
SparseOperator lambda_tensor_sum(const GroupBall& ball, const std::vector<ReducedWord>& words,
                                 const std::vector<ComplexMatrix>& coefficients);

}  // namespace opalg
